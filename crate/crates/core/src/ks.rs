//! The Kuga–Satake report: closed-form data for `C⁺(V) ≅ (S₀ ⊕ … ⊕ S_m)^{2^{m−2}}`,
//! the weight-1 Hodge tables `Sᵢ ≅ (∧ᵢ_K V)(i−1)_{1/2}`, and cross-checks
//! against the exact spin computation.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::clifford::{center_square_closed_form, CenterType, QuadFormDiag};
use crate::field::{format_rational, int, is_rational_square, square_free_rational, Rational};
use crate::hodge::{ext_power_k, half_twist, tate_twist, tensor_k_halfmodule, validate, HodgeError, HodgeTable};
use crate::polar::{signature_h, PolarError, PolarizedSetup};
use crate::quat::{norm_eq_search, QuatAlg, QuatError};
use crate::spin::{self, EndStructure, PartEndo, SpinError, MAX_M_EXTENDED, MAX_M_SUBSPACES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KsError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("discrepancy: {0}")]
    Discrepancy(String),
    #[error(transparent)]
    Hodge(#[from] HodgeError),
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error(transparent)]
    Quat(#[from] QuatError),
    #[error(transparent)]
    Polar(#[from] PolarError),
}

impl KsError {
    /// `2` for bad input, `1` for a mathematical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            KsError::Input(_) | KsError::Hodge(_) | KsError::Spin(SpinError::TooLarge { .. }) => 2,
            KsError::Quat(QuatError::ZeroConstant) => 2,
            _ => 1,
        }
    }
}

fn discrepancy(msg: impl Into<String>) -> KsError {
    KsError::Discrepancy(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Exact,
}

pub fn binomial(n: usize, k: i64) -> u128 {
    if k < 0 || k as usize > n {
        return 0;
    }
    let k = (k as usize).min(n - k as usize);
    (0..k).fold(1u128, |acc, j| acc * (n - j) as u128 / (j + 1) as u128)
}

/// Checks that `V` is a weight-2 structure over an imaginary quadratic field
/// with `h^{2,0} = 1` on the `Σ` embedding; returns `m = dim_K V` and `σ`.
pub fn check_k3_type(v: &HodgeTable) -> Result<(usize, usize), KsError> {
    let report = validate(v);
    if !report.is_valid() {
        let msg: Vec<String> = report.failures().flat_map(|c| c.offending.iter().map(move |o| format!("{}: {o}", c.name))).collect();
        return Err(KsError::Input(format!("table fails validation: {}", msg.join("; "))));
    }
    if v.field().half_degree() != 1 {
        return Err(KsError::Input("the CM field must be imaginary quadratic".into()));
    }
    if v.weight() != 2 {
        return Err(KsError::Input(format!("weight must be 2, got {}", v.weight())));
    }
    let sigma = v.cm_type().indices()[0];
    let sigma_bar = v.field().conj(sigma);
    if v.mult(sigma, 2, 0) == 0 && v.mult(sigma_bar, 2, 0) == 1 {
        return Err(KsError::Input(format!(
            "V^{{2,0}} lies on embedding {sigma_bar}, outside the CM type; swap the CM type to {{{sigma_bar}}}"
        )));
    }
    if v.mult(sigma, 2, 0) != 1 || v.mult(sigma, 0, 2) != 0 {
        return Err(KsError::Input(format!(
            "need mult({sigma},2,0) = 1 and mult({sigma},0,2) = 0, got {} and {}",
            v.mult(sigma, 2, 0),
            v.mult(sigma, 0, 2)
        )));
    }
    let m = v.dim_k().ok_or_else(|| KsError::Input("embedding totals differ".into()))? as usize;
    if m == 0 || v.mult(sigma, 1, 1) != m as u64 - 1 {
        return Err(KsError::Input(format!("need mult({sigma},1,1) = m − 1 = {}", m.saturating_sub(1))));
    }
    Ok((m, sigma))
}

/// `(∧ᵢ_K V)(i−1)_{1/2}`, computed literally for `0 ≤ i ≤ m`.
pub fn summand_table(v: &HodgeTable, i: usize) -> Result<HodgeTable, KsError> {
    let (m, sigma) = check_k3_type(v)?;
    if i > m {
        return Err(KsError::Input(format!("summand index {i} exceeds m = {m}")));
    }
    let t = half_twist(&tate_twist(&ext_power_k(v, i)?, i as i64 - 1), 1)?;
    let got = sigma_dims(&t, sigma);
    let want = expected_sigma_dims(m, i);
    if got != want || t.weight() != 1 {
        return Err(discrepancy(format!("S_{i}: σ-dims {got:?}, expected {want:?}")));
    }
    Ok(t)
}

/// `(mult(σ,1,0), mult(σ,0,1))`.
pub fn sigma_dims(t: &HodgeTable, sigma: usize) -> (u64, u64) {
    (t.mult(sigma, 1, 0), t.mult(sigma, 0, 1))
}

/// `(C(m−1, i−1), C(m−1, i))`.
pub fn expected_sigma_dims(m: usize, i: usize) -> (u64, u64) {
    let m1 = m.saturating_sub(1);
    (binomial(m1, i as i64 - 1) as u64, binomial(m1, i as i64) as u64)
}

/// `half_twist(S₁, −1) = V`, also read off as the diagonal part of `S₁ ⊗ K_{−1/2}`.
pub fn check_s0_tensor_s1(v: &HodgeTable) -> Result<bool, KsError> {
    let s1 = summand_table(v, 1)?;
    let back = half_twist(&s1, -1)?;
    let diag = tensor_k_halfmodule(&s1).diag;
    Ok(back == *v && diag == *v)
}

/// The quaternion algebra `D = (δ, dδ)` and its certificate.
#[derive(Debug, Clone, Serialize)]
pub struct SplitCertificate {
    pub algebra: [String; 2],
    pub symbols: Vec<(String, i8)>,
    pub split: bool,
    /// `δ = x² + d·y²`, found by bounded search when `D` is split.
    pub witness: Option<[String; 2]>,
    pub bound: u64,
    /// `(−d, −Π dᵢ)` and its verdict, present when `m ≡ 2 (mod 4)`.
    pub reduced_algebra: Option<[String; 2]>,
    pub reduced_split: Option<bool>,
}

/// Writes a witness for `n = x² + d·y²` by searching on the squarefree class of `n`.
pub fn norm_witness(n: &Rational, d: u64, bound: u64) -> Option<(Rational, Rational)> {
    let (s, t) = square_free_rational(n);
    let (x, y) = norm_eq_search(&int(s), d, bound)?;
    Some((x * &t, y * &t))
}

pub fn split_certificate(form: &QuadFormDiag, bound: u64) -> Result<SplitCertificate, KsError> {
    let delta = spin::delta(form);
    let d = int(form.d() as i64);
    let alg = QuatAlg::new(delta.clone(), &d * &delta)?;
    let symbols = alg.symbols(&alg.relevant_places()?)?;
    let split = symbols.iter().all(|&(_, s)| s == 1);
    let witness = if split { norm_witness(&delta, form.d(), bound) } else { None };
    if let Some((x, y)) = &witness {
        if &(x * x) + &(&d * y * y) != delta {
            return Err(discrepancy("norm witness does not satisfy δ = x² + d·y²"));
        }
    }
    let (reduced_algebra, reduced_split) = if form.m() % 4 == 2 {
        let red = QuatAlg::new(-&d, -form.diag_product())?;
        let red_split = red.is_split()?;
        if red_split != split || !alg.is_isomorphic(&red)? {
            return Err(discrepancy(format!("(δ, dδ) = {alg} and (−d, −Πdᵢ) = {red} differ")));
        }
        (Some([format_rational(red.a()), format_rational(red.b())]), Some(red_split))
    } else {
        (None, None)
    };
    Ok(SplitCertificate {
        algebra: [format_rational(alg.a()), format_rational(alg.b())],
        symbols: symbols.into_iter().map(|(p, s)| (p.to_string(), s)).collect(),
        split,
        witness: witness.map(|(x, y)| [format_rational(&x), format_rational(&y)]),
        bound,
        reduced_algebra,
        reduced_split,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SummandReport {
    pub index: usize,
    pub dim: String,
    /// `(dim S¹⁰ᵢ,σ, dim S¹⁰ᵢ,σ̄)`.
    pub hodge_dims: (u64, u64),
    /// `"K"` when `2i ≠ m`, `"D"` when `2i = m`.
    pub end_algebra: &'static str,
    pub table: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactSection {
    pub dim_s: usize,
    pub part_dims: Vec<usize>,
    pub parts: Vec<PartEndo>,
}

/// Whether the split verdict of the middle summand fits the rule
/// "x ≡ 0 (4) forces a skew field", read with x = m and with x = d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CongruenceReadings {
    pub m_reading: bool,
    pub d_reading: bool,
}

impl CongruenceReadings {
    pub fn new(m: usize, d: u64, split: bool) -> Self {
        Self { m_reading: !m.is_multiple_of(4) || !split, d_reading: !d.is_multiple_of(4) || !split }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KSReport {
    pub level: Level,
    pub m: usize,
    pub d: u64,
    pub diag: Vec<String>,
    pub dim_v: u64,
    pub h20: u64,
    pub h11: u64,
    pub delta: String,
    pub z_squared: String,
    pub center: String,
    pub m_mod_4: usize,
    pub split: SplitCertificate,
    /// Present for even `m`.
    pub congruence_readings: Option<CongruenceReadings>,
    pub summands: Vec<SummandReport>,
    /// `2^{m−2}`, absent for `m = 1`.
    pub s_multiplicity: Option<String>,
    /// `2^{2m−1} = dim C⁺(V)`, checked against `Σ dim Sᵢ · 2^{m−2}`.
    pub dim_even_clifford: Option<String>,
    pub hermitian_signature: (usize, usize),
    pub ball_dim: usize,
    pub s0_tensor_s1: bool,
    pub exact: Option<ExactSection>,
}

fn center_label(form: &QuadFormDiag, z2: &Rational) -> String {
    let center = if is_rational_square(z2) {
        CenterType::SplitProduct
    } else {
        CenterType::Field { isomorphic_to_k: is_rational_square(&(z2 * int(-(form.d() as i64)))) }
    };
    match center {
        CenterType::SplitProduct => "Q x Q".into(),
        CenterType::Field { isomorphic_to_k: true } => "K".into(),
        CenterType::Field { isomorphic_to_k: false } => "quadratic field other than K".into(),
    }
}

/// Assembles the report; `Exact` also runs the spin computation (`m ≤ 5`, or
/// `m ≤ 6` with `allow_m6`) and compares it field by field.
pub fn full_report(
    form: &QuadFormDiag,
    v: &HodgeTable,
    level: Level,
    bound: u64,
    allow_m6: bool,
) -> Result<KSReport, KsError> {
    let (m, sigma) = check_k3_type(v)?;
    if m != form.m() {
        return Err(KsError::Input(format!("form has m = {} but the table has dim_K V = {m}", form.m())));
    }
    if !form.has_weight_two_signature() {
        return Err(KsError::Input("form must have d₁ < 0 and d₂, …, d_m > 0".into()));
    }
    if bound == 0 {
        return Err(KsError::Input("bound must be at least 1".into()));
    }
    let max = if allow_m6 { MAX_M_EXTENDED } else { MAX_M_SUBSPACES };
    if level == Level::Exact && m > max {
        return Err(KsError::Spin(SpinError::TooLarge { m, max }));
    }

    let delta = spin::delta(form);
    let z2 = center_square_closed_form(form);
    let split = split_certificate(form, bound)?;

    let mut summands = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let t = summand_table(v, i)?;
        let dims = sigma_dims(&t, sigma);
        let half = binomial(m, i as i64);
        if (dims.0 + dims.1) as u128 != half || t.total_dim() as u128 != 2 * half {
            return Err(discrepancy(format!("S_{i}: Hodge dims {dims:?} do not add up to C({m},{i}) = {half}")));
        }
        summands.push(SummandReport {
            index: i,
            dim: (2 * half).to_string(),
            hodge_dims: dims,
            end_algebra: if 2 * i == m { "D" } else { "K" },
            table: t.to_json_value(),
        });
    }
    for i in 0..=m {
        if summands[i].dim != summands[m - i].dim {
            return Err(discrepancy(format!("dim S_{i} ≠ dim S_{}", m - i)));
        }
    }

    let (s_multiplicity, dim_even_clifford) = if m >= 2 {
        let mult = 1u128 << (m - 2);
        let total: u128 = (0..=m).map(|i| 2 * binomial(m, i as i64)).sum::<u128>() * mult;
        let even = 1u128 << (2 * m - 1);
        if total != even {
            return Err(discrepancy(format!("Σ dim Sᵢ · 2^(m−2) = {total} but dim C⁺(V) = {even}")));
        }
        (Some(mult.to_string()), Some(even.to_string()))
    } else {
        (None, None)
    };

    let sig = signature_h(&PolarizedSetup::from_form(form))?;
    if sig != (m - 1, 1) {
        return Err(discrepancy(format!("H has signature {sig:?}, expected ({}, 1)", m - 1)));
    }
    let (h20, h11) = (v.hodge_number(2, 0), v.hodge_number(1, 1));
    if h11 as usize != 2 * sig.0 || h20 as usize != sig.1 {
        return Err(discrepancy("signature of H disagrees with (h¹¹/2, h²⁰)"));
    }

    let s0_tensor_s1 = check_s0_tensor_s1(v)?;
    if !s0_tensor_s1 {
        return Err(discrepancy("half_twist(S₁, −1) ≠ V"));
    }

    let exact = match level {
        Level::Fast => None,
        Level::Exact => Some(exact_section(form, &summands, &split, allow_m6)?),
    };

    Ok(KSReport {
        level,
        m,
        d: form.d(),
        diag: form.diag().iter().map(format_rational).collect(),
        dim_v: v.total_dim(),
        h20,
        h11,
        delta: format_rational(&delta),
        z_squared: format_rational(&z2),
        center: center_label(form, &z2),
        m_mod_4: m % 4,
        congruence_readings: (m % 2 == 0).then(|| CongruenceReadings::new(m, form.d(), split.split)),
        split,
        summands,
        s_multiplicity,
        dim_even_clifford,
        hermitian_signature: sig,
        ball_dim: sig.0 * sig.1,
        s0_tensor_s1,
        exact,
    })
}

fn exact_section(
    form: &QuadFormDiag,
    summands: &[SummandReport],
    split: &SplitCertificate,
    allow_m6: bool,
) -> Result<ExactSection, KsError> {
    let m = form.m();
    let dec = spin::decompose(&Arc::new(form.clone()), true, allow_m6)?;
    let dim_s = dec.s.dim();
    if dim_s != 1 << (m + 1) {
        return Err(discrepancy(format!("dim S = {dim_s}, expected 2^{}", m + 1)));
    }
    let part_dims = dec.part_dims();
    for (i, (got, s)) in part_dims.iter().zip(summands).enumerate() {
        if got.to_string() != s.dim {
            return Err(discrepancy(format!("computed dim S_{i} = {got}, closed form {}", s.dim)));
        }
        if (s.hodge_dims.0 + s.hodge_dims.1) as usize * 2 != *got {
            return Err(discrepancy(format!("S_{i}: Hodge dims {:?} vs computed dimension {got}", s.hodge_dims)));
        }
    }
    if spin::even_algebra_accounting(m, dim_s) == Some(false) {
        return Err(discrepancy("2^(m−2) copies of S do not fill C⁺(V)"));
    }
    let inv = dec.invariance.ok_or_else(|| discrepancy("invariance data missing"))?;
    for p in &inv.parts {
        if p.commutant_dim != p.expected_dim {
            return Err(discrepancy(format!(
                "End(S_{}) has dimension {}, expected {}",
                p.index, p.commutant_dim, p.expected_dim
            )));
        }
        match (&p.structure, 2 * p.index == m) {
            (EndStructure::Quadratic { is_field: true, isomorphic_to_k: true, .. }, false) => {}
            (EndStructure::Quaternion { matches_delta: true, split: s, idempotent_rank, .. }, true) => {
                if *s != split.split {
                    return Err(discrepancy(format!("End(S_{}) split = {s}, Hilbert symbols say {}", p.index, split.split)));
                }
                if *s && *idempotent_rank != Some(p.dim / 2) {
                    return Err(discrepancy(format!("End(S_{}) is split but has no idempotent of rank {}", p.index, p.dim / 2)));
                }
            }
            (other, _) => {
                return Err(discrepancy(format!("End(S_{}) = {other:?} disagrees with the closed form", p.index)));
            }
        }
        if p.alpha_beta_commute == Some(false) {
            return Err(discrepancy(format!("α, β do not commute with u(H) on S_{}", p.index)));
        }
    }
    Ok(ExactSection { dim_s, part_dims, parts: inv.parts })
}

/// Runs [`full_report`] on independent inputs in parallel.
pub fn full_reports(
    jobs: &[(QuadFormDiag, HodgeTable)],
    level: Level,
    bound: u64,
) -> Vec<Result<KSReport, KsError>> {
    jobs.par_iter().map(|(f, v)| full_report(f, v, level, bound, false)).collect()
}

impl KSReport {
    /// Machine section: exact numbers as strings.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for KSReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Kuga-Satake report ({:?} level)", self.level)?;
        writeln!(f, "  K = Q(sqrt(-{})), m = {}, dim V = {}, diag = ({})", self.d, self.m, self.dim_v, self.diag.join(", "))?;
        writeln!(f, "  h20 = {}, h11 = {}", self.h20, self.h11)?;
        writeln!(f, "  delta = {}, z^2 = {}, center = {}, m mod 4 = {}", self.delta, self.z_squared, self.center, self.m_mod_4)?;
        let s = &self.split;
        let symbols: Vec<String> = s.symbols.iter().map(|(p, v)| format!("{p}:{v:+}")).collect();
        writeln!(
            f,
            "  D = ({}, {}): {} [symbols {}]",
            s.algebra[0],
            s.algebra[1],
            if s.split { "split" } else { "non-split" },
            symbols.join(" ")
        )?;
        match &s.witness {
            Some([x, y]) => writeln!(f, "    witness: delta = x^2 + {}y^2 with (x, y) = ({x}, {y})", self.d)?,
            None if s.split => writeln!(f, "    no witness within bound {}; symbols certify", s.bound)?,
            None => {}
        }
        if let (Some([a, b]), Some(red)) = (&s.reduced_algebra, s.reduced_split) {
            writeln!(f, "    (-d, -prod d_i) = ({a}, {b}): {}", if red { "split" } else { "non-split" })?;
        }
        if let Some(c) = self.congruence_readings {
            let fits = |ok: bool| if ok { "consistent" } else { "contradicted" };
            writeln!(
                f,
                "    rule \"x = 0 mod 4 gives a skew field\": x = m {}, x = d {}",
                fits(c.m_reading),
                fits(c.d_reading)
            )?;
        }
        writeln!(f, "  summands:")?;
        for p in &self.summands {
            writeln!(
                f,
                "    S_{:<2} dim {:>6}  (dim S10_sigma, dim S10_sigmabar) = ({}, {})  End = {}",
                p.index, p.dim, p.hodge_dims.0, p.hodge_dims.1, p.end_algebra
            )?;
        }
        match (&self.s_multiplicity, &self.dim_even_clifford) {
            (Some(k), Some(n)) => writeln!(f, "  C+(V) = S^{k}, dim {n}")?,
            _ => writeln!(f, "  m = 1: C+(V) accounting not applicable")?,
        }
        writeln!(f, "  signature of H = {:?}, ball dimension = {}", self.hermitian_signature, self.ball_dim)?;
        writeln!(f, "  V = diag part of S_0 (x) S_1: {}", if self.s0_tensor_s1 { "ok" } else { "FAILED" })?;
        if let Some(e) = &self.exact {
            writeln!(f, "  exact: dim S = {}, parts {:?}", e.dim_s, e.part_dims)?;
            for p in &e.parts {
                writeln!(f, "    End(S_{}) dim {} (expected {}): {}", p.index, p.commutant_dim, p.expected_dim, p.structure)?;
            }
        }
        Ok(())
    }
}

//! The spin subspace `S ⊂ C(V)` of a weight-2 form with imaginary quadratic
//! multiplication, its grading `S = S₀ ⊕ … ⊕ S_m`, and the action of `u(H)`.
//!
//! Everything is computed exactly. `S` and its parts are rational subspaces
//! of `C(V) ≅ Q^(2^(2m))`, indexed by blade bitmask.

use std::fmt;
use std::sync::Arc;

use num::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::clifford::{clifford_mul, conj_coeffs, Blade, CliffordElem, CliffordError, QuadFormDiag};
use crate::field::{format_rational, int, is_rational_square, square_free_rational, QuadElem, Rational};
use crate::linalg::{commutant, LinalgError, MatrixQ, SparseVec, SubspaceQ};
use crate::quat::{QuatAlg, QuatError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpinError {
    /// A relation that holds for every valid form failed: an arithmetic bug.
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("u(H) element {generator} does not preserve S_{part}: image of basis vector {witness} leaves it")]
    NotInvariant { generator: usize, part: usize, witness: usize },
    #[error("m = {m} exceeds the supported bound {max} for this computation")]
    TooLarge { m: usize, max: usize },
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Quat(#[from] QuatError),
}

fn internal(msg: impl Into<String>) -> SpinError {
    SpinError::Internal(msg.into())
}

/// `(−1)^{m(m−1)/2} d^m Π dᵢ`.
pub fn delta(form: &QuadFormDiag) -> Rational {
    let m = form.m();
    let sign = if (m * (m.saturating_sub(1)) / 2).is_multiple_of(2) { int(1) } else { int(-1) };
    sign * num::pow(int(form.d() as i64), m) * form.diag_product()
}

/// The isotropic basis `f₁, …, f_{2m}` of `V ⊗ K` and the pure spinors `f`, `f̄`.
#[derive(Debug, Clone)]
pub struct FBasis {
    form: Arc<QuadFormDiag>,
    elems: Vec<CliffordElem>,
    f: CliffordElem,
    fbar: CliffordElem,
    delta: Rational,
}

impl FBasis {
    pub fn form(&self) -> &Arc<QuadFormDiag> {
        &self.form
    }

    /// `f_j` for 1-based `j`.
    pub fn elem(&self, j: usize) -> &CliffordElem {
        &self.elems[j - 1]
    }

    pub fn f(&self) -> &CliffordElem {
        &self.f
    }

    pub fn fbar(&self) -> &CliffordElem {
        &self.fbar
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    /// `f + f̄`, which has rational coefficients.
    pub fn g_plus(&self) -> CliffordElem {
        &self.f + &self.fbar
    }

    /// `sqrt(-d)·(f − f̄)`, which has rational coefficients.
    pub fn g_minus(&self) -> CliffordElem {
        (&self.f - &self.fbar).scale(&QuadElem::sqrt_neg_d(self.form.d()))
    }
}

fn expect_eq(lhs: &CliffordElem, rhs: &CliffordElem, what: &str) -> Result<(), SpinError> {
    if lhs == rhs {
        Ok(())
    } else {
        Err(internal(format!("{what}: {lhs:?} != {rhs:?}")))
    }
}

/// Builds `f₁, …, f_{2m}`, `f`, `f̄`, `δ` and verifies every defining relation.
pub fn build_f_basis(form: &Arc<QuadFormDiag>) -> Result<FBasis, SpinError> {
    let m = form.m();
    let d = form.d();
    let phi = QuadElem::sqrt_neg_d(d);
    let half = Rational::new(1.into(), 2.into());
    let mut elems = Vec::with_capacity(2 * m);
    for i in 1..=m {
        let di = &form.diag()[i - 1];
        let c = Rational::one() / (int(2 * d as i64) * di);
        let x = &CliffordElem::generator(form, i).scale(&phi) + &CliffordElem::generator(form, m + i);
        elems.push(x.scale_rational(&c));
    }
    for i in 1..=m {
        let x = &CliffordElem::generator(form, m + i) - &CliffordElem::generator(form, i).scale(&phi);
        elems.push(x.scale_rational(&half));
    }

    let zero = CliffordElem::zero(form, crate::clifford::CoeffRing::Rational);
    let one = CliffordElem::scalar(form, int(1));
    for j in 0..2 * m {
        expect_eq(&clifford_mul(&elems[j], &elems[j])?, &zero, &format!("f_{}² = 0", j + 1))?;
        for k in (j + 1)..2 * m {
            let anti = &clifford_mul(&elems[j], &elems[k])? + &clifford_mul(&elems[k], &elems[j])?;
            let want = if k == j + m { &one } else { &zero };
            expect_eq(&anti, want, &format!("f_{} f_{} + f_{} f_{}", j + 1, k + 1, k + 1, j + 1))?;
        }
    }
    for i in 0..m {
        let ddi = int(d as i64) * &form.diag()[i];
        expect_eq(&conj_coeffs(&elems[i]), &elems[m + i].scale_rational(&(Rational::one() / &ddi)), "conj f_i")?;
        expect_eq(&conj_coeffs(&elems[m + i]), &elems[i].scale_rational(&ddi), "conj f_{m+i}")?;
    }

    let mut f = one.clone();
    for e in &elems[m..] {
        f = clifford_mul(&f, e)?;
    }
    let fbar = conj_coeffs(&f);
    let mut low = one.clone();
    for e in &elems[..m] {
        low = clifford_mul(&low, e)?;
    }
    let scale = num::pow(int(d as i64), m) * form.diag_product();
    expect_eq(&fbar, &low.scale_rational(&scale), "f̄ = d^m Π dᵢ f₁⋯f_m")?;

    let delta = delta(form);
    let fff = clifford_mul(&clifford_mul(&f, &fbar)?, &f)?;
    expect_eq(&fff, &f.scale_rational(&delta), "f f̄ f = δ f")?;
    let bfb = clifford_mul(&clifford_mul(&fbar, &f)?, &fbar)?;
    expect_eq(&bfb, &fbar.scale_rational(&delta), "f̄ f f̄ = δ f̄")?;

    Ok(FBasis { form: form.clone(), elems, f, fbar, delta })
}

fn to_vec(x: &CliffordElem) -> Result<SparseVec, SpinError> {
    x.to_vector().map_err(|_| internal(format!("expected rational coefficients in {x:?}")))
}

/// `S = C(V)(f+f̄) + C(V)·sqrt(-d)(f−f̄)`.
///
/// Computed as the closure of the two generators under left multiplication
/// by `e₁, …, e_{2m}`, which spans the same left ideal as all blade multiples.
pub fn build_s(fb: &FBasis) -> Result<SubspaceQ, SpinError> {
    let form = fb.form();
    let mut s = SubspaceQ::new(form.algebra_dim());
    let mut queue = vec![fb.g_plus(), fb.g_minus()];
    let gens: Vec<CliffordElem> = (1..=form.num_generators()).map(|k| CliffordElem::generator(form, k)).collect();
    while let Some(x) = queue.pop() {
        if s.insert(&to_vec(&x)?)? {
            for g in &gens {
                queue.push(clifford_mul(g, &x)?);
            }
        }
    }
    let expected = 1usize << (form.m() + 1);
    if s.dim() != expected {
        return Err(internal(format!("dim S = {} but 2^(m+1) = {expected}", s.dim())));
    }
    Ok(s)
}

/// The spanning set `{b·(f+f̄), b·sqrt(-d)(f−f̄)}` over every blade `b`, taken literally.
pub fn build_s_from_all_blades(fb: &FBasis) -> Result<SubspaceQ, SpinError> {
    let form = fb.form();
    let mut s = SubspaceQ::new(form.algebra_dim());
    let (gp, gm) = (fb.g_plus(), fb.g_minus());
    for b in 0..form.algebra_dim() as u64 {
        let blade = CliffordElem::blade(form, Blade(b), int(1));
        s.insert(&to_vec(&clifford_mul(&blade, &gp)?)?)?;
        s.insert(&to_vec(&clifford_mul(&blade, &gm)?)?)?;
    }
    Ok(s)
}

/// Matrix of a linear map in the pivot-ordered basis of `sub`; `None` if some
/// basis image leaves `sub` (with the index of that basis vector).
pub fn operator_matrix(
    sub: &SubspaceQ,
    mut map: impl FnMut(&SparseVec) -> Result<SparseVec, SpinError>,
) -> Result<Result<MatrixQ, usize>, SpinError> {
    let n = sub.dim();
    let mut out = MatrixQ::zeros(n, n);
    for (k, b) in sub.basis().enumerate() {
        let img = map(b)?;
        match sub.coordinates(&img)? {
            Some(c) => out.set_column(k, &c),
            None => return Ok(Err(k)),
        }
    }
    Ok(Ok(out))
}

fn right_mul_map<'a>(
    form: &'a Arc<QuadFormDiag>,
    by: &'a CliffordElem,
) -> impl FnMut(&SparseVec) -> Result<SparseVec, SpinError> + 'a {
    move |v| to_vec(&clifford_mul(&CliffordElem::from_vector(form, v)?, by)?)
}

fn left_mul_map<'a>(
    form: &'a Arc<QuadFormDiag>,
    by: &'a CliffordElem,
) -> impl FnMut(&SparseVec) -> Result<SparseVec, SpinError> + 'a {
    move |v| to_vec(&clifford_mul(by, &CliffordElem::from_vector(form, v)?)?)
}

/// `α: x ↦ x(f+f̄)` and `β: x ↦ x·sqrt(-d)(f−f̄)` as matrices on `S`.
#[derive(Debug, Clone)]
pub struct EndoOperators {
    pub alpha: MatrixQ,
    pub beta: MatrixQ,
}

pub fn endo_operators(fb: &FBasis, s: &SubspaceQ) -> Result<EndoOperators, SpinError> {
    let form = fb.form();
    let (gp, gm) = (fb.g_plus(), fb.g_minus());
    let alpha = operator_matrix(s, right_mul_map(form, &gp))?
        .map_err(|k| internal(format!("α moves basis vector {k} out of S")))?;
    let beta = operator_matrix(s, right_mul_map(form, &gm))?
        .map_err(|k| internal(format!("β moves basis vector {k} out of S")))?;
    let n = s.dim();
    let delta = fb.delta();
    let dd = int(form.d() as i64) * delta;
    let ab = &alpha * &beta;
    let checks = [
        (&alpha * &alpha == MatrixQ::scalar(n, delta), "α² = δ"),
        (&beta * &beta == MatrixQ::scalar(n, &dd), "β² = dδ"),
        (ab == -&(&beta * &alpha), "αβ = −βα"),
        (&ab * &ab == MatrixQ::scalar(n, &(-(&dd * delta))), "(αβ)² = −dδ²"),
    ];
    if let Some((_, name)) = checks.iter().find(|(ok, _)| !ok) {
        return Err(internal(format!("{name} fails on S")));
    }
    if alpha.rank() != n || beta.rank() != n {
        return Err(internal("α or β is not invertible on S"));
    }
    Ok(EndoOperators { alpha, beta })
}

/// All products `f_{j₁}⋯f_{j_i}` with `1 ≤ j₁ < … < j_i ≤ m`.
fn wedge_words(fb: &FBasis, i: usize) -> Result<Vec<CliffordElem>, SpinError> {
    let m = fb.form().m();
    let mut out = Vec::new();
    for mask in 0u64..(1 << m) {
        if mask.count_ones() as usize != i {
            continue;
        }
        let mut w = CliffordElem::scalar(fb.form(), int(1));
        for j in 0..m {
            if mask >> j & 1 == 1 {
                w = clifford_mul(&w, fb.elem(j + 1))?;
            }
        }
        out.push(w);
    }
    Ok(out)
}

/// `S_i = span{ wf + conj(wf), sqrt(-d)(wf − conj(wf)) : w ∈ Λ^i(f₁,…,f_m) }`.
pub fn build_part(fb: &FBasis, i: usize) -> Result<SubspaceQ, SpinError> {
    let form = fb.form();
    let phi = QuadElem::sqrt_neg_d(form.d());
    let mut sub = SubspaceQ::new(form.algebra_dim());
    for w in wedge_words(fb, i)? {
        let wf = clifford_mul(&w, fb.f())?;
        let c = conj_coeffs(&wf);
        sub.insert(&to_vec(&(&wf + &c))?)?;
        sub.insert(&to_vec(&(&wf - &c).scale(&phi))?)?;
    }
    Ok(sub)
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Builds `S₀, …, S_m` and checks dimensions, the direct sum `⊕Sᵢ = S`,
/// and `α(Sᵢ) ⊆ Sᵢ + S_{m−i}`.
pub fn build_parts(fb: &FBasis, s: &SubspaceQ) -> Result<Vec<SubspaceQ>, SpinError> {
    let m = fb.form().m();
    let parts: Vec<SubspaceQ> = (0..=m).map(|i| build_part(fb, i)).collect::<Result<_, _>>()?;
    let mut total = SubspaceQ::new(s.ambient());
    let mut dim_sum = 0;
    for (i, p) in parts.iter().enumerate() {
        if p.dim() != 2 * binom(m, i) {
            return Err(internal(format!("dim S_{i} = {} but 2·C({m},{i}) = {}", p.dim(), 2 * binom(m, i))));
        }
        if !s.contains(p)? {
            return Err(internal(format!("S_{i} is not contained in S")));
        }
        dim_sum += p.dim();
        total = total.sum(p)?;
    }
    if dim_sum != s.dim() || total.dim() != s.dim() {
        return Err(internal(format!("parts span {} with dims summing to {dim_sum}, dim S = {}", total.dim(), s.dim())));
    }
    let form = fb.form();
    let gp = fb.g_plus();
    for (i, p) in parts.iter().enumerate() {
        let target = p.sum(&parts[m - i])?;
        let mut map = right_mul_map(form, &gp);
        for b in p.basis() {
            if !target.member(&map(b)?)? {
                return Err(internal(format!("α(S_{i}) is not inside S_{i} + S_{}", m - i)));
            }
        }
    }
    Ok(parts)
}

/// A basis of `u(H) ⊂ so(ψ)` realized in `span{eᵢeⱼ}` together with the
/// matrices of `v ↦ ξv − vξ` on `V`.
#[derive(Debug, Clone)]
pub struct UhGenerators {
    pub elems: Vec<CliffordElem>,
    pub ad: Vec<MatrixQ>,
}

fn ad_matrix(form: &Arc<QuadFormDiag>, xi: &CliffordElem) -> Result<MatrixQ, SpinError> {
    let n = form.num_generators();
    let mut m = MatrixQ::zeros(n, n);
    for k in 1..=n {
        let v = CliffordElem::generator(form, k);
        let img = &clifford_mul(xi, &v)? - &clifford_mul(&v, xi)?;
        for (blade, c) in img.terms() {
            if blade.grade() != 1 || !c.is_rational() {
                return Err(internal(format!("ad(ξ) e_{k} = {img:?} is not a rational vector")));
            }
            m[(blade.0.trailing_zeros() as usize, k - 1)] = c.re().clone();
        }
    }
    Ok(m)
}

/// Solves `[ad ξ, J] = 0` over `ξ ∈ span{eᵢeⱼ : i < j}`; the result has `m²` elements.
pub fn uh_generators(form: &Arc<QuadFormDiag>) -> Result<UhGenerators, SpinError> {
    let n = form.num_generators();
    let j = form.phi_matrix();
    let gram = form.gram_matrix();
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|a| ((a + 1)..=n).map(move |b| (a, b))).collect();
    let bivectors: Vec<CliffordElem> = pairs
        .iter()
        .map(|&(a, b)| CliffordElem::blade(form, Blade::from_indices(&[a, b]).expect("distinct"), int(1)))
        .collect();
    let ads: Vec<MatrixQ> = bivectors.iter().map(|x| ad_matrix(form, x)).collect::<Result<_, _>>()?;
    let mut eq = MatrixQ::zeros(n * n, pairs.len());
    for (col, a) in ads.iter().enumerate() {
        let c = &(a * &j) - &(&j * a);
        let flat: Vec<Rational> = (0..n).flat_map(|r| c.row(r).to_vec()).collect();
        eq.set_column(col, &flat);
    }
    let mut elems = Vec::new();
    let mut ad = Vec::new();
    for coeffs in eq.kernel() {
        let mut xi = CliffordElem::zero(form, crate::clifford::CoeffRing::Rational);
        for (c, b) in coeffs.iter().zip(&bivectors) {
            if !c.is_zero() {
                xi = &xi + &b.scale_rational(c);
            }
        }
        let a = ad_matrix(form, &xi)?;
        if !(&(&a.transpose() * &gram) + &(&gram * &a)).is_zero() {
            return Err(internal("u(H) generator is not ψ-skew"));
        }
        if &a * &j != &j * &a {
            return Err(internal("u(H) generator does not commute with J"));
        }
        elems.push(xi);
        ad.push(a);
    }
    let m = form.m();
    if elems.len() != m * m {
        return Err(internal(format!("dim u(H) = {} but m² = {}", elems.len(), m * m)));
    }
    Ok(UhGenerators { elems, ad })
}

/// Structure of `End_{u(H)}(S_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EndStructure {
    /// `Q[x]/(x² − t x − s)` with discriminant `t² + 4s`.
    Quadratic {
        #[serde(serialize_with = "ser_rational")]
        discriminant: Rational,
        is_field: bool,
        isomorphic_to_k: bool,
    },
    /// Quaternion algebra `(a,b)` read off from the commutant.
    Quaternion {
        #[serde(serialize_with = "ser_rational")]
        a: Rational,
        #[serde(serialize_with = "ser_rational")]
        b: Rational,
        /// Same Hilbert symbols as `(δ, dδ)`.
        matches_delta: bool,
        split: bool,
        /// Rank of a nontrivial idempotent, when the algebra is split and one was found.
        idempotent_rank: Option<usize>,
    },
    Other { dim: usize },
}

impl fmt::Display for EndStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Quadratic { discriminant, is_field, isomorphic_to_k } => write!(
                f,
                "quadratic, discriminant {}, {}{}",
                format_rational(discriminant),
                if *is_field { "field" } else { "not a field" },
                if *isomorphic_to_k { ", isomorphic to K" } else { "" }
            ),
            Self::Quaternion { a, b, matches_delta, split, idempotent_rank } => {
                write!(f, "quaternion ({}, {}), {}", format_rational(a), format_rational(b), if *split { "split" } else { "non-split" })?;
                if let Some(r) = idempotent_rank {
                    write!(f, ", idempotent of rank {r}")?;
                }
                write!(f, ", {} (delta, d*delta)", if *matches_delta { "matches" } else { "differs from" })
            }
            Self::Other { dim } => write!(f, "unclassified, dim {dim}"),
        }
    }
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

#[derive(Debug, Clone, Serialize)]
pub struct PartEndo {
    pub index: usize,
    pub dim: usize,
    pub commutant_dim: usize,
    pub expected_dim: usize,
    pub structure: EndStructure,
    /// `α` and `β` restricted to `S_l` commute with `u(H)` (only checked when `2l = m`).
    pub alpha_beta_commute: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub parts: Vec<PartEndo>,
}

impl InvarianceReport {
    pub fn dims_match(&self) -> bool {
        self.parts.iter().all(|p| p.commutant_dim == p.expected_dim)
    }
}

fn is_scalar(x: &MatrixQ) -> Option<Rational> {
    let n = x.rows();
    let c = x[(0, 0)].clone();
    (*x == MatrixQ::scalar(n, &c)).then_some(c)
}

fn trace_free(x: &MatrixQ) -> MatrixQ {
    let n = x.rows();
    let t = x.trace() / int(n as i64);
    x - &MatrixQ::scalar(n, &t)
}

fn combos(basis: &[MatrixQ]) -> Vec<MatrixQ> {
    let mut out: Vec<MatrixQ> = basis.to_vec();
    for a in 0..basis.len() {
        for b in (a + 1)..basis.len() {
            out.push(&basis[a] + &basis[b]);
            out.push(&basis[a] - &basis[b]);
        }
    }
    if basis.len() == 3 {
        out.push(&(&basis[0] + &basis[1]) + &basis[2]);
    }
    out
}

fn classify_quadratic(basis: &[MatrixQ], d: u64) -> Result<EndStructure, SpinError> {
    let x = basis
        .iter()
        .find(|b| is_scalar(b).is_none())
        .ok_or_else(|| internal("two-dimensional commutant without non-scalar element"))?;
    let n = x.rows();
    let x2 = x * x;
    // x² = s·I + t·x, solved from vec(I), vec(x), vec(x²)
    let mut eq = MatrixQ::zeros(n * n, 3);
    let id = MatrixQ::identity(n);
    for (col, m) in [&id, x, &x2].into_iter().enumerate() {
        let flat: Vec<Rational> = (0..n).flat_map(|r| m.row(r).to_vec()).collect();
        eq.set_column(col, &flat);
    }
    let ker = eq.kernel();
    let rel = ker
        .iter()
        .find(|v| !v[2].is_zero())
        .ok_or_else(|| internal("commutant is not closed under squaring"))?;
    let s = -&rel[0] / &rel[2];
    let t = -&rel[1] / &rel[2];
    let disc = &t * &t + int(4) * &s;
    let is_field = !disc.is_zero() && !is_rational_square(&disc);
    let isomorphic_to_k = is_field && is_rational_square(&(&disc * int(-(d as i64))));
    Ok(EndStructure::Quadratic { discriminant: disc, is_field, isomorphic_to_k })
}

/// Finds `u` with `u² = 1` in `(a,b) = ⟨i, j⟩` by a bounded search on
/// `a p² + b q² − ab r² = s²`, returning `(1 + u)/2`.
fn split_idempotent(i0: &MatrixQ, j0: &MatrixQ, a: &Rational, b: &Rational, bound: i64) -> Option<MatrixQ> {
    let n = i0.rows();
    let (sa, ta) = square_free_rational(a);
    let (sb, tb) = square_free_rational(b);
    // i' = i/ta has i'² = sa, likewise for j
    let i1 = i0.scale(&(Rational::one() / &ta));
    let j1 = j0.scale(&(Rational::one() / &tb));
    let k1 = &i1 * &j1;
    let (sa, sb) = (sa as i128, sb as i128);
    for s_max in 1..=bound {
        for p in -s_max..=s_max {
            for q in -s_max..=s_max {
                for r in -s_max..=s_max {
                    if p.abs().max(q.abs()).max(r.abs()) != s_max {
                        continue;
                    }
                    let (p, q, r) = (p as i128, q as i128, r as i128);
                    let v = sa * p * p + sb * q * q - sa * sb * r * r;
                    if v <= 0 {
                        continue;
                    }
                    let s = (v as f64).sqrt().round() as i128;
                    if s * s != v {
                        continue;
                    }
                    let u = &(&i1.scale(&int(p as i64)) + &j1.scale(&int(q as i64))) + &k1.scale(&int(r as i64));
                    let u = u.scale(&Rational::new(1.into(), (s as i64).into()));
                    let e = (&MatrixQ::identity(n) + &u).scale(&Rational::new(1.into(), 2.into()));
                    if &e * &e == e {
                        return Some(e);
                    }
                }
            }
        }
    }
    None
}

fn classify_quaternion(basis: &[MatrixQ], fb: &FBasis) -> Result<EndStructure, SpinError> {
    let pure_raw: Vec<MatrixQ> = basis.iter().map(trace_free).collect();
    // keep three independent trace-free directions
    let mut pure: Vec<MatrixQ> = Vec::new();
    let mut span = SubspaceQ::new(basis[0].rows() * basis[0].rows());
    for p in pure_raw {
        let flat = SparseVec::from_dense(&(0..p.rows()).flat_map(|r| p.row(r).to_vec()).collect::<Vec<_>>());
        if span.insert(&flat)? {
            pure.push(p);
        }
    }
    if pure.len() != 3 {
        return Err(internal(format!("quaternion commutant has {} trace-free directions", pure.len())));
    }
    let square_of = |x: &MatrixQ| is_scalar(&(x * x));
    let (i0, a) = combos(&pure)
        .into_iter()
        .find_map(|x| square_of(&x).filter(|a| !a.is_zero()).map(|a| (x, a)))
        .ok_or_else(|| internal("no trace-free commutant element with nonzero scalar square"))?;
    // trace-free elements anticommuting with i0
    let n = i0.rows();
    let mut eq = MatrixQ::zeros(n * n, 3);
    for (col, p) in pure.iter().enumerate() {
        let anti = &(&i0 * p) + &(p * &i0);
        let flat: Vec<Rational> = (0..n).flat_map(|r| anti.row(r).to_vec()).collect();
        eq.set_column(col, &flat);
    }
    let orth: Vec<MatrixQ> = eq
        .kernel()
        .into_iter()
        .map(|c| {
            let mut x = MatrixQ::zeros(n, n);
            for (cl, p) in c.iter().zip(&pure) {
                x = &x + &p.scale(cl);
            }
            x
        })
        .collect();
    let (j0, b) = combos(&orth)
        .into_iter()
        .find_map(|x| square_of(&x).filter(|b| !b.is_zero()).map(|b| (x, b)))
        .ok_or_else(|| internal("no anticommuting partner with nonzero scalar square"))?;

    let alg = QuatAlg::new(a.clone(), b.clone())?;
    let d = int(fb.form().d() as i64);
    let reference = QuatAlg::new(fb.delta().clone(), &d * fb.delta())?;
    let matches_delta = alg.is_isomorphic(&reference)?;
    let split = alg.is_split()?;
    let idempotent_rank = if split { split_idempotent(&i0, &j0, &a, &b, 40).map(|e| e.rank()) } else { None };
    Ok(EndStructure::Quaternion { a, b, matches_delta, split, idempotent_rank })
}

/// Checks that every `ξ ∈ u(H)` preserves every `S_i` under left multiplication,
/// then computes and classifies `End_{u(H)}(S_i)`.
pub fn check_invariance(
    fb: &FBasis,
    gens: &UhGenerators,
    parts: &[SubspaceQ],
    endo: Option<&EndoOperators>,
    s: Option<&SubspaceQ>,
) -> Result<InvarianceReport, SpinError> {
    let form = fb.form();
    let m = form.m();
    let mut out = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        let mut ops = Vec::with_capacity(gens.elems.len());
        for (g, xi) in gens.elems.iter().enumerate() {
            match operator_matrix(part, left_mul_map(form, xi))? {
                Ok(a) => ops.push(a),
                Err(witness) => return Err(SpinError::NotInvariant { generator: g, part: i, witness }),
            }
        }
        let basis = commutant(&ops, part.dim())?;
        let expected_dim = if 2 * i == m { 4 } else { 2 };
        let structure = match basis.len() {
            2 => classify_quadratic(&basis, form.d())?,
            4 => classify_quaternion(&basis, fb)?,
            dim => EndStructure::Other { dim },
        };
        let alpha_beta_commute = match (2 * i == m, endo, s) {
            (true, Some(_), Some(_)) => {
                let (gp, gm) = (fb.g_plus(), fb.g_minus());
                let a = operator_matrix(part, right_mul_map(form, &gp))?;
                let b = operator_matrix(part, right_mul_map(form, &gm))?;
                Some(match (a, b) {
                    (Ok(a), Ok(b)) => ops.iter().all(|x| &a * x == x * &a && &b * x == x * &b),
                    _ => false,
                })
            }
            _ => None,
        };
        out.push(PartEndo {
            index: i,
            dim: part.dim(),
            commutant_dim: basis.len(),
            expected_dim,
            structure,
            alpha_beta_commute,
        });
    }
    Ok(InvarianceReport { parts: out })
}

/// Everything computed for one form.
#[derive(Debug, Clone)]
pub struct SpinDecomposition {
    pub fbasis: FBasis,
    pub s: SubspaceQ,
    pub endo: EndoOperators,
    pub parts: Vec<SubspaceQ>,
    pub invariance: Option<InvarianceReport>,
}

impl SpinDecomposition {
    pub fn m_mod_4(&self) -> usize {
        self.fbasis.form().m() % 4
    }

    pub fn part_dims(&self) -> Vec<usize> {
        self.parts.iter().map(SubspaceQ::dim).collect()
    }
}

/// Largest `m` for which `S` and its parts are built by default.
pub const MAX_M_SUBSPACES: usize = 5;
/// Largest `m` accepted with the extended bound.
pub const MAX_M_EXTENDED: usize = 6;

/// Runs the full pipeline; `invariance` toggles the `u(H)` part.
pub fn decompose(form: &Arc<QuadFormDiag>, invariance: bool, extended: bool) -> Result<SpinDecomposition, SpinError> {
    let m = form.m();
    let max = if extended { MAX_M_EXTENDED } else { MAX_M_SUBSPACES };
    if m > max {
        return Err(SpinError::TooLarge { m, max });
    }
    let fbasis = build_f_basis(form)?;
    let s = build_s(&fbasis)?;
    let endo = endo_operators(&fbasis, &s)?;
    let parts = build_parts(&fbasis, &s)?;
    let invariance = if invariance {
        let gens = uh_generators(form)?;
        Some(check_invariance(&fbasis, &gens, &parts, Some(&endo), Some(&s))?)
    } else {
        None
    };
    Ok(SpinDecomposition { fbasis, s, endo, parts, invariance })
}

/// `2^{2m−1} = 2^{m+1}·2^{m−2}`: `C⁺(V)` is `2^{m−2}` copies of `S` (needs `m ≥ 2`).
pub fn even_algebra_accounting(m: usize, dim_s: usize) -> Option<bool> {
    (m >= 2).then(|| (1u128 << (2 * m - 1)) == dim_s as u128 * (1u128 << (m - 2)))
}

//! Sparse exact Clifford algebra `C(V)` of the diagonal form
//! `ψ(x,x) = Σ dᵢxᵢ² + d·Σ dᵢx_{m+i}²` on `2m` generators.
//!
//! Blades are bitmasks (bit `k` is generator `e_{k+1}`) kept in ascending
//! index order; coefficients lie in `Q` or `Q(sqrt(-d))`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{
    format_rational, int, is_rational_square, is_squarefree, parse_rational, FieldError, QuadElem,
    Rational,
};
use crate::linalg::{MatrixQ, SparseVec};

/// Upper bound on `m`: blades of `2m` generators must fit in a `u64`.
pub const MAX_HALF_RANK: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliffordError {
    #[error("elements belong to different quadratic forms")]
    FormMismatch,
    #[error("invalid quadratic form: {0}")]
    InvalidForm(String),
    #[error("element has irrational coefficients where a rational element is required")]
    NotRational,
    #[error("vector length {got} does not match 2^(2m) = {expected}")]
    BadVectorLength { expected: usize, got: usize },
    #[error("z² = {computed} from the product disagrees with the closed form {expected}")]
    CenterMismatch { computed: String, expected: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The diagonal form encoded by `d` and `(d₁, …, d_m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadFormDiag {
    d: u64,
    diag: Vec<Rational>,
}

impl QuadFormDiag {
    pub fn new(d: u64, diag: Vec<Rational>) -> Result<Self, CliffordError> {
        if !is_squarefree(d) {
            return Err(FieldError::NotSquarefree(d).into());
        }
        if diag.is_empty() {
            return Err(CliffordError::InvalidForm("m must be at least 1".into()));
        }
        if diag.len() > MAX_HALF_RANK {
            return Err(CliffordError::InvalidForm(format!(
                "m = {} exceeds the supported maximum {MAX_HALF_RANK}",
                diag.len()
            )));
        }
        if let Some(i) = diag.iter().position(Zero::is_zero) {
            return Err(CliffordError::InvalidForm(format!("d_{} is zero", i + 1)));
        }
        Ok(QuadFormDiag { d, diag })
    }

    pub fn from_ints(d: u64, diag: &[i64]) -> Result<Self, CliffordError> {
        Self::new(d, diag.iter().map(|&x| int(x)).collect())
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn m(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[Rational] {
        &self.diag
    }

    pub fn num_generators(&self) -> usize {
        2 * self.m()
    }

    /// `2^(2m)`, the dimension of `C(V)`.
    pub fn algebra_dim(&self) -> usize {
        1usize << self.num_generators()
    }

    /// `ψ(e_{k+1}, e_{k+1})` for the 0-based generator index `k`.
    pub fn generator_square(&self, k: usize) -> Rational {
        let m = self.m();
        if k < m {
            self.diag[k].clone()
        } else {
            int(self.d as i64) * &self.diag[k - m]
        }
    }

    /// `d₁ < 0` and `d₂, …, d_m > 0`.
    pub fn has_weight_two_signature(&self) -> bool {
        self.diag[0].is_negative() && self.diag[1..].iter().all(Signed::is_positive)
    }

    /// Gram matrix of `ψ` in the basis `e₁, …, e_{2m}`.
    pub fn gram_matrix(&self) -> MatrixQ {
        let entries: Vec<Rational> = (0..self.num_generators()).map(|k| self.generator_square(k)).collect();
        MatrixQ::diagonal(&entries)
    }

    /// Matrix of `φ = sqrt(-d)`: `eᵢ ↦ e_{m+i}`, `e_{m+i} ↦ −d·eᵢ`.
    pub fn phi_matrix(&self) -> MatrixQ {
        let m = self.m();
        let mut j = MatrixQ::zeros(2 * m, 2 * m);
        for i in 0..m {
            j[(m + i, i)] = Rational::one();
            j[(i, m + i)] = -int(self.d as i64);
        }
        j
    }

    /// `Π dᵢ`.
    pub fn diag_product(&self) -> Rational {
        self.diag.iter().fold(Rational::one(), |acc, x| acc * x)
    }
}

/// Text form `{"d": 3, "diag": ["-1/1", "1/1"]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadFormFile {
    pub d: u64,
    pub diag: Vec<String>,
}

impl QuadFormDiag {
    pub fn from_json(text: &str) -> Result<Self, CliffordError> {
        let file: QuadFormFile = serde_json::from_str(text)
            .map_err(|e| CliffordError::InvalidForm(format!("parse error: {e}")))?;
        let diag = file.diag.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
        Self::new(file.d, diag)
    }

    pub fn to_json(&self) -> String {
        let file =
            QuadFormFile { d: self.d, diag: self.diag.iter().map(format_rational).collect() };
        serde_json::to_string_pretty(&file).expect("serializable") + "\n"
    }
}

/// A basis blade `e_{i₁}⋯e_{iₖ}`, `i₁ < ⋯ < iₖ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Blade(pub u64);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    /// Blade from 1-based generator indices in any order; repeats are rejected.
    pub fn from_indices(indices: &[usize]) -> Option<Blade> {
        let mut bits = 0u64;
        for &i in indices {
            if i == 0 || i > 64 || bits >> (i - 1) & 1 == 1 {
                return None;
            }
            bits |= 1 << (i - 1);
        }
        Some(Blade(bits))
    }

    pub fn grade(self) -> u32 {
        self.0.count_ones()
    }

    pub fn indices(self) -> Vec<usize> {
        (0..64).filter(|k| self.0 >> k & 1 == 1).map(|k| k + 1).collect()
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        for i in self.indices() {
            write!(f, "e{i}")?;
        }
        Ok(())
    }
}

/// Parity of the number of transpositions needed to sort the word `a·b`
/// (pairs `i ∈ a`, `j ∈ b` with `i > j`).
fn reorder_is_odd(a: u64, b: u64) -> bool {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    swaps % 2 == 1
}

/// Coefficient ring tag of a [`CliffordElem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoeffRing {
    Rational,
    Quadratic,
}

/// Sparse element of `C(V)` or `C(V) ⊗ K`.
///
/// Equality compares the form and the coefficients; the ring tag is ignored.
#[derive(Clone)]
pub struct CliffordElem {
    form: Arc<QuadFormDiag>,
    ring: CoeffRing,
    terms: BTreeMap<Blade, QuadElem>,
}

impl CliffordElem {
    pub fn zero(form: &Arc<QuadFormDiag>, ring: CoeffRing) -> Self {
        CliffordElem { form: form.clone(), ring, terms: BTreeMap::new() }
    }

    pub fn scalar(form: &Arc<QuadFormDiag>, s: Rational) -> Self {
        Self::blade(form, Blade::SCALAR, s)
    }

    pub fn blade(form: &Arc<QuadFormDiag>, blade: Blade, coeff: Rational) -> Self {
        let mut e = Self::zero(form, CoeffRing::Rational);
        e.add_term(blade, QuadElem::rational(coeff, form.d()));
        e
    }

    /// The generator `e_{k}` (1-based).
    pub fn generator(form: &Arc<QuadFormDiag>, k: usize) -> Self {
        Self::blade(form, Blade(1 << (k - 1)), Rational::one())
    }

    pub fn from_terms(
        form: &Arc<QuadFormDiag>,
        terms: impl IntoIterator<Item = (Blade, QuadElem)>,
    ) -> Result<Self, CliffordError> {
        let mut e = Self::zero(form, CoeffRing::Rational);
        let limit = form.algebra_dim() as u64;
        for (b, c) in terms {
            if b.0 >= limit {
                return Err(CliffordError::InvalidForm(format!("blade {b} outside C(V)")));
            }
            if c.d() != form.d() {
                return Err(FieldError::FieldMismatch { left: form.d(), right: c.d() }.into());
            }
            if !c.is_rational() {
                e.ring = CoeffRing::Quadratic;
            }
            e.add_term(b, c);
        }
        Ok(e)
    }

    /// Rational element from a vector in `Q^(2^(2m))`, indexed by blade bitmask.
    pub fn from_vector(form: &Arc<QuadFormDiag>, v: &SparseVec) -> Result<Self, CliffordError> {
        if v.dim() != form.algebra_dim() {
            return Err(CliffordError::BadVectorLength { expected: form.algebra_dim(), got: v.dim() });
        }
        let mut e = Self::zero(form, CoeffRing::Rational);
        for (i, x) in v.iter() {
            e.terms.insert(Blade(i as u64), QuadElem::rational(x.clone(), form.d()));
        }
        Ok(e)
    }

    pub fn to_vector(&self) -> Result<SparseVec, CliffordError> {
        if self.terms.values().any(|c| !c.is_rational()) {
            return Err(CliffordError::NotRational);
        }
        Ok(SparseVec::from_pairs(
            self.form.algebra_dim(),
            self.terms.iter().map(|(b, c)| (b.0 as usize, c.re().clone())),
        )
        .expect("blades lie inside C(V)"))
    }

    fn add_term(&mut self, blade: Blade, c: QuadElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&blade) {
            Some(x) => {
                *x = &*x + &c;
                if x.is_zero() {
                    self.terms.remove(&blade);
                }
            }
            None => {
                self.terms.insert(blade, c);
            }
        }
    }

    pub fn form(&self) -> &Arc<QuadFormDiag> {
        &self.form
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &QuadElem)> {
        self.terms.iter().map(|(b, c)| (*b, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, blade: Blade) -> QuadElem {
        self.terms.get(&blade).cloned().unwrap_or_else(|| QuadElem::zero(self.form.d()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every coefficient is rational, whatever the ring tag.
    pub fn has_rational_coeffs(&self) -> bool {
        self.terms.values().all(QuadElem::is_rational)
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|b| b.grade() % 2 == 0)
    }

    pub fn scale(&self, s: &QuadElem) -> Self {
        let mut out = Self::zero(&self.form, self.ring);
        if !s.is_rational() {
            out.ring = CoeffRing::Quadratic;
        }
        for (b, c) in &self.terms {
            out.add_term(*b, c * s);
        }
        out
    }

    pub fn scale_rational(&self, s: &Rational) -> Self {
        self.scale(&QuadElem::rational(s.clone(), self.form.d()))
    }

    fn same_form(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.form, &other.form) || self.form == other.form
    }

    fn joint_ring(&self, other: &Self) -> CoeffRing {
        if self.ring == CoeffRing::Quadratic || other.ring == CoeffRing::Quadratic {
            CoeffRing::Quadratic
        } else {
            CoeffRing::Rational
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, CliffordError> {
        if !self.same_form(other) {
            return Err(CliffordError::FormMismatch);
        }
        let mut out = self.clone();
        out.ring = self.joint_ring(other);
        for (b, c) in &other.terms {
            out.add_term(*b, c.clone());
        }
        Ok(out)
    }
}

/// Product of two blades: `(sign · Π_{k ∈ a∩b} gₖ, a △ b)`.
pub fn blade_product(form: &QuadFormDiag, a: Blade, b: Blade) -> (Rational, Blade) {
    let mut coeff = if reorder_is_odd(a.0, b.0) { -Rational::one() } else { Rational::one() };
    let mut common = a.0 & b.0;
    while common != 0 {
        let k = common.trailing_zeros() as usize;
        coeff *= form.generator_square(k);
        common &= common - 1;
    }
    (coeff, Blade(a.0 ^ b.0))
}

/// The Clifford product, bilinear in the coefficients.
pub fn clifford_mul(x: &CliffordElem, y: &CliffordElem) -> Result<CliffordElem, CliffordError> {
    if !x.same_form(y) {
        return Err(CliffordError::FormMismatch);
    }
    let form = &x.form;
    let squares: Vec<Rational> = (0..form.num_generators()).map(|k| form.generator_square(k)).collect();
    let mut acc: BTreeMap<Blade, QuadElem> = BTreeMap::new();
    for (ba, ca) in &x.terms {
        for (bb, cb) in &y.terms {
            let negative = reorder_is_odd(ba.0, bb.0);
            let mut c = ca * cb;
            let mut common = ba.0 & bb.0;
            while common != 0 {
                c = c.scale(&squares[common.trailing_zeros() as usize]);
                common &= common - 1;
            }
            if negative {
                c = -&c;
            }
            let blade = Blade(ba.0 ^ bb.0);
            match acc.get_mut(&blade) {
                Some(v) => *v = &*v + &c,
                None => {
                    acc.insert(blade, c);
                }
            }
        }
    }
    acc.retain(|_, v| !v.is_zero());
    Ok(CliffordElem { form: form.clone(), ring: x.joint_ring(y), terms: acc })
}

/// Applies `a + b·sqrt(-d) ↦ a − b·sqrt(-d)` to every coefficient.
pub fn conj_coeffs(x: &CliffordElem) -> CliffordElem {
    CliffordElem {
        form: x.form.clone(),
        ring: x.ring,
        terms: x.terms.iter().map(|(b, c)| (*b, c.conj())).collect(),
    }
}

/// Structure of the center `Q ⊕ Qz` of `C⁺(V)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CenterType {
    /// `z²` is a nonzero rational square: `Q(z) ≅ Q × Q`.
    SplitProduct,
    /// `Q(z)` is the quadratic field of discriminant class `z²`; `isomorphic_to_k` records
    /// whether that field is `Q(sqrt(-d))`.
    Field { isomorphic_to_k: bool },
}

#[derive(Debug, Clone)]
pub struct CenterElement {
    pub z: CliffordElem,
    pub z_squared: Rational,
    pub center: CenterType,
}

/// `(−1)^m d^m Π dᵢ²`.
pub fn center_square_closed_form(form: &QuadFormDiag) -> Rational {
    let m = form.m();
    let sign = if m.is_multiple_of(2) { int(1) } else { int(-1) };
    let dm = num::pow(int(form.d() as i64), m);
    let p = form.diag_product();
    sign * dm * &p * &p
}

/// `z = e₁e₂⋯e_{2m}` with `z²` computed by the product and checked against the closed form.
pub fn center_element(form: &Arc<QuadFormDiag>) -> Result<CenterElement, CliffordError> {
    let top = Blade(if form.num_generators() == 64 { u64::MAX } else { (1u64 << form.num_generators()) - 1 });
    let z = CliffordElem::blade(form, top, Rational::one());
    let z2 = clifford_mul(&z, &z)?;
    let expected = center_square_closed_form(form);
    let computed = z2.coeff(Blade::SCALAR);
    if z2.num_terms() != 1 || !computed.is_rational() || computed.re() != &expected {
        return Err(CliffordError::CenterMismatch {
            computed: format!("{z2:?}"),
            expected: expected.to_string(),
        });
    }
    let center = if is_rational_square(&expected) {
        CenterType::SplitProduct
    } else {
        // Q(sqrt(z²)) = Q(sqrt(-d)) iff z²·(−d) is a square
        let k_class = &expected * int(-(form.d() as i64));
        CenterType::Field { isomorphic_to_k: is_rational_square(&k_class) }
    };
    Ok(CenterElement { z, z_squared: expected, center })
}

// Operator impls panic on form mismatch; `clifford_mul` / `checked_add` report it.
impl Mul for &CliffordElem {
    type Output = CliffordElem;
    fn mul(self, rhs: &CliffordElem) -> CliffordElem {
        clifford_mul(self, rhs).expect("Clifford form mismatch")
    }
}

impl Add for &CliffordElem {
    type Output = CliffordElem;
    fn add(self, rhs: &CliffordElem) -> CliffordElem {
        self.checked_add(rhs).expect("Clifford form mismatch")
    }
}

impl Sub for &CliffordElem {
    type Output = CliffordElem;
    fn sub(self, rhs: &CliffordElem) -> CliffordElem {
        self.checked_add(&-rhs).expect("Clifford form mismatch")
    }
}

impl Neg for &CliffordElem {
    type Output = CliffordElem;
    fn neg(self) -> CliffordElem {
        CliffordElem {
            form: self.form.clone(),
            ring: self.ring,
            terms: self.terms.iter().map(|(b, c)| (*b, -c)).collect(),
        }
    }
}

impl PartialEq for CliffordElem {
    fn eq(&self, other: &Self) -> bool {
        self.same_form(other) && self.terms == other.terms
    }
}

impl Eq for CliffordElem {}

impl fmt::Debug for CliffordElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(b, c)| format!("({c})·{b}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

//! Imaginary quadratic fields `Q(sqrt(-d))` and the embedding bookkeeping of
//! CM-fields.
//!
//! Embeddings are never evaluated numerically. A CM-field of degree `2r` is
//! described only by `r`; its embeddings are the indices `1..=2r` and complex
//! conjugation pairs `j` with `j + r` (mod `2r`).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

/// Exact rational numbers used throughout the crate.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("field mismatch: Q(sqrt(-{left})) vs Q(sqrt(-{right}))")]
    FieldMismatch { left: u64, right: u64 },
    #[error("d = {0} is not a positive squarefree integer")]
    NotSquarefree(u64),
    #[error("division by zero in Q(sqrt(-{0}))")]
    DivisionByZero(u64),
    #[error("CM-field half degree must be at least 1")]
    ZeroHalfDegree,
    #[error("embedding index {index} out of range 1..={max}")]
    EmbeddingOutOfRange { index: usize, max: usize },
    #[error("CM-type must pick exactly one embedding from each conjugate pair: {0}")]
    BadCmType(String),
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
}

/// Parses `"p/q"`, `"p"` or a plain integer string into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, FieldError> {
    let t = s.trim();
    let r = match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| FieldError::BadRational(s.into()))?;
            let d = BigInt::from_str(d.trim()).map_err(|_| FieldError::BadRational(s.into()))?;
            if d.is_zero() {
                return Err(FieldError::BadRational(s.into()));
            }
            Rational::new(n, d)
        }
        None => Rational::from_integer(
            BigInt::from_str(t).map_err(|_| FieldError::BadRational(s.into()))?,
        ),
    };
    Ok(r)
}

/// Serializes a rational as `"p/q"`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut k = 2u64;
    while k.saturating_mul(k) <= n {
        if n.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

/// True iff `r` is the square of a rational number.
pub fn is_rational_square(r: &Rational) -> bool {
    if r.is_negative() {
        return false;
    }
    is_perfect_square(r.numer()) && is_perfect_square(r.denom())
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s = n.sqrt();
    &(&s * &s) == n
}

/// An element `a + b·sqrt(-d)` of the imaginary quadratic field `Q(sqrt(-d))`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadElem {
    a: Rational,
    b: Rational,
    d: u64,
}

impl QuadElem {
    pub fn new(a: Rational, b: Rational, d: u64) -> Result<Self, FieldError> {
        if !is_squarefree(d) {
            return Err(FieldError::NotSquarefree(d));
        }
        Ok(QuadElem { a, b, d })
    }

    pub fn rational(a: Rational, d: u64) -> Self {
        QuadElem { a, b: Rational::zero(), d }
    }

    pub fn from_ints(a: i64, b: i64, d: u64) -> Result<Self, FieldError> {
        Self::new(Rational::from_integer(a.into()), Rational::from_integer(b.into()), d)
    }

    pub fn zero(d: u64) -> Self {
        Self::rational(Rational::zero(), d)
    }

    pub fn one(d: u64) -> Self {
        Self::rational(Rational::one(), d)
    }

    /// The generator `sqrt(-d)`.
    pub fn sqrt_neg_d(d: u64) -> Self {
        QuadElem { a: Rational::zero(), b: Rational::one(), d }
    }

    pub fn re(&self) -> &Rational {
        &self.a
    }

    pub fn im(&self) -> &Rational {
        &self.b
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        QuadElem { a: self.a.clone(), b: -&self.b, d: self.d }
    }

    /// `a² + d·b²`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a + Rational::from_integer(self.d.into()) * &self.b * &self.b
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QuadElem { a: &self.a * r, b: &self.b * r, d: self.d }
    }

    fn check(&self, other: &Self) -> Result<(), FieldError> {
        if self.d != other.d {
            return Err(FieldError::FieldMismatch { left: self.d, right: other.d });
        }
        Ok(())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(self.mul_raw(other))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(QuadElem { a: &self.a + &other.a, b: &self.b + &other.b, d: self.d })
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero(self.d));
        }
        let n = self.norm();
        Ok(QuadElem { a: &self.a / &n, b: -&self.b / &n, d: self.d })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(self.mul_raw(&other.inv()?))
    }

    fn mul_raw(&self, other: &Self) -> Self {
        if self.b.is_zero() && other.b.is_zero() {
            return QuadElem::rational(&self.a * &other.a, self.d);
        }
        let d = Rational::from_integer(self.d.into());
        QuadElem {
            a: &self.a * &other.a - d * &self.b * &other.b,
            b: &self.a * &other.b + &other.a * &self.b,
            d: self.d,
        }
    }
}

/// Exact product in `Q(sqrt(-d))`; both factors must carry the same `d`.
pub fn quad_mul(x: &QuadElem, y: &QuadElem) -> Result<QuadElem, FieldError> {
    x.checked_mul(y)
}

// Operator impls panic on field mismatch; use the `checked_*` methods at trust boundaries.
impl Mul for &QuadElem {
    type Output = QuadElem;
    fn mul(self, rhs: &QuadElem) -> QuadElem {
        self.checked_mul(rhs).expect("QuadElem field mismatch")
    }
}

impl Add for &QuadElem {
    type Output = QuadElem;
    fn add(self, rhs: &QuadElem) -> QuadElem {
        self.checked_add(rhs).expect("QuadElem field mismatch")
    }
}

impl Sub for &QuadElem {
    type Output = QuadElem;
    fn sub(self, rhs: &QuadElem) -> QuadElem {
        self.checked_add(&-rhs).expect("QuadElem field mismatch")
    }
}

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem { a: -&self.a, b: -&self.b, d: self.d }
    }
}

impl fmt::Debug for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}·√-{}", self.a, self.b, self.d)
        }
    }
}

/// A CM-field of degree `2r`, reduced to its half degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CMFieldDescriptor {
    half_degree: usize,
}

impl CMFieldDescriptor {
    pub fn new(half_degree: usize) -> Result<Self, FieldError> {
        if half_degree == 0 {
            return Err(FieldError::ZeroHalfDegree);
        }
        Ok(CMFieldDescriptor { half_degree })
    }

    /// The imaginary quadratic case `r = 1`.
    pub fn quadratic() -> Self {
        CMFieldDescriptor { half_degree: 1 }
    }

    pub fn half_degree(&self) -> usize {
        self.half_degree
    }

    pub fn num_embeddings(&self) -> usize {
        2 * self.half_degree
    }

    pub fn embeddings(&self) -> impl Iterator<Item = usize> {
        1..=self.num_embeddings()
    }

    /// Complex conjugate of embedding `j`; `conj(j) = j ± r`.
    pub fn conj(&self, j: usize) -> usize {
        let r = self.half_degree;
        if j > r {
            j - r
        } else {
            j + r
        }
    }

    pub fn check_index(&self, j: usize) -> Result<(), FieldError> {
        if j == 0 || j > self.num_embeddings() {
            return Err(FieldError::EmbeddingOutOfRange { index: j, max: self.num_embeddings() });
        }
        Ok(())
    }
}

/// A choice of one embedding from each conjugate pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CMType {
    field: CMFieldDescriptor,
    // selected[i] is true when embedding i + 1 is chosen over i + 1 + r
    selected: Vec<bool>,
}

impl CMType {
    /// Builds a CM-type from the list of chosen embedding indices.
    pub fn from_indices(field: CMFieldDescriptor, chosen: &[usize]) -> Result<Self, FieldError> {
        let r = field.half_degree();
        if chosen.len() != r {
            return Err(FieldError::BadCmType(format!(
                "expected {r} embeddings, got {}",
                chosen.len()
            )));
        }
        let mut seen = vec![None; r];
        for &j in chosen {
            field.check_index(j)?;
            let pair = (j - 1) % r;
            if seen[pair].is_some() {
                return Err(FieldError::BadCmType(format!(
                    "embeddings {} and {j} lie in the same conjugate pair",
                    seen[pair].unwrap()
                )));
            }
            seen[pair] = Some(j);
        }
        let selected = seen.into_iter().map(|j| j.unwrap() <= r).collect();
        Ok(CMType { field, selected })
    }

    /// The CM-type `{1, ..., r}`.
    pub fn standard(field: CMFieldDescriptor) -> Self {
        CMType { field, selected: vec![true; field.half_degree()] }
    }

    pub fn field(&self) -> CMFieldDescriptor {
        self.field
    }

    pub fn contains(&self, j: usize) -> bool {
        let r = self.field.half_degree();
        if j == 0 || j > 2 * r {
            return false;
        }
        let pair = (j - 1) % r;
        self.selected[pair] == (j <= r)
    }

    /// Chosen embeddings, ordered by conjugate pair.
    pub fn indices(&self) -> Vec<usize> {
        let r = self.field.half_degree();
        self.selected
            .iter()
            .enumerate()
            .map(|(i, &low)| if low { i + 1 } else { i + 1 + r })
            .collect()
    }

    pub fn complement(&self) -> CMType {
        cm_type_complement(self)
    }
}

/// Swaps every chosen embedding for its conjugate.
pub fn cm_type_complement(sigma: &CMType) -> CMType {
    CMType { field: sigma.field, selected: sigma.selected.iter().map(|b| !b).collect() }
}

/// Squarefree kernel of a nonzero integer, sign preserved.
pub(crate) fn squarefree_part(n: &BigInt) -> BigInt {
    let mut rest = n.abs();
    let mut out = BigInt::one();
    let mut p = BigInt::from(2u32);
    while &p * &p <= rest {
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &p;
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    out *= rest;
    if n.is_negative() {
        -out
    } else {
        out
    }
}

/// Writes `r ≠ 0` as `s·t²` with `s` a squarefree integer and `t > 0` rational.
pub fn square_free_rational(r: &Rational) -> (i64, Rational) {
    let nd = r.numer() * r.denom();
    let s = squarefree_part(&nd);
    let k2 = (&nd / &s).abs();
    let k = k2.sqrt();
    debug_assert_eq!(&k * &k, k2);
    let si = i64::try_from(&s).expect("squarefree part fits in i64");
    (si, Rational::new(k, r.denom().clone()))
}

pub(crate) fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(a: i64, b: i64, d: u64) -> QuadElem {
        QuadElem::from_ints(a, b, d).unwrap()
    }

    #[test]
    fn sqrt_neg_d_squares_to_minus_d() {
        assert_eq!(quad_mul(&q(0, 1, 3), &q(0, 1, 3)).unwrap(), q(-3, 0, 3));
    }

    #[test]
    fn one_is_identity() {
        let x = q(5, -7, 7);
        assert_eq!(quad_mul(&QuadElem::one(7), &x).unwrap(), x);
    }

    #[test]
    fn norm_product_example() {
        // a² + d·b² = 4 + 5
        let p = quad_mul(&q(2, 1, 5), &q(2, -1, 5)).unwrap();
        assert_eq!(p, q(9, 0, 5));
        assert_eq!(q(2, 1, 5).norm(), int(9));
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        assert_eq!(
            quad_mul(&q(1, 1, 2), &q(1, 1, 3)),
            Err(FieldError::FieldMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn non_squarefree_d_is_rejected() {
        assert_eq!(QuadElem::from_ints(1, 1, 12), Err(FieldError::NotSquarefree(12)));
        assert_eq!(QuadElem::from_ints(1, 1, 0), Err(FieldError::NotSquarefree(0)));
    }

    #[test]
    fn complement_small_cases() {
        let f1 = CMFieldDescriptor::new(1).unwrap();
        let s = CMType::from_indices(f1, &[1]).unwrap();
        assert_eq!(cm_type_complement(&s).indices(), vec![2]);

        let f2 = CMFieldDescriptor::new(2).unwrap();
        let s = CMType::from_indices(f2, &[1, 4]).unwrap();
        let mut c = cm_type_complement(&s).indices();
        c.sort();
        assert_eq!(c, vec![2, 3]);
    }

    #[test]
    fn cm_type_rejects_conjugate_pair() {
        let f2 = CMFieldDescriptor::new(2).unwrap();
        assert!(CMType::from_indices(f2, &[1, 3]).is_err());
        assert!(CMType::from_indices(f2, &[1]).is_err());
        assert!(CMType::from_indices(f2, &[1, 5]).is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-3/6").unwrap(), Rational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&int(-1)), "-1/1");
    }

    #[test]
    fn squarefree_kernel() {
        assert_eq!(squarefree_part(&BigInt::from(-72)), BigInt::from(-2));
        assert_eq!(squarefree_part(&BigInt::from(1)), BigInt::from(1));
        assert!(is_squarefree(30) && !is_squarefree(18));
    }

    fn elem() -> impl Strategy<Value = QuadElem> {
        (-20i64..20, 1i64..6, -20i64..20, 1i64..6)
            .prop_map(|(a, da, b, db)| {
                QuadElem::new(
                    Rational::new(a.into(), da.into()),
                    Rational::new(b.into(), db.into()),
                    7,
                )
                .unwrap()
            })
    }

    proptest! {
        #[test]
        fn field_axioms(x in elem(), y in elem(), z in elem()) {
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            if !x.is_zero() {
                prop_assert_eq!(&x * &x.inv().unwrap(), QuadElem::one(7));
            }
        }

        #[test]
        fn conjugation_is_ring_involution(x in elem(), y in elem()) {
            prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
            prop_assert_eq!((&x + &y).conj(), &x.conj() + &y.conj());
            prop_assert_eq!(x.conj().conj(), x.clone());
        }

        #[test]
        fn norm_is_multiplicative(x in elem(), y in elem()) {
            prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
            prop_assert!(!x.norm().is_negative());
            prop_assert_eq!(x.norm().is_zero(), x.is_zero());
        }

        #[test]
        fn complement_is_involution(r in 1usize..=6, bits in 0u32..64) {
            let f = CMFieldDescriptor::new(r).unwrap();
            let chosen: Vec<usize> =
                (0..r).map(|i| if bits >> i & 1 == 1 { i + 1 } else { i + 1 + r }).collect();
            let s = CMType::from_indices(f, &chosen).unwrap();
            let c = cm_type_complement(&s);
            prop_assert_eq!(cm_type_complement(&c), s.clone());
            for j in f.embeddings() {
                prop_assert!(s.contains(j) ^ c.contains(j));
            }
        }
    }
}

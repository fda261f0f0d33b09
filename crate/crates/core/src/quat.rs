//! Quaternion algebras `(a,b)` over `Q` and their local Hilbert symbols.

use std::collections::BTreeSet;
use std::fmt;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::field::{is_perfect_square, squarefree_part, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuatError {
    #[error("structure constant must be nonzero")]
    ZeroConstant,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime factor of {0} exceeds the supported range")]
    FactorTooLarge(String),
}

/// A place of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Place {
    Infinity,
    Prime(u64),
}

impl Place {
    pub fn prime(p: u64) -> Result<Place, QuatError> {
        if is_prime(p) {
            Ok(Place::Prime(p))
        } else {
            Err(QuatError::NotPrime(p))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k.saturating_mul(k) <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Squarefree integer in the square class of `r ≠ 0`.
pub fn square_class(r: &Rational) -> BigInt {
    squarefree_part(&(r.numer() * r.denom()))
}

fn prime_factors(n: &BigInt) -> Result<Vec<u64>, QuatError> {
    let mut rest = n.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    while BigInt::from(p) * BigInt::from(p) <= rest {
        if p > 1 << 32 {
            return Err(QuatError::FactorTooLarge(n.to_string()));
        }
        if (&rest % p).is_zero() {
            out.push(p);
            while (&rest % p).is_zero() {
                rest /= p;
            }
        }
        p += 1;
    }
    if rest > BigInt::one() {
        out.push(rest.to_u64().ok_or_else(|| QuatError::FactorTooLarge(n.to_string()))?);
    }
    Ok(out)
}

fn mod_u64(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().expect("residue below p")
}

fn pow_mod(base: u64, mut exp: u64, p: u64) -> u64 {
    let m = p as u128;
    let (mut acc, mut b) = (1u128, base as u128 % m);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Legendre symbol `(u/p)` for odd prime `p ∤ u`.
fn legendre(u: &BigInt, p: u64) -> i8 {
    if pow_mod(mod_u64(u, p), (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Splits a nonzero squarefree integer as `p^α·u` with `α ∈ {0,1}`.
fn split_valuation(x: &BigInt, p: u64) -> (u32, BigInt) {
    if (x % p).is_zero() {
        (1, x / p)
    } else {
        (0, x.clone())
    }
}

/// The local Hilbert symbol `(a,b)_v`.
pub fn hilbert_symbol(a: &Rational, b: &Rational, place: Place) -> Result<i8, QuatError> {
    if a.is_zero() || b.is_zero() {
        return Err(QuatError::ZeroConstant);
    }
    let p = match place {
        Place::Infinity => {
            return Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 });
        }
        Place::Prime(p) if !is_prime(p) => return Err(QuatError::NotPrime(p)),
        Place::Prime(p) => p,
    };
    let (alpha, u) = split_valuation(&square_class(a), p);
    let (beta, v) = split_valuation(&square_class(b), p);
    if p == 2 {
        let eps = |x: &BigInt| -> u64 { (mod_u64(x, 4) == 3) as u64 };
        let omega = |x: &BigInt| -> u64 { matches!(mod_u64(x, 8), 3 | 5) as u64 };
        let e = eps(&u) * eps(&v) + alpha as u64 * omega(&v) + beta as u64 * omega(&u);
        return Ok(if e.is_multiple_of(2) { 1 } else { -1 });
    }
    let mut s: i8 = if (alpha * beta) as u64 * ((p - 1) / 2) % 2 == 1 { -1 } else { 1 };
    if beta == 1 {
        s *= legendre(&u, p);
    }
    if alpha == 1 {
        s *= legendre(&v, p);
    }
    Ok(s)
}

/// `∞`, `2` and every odd prime dividing a numerator or denominator of the inputs.
pub fn relevant_places(values: &[&Rational]) -> Result<Vec<Place>, QuatError> {
    let mut places: BTreeSet<Place> = [Place::Infinity, Place::Prime(2)].into_iter().collect();
    for r in values {
        for n in [r.numer(), r.denom()] {
            for p in prime_factors(n)? {
                places.insert(Place::Prime(p));
            }
        }
    }
    Ok(places.into_iter().collect())
}

/// The quaternion algebra with `i² = a`, `j² = b`, `ij = −ji`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuatAlg {
    a: Rational,
    b: Rational,
}

impl QuatAlg {
    pub fn new(a: Rational, b: Rational) -> Result<Self, QuatError> {
        if a.is_zero() || b.is_zero() {
            return Err(QuatError::ZeroConstant);
        }
        Ok(QuatAlg { a, b })
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn relevant_places(&self) -> Result<Vec<Place>, QuatError> {
        relevant_places(&[&self.a, &self.b])
    }

    /// Hilbert symbols at the given places.
    pub fn symbols(&self, places: &[Place]) -> Result<Vec<(Place, i8)>, QuatError> {
        places.iter().map(|&v| Ok((v, hilbert_symbol(&self.a, &self.b, v)?))).collect()
    }

    /// Places where the algebra ramifies (symbol `−1`).
    pub fn ramified_places(&self) -> Result<Vec<Place>, QuatError> {
        Ok(self
            .symbols(&self.relevant_places()?)?
            .into_iter()
            .filter(|&(_, s)| s == -1)
            .map(|(v, _)| v)
            .collect())
    }

    pub fn is_split(&self) -> Result<bool, QuatError> {
        Ok(self.ramified_places()?.is_empty())
    }

    /// Isomorphism test: equal symbols over the union of both relevant place sets.
    pub fn is_isomorphic(&self, other: &QuatAlg) -> Result<bool, QuatError> {
        let places = relevant_places(&[&self.a, &self.b, &other.a, &other.b])?;
        Ok(self.symbols(&places)? == other.symbols(&places)?)
    }
}

impl fmt::Display for QuatAlg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

pub fn is_split(alg: &QuatAlg) -> Result<bool, QuatError> {
    alg.is_split()
}

/// Bounded search for `x = p/s`, `y = q/s` with `x² + d·y² = n`, `|p|, |q|, s ≤ bound`.
///
/// Tries `s` then `q` in increasing order and returns the first hit with `p, q ≥ 0`.
pub fn norm_eq_search(n: &Rational, d: u64, bound: u64) -> Option<(Rational, Rational)> {
    if n.is_zero() || !n.is_positive() {
        return None;
    }
    let (num, den) = (n.numer(), n.denom());
    let d = BigInt::from(d);
    for s in 1..=bound {
        let s2 = BigInt::from(s) * BigInt::from(s);
        for q in 0..=bound {
            // den·(p² + d q²) = num·s²  ⇔  p² = (num·s² − den·d·q²)/den
            let rhs = num * &s2 - den * &d * BigInt::from(q) * BigInt::from(q);
            if rhs.is_negative() {
                break;
            }
            if !(&rhs % den).is_zero() {
                continue;
            }
            let p2 = rhs / den;
            if !is_perfect_square(&p2) {
                continue;
            }
            let p = p2.sqrt();
            if p > BigInt::from(bound) {
                continue;
            }
            let sb = BigInt::from(s);
            return Some((Rational::new(p, sb.clone()), Rational::new(BigInt::from(q), sb)));
        }
    }
    None
}

/// Bounded search for `b = x² − a·y²`, which shows that `(a, b)` is split.
///
/// Same enumeration as [`norm_eq_search`]: `x = p/s`, `y = q/s` with
/// `|p|, q, s ≤ bound`, trying `s` then `q` in increasing order.
pub fn splitting_witness(alg: &QuatAlg, bound: u64) -> Option<(Rational, Rational)> {
    let (a, b) = (&alg.a, &alg.b);
    for s in 1..=bound {
        let s2 = Rational::from_integer(BigInt::from(s) * BigInt::from(s));
        for q in 0..=bound {
            let q2 = Rational::from_integer(BigInt::from(q) * BigInt::from(q));
            // p² = b·s² + a·q²
            let p2 = b * &s2 + a * &q2;
            if p2.is_negative() || !p2.is_integer() || !is_perfect_square(p2.numer()) {
                continue;
            }
            let p = p2.numer().sqrt();
            if p > BigInt::from(bound) {
                continue;
            }
            let sb = BigInt::from(s);
            return Some((Rational::new(p, sb.clone()), Rational::new(BigInt::from(q), sb)));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::int;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        int(n)
    }

    /// `(a,b)_p = 1` iff `z² = a x² + b y²` has a primitive solution mod `p^k`.
    /// For squarefree `a`, `b` the exponents below are enough for Hensel lifting.
    fn brute_symbol(a: i64, b: i64, p: u64) -> i8 {
        let k = if p == 2 { 6 } else { 3 };
        let n = p.pow(k) as i64;
        let mut square_any = vec![false; n as usize];
        let mut square_unit = vec![false; n as usize];
        for z in 0..n {
            let s = (z * z).rem_euclid(n) as usize;
            square_any[s] = true;
            if z % p as i64 != 0 {
                square_unit[s] = true;
            }
        }
        for x in 0..n {
            for y in 0..n {
                let rhs = (a * x * x + b * y * y).rem_euclid(n) as usize;
                let xy_primitive = x % p as i64 != 0 || y % p as i64 != 0;
                if (xy_primitive && square_any[rhs]) || square_unit[rhs] {
                    return 1;
                }
            }
        }
        -1
    }

    #[test]
    fn examples() {
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Infinity).unwrap(), -1);
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Prime(2)).unwrap(), -1);
        assert_eq!(brute_symbol(-1, -1, 2), -1);
        for v in [Place::Infinity, Place::Prime(2), Place::Prime(3), Place::Prime(5)] {
            assert_eq!(hilbert_symbol(&q(1), &q(-7), v).unwrap(), 1);
        }
        assert!(hilbert_symbol(&q(1), &q(2), Place::Prime(9)).is_err());
        assert!(hilbert_symbol(&q(0), &q(2), Place::Prime(3)).is_err());
    }

    #[test]
    fn split_examples() {
        assert!(QuatAlg::new(q(-1), q(1)).unwrap().is_split().unwrap());
        assert!(!QuatAlg::new(q(-3), q(2)).unwrap().is_split().unwrap());
        assert!(QuatAlg::new(q(-1), q(2)).unwrap().is_split().unwrap());
        assert_eq!(
            QuatAlg::new(q(-1), q(-1)).unwrap().ramified_places().unwrap(),
            [Place::Infinity, Place::Prime(2)]
        );
    }

    #[test]
    fn norm_search_examples() {
        assert_eq!(norm_eq_search(&q(1), 1, 10), Some((q(1), q(0))));
        assert_eq!(norm_eq_search(&q(2), 1, 10), Some((q(1), q(1))));
        assert_eq!(norm_eq_search(&q(2), 3, 50), None);
        assert_eq!(norm_eq_search(&q(-1), 3, 50), None);
        let alg = QuatAlg::new(q(-1), q(2)).unwrap();
        assert_eq!(splitting_witness(&alg, 50), Some((q(1), q(1))));
        let (x, y) = splitting_witness(&QuatAlg::new(q(1), q(7)).unwrap(), 50).unwrap();
        assert_eq!(&x * &x - &y * &y, q(7));
        assert_eq!(splitting_witness(&QuatAlg::new(q(-3), q(2)).unwrap(), 50), None);
        let (x, y) = norm_eq_search(&Rational::new(7.into(), 4.into()), 3, 20).unwrap();
        assert_eq!(&x * &x + q(3) * &y * &y, Rational::new(7.into(), 4.into()));
    }

    #[test]
    fn symbols_match_brute_force() {
        let vals: Vec<i64> = (-15..=15).filter(|&x| x != 0 && squarefree_part(&x.into()) == x.into()).collect();
        for p in [3, 5, 7] {
            for &a in &vals {
                for &b in &vals {
                    assert_eq!(hilbert_symbol(&q(a), &q(b), Place::Prime(p)).unwrap(), brute_symbol(a, b, p), "({a},{b})_{p}");
                }
            }
        }
        // every square class of Q_2 is represented by ±1, ±3, ±2, ±6
        let classes = [1, 3, -1, -3, 2, 6, -2, -6, 5, 7, 10, 14];
        for &a in &classes {
            for &b in &classes {
                assert_eq!(hilbert_symbol(&q(a), &q(b), Place::Prime(2)).unwrap(), brute_symbol(a, b, 2), "({a},{b})_2");
            }
        }
    }

    #[test]
    fn witnesses_imply_split() {
        for d in [1u64, 2, 3, 5, 7] {
            for n in 1..40 {
                if let Some((x, y)) = norm_eq_search(&q(n), d, 30) {
                    assert_eq!(&x * &x + q(d as i64) * &y * &y, q(n));
                    assert!(QuatAlg::new(q(-(d as i64)), q(n)).unwrap().is_split().unwrap());
                }
            }
        }
        for a in (-12..=12).filter(|&a| a != 0) {
            for b in (-12..=12).filter(|&b| b != 0) {
                let alg = QuatAlg::new(q(a), q(b)).unwrap();
                if let Some((x, y)) = splitting_witness(&alg, 20) {
                    assert_eq!(&x * &x - q(a) * &y * &y, q(b));
                    assert!(alg.is_split().unwrap(), "({a},{b})");
                }
            }
        }
    }

    #[test]
    fn isomorphism_of_equivalent_presentations() {
        // (a,b) ≅ (a, −ab) ≅ (b,a)
        let a = QuatAlg::new(q(-3), q(5)).unwrap();
        assert!(a.is_isomorphic(&QuatAlg::new(q(-3), q(15)).unwrap()).unwrap());
        assert!(a.is_isomorphic(&QuatAlg::new(q(5), q(-3)).unwrap()).unwrap());
        assert!(!a.is_isomorphic(&QuatAlg::new(q(-1), q(1)).unwrap()).unwrap());
    }

    fn nonzero_rational() -> impl Strategy<Value = Rational> {
        (-400i64..400, 1i64..60)
            .prop_filter("nonzero", |(n, _)| *n != 0)
            .prop_map(|(n, d)| Rational::new(n.into(), d.into()))
    }

    proptest! {
        #[test]
        fn reciprocity(a in nonzero_rational(), b in nonzero_rational()) {
            let places = relevant_places(&[&a, &b]).unwrap();
            let prod: i8 = places.iter().map(|&v| hilbert_symbol(&a, &b, v).unwrap()).product();
            prop_assert_eq!(prod, 1);
        }

        #[test]
        fn bimultiplicative_and_symmetric(
            a in nonzero_rational(), a2 in nonzero_rational(), b in nonzero_rational()
        ) {
            for v in relevant_places(&[&a, &a2, &b]).unwrap() {
                let lhs = hilbert_symbol(&(&a * &a2), &b, v).unwrap();
                let rhs = hilbert_symbol(&a, &b, v).unwrap() * hilbert_symbol(&a2, &b, v).unwrap();
                prop_assert_eq!(lhs, rhs);
                prop_assert_eq!(hilbert_symbol(&a, &b, v).unwrap(), hilbert_symbol(&b, &a, v).unwrap());
                // (a, −a) = 1
                prop_assert_eq!(hilbert_symbol(&a, &-&a, v).unwrap(), 1);
            }
        }
    }
}

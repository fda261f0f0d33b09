use std::ops::{Index, IndexMut};

use num::Signed;

use super::LinalgError;
use crate::field::QuadElem;

/// Dense square-or-rectangular matrix over `Q(sqrt(-d))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixK {
    rows: usize,
    cols: usize,
    d: u64,
    data: Vec<QuadElem>,
}

impl MatrixK {
    pub fn zeros(rows: usize, cols: usize, d: u64) -> Self {
        MatrixK { rows, cols, d, data: vec![QuadElem::zero(d); rows * cols] }
    }

    pub fn identity(n: usize, d: u64) -> Self {
        let mut m = Self::zeros(n, n, d);
        for i in 0..n {
            m[(i, i)] = QuadElem::one(d);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<QuadElem>>, d: u64) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(LinalgError::DimensionMismatch { expected: c, got: row.len() });
            }
            if row.iter().any(|x| x.d() != d) {
                return Err(LinalgError::FieldMismatch);
            }
            data.extend(row);
        }
        Ok(MatrixK { rows: r, cols: c, d, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn conj_transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.d);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].conj();
            }
        }
        t
    }

    pub fn checked_mul(&self, other: &MatrixK) -> Result<MatrixK, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        if self.d != other.d {
            return Err(LinalgError::FieldMismatch);
        }
        let mut out = Self::zeros(self.rows, other.cols, self.d);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let p = a * &other[(k, c)];
                    out[(r, c)] = &out[(r, c)] + &p;
                }
            }
        }
        Ok(out)
    }

    /// `P* · self · P`.
    pub fn congruence(&self, p: &MatrixK) -> Result<MatrixK, LinalgError> {
        p.conj_transpose().checked_mul(self)?.checked_mul(p)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_violation().is_none()
    }

    fn hermitian_violation(&self) -> Option<(usize, usize)> {
        if self.rows != self.cols {
            return Some((0, 0));
        }
        for r in 0..self.rows {
            for c in r..self.cols {
                if self[(r, c)] != self[(c, r)].conj() {
                    return Some((r, c));
                }
            }
        }
        None
    }

    fn add_col_multiple(&mut self, target: usize, source: usize, s: &QuadElem) {
        for r in 0..self.rows {
            let v = s * &self[(r, source)];
            self[(r, target)] = &self[(r, target)] + &v;
        }
    }

    fn add_row_multiple(&mut self, target: usize, source: usize, s: &QuadElem) {
        for c in 0..self.cols {
            let v = s * &self[(source, c)];
            self[(target, c)] = &self[(target, c)] + &v;
        }
    }

    fn swap_index(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }
}

impl Index<(usize, usize)> for MatrixK {
    type Output = QuadElem;
    fn index(&self, (r, c): (usize, usize)) -> &QuadElem {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for MatrixK {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut QuadElem {
        &mut self.data[r * self.cols + c]
    }
}

/// Counts positive and negative axes of a nondegenerate hermitian form.
///
/// Diagonalizes by congruence `H ↦ P*HP` over `Q(sqrt(-d))`. A zero diagonal
/// pivot with a nonzero off-diagonal entry `h` is repaired by replacing basis
/// vector `r` with `r + conj(h)·s`, whose new diagonal entry is `2·N(h) > 0`.
pub fn signature_hermitian(h: &MatrixK) -> Result<(usize, usize), LinalgError> {
    if h.rows != h.cols {
        return Err(LinalgError::NotSquare { rows: h.rows, cols: h.cols });
    }
    if let Some((row, col)) = h.hermitian_violation() {
        return Err(LinalgError::NotHermitian { row, col });
    }
    let n = h.rows;
    let mut a = h.clone();
    let (mut pos, mut neg) = (0, 0);
    for k in 0..n {
        let pivot = (k..n).find(|&j| !a[(j, j)].is_zero());
        match pivot {
            Some(j) => a.swap_index(k, j),
            None => {
                let off = (k..n)
                    .flat_map(|r| (k..n).map(move |s| (r, s)))
                    .find(|&(r, s)| r != s && !a[(r, s)].is_zero());
                let Some((r, s)) = off else {
                    return Err(LinalgError::Degenerate { radical_dim: n - k });
                };
                // new basis vector v_r + λ v_s with λ = conj(h_rs)
                let lambda = a[(r, s)].conj();
                a.add_col_multiple(r, s, &lambda);
                a.add_row_multiple(r, s, &lambda.conj());
                a.swap_index(k, r);
            }
        }
        let pivot = a[(k, k)].clone();
        debug_assert!(pivot.is_rational());
        for r in (k + 1)..n {
            if a[(k, r)].is_zero() {
                continue;
            }
            // v_r ↦ v_r − c·v_k clears H(v_k, v_r)
            let c = a[(k, r)].checked_div(&pivot).map_err(|_| LinalgError::FieldMismatch)?;
            a.add_col_multiple(r, k, &-&c);
            a.add_row_multiple(r, k, &-&c.conj());
        }
        if pivot.re().is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    Ok((pos, neg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::int;

    fn q(a: i64, b: i64, d: u64) -> QuadElem {
        QuadElem::from_ints(a, b, d).unwrap()
    }

    fn diag(entries: &[i64], d: u64) -> MatrixK {
        let n = entries.len();
        let mut m = MatrixK::zeros(n, n, d);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = QuadElem::rational(int(*e), d);
        }
        m
    }

    #[test]
    fn one_negative_axis() {
        assert_eq!(signature_hermitian(&diag(&[-2, 1, 3, 5], 3)).unwrap(), (3, 1));
    }

    #[test]
    fn identity_is_positive_definite() {
        assert_eq!(signature_hermitian(&MatrixK::identity(4, 7)).unwrap(), (4, 0));
    }

    #[test]
    fn hyperbolic_plane_needs_completion_step() {
        // eigenvalues of the realified form are ±|1 + √-d|
        for d in [1, 2, 3, 7] {
            let h = MatrixK::from_rows(vec![vec![q(0, 0, d), q(1, 1, d)], vec![q(1, -1, d), q(0, 0, d)]], d)
                .unwrap();
            assert_eq!(signature_hermitian(&h).unwrap(), (1, 1));
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let h = MatrixK::from_rows(vec![vec![q(1, 0, 1), q(1, 1, 1)], vec![q(1, 1, 1), q(1, 0, 1)]], 1)
            .unwrap();
        assert!(matches!(signature_hermitian(&h), Err(LinalgError::NotHermitian { .. })));
        let h = MatrixK::from_rows(vec![vec![q(0, 1, 1)]], 1).unwrap();
        assert!(matches!(signature_hermitian(&h), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn degenerate_reports_radical() {
        let h = diag(&[1, 0, 0], 2);
        assert_eq!(signature_hermitian(&h), Err(LinalgError::Degenerate { radical_dim: 2 }));
        let h = MatrixK::from_rows(vec![vec![q(1, 0, 2), q(1, 0, 2)], vec![q(1, 0, 2), q(1, 0, 2)]], 2)
            .unwrap();
        assert_eq!(signature_hermitian(&h), Err(LinalgError::Degenerate { radical_dim: 1 }));
    }
}

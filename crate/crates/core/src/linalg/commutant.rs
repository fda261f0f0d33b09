use num::{One, Zero};

use super::{LinalgError, MatrixQ, SparseVec, SubspaceQ};
use crate::field::Rational;

fn vec_of(m: &MatrixQ) -> Vec<Rational> {
    (0..m.rows()).flat_map(|r| m.row(r).to_vec()).collect()
}

fn commutator(x: &MatrixQ, a: &MatrixQ) -> MatrixQ {
    &(x * a) - &(a * x)
}

/// Basis of `{X : XA = AX for every A in ops}`.
///
/// The commutant of the first operator is solved with sparse equations; each
/// further operator then cuts the solution space down with a dense kernel
/// computation. Seeding with an integer combination of all operators instead
/// looks cheaper but blows up the rational entries badly.
pub fn commutant(ops: &[MatrixQ], n: usize) -> Result<Vec<MatrixQ>, LinalgError> {
    for a in ops {
        if a.rows() != n || a.cols() != n {
            return Err(LinalgError::DimensionMismatch { expected: n, got: a.rows().max(a.cols()) });
        }
    }
    let mut basis: Vec<MatrixQ> = if ops.is_empty() {
        (0..n * n)
            .map(|k| {
                let mut e = MatrixQ::zeros(n, n);
                e[(k / n, k % n)] = Rational::one();
                e
            })
            .collect()
    } else {
        single_commutant(&ops[0])
    };
    for a in ops.iter().skip(1) {
        if basis.is_empty() {
            break;
        }
        let images: Vec<Vec<Rational>> = basis.iter().map(|x| vec_of(&commutator(x, a))).collect();
        if images.iter().all(|v| v.iter().all(Zero::is_zero)) {
            continue;
        }
        // columns are vec(X_l A − A X_l)
        let mut eq = MatrixQ::zeros(n * n, basis.len());
        for (l, v) in images.iter().enumerate() {
            eq.set_column(l, v);
        }
        basis = eq
            .kernel()
            .into_iter()
            .map(|c| {
                let mut x = MatrixQ::zeros(n, n);
                for (cl, xl) in c.iter().zip(&basis) {
                    if !cl.is_zero() {
                        x = &x + &xl.scale(cl);
                    }
                }
                x
            })
            .collect();
    }
    Ok(basis)
}

/// Commutant of a single matrix from the sparse system `XA − AX = 0`.
fn single_commutant(a: &MatrixQ) -> Vec<MatrixQ> {
    let n = a.rows();
    let mut eqs = SubspaceQ::new(n * n);
    for r in 0..n {
        for c in 0..n {
            // (XA − AX)[r][c] = Σ_k X[r][k] A[k][c] − A[r][k] X[k][c]
            let mut pairs = Vec::new();
            for k in 0..n {
                if !a[(k, c)].is_zero() {
                    pairs.push((r * n + k, a[(k, c)].clone()));
                }
                if !a[(r, k)].is_zero() {
                    pairs.push((k * n + c, -a[(r, k)].clone()));
                }
            }
            let row = SparseVec::from_pairs(n * n, pairs).expect("indices below n²");
            if !row.is_zero() {
                eqs.insert(&row).expect("ambient n²");
            }
        }
    }
    eqs.nullspace()
        .into_iter()
        .map(|v| {
            let mut x = MatrixQ::zeros(n, n);
            for (k, val) in v.iter() {
                x[(k / n, k % n)] = val.clone();
            }
            x
        })
        .collect()
}

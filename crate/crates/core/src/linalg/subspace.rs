use std::collections::BTreeMap;

use num::{One, Zero};

use super::LinalgError;
use crate::field::Rational;

/// Sparse vector in `Q^dim`: strictly increasing indices, no stored zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseVec {
    dim: usize,
    entries: Vec<(usize, Rational)>,
}

impl SparseVec {
    pub fn zero(dim: usize) -> Self {
        SparseVec { dim, entries: Vec::new() }
    }

    /// Builds from arbitrary `(index, value)` pairs; duplicates are summed.
    pub fn from_pairs(
        dim: usize,
        pairs: impl IntoIterator<Item = (usize, Rational)>,
    ) -> Result<Self, LinalgError> {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, v) in pairs {
            if i >= dim {
                return Err(LinalgError::DimensionMismatch { expected: dim, got: i + 1 });
            }
            *acc.entry(i).or_insert_with(Rational::zero) += v;
        }
        Ok(Self::from_map(dim, acc))
    }

    fn from_map(dim: usize, acc: BTreeMap<usize, Rational>) -> Self {
        SparseVec { dim, entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect() }
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        SparseVec {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn get(&self, index: usize) -> Option<&Rational> {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.dim);
        }
        SparseVec { dim: self.dim, entries: self.entries.iter().map(|(i, v)| (*i, v * s)).collect() }
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, s: &Rational, other: &SparseVec) -> Self {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, s * y));
                        b.next();
                    } else {
                        let v = x + s * y;
                        if !v.is_zero() {
                            out.push((*i, v));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, s * y));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { dim: self.dim, entries: out }
    }
}

/// A subspace of `Q^N` held as a reduced row echelon basis keyed by pivot column.
///
/// Every basis row has a `1` at its pivot and zeros at all other pivots, so
/// the coordinates of a member vector are simply its entries at the pivots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceQ {
    ambient: usize,
    rows: BTreeMap<usize, SparseVec>,
}

impl SubspaceQ {
    pub fn new(ambient: usize) -> Self {
        SubspaceQ { ambient, rows: BTreeMap::new() }
    }

    pub fn span<'a>(
        ambient: usize,
        vectors: impl IntoIterator<Item = &'a SparseVec>,
    ) -> Result<Self, LinalgError> {
        let mut s = Self::new(ambient);
        for v in vectors {
            s.insert(v)?;
        }
        Ok(s)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Basis rows in pivot order.
    pub fn basis(&self) -> impl Iterator<Item = &SparseVec> {
        self.rows.values()
    }

    fn check_dim(&self, v: &SparseVec) -> Result<(), LinalgError> {
        if v.dim() != self.ambient {
            return Err(LinalgError::DimensionMismatch { expected: self.ambient, got: v.dim() });
        }
        Ok(())
    }

    /// `v` minus its projection along the pivots; zero iff `v` is in the span.
    pub fn residual(&self, v: &SparseVec) -> Result<SparseVec, LinalgError> {
        self.check_dim(v)?;
        let mut acc: BTreeMap<usize, Rational> = v.iter().map(|(i, x)| (i, x.clone())).collect();
        for (i, c) in v.iter() {
            if let Some(row) = self.rows.get(&i) {
                for (j, x) in row.iter() {
                    let e = acc.entry(j).or_insert_with(Rational::zero);
                    *e -= c * x;
                }
            }
        }
        Ok(SparseVec::from_map(self.ambient, acc))
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &SparseVec) -> Result<bool, LinalgError> {
        let res = self.residual(v)?;
        let Some((pivot, lead)) = res.leading() else {
            return Ok(false);
        };
        let new_row = res.scale(&(Rational::one() / lead));
        for row in self.rows.values_mut() {
            if let Some(c) = row.get(pivot).cloned() {
                *row = row.add_scaled(&-c, &new_row);
            }
        }
        self.rows.insert(pivot, new_row);
        Ok(true)
    }

    pub fn member(&self, v: &SparseVec) -> Result<bool, LinalgError> {
        Ok(self.residual(v)?.is_zero())
    }

    /// Coordinates of `v` in the pivot-ordered basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &SparseVec) -> Result<Option<Vec<Rational>>, LinalgError> {
        if !self.member(v)? {
            return Ok(None);
        }
        Ok(Some(
            self.rows.keys().map(|p| v.get(*p).cloned().unwrap_or_else(Rational::zero)).collect(),
        ))
    }

    /// Combination `Σ cᵢ·basisᵢ`.
    pub fn combine(&self, coords: &[Rational]) -> Result<SparseVec, LinalgError> {
        if coords.len() != self.dim() {
            return Err(LinalgError::DimensionMismatch { expected: self.dim(), got: coords.len() });
        }
        let mut out = SparseVec::zero(self.ambient);
        for (c, row) in coords.iter().zip(self.rows.values()) {
            if !c.is_zero() {
                out = out.add_scaled(c, row);
            }
        }
        Ok(out)
    }

    pub fn contains(&self, other: &SubspaceQ) -> Result<bool, LinalgError> {
        for v in other.basis() {
            if !self.member(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &SubspaceQ) -> Result<SubspaceQ, LinalgError> {
        let mut s = self.clone();
        for v in other.basis() {
            s.insert(v)?;
        }
        Ok(s)
    }

    /// Basis of the annihilator `{x : ⟨row, x⟩ = 0 for every basis row}`.
    pub fn nullspace(&self) -> Vec<SparseVec> {
        let mut out = Vec::new();
        for free in (0..self.ambient).filter(|c| !self.rows.contains_key(c)) {
            let mut pairs = vec![(free, Rational::one())];
            for (p, row) in &self.rows {
                if let Some(x) = row.get(free) {
                    pairs.push((*p, -x));
                }
            }
            out.push(SparseVec::from_pairs(self.ambient, pairs).expect("in range"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::int;

    fn sv(v: &[i64]) -> SparseVec {
        SparseVec::from_dense(&v.iter().map(|&x| int(x)).collect::<Vec<_>>())
    }

    #[test]
    fn basis_rows_and_zero_are_members() {
        let s = SubspaceQ::span(4, [&sv(&[1, 2, 0, 1]), &sv(&[0, 1, 1, 1])]).unwrap();
        for b in s.basis() {
            assert!(s.member(b).unwrap());
        }
        assert!(s.member(&SparseVec::zero(4)).unwrap());
    }

    #[test]
    fn vector_with_residual_is_not_member() {
        // rank-deficient spanning set: third generator is the sum of the first two
        let s = SubspaceQ::span(
            4,
            [&sv(&[1, 2, 0, 1]), &sv(&[0, 1, 1, 1]), &sv(&[1, 3, 1, 2])],
        )
        .unwrap();
        assert_eq!(s.dim(), 2);
        let v = sv(&[0, 0, 0, 1]);
        assert!(!s.residual(&v).unwrap().is_zero());
        assert!(!s.member(&v).unwrap());
        assert!(s.member(&sv(&[2, 5, 1, 3])).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let s = SubspaceQ::new(3);
        assert_eq!(
            s.member(&sv(&[1, 0])),
            Err(LinalgError::DimensionMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn coordinates_reconstruct() {
        let s = SubspaceQ::span(5, [&sv(&[1, 0, 2, 0, 1]), &sv(&[0, 3, 1, 1, 0])]).unwrap();
        let v = sv(&[2, -3, 3, -1, 2]);
        let c = s.coordinates(&v).unwrap().unwrap();
        assert_eq!(s.combine(&c).unwrap(), v);
    }

    #[test]
    fn nullspace_annihilates() {
        let s = SubspaceQ::span(4, [&sv(&[1, 2, 0, 1]), &sv(&[0, 1, 1, 1])]).unwrap();
        let ns = s.nullspace();
        assert_eq!(ns.len(), 2);
        for x in &ns {
            for row in s.basis() {
                let dot: Rational = row.iter().filter_map(|(i, a)| x.get(i).map(|b| a * b)).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn rows_stay_reduced() {
        let s = SubspaceQ::span(
            3,
            [&sv(&[0, 1, 1]), &sv(&[1, 1, 0]), &sv(&[1, 0, 1])],
        )
        .unwrap();
        assert_eq!(s.dim(), 3);
        let pivots: Vec<usize> = s.pivots().collect();
        for (p, row) in s.pivots().zip(s.basis()) {
            assert_eq!(row.get(p), Some(&int(1)));
            for q in pivots.iter().filter(|&&q| q != p) {
                assert!(row.get(*q).is_none());
            }
        }
    }
}

//! Seeded generators for randomized checks and the self-test.

use rand::Rng;

use crate::clifford::QuadFormDiag;
use crate::field::{CMFieldDescriptor, CMType};
use crate::hodge::HodgeTable;

/// A valid table with `r ≤ max_r`, weight `k ≤ max_k`, `dim_K ≤ max_m` and a random CM-type.
pub fn random_hodge_table<R: Rng>(rng: &mut R, max_r: usize, max_k: i64, max_m: u64) -> HodgeTable {
    let r = rng.gen_range(1..=max_r);
    let k = rng.gen_range(0..=max_k);
    let m = rng.gen_range(0..=max_m);
    let field = CMFieldDescriptor::new(r).expect("r ≥ 1");
    let chosen: Vec<usize> = (1..=r).map(|j| if rng.gen_bool(0.5) { j } else { j + r }).collect();
    let sigma = CMType::from_indices(field, &chosen).expect("one embedding per pair");
    let mut entries = Vec::new();
    for j in 1..=r {
        for _ in 0..m {
            let p = rng.gen_range(0..=k);
            entries.push((j, p, k - p, 1));
            entries.push((j + r, k - p, p, 1));
        }
    }
    HodgeTable::new(sigma, k, entries).expect("indices in range")
}

/// A form `(d₁, …, d_m)` of signature `(2m−2, 2)` shape: `d₁ < 0 < d₂, …, d_m`,
/// entries drawn from `±1..=max_abs`.
pub fn random_weight_two_form<R: Rng>(rng: &mut R, d: u64, m: usize, max_abs: i64) -> QuadFormDiag {
    let diag: Vec<i64> = (0..m)
        .map(|i| {
            let x = rng.gen_range(1..=max_abs);
            if i == 0 {
                -x
            } else {
                x
            }
        })
        .collect();
    QuadFormDiag::from_ints(d, &diag).expect("nonzero entries, squarefree d")
}

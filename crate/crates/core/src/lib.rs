//! Exact computations with half twists of CM-type Hodge structures and the
//! spin decomposition of the Kuga–Satake construction for weight-2 structures
//! with imaginary quadratic multiplication.
//!
//! All algebra is done over `Q` or `Q(sqrt(-d))` with big rationals. Floating
//! point appears only in the positivity check of [`polar`].

pub mod clifford;
pub mod field;
pub mod hodge;
pub mod ks;
pub mod linalg;
pub mod polar;
pub mod quat;
pub mod sample;
pub mod selftest;
pub mod spin;

pub use clifford::{clifford_mul, Blade, CliffordElem, QuadFormDiag};
pub use field::{CMFieldDescriptor, CMType, QuadElem, Rational};
pub use hodge::{ext_power_k, half_twist, tate_twist, tensor_k_halfmodule, validate, HodgeTable};
pub use ks::{full_report, summand_table, KSReport, KsError, Level};
pub use linalg::{MatrixK, MatrixQ, SparseVec, SubspaceQ};
pub use polar::{hermitian_form, positivity_oracle, signature_h, twisted_polarization, PolarizedSetup};
pub use quat::{hilbert_symbol, norm_eq_search, splitting_witness, Place, QuatAlg};
pub use spin::{decompose, SpinDecomposition};

//! The polarization `ψ` together with the action `φ` of `sqrt(-d)`: the
//! hermitian form `H`, its signature, the twisted polarization `Ψ′` on the
//! half twist, and a floating-point check of the Hodge–Riemann positivity.

use nalgebra::{Complex, DMatrix, DVector};
use num::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use crate::clifford::QuadFormDiag;
use crate::field::{int, QuadElem, Rational};
use crate::linalg::{signature_hermitian, LinalgError, MatrixK, MatrixQ};

/// Tolerance of the positivity oracle.
pub const ORACLE_TOL: f64 = 1e-9;

pub type Complex64 = Complex<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolarError {
    #[error("invalid polarized setup: {0}")]
    InvalidSetup(String),
    #[error("invalid period: {0}")]
    InvalidPeriod(String),
    #[error("period parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Gram matrix `G` of `ψ` and matrix `J` of `φ` on `V = Q^(2m)`, in a basis
/// `e₁, …, e_m, φe₁, …, φe_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarizedSetup {
    d: u64,
    gram: MatrixQ,
    phi: MatrixQ,
}

fn standard_phi(m: usize, d: u64) -> MatrixQ {
    let mut j = MatrixQ::zeros(2 * m, 2 * m);
    for i in 0..m {
        j[(m + i, i)] = Rational::one();
        j[(i, m + i)] = -int(d as i64);
    }
    j
}

impl PolarizedSetup {
    pub fn from_form(form: &QuadFormDiag) -> Self {
        PolarizedSetup { d: form.d(), gram: form.gram_matrix(), phi: form.phi_matrix() }
    }

    /// Checks symmetry and nondegeneracy of `G`, `J² = −d` and `ᵗJG = −GJ`.
    pub fn new(d: u64, gram: MatrixQ, phi: MatrixQ) -> Result<Self, PolarError> {
        let n = gram.rows();
        if !gram.is_square() || !n.is_multiple_of(2) || n == 0 {
            return Err(PolarError::InvalidSetup(format!("Gram matrix must be 2m x 2m, got {}x{}", n, gram.cols())));
        }
        if phi.rows() != n || phi.cols() != n {
            return Err(PolarError::InvalidSetup("J and G have different sizes".into()));
        }
        if gram.transpose() != gram {
            return Err(PolarError::InvalidSetup("G is not symmetric".into()));
        }
        if gram.rank() != n {
            return Err(PolarError::InvalidSetup("ψ is degenerate".into()));
        }
        if &phi * &phi != MatrixQ::scalar(n, &-int(d as i64)) {
            return Err(PolarError::InvalidSetup(format!("J² ≠ −{d}·Id")));
        }
        let s = PolarizedSetup { d, gram, phi };
        if !s.is_k_compatible(&s.gram) {
            return Err(PolarError::InvalidSetup("ᵗJG ≠ −GJ".into()));
        }
        Ok(s)
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn m(&self) -> usize {
        self.gram.rows() / 2
    }

    pub fn gram(&self) -> &MatrixQ {
        &self.gram
    }

    pub fn phi(&self) -> &MatrixQ {
        &self.phi
    }

    /// `ᵗJ·B = −B·J` for a bilinear form `B`.
    pub fn is_k_compatible(&self, b: &MatrixQ) -> bool {
        &self.phi.transpose() * b == -&(b * &self.phi)
    }

    /// Rewrites the setup in the `K`-basis `e′ⱼ = Σₖ Pₖⱼ eₖ`, `P ∈ GL_m(K)`.
    ///
    /// With `P = A + B·sqrt(-d)` the rational change of basis is
    /// `R = [[A, −dB], [B, A]]`; `G` becomes `ᵗRGR` and `J` is unchanged.
    pub fn transport(&self, p: &MatrixK) -> Result<Self, PolarError> {
        let m = self.m();
        if p.rows() != m || p.cols() != m || p.d() != self.d {
            return Err(PolarError::InvalidSetup("transport matrix has the wrong shape or field".into()));
        }
        if self.phi != standard_phi(m, self.d) {
            return Err(PolarError::InvalidSetup("transport needs J in standard form".into()));
        }
        let r = realify(p);
        if r.inverse().is_none() {
            return Err(PolarError::InvalidSetup("transport matrix is singular".into()));
        }
        let gram = &(&r.transpose() * &self.gram) * &r;
        Self::new(self.d, gram, self.phi.clone())
    }
}

/// The rational `2m×2m` matrix of a `K`-linear map given on the `K`-basis.
pub fn realify(p: &MatrixK) -> MatrixQ {
    let m = p.rows();
    let d = int(p.d() as i64);
    let mut r = MatrixQ::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let (a, b) = (p[(i, j)].re(), p[(i, j)].im());
            r[(i, j)] = a.clone();
            r[(m + i, m + j)] = a.clone();
            r[(m + i, j)] = b.clone();
            r[(i, m + j)] = -(&d * b);
        }
    }
    r
}

/// `H(eᵢ, eⱼ) = ψ(eᵢ, eⱼ) − (sqrt(-d)/d)·ψ(eᵢ, φeⱼ)`.
pub fn hermitian_form(s: &PolarizedSetup) -> MatrixK {
    let m = s.m();
    let gj = &s.gram * &s.phi;
    let d = int(s.d as i64);
    let mut h = MatrixK::zeros(m, m, s.d);
    for i in 0..m {
        for j in 0..m {
            h[(i, j)] = QuadElem::new(s.gram[(i, j)].clone(), -&gj[(i, j)] / &d, s.d).expect("same field");
        }
    }
    h
}

/// `(positive, negative)` axes of `H`.
pub fn signature_h(s: &PolarizedSetup) -> Result<(usize, usize), PolarError> {
    Ok(signature_hermitian(&hermitian_form(s))?)
}

/// `Ψ′(v, w) = ψ(v, φw)`, the matrix `G·J`.
pub fn twisted_polarization(s: &PolarizedSetup) -> MatrixQ {
    &s.gram * &s.phi
}

pub fn is_skew(b: &MatrixQ) -> bool {
    b.transpose() == -b
}

/// A basis of `u(H) = {X : XJ = JX, ᵗXG + GX = 0}`.
///
/// `X` commutes with `J` exactly when `X = [[A, −dB], [B, A]]`, so the unknowns
/// are the `2m²` entries of `A` and `B`.
pub fn unitary_lie_algebra(s: &PolarizedSetup) -> Vec<MatrixQ> {
    let m = s.m();
    let n = 2 * m;
    let basis: Vec<MatrixQ> = (0..2 * m * m)
        .map(|k| {
            let (part, idx) = (k / (m * m), k % (m * m));
            let mut p = MatrixK::zeros(m, m, s.d);
            p[(idx / m, idx % m)] =
                if part == 0 { QuadElem::one(s.d) } else { QuadElem::sqrt_neg_d(s.d) };
            realify(&p)
        })
        .collect();
    let mut eq = MatrixQ::zeros(n * n, basis.len());
    for (col, x) in basis.iter().enumerate() {
        let c = &(&x.transpose() * &s.gram) + &(&s.gram * x);
        let flat: Vec<Rational> = (0..n).flat_map(|r| c.row(r).to_vec()).collect();
        eq.set_column(col, &flat);
    }
    eq.kernel()
        .into_iter()
        .map(|coeffs| {
            coeffs
                .iter()
                .zip(&basis)
                .filter(|(c, _)| !c.is_zero())
                .fold(MatrixQ::zeros(n, n), |acc, (c, b)| &acc + &b.scale(c))
        })
        .collect()
}

/// A random element of `GL_m(K)` with entries `a + b·sqrt(-d)`, `|a|, |b| ≤ max_abs`.
pub fn random_transport<R: Rng>(rng: &mut R, m: usize, d: u64, max_abs: i64) -> MatrixK {
    loop {
        let mut p = MatrixK::zeros(m, m, d);
        for i in 0..m {
            for j in 0..m {
                let a = rng.gen_range(-max_abs..=max_abs);
                let b = rng.gen_range(-max_abs..=max_abs);
                p[(i, j)] = QuadElem::from_ints(a, b, d).expect("squarefree d");
            }
        }
        if realify(&p).inverse().is_some() {
            return p;
        }
    }
}

fn to_f64(a: &MatrixQ) -> DMatrix<f64> {
    DMatrix::from_fn(a.rows(), a.cols(), |r, c| a[(r, c)].to_f64().unwrap_or(f64::NAN))
}

/// `v = e₁ + (i/sqrt(d))·e_{m+1}`, a line of type `(2,0)` for a diagonal form with `d₁ < 0`.
pub fn explicit_period(m: usize, d: u64) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 2 * m];
    v[0] = Complex64::new(1.0, 0.0);
    v[m] = Complex64::new(0.0, 1.0 / (d as f64).sqrt());
    v
}

/// Moves a period by `exp(X)` for a random real combination `X` of `u(H)`.
pub fn random_unitary_transport<R: Rng>(
    rng: &mut R,
    s: &PolarizedSetup,
    uh: &[MatrixQ],
    period: &[Complex64],
    scale: f64,
) -> Vec<Complex64> {
    let n = 2 * s.m();
    let mut x = DMatrix::<f64>::zeros(n, n);
    for a in uh {
        let af = to_f64(a);
        let norm = af.norm().max(1.0);
        x += af * (rng.gen_range(-scale..=scale) / norm);
    }
    let g = x.exp().map(|t| Complex64::new(t, 0.0));
    let v = DVector::from_column_slice(period);
    (g * v).iter().copied().collect()
}

/// Outcome of [`positivity_oracle`]; eigenvalues are those of the symmetrized forms.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    /// `Im` of the `φ`-eigenvalue of the period, divided by `sqrt(d)`: `±1`.
    pub eigen_sign: f64,
    pub min_eig_weight_two: f64,
    pub min_eig_half_twist: f64,
}

impl PositivityReport {
    pub fn passes(&self) -> bool {
        self.min_eig_weight_two > ORACLE_TOL && self.min_eig_half_twist > ORACLE_TOL
    }
}

fn bilinear(g: &DMatrix<Complex64>, x: &DVector<Complex64>, y: &DVector<Complex64>) -> Complex64 {
    (x.transpose() * g * y)[(0, 0)]
}

/// Smallest eigenvalue of a real matrix that must be symmetric up to `tol`.
fn min_sym_eigen(a: &DMatrix<f64>, what: &str) -> Result<f64, PolarError> {
    let scale = a.norm().max(1.0);
    if (a - a.transpose()).norm() > ORACLE_TOL * scale {
        return Err(PolarError::InvalidPeriod(format!("{what} is not symmetric")));
    }
    let sym = (a + a.transpose()) * 0.5;
    Ok(sym.symmetric_eigenvalues().min() / scale)
}

/// Checks `Ψ(x, h(i)x) > 0` for the weight-2 structure with `V^{2,0} = C·v`,
/// and `Ψ′(x, h′(i)x) > 0` on the half twist `V_{1/2}`.
///
/// `Σ` is the embedding under which `v` is a `φ`-eigenvector, and `Ψ′` uses
/// `α = ±sqrt(-d)` with `σ(α)` in the upper half plane for `σ ∈ Σ`.
/// Eigenvalues are reported relative to the Frobenius norm of each form.
pub fn positivity_oracle(s: &PolarizedSetup, period: &[Complex64]) -> Result<PositivityReport, PolarError> {
    let n = 2 * s.m();
    if period.len() != n {
        return Err(PolarError::InvalidPeriod(format!("expected {n} coordinates, got {}", period.len())));
    }
    let mut v = DVector::from_column_slice(period);
    let vn = v.norm();
    if !(vn > 0.0 && vn.is_finite()) {
        return Err(PolarError::InvalidPeriod("period is zero or not finite".into()));
    }
    v /= Complex64::new(vn, 0.0);
    let g = to_f64(&s.gram);
    let j = to_f64(&s.phi);
    let gc = g.map(|t| Complex64::new(t, 0.0));
    let jc = j.map(|t| Complex64::new(t, 0.0));
    let (gn, jn) = (g.norm().max(1.0), j.norm().max(1.0));
    let vbar = v.conjugate();

    let jv = &jc * &v;
    let eig = (v.adjoint() * &jv)[(0, 0)];
    let sqrt_d = (s.d as f64).sqrt();
    if eig.re.abs() > ORACLE_TOL * jn || ((eig.im.abs() - sqrt_d).abs() > ORACLE_TOL * jn) {
        return Err(PolarError::InvalidPeriod(format!("Rayleigh quotient {eig} is not ±i·sqrt({})", s.d)));
    }
    if (&jv - &v * eig).norm() > ORACLE_TOL * jn {
        return Err(PolarError::InvalidPeriod("period is not an eigenvector of φ".into()));
    }
    if bilinear(&gc, &v, &v).norm() > ORACLE_TOL * gn {
        return Err(PolarError::InvalidPeriod("ψ(v, v) ≠ 0".into()));
    }
    let pvv = bilinear(&gc, &v, &vbar);
    if pvv.im.abs() > ORACLE_TOL * gn || pvv.re >= -ORACLE_TOL * gn {
        return Err(PolarError::InvalidPeriod(format!("ψ(v, v̄) = {pvv} is not negative")));
    }

    // h(i) = −1 on W = <Re v, Im v>, +1 on its ψ-orthogonal complement
    let b = DMatrix::from_columns(&[v.map(|z| z.re), v.map(|z| z.im)]);
    let bgb = b.transpose() * &g * &b;
    let bgb_inv = bgb
        .try_inverse()
        .ok_or_else(|| PolarError::InvalidPeriod("ψ is degenerate on the period plane".into()))?;
    let proj = &b * bgb_inv * b.transpose() * &g;
    let h_i = DMatrix::<f64>::identity(n, n) - proj * 2.0;
    let min_eig_weight_two = min_sym_eigen(&(&g * &h_i), "Ψ(·, h(i)·)")?;

    // h′(i) = i·(2π_v − 2π_v̄ − J/s) with π_v = v·ψ(·, v̄)/ψ(v, v̄)
    let pi_v = &v * (vbar.transpose() * &gc) / pvv;
    let pi_vbar = &vbar * (v.transpose() * &gc) / pvv.conj();
    let i = Complex64::new(0.0, 1.0);
    let hc = (pi_v * Complex64::new(2.0, 0.0) - pi_vbar * Complex64::new(2.0, 0.0) - &jc / eig) * i;
    if hc.map(|z| z.im).norm() > ORACLE_TOL * hc.norm().max(1.0) {
        return Err(PolarError::InvalidPeriod("h′(i) is not real".into()));
    }
    let h_half = hc.map(|z| z.re);
    let sq = &h_half * &h_half + DMatrix::<f64>::identity(n, n);
    if sq.norm() > ORACLE_TOL * h_half.norm().max(1.0).powi(2) {
        return Err(PolarError::InvalidPeriod("h′(i)² ≠ −1".into()));
    }
    let eigen_sign = eig.im.signum();
    let psi_prime = (&g * &j) * eigen_sign;
    let min_eig_half_twist = min_sym_eigen(&(psi_prime * h_half), "Ψ′(·, h′(i)·)")?;
    Ok(PositivityReport { eigen_sign, min_eig_weight_two, min_eig_half_twist })
}

/// Parses `[["re", "im"], …]` with decimal strings.
pub fn parse_period(text: &str) -> Result<Vec<Complex64>, PolarError> {
    let raw: Vec<(String, String)> =
        serde_json::from_str(text).map_err(|e| PolarError::Parse(e.to_string()))?;
    raw.iter()
        .map(|(re, im)| {
            let p = |t: &str| t.trim().parse::<f64>().map_err(|e| PolarError::Parse(format!("{t:?}: {e}")));
            Ok(Complex64::new(p(re)?, p(im)?))
        })
        .collect()
}

/// Exact checks on one setup: `H` hermitian, `Ψ′` skew and `K`-compatible.
pub fn exact_checks(s: &PolarizedSetup) -> bool {
    let psi_prime = twisted_polarization(s);
    hermitian_form(s).is_hermitian() && is_skew(&psi_prime) && s.is_k_compatible(&psi_prime)
}

/// `Ψ′(e₁, φe₁) = ψ(e₁, φ²e₁)`.
pub fn twisted_value_e1(s: &PolarizedSetup) -> Rational {
    let psi_prime = twisted_polarization(s);
    let mut e1 = vec![Rational::zero(); 2 * s.m()];
    e1[0] = Rational::one();
    let je1 = s.phi.mul_vec(&e1);
    let img = psi_prime.mul_vec(&je1);
    img[0].clone()
}

/// Sign pattern of a weight-two diagonal form: `d₁ < 0 < d₂, …, d_m`.
pub fn expected_signature(form: &QuadFormDiag) -> Option<(usize, usize)> {
    let neg = form.diag().iter().filter(|x| x.is_negative()).count();
    (neg == 1 && form.diag()[0].is_negative()).then(|| (form.m() - 1, 1))
}

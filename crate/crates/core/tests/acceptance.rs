//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use halftwist::clifford::{clifford_mul, conj_coeffs, CliffordElem, QuadFormDiag};
use halftwist::field::{CMFieldDescriptor, CMType, Rational};
use halftwist::hodge::{half_twist, tate_twist, tensor_k_halfmodule, HodgeTable};
use halftwist::ks::{full_report, summand_table, Level};
use halftwist::linalg::{commutant, MatrixQ, SparseVec, SubspaceQ};
use halftwist::polar::{
    explicit_period, hermitian_form, positivity_oracle, random_transport, random_unitary_transport, signature_h,
    twisted_polarization, unitary_lie_algebra, PolarizedSetup, ORACLE_TOL,
};
use halftwist::quat::{hilbert_symbol, norm_eq_search, relevant_places, QuatAlg};
use halftwist::sample::{random_hodge_table, random_weight_two_form};
use halftwist::spin::{self, build_f_basis, build_s_from_all_blades, operator_matrix, EndStructure, SpinDecomposition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_2024;

type Outcome = Result<String, String>;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `d ∈ {1,2,3,7}`, `m ∈ {2,…,5}`, three diagonals with `d₁ < 0 < d₂, …, d_m`.
fn grid() -> Vec<Arc<QuadFormDiag>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::new();
    for d in [1u64, 2, 3, 7] {
        for m in 2..=5usize {
            let ones: Vec<i64> = (0..m).map(|i| if i == 0 { -1 } else { 1 }).collect();
            let mixed: Vec<i64> = [-2i64, 3, 1, 5, 7][..m].to_vec();
            out.push(Arc::new(QuadFormDiag::from_ints(d, &ones).unwrap()));
            out.push(Arc::new(QuadFormDiag::from_ints(d, &mixed).unwrap()));
            out.push(Arc::new(random_weight_two_form(&mut rng, d, m, 9)));
        }
    }
    out
}

fn pascal(n: usize) -> Vec<Vec<u128>> {
    let mut rows: Vec<Vec<u128>> = vec![vec![1]];
    for r in 1..=n {
        let prev = &rows[r - 1];
        let row = (0..=r).map(|k| if k == 0 || k == r { 1 } else { prev[k - 1] + prev[k] }).collect();
        rows.push(row);
    }
    rows
}

fn choose(table: &[Vec<u128>], n: i64, k: i64) -> u128 {
    if n < 0 || k < 0 || k > n {
        0
    } else {
        table[n as usize][k as usize]
    }
}

fn delta_oracle(form: &QuadFormDiag) -> Rational {
    let m = form.m() as i64;
    let sign = if (m * (m - 1) / 2) % 2 == 0 { 1 } else { -1 };
    let dm = (0..m).fold(q(1), |acc, _| acc * q(form.d() as i64));
    q(sign) * dm * form.diag().iter().fold(q(1), |acc, x| acc * x)
}

// 1
fn clifford_relations(forms: &[Arc<QuadFormDiag>]) -> Outcome {
    let mut checked = 0;
    for form in forms {
        let m = form.m();
        let d = form.d();
        let fb = build_f_basis(form).map_err(|e| e.to_string())?;
        let zero = CliffordElem::zero(form, halftwist::clifford::CoeffRing::Rational);
        let one = CliffordElem::scalar(form, q(1));
        let mul = |a: &CliffordElem, b: &CliffordElem| clifford_mul(a, b).unwrap();
        for j in 1..=2 * m {
            ensure(mul(fb.elem(j), fb.elem(j)) == zero, || format!("f_{j}² ≠ 0 for {form:?}"))?;
            for k in (j + 1)..=2 * m {
                let anti = &mul(fb.elem(j), fb.elem(k)) + &mul(fb.elem(k), fb.elem(j));
                let want = if k == j + m { &one } else { &zero };
                ensure(anti == *want, || format!("f_{j} f_{k} + f_{k} f_{j} wrong for {form:?}"))?;
                checked += 1;
            }
        }
        for i in 1..=m {
            let ddi = q(d as i64) * &form.diag()[i - 1];
            ensure(conj_coeffs(fb.elem(i)) == fb.elem(m + i).scale_rational(&(q(1) / &ddi)), || {
                format!("conj(f_{i}) wrong for {form:?}")
            })?;
            ensure(conj_coeffs(fb.elem(m + i)) == fb.elem(i).scale_rational(&ddi), || {
                format!("conj(f_{}) wrong for {form:?}", m + i)
            })?;
        }
        let delta = delta_oracle(form);
        let (f, fbar) = (fb.f(), fb.fbar());
        ensure(mul(&mul(f, fbar), f) == f.scale_rational(&delta), || format!("f f̄ f ≠ δ f for {form:?}"))?;
        ensure(mul(&mul(fbar, f), fbar) == fbar.scale_rational(&delta), || format!("f̄ f f̄ ≠ δ f̄ for {form:?}"))?;
        // z = e₁⋯e_{2m} multiplied out generator by generator
        let z = (1..=2 * m).fold(one.clone(), |acc, k| mul(&acc, &CliffordElem::generator(form, k)));
        let p = form.diag().iter().fold(q(1), |acc, x| acc * x);
        let want = q(if m % 2 == 0 { 1 } else { -1 }) * (0..m).fold(q(1), |acc, _| acc * q(d as i64)) * &p * &p;
        ensure(mul(&z, &z) == CliffordElem::scalar(form, want), || format!("z² wrong for {form:?}"))?;
    }
    Ok(format!("{} forms, {checked} anticommutators", forms.len()))
}

// 2
fn spin_dimensions(forms: &[Arc<QuadFormDiag>], decs: &BTreeMap<usize, SpinDecomposition>) -> Outcome {
    let binom = pascal(8);
    for (idx, form) in forms.iter().enumerate() {
        let m = form.m();
        let dec = &decs[&idx];
        ensure(dec.s.dim() == 1 << (m + 1), || format!("dim S = {} for {form:?}", dec.s.dim()))?;
        let mut total = SubspaceQ::new(dec.s.ambient());
        for (i, p) in dec.parts.iter().enumerate() {
            let want = 2 * choose(&binom, m as i64, i as i64) as usize;
            ensure(p.dim() == want, || format!("dim S_{i} = {} ≠ {want} for {form:?}", p.dim()))?;
            total = total.sum(p).unwrap();
        }
        ensure(total.dim() == dec.s.dim() && dec.s.contains(&total).unwrap(), || format!("⊕Sᵢ ≠ S for {form:?}"))?;
        if m <= 3 {
            let literal = build_s_from_all_blades(&dec.fbasis).unwrap();
            ensure(literal.contains(&dec.s).unwrap() && literal.dim() == dec.s.dim(), || {
                format!("closure differs from blade span for {form:?}")
            })?;
        }
    }
    Ok(format!("{} forms with m ≤ 5", forms.len()))
}

// 3
fn endo_relations(forms: &[Arc<QuadFormDiag>], decs: &BTreeMap<usize, SpinDecomposition>) -> Outcome {
    for (idx, form) in forms.iter().enumerate() {
        let dec = &decs[&idx];
        let (a, b) = (&dec.endo.alpha, &dec.endo.beta);
        let n = dec.s.dim();
        let delta = delta_oracle(form);
        let dd = q(form.d() as i64) * &delta;
        ensure(a * a == MatrixQ::scalar(n, &delta), || format!("α² ≠ δ for {form:?}"))?;
        ensure(b * b == MatrixQ::scalar(n, &dd), || format!("β² ≠ dδ for {form:?}"))?;
        ensure(a * b == -&(b * a), || format!("αβ ≠ −βα for {form:?}"))?;
    }
    Ok(format!("{} forms", forms.len()))
}

fn uh_operators(dec: &SpinDecomposition, part: usize) -> Vec<MatrixQ> {
    let form = dec.fbasis.form();
    let gens = spin::uh_generators(form).unwrap();
    gens.elems
        .iter()
        .map(|xi| {
            operator_matrix(&dec.parts[part], |v: &SparseVec| {
                let x = CliffordElem::from_vector(form, v)?;
                Ok(clifford_mul(xi, &x)?.to_vector()?)
            })
            .unwrap()
            .expect("u(H) preserves the part")
        })
        .collect()
}

/// Idempotent `E ∉ {0, 1}` among small combinations of a commutant basis.
fn find_idempotent(basis: &[MatrixQ]) -> Option<MatrixQ> {
    let coeffs: Vec<Rational> =
        [(-1, 1), (-1, 2), (0, 1), (1, 2), (1, 1)].iter().map(|&(a, b)| Rational::new(a.into(), b.into())).collect();
    let n = basis[0].rows();
    let k = basis.len();
    let total = coeffs.len().pow(k as u32);
    (0..total).find_map(|mut code| {
        let mut e = MatrixQ::zeros(n, n);
        for b in basis {
            e = &e + &b.scale(&coeffs[code % coeffs.len()]);
            code /= coeffs.len();
        }
        let r = e.rank();
        (&e * &e == e && r > 0 && r < n).then_some(e)
    })
}

// 4
fn invariance(forms: &[Arc<QuadFormDiag>], decs: &BTreeMap<usize, SpinDecomposition>) -> Outcome {
    let mut parts_checked = 0;
    for (idx, form) in forms.iter().enumerate() {
        let m = form.m();
        if m > 4 {
            continue;
        }
        let inv = decs[&idx].invariance.as_ref().ok_or("invariance data missing")?;
        for p in &inv.parts {
            let want = if 2 * p.index == m { 4 } else { 2 };
            ensure(p.commutant_dim == want, || {
                format!("End(S_{}) has dim {} ≠ {want} for {form:?}", p.index, p.commutant_dim)
            })?;
            parts_checked += 1;
        }
    }
    let form = Arc::new(QuadFormDiag::from_ints(1, &[-1, 1]).unwrap());
    let dec = spin::decompose(&form, true, false).map_err(|e| e.to_string())?;
    let ops = uh_operators(&dec, 1);
    let basis = commutant(&ops, dec.parts[1].dim()).map_err(|e| e.to_string())?;
    ensure(basis.len() == 4, || format!("commutant of S_1 has dim {}", basis.len()))?;
    let e = find_idempotent(&basis).ok_or("no idempotent found in the m=2, d=1 commutant")?;
    ensure(ops.iter().all(|x| &e * x == x * &e), || "idempotent does not commute with u(H)".into())?;
    ensure(e.rank() == 2, || format!("idempotent image has dim {}, expected C(2,1) = 2", e.rank()))?;
    let lib = &dec.invariance.as_ref().unwrap().parts[1].structure;
    ensure(
        matches!(lib, EndStructure::Quaternion { split: true, idempotent_rank: Some(2), .. }),
        || format!("library classification {lib:?}"),
    )?;
    Ok(format!("{parts_checked} summands across m ∈ {{2,3,4}}; m=2,d=1 idempotent of rank 2"))
}

// 5
fn split_consistency() -> Outcome {
    let forms: Vec<(u64, Vec<i64>)> = vec![
        (1, vec![-1, 1]),
        (1, vec![-1, 3]),
        (1, vec![-5, 1]),
        (2, vec![-3, 1]),
        (2, vec![-1, 5]),
        (3, vec![-7, 1]),
        (3, vec![-2, 1]),
        (3, vec![-1, 1, 1, 1, 1, 1]),
        (7, vec![-1, 2, 1, 1, 1, 1]),
        (7, vec![-11, 1]),
        (7, vec![-5, 1]),
        (5, vec![-3, 2]),
        (2, vec![-1, 1, 3, 1, 1, 1]),
        (1, vec![-2, 3, 1, 1, 1, 5]),
    ];
    let mut splits = 0;
    for (d, diag) in &forms {
        let form = QuadFormDiag::from_ints(*d, diag).unwrap();
        assert_eq!(form.m() % 4, 2);
        let delta = delta_oracle(&form);
        let full = QuatAlg::new(delta.clone(), q(*d as i64) * &delta).unwrap();
        let n = -form.diag().iter().fold(q(1), |acc, x| acc * x);
        let reduced = QuatAlg::new(q(-(*d as i64)), n.clone()).unwrap();
        let (a, b) = (full.is_split().unwrap(), reduced.is_split().unwrap());
        ensure(a == b, || format!("verdicts differ for d={d}, diag={diag:?}"))?;
        if a {
            splits += 1;
            let (x, y) = norm_eq_search(&n, *d, 200).ok_or_else(|| format!("no witness within 200 for d={d}, n={n}"))?;
            ensure(&x * &x + q(*d as i64) * &y * &y == n, || "witness arithmetic".into())?;
        }
    }
    ensure(splits > 0 && splits < forms.len(), || format!("{splits} split forms: need both verdicts represented"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    for _ in 0..500 {
        let mut draw = || {
            let num = rng.gen_range(1..=600i64) * if rng.gen_bool(0.5) { -1 } else { 1 };
            Rational::new(num.into(), rng.gen_range(1..=40i64).into())
        };
        let (a, b) = (draw(), draw());
        let product: i64 = relevant_places(&[&a, &b])
            .unwrap()
            .into_iter()
            .map(|v| hilbert_symbol(&a, &b, v).unwrap() as i64)
            .product();
        ensure(product == 1, || format!("reciprocity fails for ({a}, {b})"))?;
    }
    Ok(format!("{} forms ({splits} split, witnesses found), 500 reciprocity pairs", forms.len()))
}

/// Closed-form twists: `Σ` entries move to `(p − n, q)`, `Σ̄` entries to `(p, q − n)`.
/// A positive twist exists iff no `Σ` entry has `0 ≤ p < n`.
fn oracle_half_twist(t: &HodgeTable, n: i64) -> Option<HodgeTable> {
    let sigma = t.cm_type();
    if n > 0 && t.entries().any(|(j, p, _, _)| sigma.contains(j) && (0..n).contains(&p)) {
        return None;
    }
    let entries = t.entries().map(|(j, p, qq, k)| if sigma.contains(j) { (j, p - n, qq, k) } else { (j, p, qq - n, k) });
    Some(HodgeTable::new(sigma.clone(), t.weight() - n, entries.collect::<Vec<_>>()).unwrap())
}

fn oracle_tate(t: &HodgeTable, n: i64) -> HodgeTable {
    let entries: Vec<_> = t.entries().map(|(j, p, qq, k)| (j, p - n, qq - n, k)).collect();
    HodgeTable::new(t.cm_type().clone(), t.weight() - 2 * n, entries).unwrap()
}

fn random_tables() -> Vec<HodgeTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    (0..200).map(|_| random_hodge_table(&mut rng, 3, 4, 6)).collect()
}

// 6
fn twist_algebra(tables: &[HodgeTable]) -> Outcome {
    let mut compositions = 0;
    for t in tables {
        for n in -3i64..=3 {
            let lib = half_twist(t, n).ok();
            ensure(lib == oracle_half_twist(t, n), || format!("half_twist(·, {n}) differs from oracle on {t}"))?;
            if let Some(tn) = &lib {
                ensure(tn.weight() == t.weight() - n && tn.total_dim() == t.total_dim(), || "weight bookkeeping".into())?;
            }
            for k in -2i64..=2 {
                ensure(tate_twist(t, k) == oracle_tate(t, k), || format!("tate_twist(·, {k}) differs from oracle"))?;
                ensure(tate_twist(t, k).weight() == t.weight() - 2 * k, || "Tate weight".into())?;
                if n <= 0 {
                    ensure(half_twist(&tate_twist(t, k), n).ok() == lib.as_ref().map(|x| tate_twist(x, k)), || {
                        format!("Tate {k} and half twist {n} do not commute")
                    })?;
                }
            }
            for b in -3i64..=3 {
                if let (Some(x), Some(direct)) = (&lib, half_twist(t, n + b).ok()) {
                    if let Ok(two) = half_twist(x, b) {
                        ensure(two == direct, || format!("composition ({n}, {b}) fails"))?;
                        compositions += 1;
                    }
                }
            }
        }
    }
    let k = HodgeTable::trivial(CMType::standard(CMFieldDescriptor::quadratic()));
    let twice = half_twist(&half_twist(&k, -1).unwrap(), -1).unwrap();
    let tate = tate_twist(&k, -1);
    ensure(twice != tate && twice.weight() == tate.weight(), || "K(−1) = (K_{−1/2})_{−1/2}".into())?;
    ensure(twice.mult(1, 2, 0) == 1 && tate.mult(1, 1, 1) == 1, || "witness types".into())?;
    Ok(format!("{} tables, {compositions} compositions; K(-1) has type (1,1), (K_-1/2)_-1/2 has (2,0)", tables.len()))
}

// 7
fn tensor_identity(tables: &[HodgeTable]) -> Outcome {
    let mut admissible = 0;
    for t in tables {
        let h = tensor_k_halfmodule(t);
        ensure(Some(&h.diag) == oracle_half_twist(t, -1).as_ref(), || format!("diag part wrong on {t}"))?;
        if let Some(pos) = oracle_half_twist(t, 1) {
            admissible += 1;
            ensure(h.conj == oracle_tate(&pos, -1), || format!("conj part wrong on {t}"))?;
        }
    }
    ensure(admissible > 0, || "no admissible tables".into())?;
    Ok(format!("{} tables, {admissible} admissible for the conj identity", tables.len()))
}

// 8
fn summand_identity(forms: &[Arc<QuadFormDiag>], decs: &BTreeMap<usize, SpinDecomposition>) -> Outcome {
    let binom = pascal(16);
    let mut cases = 0;
    for m in 1..=16usize {
        let v = HodgeTable::weight_two_k3_type(m);
        for i in 1..m {
            let t = summand_table(&v, i).map_err(|e| e.to_string())?;
            let got = (t.mult(1, 1, 0) as u128, t.mult(1, 0, 1) as u128);
            let want = (choose(&binom, m as i64 - 1, i as i64 - 1), choose(&binom, m as i64 - 1, i as i64));
            ensure(got == want, || format!("m={m}, i={i}: {got:?} ≠ {want:?}"))?;
            ensure(got.0 + got.1 == choose(&binom, m as i64, i as i64), || format!("m={m}, i={i}: sum"))?;
            cases += 1;
        }
    }
    let mut cross = 0;
    for (idx, form) in forms.iter().enumerate() {
        let m = form.m();
        let v = HodgeTable::weight_two_k3_type(m);
        for (i, p) in decs[&idx].parts.iter().enumerate() {
            let t = summand_table(&v, i).map_err(|e| e.to_string())?;
            ensure((t.mult(1, 1, 0) + t.mult(1, 0, 1)) as usize * 2 == p.dim(), || {
                format!("S_{i} of {form:?}: Hodge dims vs computed dim {}", p.dim())
            })?;
            cross += 1;
        }
    }
    Ok(format!("{cases} (m, i) pairs up to m = 16; {cross} summands matched against spin"))
}

// 9
fn m10_instance() -> Outcome {
    let diag: Vec<i64> = (0..10).map(|i| if i == 0 { -1 } else { 1 }).collect();
    let form = QuadFormDiag::from_ints(3, &diag).unwrap();
    let r = full_report(&form, &HodgeTable::weight_two_k3_type(10), Level::Fast, 50, false).map_err(|e| e.to_string())?;
    ensure(r.dim_v == 20 && r.h20 == 1 && r.h11 == 18, || format!("dim V {}, h20 {}, h11 {}", r.dim_v, r.h20, r.h11))?;
    ensure(r.summands[1].dim == "20", || format!("dim S_1 = {}", r.summands[1].dim))?;
    ensure(r.summands[1].hodge_dims == (1, 9), || format!("S_1 eigenspace dims {:?}", r.summands[1].hodge_dims))?;
    ensure(r.ball_dim == 9, || format!("ball dim {}", r.ball_dim))?;
    Ok("dim V 20, h20 1, h11 18, dim S_1 20, eigenspaces (1, 9), ball dim 9".into())
}

// 10
fn polarization(forms: &[Arc<QuadFormDiag>]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 10);
    for form in forms {
        let s = PolarizedSetup::from_form(form);
        let sig = signature_h(&s).map_err(|e| e.to_string())?;
        ensure(sig == (form.m() - 1, 1), || format!("signature {sig:?} for {form:?}"))?;
        let gj = twisted_polarization(&s);
        ensure(gj.transpose() == -&gj && s.is_k_compatible(&gj), || format!("GJ not skew/K-compatible for {form:?}"))?;
    }
    let mut transports = 0;
    for k in 0..50 {
        let form = &forms[(k * 7) % forms.len()];
        let s = PolarizedSetup::from_form(form);
        let p = random_transport(&mut rng, form.m(), form.d(), 2);
        let t = s.transport(&p).map_err(|e| e.to_string())?;
        let h = hermitian_form(&t);
        ensure(h.conj_transpose() == h, || "transported H is not hermitian".into())?;
        ensure(h == hermitian_form(&s).congruence(&p).unwrap(), || "H does not transform by P*HP".into())?;
        ensure(signature_h(&t).map_err(|e| e.to_string())? == (form.m() - 1, 1), || "signature changed".into())?;
        let gj = twisted_polarization(&t);
        ensure(gj.transpose() == -&gj && t.is_k_compatible(&gj), || "transported GJ".into())?;
        transports += 1;
    }
    let mut oracle_runs = 0;
    let mut worst = f64::INFINITY;
    for form in forms.iter().filter(|f| f.m() <= 4).step_by(4) {
        let s = PolarizedSetup::from_form(form);
        let uh = unitary_lie_algebra(&s);
        ensure(uh.len() == form.m() * form.m(), || "dim u(H) ≠ m²".into())?;
        for _ in 0..3 {
            let v = random_unitary_transport(&mut rng, &s, &uh, &explicit_period(form.m(), form.d()), 0.5);
            let r = positivity_oracle(&s, &v).map_err(|e| e.to_string())?;
            ensure(r.passes(), || format!("positivity fails: {r:?}"))?;
            worst = worst.min(r.min_eig_weight_two).min(r.min_eig_half_twist);
            oracle_runs += 1;
        }
    }
    ensure(oracle_runs >= 20, || format!("only {oracle_runs} oracle runs"))?;
    Ok(format!(
        "{} signatures, {transports} transports exact, {oracle_runs} positivity runs (min rel. eigenvalue {worst:.3e} > {ORACLE_TOL:e})",
        forms.len()
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let forms = grid();
    let mut failures = 0;
    let mut report = |id: usize, name: &str, tol: &str, budget: Duration, f: &mut dyn FnMut() -> Outcome| {
        let t0 = Instant::now();
        let res = f();
        let dt = t0.elapsed();
        let res = match res {
            Ok(_) if dt > budget => Err(format!("took {dt:.1?}, budget {budget:?}")),
            other => other,
        };
        match res {
            Ok(msg) => println!("PASS [{id:>2}] {name} (tolerance: {tol}; {dt:.2?}): {msg}"),
            Err(msg) => {
                failures += 1;
                println!("FAIL [{id:>2}] {name} (tolerance: {tol}; {dt:.2?}): {msg}");
            }
        }
    };

    report(1, "Clifford relations on the grid", "exact", Duration::from_secs(60), &mut || clifford_relations(&forms));

    let mut decs = BTreeMap::new();
    let mut build_err = None;
    report(2, "spin subspace dimensions", "exact", Duration::from_secs(180), &mut || {
        for (idx, form) in forms.iter().enumerate() {
            match spin::decompose(form, form.m() <= 4, false) {
                Ok(dec) => {
                    decs.insert(idx, dec);
                }
                Err(e) => {
                    build_err = Some(format!("{form:?}: {e}"));
                    return Err(build_err.clone().unwrap());
                }
            }
        }
        spin_dimensions(&forms, &decs)
    });
    let have_decs = build_err.is_none();
    let missing = || Err::<String, String>("spin decomposition unavailable".into());

    report(3, "endomorphism operators α, β", "exact", Duration::from_secs(60), &mut || {
        if have_decs { endo_relations(&forms, &decs) } else { missing() }
    });
    report(4, "u(H) invariance and commutant dimensions", "exact", Duration::from_secs(180), &mut || {
        if have_decs { invariance(&forms, &decs) } else { missing() }
    });
    report(5, "split classification consistency", "exact", Duration::from_secs(60), &mut split_consistency);
    let tables = random_tables();
    report(6, "twist algebra on 200 random tables", "exact", Duration::from_secs(60), &mut || twist_algebra(&tables));
    report(7, "tensor with K_-1/2 identity", "exact", Duration::from_secs(60), &mut || tensor_identity(&tables));
    report(8, "summand Hodge numbers", "exact", Duration::from_secs(10), &mut || {
        if have_decs { summand_identity(&forms, &decs) } else { missing() }
    });
    report(9, "m=10, d=3 instance", "exact", Duration::from_secs(60), &mut m10_instance);
    report(10, "hermitian form, signature and positivity", "exact; oracle 1e-9", Duration::from_secs(120), &mut || {
        polarization(&forms)
    });

    println!("{} of 10 criteria passed in {:.1?}", 10 - failures, start.elapsed());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

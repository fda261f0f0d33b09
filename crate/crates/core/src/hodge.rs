//! CM-type Hodge structures as per-embedding bigraded multiplicity tables.
//!
//! A table records `dim V^{p,q}_σ` for every embedding `σ` of the CM-field.
//! Twists and exterior powers act on these numbers only; no lattice or
//! period data is stored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{CMFieldDescriptor, CMType, FieldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HodgeError {
    #[error("positive half twist is not defined: embedding {embedding} carries type (0,{weight})")]
    Inadmissible { embedding: usize, weight: i64 },
    #[error("invalid table: {0}")]
    Invalid(String),
    #[error("table parse error: {0}")]
    Parse(String),
    #[error("multiplicity overflow in exterior power")]
    Overflow,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Multiplicity table of a CM-type Hodge structure.
///
/// Only nonzero multiplicities are stored, so two tables compare equal
/// exactly when their character data agree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HodgeTable {
    cm_type: CMType,
    weight: i64,
    mult: BTreeMap<(usize, i64, i64), u64>,
    effective: bool,
}

impl HodgeTable {
    /// Builds a table from `(embedding, p, q, dim)` entries; duplicates are summed.
    ///
    /// Embedding indices are checked here. The Hodge-theoretic invariants are
    /// left to [`validate`] so that broken tables can still be diagnosed.
    pub fn new(
        cm_type: CMType,
        weight: i64,
        entries: impl IntoIterator<Item = (usize, i64, i64, u64)>,
    ) -> Result<Self, HodgeError> {
        let field = cm_type.field();
        let mut mult = BTreeMap::new();
        for (j, p, q, n) in entries {
            field.check_index(j)?;
            if n > 0 {
                let slot: &mut u64 = mult.entry((j, p, q)).or_insert(0);
                *slot = slot.checked_add(n).ok_or(HodgeError::Overflow)?;
            }
        }
        Ok(Self::from_map(cm_type, weight, mult))
    }

    fn from_map(cm_type: CMType, weight: i64, mut mult: BTreeMap<(usize, i64, i64), u64>) -> Self {
        mult.retain(|_, n| *n > 0);
        let effective = mult.keys().all(|&(_, p, q)| p >= 0 && q >= 0);
        HodgeTable { cm_type, weight, mult, effective }
    }

    /// The unit structure `K`: type `(0,0)` once on every embedding.
    pub fn trivial(cm_type: CMType) -> Self {
        let mult = cm_type.field().embeddings().map(|j| ((j, 0, 0), 1)).collect();
        Self::from_map(cm_type, 0, mult)
    }

    /// `K_{-1/2}`: types `(1,0)` on `Σ` and `(0,1)` on `Σ̄`.
    pub fn k_minus_half(cm_type: CMType) -> Self {
        half_twist(&Self::trivial(cm_type), -1).expect("negative twists are always defined")
    }

    /// Weight-2 structure over an imaginary quadratic field with `h^{2,0} = 1`
    /// and `h^{1,1} = m − 1` on the chosen embedding.
    pub fn weight_two_k3_type(m: usize) -> Self {
        let sigma = CMType::standard(CMFieldDescriptor::quadratic());
        let m = m as u64;
        Self::new(sigma, 2, [(1, 2, 0, 1), (1, 1, 1, m - 1), (2, 0, 2, 1), (2, 1, 1, m - 1)])
            .expect("embeddings 1 and 2 exist")
    }

    /// The empty structure `0` of the given weight.
    pub fn empty(cm_type: CMType, weight: i64) -> Self {
        Self::from_map(cm_type, weight, BTreeMap::new())
    }

    pub fn field(&self) -> CMFieldDescriptor {
        self.cm_type.field()
    }

    pub fn cm_type(&self) -> &CMType {
        &self.cm_type
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn effective(&self) -> bool {
        self.effective
    }

    pub fn mult(&self, j: usize, p: i64, q: i64) -> u64 {
        self.mult.get(&(j, p, q)).copied().unwrap_or(0)
    }

    /// Nonzero entries `(embedding, p, q, dim)` in sorted order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, i64, i64, u64)> + '_ {
        self.mult.iter().map(|(&(j, p, q), &n)| (j, p, q, n))
    }

    /// `Σ_{p,q} mult(j,p,q)`.
    pub fn embedding_total(&self, j: usize) -> u64 {
        self.mult.range((j, i64::MIN, i64::MIN)..=(j, i64::MAX, i64::MAX)).map(|(_, n)| n).sum()
    }

    /// `dim_K V` when every embedding carries the same total.
    pub fn dim_k(&self) -> Option<u64> {
        let mut totals = self.field().embeddings().map(|j| self.embedding_total(j));
        let first = totals.next()?;
        totals.all(|t| t == first).then_some(first)
    }

    /// `dim_Q V = Σ_j Σ_{p,q} mult(j,p,q)`.
    pub fn total_dim(&self) -> u64 {
        self.mult.values().sum()
    }

    /// `dim V^{p,q} = Σ_j mult(j,p,q)`, the rational Hodge number.
    pub fn hodge_number(&self, p: i64, q: i64) -> u64 {
        self.field().embeddings().map(|j| self.mult(j, p, q)).sum()
    }

    /// Same character data read against another CM-type.
    pub fn with_cm_type(&self, cm_type: CMType) -> Result<Self, HodgeError> {
        if cm_type.field() != self.field() {
            return Err(HodgeError::Invalid("CM-type belongs to a different field".into()));
        }
        Ok(HodgeTable { cm_type, ..self.clone() })
    }

    fn map_entries(&self, weight: i64, f: impl Fn(usize, i64, i64) -> (i64, i64)) -> Self {
        let mut mult = BTreeMap::new();
        for (&(j, p, q), &n) in &self.mult {
            let (p2, q2) = f(j, p, q);
            *mult.entry((j, p2, q2)).or_insert(0) += n;
        }
        Self::from_map(self.cm_type.clone(), weight, mult)
    }
}

/// Outcome of one invariant check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    pub offending: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<InvariantCheck>,
    /// Non-fatal findings, such as negative `p` or `q`.
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InvariantCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name)?;
            for o in &c.offending {
                writeln!(f, "    {o}")?;
            }
        }
        for w in &self.warnings {
            writeln!(f, "WARN {w}")?;
        }
        Ok(())
    }
}

/// Checks the weight, conjugation-symmetry and equal-multiplicity invariants.
pub fn validate(t: &HodgeTable) -> ValidationReport {
    let field = t.field();

    let weight: Vec<String> = t
        .entries()
        .filter(|&(_, p, q, _)| p + q != t.weight)
        .map(|(j, p, q, n)| format!("embedding {j}: ({p},{q}) x{n} but weight is {}", t.weight))
        .collect();

    let symmetry: Vec<String> = t
        .entries()
        .filter_map(|(j, p, q, n)| {
            let c = field.conj(j);
            let m = t.mult(c, q, p);
            (m != n).then(|| format!("mult({j},{p},{q}) = {n} but mult({c},{q},{p}) = {m}"))
        })
        .collect();

    let totals: Vec<(usize, u64)> = field.embeddings().map(|j| (j, t.embedding_total(j))).collect();
    let distinct: BTreeSet<u64> = totals.iter().map(|&(_, n)| n).collect();
    let equal = if distinct.len() <= 1 {
        Vec::new()
    } else {
        totals.iter().map(|(j, n)| format!("embedding {j}: total {n}")).collect()
    };

    let warnings = if t.effective {
        Vec::new()
    } else {
        t.entries()
            .filter(|&(_, p, q, _)| p < 0 || q < 0)
            .map(|(j, p, q, _)| format!("not effective: embedding {j} has type ({p},{q})"))
            .collect()
    };

    let check = |name, offending: Vec<String>| InvariantCheck { name, passed: offending.is_empty(), offending };
    ValidationReport {
        checks: vec![
            check("weight", weight),
            check("conjugation symmetry", symmetry),
            check("equal multiplicity", equal),
        ],
        warnings,
    }
}

fn negative_step(t: &HodgeTable) -> HodgeTable {
    let sigma = t.cm_type.clone();
    t.map_entries(t.weight + 1, |j, p, q| if sigma.contains(j) { (p + 1, q) } else { (p, q + 1) })
}

fn positive_step(t: &HodgeTable) -> Result<HodgeTable, HodgeError> {
    let sigma = t.cm_type.clone();
    if let Some(j) = sigma.indices().into_iter().find(|&j| t.mult(j, 0, t.weight) > 0) {
        return Err(HodgeError::Inadmissible { embedding: j, weight: t.weight });
    }
    Ok(t.map_entries(t.weight - 1, |j, p, q| if sigma.contains(j) { (p - 1, q) } else { (p, q - 1) }))
}

/// `V_{n/2}`: `n = −1` is the negative half twist (weight `k+1`), `n = +1` the
/// positive one (weight `k−1`); other `n` iterate the unit steps.
pub fn half_twist(t: &HodgeTable, n: i64) -> Result<HodgeTable, HodgeError> {
    let mut out = t.clone();
    for _ in 0..n.unsigned_abs() {
        out = if n < 0 { negative_step(&out) } else { positive_step(&out)? };
    }
    Ok(out)
}

/// `V(n)` with `V(n)^{p,q} = V^{p+n,q+n}`: a class of type `(p,q)` in `V`
/// has type `(p−n, q−n)` in `V(n)`, and the weight drops to `k − 2n`.
pub fn tate_twist(t: &HodgeTable, n: i64) -> HodgeTable {
    t.map_entries(t.weight - 2 * n, |_, p, q| (p - n, q - n))
}

/// The two eigen-submodules of `V ⊗_Q K_{-1/2}` on which `x ⊗ 1` acts as
/// `1 ⊗ x` (`diag`) and as `1 ⊗ x̄` (`conj`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorHalves {
    pub diag: HodgeTable,
    pub conj: HodgeTable,
}

pub fn tensor_k_halfmodule(t: &HodgeTable) -> TensorHalves {
    let sigma = t.cm_type.clone();
    let diag = t.map_entries(t.weight + 1, |j, p, q| if sigma.contains(j) { (p + 1, q) } else { (p, q + 1) });
    let conj = t.map_entries(t.weight + 1, |j, p, q| if sigma.contains(j) { (p, q + 1) } else { (p + 1, q) });
    TensorHalves { diag, conj }
}

/// `∧^i_K V`: per embedding, the coefficient of `z^i` in
/// `Π_{(p,q)} (1 + x^p y^q z)^{mult(σ,p,q)}`. Weight `i·k`.
pub fn ext_power_k(t: &HodgeTable, i: usize) -> Result<HodgeTable, HodgeError> {
    let weight = t.weight * i as i64;
    let mut mult = BTreeMap::new();
    for j in t.field().embeddings() {
        // layer[z] maps (P, Q) to the coefficient of x^P y^Q z^z
        let mut layers: Vec<BTreeMap<(i64, i64), u128>> = vec![BTreeMap::new(); i + 1];
        layers[0].insert((0, 0), 1);
        for (&(_, p, q), &n) in t.mult.range((j, i64::MIN, i64::MIN)..=(j, i64::MAX, i64::MAX)) {
            // (1 + x^p y^q z)^n = Σ_k C(n,k) x^{kp} y^{kq} z^k, truncated at z^i
            let coeffs = binomials(n, i)?;
            let mut next: Vec<BTreeMap<(i64, i64), u128>> = vec![BTreeMap::new(); i + 1];
            for (z, layer) in layers.iter().enumerate() {
                for (&(a, b), &v) in layer {
                    for (k, c) in coeffs.iter().enumerate().take(i - z + 1) {
                        let kk = k as i64;
                        let add = v.checked_mul(*c).ok_or(HodgeError::Overflow)?;
                        let slot = next[z + k].entry((a + kk * p, b + kk * q)).or_insert(0);
                        *slot = slot.checked_add(add).ok_or(HodgeError::Overflow)?;
                    }
                }
            }
            layers = next;
        }
        for ((p, q), v) in std::mem::take(&mut layers[i]) {
            let v = u64::try_from(v).map_err(|_| HodgeError::Overflow)?;
            mult.insert((j, p, q), v);
        }
    }
    Ok(HodgeTable::from_map(t.cm_type.clone(), weight, mult))
}

/// `C(n,0), …, C(n,i)`; entries past `n` are zero.
fn binomials(n: u64, i: usize) -> Result<Vec<u128>, HodgeError> {
    let mut out = vec![0u128; i + 1];
    out[0] = 1;
    for k in 1..=i.min(n as usize) {
        let num = out[k - 1].checked_mul((n - k as u64 + 1) as u128).ok_or(HodgeError::Overflow)?;
        out[k] = num / k as u128;
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryFile {
    embedding: usize,
    p: i64,
    q: i64,
    dim: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    half_degree: usize,
    cm_type: Vec<usize>,
    weight: i64,
    entries: Vec<EntryFile>,
}

impl HodgeTable {
    pub fn from_json(text: &str) -> Result<Self, HodgeError> {
        let file: TableFile = serde_json::from_str(text).map_err(|e| HodgeError::Parse(e.to_string()))?;
        Self::from_value(file)
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<Self, HodgeError> {
        let file: TableFile =
            serde_json::from_value(value.clone()).map_err(|e| HodgeError::Parse(e.to_string()))?;
        Self::from_value(file)
    }

    fn from_value(file: TableFile) -> Result<Self, HodgeError> {
        let field = CMFieldDescriptor::new(file.half_degree)?;
        let sigma = CMType::from_indices(field, &file.cm_type)?;
        Self::new(sigma, file.weight, file.entries.into_iter().map(|e| (e.embedding, e.p, e.q, e.dim)))
    }

    /// Canonical form: entries sorted by `(embedding, p, q)`, zeros omitted.
    pub fn to_json_value(&self) -> serde_json::Value {
        let file = TableFile {
            half_degree: self.field().half_degree(),
            cm_type: self.cm_type.indices(),
            weight: self.weight,
            entries: self.entries().map(|(embedding, p, q, dim)| EntryFile { embedding, p, q, dim }).collect(),
        };
        serde_json::to_value(file).expect("serializable")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("serializable") + "\n"
    }
}

impl fmt::Display for HodgeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "weight {}, CM-type {:?}", self.weight, self.cm_type.indices())?;
        for j in self.field().embeddings() {
            let types: Vec<String> = self
                .mult
                .range((j, i64::MIN, i64::MIN)..=(j, i64::MAX, i64::MAX))
                .map(|(&(_, p, q), n)| format!("({p},{q}):{n}"))
                .collect();
            let side = if self.cm_type.contains(j) { "Σ" } else { "Σ̄" };
            writeln!(f, "  σ{j} [{side}] {}", types.join(" "))?;
        }
        Ok(())
    }
}

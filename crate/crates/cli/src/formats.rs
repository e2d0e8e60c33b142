//! JSON instance files.
//!
//! Classical probabilities are exact rationals written as `"p/q"` strings,
//! complex matrices are row-major lists of `[re, im]` pairs with qubit 1 as
//! the most significant index bit, and subsets are 1-based index lists.

use std::collections::BTreeMap;
use std::path::Path;

use compat_core::classical::{JointTable, MarginalFamily, MarginalTable};
use compat_core::linalg::{ComplexMatrix, DensityMatrix, StateVector};
use compat_core::quantum::ReducedFamily3;
use compat_core::spectra::Spectrum;
use compat_core::{Outcome, Rational, SubsetMask};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Format(msg.into())
}

/// A parsed instance file.
#[derive(Debug, Clone)]
pub enum Instance {
    Classical(MarginalFamily),
    Quantum3(ReducedFamily3),
    QuantumN { n: usize, states: BTreeMap<SubsetMask, DensityMatrix> },
    Spectra { criterion: Option<String>, spectra: Vec<Vec<f64>>, fermions: Option<usize> },
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Classical(_) => "classical_family",
            Instance::Quantum3(_) => "quantum_family3",
            Instance::QuantumN { .. } => "quantum_family_n",
            Instance::Spectra { .. } => "spectra",
        }
    }
}

/// Raw file contents plus the parsed value.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub value: Value,
    pub digest: String,
}

pub fn load(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    let digest = digest(&value);
    Ok(Loaded { value, digest })
}

/// SHA-256 of the canonical serialization (sorted keys, no whitespace).
pub fn digest(value: &Value) -> String {
    // serde_json's default map is ordered by key, so compact output is canonical.
    let canonical = serde_json::to_string(value).expect("JSON values serialize");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn parse_instance(value: &Value) -> Result<Instance> {
    let obj = value.as_object().ok_or_else(|| bad("instance file must be a JSON object"))?;
    match str_field(obj, "kind")? {
        "classical_family" => parse_classical(obj).map(Instance::Classical),
        "quantum_family3" => parse_quantum3(obj).map(Instance::Quantum3),
        "quantum_family_n" => {
            let n = usize_field(obj, "n")?;
            Ok(Instance::QuantumN { n, states: parse_matrices(obj, n)? })
        }
        "spectra" => parse_spectra(obj),
        other => Err(bad(format!("unknown instance kind {other:?}"))),
    }
}

fn str_field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a str> {
    obj.get(key).and_then(Value::as_str).ok_or_else(|| bad(format!("missing string field {key:?}")))
}

fn usize_field(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| bad(format!("missing non-negative integer field {key:?}")))
}

fn array_field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Vec<Value>> {
    obj.get(key).and_then(Value::as_array).ok_or_else(|| bad(format!("missing array field {key:?}")))
}

/// `"p/q"` (or a bare integer `"p"`) with `q > 0` and `0 ≤ p/q ≤ 1`.
pub fn parse_probability(s: &str) -> Result<Rational> {
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad(format!("malformed rational {s:?}")))?;
    let q: BigInt = q.parse().map_err(|_| bad(format!("malformed rational {s:?}")))?;
    if !q.is_positive() {
        return Err(bad(format!("rational {s:?} needs a positive denominator")));
    }
    let r = Rational::new(p, q);
    if r.is_negative() || r > Rational::one() {
        return Err(bad(format!("probability {s:?} outside [0, 1]")));
    }
    Ok(r)
}

pub fn parse_subset(v: &Value, n: usize) -> Result<SubsetMask> {
    let items = v.as_array().ok_or_else(|| bad("subset must be a list of 1-based indices"))?;
    let mut idx = Vec::with_capacity(items.len());
    for it in items {
        let i = it.as_u64().ok_or_else(|| bad(format!("subset entry {it} is not an index")))? as usize;
        if i == 0 || i > n {
            return Err(bad(format!("subset index {i} outside 1..={n}")));
        }
        if idx.contains(&i) {
            return Err(bad(format!("subset index {i} repeated")));
        }
        idx.push(i);
    }
    Ok(SubsetMask::from_indices(&idx)?)
}

pub fn subset_json(s: SubsetMask) -> Value {
    json!(s.to_vec())
}

fn parse_classical(obj: &Map<String, Value>) -> Result<MarginalFamily> {
    let n = usize_field(obj, "n")?;
    let mut family = MarginalFamily::new(n)?;
    for m in array_field(obj, "marginals")? {
        let m = m.as_object().ok_or_else(|| bad("each marginal must be an object"))?;
        let subset = parse_subset(m.get("subset").ok_or_else(|| bad("marginal without \"subset\""))?, n)?;
        let table =
            m.get("table").and_then(Value::as_object).ok_or_else(|| bad("marginal without \"table\" object"))?;
        let k = subset.len();
        let mut values: Vec<Option<Rational>> = vec![None; 1 << k];
        for (key, v) in table {
            if key.len() != k || !key.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(bad(format!("table key {key:?} on {subset} must be a {k}-bit string")));
            }
            // Character k is the value of the k-th smallest member: bit k of the packed index.
            let idx = key.bytes().enumerate().fold(0usize, |acc, (j, b)| acc | (((b - b'0') as usize) << j));
            let s = v.as_str().ok_or_else(|| bad(format!("probability for {key:?} must be a \"p/q\" string")))?;
            values[idx] = Some(parse_probability(s)?);
        }
        let values: Vec<Rational> = values
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| bad(format!("table on {subset} is missing entries")))?;
        family.insert(MarginalTable::new(n, subset, values)?)?;
    }
    if family.is_empty() {
        return Err(bad("classical family has no marginals"));
    }
    Ok(family)
}

fn bitstring(bits: usize, k: usize) -> String {
    (0..k).map(|j| if bits >> j & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn marginal_json(t: &MarginalTable) -> Value {
    let k = t.subset().len();
    let table: Map<String, Value> =
        t.values().iter().enumerate().map(|(i, v)| (bitstring(i, k), Value::String(v.to_string()))).collect();
    json!({ "subset": subset_json(t.subset()), "table": table })
}

pub fn classical_family_json(f: &MarginalFamily) -> Value {
    json!({
        "kind": "classical_family",
        "n": f.n(),
        "marginals": f.tables().map(marginal_json).collect::<Vec<_>>(),
    })
}

/// `{"kind": "joint_table", "n": n, "table": {"x_1…x_n": "p/q", …}}`.
pub fn joint_json(p: &JointTable) -> Value {
    let table: Map<String, Value> =
        Outcome::all(p.n()).map(|x| (x.to_string(), Value::String(p.eval(x).to_string()))).collect();
    json!({ "kind": "joint_table", "n": p.n(), "table": table })
}

pub fn parse_joint(value: &Value) -> Result<JointTable> {
    let obj = value.as_object().ok_or_else(|| bad("joint file must be a JSON object"))?;
    if str_field(obj, "kind")? != "joint_table" {
        return Err(bad("expected kind \"joint_table\""));
    }
    let n = usize_field(obj, "n")?;
    let table = obj.get("table").and_then(Value::as_object).ok_or_else(|| bad("missing \"table\""))?;
    let mut entries = Vec::with_capacity(table.len());
    for (key, v) in table {
        let digits: Vec<u8> = key.bytes().map(|b| b.wrapping_sub(b'0')).collect();
        if digits.len() != n {
            return Err(bad(format!("joint key {key:?} must have {n} bits")));
        }
        let x = Outcome::from_values(&digits)?;
        let s = v.as_str().ok_or_else(|| bad("joint probabilities must be strings"))?;
        entries.push((x, parse_probability(s)?));
    }
    if entries.len() != 1 << n {
        return Err(bad(format!("joint table needs {} entries", 1usize << n)));
    }
    Ok(JointTable::from_entries(n, entries)?)
}

fn parse_complex(v: &Value) -> Result<Complex64> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => Err(bad(format!("matrix entry {v} is not a pair of numbers"))),
        },
        _ => Err(bad(format!("matrix entry {v} must be [re, im]"))),
    }
}

pub fn parse_matrix(v: &Value) -> Result<ComplexMatrix> {
    let rows = v.as_array().ok_or_else(|| bad("matrix data must be a list of rows"))?;
    let rows: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| bad("matrix row must be a list"))
                .and_then(|r| r.iter().map(parse_complex).collect())
        })
        .collect::<Result<_>>()?;
    Ok(ComplexMatrix::from_rows(&rows)?)
}

pub fn matrix_json(m: &ComplexMatrix) -> Value {
    let d = m.dim();
    Value::Array((0..d).map(|r| Value::Array(m.row(r).iter().map(complex_json).collect())).collect())
}

pub fn complex_json(c: &Complex64) -> Value {
    json!([c.re, c.im])
}

pub fn state_json(psi: &StateVector) -> Value {
    Value::Array(psi.amplitudes().iter().map(complex_json).collect())
}

fn parse_matrices(obj: &Map<String, Value>, n: usize) -> Result<BTreeMap<SubsetMask, DensityMatrix>> {
    let mut out = BTreeMap::new();
    for m in array_field(obj, "matrices")? {
        let m = m.as_object().ok_or_else(|| bad("each matrix must be an object"))?;
        let subset = parse_subset(m.get("subset").ok_or_else(|| bad("matrix without \"subset\""))?, n)?;
        if subset.is_empty() {
            return Err(bad("matrix subset must be nonempty"));
        }
        let mat = parse_matrix(m.get("data").ok_or_else(|| bad("matrix without \"data\""))?)?;
        if mat.dim() != 1 << subset.len() {
            return Err(bad(format!("matrix on {subset} must be {0}x{0}", 1usize << subset.len())));
        }
        let rho = DensityMatrix::new(mat).map_err(|e| bad(format!("matrix on {subset}: {e}")))?;
        if out.insert(subset, rho).is_some() {
            return Err(bad(format!("subset {subset} given twice")));
        }
    }
    if out.is_empty() {
        return Err(bad("no matrices given"));
    }
    Ok(out)
}

fn parse_quantum3(obj: &Map<String, Value>) -> Result<ReducedFamily3> {
    let mut states = parse_matrices(obj, 3)?;
    let mut take = |bits: u32| {
        states
            .remove(&SubsetMask::from_bits(bits))
            .ok_or_else(|| bad("quantum_family3 needs matrices on [1,2], [1,3] and [2,3]"))
    };
    let (r12, r13, r23) = (take(0b011)?, take(0b101)?, take(0b110)?);
    if !states.is_empty() {
        return Err(bad("quantum_family3 takes exactly the subsets [1,2], [1,3] and [2,3]"));
    }
    Ok(ReducedFamily3::new(r12, r13, r23)?)
}

pub fn quantum3_json(f: &ReducedFamily3) -> Value {
    json!({
        "kind": "quantum_family3",
        "matrices": f.members().iter().map(|(s, r)| json!({ "subset": subset_json(*s), "data": matrix_json(r.matrix()) })).collect::<Vec<_>>(),
    })
}

pub fn quantum_n_json(n: usize, states: &BTreeMap<SubsetMask, DensityMatrix>) -> Value {
    json!({
        "kind": "quantum_family_n",
        "n": n,
        "matrices": states.iter().map(|(s, r)| json!({ "subset": subset_json(*s), "data": matrix_json(r.matrix()) })).collect::<Vec<_>>(),
    })
}

/// A full density matrix on `n` qubits (written by `sample` and `probe`).
pub fn density_json(rho: &DensityMatrix) -> Value {
    json!({ "kind": "density_matrix", "n": rho.qubits(), "data": matrix_json(rho.matrix()) })
}

pub fn parse_density(value: &Value) -> Result<DensityMatrix> {
    let obj = value.as_object().ok_or_else(|| bad("density file must be a JSON object"))?;
    if str_field(obj, "kind")? != "density_matrix" {
        return Err(bad("expected kind \"density_matrix\""));
    }
    Ok(DensityMatrix::new(parse_matrix(obj.get("data").ok_or_else(|| bad("missing \"data\""))?)?)?)
}

fn parse_spectra(obj: &Map<String, Value>) -> Result<Instance> {
    let criterion = match obj.get("criterion") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(other) => return Err(bad(format!("criterion {other} must be a string"))),
    };
    let fermions = match obj.get("fermions") {
        None | Some(Value::Null) => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| bad("fermions must be a positive integer"))? as usize),
    };
    let spectra = array_field(obj, "spectra")?
        .iter()
        .map(|s| {
            s.as_array()
                .ok_or_else(|| bad("each spectrum must be a list of numbers"))?
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| bad(format!("spectrum entry {v} is not a number"))))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if spectra.is_empty() {
        return Err(bad("no spectra given"));
    }
    Ok(Instance::Spectra { criterion, spectra, fermions })
}

/// Checked ascending spectrum; `normalized` additionally requires sum 1.
pub fn spectrum(values: &[f64], normalized: bool) -> Result<Spectrum> {
    let s = if normalized { Spectrum::normalized(values.to_vec()) } else { Spectrum::new(values.to_vec()) };
    Ok(s?)
}

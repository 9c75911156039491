//! File formats shared by the subcommands.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use entrocone::exact::{format_rational, parse_rational};
use entrocone::quantum::C64;
use entrocone::subset::{self, Subset};
use entrocone::{DensityMatrix, EntropyVector, JointDistribution, PureState};

use crate::error::{input, CliError, CliResult};

/// A file read into memory.
pub struct Input {
    pub path: String,
    pub text: String,
}

impl Input {
    pub fn read(path: &str) -> CliResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Input { path: path.into(), message: e.to_string() })?;
        let text = String::from_utf8(bytes).map_err(|e| CliError::Syntax {
            path: path.into(),
            offset: e.utf8_error().valid_up_to(),
            message: "invalid UTF-8".into(),
        })?;
        if text.trim().is_empty() {
            return input(path, "empty input");
        }
        Ok(Self { path: path.into(), text })
    }

    pub fn json(&self) -> CliResult<Value> {
        serde_json::from_str(&self.text).map_err(|e| CliError::Syntax {
            path: self.path.clone(),
            offset: byte_offset(&self.text, e.line(), e.column()),
            message: e.to_string(),
        })
    }

    pub fn fail<T>(&self, message: impl Into<String>) -> CliResult<T> {
        input(&self.path, message)
    }
}

/// Offset of a 1-based line/column position.
pub fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

/// SHA-256 over the inputs, each prefixed by its length.
pub fn digest(inputs: &[&Input]) -> String {
    let mut h = Sha256::new();
    for i in inputs {
        h.update((i.text.len() as u64).to_le_bytes());
        h.update(i.text.as_bytes());
    }
    hex::encode(h.finalize())
}

pub enum StateInput {
    Classical(JointDistribution),
    Density(DensityMatrix),
    Pure(PureState),
}

fn field<'a>(inp: &Input, obj: &'a Map<String, Value>, key: &str) -> CliResult<&'a Value> {
    obj.get(key).map_or_else(|| inp.fail(format!("missing field {key:?}")), Ok)
}

fn usize_list(inp: &Input, v: &Value, what: &str) -> CliResult<Vec<usize>> {
    let arr = v.as_array().map_or_else(|| inp.fail(format!("{what} must be an array")), Ok)?;
    arr.iter()
        .map(|x| x.as_u64().map(|u| u as usize).map_or_else(|| inp.fail(format!("{what} must hold nonnegative integers")), Ok))
        .collect()
}

fn f64_list(inp: &Input, v: &Value, what: &str) -> CliResult<Vec<f64>> {
    let arr = v.as_array().map_or_else(|| inp.fail(format!("{what} must be an array")), Ok)?;
    arr.iter()
        .map(|x| x.as_f64().map_or_else(|| inp.fail(format!("{what} must hold numbers")), Ok))
        .collect()
}

fn f64_matrix(inp: &Input, v: &Value, what: &str, dim: usize) -> CliResult<DMatrix<f64>> {
    let rows = v.as_array().map_or_else(|| inp.fail(format!("{what} must be an array of rows")), Ok)?;
    if rows.len() != dim {
        return inp.fail(format!("{what} has {} rows, expected {dim}", rows.len()));
    }
    let mut m = DMatrix::zeros(dim, dim);
    for (i, r) in rows.iter().enumerate() {
        let r = f64_list(inp, r, what)?;
        if r.len() != dim {
            return inp.fail(format!("{what} row {i} has {} entries, expected {dim}", r.len()));
        }
        for (j, x) in r.into_iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    Ok(m)
}

/// A JSON number or a `"p/q"` string.
pub fn rational(inp: &Input, v: &Value) -> CliResult<BigRational> {
    match v {
        Value::String(s) => Ok(parse_rational(s)?),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(parse_rational(&n.to_string())?),
        _ => inp.fail(format!("expected an integer or a \"p/q\" string, found {v}")),
    }
}

fn is_exact(v: &Value) -> bool {
    v.is_string() || v.as_i64().is_some() || v.as_u64().is_some()
}

/// Classical `{dims, probs}`, density `{dims, re, im}` or pure `{dims, amplitudes: {re, im}}`.
pub fn parse_state(inp: &Input) -> CliResult<StateInput> {
    let v = inp.json()?;
    let obj = v.as_object().map_or_else(|| inp.fail("expected a JSON object"), Ok)?;
    let dims = usize_list(inp, field(inp, obj, "dims")?, "dims")?;
    if let Some(p) = obj.get("probs") {
        let arr = p.as_array().map_or_else(|| inp.fail("probs must be an array"), Ok)?;
        let joint = if arr.iter().all(is_exact) {
            let probs = arr.iter().map(|x| rational(inp, x)).collect::<CliResult<Vec<_>>>()?;
            JointDistribution::from_rationals(dims, probs)?
        } else {
            JointDistribution::from_f64(dims, f64_list(inp, p, "probs")?)?
        };
        return Ok(StateInput::Classical(joint));
    }
    let size: usize = dims.iter().product();
    if let Some(a) = obj.get("amplitudes") {
        let a = a.as_object().map_or_else(|| inp.fail("amplitudes must be an object {re, im}"), Ok)?;
        let re = f64_list(inp, field(inp, a, "re")?, "amplitudes.re")?;
        let im = match a.get("im") {
            Some(x) => f64_list(inp, x, "amplitudes.im")?,
            None => vec![0.0; re.len()],
        };
        if im.len() != re.len() {
            return inp.fail("amplitudes.re and amplitudes.im differ in length");
        }
        let amp = DVector::from_iterator(re.len(), re.iter().zip(&im).map(|(&r, &i)| C64::new(r, i)));
        return Ok(StateInput::Pure(PureState::new(dims, amp)?));
    }
    if let Some(re) = obj.get("re") {
        let re = f64_matrix(inp, re, "re", size)?;
        let im = match obj.get("im") {
            Some(x) => f64_matrix(inp, x, "im", size)?,
            None => DMatrix::zeros(size, size),
        };
        let m = DMatrix::from_fn(size, size, |i, j| C64::new(re[(i, j)], im[(i, j)]));
        return Ok(StateInput::Density(DensityMatrix::new(dims, m)?));
    }
    inp.fail("expected one of the fields probs, amplitudes or re")
}

/// `{n, entries: {"": 0, "1": .., "1,2": ..}}` in bitmask order.
pub fn entropy_vector_json(v: &EntropyVector) -> Value {
    let mut entries = Map::new();
    for (s, x) in v.entries().iter().enumerate() {
        entries.insert(subset::label(s), json!(x + 0.0));
    }
    json!({ "n": v.n(), "entries": entries })
}

/// Accepts the bare vector format or a report whose `results.entropy_vector` holds one.
pub fn parse_entropy_vector(inp: &Input) -> CliResult<EntropyVector> {
    let v = inp.json()?;
    let v = match v.pointer("/results/entropy_vector") {
        Some(inner) => inner.clone(),
        None => v,
    };
    let obj = v.as_object().map_or_else(|| inp.fail("expected a JSON object"), Ok)?;
    let n = field(inp, obj, "n")?.as_u64().map_or_else(|| inp.fail("n must be a positive integer"), Ok)? as usize;
    subset::check_parties(n)?;
    let entries = field(inp, obj, "entries")?.as_object().map_or_else(|| inp.fail("entries must be an object"), Ok)?;
    let mut table = vec![0.0; 1 << n];
    let mut seen = vec![false; 1 << n];
    seen[0] = true;
    for (k, x) in entries {
        let s: Subset = if k.is_empty() { 0 } else { subset::parse_label(k, n)? };
        table[s] = x.as_f64().map_or_else(|| inp.fail(format!("entry {k:?} is not a number")), Ok)?;
        seen[s] = true;
    }
    if let Some(s) = seen.iter().position(|&b| !b) {
        return inp.fail(format!("missing entry {:?}", subset::label(s)));
    }
    Ok(EntropyVector::from_entries(n, table)?)
}

pub fn big_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub fn rational_json(x: &BigRational) -> Value {
    if x.is_integer() {
        big_json(x.numer())
    } else {
        json!(format_rational(x))
    }
}

pub fn int_rows_json(rows: &[Vec<BigInt>]) -> Value {
    Value::Array(rows.iter().map(|r| Value::Array(r.iter().map(big_json).collect())).collect())
}

/// Cone description over the nonempty subsets of `[n]`.
pub struct ConeFile {
    pub n: usize,
    pub halfspaces: Option<Vec<Vec<BigInt>>>,
    pub names: Option<Vec<String>>,
    pub generators: Option<Vec<Vec<BigInt>>>,
    pub lineality: Vec<Vec<BigInt>>,
}

fn rows_of(inp: &Input, v: &Value, what: &str, dim: usize) -> CliResult<Vec<Vec<BigInt>>> {
    let rows = v.as_array().map_or_else(|| inp.fail(format!("{what} must be an array of rows")), Ok)?;
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let r = r.as_array().map_or_else(|| inp.fail(format!("{what}[{i}] must be an array")), Ok)?;
            if r.len() != dim {
                return inp.fail(format!("{what}[{i}] has {} entries, expected {dim}", r.len()));
            }
            let vals = r.iter().map(|x| rational(inp, x)).collect::<CliResult<Vec<_>>>()?;
            Ok(entrocone::exact::rational_to_primitive(&vals))
        })
        .collect()
}

pub fn parse_cone(inp: &Input) -> CliResult<ConeFile> {
    let v = inp.json()?;
    let obj = v.as_object().map_or_else(|| inp.fail("expected a JSON object"), Ok)?;
    let n = field(inp, obj, "n")?.as_u64().map_or_else(|| inp.fail("n must be a positive integer"), Ok)? as usize;
    subset::check_parties(n)?;
    if n > 4 {
        return inp.fail("cone files support at most 4 parties");
    }
    let dim = (1 << n) - 1;
    let halfspaces = obj.get("halfspaces").map(|h| rows_of(inp, h, "halfspaces", dim)).transpose()?;
    let generators = obj.get("generators").map(|g| rows_of(inp, g, "generators", dim)).transpose()?;
    let lineality = obj.get("lineality").map(|g| rows_of(inp, g, "lineality", dim)).transpose()?.unwrap_or_default();
    let names = match obj.get("halfspace_names") {
        Some(Value::Array(a)) => Some(
            a.iter()
                .map(|x| x.as_str().map(str::to_string).map_or_else(|| inp.fail("halfspace_names must be strings"), Ok))
                .collect::<CliResult<Vec<_>>>()?,
        ),
        Some(_) => return inp.fail("halfspace_names must be an array"),
        None => None,
    };
    if halfspaces.is_none() && generators.is_none() {
        return inp.fail("a cone needs halfspaces or generators");
    }
    if let (Some(h), Some(nm)) = (&halfspaces, &names) {
        if h.len() != nm.len() {
            return inp.fail("halfspace_names and halfspaces differ in length");
        }
    }
    Ok(ConeFile { n, halfspaces, names, generators, lineality })
}

/// Labels of the coordinates, nonempty subsets in bitmask order.
pub fn coordinate_labels(n: usize) -> Value {
    Value::Array(subset::nonempty(n).map(|s| json!(subset::label(s))).collect())
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

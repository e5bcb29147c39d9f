//! JSON records for solutions and Farkas certificates.
//!
//! ```text
//! {"kind": "solution" | "farkas", "m": "5", "n": "5", "sign": "plus",
//!  "lambda": "...", "blocks": [[lower triangle, row-major]], "dual": [...], ...}
//! ```
//!
//! Every number is a decimal string so that values round-trip exactly.

use nalgebra::DMatrix;
use serde_json::{json, Map, Value};

use super::farkas::FarkasCertificate;
use super::problem::Sign;
use super::solver::Solution;
use crate::error::{Error, Result};

pub fn num(v: f64) -> Value {
    Value::String(v.to_string())
}

pub fn lower_triangle(m: &DMatrix<f64>) -> Value {
    let mut out = Vec::with_capacity(m.nrows() * (m.nrows() + 1) / 2);
    for i in 0..m.nrows() {
        for j in 0..=i {
            out.push(num(m[(i, j)]));
        }
    }
    Value::Array(out)
}

fn header(kind: &str, m: usize, n: usize, sign: Sign, lambda: f64) -> Map<String, Value> {
    let mut o = Map::new();
    o.insert("kind".into(), json!(kind));
    o.insert("m".into(), json!(m.to_string()));
    o.insert("n".into(), json!(n.to_string()));
    o.insert("sign".into(), json!(sign.to_string()));
    o.insert("lambda".into(), num(lambda));
    o
}

pub fn solution_to_json(m: usize, n: usize, sign: Sign, sol: &Solution) -> Value {
    let mut o = header("solution", m, n, sign, sol.objective_primal);
    o.insert(
        "blocks".into(),
        Value::Array(sol.primal_blocks.iter().map(lower_triangle).collect()),
    );
    o.insert("dual".into(), Value::Array(sol.dual.iter().map(|&v| num(v)).collect()));
    o.insert("status".into(), json!(sol.status.to_string()));
    o.insert("objective_dual".into(), num(sol.objective_dual));
    o.insert("gap".into(), num(sol.gap));
    o.insert("iterations".into(), json!(sol.iterations.to_string()));
    Value::Object(o)
}

pub fn farkas_to_json(m: usize, n: usize, sign: Sign, cert: &FarkasCertificate) -> Value {
    let mut o = header("farkas", m, n, sign, cert.lambda_target);
    o.insert("blocks".into(), json!([]));
    o.insert("dual".into(), Value::Array(cert.y.iter().map(|&v| num(v)).collect()));
    o.insert("margin".into(), num(cert.margin));
    o.insert("psd_defect".into(), num(cert.psd_defect));
    Value::Object(o)
}

/// Common header of every record: `(kind, m, n, sign)`.
pub fn read_header(v: &Value) -> Result<(String, usize, usize, Sign)> {
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .unwrap_or("solution")
        .to_string();
    let m = get_usize(v, "m")?;
    let n = get_usize(v, "n")?;
    let sign = get_str(v, "sign")?.parse()?;
    Ok((kind, m, n, sign))
}

pub fn farkas_from_json(v: &Value) -> Result<(usize, usize, Sign, FarkasCertificate)> {
    let (kind, m, n, sign) = read_header(v)?;
    if kind != "farkas" {
        return Err(Error::param(format!("expected a farkas record, found {kind:?}")));
    }
    let cert = FarkasCertificate {
        lambda_target: get_f64(v, "lambda")?,
        y: get_f64_array(v, "dual")?,
        margin: get_f64(v, "margin")?,
        psd_defect: get_f64(v, "psd_defect")?,
    };
    Ok((m, n, sign, cert))
}

/// Reads `(lambda, blocks, dual)` of a solution record.
pub fn solution_from_json(v: &Value) -> Result<(f64, Vec<DMatrix<f64>>, Vec<f64>)> {
    let lambda = get_f64(v, "lambda")?;
    let blocks = v
        .get("blocks")
        .and_then(Value::as_array)
        .ok_or_else(|| missing("blocks"))?
        .iter()
        .map(|b| {
            let vals: Vec<f64> = b
                .as_array()
                .ok_or_else(|| missing("blocks"))?
                .iter()
                .map(parse_f64)
                .collect::<Result<_>>()?;
            from_lower_triangle(&vals)
        })
        .collect::<Result<_>>()?;
    Ok((lambda, blocks, get_f64_array(v, "dual")?))
}

pub fn from_lower_triangle(vals: &[f64]) -> Result<DMatrix<f64>> {
    let q = triangle_side(vals.len())?;
    let mut m = DMatrix::zeros(q, q);
    let mut k = 0;
    for i in 0..q {
        for j in 0..=i {
            m[(i, j)] = vals[k];
            m[(j, i)] = vals[k];
            k += 1;
        }
    }
    Ok(m)
}

/// Side `q` with `q(q+1)/2 = len`.
pub fn triangle_side(len: usize) -> Result<usize> {
    let mut q = 0;
    while q * (q + 1) / 2 < len {
        q += 1;
    }
    if q * (q + 1) / 2 != len {
        return Err(Error::DimensionMismatch(format!(
            "{len} values do not form a lower triangle"
        )));
    }
    Ok(q)
}

fn missing(key: &str) -> Error {
    Error::param(format!("missing or malformed field {key:?}"))
}

pub(crate) fn get_str<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    v.get(key).and_then(Value::as_str).ok_or_else(|| missing(key))
}

pub(crate) fn get_usize(v: &Value, key: &str) -> Result<usize> {
    match v.get(key) {
        Some(Value::String(s)) => s.trim().parse().map_err(|_| missing(key)),
        Some(Value::Number(x)) => x.as_u64().map(|x| x as usize).ok_or_else(|| missing(key)),
        _ => Err(missing(key)),
    }
}

fn parse_f64(v: &Value) -> Result<f64> {
    match v {
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::param(format!("not a decimal number: {s:?}"))),
        Value::Number(x) => x.as_f64().ok_or_else(|| Error::param("number out of range")),
        _ => Err(Error::param(format!("expected a number, found {v}"))),
    }
}

pub(crate) fn get_f64(v: &Value, key: &str) -> Result<f64> {
    parse_f64(v.get(key).ok_or_else(|| missing(key))?)
}

pub(crate) fn get_f64_array(v: &Value, key: &str) -> Result<Vec<f64>> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| missing(key))?
        .iter()
        .map(parse_f64)
        .collect()
}

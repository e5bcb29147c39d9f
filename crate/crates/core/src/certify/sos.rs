use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use super::rational::{psd_check_exact, RationalMatrix};
use crate::error::{Error, Result};
use crate::ncpoly::{distinct_product_sum, NcPoly, Word};
use crate::sdp::json::{get_str, get_usize};
use crate::sdp::Sign;
use crate::sos::{basis_degree, MonomialBasis};

/// Exact certificate for `λ + sign·Σ_{distinct} X_{j1}⋯X_{jm} = Σ_i tr(β ℓ_i βᵀ Y_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SosCertificate {
    pub m: usize,
    pub n: usize,
    pub sign: Sign,
    pub lambda: BigRational,
    /// `Y_1, ..., Y_{n+1}`.
    pub gram_blocks: Vec<RationalMatrix>,
}

/// Outcome of the two exact checks behind [`verify_sos`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SosVerification {
    /// `psd[i]` is the verdict for `Y_{i+1}`.
    pub psd: Vec<bool>,
    pub identity: bool,
    /// Words whose coefficients disagree, at most a handful.
    pub mismatched_words: Vec<String>,
}

impl SosVerification {
    pub fn is_valid(&self) -> bool {
        self.identity && self.psd.iter().all(|&p| p)
    }
}

/// `Σ_i Σ_{a,b} (β_aᵀ ℓ_i β_b) · Y_i[a, b]`.
pub fn expand_gram(
    n: usize,
    basis: &MonomialBasis,
    blocks: &[RationalMatrix],
) -> Result<NcPoly<BigRational>> {
    let mut acc: BTreeMap<Word, BigRational> = BTreeMap::new();
    for (k, y) in blocks.iter().enumerate() {
        for a in 0..basis.len() {
            for b in 0..basis.len() {
                let v = y.get(a, b);
                if v.is_zero() {
                    continue;
                }
                for (w, c) in basis.gram_terms(k + 1, a, b) {
                    *acc.entry(w).or_insert_with(BigRational::zero) +=
                        v * BigRational::from_integer(BigInt::from(c));
                }
            }
        }
    }
    NcPoly::from_terms(n, acc)
}

pub fn verify_sos_detailed(cert: &SosCertificate) -> Result<SosVerification> {
    let SosCertificate { m, n, sign, .. } = *cert;
    if m == 0 || m > n {
        return Err(Error::param(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    let basis = MonomialBasis::new(n, basis_degree(m))?;
    if cert.gram_blocks.len() != n + 1 {
        return Err(Error::DimensionMismatch(format!(
            "expected {} Gram blocks, found {}",
            n + 1,
            cert.gram_blocks.len()
        )));
    }
    if let Some(bad) = cert.gram_blocks.iter().find(|y| y.dim() != basis.len()) {
        return Err(Error::DimensionMismatch(format!(
            "Gram block of size {} where the basis has {} words",
            bad.dim(),
            basis.len()
        )));
    }
    let psd = cert.gram_blocks.iter().map(psd_check_exact).collect();
    let lhs = expand_gram(n, &basis, &cert.gram_blocks)?;
    let target = distinct_product_sum::<BigRational>(m, n)?;
    let s = BigRational::from_integer(sign.value().into());
    let rhs = &NcPoly::constant(n, cert.lambda.clone())? + &target.scale(&s);
    let diff = &lhs - &rhs;
    let mismatched_words = diff.terms().take(5).map(|(w, _)| w.to_string()).collect();
    Ok(SosVerification {
        psd,
        identity: diff.is_zero(),
        mismatched_words,
    })
}

/// True iff every Gram block is PSD and the polynomial identity holds,
/// both decided in exact rational arithmetic.
pub fn verify_sos(cert: &SosCertificate) -> Result<bool> {
    Ok(verify_sos_detailed(cert)?.is_valid())
}

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

/// The closed-form certificate of `λ₂ = n(n-1)/4` for `m = 2`.
///
/// Basis order is `(1, X1, ..., Xn)`. Block `i <= n` has `a` at the unit
/// corner, `b` at `(1, X_i)`, `c` at `(1, X_j)`, `d` at `(X_i, X_i)`, `e` at
/// `(X_i, X_j)`, `f` at `(X_j, X_j)` and `g` at `(X_j, X_k)` for distinct
/// `j, k ≠ i`. Block `n+1` has `x` at the corner, `y` on the rest of the first
/// row, `z` on the diagonal and `w` elsewhere.
pub fn build_m2_certificate(n: usize) -> Result<SosCertificate> {
    if n < 2 {
        return Err(Error::param(format!("the m = 2 family needs n >= 2, got {n}")));
    }
    let ni = n as i64;
    let a = q(5 * (ni - 1), 4);
    let b = q(-3 * (ni - 1), 2 * ni);
    let c = q(3 - ni, 2 * ni);
    let d = q(2 * (ni - 1), ni * ni);
    let e = q(ni - 2, ni * ni);
    let (f, z) = (d.clone(), d.clone());
    let (g, w) = (e.clone(), e.clone());
    let x = q(ni - 1, 4);
    let y = q(-(ni - 1), 2 * ni);

    let dim = n + 1;
    let mut blocks = Vec::with_capacity(n + 1);
    for i in 1..=n {
        let mut m = RationalMatrix::zeros(dim);
        m.set(0, 0, a.clone());
        for j in 1..=n {
            m.set(0, j, if j == i { b.clone() } else { c.clone() });
            for k in j..=n {
                let v = match (j == i, k == i, j == k) {
                    (true, true, _) => d.clone(),
                    (true, false, _) | (false, true, _) => e.clone(),
                    (false, false, true) => f.clone(),
                    (false, false, false) => g.clone(),
                };
                m.set(j, k, v);
            }
        }
        blocks.push(m);
    }
    let mut last = RationalMatrix::zeros(dim);
    last.set(0, 0, x);
    for j in 1..=n {
        last.set(0, j, y.clone());
        for k in j..=n {
            last.set(j, k, if j == k { z.clone() } else { w.clone() });
        }
    }
    blocks.push(last);
    Ok(SosCertificate {
        m: 2,
        n,
        sign: Sign::Plus,
        lambda: q(ni * (ni - 1), 4),
        gram_blocks: blocks,
    })
}

fn parse_rational(v: &Value) -> Result<BigRational> {
    let s = match v {
        Value::String(s) => s.trim().to_string(),
        Value::Number(x) if x.is_i64() => x.to_string(),
        _ => return Err(Error::param(format!("expected a rational \"p/q\", found {v}"))),
    };
    s.parse::<BigRational>()
        .map_err(|_| Error::param(format!("not a rational number: {s:?}")))
}

pub fn sos_to_json(cert: &SosCertificate) -> Value {
    let blocks: Vec<Value> = cert
        .gram_blocks
        .iter()
        .map(|b| Value::Array(b.lower_triangle().iter().map(|v| json!(v.to_string())).collect()))
        .collect();
    json!({
        "kind": "sos",
        "m": cert.m.to_string(),
        "n": cert.n.to_string(),
        "sign": cert.sign.to_string(),
        "lambda": cert.lambda.to_string(),
        "blocks": blocks,
        "dual": [],
    })
}

pub fn sos_from_json(v: &Value) -> Result<SosCertificate> {
    let kind = v.get("kind").and_then(Value::as_str).unwrap_or("sos");
    if kind != "sos" {
        return Err(Error::param(format!("expected an sos record, found {kind:?}")));
    }
    let blocks = v
        .get("blocks")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::param("missing field \"blocks\""))?
        .iter()
        .map(|b| {
            let vals = b
                .as_array()
                .ok_or_else(|| Error::param("each block must be an array"))?
                .iter()
                .map(parse_rational)
                .collect::<Result<Vec<_>>>()?;
            RationalMatrix::from_lower_triangle(vals)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SosCertificate {
        m: get_usize(v, "m")?,
        n: get_usize(v, "n")?,
        sign: get_str(v, "sign")?.parse()?,
        lambda: parse_rational(v.get("lambda").ok_or_else(|| Error::param("missing field \"lambda\""))?)?,
        gram_blocks: blocks,
    })
}

impl SosCertificate {
    /// `λ` as a float, for reporting.
    pub fn lambda_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.lambda.to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n2_blocks_match_display() {
        let c = build_m2_certificate(2).unwrap();
        let y1 = &c.gram_blocks[0];
        assert_eq!(y1.get(0, 0), &q(5, 4));
        assert_eq!(y1.get(0, 1), &q(-3, 4));
        assert_eq!(y1.get(0, 2), &q(1, 4));
        assert_eq!(y1.get(1, 1), &q(1, 2));
        assert_eq!(y1.get(1, 2), &q(0, 1));
        assert_eq!(y1.get(2, 2), &q(1, 2));
        let y3 = &c.gram_blocks[2];
        assert_eq!(y3.lower_triangle(), vec![q(1, 4), q(-1, 4), q(1, 2), q(-1, 4), q(0, 1), q(1, 2)]);
        assert_eq!(c.lambda, q(1, 2));
        assert!(verify_sos(&c).unwrap());
    }

    #[test]
    fn n4_first_row() {
        let c = build_m2_certificate(4).unwrap();
        let row: Vec<_> = (0..5).map(|j| c.gram_blocks[0].get(0, j).clone()).collect();
        assert_eq!(row, vec![q(15, 4), q(-9, 8), q(-1, 8), q(-1, 8), q(-1, 8)]);
        assert_eq!(c.gram_blocks[4].get(0, 0), &q(3, 4));
    }

    #[test]
    fn wrong_lambda_fails_identity() {
        let mut c = build_m2_certificate(3).unwrap();
        assert!(verify_sos(&c).unwrap());
        c.lambda = q(1, 4);
        let v = verify_sos_detailed(&c).unwrap();
        assert!(!v.identity);
        assert_eq!(v.mismatched_words, vec!["1".to_string()]);
    }

    #[test]
    fn shape_errors() {
        let mut c = build_m2_certificate(3).unwrap();
        c.gram_blocks.pop();
        assert!(verify_sos(&c).is_err());
        assert!(build_m2_certificate(1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = build_m2_certificate(3).unwrap();
        let back = sos_from_json(&sos_to_json(&c)).unwrap();
        assert_eq!(back, c);
    }
}

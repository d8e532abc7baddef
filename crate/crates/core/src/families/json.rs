//! The family and matrix file formats (UTF-8 JSON).
//!
//! ```json
//! { "kind": "shifted_linear" | "polynomial" | "schur" | "pwl_diag",
//!   "name": "optional label",
//!   "domain": { "lo": 0 | "-inf", "hi": 4 | "+inf", "lo_open": false, "hi_open": false },
//!   "A": [[...]]                                   // shifted_linear
//!   "coeffs": [[[...]], ...]                       // polynomial, C₀ first
//!   "blocks": { "A": [[...]], "B": [[...]], "D": [[...]] }   // schur
//!   "entries": [[[lambda, value], ...], ...]       // pwl_diag
//! }
//! ```
//!
//! Matrices are row-major nested arrays and must be symmetric to `1e-12`
//! (relative to their largest entry); they are symmetrized after the check.
//! Every error names the offending location as a JSON pointer.

use nalgebra::DMatrix;
use serde_json::{json, Map, Value};

use super::{FamilyKind, OperatorFamily, PwlEntry};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg::SymMatrix;

const SYMMETRY_TOL: f64 = 1e-12;

fn err(pointer: &str, message: impl Into<String>) -> Error {
    Error::Parse { pointer: pointer.to_string(), message: message.into() }
}

fn child(pointer: &str, key: impl std::fmt::Display) -> String {
    let key = key.to_string().replace('~', "~0").replace('/', "~1");
    format!("{pointer}/{key}")
}

fn parse_value(text: &[u8]) -> Result<Value> {
    let s = std::str::from_utf8(text).map_err(|e| err("", format!("invalid UTF-8: {e}")))?;
    serde_json::from_str(s).map_err(|e| err("", format!("invalid JSON: {e}")))
}

fn as_object<'a>(v: &'a Value, ptr: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| err(ptr, "expected an object"))
}

fn as_array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(ptr, "expected an array"))
}

fn as_number(v: &Value, ptr: &str) -> Result<f64> {
    let x = v.as_f64().ok_or_else(|| err(ptr, "expected a number"))?;
    if !x.is_finite() {
        return Err(err(ptr, "number out of range"));
    }
    Ok(x)
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, ptr: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| err(ptr, format!("missing field '{key}'")))
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], ptr: &str) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(err(&child(ptr, k), "unknown field")),
        None => Ok(()),
    }
}

/// Row-major numeric matrix with consistent row length.
fn parse_dense(v: &Value, ptr: &str) -> Result<DMatrix<f64>> {
    let rows = as_array(v, ptr)?;
    if rows.is_empty() {
        return Err(err(ptr, "matrix has no rows"));
    }
    let mut data: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let rp = child(ptr, i);
        let r = as_array(r, &rp)?;
        let row = r
            .iter()
            .enumerate()
            .map(|(j, x)| as_number(x, &child(&rp, j)))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = data.first() {
            if row.len() != first.len() {
                return Err(err(&rp, format!("row has {} entries, expected {}", row.len(), first.len())));
            }
        }
        data.push(row);
    }
    let cols = data[0].len();
    if cols == 0 {
        return Err(err(ptr, "matrix has no columns"));
    }
    Ok(DMatrix::from_fn(data.len(), cols, |i, j| data[i][j]))
}

fn parse_sym(v: &Value, ptr: &str) -> Result<SymMatrix> {
    let m = parse_dense(v, ptr)?;
    if m.nrows() != m.ncols() {
        return Err(err(ptr, format!("matrix is {}x{}, expected square", m.nrows(), m.ncols())));
    }
    let scale = 1.0 + m.amax();
    let deviation = (&m - m.transpose()).amax();
    if deviation > SYMMETRY_TOL * scale {
        return Err(Error::Asymmetric { pointer: ptr.to_string(), deviation });
    }
    SymMatrix::new(m)
}

fn parse_endpoint(v: &Value, ptr: &str, infinite: &str, sign: f64) -> Result<f64> {
    match v {
        Value::String(s) if s == infinite => Ok(sign * f64::INFINITY),
        Value::String(s) => Err(err(ptr, format!("expected a number or \"{infinite}\", found \"{s}\""))),
        other => as_number(other, ptr),
    }
}

fn parse_bool(obj: &Map<String, Value>, key: &str, ptr: &str) -> Result<bool> {
    match obj.get(key) {
        None => Ok(false),
        Some(v) => v.as_bool().ok_or_else(|| err(&child(ptr, key), "expected a boolean")),
    }
}

fn parse_domain(v: &Value, ptr: &str) -> Result<Interval> {
    let obj = as_object(v, ptr)?;
    reject_unknown(obj, &["lo", "hi", "lo_open", "hi_open"], ptr)?;
    let lo = parse_endpoint(field(obj, "lo", ptr)?, &child(ptr, "lo"), "-inf", -1.0)?;
    let hi = parse_endpoint(field(obj, "hi", ptr)?, &child(ptr, "hi"), "+inf", 1.0)?;
    let lo_open = parse_bool(obj, "lo_open", ptr)?;
    let hi_open = parse_bool(obj, "hi_open", ptr)?;
    Interval::new(lo, hi, lo_open, hi_open).map_err(|e| err(ptr, e.to_string()))
}

fn parse_pwl(v: &Value, ptr: &str) -> Result<Vec<PwlEntry>> {
    let entries = as_array(v, ptr)?;
    if entries.is_empty() {
        return Err(err(ptr, "need at least one diagonal entry"));
    }
    entries
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let ep = child(ptr, k);
            let knots = as_array(e, &ep)?
                .iter()
                .enumerate()
                .map(|(i, pair)| {
                    let pp = child(&ep, i);
                    let pair = as_array(pair, &pp)?;
                    if pair.len() != 2 {
                        return Err(err(&pp, "knot must be a [lambda, value] pair"));
                    }
                    Ok((as_number(&pair[0], &child(&pp, 0))?, as_number(&pair[1], &child(&pp, 1))?))
                })
                .collect::<Result<Vec<_>>>()?;
            PwlEntry::new(knots).map_err(|e| err(&ep, e.to_string()))
        })
        .collect()
}

/// Parse a family document.
pub fn parse_family(text: &[u8]) -> Result<OperatorFamily> {
    let root = parse_value(text)?;
    let obj = as_object(&root, "")?;
    let kind = field(obj, "kind", "")?
        .as_str()
        .ok_or_else(|| err("/kind", "expected a string"))?;
    let payload = match kind {
        "shifted_linear" => "A",
        "polynomial" => "coeffs",
        "schur" => "blocks",
        "pwl_diag" => "entries",
        other => return Err(err("/kind", format!("unknown kind '{other}'"))),
    };
    reject_unknown(obj, &["kind", "name", "domain", payload], "")?;
    let domain = parse_domain(field(obj, "domain", "")?, "/domain")?;
    let body = field(obj, payload, "")?;
    let bp = child("", payload);
    let family = match kind {
        "shifted_linear" => OperatorFamily::shifted_linear(parse_sym(body, &bp)?, domain),
        "polynomial" => {
            let list = as_array(body, &bp)?;
            if list.is_empty() {
                return Err(err(&bp, "need at least one coefficient"));
            }
            let coeffs = list
                .iter()
                .enumerate()
                .map(|(j, c)| parse_sym(c, &child(&bp, j)))
                .collect::<Result<Vec<_>>>()?;
            if let Some(j) = coeffs.iter().position(|c| c.dim() != coeffs[0].dim()) {
                return Err(err(&child(&bp, j), "coefficient dimension differs from C0"));
            }
            OperatorFamily::polynomial(coeffs, domain)
        }
        "schur" => {
            let blocks = as_object(body, &bp)?;
            reject_unknown(blocks, &["A", "B", "D"], &bp)?;
            let a = parse_sym(field(blocks, "A", &bp)?, &child(&bp, "A"))?;
            let b = parse_dense(field(blocks, "B", &bp)?, &child(&bp, "B"))?;
            let d = parse_sym(field(blocks, "D", &bp)?, &child(&bp, "D"))?;
            if b.nrows() != a.dim() || b.ncols() != d.dim() {
                return Err(err(
                    &child(&bp, "B"),
                    format!("B is {}x{}, expected {}x{}", b.nrows(), b.ncols(), a.dim(), d.dim()),
                ));
            }
            OperatorFamily::schur(a, b, d, domain)
        }
        _ => OperatorFamily::pwl_diag(parse_pwl(body, &bp)?, domain),
    }?;
    Ok(match obj.get("name") {
        None => family,
        Some(Value::String(s)) => family.with_name(s.clone()),
        Some(_) => return Err(err("/name", "expected a string")),
    })
}

fn num(x: f64) -> Value {
    json!(x)
}

fn dense_value(m: &DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| num(m[(i, j)])).collect()))
            .collect(),
    )
}

fn endpoint_value(x: f64) -> Value {
    if x == f64::INFINITY {
        json!("+inf")
    } else if x == f64::NEG_INFINITY {
        json!("-inf")
    } else {
        num(x)
    }
}

pub(crate) fn family_value(f: &OperatorFamily) -> Value {
    let d = f.domain();
    let mut obj = Map::new();
    obj.insert("kind".into(), json!(f.kind().tag()));
    if let Some(n) = f.name() {
        obj.insert("name".into(), json!(n));
    }
    obj.insert(
        "domain".into(),
        json!({
            "lo": endpoint_value(d.lo),
            "hi": endpoint_value(d.hi),
            "lo_open": d.lo_open,
            "hi_open": d.hi_open,
        }),
    );
    match f.kind() {
        FamilyKind::ShiftedLinear { a } => {
            obj.insert("A".into(), dense_value(a.matrix()));
        }
        FamilyKind::Polynomial { coeffs } => {
            obj.insert("coeffs".into(), Value::Array(coeffs.iter().map(|c| dense_value(c.matrix())).collect()));
        }
        FamilyKind::Schur { a, b, d } => {
            obj.insert(
                "blocks".into(),
                json!({ "A": dense_value(a.matrix()), "B": dense_value(b), "D": dense_value(d.matrix()) }),
            );
        }
        FamilyKind::PwlDiag { entries } => {
            obj.insert(
                "entries".into(),
                Value::Array(
                    entries
                        .iter()
                        .map(|e| Value::Array(e.knots().iter().map(|&(x, y)| json!([x, y])).collect()))
                        .collect(),
                ),
            );
        }
    }
    Value::Object(obj)
}

/// Canonical pretty-printed document (sorted keys, trailing newline).
pub fn serialize_family(f: &OperatorFamily) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&family_value(f)).expect("family values are finite");
    out.push(b'\n');
    out
}

/// Parse a symmetric matrix given either as a bare nested array or as
/// `{"matrix": [[...]]}`.
pub fn parse_matrix(text: &[u8]) -> Result<SymMatrix> {
    let root = parse_value(text)?;
    match &root {
        Value::Object(obj) => {
            reject_unknown(obj, &["matrix"], "")?;
            parse_sym(field(obj, "matrix", "")?, "/matrix")
        }
        other => parse_sym(other, ""),
    }
}

pub fn serialize_matrix(m: &SymMatrix) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&json!({ "matrix": dense_value(m.matrix()) })).expect("finite");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::corpus;

    #[test]
    fn minimal_shifted_linear() {
        let doc = br#"{"kind":"shifted_linear","domain":{"lo":0,"hi":"+inf"},"A":[[1,0],[0,3]]}"#;
        let f = parse_family(doc).unwrap();
        assert_eq!(f.dim(), 2);
        assert!(f.domain().hi_open);
        assert_eq!(f.evaluate(1.0).unwrap(), SymMatrix::from_diagonal(&[0.0, 2.0]));
    }

    #[test]
    fn asymmetric_payload_rejected() {
        let doc = br#"{"kind":"shifted_linear","domain":{"lo":0,"hi":1},"A":[[1,0.5],[0.5000001,3]]}"#;
        match parse_family(doc) {
            Err(Error::Asymmetric { pointer, .. }) => assert_eq!(pointer, "/A"),
            other => panic!("{other:?}"),
        }
        // Within tolerance: accepted and symmetrized.
        let doc = br#"{"kind":"shifted_linear","domain":{"lo":0,"hi":1},"A":[[1,0.5],[0.5000000000000001,3]]}"#;
        assert!(parse_family(doc).is_ok());
    }

    #[test]
    fn errors_carry_pointers() {
        let cases: &[(&[u8], &str)] = &[
            (br#"{"kind":"polynomial","domain":{"lo":0,"hi":1},"coeffs":[[[1]],[[1,2]]]}"#, "/coeffs/1"),
            (br#"{"kind":"polynomial","domain":{"lo":0,"hi":1},"coeffs":[[[1]],[["x"]]]}"#, "/coeffs/1/0/0"),
            (br#"{"kind":"shifted_linear","domain":{"lo":"+inf","hi":1},"A":[[1]]}"#, "/domain/lo"),
            (br#"{"kind":"nope","domain":{"lo":0,"hi":1}}"#, "/kind"),
            (br#"{"kind":"shifted_linear","domain":{"lo":0,"hi":1},"A":[[1]],"extra":1}"#, "/extra"),
            (br#"{"kind":"schur","domain":{"lo":0,"hi":1},"blocks":{"A":[[1]],"B":[[1,2]],"D":[[5]]}}"#, "/blocks/B"),
            (br#"{"kind":"pwl_diag","domain":{"lo":0,"hi":1},"entries":[[[0,1],[1]]]}"#, "/entries/0/1"),
            (br#"{"kind":"pwl_diag","domain":{"lo":0,"hi":1},"entries":[[[0,1],[1,2]]]}"#, "/entries/0"),
            (br#"{"kind":"shifted_linear","domain":{"lo":2,"hi":1},"A":[[1]]}"#, "/domain"),
            (br#"[1,2]"#, ""),
            (b"\xff", ""),
        ];
        for (doc, want) in cases {
            match parse_family(doc) {
                Err(Error::Parse { pointer, .. }) => assert_eq!(&pointer, want, "{}", String::from_utf8_lossy(doc)),
                other => panic!("{}: {other:?}", String::from_utf8_lossy(doc)),
            }
        }
    }

    #[test]
    fn corpus_round_trips() {
        for f in corpus::all() {
            let bytes = serialize_family(&f);
            let g = parse_family(&bytes).unwrap();
            assert_eq!(f, g, "{:?}", f.name());
            assert_eq!(serialize_family(&g), bytes);
        }
    }

    #[test]
    fn matrix_files() {
        let m = parse_matrix(b"[[1, 2], [2, 5]]").unwrap();
        assert_eq!(m, parse_matrix(br#"{"matrix": [[1, 2], [2, 5]]}"#).unwrap());
        assert_eq!(parse_matrix(&serialize_matrix(&m)).unwrap(), m);
        assert!(parse_matrix(b"[[1, 2]]").is_err());
        assert!(parse_matrix(b"[]").is_err());
    }
}

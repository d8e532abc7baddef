//! Serialization helpers shared by the report types.

use nalgebra::{DMatrix, DVector};
use serde::Serializer;

use crate::linalg::SubspaceBasis;

/// Finite values as numbers, infinities as `"+inf"` / `"-inf"`.
pub fn ser_ext_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if *x == f64::INFINITY {
        s.serialize_str("+inf")
    } else if *x == f64::NEG_INFINITY {
        s.serialize_str("-inf")
    } else if x.is_nan() {
        s.serialize_none()
    } else {
        s.serialize_f64(*x)
    }
}

pub fn ser_opt_ext_f64<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => ser_ext_f64(v, s),
        None => s.serialize_none(),
    }
}

/// Basis columns as a list of vectors.
pub fn ser_basis<S: Serializer>(b: &SubspaceBasis, s: S) -> Result<S::Ok, S::Error> {
    ser_columns(b.matrix(), s)
}

pub fn ser_columns<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(m.column_iter().map(|c| c.iter().copied().collect::<Vec<f64>>()))
}

pub fn ser_vector<S: Serializer>(v: &DVector<f64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().copied())
}

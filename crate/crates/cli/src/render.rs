//! Shared text and JSON rendering helpers.

use nla_core::format::{emit, matrix_document, vector_document};
use nla_core::{Matrix, NMatrix, NVector, Scalar};
use serde_json::{json, Value};

pub fn scalar(s: &Scalar) -> Value {
    Value::String(s.to_string())
}

pub fn scalars(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(scalar).collect())
}

pub fn matrix(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|r| scalars(m.row(r))).collect())
}

pub fn nmatrix(a: &NMatrix) -> Value {
    Value::Array(a.components().iter().map(matrix).collect())
}

pub fn nvector(v: &NVector) -> Value {
    Value::Array(v.components().iter().map(|c| scalars(c)).collect())
}

pub fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| json!(round(*x))).collect())
}

pub fn float_rows(m: &[Vec<f64>]) -> Value {
    Value::Array(m.iter().map(|r| floats(r)).collect())
}

// Twelve decimals keep float reports stable across platforms.
pub fn round(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{}", round(x))
}

pub fn join(v: &[Scalar]) -> String {
    v.iter().map(Scalar::to_string).collect::<Vec<_>>().join(" ")
}

pub fn set(v: &[Scalar]) -> String {
    format!("{{{}}}", v.iter().map(Scalar::to_string).collect::<Vec<_>>().join(", "))
}

pub fn tuple<T: ToString>(v: &[T]) -> String {
    format!("({})", v.iter().map(T::to_string).collect::<Vec<_>>().join(", "))
}

pub fn matrix_rows(m: &Matrix, indent: &str) -> String {
    (0..m.rows()).map(|r| format!("{indent}{}\n", join(m.row(r)))).collect()
}

pub fn float_matrix_rows(m: &[Vec<f64>], indent: &str) -> String {
    m.iter()
        .map(|r| {
            format!(
                "{indent}{}\n",
                r.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(" ")
            )
        })
        .collect()
}

pub fn nmatrix_text(a: &NMatrix) -> String {
    emit(&matrix_document(a))
}

pub fn nvector_text(v: &NVector) -> String {
    emit(&vector_document(v))
}

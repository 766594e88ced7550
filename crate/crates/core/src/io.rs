//! JSON documents for matrices, vectors, problems and results.
//!
//! Matrices are `{"n": N, "re": [[..]], "im": [[..]]}` and vectors are
//! `{"re": [..], "im": [..]}`; `im` may be omitted for real data. A problem
//! document holds `matrix`, `rhs` and an optional solver `config`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HhlError, Result};
use crate::linalg::{ComplexMatrix, ProblemInstance};
use crate::pipeline::{HhlConfig, HhlResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct VectorRepr {
    re: Vec<f64>,
    #[serde(default)]
    im: Option<Vec<f64>>,
}

fn matrix_from_repr(r: MatrixRepr) -> Result<ComplexMatrix> {
    let n = r.n;
    let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|row| row.len() == n);
    if !shape_ok(&r.re) || r.im.as_ref().is_some_and(|im| !shape_ok(im)) {
        return Err(HhlError::Format(format!(
            "matrix rows must form an {n}×{n} array"
        )));
    }
    if n == 0 {
        return Err(HhlError::Format("matrix must be non-empty".into()));
    }
    Ok(ComplexMatrix::from_fn(n, |i, j| {
        let im = r.im.as_ref().map_or(0.0, |im| im[i][j]);
        Complex64::new(r.re[i][j], im)
    }))
}

fn matrix_to_repr(m: &ComplexMatrix) -> MatrixRepr {
    let n = m.dim();
    let part = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..n).map(|i| m.row(i).iter().map(f).collect()).collect()
    };
    MatrixRepr {
        n,
        re: part(|c| c.re),
        im: Some(part(|c| c.im)),
    }
}

fn vector_from_repr(r: VectorRepr) -> Result<Vec<Complex64>> {
    if let Some(im) = &r.im {
        if im.len() != r.re.len() {
            return Err(HhlError::Format(format!(
                "vector re has {} entries but im has {}",
                r.re.len(),
                im.len()
            )));
        }
    }
    Ok(r.re
        .iter()
        .enumerate()
        .map(|(i, &re)| Complex64::new(re, r.im.as_ref().map_or(0.0, |im| im[i])))
        .collect())
}

fn vector_to_repr(v: &[Complex64]) -> VectorRepr {
    VectorRepr {
        re: v.iter().map(|c| c.re).collect(),
        im: Some(v.iter().map(|c| c.im).collect()),
    }
}

/// `#[serde(with = "complex_matrix")]` adapter for [`ComplexMatrix`] fields.
pub mod complex_matrix {
    use super::*;

    pub fn serialize<S: serde::Serializer>(
        m: &ComplexMatrix,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_repr(m).serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<ComplexMatrix, D::Error> {
        matrix_from_repr(MatrixRepr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "complex_vec")]` adapter for `Vec<Complex64>` fields.
pub mod complex_vec {
    use super::*;

    pub fn serialize<S: serde::Serializer>(
        v: &[Complex64],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        vector_to_repr(v).serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Complex64>, D::Error> {
        vector_from_repr(VectorRepr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDocument {
    #[serde(with = "complex_matrix")]
    pub matrix: ComplexMatrix,
    #[serde(with = "complex_vec")]
    pub rhs: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<HhlConfig>,
}

impl ProblemDocument {
    pub fn instance(&self) -> Result<ProblemInstance> {
        ProblemInstance::new(self.matrix.clone(), self.rhs.clone())
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| HhlError::Format(e.to_string()))
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    matrix_from_repr(parse(text)?)
}

pub fn parse_vector(text: &str) -> Result<Vec<Complex64>> {
    vector_from_repr(parse(text)?)
}

pub fn parse_problem(text: &str) -> Result<ProblemDocument> {
    parse(text)
}

pub fn parse_config(text: &str) -> Result<HhlConfig> {
    parse(text)
}

pub fn matrix_json(m: &ComplexMatrix) -> String {
    serde_json::to_string(&matrix_to_repr(m)).expect("matrix serialises")
}

pub fn vector_json(v: &[Complex64]) -> String {
    serde_json::to_string(&vector_to_repr(v)).expect("vector serialises")
}

pub fn result_json(r: &HhlResult) -> String {
    serde_json::to_string_pretty(r).expect("result serialises")
}

pub fn parse_result(text: &str) -> Result<HhlResult> {
    parse(text)
}

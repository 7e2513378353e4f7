use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, RealMatrix};

/// Delay difference equation `x(t) + Σₖ Hₖ x(t − τₖ) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaySystem {
    n: usize,
    h: Vec<ComplexMatrix>,
}

fn field(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::InvalidField {
        field: field.into(),
        reason: reason.into(),
    }
}

impl DelaySystem {
    pub fn new(h: Vec<ComplexMatrix>) -> Result<Self> {
        let first = h
            .first()
            .ok_or_else(|| Error::InvalidSystem("at least one delay matrix is required".into()))?;
        let n = first.rows();
        if n == 0 {
            return Err(Error::InvalidSystem("state dimension must be positive".into()));
        }
        for (k, hk) in h.iter().enumerate() {
            if hk.rows() != n || hk.cols() != n {
                return Err(Error::InvalidSystem(format!(
                    "H[{k}] is {}x{}, expected {n}x{n}",
                    hk.rows(),
                    hk.cols()
                )));
            }
            if !hk.is_finite() {
                return Err(Error::InvalidSystem(format!("H[{k}] has non-finite entries")));
            }
        }
        Ok(Self { n, h })
    }

    pub fn from_real(h: Vec<RealMatrix>) -> Result<Self> {
        Self::new(h.iter().map(ComplexMatrix::from_real).collect())
    }

    /// State dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of delays.
    pub fn m(&self) -> usize {
        self.h.len()
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.h
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            h: self.h.iter().map(|m| m.scaled(Complex64::new(c, 0.0))).collect(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.h.iter().all(|m| m.as_slice().iter().all(|z| z.im == 0.0))
    }

    /// `Σₖ Hₖ e^{−iθₖ}`.
    pub fn symbol(&self, theta: &[f64]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.n, self.n);
        for (hk, &t) in self.h.iter().zip(theta) {
            out.add_scaled(hk, Complex64::cis(-t));
        }
        out
    }

    /// Parses `{"n": int, "m": int, "H": [[[..]]]}`; entries are reals or `[re, im]`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        Self::from_json_value(&v)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| field("<root>", "expected a JSON object"))?;
        let n = dim_field(obj.get("n"), "n")?;
        let m = dim_field(obj.get("m"), "m")?;
        let hs = obj
            .get("H")
            .ok_or_else(|| field("H", "missing"))?
            .as_array()
            .ok_or_else(|| field("H", "expected an array of matrices"))?;
        if hs.len() != m {
            return Err(field("H", format!("expected {m} matrices (m), found {}", hs.len())));
        }
        let mut mats = Vec::with_capacity(m);
        for (k, hk) in hs.iter().enumerate() {
            let rows = hk
                .as_array()
                .ok_or_else(|| field(format!("H[{k}]"), "expected an array of rows"))?;
            if rows.len() != n {
                return Err(field(
                    format!("H[{k}]"),
                    format!("expected {n} rows (n), found {}", rows.len()),
                ));
            }
            let mut data = Vec::with_capacity(n * n);
            for (i, row) in rows.iter().enumerate() {
                let row = row
                    .as_array()
                    .ok_or_else(|| field(format!("H[{k}][{i}]"), "expected an array of entries"))?;
                if row.len() != n {
                    return Err(field(
                        format!("H[{k}][{i}]"),
                        format!("expected {n} entries (n), found {}", row.len()),
                    ));
                }
                for (j, e) in row.iter().enumerate() {
                    data.push(entry(e, &format!("H[{k}][{i}][{j}]"))?);
                }
            }
            mats.push(ComplexMatrix::from_row_major(n, n, data));
        }
        Self::new(mats)
    }

    /// JSON in the input schema; real entries are written as plain numbers.
    pub fn to_json_value(&self) -> Value {
        let h: Vec<Value> = self
            .h
            .iter()
            .map(|m| {
                Value::Array(
                    (0..self.n)
                        .map(|i| {
                            Value::Array(
                                m.row(i)
                                    .iter()
                                    .map(|z| if z.im == 0.0 { json!(z.re) } else { json!([z.re, z.im]) })
                                    .collect(),
                            )
                        })
                        .collect(),
                )
            })
            .collect();
        json!({"n": self.n, "m": self.m(), "H": h})
    }
}

fn dim_field(v: Option<&Value>, name: &str) -> Result<usize> {
    let v = v.ok_or_else(|| field(name, "missing"))?;
    match v.as_u64() {
        Some(x) if x >= 1 => Ok(x as usize),
        _ => Err(field(name, format!("expected a positive integer, found {v}"))),
    }
}

fn finite(v: &Value, name: &str) -> Result<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(field(name, format!("expected a finite number, found {v}"))),
    }
}

fn entry(v: &Value, name: &str) -> Result<Complex64> {
    match v {
        Value::Array(pair) if pair.len() == 2 => Ok(Complex64::new(
            finite(&pair[0], name)?,
            finite(&pair[1], name)?,
        )),
        Value::Array(_) => Err(field(name, "complex entries must be [re, im] pairs")),
        _ => Ok(Complex64::new(finite(v, name)?, 0.0)),
    }
}

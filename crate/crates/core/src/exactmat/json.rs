//! The shared matrix file format:
//! `{"n": 3, "mode": "exact", "upper": ["0", "3/2", ...]}` with the upper
//! triangle listed row-major including the diagonal. Exact entries are
//! strings `"p/q"` or `"p"`; float entries are JSON numbers.

use std::str::FromStr;

use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use super::matrix::{Entries, SymmetricMatrix};
use super::MatrixError;

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    n: usize,
    mode: String,
    upper: Vec<Value>,
}

pub fn parse_rational(s: &str) -> Result<BigRational, MatrixError> {
    BigRational::from_str(s.trim()).map_err(|_| MatrixError::Format(format!("bad rational entry {s:?}")))
}

impl SymmetricMatrix {
    pub fn to_json_value(&self) -> Value {
        let upper = match self.entries() {
            Entries::Exact(v) => v.iter().map(|q| Value::String(q.to_string())).collect(),
            Entries::Float(v) => v.iter().map(|&x| Value::from(x)).collect(),
        };
        serde_json::to_value(MatrixFile { n: self.n(), mode: self.mode().as_str().into(), upper })
            .expect("matrix serializes")
    }

    pub fn from_json_value(v: &Value) -> Result<Self, MatrixError> {
        let file: MatrixFile =
            serde_json::from_value(v.clone()).map_err(|e| MatrixError::Format(e.to_string()))?;
        match file.mode.as_str() {
            "exact" => {
                let upper = file
                    .upper
                    .iter()
                    .map(|e| match e {
                        Value::String(s) => parse_rational(s),
                        Value::Number(n) if n.is_i64() => Ok(BigRational::from_integer(n.as_i64().unwrap().into())),
                        other => Err(MatrixError::Format(format!("exact entry must be a string, got {other}"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                SymmetricMatrix::from_upper_exact(file.n, upper)
            }
            "float" => {
                let upper = file
                    .upper
                    .iter()
                    .map(|e| {
                        e.as_f64()
                            .ok_or_else(|| MatrixError::Format(format!("float entry must be a number, got {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                SymmetricMatrix::from_upper_float(file.n, upper)
            }
            other => Err(MatrixError::Format(format!("unknown mode {other:?}"))),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("matrix serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self, MatrixError> {
        let v: Value = serde_json::from_str(s).map_err(|e| MatrixError::Format(e.to_string()))?;
        Self::from_json_value(&v)
    }
}

impl Serialize for SymmetricMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json_value().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymmetricMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        SymmetricMatrix::from_json_value(&v).map_err(D::Error::custom)
    }
}

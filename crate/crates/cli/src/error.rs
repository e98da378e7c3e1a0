use std::path::Path;

use kinstrata::census::CensusError;
use kinstrata::classify::{ClassifyError, LabelError};
use kinstrata::exactmat::MatrixError;
use kinstrata::matroid::MatroidError;
use kinstrata::poset::PosetError;
use kinstrata::realize::RealizeError;
use serde_json::{json, Value};

pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub witness: Value,
    pub exit: i32,
}

impl CliError {
    pub fn domain(code: &str, message: impl Into<String>, witness: Value) -> Self {
        CliError { code: code.into(), message: message.into(), witness, exit: EXIT_DOMAIN }
    }

    pub fn io(path: Option<&Path>, err: std::io::Error) -> Self {
        let target = path.map_or_else(|| "standard streams".to_string(), |p| p.display().to_string());
        CliError {
            code: "io".into(),
            message: format!("{target}: {err}"),
            witness: json!({ "path": target }),
            exit: EXIT_IO,
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        let message = message.into();
        CliError { code: "usage".into(), witness: json!({ "detail": message }), message, exit: EXIT_IO }
    }

    pub fn to_json(&self) -> Value {
        json!({ "code": self.code, "message": self.message, "witness": self.witness })
    }
}

impl From<MatrixError> for CliError {
    fn from(e: MatrixError) -> Self {
        let witness = match &e {
            MatrixError::IndexOutOfRange { index, n } => json!({ "index": index, "n": n }),
            MatrixError::TooLarge { n, limit } => json!({ "n": n, "limit": limit }),
            MatrixError::LengthMismatch { expected, got } => json!({ "expected": expected, "got": got }),
            MatrixError::NotSymmetric { i, j } => json!({ "entry": [i + 1, j + 1] }),
            other => json!({ "detail": other.to_string() }),
        };
        CliError::domain(e.code(), e.to_string(), witness)
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Matrix(m) => m.into(),
            other => CliError::domain(other.code(), other.to_string(), other.witness()),
        }
    }
}

impl From<MatroidError> for CliError {
    fn from(e: MatroidError) -> Self {
        let (code, witness) = match &e {
            MatroidError::TooLarge { n, limit } => ("n_too_large", json!({ "n": n, "limit": limit })),
            MatroidError::GroundSetMismatch { a, b } => ("ground_set_mismatch", json!({ "n": [a, b] })),
            MatroidError::InvalidPartition(d) => ("invalid_partition", json!({ "detail": d })),
            MatroidError::SupportMismatch => ("sign_support_mismatch", json!({ "detail": "signs must cover exactly the non-loops" })),
        };
        CliError::domain(code, e.to_string(), witness)
    }
}

impl From<CensusError> for CliError {
    fn from(e: CensusError) -> Self {
        let (code, witness) = match &e {
            CensusError::EmptyStratum { matroid, r } => ("empty_stratum", json!({ "matroid": matroid, "r": r })),
            CensusError::Inadmissible { label, r } => ("not_momentum_conserving", json!({ "label": label, "r": r })),
            CensusError::TooSmall(n) => ("n_too_small", json!({ "n": n })),
            CensusError::Matroid(m) => return m.clone().into(),
        };
        CliError::domain(code, e.to_string(), witness)
    }
}

impl From<LabelError> for CliError {
    fn from(e: LabelError) -> Self {
        match e {
            LabelError::Census(c) => c.into(),
            LabelError::Matroid(m) => m.into(),
            LabelError::NotAllPlus(ref s) => CliError::domain("not_all_plus", e.to_string(), json!({ "signs": s })),
            LabelError::DimensionMismatch { stated, derived } => {
                CliError::domain("dimension_mismatch", e.to_string(), json!({ "stated": stated, "formula": derived }))
            }
        }
    }
}

impl From<RealizeError> for CliError {
    fn from(e: RealizeError) -> Self {
        let message = e.to_string();
        let (code, witness) = match e {
            RealizeError::Census(c) => return c.into(),
            RealizeError::Label(l) => return l.into(),
            RealizeError::Matroid(m) => return m.into(),
            RealizeError::Classify(c) => return c.into(),
            RealizeError::Degenerate { attempts } => ("sampling_failed", json!({ "attempts": attempts })),
            RealizeError::NoConvergence { iterations, residual } => {
                ("no_convergence", json!({ "iterations": iterations, "residual": residual }))
            }
            RealizeError::RankNotThree(r) => ("rank_not_three", json!({ "rank": r })),
            RealizeError::InconsistentAngles(res) => ("inconsistent_angles", json!({ "residual": res })),
            RealizeError::Incomparable { source_label, target } => {
                ("incomparable", json!({ "source": source_label, "target": target }))
            }
            RealizeError::LengthMismatch { expected, got } => {
                ("length_mismatch", json!({ "expected": expected, "got": got }))
            }
        };
        CliError::domain(code, message, witness)
    }
}

impl From<PosetError> for CliError {
    fn from(e: PosetError) -> Self {
        match e {
            PosetError::TooLarge { n, limit } => {
                CliError::domain("n_too_large", e.to_string(), json!({ "n": n, "limit": limit }))
            }
            PosetError::NotAVertex => {
                CliError::domain("not_a_vertex", e.to_string(), json!({ "detail": "--below must name a vertex of the poset" }))
            }
            PosetError::Matroid(m) => m.into(),
            PosetError::Census(c) => c.into(),
            PosetError::Label(l) => l.into(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::domain("format", e.to_string(), json!({ "line": e.line(), "column": e.column() }))
    }
}

use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error(transparent)]
    Core(#[from] maxlenqm_core::Error),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{failed} check(s) failed")]
    ChecksFailed { failed: usize },
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 0 ok, 1 check failure, 2 configuration, 3 domain or divergence, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        use maxlenqm_core::Error as E;
        match self {
            CliError::ChecksFailed { .. } => 1,
            CliError::Config(_) | CliError::UnknownState(_) => 2,
            CliError::Core(E::Config(_)) => 2,
            CliError::Core(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    fn kind(&self) -> &'static str {
        use maxlenqm_core::Error as E;
        match self {
            CliError::Config(_) => "ConfigError",
            CliError::UnknownState(_) => "UnknownStateError",
            CliError::Io { .. } => "IOError",
            CliError::ChecksFailed { .. } => "CheckFailure",
            CliError::Core(e) => match e {
                E::Config(_) => "ConfigError",
                E::Domain { .. } => "DomainError",
                E::ChartBoundary { .. } => "ChartBoundaryError",
                E::NonFinite { .. } => "NonFiniteError",
                E::ZeroNorm => "ZeroNormError",
                E::DivergentMoment { .. } => "DivergentMomentError",
                E::NotNormalized { .. } => "NotNormalizedError",
                E::Index { .. } => "IndexError",
                E::AxisSingularity { .. } => "AxisSingularityError",
            },
        }
    }

    /// Machine-readable error record.
    pub fn to_json(&self) -> serde_json::Value {
        use maxlenqm_core::Error as E;
        let details = match self {
            CliError::Core(E::DivergentMoment { moment, full, guarded }) => {
                json!({ "moment": moment, "full": full, "guarded": guarded })
            }
            CliError::Core(E::NotNormalized { norm }) => json!({ "norm": norm }),
            CliError::Core(E::Domain { at, value }) => json!({ "at": at, "value": value }),
            CliError::Core(E::NonFinite { x }) => json!({ "x": x }),
            _ => json!({}),
        };
        json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "details": details,
            },
            "exit_code": self.exit_code(),
        })
    }
}

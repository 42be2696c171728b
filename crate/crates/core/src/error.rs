use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    /// The deformation factor `1 - f + g` is not strictly positive.
    #[error("deformation factor {value} is not positive at |x| = {at}")]
    Domain { at: f64, value: f64 },

    #[error("theta = {theta} is outside the open chart ({min}, {max})")]
    ChartBoundary { theta: f64, min: f64, max: f64 },

    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },

    #[error("state has zero norm")]
    ZeroNorm,

    /// Full-chart and guard-truncated quadrature disagree on a moment.
    #[error("moment {moment} diverges: {full:e} on the full chart vs {guarded:e} with guard band")]
    DivergentMoment {
        moment: String,
        full: f64,
        guarded: f64,
    },

    #[error("state is not normalized: <psi|psi> = {norm}")]
    NotNormalized { norm: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },

    #[error("|x_{axis}| = {value:e} is within {eps:e} of a coordinate hyperplane")]
    AxisSingularity { axis: usize, value: f64, eps: f64 },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

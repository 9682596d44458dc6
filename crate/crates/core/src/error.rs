use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("axis {axis} out of range for a {dims}-dimensional distribution")]
    AxisOutOfRange { axis: usize, dims: usize },

    #[error("simulation cap exceeded: {0}")]
    SizeCap(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("function is not smooth enough: {0}")]
    NotSmooth(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge on [{lo}, {hi}] (estimated error {err:e})")]
    Quadrature { lo: f64, hi: f64, err: f64 },

    #[error("coefficient decay violated: worst n = {worst_n}, tail/head ratio {ratio:.3}")]
    DecayViolation { worst_n: usize, ratio: f64 },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

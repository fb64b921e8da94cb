use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{what} did not converge within {terms} terms")]
    NonConvergence { what: &'static str, terms: usize },
    #[error("parameter pole: {0}")]
    ParameterPole(String),
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("Pearson condition violated: {0}")]
    Constraint(String),
    #[error("alpha matrix is singular")]
    Singular,
    #[error("alpha constraint violated in row {0}")]
    ConstraintViolated(usize),
    #[error("no pseudo-vacuum reachable from the start occupation")]
    NoPseudoVacuum,
    #[error("inconsistent sector: {0}")]
    InconsistentSector(String),
    #[error("Im z = {im} outside the strip ({lo}, {hi})")]
    OutsideStrip { im: f64, lo: f64, hi: f64 },
    #[error("index {index} exceeds dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("eigen-decomposition failed: {0}")]
    Eigen(String),
    #[error("cutoff overflow: {0}")]
    CutoffOverflow(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

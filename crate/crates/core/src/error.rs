use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid box domain: {0}")]
    InvalidDomain(String),

    #[error("rejection sampling gave up after {attempts} attempts")]
    RejectionCapExceeded { attempts: usize },

    #[error("all union weights are zero")]
    ZeroWeights,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("vector is not unit length (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("antipodal pair, rotation not unique")]
    AntipodalRotation,

    #[error("parameter point outside the standard simplex: ({u}, {v})")]
    OutsideSimplex { u: f64, v: f64 },

    #[error("non-finite surface map value at grid point ({i}, {j}) = ({u}, {v})")]
    NonFiniteMap { i: usize, j: usize, u: f64, v: f64 },

    #[error("non-finite field value at t = {t}")]
    NonFiniteField { t: f64 },

    #[error("surface not found in ball after {lines} lines")]
    SurfaceNotFound { lines: u64 },

    #[error("value {x} outside [0, {last})")]
    OutOfRange { x: f64, last: f64 },

    #[error("surface has zero total area")]
    ZeroArea,

    #[error("critical point: gradient vanishes at ({x}, {y}, {z})")]
    CriticalPoint { x: f64, y: f64, z: f64 },

    #[error("degenerate neighborhood around point {index}")]
    DegenerateNeighborhood { index: usize },

    #[error("not enough points: need {needed}, have {have}")]
    TooFewPoints { needed: usize, have: usize },

    #[error("region probability {p} must lie strictly between 0 and 1")]
    DegenerateProbability { p: f64 },

    #[error("counter budget exceeded: {cells} cells > {limit}")]
    BudgetExceeded { cells: u64, limit: u64 },

    #[error("bin {bin} is empty; generate more points")]
    EmptyBin { bin: usize },

    #[error("expression error at column {column}: {message}")]
    Expression { column: usize, message: String },

    #[error("mesh parse error at line {line}: {message}")]
    MeshParse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("pole of the Gamma function at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },
    #[error("divergent quadrature: {0}")]
    DivergentQuadrature(String),
    #[error("zero frequency: operation requires λ ≠ 0")]
    ZeroFrequency,
    #[error("level {level} out of range (basis supports up to {max})")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("grid certificate failed at level {level}, scale {scale}: Gram defect {defect:.3e} > {tolerance:.1e}")]
    Certificate {
        level: usize,
        scale: f64,
        defect: f64,
        tolerance: f64,
    },
    #[error("raising step leaves the basis: level {level} exceeds {max}")]
    ReserveExceeded { level: usize, max: usize },
    #[error("sequence too short: need {needed}, have {have}")]
    Length { needed: usize, have: usize },
    #[error("unresolved constants: fitting system has rank {rank} < {columns}")]
    UnresolvedConstants { rank: usize, columns: usize },
    #[error("grid coverage: {0}")]
    GridCoverage(String),
    #[error("degenerate ratio: right-hand side vanishes")]
    DegenerateRatio,
    #[error("zero mode: {0}")]
    ZeroMode(String),
    #[error("insufficient range: {0}")]
    InsufficientRange(String),
    #[error("interpolation certificate: {0}")]
    Interpolation(String),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

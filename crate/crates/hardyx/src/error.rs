//! Error type shared by every module of the workbench.

use thiserror::Error;

/// Everything that can go wrong while building grids, applying operators or
/// evaluating quasi-norms.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample at lattice point {coords:?}")]
    NonFiniteSample { coords: Vec<usize> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid ladder: {0}")]
    InvalidLadder(String),

    #[error("kernel scale t = {t} out of range (0, {max}]")]
    KernelScale { t: f64, max: f64 },

    #[error("component index {j} out of range 1..={n}")]
    ComponentIndex { j: usize, n: usize },

    #[error("template has (near) zero integral: |phi^(0)| = {integral}")]
    ZeroMeanTemplate { integral: f64 },

    #[error("support violation: mass fraction {fraction:.3e} lies outside the admissible region")]
    SupportViolation { fraction: f64 },

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("unsupported space variant for this operation: {0}")]
    UnsupportedVariant(String),

    #[error("sphere probe exits the slab: center t = {center_t}, radius = {radius}, slab [{t_min}, {t_max}]")]
    SphereOutsideSlab {
        center_t: f64,
        radius: f64,
        t_min: f64,
        t_max: f64,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

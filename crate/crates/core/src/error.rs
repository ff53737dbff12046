use thiserror::Error;

/// Crate-wide error type.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("ambient dimension must be >= 1, got {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("point lies outside the open unit ball (|z|^2 = {norm_sq})")]
    PointOutsideBall { norm_sq: f64 },

    #[error("point lies outside the closed unit ball (|z|^2 = {norm_sq})")]
    PointOutsideClosedBall { norm_sq: f64 },

    #[error("target point is not on the unit sphere (|z|^2 = {norm_sq})")]
    NotUnitVector { norm_sq: f64 },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("degree {degree} exceeds bound {bound}")]
    DegreeExceedsBound { degree: usize, bound: usize },

    #[error(
        "pairing would read past the stored truncation (needs degree {needed}, \
         vector is only exact through degree {bound}); refusing to truncate silently"
    )]
    TruncationOverflow { needed: usize, bound: usize },

    #[error("truncation {truncation} too small: need at least {required}")]
    TruncationTooSmall { truncation: usize, required: usize },

    #[error(
        "power iteration did not converge after {iterations} iterations \
         (last Rayleigh values {trace:?})"
    )]
    NonConvergence { iterations: usize, trace: Vec<f64> },

    #[error("kernel tail bound {bound:.3e} exceeds tolerance {tol:.3e}; raise the truncation")]
    TailBoundExceeded { bound: f64, tol: f64 },

    #[error("sample grid is empty after applying the exclusion cap")]
    EmptyGrid,

    #[error("singular witness construction requires a single atom, got {0}")]
    MultiAtom(usize),

    #[error("expansion exceeds the total-degree cap {cap}")]
    DegreeCapExceeded { cap: usize },

    #[error("parse error at byte {at}: {msg}")]
    Parse { at: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

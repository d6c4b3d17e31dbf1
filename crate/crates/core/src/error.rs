use thiserror::Error;

/// Failures raised by validation and by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max |m_ij - conj(m_ji)| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is not 1 (|tr - 1| = {deviation:e}, trace = {trace})")]
    TraceNotOne { trace: f64, deviation: f64 },

    #[error("matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("vectors are not orthonormal (max |<v_i|v_j> - delta_ij| = {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("Hermitian eigensolver did not converge")]
    ConvergenceFailure,

    #[error("degenerate spectrum: min eigenvalue gap {gap:e} <= threshold {threshold:e}")]
    DegenerateSpectrum { gap: f64, threshold: f64 },

    #[error("weights do not form a probability vector (sum = {sum}, min = {min})")]
    WeightsNotNormalized { sum: f64, min: f64 },

    #[error("points are not pairwise distinct (min gap {gap:e} <= threshold {threshold:e})")]
    PointsNotDistinct { gap: f64, threshold: f64 },

    #[error("no violating epsilon found for c = {c} (scanned down to epsilon = {scan_bound:e})")]
    NotFound { c: f64, scan_bound: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

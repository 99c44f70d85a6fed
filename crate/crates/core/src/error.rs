use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quaternion is not a unit quaternion: |u| = {norm}")]
    NotUnit { norm: f64 },

    #[error("matrix dimension must be at least 1")]
    EmptyDimension,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("input contains non-finite entries")]
    NonFinite,

    #[error("vector is zero")]
    ZeroVector,

    #[error("QR iteration did not converge: {deflated} of {dimension} eigenvalues deflated")]
    NoConvergence { deflated: usize, dimension: usize },

    #[error("spectrum has odd length {0}; conjugate pairing needs an even count")]
    OddSpectrum(usize),

    #[error("spectrum is not conjugate-paired: residual {residual:e} exceeds {tolerance:e}")]
    Unpaired { residual: f64, tolerance: f64 },

    #[error("coincident points at indices {0} and {1}")]
    CoincidentPoints(usize, usize),

    #[error("point {0} is not in the open upper half-plane")]
    NotUpperHalfPlane(usize),

    #[error("potential is not conjugate invariant: V(z) - V(conj z) = {0:e}")]
    NotConjugateInvariant(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not reach tolerance {tolerance:e}: estimated error {error:e}")]
    QuadratureFailed { error: f64, tolerance: f64 },

    #[error("least-squares fit is rank deficient (rank {rank} of {columns})")]
    RankDeficient { rank: usize, columns: usize },

    #[error("class-weighted measure has zero total mass")]
    ZeroMass,
}

pub type Result<T> = std::result::Result<T, Error>;

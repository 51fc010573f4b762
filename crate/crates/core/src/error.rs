use thiserror::Error;

/// Failure modes of the Floquet and bath computations.
///
/// Numerical payloads are stored as `f64` regardless of the working scalar.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: &'static str },

    #[error("monodromy determinant deviates from one by {deviation:e} (allowed {allowed:e})")]
    InvariantViolation { deviation: f64, allowed: f64 },

    #[error("monodromy is not stable (trace = {trace})")]
    NotStable { trace: f64 },

    #[error("Wronskian {0:e} is numerically zero")]
    WronskianDegenerate(f64),

    #[error("|xi| = {value:e} at sample {index}; trajectory is corrupt")]
    QuadratureFailure { index: usize, value: f64 },

    #[error("periodic part does not close: |v(0) - v(T)| = {mismatch:e}, limit {limit:e}")]
    PeriodicityViolation { mismatch: f64, limit: f64 },

    #[error("phase integral changes by {change:e} when {n_samples} samples are halved")]
    PhaseNotConverged { change: f64, n_samples: usize },

    #[error("Fourier tail mass {tail_mass:e} exceeds threshold with {n_samples} samples")]
    TailNotConverged { tail_mass: f64, n_samples: usize },

    #[error("transition frequency {0:e} lies inside the zero-frequency guard band")]
    NearZeroFrequency(f64),

    #[error("ladder frequency nu + {ell} = {frequency:e} hits the zero-frequency guard band")]
    BorderDivergence { ell: i64, frequency: f64 },

    #[error("rate denominator {0:e} underflowed")]
    DegenerateDenominator(f64),

    #[error("|r - 1| = {0:e}: quasitemperature is infinite")]
    InfiniteQuasitemp(f64),

    #[error("r = {0} >= 1: no normalizable quasistationary state")]
    QuasithermallyUnstable(f64),

    #[error("master-equation recursion grows: up/down = {ratio} at n = {n}")]
    NonNormalizable { n: usize, ratio: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

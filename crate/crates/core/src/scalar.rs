//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar the solvers are generic over: `f32` or `f64`.
///
/// The associated constants carry the precision-dependent defaults. Fixed
/// thresholds that are meaningful in any precision (stability margins,
/// guard bands) are written as literals where they are used.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Debug + Display + Default
{
    /// Default relative/absolute tolerance of the adaptive integrator.
    const INTEGRATION_TOL: f64;
    /// Relative residual allowed between `v(0)` and `v(T)`.
    const PERIODICITY_TOL: f64;
    /// Largest relative Fourier mass that may be dropped by truncation.
    const TAIL_TOL: f64;
    /// Largest change of `ν` allowed when the phase grid is halved.
    const PHASE_TOL: f64;

    /// Lossless for the literals used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("representable count")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const INTEGRATION_TOL: f64 = 1e-12;
    const PERIODICITY_TOL: f64 = 1e-8;
    const TAIL_TOL: f64 = 1e-12;
    const PHASE_TOL: f64 = 1e-10;
}

impl Real for f32 {
    const INTEGRATION_TOL: f64 = 1e-6;
    const PERIODICITY_TOL: f64 = 1e-3;
    const TAIL_TOL: f64 = 1e-6;
    const PHASE_TOL: f64 = 1e-4;
}

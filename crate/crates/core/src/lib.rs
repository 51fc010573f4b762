//! Periodic thermodynamics of the parametrically driven harmonic oscillator.
//!
//! The pipeline runs from the classical Hill equation ([`hill`]) through the
//! canonical Floquet mode and its Fourier series ([`modes`]) to bath-induced
//! rates, the geometric quasistationary distribution and the steady-state
//! dissipation ([`thermo`], [`bath`]).
//!
//! Every numerical type is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the tolerances of
//! the stability analysis are calibrated for.

pub mod bath;
pub mod error;
pub mod hill;
pub mod modes;
pub mod ode;
pub mod scalar;
pub mod thermo;

pub use error::{Error, Result};
pub use scalar::Real;

pub type SpringParams = hill::SpringParams<f64>;
pub type Monodromy = hill::Monodromy<f64>;
pub type Stability = hill::Stability<f64>;
pub type Trajectory = hill::Trajectory<f64>;
pub type FloquetMode = modes::FloquetMode<f64>;
pub type FloquetAnalysis = modes::FloquetAnalysis<f64>;
pub type ModeOptions = modes::ModeOptions<f64>;
pub type QuasienergyLadder = modes::QuasienergyLadder<f64>;
pub type BathModel = bath::BathModel<f64>;
pub type SpectralDensity = bath::SpectralDensity<f64>;
pub type QuasiSteadyState = thermo::QuasiSteadyState<f64>;
pub type Dissipation = thermo::Dissipation<f64>;

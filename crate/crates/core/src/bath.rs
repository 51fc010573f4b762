//! Bosonic heat bath: thermal occupation factors and spectral densities.
//!
//! Frequencies are in units of the drive frequency `ω`; `beta` stands for
//! the dimensionless `βħω`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Half-width of the excluded band around zero frequency.
pub const ZERO_FREQUENCY_GUARD: f64 = 1e-9;

/// Thermal factor `N(ω̃)` for absorbing (`ω̃ > 0`) or emitting (`ω̃ < 0`) a
/// bath quantum: `1/(e^{βω̃} − 1)` and `1/(1 − e^{βω̃})` respectively.
pub fn occupation<T: Real>(omega_tilde: T, beta: T) -> Result<T> {
    if !(omega_tilde.abs() >= T::lit(ZERO_FREQUENCY_GUARD)) {
        return Err(Error::NearZeroFrequency(omega_tilde.to_f64_lossy()));
    }
    let x = beta * omega_tilde;
    // Both branches are -1/expm1(x) up to sign; expm1 keeps small |x| accurate.
    Ok(if omega_tilde > T::zero() {
        T::one() / x.exp_m1()
    } else {
        -T::one() / x.exp_m1()
    })
}

/// Shape of the bath spectral density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SpectralDensity<T> {
    /// `J₀ (ω̃/ω̃₀)^s`; `s = 1` is Ohmic.
    #[serde(rename = "power")]
    PowerLaw { s: T, omega0: T },
    /// `J₀ exp(−(ω̃ − ω̃₀)²/Δω̃²)` with `delta_sq = Δω̃²`.
    Gaussian { omega0: T, delta_sq: T },
}

fn default_j0<T: Real>() -> T {
    T::one()
}

/// Bath temperature, density shape and overall amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct BathModel<T> {
    /// `βħω`.
    pub beta: T,
    pub density: SpectralDensity<T>,
    /// Amplitude `J₀`. Cancels from `r`; only sets the scale of `R₀`.
    #[serde(default = "default_j0")]
    pub j0: T,
}

impl<T: Real> BathModel<T> {
    pub fn new(beta: T, density: SpectralDensity<T>) -> Result<Self> {
        Self {
            beta,
            density,
            j0: T::one(),
        }
        .validated()
    }

    pub fn with_j0(mut self, j0: T) -> Result<Self> {
        self.j0 = j0;
        self.validated()
    }

    pub fn power_law(beta: T, s: T, omega0: T) -> Result<Self> {
        Self::new(beta, SpectralDensity::PowerLaw { s, omega0 })
    }

    pub fn gaussian(beta: T, omega0: T, delta_sq: T) -> Result<Self> {
        Self::new(beta, SpectralDensity::Gaussian { omega0, delta_sq })
    }

    /// Checks the parameter ranges; used after deserialization.
    pub fn validated(self) -> Result<Self> {
        let positive = |x: T| x.is_finite() && x > T::zero();
        let bad = |what: &str, x: T| Err(Error::InvalidParameter(format!("{what} = {x}")));
        if !positive(self.beta) {
            return bad("beta", self.beta);
        }
        if !positive(self.j0) {
            return bad("j0", self.j0);
        }
        match self.density {
            SpectralDensity::PowerLaw { s, omega0 } => {
                if !positive(s) {
                    return bad("s", s);
                }
                if !positive(omega0) {
                    return bad("omega0", omega0);
                }
            }
            SpectralDensity::Gaussian { omega0, delta_sq } => {
                if !(omega0.is_finite() && omega0 >= T::zero()) {
                    return bad("omega0", omega0);
                }
                if !positive(delta_sq) {
                    return bad("delta_sq", delta_sq);
                }
            }
        }
        Ok(self)
    }

    pub fn spectral_density(&self, abs_omega: T) -> T {
        spectral_density(abs_omega, self)
    }

    pub fn occupation(&self, omega_tilde: T) -> Result<T> {
        occupation(omega_tilde, self.beta)
    }
}

/// `J(|ω̃|)`; non-negative for every valid model.
pub fn spectral_density<T: Real>(abs_omega: T, model: &BathModel<T>) -> T {
    match model.density {
        SpectralDensity::PowerLaw { s, omega0 } => {
            if abs_omega <= T::zero() {
                T::zero()
            } else {
                model.j0 * (abs_omega / omega0).powf(s)
            }
        }
        SpectralDensity::Gaussian { omega0, delta_sq } => {
            let d = abs_omega - omega0;
            model.j0 * (-(d * d) / delta_sq).exp()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn occupation_closed_forms() {
        let up = occupation(1.0, 1.0).unwrap();
        assert!((up - 1.0 / (E - 1.0)).abs() < 1e-15);
        assert!((up - 0.581976706869326).abs() < 1e-12);
        let down = occupation(-1.0, 1.0).unwrap();
        assert!((down - 1.0 / (1.0 - 1.0 / E)).abs() < 1e-15);
        assert!((down - up - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_temperature_limit() {
        assert_eq!(occupation(0.5, f64::INFINITY).unwrap(), 0.0);
        assert_eq!(occupation(-0.5, f64::INFINITY).unwrap(), 1.0);
        assert!(occupation(0.5, 1e3).unwrap() < 1e-200);
    }

    #[test]
    fn guard_band() {
        assert!(matches!(
            occupation(5e-10, 1.0),
            Err(Error::NearZeroFrequency(_))
        ));
        assert!(occupation(-5e-10, 1.0).is_err());
        assert!(occupation(0.0, 1.0).is_err());
        assert!(occupation(2e-9, 1.0).is_ok());
    }

    #[test]
    fn density_examples() {
        let ohm = BathModel::power_law(1.0, 1.0, 1.0).unwrap();
        assert_eq!(ohm.spectral_density(2.0), 2.0);
        let gauss = BathModel::gaussian(1.0, 3.2, 0.1).unwrap();
        assert_eq!(gauss.spectral_density(3.2), 1.0);
        let sub = BathModel::power_law(1.0, 0.5, 1.0).unwrap();
        assert_eq!(sub.spectral_density(0.0), 0.0);
        let scaled = ohm.with_j0(2.5).unwrap();
        assert_eq!(scaled.spectral_density(2.0), 5.0);
    }

    #[test]
    fn model_validation() {
        assert!(BathModel::power_law(0.0, 1.0, 1.0).is_err());
        assert!(BathModel::power_law(1.0, -1.0, 1.0).is_err());
        assert!(BathModel::power_law(1.0, 1.0, 0.0).is_err());
        assert!(BathModel::gaussian(1.0, -0.1, 0.1).is_err());
        assert!(BathModel::gaussian(1.0, 0.0, 0.1).is_ok());
        assert!(BathModel::gaussian(1.0, 3.0, 0.0).is_err());
        assert!(BathModel::power_law(1.0, 1.0, 1.0).unwrap().with_j0(0.0).is_err());
    }

    #[test]
    fn json_fragments() {
        let m: BathModel<f64> = serde_json::from_str(
            r#"{"beta": 1.0, "density": {"type": "power", "s": 1.0, "omega0": 1.0}}"#,
        )
        .unwrap();
        assert_eq!(m, BathModel::power_law(1.0, 1.0, 1.0).unwrap());
        let g: BathModel<f64> = serde_json::from_str(
            r#"{"beta": 1.0, "density": {"type": "gaussian", "omega0": 3.2, "delta_sq": 0.1}, "j0": 2.0}"#,
        )
        .unwrap();
        assert_eq!(g.j0, 2.0);
        assert!(matches!(g.density, SpectralDensity::Gaussian { .. }));
    }
}

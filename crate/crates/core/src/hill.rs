//! Classical Hill equation `ξ̈ + k(t)/M · ξ = 0` over one drive period.
//!
//! Working units fix the drive frequency `ω = 1`, so the period is `2π`.
//! The Mathieu spring `k/M = Ω₀² − Ω₁² cos t` is parametrized by
//! `a = 4Ω₀²` and `q = 2Ω₁²`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::scalar::Real;

/// Traces with `|trace| >= 2 - UNSTABLE_MARGIN` are classified unstable.
pub const UNSTABLE_MARGIN: f64 = 1e-10;
/// Stable points with `2 - |trace| < NEAR_BORDER_MARGIN` carry a flag.
pub const NEAR_BORDER_MARGIN: f64 = 1e-6;
const MIN_WRONSKIAN: f64 = 1e-12;

/// A `2π`-periodic spring function divided by the mass.
pub trait SpringFunction<T: Real>: Sync {
    fn stiffness(&self, t: T) -> T;
}

/// Arbitrary spring function from a closure.
pub struct HillSpring<F>(pub F);

impl<T: Real, F: Fn(T) -> T + Sync> SpringFunction<T> for HillSpring<F> {
    fn stiffness(&self, t: T) -> T {
        (self.0)(t)
    }
}

/// Mathieu parameters `(a, q)` in the standard form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpringParams<T> {
    pub a: T,
    pub q: T,
}

impl<T: Real> SpringParams<T> {
    pub fn new(a: T, q: T) -> Result<Self> {
        if !(a.is_finite() && a > T::zero()) {
            return Err(Error::InvalidParameter(format!("a must be > 0, got {a}")));
        }
        if !(q.is_finite() && q >= T::zero()) {
            return Err(Error::InvalidParameter(format!("q must be >= 0, got {q}")));
        }
        Ok(Self { a, q })
    }

    /// Undriven frequency `Ω₀/ω = √a / 2`.
    pub fn omega0(&self) -> T {
        self.a.sqrt() / T::lit(2.0)
    }

    /// Squared drive amplitude `Ω₁²/ω² = q / 2`.
    pub fn omega1_sq(&self) -> T {
        self.q / T::lit(2.0)
    }
}

impl<T: Real> SpringFunction<T> for SpringParams<T> {
    fn stiffness(&self, t: T) -> T {
        self.a / T::lit(4.0) - self.q / T::lit(2.0) * t.cos()
    }
}

/// Mechanical stability of one-cycle evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stability<T> {
    /// Multipliers `e^{±iϑ}` with `ϑ ∈ (0, π)`.
    Stable { theta: T },
    /// Real multipliers around `+1` (integer `ν/ω` at the border).
    UnstableCollisionPlus,
    /// Real multipliers around `−1` (half-integer `ν/ω` at the border).
    UnstableCollisionMinus,
}

/// One-period evolution matrix of `(ξ, ξ̇)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy<T> {
    /// Row-major: `[[ξ⁽¹⁾(T), ξ⁽²⁾(T)], [ξ̇⁽¹⁾(T), ξ̇⁽²⁾(T)]]`.
    pub m: [[T; 2]; 2],
    pub trace: T,
    pub stability: Stability<T>,
    pub near_border: bool,
    /// Integrator tolerance the matrix was computed with.
    pub tol: T,
}

impl<T: Real> Monodromy<T> {
    pub fn from_matrix(m: [[T; 2]; 2], tol: T) -> Self {
        let trace = m[0][0] + m[1][1];
        let two = T::lit(2.0);
        let gap = two - trace.abs();
        let stability = if gap <= T::lit(UNSTABLE_MARGIN) {
            if trace > T::zero() {
                Stability::UnstableCollisionPlus
            } else {
                Stability::UnstableCollisionMinus
            }
        } else {
            Stability::Stable {
                theta: (trace / two).acos(),
            }
        };
        let near_border = matches!(stability, Stability::Stable { .. })
            && gap < T::lit(NEAR_BORDER_MARGIN);
        Self {
            m,
            trace,
            stability,
            near_border,
            tol,
        }
    }

    pub fn det(&self) -> T {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn is_stable(&self) -> bool {
        matches!(self.stability, Stability::Stable { .. })
    }

    pub fn theta(&self) -> Option<T> {
        match self.stability {
            Stability::Stable { theta } => Some(theta),
            _ => None,
        }
    }

    /// Eigenvalues of the matrix; complex conjugates in the stable case.
    pub fn multipliers(&self) -> (Complex<T>, Complex<T>) {
        let half = self.trace / T::lit(2.0);
        let disc = half * half - self.det();
        if disc < T::zero() {
            let im = (-disc).sqrt();
            (Complex::new(half, im), Complex::new(half, -im))
        } else {
            let s = disc.sqrt();
            (Complex::new(half + s, T::zero()), Complex::new(half - s, T::zero()))
        }
    }
}

/// Fundamental matrix `Φ(t)` at each requested time, starting from the identity.
pub fn fundamental_matrices<T: Real, S: SpringFunction<T> + ?Sized>(
    spring: &S,
    tol: T,
    times: &[T],
) -> Result<Vec<[[T; 2]; 2]>> {
    let solver = Dopri5::new(tol);
    let rhs = |t: T, y: &[T; 4]| {
        let k = spring.stiffness(t);
        [y[1], -k * y[0], y[3], -k * y[2]]
    };
    let states = solver.integrate(
        rhs,
        T::zero(),
        [T::one(), T::zero(), T::zero(), T::one()],
        times,
    )?;
    Ok(states
        .into_iter()
        .map(|s| [[s[0], s[2]], [s[1], s[3]]])
        .collect())
}

/// Integrates the two basis solutions over one period and classifies the result.
pub fn integrate_basis<T: Real, S: SpringFunction<T> + ?Sized>(
    spring: &S,
    tol: T,
) -> Result<Monodromy<T>> {
    if !(tol >= T::lit(1e-14) && tol <= T::lit(1e-6)) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol} outside [1e-14, 1e-6]"
        )));
    }
    let period = T::PI() * T::lit(2.0);
    let phi = fundamental_matrices(spring, tol, &[period])?;
    let monodromy = Monodromy::from_matrix(phi[0], tol);
    let deviation = (monodromy.det() - T::one()).abs();
    // Deep in an instability tongue the entries grow like e^{μT} and the
    // determinant loses digits to cancellation; the bound follows that scale.
    let [[m11, m12], [m21, m22]] = monodromy.m;
    let scale = (m11 * m22).abs() + (m12 * m21).abs();
    let allowed = T::lit(100.0) * tol * scale.max(T::one());
    if !(deviation <= allowed) {
        return Err(Error::InvariantViolation {
            deviation: deviation.to_f64_lossy(),
            allowed: allowed.to_f64_lossy(),
        });
    }
    Ok(monodromy)
}

/// Complex Floquet solution sampled on `t_k = 2πk/N`, `k = 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub xi: Vec<Complex<T>>,
    pub xi_dot: Vec<Complex<T>>,
    /// `ξ(T)` and `ξ̇(T)` one full period after the first sample.
    pub xi_end: Complex<T>,
    pub xi_dot_end: Complex<T>,
    /// `Ω = Im(ξ̇ ξ*)`, positive.
    pub wronskian: T,
    /// Multiplier of `ξ` over one period, `ξ(T) = λ ξ(0)`.
    pub multiplier: Complex<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn n_samples(&self) -> usize {
        self.xi.len()
    }

    /// Largest relative deviation of `Im(ξ̇ ξ*)` from the stored Wronskian.
    pub fn wronskian_drift(&self) -> T {
        self.xi
            .iter()
            .zip(&self.xi_dot)
            .chain(std::iter::once((&self.xi_end, &self.xi_dot_end)))
            .map(|(x, xd)| ((xd * x.conj()).im - self.wronskian).abs() / self.wronskian)
            .fold(T::zero(), T::max)
    }

    /// Same solution multiplied by a complex constant; `Ω` scales by `|c|²`.
    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self {
            times: self.times.clone(),
            xi: self.xi.iter().map(|x| x * c).collect(),
            xi_dot: self.xi_dot.iter().map(|x| x * c).collect(),
            xi_end: self.xi_end * c,
            xi_dot_end: self.xi_dot_end * c,
            wronskian: self.wronskian * c.norm_sqr(),
            multiplier: self.multiplier,
        }
    }
}

/// Samples the stable Floquet solution built from the eigenvector of `M`.
///
/// The eigenvector is normalized to `ξ(0) = 1`; its conjugate is used when
/// that yields a positive Wronskian.
pub fn stable_trajectory<T: Real, S: SpringFunction<T> + ?Sized>(
    spring: &S,
    monodromy: &Monodromy<T>,
    n_samples: usize,
) -> Result<Trajectory<T>> {
    let theta = monodromy.theta().ok_or(Error::NotStable {
        trace: monodromy.trace.to_f64_lossy(),
    })?;
    if n_samples < 256 || !n_samples.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "n_samples must be a power of two >= 256, got {n_samples}"
        )));
    }
    let [[m11, m12], _] = monodromy.m;
    let mut multiplier = Complex::new(theta.cos(), theta.sin());
    // M y = λ y with y = (1, y2); m12 != 0 whenever the multipliers are non-real.
    let mut y2 = (multiplier - m11) / m12;
    if y2.im.abs() < T::lit(MIN_WRONSKIAN) {
        return Err(Error::WronskianDegenerate(y2.im.to_f64_lossy()));
    }
    if y2.im < T::zero() {
        y2 = y2.conj();
        multiplier = multiplier.conj();
    }

    let period = T::PI() * T::lit(2.0);
    let n = T::from_usize_lossy(n_samples);
    let grid: Vec<T> = (0..=n_samples)
        .map(|k| period * T::from_usize_lossy(k) / n)
        .collect();
    let phi = fundamental_matrices(spring, monodromy.tol, &grid)?;

    let one = Complex::new(T::one(), T::zero());
    let combine = |p: &[[T; 2]; 2]| {
        let xi = one * p[0][0] + y2 * p[0][1];
        let xi_dot = one * p[1][0] + y2 * p[1][1];
        (xi, xi_dot)
    };
    let (mut xi, mut xi_dot): (Vec<_>, Vec<_>) = phi.iter().map(combine).unzip();
    let xi_end = xi.pop().expect("grid has N + 1 points");
    let xi_dot_end = xi_dot.pop().expect("grid has N + 1 points");
    let mut times = grid;
    times.pop();

    Ok(Trajectory {
        times,
        xi,
        xi_dot,
        xi_end,
        xi_dot_end,
        wronskian: y2.im,
        multiplier,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn mathieu(a: f64, q: f64) -> SpringParams<f64> {
        SpringParams::new(a, q).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(SpringParams::new(0.0, 1.0).is_err());
        assert!(SpringParams::new(8.0, -0.1).is_err());
        assert!(SpringParams::new(f64::NAN, 0.0).is_err());
        let p = mathieu(8.0, 2.0);
        assert!((p.omega0() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(p.omega1_sq(), 1.0);
    }

    #[test]
    fn undriven_monodromy_is_rotation() {
        let m = integrate_basis(&mathieu(8.0, 0.0), 1e-12).unwrap();
        let w = 2f64.sqrt();
        assert!((m.trace - 2.0 * (w * 2.0 * PI).cos()).abs() < 1e-10);
        assert!((m.m[0][1] - (w * 2.0 * PI).sin() / w).abs() < 1e-10);
        let theta = m.theta().unwrap();
        // 2π√2 folded into (0, π).
        let folded = (2.0 * PI * w).rem_euclid(2.0 * PI);
        let folded = if folded > PI { 2.0 * PI - folded } else { folded };
        assert!((theta - folded).abs() < 1e-9);
        assert!(!m.near_border);
    }

    #[test]
    fn instability_window_beyond_first_border() {
        let m = integrate_basis(&mathieu(8.0, 7.0), 1e-12).unwrap();
        assert_eq!(m.stability, Stability::UnstableCollisionPlus);
        assert!((m.det() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tolerance_range_enforced() {
        assert!(integrate_basis(&mathieu(8.0, 1.0), 1e-3).is_err());
        assert!(integrate_basis(&mathieu(8.0, 1.0), 1e-16).is_err());
    }

    #[test]
    fn classification_thresholds() {
        let stable = Monodromy::from_matrix([[1.0 - 5e-7, 0.1], [0.0, 1.0]], 1e-12);
        assert!(stable.is_stable() && stable.near_border);
        let border = Monodromy::from_matrix([[-1.0, 0.1], [0.0, -1.0 + 5e-11]], 1e-12);
        assert_eq!(border.stability, Stability::UnstableCollisionMinus);
    }

    #[test]
    fn unstable_trajectory_rejected() {
        let p = mathieu(8.0, 7.0);
        let m = integrate_basis(&p, 1e-12).unwrap();
        assert!(matches!(
            stable_trajectory(&p, &m, 1024),
            Err(Error::NotStable { .. })
        ));
    }

    #[test]
    fn sample_count_must_be_power_of_two() {
        let p = mathieu(8.0, 1.0);
        let m = integrate_basis(&p, 1e-12).unwrap();
        assert!(stable_trajectory(&p, &m, 1000).is_err());
        assert!(stable_trajectory(&p, &m, 128).is_err());
    }

    #[test]
    fn undriven_trajectory_has_constant_modulus() {
        let p = mathieu(8.0, 0.0);
        let m = integrate_basis(&p, 1e-12).unwrap();
        let traj = stable_trajectory(&p, &m, 256).unwrap();
        let w = 2f64.sqrt();
        for (t, x) in traj.times.iter().zip(&traj.xi) {
            assert!((x.norm() - 1.0).abs() < 1e-9);
            let expect = Complex::new((w * t).cos(), (w * t).sin());
            assert!((x - expect).norm() < 1e-9);
        }
        assert!((traj.wronskian - w).abs() < 1e-9);
    }

    #[test]
    fn wronskian_conserved_along_trajectory() {
        let p = mathieu(8.0, 1.0);
        let m = integrate_basis(&p, 1e-12).unwrap();
        let traj = stable_trajectory(&p, &m, 1024).unwrap();
        assert!(traj.wronskian > 0.0);
        assert!(traj.wronskian_drift() < 1e-9, "{}", traj.wronskian_drift());
        assert!((traj.xi_end - traj.multiplier * traj.xi[0]).norm() < 1e-9);
    }

    #[test]
    fn general_spring_callback() {
        // A two-harmonic spring, outside the Mathieu family.
        let spring = HillSpring(|t: f64| 1.3 - 0.4 * t.cos() + 0.2 * (2.0 * t).sin());
        let m = integrate_basis(&spring, 1e-12).unwrap();
        assert!((m.det() - 1.0).abs() < 1e-9);
        if m.is_stable() {
            let traj = stable_trajectory(&spring, &m, 512).unwrap();
            assert!(traj.wronskian_drift() < 1e-9);
        }
    }
}

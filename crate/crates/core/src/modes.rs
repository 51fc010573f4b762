//! Canonical characteristic exponent, periodic part and its Fourier series.
//!
//! The exponent comes from the phase integral `ν = (1/T)∫ Ω/|ξ|² dt`, which
//! selects the representative whose periodic part `v(t) = ξ(t)e^{-iνt}` has
//! zero winding. The arccos of the monodromy trace is only used to record
//! the integer offset and as a consistency check.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::hill::{integrate_basis, stable_trajectory, Monodromy, SpringFunction, SpringParams, Trajectory};
use crate::scalar::Real;

const MIN_MODULUS: f64 = 1e-12;

/// Stable Floquet mode reduced to the data the bath coupling needs.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetMode<T> {
    /// Canonical exponent in units of `ω`.
    pub nu: T,
    /// `v^(ℓ)` for `ℓ = -L..=L`; index `i` holds `ℓ = i - L`.
    pub coefficients: Vec<Complex<T>>,
    pub max_order: usize,
    pub wronskian: T,
    /// Relative Fourier mass beyond `|ℓ| > L`.
    pub tail_mass: T,
    /// Integer offset `m` in `νT = s·ϑ + 2πm`.
    pub winding: i64,
    /// Floquet multiplier `e^{iνT}` taken from the monodromy eigenvector.
    pub multiplier: Complex<T>,
}

impl<T: Real> FloquetMode<T> {
    pub fn orders(&self) -> impl Iterator<Item = i64> + '_ {
        let l = self.max_order as i64;
        -l..=l
    }

    /// `(ℓ, v^(ℓ))` pairs in increasing `ℓ`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex<T>)> + '_ {
        self.orders().zip(self.coefficients.iter().copied())
    }

    pub fn coefficient(&self, ell: i64) -> Complex<T> {
        let l = self.max_order as i64;
        if ell.abs() > l {
            Complex::new(T::zero(), T::zero())
        } else {
            self.coefficients[(ell + l) as usize]
        }
    }

    /// `Σ_ℓ |v^(ℓ)|²` over the retained orders.
    pub fn total_weight(&self) -> T {
        self.coefficients
            .iter()
            .fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    /// Mode of `cξ`; `ν` is unchanged.
    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|v| v * c).collect(),
            wronskian: self.wronskian * c.norm_sqr(),
            ..self.clone()
        }
    }

    /// `|e^{iνT} − λ|` against the multiplier the trajectory was built from.
    pub fn multiplier_mismatch(&self) -> T {
        let phase = self.nu * T::PI() * T::lit(2.0);
        (Complex::new(phase.cos(), phase.sin()) - self.multiplier).norm()
    }
}

/// Truncated Fourier series of a sampled periodic function.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries<T> {
    /// `ℓ = -L..=L`.
    pub coefficients: Vec<Complex<T>>,
    pub max_order: usize,
    pub tail_mass: T,
    /// `Σ_k |v(t_k)|² / N`, equal to the untruncated coefficient mass.
    pub sample_mass: T,
}

/// Canonical `ν/ω` from the trapezoidal phase integral of `Ω/|ξ|²`.
///
/// The rule converges spectrally, so the sum over every other sample serves
/// as an error estimate; a change above `T::PHASE_TOL` is reported.
pub fn canonical_exponent<T: Real>(traj: &Trajectory<T>) -> Result<T> {
    let mut acc = T::zero();
    let mut even = T::zero();
    for (index, x) in traj.xi.iter().enumerate() {
        let modulus = x.norm();
        if !(modulus >= T::lit(MIN_MODULUS)) {
            return Err(Error::QuadratureFailure {
                index,
                value: modulus.to_f64_lossy(),
            });
        }
        let w = T::one() / x.norm_sqr();
        acc = acc + w;
        if index % 2 == 0 {
            even = even + w;
        }
    }
    // (1/T) Σ (T/N) Ω/|ξ_k|²
    let n = traj.n_samples();
    let nu = traj.wronskian * acc / T::from_usize_lossy(n);
    if n >= 4 && n % 2 == 0 {
        let coarse = traj.wronskian * even / T::from_usize_lossy(n / 2);
        let change = (nu - coarse).abs();
        if !(change <= T::lit(T::PHASE_TOL) * nu.abs().max(T::one())) {
            return Err(Error::PhaseNotConverged {
                change: change.to_f64_lossy(),
                n_samples: n,
            });
        }
    }
    Ok(nu)
}

/// `v(t_k) = ξ(t_k) e^{-iνt_k}`; fails when `v` does not close over one period.
pub fn periodic_part<T: Real>(traj: &Trajectory<T>, nu: T) -> Result<Vec<Complex<T>>> {
    let rotate = |x: Complex<T>, t: T| x * Complex::new((nu * t).cos(), -(nu * t).sin());
    let v: Vec<Complex<T>> = traj
        .xi
        .iter()
        .zip(&traj.times)
        .map(|(&x, &t)| rotate(x, t))
        .collect();
    let v_end = rotate(traj.xi_end, T::PI() * T::lit(2.0));
    let vmax = v.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let mismatch = (v[0] - v_end).norm();
    let limit = T::lit(T::PERIODICITY_TOL) * vmax;
    if !(mismatch <= limit) {
        return Err(Error::PeriodicityViolation {
            mismatch: mismatch.to_f64_lossy(),
            limit: limit.to_f64_lossy(),
        });
    }
    Ok(v)
}

/// Fourier coefficients normalized as `v(t_k) = Σ_ℓ e^{iℓt_k} v^(ℓ)`, truncated
/// at the smallest order whose relative tail mass is below `T::TAIL_TOL`.
pub fn fourier_coefficients<T: Real>(samples: &[Complex<T>]) -> Result<FourierSeries<T>> {
    fourier_coefficients_with_threshold(samples, T::lit(T::TAIL_TOL))
}

pub fn fourier_coefficients_with_threshold<T: Real>(
    samples: &[Complex<T>],
    threshold: T,
) -> Result<FourierSeries<T>> {
    let n = samples.len();
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "sample count must be a power of two >= 4, got {n}"
        )));
    }
    let mut buf = samples.to_vec();
    FftPlanner::<T>::new().plan_fft_forward(n).process(&mut buf);
    let scale = T::one() / T::from_usize_lossy(n);
    for c in &mut buf {
        *c = *c * scale;
    }
    let half = n / 2;
    // FFT bin k holds ℓ = k for k < N/2 and ℓ = k - N otherwise.
    let at = |ell: i64| -> Complex<T> {
        let idx = if ell >= 0 { ell as usize } else { (n as i64 + ell) as usize };
        buf[idx]
    };
    let total = buf.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr());
    if !(total > T::zero()) {
        return Err(Error::InvalidParameter("samples are identically zero".into()));
    }

    // tails[L] = Σ_{|ℓ| > L} |v^(ℓ)|², accumulated outside-in.
    let mut tails = vec![T::zero(); half];
    let mut tail = at(-(half as i64)).norm_sqr();
    for l in (0..half).rev() {
        tails[l] = tail;
        let li = l as i64;
        tail = tail + at(li).norm_sqr() + if l > 0 { at(-li).norm_sqr() } else { T::zero() };
    }
    let max_order = match tails.iter().position(|&t| t / total <= threshold) {
        Some(l) => l,
        None => {
            return Err(Error::TailNotConverged {
                tail_mass: (tails[half - 1] / total).to_f64_lossy(),
                n_samples: n,
            })
        }
    };
    let l = max_order as i64;
    Ok(FourierSeries {
        coefficients: (-l..=l).map(at).collect(),
        max_order,
        tail_mass: tails[max_order] / total,
        sample_mass: samples.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()) * scale,
    })
}

/// Quasienergies `ε_n/ħω = (ν/ω)(n + 1/2)`, raw and folded into `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasienergyLadder<T> {
    pub unfolded: Vec<T>,
    pub folded: Vec<T>,
}

pub fn quasienergies<T: Real>(nu: T, n_max: usize) -> QuasienergyLadder<T> {
    let half = T::lit(0.5);
    let unfolded: Vec<T> = (0..=n_max)
        .map(|n| nu * (T::from_usize_lossy(n) + half))
        .collect();
    let folded = unfolded
        .iter()
        .map(|&e| {
            let f = e - e.floor();
            if f >= T::one() { T::zero() } else { f }
        })
        .collect();
    QuasienergyLadder { unfolded, folded }
}

/// Checks `ν` at `q = 0` against the explicit branch assignment from the
/// integer part `ℓ₀` of `Ω₀/ω`. Returns false when `Ω₀/ω` sits on an integer
/// or half-integer (the monodromy is then at a border) or `q != 0`.
pub fn check_branch_assignment<T: Real>(params: &SpringParams<T>, nu: T) -> bool {
    if params.q != T::zero() {
        return false;
    }
    let ratio = params.omega0();
    let l0 = ratio.floor();
    let frac = ratio - l0;
    let monodromy = match integrate_basis(params, T::lit(T::INTEGRATION_TOL)) {
        Ok(m) => m,
        Err(_) => return false,
    };
    let theta = match monodromy.theta() {
        Some(theta) if !monodromy.near_border => theta,
        _ => return false,
    };
    let half = T::lit(0.5);
    let turn = theta / (T::PI() * T::lit(2.0));
    let expected = if frac < half { l0 + turn } else { l0 + T::one() - turn };
    (nu - expected).abs() <= T::lit(1e-8).max(T::lit(T::PERIODICITY_TOL))
}

/// Options of the full mode pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeOptions<T> {
    pub tol: T,
    pub n_samples: usize,
    /// Grid doubling stops here.
    pub max_samples: usize,
    pub tail_threshold: T,
}

impl<T: Real> Default for ModeOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(T::INTEGRATION_TOL),
            n_samples: 1024,
            max_samples: 1 << 20,
            tail_threshold: T::lit(T::TAIL_TOL),
        }
    }
}

/// Everything computed for one stable parameter point.
#[derive(Debug, Clone)]
pub struct FloquetAnalysis<T> {
    pub monodromy: Monodromy<T>,
    pub trajectory: Trajectory<T>,
    pub mode: FloquetMode<T>,
    /// Grid size that met the tail criterion.
    pub n_samples: usize,
}

impl<T: Real> FloquetAnalysis<T> {
    pub fn grid_doubled(&self, requested: usize) -> bool {
        self.n_samples > requested
    }
}

/// Builds the Floquet mode from a sampled stable trajectory.
pub fn mode_from_trajectory<T: Real>(
    traj: &Trajectory<T>,
    theta: T,
    tail_threshold: T,
) -> Result<FloquetMode<T>> {
    let nu = canonical_exponent(traj)?;
    let v = periodic_part(traj, nu)?;
    let series = fourier_coefficients_with_threshold(&v, tail_threshold)?;
    let two_pi = T::PI() * T::lit(2.0);
    let signed_theta = if traj.multiplier.im >= T::zero() { theta } else { -theta };
    let winding = ((nu * two_pi - signed_theta) / two_pi)
        .round()
        .to_i64()
        .unwrap_or(0);
    Ok(FloquetMode {
        nu,
        coefficients: series.coefficients,
        max_order: series.max_order,
        wronskian: traj.wronskian,
        tail_mass: series.tail_mass,
        winding,
        multiplier: traj.multiplier,
    })
}

/// Trajectory and mode for an already classified monodromy, doubling the grid
/// until the phase integral, the Fourier tail and the closure of `v` converge.
pub fn analyze_monodromy<T: Real, S: SpringFunction<T> + ?Sized>(
    spring: &S,
    monodromy: Monodromy<T>,
    opts: &ModeOptions<T>,
) -> Result<FloquetAnalysis<T>> {
    let theta = monodromy.theta().ok_or(Error::NotStable {
        trace: monodromy.trace.to_f64_lossy(),
    })?;
    let mut n = opts.n_samples;
    loop {
        let traj = stable_trajectory(spring, &monodromy, n)?;
        match mode_from_trajectory(&traj, theta, opts.tail_threshold) {
            Ok(mode) => {
                return Ok(FloquetAnalysis {
                    monodromy,
                    trajectory: traj,
                    mode,
                    n_samples: n,
                })
            }
            // All signal an under-resolved grid: a truncated Fourier series or a
            // phase integral too coarse for a sharply peaked 1/|ξ|².
            Err(
                Error::TailNotConverged { .. }
                | Error::PeriodicityViolation { .. }
                | Error::PhaseNotConverged { .. },
            )
                if n * 2 <= opts.max_samples =>
            {
                n *= 2
            }
            Err(e) => return Err(e),
        }
    }
}

/// Monodromy, trajectory and Floquet mode for one spring function.
pub fn analyze<T: Real, S: SpringFunction<T> + ?Sized>(
    spring: &S,
    opts: &ModeOptions<T>,
) -> Result<FloquetAnalysis<T>> {
    let monodromy = integrate_basis(spring, opts.tol)?;
    analyze_monodromy(spring, monodromy, opts)
}

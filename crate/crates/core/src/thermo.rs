//! Quasistationary Floquet-state distribution, quasitemperature and
//! steady-state dissipation for a stable mode coupled to a bath.
//!
//! Rates are expressed in units of `c·J₀` with `c = πγ²/(ħMΩ)`, and the
//! dissipation in units of `R₀ = ħωcJ₀ Σ_ℓ |v^(ℓ)|²`, so coupling constant,
//! mass and the normalization of `ξ` never need numerical values.

use num_complex::Complex;

use crate::bath::{occupation, BathModel, ZERO_FREQUENCY_GUARD};
use crate::error::{Error, Result};
use crate::modes::FloquetMode;
use crate::scalar::Real;

/// `|r − 1|` below which the quasitemperature is treated as infinite.
pub const INFINITE_QUASITEMP_MARGIN: f64 = 1e-12;

/// Upward and downward rate sums over the Floquet ladder, per `(n + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSums<T> {
    /// `Σ_ℓ |v^(ℓ)|² N(ν+ℓ) J(|ν+ℓ|) / J₀`
    pub up: T,
    /// `Σ_ℓ |v^(ℓ)|² N(−ν−ℓ) J(|ν+ℓ|) / J₀`
    pub down: T,
}

/// Ladder frequencies `ν + ℓω` closest to zero, if any lies in the guard band.
fn guarded_order<T: Real>(mode: &FloquetMode<T>) -> Option<(i64, T)> {
    mode.orders()
        .map(|ell| (ell, mode.nu + T::lit(ell as f64)))
        .find(|&(_, f)| f.abs() < T::lit(ZERO_FREQUENCY_GUARD))
}

pub fn rate_sums<T: Real>(mode: &FloquetMode<T>, bath: &BathModel<T>) -> Result<RateSums<T>> {
    if let Some((ell, f)) = guarded_order(mode) {
        return Err(Error::BorderDivergence {
            ell,
            frequency: f.to_f64_lossy(),
        });
    }
    let mut up = T::zero();
    let mut down = T::zero();
    for (ell, v) in mode.iter() {
        let f = mode.nu + T::lit(ell as f64);
        let weight = v.norm_sqr() * bath.spectral_density(f.abs()) / bath.j0;
        if weight == T::zero() {
            continue;
        }
        up = up + weight * occupation(f, bath.beta)?;
        down = down + weight * occupation(-f, bath.beta)?;
    }
    Ok(RateSums { up, down })
}

/// Ratio `r = Γ_{n+1,n}/Γ_{n,n+1}` of upward to downward rates.
pub fn rate_ratio<T: Real>(mode: &FloquetMode<T>, bath: &BathModel<T>) -> Result<T> {
    let sums = rate_sums(mode, bath)?;
    if !(sums.down.is_finite() && sums.down > T::min_positive_value()) {
        return Err(Error::DegenerateDenominator(sums.down.to_f64_lossy()));
    }
    Ok(sums.up / sums.down)
}

/// Rate ratio with the border limit taken explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRatio<T> {
    pub r: T,
    /// A ladder frequency hit the zero-frequency guard band; `r` is the
    /// limit `N(0⁺)/(N(0⁺) + 1) → 1`.
    pub border_limit: bool,
}

pub fn rate_ratio_with_border_limit<T: Real>(
    mode: &FloquetMode<T>,
    bath: &BathModel<T>,
) -> Result<RateRatio<T>> {
    match rate_ratio(mode, bath) {
        Ok(r) => Ok(RateRatio {
            r,
            border_limit: false,
        }),
        Err(Error::BorderDivergence { .. }) => Ok(RateRatio {
            r: T::one(),
            border_limit: true,
        }),
        Err(e) => Err(e),
    }
}

/// `ħω/(k_B τ) = −(ω/ν) ln r`. Negative values mean quasithermal instability.
pub fn inverse_quasitemperature<T: Real>(r: T, nu: T) -> Result<T> {
    if !(r > T::zero() && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("rate ratio r = {r}")));
    }
    if !(nu > T::zero()) {
        return Err(Error::InvalidParameter(format!("exponent nu = {nu}")));
    }
    let gap = (r - T::one()).abs();
    if gap < T::lit(INFINITE_QUASITEMP_MARGIN) {
        return Err(Error::InfiniteQuasitemp(gap.to_f64_lossy()));
    }
    Ok(-r.ln() / nu)
}

/// Geometric occupation probabilities `p_n = (1 − r) rⁿ`, `n = 0..=n_max`.
pub fn distribution<T: Real>(r: T, n_max: usize) -> Result<Vec<T>> {
    check_quasithermal(r)?;
    let p0 = T::one() - r;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut p = p0;
    for _ in 0..=n_max {
        out.push(p);
        p = p * r;
    }
    Ok(out)
}

/// `p₀/P₀` with `P₀ = 1 − e^{−βħΩ₀}` the undriven ground-state occupation.
pub fn p0_ratio<T: Real>(r: T, beta: T, a: T) -> Result<T> {
    check_quasithermal(r)?;
    let omega0 = a.sqrt() / T::lit(2.0);
    Ok((T::one() - r) / -(-beta * omega0).exp_m1())
}

fn check_quasithermal<T: Real>(r: T) -> Result<()> {
    if !(r > T::zero()) {
        return Err(Error::InvalidParameter(format!("rate ratio r = {r}")));
    }
    if !(r < T::one()) {
        return Err(Error::QuasithermallyUnstable(r.to_f64_lossy()));
    }
    Ok(())
}

/// Steady-state dissipation split into the `r`-dependent and occupation parts,
/// each divided by `R₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dissipation<T> {
    pub r1: T,
    pub r2: T,
    pub total: T,
}

pub fn dissipation<T: Real>(
    mode: &FloquetMode<T>,
    bath: &BathModel<T>,
    r: T,
) -> Result<Dissipation<T>> {
    check_quasithermal(r)?;
    if let Some((ell, f)) = guarded_order(mode) {
        return Err(Error::BorderDivergence {
            ell,
            frequency: f.to_f64_lossy(),
        });
    }
    let mut s1 = T::zero();
    let mut s2 = T::zero();
    for (ell, v) in mode.iter() {
        let f = mode.nu + T::lit(ell as f64);
        let weight = v.norm_sqr() * bath.spectral_density(f.abs()) / bath.j0;
        if weight == T::zero() {
            continue;
        }
        s1 = s1 + f.abs() * weight;
        s2 = s2 - f * weight * occupation(f, bath.beta)?;
    }
    let norm = mode.total_weight();
    let r1 = r / (T::one() - r) * s1 / norm;
    let r2 = s2 / norm;
    Ok(Dissipation {
        r1,
        r2,
        total: r1 + r2,
    })
}

/// `(Γ_{n+1,n}, Γ_{n,n+1})` in units of `c·J₀`.
pub fn transition_rates<T: Real>(
    mode: &FloquetMode<T>,
    bath: &BathModel<T>,
    n: usize,
) -> Result<(T, T)> {
    let sums = rate_sums(mode, bath)?;
    let factor = T::from_usize_lossy(n + 1);
    Ok((factor * sums.up, factor * sums.down))
}

/// Upward `Γ_{n+1,n}` and downward `Γ_{n,n+1}` rates for `n = 0..n_max`.
pub fn rate_ladder<T: Real>(
    mode: &FloquetMode<T>,
    bath: &BathModel<T>,
    n_max: usize,
) -> Result<(Vec<T>, Vec<T>)> {
    let sums = rate_sums(mode, bath)?;
    Ok((0..n_max)
        .map(|n| {
            let factor = T::from_usize_lossy(n + 1);
            (factor * sums.up, factor * sums.down)
        })
        .unzip())
}

/// Fourier coefficient `ℓ` of `⟨u_m|x|u_n⟩` in units of `√(ħ/2MΩ)`, with the
/// constant phase `e^{±iα̃(0)}` dropped.
pub fn dipole_coefficient<T: Real>(mode: &FloquetMode<T>, m: usize, n: usize, ell: i64) -> Complex<T> {
    if m == n + 1 {
        mode.coefficient(ell) * T::from_usize_lossy(n + 1).sqrt()
    } else if m + 1 == n {
        mode.coefficient(-ell).conj() * T::from_usize_lossy(n).sqrt()
    } else {
        Complex::new(T::zero(), T::zero())
    }
}

/// Full rate matrix `Γ[m][n]` (transition `n → m`) on levels `0..=n_max`, in
/// units of `c·J₀`, summed over every Floquet sideband.
pub fn rate_matrix<T: Real>(
    mode: &FloquetMode<T>,
    bath: &BathModel<T>,
    n_max: usize,
) -> Result<Vec<Vec<T>>> {
    let nu = mode.nu;
    let mut gamma = vec![vec![T::zero(); n_max + 1]; n_max + 1];
    for (m, row) in gamma.iter_mut().enumerate() {
        for (n, entry) in row.iter_mut().enumerate() {
            let mut sum = T::zero();
            for ell in mode.orders() {
                let x = dipole_coefficient(mode, m, n, ell);
                let weight = x.norm_sqr();
                if weight == T::zero() {
                    continue;
                }
                let shift = if m > n { nu } else { -nu };
                let f = shift + T::lit(ell as f64);
                let j = bath.spectral_density(f.abs()) / bath.j0;
                if j == T::zero() {
                    continue;
                }
                sum = sum + weight * occupation(f, bath.beta)? * j;
            }
            *entry = sum;
        }
    }
    Ok(gamma)
}

/// Stationary solution of the tridiagonal Pauli master equation on the
/// levels `0..=n_max`, `n_max = up.len()`, by the detailed-balance recursion
/// with a reflecting top level.
pub fn stationary_solver<T: Real>(up: &[T], down: &[T]) -> Result<Vec<T>> {
    if up.len() != down.len() {
        return Err(Error::InvalidParameter(format!(
            "rate arrays differ in length: {} vs {}",
            up.len(),
            down.len()
        )));
    }
    let mut p = Vec::with_capacity(up.len() + 1);
    p.push(T::one());
    for (n, (&u, &d)) in up.iter().zip(down).enumerate() {
        if !(u >= T::zero() && d > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "rates at n = {n}: up = {u}, down = {d}"
            )));
        }
        let ratio = u / d;
        if ratio >= T::one() {
            return Err(Error::NonNormalizable {
                n,
                ratio: ratio.to_f64_lossy(),
            });
        }
        let next = p[n] * ratio;
        p.push(next);
    }
    let total = p.iter().fold(T::zero(), |acc, &x| acc + x);
    Ok(p.into_iter().map(|x| x / total).collect())
}

/// Row residuals `Σ_m (Γ_{nm} p_m − Γ_{mn} p_n)` of the truncated ladder.
pub fn master_residuals<T: Real>(up: &[T], down: &[T], p: &[T]) -> Vec<T> {
    let top = up.len();
    (0..=top)
        .map(|n| {
            let mut res = T::zero();
            if n > 0 {
                res = res + up[n - 1] * p[n - 1] - down[n - 1] * p[n];
            }
            if n < top {
                res = res + down[n] * p[n + 1] - up[n] * p[n];
            }
            res
        })
        .collect()
}

/// Net flow `Γ_{n+1,n} p_n − Γ_{n,n+1} p_{n+1}` across each ladder link.
pub fn link_flows<T: Real>(up: &[T], down: &[T], p: &[T]) -> Vec<T> {
    (0..up.len())
        .map(|n| up[n] * p[n] - down[n] * p[n + 1])
        .collect()
}

/// All scaled observables of one stable parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiSteadyState<T> {
    pub r: T,
    pub border_limit: bool,
    /// `ħω/(k_B τ)`; zero when `τ` is infinite.
    pub inv_quasitemp: T,
    /// `None` unless `r < 1`.
    pub p0_ratio: Option<T>,
    pub dissipation: Option<Dissipation<T>>,
    pub quasithermally_stable: bool,
}

impl<T: Real> QuasiSteadyState<T> {
    /// Evaluates the mode against `bath`; `a` is the Mathieu parameter of the
    /// undriven reference oscillator.
    pub fn evaluate(mode: &FloquetMode<T>, bath: &BathModel<T>, a: T) -> Result<Self> {
        let RateRatio { r, border_limit } = rate_ratio_with_border_limit(mode, bath)?;
        let inv_quasitemp = match inverse_quasitemperature(r, mode.nu) {
            Ok(x) => x,
            Err(Error::InfiniteQuasitemp(_)) => T::zero(),
            Err(e) => return Err(e),
        };
        let stable = r < T::one() && !border_limit;
        let (p0, diss) = if stable {
            (
                Some(p0_ratio(r, bath.beta, a)?),
                Some(dissipation(mode, bath, r)?),
            )
        } else {
            (None, None)
        };
        Ok(Self {
            r,
            border_limit,
            inv_quasitemp,
            p0_ratio: p0,
            dissipation: diss,
            quasithermally_stable: stable,
        })
    }
}

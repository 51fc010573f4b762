use floquet_thermo::hill::{integrate_basis, Stability};
use floquet_thermo::{ModeOptions, SpringParams};
use rayon::prelude::*;

use crate::config::{ConfigError, SweepConfig};
use crate::sweep::{analyze_point, thread_pool};

/// Bisection stops once the bracket is this narrow.
pub const BORDER_RESOLUTION: f64 = 1e-9;
/// Stable-side offsets for the border exponent, `d` and `4d`.
pub const BORDER_PROBE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Collision {
    /// Multipliers meet at `+1`: integer `ν/ω`.
    Plus,
    /// Multipliers meet at `−1`: half-integer `ν/ω`.
    Minus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Border {
    pub q: f64,
    pub collision: Collision,
    /// The stable zone lies at smaller `q`.
    pub stable_below: bool,
    /// `ν` at distance `BORDER_PROBE` inside the stable zone.
    pub nu_near: Option<f64>,
    /// `2ν(d) − ν(4d)`: removes the `√d` approach to the border value.
    pub nu_limit: Option<f64>,
    pub error: Option<String>,
}

fn classify(a: f64, q: f64, tol: f64) -> Option<Stability<f64>> {
    let params = SpringParams::new(a, q).ok()?;
    integrate_basis(&params, tol).ok().map(|m| m.stability)
}

fn is_stable(s: &Stability<f64>) -> bool {
    matches!(s, Stability::Stable { .. })
}

/// Stability borders inside the configured q range, refined by bisection.
pub fn locate_borders(config: &SweepConfig) -> Result<Vec<Border>, ConfigError> {
    let pool = thread_pool()?;
    Ok(pool.install(|| borders_in_current_pool(config)))
}

fn borders_in_current_pool(config: &SweepConfig) -> Vec<Border> {
    let tol = ModeOptions::default().tol;
    let grid = config.q_grid();
    let classes: Vec<Option<Stability<f64>>> =
        grid.par_iter().map(|&q| classify(config.a, q, tol)).collect();
    let brackets: Vec<(f64, f64, bool)> = (1..grid.len())
        .filter_map(|i| match (&classes[i - 1], &classes[i]) {
            (Some(x), Some(y)) if is_stable(x) != is_stable(y) => {
                Some((grid[i - 1], grid[i], is_stable(x)))
            }
            _ => None,
        })
        .collect();
    brackets
        .into_par_iter()
        .map(|(lo, hi, stable_below)| refine(config, lo, hi, stable_below, tol))
        .collect()
}

fn refine(config: &SweepConfig, mut lo: f64, mut hi: f64, stable_below: bool, tol: f64) -> Border {
    let mut unstable_kind = None;
    while hi - lo > BORDER_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        match classify(config.a, mid, tol) {
            Some(s) => {
                if is_stable(&s) == stable_below {
                    lo = mid;
                } else {
                    unstable_kind = Some(s);
                    hi = mid;
                }
            }
            None => break,
        }
    }
    let q_stable = if stable_below { lo } else { hi };
    let q_unstable = if stable_below { hi } else { lo };
    let kind = unstable_kind.or_else(|| classify(config.a, q_unstable, tol));
    let collision = match kind {
        Some(Stability::UnstableCollisionMinus) => Collision::Minus,
        _ => Collision::Plus,
    };
    let inward = if stable_below { -1.0 } else { 1.0 };
    let nu_at = |d: f64| -> Result<f64, String> {
        match analyze_point(config, q_stable + inward * d) {
            Ok(Ok(an)) => Ok(an.mode.nu),
            Ok(Err(_)) => Err(format!("q = {} is not stable", q_stable + inward * d)),
            Err(e) => Err(e.to_string()),
        }
    };
    let (near, far) = (nu_at(BORDER_PROBE), nu_at(4.0 * BORDER_PROBE));
    let error = near.as_ref().err().or(far.as_ref().err()).cloned();
    Border {
        q: 0.5 * (lo + hi),
        collision,
        stable_below,
        nu_near: near.as_ref().ok().copied(),
        nu_limit: match (near, far) {
            (Ok(n), Ok(f)) => Some(2.0 * n - f),
            _ => None,
        },
        error,
    }
}

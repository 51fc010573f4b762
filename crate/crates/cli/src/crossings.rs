use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, SweepConfig};
use crate::sweep::{evaluate_point, sweep_in_current_pool, thread_pool, SweepRow};

/// Width of the final bisection bracket.
pub const CROSSING_RESOLUTION: f64 = 1e-4;
/// Larger jumps of `ν` between neighbours mean the two points sit in
/// different stability zones.
const MAX_NU_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// `r = 1`, the edge of quasithermal stability.
    R1,
    /// `ħω/(k_B τ) = 1`, quasitemperature equal to the bath temperature.
    Tau1,
}

impl Target {
    /// Signed distance from the target; `None` where it is undefined.
    pub fn value(self, row: &SweepRow) -> Option<f64> {
        let state = row.state?;
        if state.border_limit {
            return None;
        }
        match self {
            Target::R1 => Some(state.r - 1.0),
            Target::Tau1 => Some(state.inv_quasitemp - 1.0),
        }
    }
}

impl FromStr for Target {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "r1" => Ok(Target::R1),
            "tau1" => Ok(Target::Tau1),
            other => Err(format!("unknown target `{other}` (expected r1 or tau1)")),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::R1 => "r1",
            Target::Tau1 => "tau1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub q: f64,
    /// The target quantity increases through the crossing.
    pub rising: bool,
}

#[derive(Debug, Error)]
pub enum CrossingError {
    #[error("no crossing of {0} in the q range")]
    NoCrossing(Target),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("evaluation failed at q = {q}: {message}")]
    Evaluation { q: f64, message: String },
}

/// Grid brackets of a sign change, refined by bisection to
/// `CROSSING_RESOLUTION`.
pub fn locate_crossings(config: &SweepConfig, target: Target) -> Result<Vec<Crossing>, CrossingError> {
    if config.bath.is_none() {
        return Err(ConfigError::Invalid("crossings need a bath".into()).into());
    }
    let pool = thread_pool()?;
    let rows = pool.install(|| sweep_in_current_pool(config));
    let crossings = pool.install(|| crossings_from_rows(config, target, &rows))?;
    if crossings.is_empty() {
        return Err(CrossingError::NoCrossing(target));
    }
    Ok(crossings)
}

pub fn crossings_from_rows(
    config: &SweepConfig,
    target: Target,
    rows: &[SweepRow],
) -> Result<Vec<Crossing>, CrossingError> {
    let mut exact = Vec::new();
    let mut brackets = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let Some(g) = target.value(row) else { continue };
        if g == 0.0 {
            // Only a sign change counts; touching the target (q = 0 for tau1
            // at βħω = 1) does not.
            let prev = i.checked_sub(1).and_then(|j| target.value(&rows[j]));
            let next = rows.get(i + 1).and_then(|r| target.value(r));
            if let (Some(p), Some(n)) = (prev, next) {
                if p * n < 0.0 {
                    exact.push(Crossing { q: row.q, rising: n > 0.0 });
                }
            }
            continue;
        }
        let Some(next) = rows.get(i + 1) else { continue };
        let Some(h) = target.value(next) else { continue };
        let same_zone = match (row.nu, next.nu) {
            (Some(a), Some(b)) => (a - b).abs() <= MAX_NU_STEP,
            _ => false,
        };
        if same_zone && g * h < 0.0 {
            brackets.push((row.q, g, next.q));
        }
    }
    let refined: Vec<Result<Crossing, CrossingError>> = brackets
        .into_par_iter()
        .map(|(lo, g_lo, hi)| bisect(config, target, lo, g_lo, hi))
        .collect();
    let mut out = exact;
    for c in refined {
        out.push(c?);
    }
    out.sort_by(|x, y| x.q.total_cmp(&y.q));
    Ok(out)
}

fn bisect(
    config: &SweepConfig,
    target: Target,
    mut lo: f64,
    mut g_lo: f64,
    mut hi: f64,
) -> Result<Crossing, CrossingError> {
    let rising = g_lo < 0.0;
    while hi - lo > CROSSING_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        let row = evaluate_point(config, mid);
        let g = target.value(&row).ok_or_else(|| CrossingError::Evaluation {
            q: mid,
            message: row.error.clone().unwrap_or_else(|| "target undefined".into()),
        })?;
        if g == 0.0 {
            return Ok(Crossing { q: mid, rising });
        }
        if (g < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
        }
    }
    Ok(Crossing {
        q: 0.5 * (lo + hi),
        rising,
    })
}

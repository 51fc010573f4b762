use std::io::Write;

use floquet_thermo::hill::{integrate_basis, Stability};
use floquet_thermo::modes::{analyze_monodromy, periodic_part};
use floquet_thermo::thermo::INFINITE_QUASITEMP_MARGIN;
use floquet_thermo::{FloquetAnalysis, ModeOptions, QuasiSteadyState, SpringParams};
use rayon::prelude::*;

use crate::config::{ConfigError, Output, SweepConfig};
use crate::format::sig12;

pub const HEADER: [&str; 11] = [
    "q",
    "nu_over_omega",
    "stable",
    "r",
    "inv_quasitemp",
    "p0_over_P0",
    "R1_over_R0",
    "R2_over_R0",
    "R_over_R0",
    "flags",
    "error",
];

pub const THREADS_VAR: &str = "FLOQUET_THREADS";

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub q: f64,
    pub nu: Option<f64>,
    pub stable: bool,
    pub state: Option<QuasiSteadyState>,
    pub flags: Vec<&'static str>,
    pub error: Option<String>,
}

impl SweepRow {
    fn new(q: f64) -> Self {
        Self {
            q,
            nu: None,
            stable: false,
            state: None,
            flags: Vec::new(),
            error: None,
        }
    }

    fn fail(mut self, msg: impl ToString) -> Self {
        self.error = Some(msg.to_string());
        self
    }

    pub fn r(&self) -> Option<f64> {
        self.state.map(|s| s.r)
    }

    pub fn inv_quasitemp(&self) -> Option<f64> {
        self.state.map(|s| s.inv_quasitemp)
    }

    pub fn p0_ratio(&self) -> Option<f64> {
        self.state.and_then(|s| s.p0_ratio)
    }

    pub fn dissipation_total(&self) -> Option<f64> {
        self.state.and_then(|s| s.dissipation).map(|d| d.total)
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.contains(&flag)
    }

    /// CSV fields restricted to the requested outputs.
    pub fn record(&self, config: &SweepConfig) -> [String; 11] {
        let num = |x: Option<f64>, o: Output| match x {
            Some(v) if config.wants(o) => sig12(v),
            _ => String::new(),
        };
        let diss = self.state.and_then(|s| s.dissipation);
        [
            sig12(self.q),
            num(self.nu, Output::Nu),
            self.stable.to_string(),
            num(self.r(), Output::R),
            num(self.inv_quasitemp(), Output::InvQuasitemp),
            num(self.p0_ratio(), Output::P0Ratio),
            num(diss.map(|d| d.r1), Output::Dissipation),
            num(diss.map(|d| d.r2), Output::Dissipation),
            num(diss.map(|d| d.total), Output::Dissipation),
            self.flags.join(";"),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

fn mode_options(config: &SweepConfig) -> ModeOptions {
    ModeOptions {
        n_samples: config.n_samples,
        ..ModeOptions::default()
    }
}

/// Monodromy and, for stable points, the Floquet analysis at `(a, q)`.
pub fn analyze_point(
    config: &SweepConfig,
    q: f64,
) -> floquet_thermo::Result<Result<FloquetAnalysis, Stability<f64>>> {
    let params = SpringParams::new(config.a, q)?;
    let opts = mode_options(config);
    let m = integrate_basis(&params, opts.tol)?;
    if !m.is_stable() {
        return Ok(Err(m.stability));
    }
    analyze_monodromy(&params, m, &opts).map(Ok)
}

pub fn evaluate_point(config: &SweepConfig, q: f64) -> SweepRow {
    let mut row = SweepRow::new(q);
    let an = match analyze_point(config, q) {
        Ok(Ok(an)) => an,
        Ok(Err(stability)) => {
            row.flags.push(match stability {
                Stability::UnstableCollisionMinus => "collision_minus",
                _ => "collision_plus",
            });
            return row;
        }
        Err(e) => return row.fail(e),
    };
    row.stable = true;
    row.nu = Some(an.mode.nu);
    if an.monodromy.near_border {
        row.flags.push("near_border");
    }
    if an.grid_doubled(config.n_samples) {
        row.flags.push("grid_doubled");
    }
    if config.oracle_checks {
        if let Err(msg) = oracle_checks(&an) {
            row.flags.push("oracle_failed");
            return row.fail(msg);
        }
    }
    let Some(bath) = config.bath else {
        return row;
    };
    match QuasiSteadyState::evaluate(&an.mode, &bath, config.a) {
        Ok(state) => {
            if state.border_limit {
                row.flags.push("border_limit");
            } else if (state.r - 1.0).abs() < INFINITE_QUASITEMP_MARGIN {
                row.flags.push("infinite_tau");
            }
            if !state.quasithermally_stable {
                row.flags.push("quasithermally_unstable");
            }
            row.state = Some(state);
            row
        }
        Err(e) => row.fail(e),
    }
}

/// Per-point consistency checks enabled by `oracle_checks`.
fn oracle_checks(an: &FloquetAnalysis) -> Result<(), String> {
    let drift = an.trajectory.wronskian_drift();
    if drift > 1e-9 {
        return Err(format!("wronskian drift {drift:e}"));
    }
    let mismatch = an.mode.multiplier_mismatch();
    if mismatch > 1e-8 {
        return Err(format!("multiplier mismatch {mismatch:e}"));
    }
    let v = periodic_part(&an.trajectory, an.mode.nu).map_err(|e| e.to_string())?;
    let sample_mass = v.iter().map(|z| z.norm_sqr()).sum::<f64>() / v.len() as f64;
    let parseval = (an.mode.total_weight() - sample_mass).abs() / sample_mass;
    if parseval > 1e-10 {
        return Err(format!("parseval defect {parseval:e}"));
    }
    Ok(())
}

/// Work pool sized by `FLOQUET_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool, ConfigError> {
    let threads = match std::env::var(THREADS_VAR) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => {
                return Err(ConfigError::Invalid(format!(
                    "{THREADS_VAR} = {s:?} is not a positive integer"
                )))
            }
        },
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ConfigError::Invalid(format!("thread pool: {e}")))
}

/// Evaluates every grid point; rows come back in q order. Per-point failures
/// land in the `error` column.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>, ConfigError> {
    let pool = thread_pool()?;
    Ok(pool.install(|| sweep_in_current_pool(config)))
}

pub(crate) fn sweep_in_current_pool(config: &SweepConfig) -> Vec<SweepRow> {
    config
        .q_grid()
        .into_par_iter()
        .map(|q| evaluate_point(config, q))
        .collect()
}

pub fn write_csv<W: Write>(
    rows: &[SweepRow],
    config: &SweepConfig,
    out: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(row.record(config))?;
    }
    w.flush()?;
    Ok(())
}

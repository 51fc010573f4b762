use serde::Serialize;

use crate::config::SweepConfig;
use crate::format::sig12;
use crate::sweep::analyze_point;

/// JSON form of a Floquet mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeDump {
    pub nu_over_omega: f64,
    /// `[ℓ, Re v^(ℓ), Im v^(ℓ)]`
    pub coefficients: Vec<(i64, f64, f64)>,
    pub tail_mass: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum DumpError {
    #[error("q = {0} is mechanically unstable")]
    Unstable(f64),
    #[error(transparent)]
    Numerical(#[from] floquet_thermo::Error),
}

/// Round-trips through the 12-digit text form so JSON carries no more digits
/// than the CSV output.
fn round12(x: f64) -> f64 {
    sig12(x).parse().unwrap_or(x)
}

pub fn mode_dump(config: &SweepConfig, q: f64) -> Result<ModeDump, DumpError> {
    let an = analyze_point(config, q)?.map_err(|_| DumpError::Unstable(q))?;
    let mode = an.mode;
    Ok(ModeDump {
        nu_over_omega: round12(mode.nu),
        coefficients: mode
            .iter()
            .map(|(l, v)| (l, round12(v.re), round12(v.im)))
            .collect(),
        tail_mass: round12(mode.tail_mass),
    })
}

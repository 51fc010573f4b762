//! Parameter sweeps over the Mathieu drive strength `q`, crossing and border
//! searches, mode dumps and the invariant suite behind the `floquet-thermo`
//! binary.

pub mod borders;
pub mod config;
pub mod crossings;
pub mod dump;
pub mod format;
pub mod sweep;
pub mod validate;

pub use borders::{locate_borders, Border, Collision};
pub use config::{ConfigError, Output, SweepConfig};
pub use crossings::{locate_crossings, Crossing, CrossingError, Target};
pub use dump::{mode_dump, ModeDump};
pub use sweep::{evaluate_point, run_sweep, write_csv, SweepRow, HEADER};
pub use validate::{run_validation, Report};

//! Monte Carlo engine: Student-t innovations, MA(1) filtering, break and
//! drift scenarios, contamination and power tables.

mod mvt;
mod power;
mod presets;
mod scenario;

pub use mvt::{sample_mvt, InnovationSpec};
pub use power::{derive_seed, power_table, replication_seed, PowerRow, PowerTable, RateSummary};
pub use presets::{preset, PRESETS};
pub use scenario::{gen_path, q_from_rho, strong_contamination, BreakProfile, Outlier, QFormula, Scenario};

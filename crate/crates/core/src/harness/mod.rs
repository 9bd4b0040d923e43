//! Session driver, parameter sweeps, fixture replay and output formatting.

mod config;
mod output;
mod replay;
mod session;
mod sweep;

pub use config::{apply_config_text, load_config_file, Profile};
pub use output::{render, to_csv, to_ndjson, CsvRow, Format};
pub use replay::{load_fixture, parse_fixture, replay, Expectations, Fixture, Mismatch, ReplayReport};
pub use session::{run_session, run_session_to, session_permutations, Depth, SessionOutcome, SessionRun};
pub use sweep::{
    qber_bin_milli, run_attack_experiment, sweep_success_rate, CellSummary, ExperimentReport, SuccessRow,
    SweepSpec,
};

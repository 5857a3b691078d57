//! Experiment orchestration: trials, sweeps, window statistics and CSV export.

pub mod csv_io;
pub mod stats;
mod sweep;
mod trial;
mod windows;

pub use sweep::{aggregate, run_sweep, Alignment, SweepResult, SweepRow, SweepSpec};
pub use trial::{
    load_maze_file, run_trial, run_trial_traced, AgentKind, AgentSpec, RlSettings, TickRecord, TrialConfig, TrialLog,
    TrialResult, TrialSummary,
};
pub use windows::{negative_valence_windows, WindowStats};

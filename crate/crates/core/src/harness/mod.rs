//! Experiment driver: selection on a preprocessed training view, repeated
//! train/test evaluation of every classifier on every feature set, and
//! report emission.

mod config;
mod experiment;
mod report;

pub use config::{DatasetConfig, ExperimentConfig, SplitConfig};
pub use experiment::{
    algorithm_seed, check_leakage, load_dataset, run_experiment, run_selection, selection_view, RawRecord,
    Selection, NO_FS,
};
pub use report::{
    accuracy_cell, emit_report, history_csv, read_report, DatasetInfo, ExperimentReport, Format, ReportRow, Stat,
    Timing, TimingRow,
};

//! Training: Adagrad updates, the epoch loop, cross-validated epoch
//! selection, and the repeated-run evaluation protocol.

mod adagrad;
mod config;
mod cv;
mod protocol;
mod trainer;

pub use adagrad::Adagrad;
pub use config::TrainConfig;
pub use cv::{cross_validate, fold_ranges, CvOutcome};
pub use protocol::{
    deterministic_view, history_csv, mean_std, run_protocol, ProtocolReport, RunRecord,
    REPORT_VERSION,
};
pub use trainer::{evaluate, train_epochs, train_epochs_timed, EpochStats, ExecMode};

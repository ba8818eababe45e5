//! Task suite, task files, experiment runner and reports.

pub mod experiment;
pub mod report;
pub mod significance;
pub mod taskfile;
pub mod tasks;

pub use experiment::{
    oracle_task, read_records, run_experiment, run_id, run_one, worker_count, CompiledTask, ExperimentConfig,
    ExperimentResults, RunRecord, TaskSource, WORKERS_ENV,
};
pub use report::{results_csv, write_report, CellSummary, ResultsTable, CSV_HEADER};
pub use significance::{fisher_exact, significance, Significance, TestKind};
pub use taskfile::{parse_task_file, write_task_file};
pub use tasks::{generate_task, registry, task_names, task_spec, DomainSpec, Family, TaskFile, TaskSpec};

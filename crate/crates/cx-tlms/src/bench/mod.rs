//! Monte-Carlo experiment driver behind the `cx-tlms` binary: config
//! parsing, parallel runs, CSV emission.

mod config;
mod output;
mod runner;

pub use config::ExperimentConfig;
pub use output::{
    fmt_complex, fmt_f64, write_curves_csv, write_gnuplot_script, write_state_dump,
    write_summary_csv,
};
pub use runner::{run_all, run_experiment, ArchSeries, ExperimentResult, RunResult, RunSignals};

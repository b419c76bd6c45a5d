//! Experiment configuration, orchestration and tabular output.

mod config;
mod run;

pub use config::{
    parse_config, DriveSpec, EnsembleSpec, Experiment, ExperimentConfig, FlowSpec, Pulse2Spec, Units, ABSORPTION_CAP,
};
pub use run::{num, output_path, run, write_table, Table};

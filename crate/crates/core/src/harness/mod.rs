//! Experiment plumbing: configs, seeded perturbations, brute-force oracles and
//! run reports.

pub mod config;
pub mod corpus;
pub mod noise;
pub mod oracle;
pub mod run;

pub use config::{BaseMap, Engine, ExperimentConfig, GridSpec};
pub use corpus::{corpus, standard_corpus};
pub use noise::{perturb, NoiseKind, NoiseSpec};
pub use oracle::{oracle_gap, oracle_limit};
pub use run::{run, run_timed, Experiment, FailureReport, RunReport, Status, SCHEMA};

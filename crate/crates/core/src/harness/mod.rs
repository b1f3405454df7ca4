//! Configuration, seeded randomness, verification suites and experiment
//! drivers behind the `brp` binary.

pub mod checks;
pub mod config;
pub mod experiments;
pub mod report;
pub mod rng;

pub use checks::{check_algebra, check_algebra_with, check_chen, check_phi, check_realization, sign_flip, SuiteReport};
pub use config::{Experiment, ExperimentConfig};
pub use report::{Report, Stamp, Table};
pub use experiments::{experiment_convergence, experiment_lipschitz, experiment_ode_bounds};

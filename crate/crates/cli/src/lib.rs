//! Batch front end for the `fdecoll` solver: configuration files, the run
//! pipeline that writes solution and convergence tables, and a registry of
//! manufactured benchmark problems.

pub mod benchmarks;
pub mod config;
pub mod runner;

pub use benchmarks::{registry, Benchmark};
pub use config::{load_config, parse_config, write_config, ConfigError, Kind, ProblemConfig, ProblemSpec, SolverSettings};
pub use runner::{run, run_file, EocRow, RunError, RunOutput, SolutionRow};

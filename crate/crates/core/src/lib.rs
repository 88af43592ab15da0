//! Nonnegative/binary matrix factorization (NBMF) by alternating least
//! squares, with the per-column binary subproblems solved by pluggable
//! samplers that simulate forward and reverse annealing.
//!
//! The crate provides:
//!
//! - dense/binary matrix types and the iteration-change metrics
//!   ([`matrix`]),
//! - the per-column binary least squares QUBO ([`qubo`]),
//! - anneal schedules and the sampler family: exact enumeration, forward
//!   anneal, reverse anneal ([`schedule`], [`sampler`]) and tabu search
//!   ([`tabu`]),
//! - the nonnegative least squares update ([`nnls`]),
//! - the alternating driver with hybrid forward-then-reverse scheduling
//!   ([`driver`]),
//! - QPU access-time accounting, equal-time budgeting, and the
//!   reversal-distance calibration harness ([`cost`]),
//! - the time-to-target benchmark against a classical warm-start competitor
//!   ([`benchmark`]),
//! - planted synthetic instances ([`synthetic`]).

pub mod benchmark;
pub mod cost;
pub mod driver;
pub mod error;
pub mod matrix;
pub mod nnls;
pub mod qubo;
pub mod sampler;
pub mod schedule;
pub mod seed;
pub mod stats;
pub mod synthetic;
pub mod tabu;

pub use benchmark::{
    run_benchmark, run_benchmark_with, BenchmarkParams, BenchmarkRecord, BenchmarkSummary,
    Competitor, TabuCompetitor,
};
pub use cost::{
    calibrate, default_forward_cost, default_reverse_cost, equal_time_reverse_count,
    reverse_cost_for_hold, CalibrationPoint, CalibrationReport, CostModel, EqualTimePolicy,
};
pub use driver::{
    harvest_corpus, init_state, run, run_with_options, update_b, update_c, DriverConfig,
    FactorizationState, IterationRecord, RunOptions, UpdateMode,
};
pub use error::{Error, Result};
pub use matrix::{
    percent_change_b, percent_change_c, relative_residual, BinaryMatrix, BinaryVector, DenseMatrix,
};
pub use nnls::{solve_nonnegative, NnlsConfig, NnlsSolution};
pub use qubo::{build_column_qubo, Qubo};
pub use sampler::{
    categorize_samples, exact_solve, forward_sample, reverse_sample, CategoryFractions, Sample,
    SampleSet, SamplerConfig,
};
pub use schedule::{forward_schedule, reverse_schedule, AnnealSchedule};
pub use synthetic::{generate_synthetic, PlantedInstance};
pub use tabu::{tabu_solve, TabuOutcome};

//! Time-to-target benchmark: reverse annealing versus a classical warm-start
//! competitor on a QUBO corpus.
//!
//! Per QUBO, the reverse sampler runs from the incumbent and its best energy
//! becomes the target; the competitor then starts from the same incumbent
//! and is timed until it matches or beats that target. QUBOs the reverse
//! sampler failed to improve get a time-to-target of 0 and are flagged for
//! exclusion from plots.

use rayon::prelude::*;
use serde::Serialize;

use crate::cost::reverse_cost_for_hold;
use crate::error::{Error, Result};
use crate::matrix::BinaryVector;
use crate::qubo::Qubo;
use crate::sampler::{reverse_sample, SamplerConfig};
use crate::seed::derive_seed;
use crate::tabu::{tabu_solve, TabuOutcome};

/// A warm-start solver racing the reverse sampler toward a target energy.
/// External MILP solvers can be plugged in behind this trait.
pub trait Competitor: Sync {
    fn name(&self) -> &str;
    fn solve_to_target(
        &self,
        q: &Qubo,
        initial: &BinaryVector,
        target_energy: f64,
        max_time_us: u64,
    ) -> Result<TabuOutcome>;
}

/// The built-in competitor: single-bit-flip tabu search.
pub struct TabuCompetitor;

impl Competitor for TabuCompetitor {
    fn name(&self) -> &str {
        "tabu"
    }

    fn solve_to_target(
        &self,
        q: &Qubo,
        initial: &BinaryVector,
        target_energy: f64,
        max_time_us: u64,
    ) -> Result<TabuOutcome> {
        tabu_solve(q, initial, target_energy, max_time_us)
    }
}

/// Benchmark knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkParams {
    pub reversal_distance: f64,
    pub reversal_time_us: f64,
    pub reverse_samples: usize,
    pub sweeps_per_microsecond: u32,
    pub hot_temperature_scale: f64,
    pub seed: u64,
    /// Wall-clock budget per QUBO for the competitor.
    pub tabu_max_time_us: u64,
    /// Benchmark corpus entries in parallel; wall-clock timings become
    /// noisy and the summary is marked accordingly.
    pub parallel: bool,
}

impl Default for BenchmarkParams {
    fn default() -> Self {
        Self {
            reversal_distance: 0.45,
            reversal_time_us: 10.0,
            reverse_samples: 240,
            sweeps_per_microsecond: 10,
            hot_temperature_scale: 1.0,
            seed: 0,
            tabu_max_time_us: 1_000_000,
            parallel: false,
        }
    }
}

/// Outcome for one corpus QUBO.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRecord {
    pub qubo_id: usize,
    pub initial_energy: f64,
    pub reverse_best_energy: f64,
    pub classical_best_energy: f64,
    pub simulated_qpu_time_us: u64,
    pub simulated_anneal_time_us: u64,
    pub time_to_target_us: Option<u64>,
    pub reached: bool,
    pub improved: bool,
    pub excluded_from_plot: bool,
}

/// Exact sums of the per-record fields.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkSummary {
    pub competitor: String,
    pub num_qubos: usize,
    pub num_improved: usize,
    pub num_excluded: usize,
    pub num_reached: usize,
    pub num_not_reached: usize,
    pub total_time_to_target_us: u64,
    pub total_simulated_anneal_time_us: u64,
    pub total_simulated_qpu_time_us: u64,
    pub parallel_timing: bool,
}

fn benchmark_one(
    id: usize,
    q: &Qubo,
    initial: &BinaryVector,
    params: &BenchmarkParams,
    competitor: &dyn Competitor,
) -> Result<BenchmarkRecord> {
    let sampler = SamplerConfig {
        num_samples: params.reverse_samples,
        sweeps_per_microsecond: params.sweeps_per_microsecond,
        seed: derive_seed(params.seed, &[id as u64]),
        hot_temperature_scale: params.hot_temperature_scale,
    };
    let initial_energy = q.energy(initial)?;
    let set = reverse_sample(
        q,
        initial,
        params.reversal_distance,
        params.reversal_time_us,
        &sampler,
    )?;
    let reverse_best = set.best_energy();
    let improved = reverse_best < initial_energy;

    let cost = reverse_cost_for_hold(params.reversal_time_us.round() as u64);
    let qpu_time = cost.access_time_us(params.reverse_samples as u64);
    let anneal_time = cost.anneal_us * params.reverse_samples as u64;

    if !improved {
        // No improvement to chase: time to target is 0 by definition and the
        // record is excluded from plots.
        return Ok(BenchmarkRecord {
            qubo_id: id,
            initial_energy,
            reverse_best_energy: reverse_best,
            classical_best_energy: initial_energy,
            simulated_qpu_time_us: qpu_time,
            simulated_anneal_time_us: anneal_time,
            time_to_target_us: Some(0),
            reached: true,
            improved: false,
            excluded_from_plot: true,
        });
    }

    let outcome = competitor.solve_to_target(q, initial, reverse_best, params.tabu_max_time_us)?;
    Ok(BenchmarkRecord {
        qubo_id: id,
        initial_energy,
        reverse_best_energy: reverse_best,
        classical_best_energy: outcome.best_energy,
        simulated_qpu_time_us: qpu_time,
        simulated_anneal_time_us: anneal_time,
        time_to_target_us: outcome.time_to_target_us,
        reached: outcome.time_to_target_us.is_some(),
        improved: true,
        excluded_from_plot: false,
    })
}

/// Benchmarks the whole corpus against a competitor.
pub fn run_benchmark_with(
    corpus: &[(Qubo, BinaryVector)],
    params: &BenchmarkParams,
    competitor: &dyn Competitor,
) -> Result<(Vec<BenchmarkRecord>, BenchmarkSummary)> {
    if corpus.is_empty() {
        return Err(Error::invalid("run_benchmark", "empty QUBO corpus"));
    }
    let records: Vec<BenchmarkRecord> = if params.parallel {
        corpus
            .par_iter()
            .enumerate()
            .map(|(id, (q, initial))| benchmark_one(id, q, initial, params, competitor))
            .collect::<Result<_>>()?
    } else {
        // Sequential by default so wall-clock measurements are not contended.
        corpus
            .iter()
            .enumerate()
            .map(|(id, (q, initial))| benchmark_one(id, q, initial, params, competitor))
            .collect::<Result<_>>()?
    };

    let summary = BenchmarkSummary {
        competitor: competitor.name().to_string(),
        num_qubos: records.len(),
        num_improved: records.iter().filter(|r| r.improved).count(),
        num_excluded: records.iter().filter(|r| r.excluded_from_plot).count(),
        num_reached: records.iter().filter(|r| r.reached).count(),
        num_not_reached: records.iter().filter(|r| !r.reached).count(),
        total_time_to_target_us: records.iter().filter_map(|r| r.time_to_target_us).sum(),
        total_simulated_anneal_time_us: records.iter().map(|r| r.simulated_anneal_time_us).sum(),
        total_simulated_qpu_time_us: records.iter().map(|r| r.simulated_qpu_time_us).sum(),
        parallel_timing: params.parallel,
    };
    Ok((records, summary))
}

/// [`run_benchmark_with`] using the built-in tabu competitor.
pub fn run_benchmark(
    corpus: &[(Qubo, BinaryVector)],
    params: &BenchmarkParams,
) -> Result<(Vec<BenchmarkRecord>, BenchmarkSummary)> {
    run_benchmark_with(corpus, params, &TabuCompetitor)
}

/// Benchmark CSV, one row per corpus QUBO; `time_to_target_us` is blank when
/// the competitor never reached the target.
pub fn benchmark_csv(records: &[BenchmarkRecord]) -> String {
    let mut out = String::from(
        "qubo_id,initial_energy,reverse_best_energy,simulated_qpu_time_us,time_to_target_us,reached,excluded_from_plot\n",
    );
    for r in records {
        let ttt = r
            .time_to_target_us
            .map(|t| t.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.qubo_id,
            r.initial_energy,
            r.reverse_best_energy,
            r.simulated_qpu_time_us,
            ttt,
            r.reached,
            r.excluded_from_plot
        ));
    }
    out
}

//! Alternating least squares driver with hybrid forward-then-reverse
//! sampler scheduling.
//!
//! Each iteration solves the dense factor by nonnegative least squares and
//! then re-solves every column of the binary factor through a sampler. The
//! first `forward_warmup_iterations` iterations use the forward sampler (a
//! global search seeded from random states); later iterations use the
//! reverse sampler started from the incumbent column. Forward mode takes the
//! best sampled state with no fallback, so it can and does discard good
//! columns; reverse mode always keeps the incumbent, so per-column residuals
//! never increase. That asymmetry is the point of the hybrid schedule.
//!
//! All randomness derives from `master_seed` via per-(iteration, column)
//! streams, so results are independent of thread count.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{default_forward_cost, reverse_cost_for_hold, sample_corpus};
use crate::error::{Error, Result};
use crate::matrix::{
    percent_change_b, percent_change_c, relative_residual, BinaryMatrix, BinaryVector, DenseMatrix,
};
use crate::nnls::{solve_nonnegative, NnlsConfig};
use crate::qubo::{build_column_qubo, Qubo};
use crate::sampler::{exact_solve, forward_sample, reverse_sample, SamplerConfig};
use crate::seed::{derive_seed, stream_rng};

use rand::Rng;

const STREAM_INIT: u64 = 0x696e_6974; // "init"
const STREAM_COLUMN: u64 = 0x636f_6c75; // "colu"

/// Which sampler re-solves the binary columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpdateMode {
    /// Global search from random states; best sample wins, no incumbent.
    Forward,
    /// Local search from the incumbent column; never worsens a column.
    Reverse,
    /// Exhaustive per-column optimum (test hook; guarded to small ranks).
    Exact,
}

/// Full configuration of a factorization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverConfig {
    pub rank: usize,
    pub total_iterations: usize,
    /// Iterations run in forward mode before switching to reverse.
    pub forward_warmup_iterations: usize,
    /// Reversal distance r for the reverse phase.
    pub reversal_distance: f64,
    /// Reversal hold time t_r in µs.
    pub reversal_time_us: f64,
    pub forward_samples_per_qubo: usize,
    pub reverse_samples_per_qubo: usize,
    pub sweeps_per_microsecond: u32,
    pub hot_temperature_scale: f64,
    /// Bernoulli density of the random initial binary factor.
    pub init_density: f64,
    pub master_seed: u64,
    pub nnls: NnlsConfig,
}

impl DriverConfig {
    /// Defaults for rank `k`: 10 iterations, 1 forward warmup, r = 0.45,
    /// t_r = 10 µs, 100 forward / 24 reverse samples per QUBO (equal-time).
    pub fn new(rank: usize) -> Self {
        Self {
            rank,
            total_iterations: 10,
            forward_warmup_iterations: 1,
            reversal_distance: 0.45,
            reversal_time_us: 10.0,
            forward_samples_per_qubo: 100,
            reverse_samples_per_qubo: 24,
            sweeps_per_microsecond: 10,
            hot_temperature_scale: 1.0,
            init_density: 0.5,
            master_seed: 0,
            nnls: NnlsConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::invalid("DriverConfig", "rank must be >= 1"));
        }
        if self.forward_warmup_iterations > self.total_iterations {
            return Err(Error::invalid(
                "DriverConfig",
                format!(
                    "forward_warmup_iterations {} exceeds total_iterations {}",
                    self.forward_warmup_iterations, self.total_iterations
                ),
            ));
        }
        if !(0.0..=1.0).contains(&self.reversal_distance) {
            return Err(Error::invalid(
                "DriverConfig",
                format!(
                    "reversal_distance must lie in [0,1], got {}",
                    self.reversal_distance
                ),
            ));
        }
        if !(self.reversal_time_us > 0.0) {
            return Err(Error::invalid(
                "DriverConfig",
                format!("reversal_time_us must be positive, got {}", self.reversal_time_us),
            ));
        }
        if self.forward_samples_per_qubo == 0 || self.reverse_samples_per_qubo == 0 {
            return Err(Error::invalid(
                "DriverConfig",
                "samples per QUBO must be >= 1 for both modes",
            ));
        }
        if self.sweeps_per_microsecond == 0 {
            return Err(Error::invalid(
                "DriverConfig",
                "sweeps_per_microsecond must be >= 1",
            ));
        }
        if !(self.hot_temperature_scale > 0.0) {
            return Err(Error::invalid(
                "DriverConfig",
                "hot_temperature_scale must be positive",
            ));
        }
        if !(self.init_density > 0.0 && self.init_density <= 1.0) {
            return Err(Error::invalid(
                "DriverConfig",
                format!("init_density must lie in (0,1], got {}", self.init_density),
            ));
        }
        self.nnls.validate()
    }
}

/// One history row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub relative_residual: f64,
    pub percent_change_b: f64,
    pub percent_change_c: f64,
    pub cumulative_qpu_time_us: u64,
}

/// Evolving factorization: current factors, quality, and per-iteration
/// history. `history.len() == iteration` between operations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationState {
    pub iteration: usize,
    pub b: DenseMatrix,
    pub c: BinaryMatrix,
    pub relative_residual: f64,
    pub history: Vec<IterationRecord>,
}

/// Seeds the binary factor Bernoulli(init_density) and solves the dense
/// factor against it.
pub fn init_state(a: &DenseMatrix, cfg: &DriverConfig) -> Result<FactorizationState> {
    cfg.validate()?;
    if a.frobenius_norm() == 0.0 {
        return Err(Error::ZeroNorm { context: "init_state" });
    }
    let k = cfg.rank;
    let m = a.cols();
    let mut rng = stream_rng(cfg.master_seed, &[STREAM_INIT]);
    let bits: Vec<u8> = (0..k * m)
        .map(|_| u8::from(rng.random_bool(cfg.init_density)))
        .collect();
    let c = BinaryMatrix::from_vec(k, m, bits)?;
    let b = solve_nonnegative(a, &c, &cfg.nnls)?.matrix;
    let relative_residual = relative_residual(a, &b, &c)?;
    Ok(FactorizationState {
        iteration: 0,
        b,
        c,
        relative_residual,
        history: Vec::new(),
    })
}

/// Replaces the dense factor with the nonnegative least squares solution
/// against the current binary factor.
pub fn update_b(state: &mut FactorizationState, a: &DenseMatrix, cfg: &DriverConfig) -> Result<()> {
    state.b = solve_nonnegative(a, &state.c, &cfg.nnls)?.matrix;
    Ok(())
}

/// Re-solves every column of the binary factor independently through the
/// chosen sampler. Column streams derive from
/// `(master_seed, iteration + 1, column)`, so the result is identical no
/// matter how the columns are scheduled across threads.
pub fn update_c(
    state: &mut FactorizationState,
    a: &DenseMatrix,
    cfg: &DriverConfig,
    mode: UpdateMode,
) -> Result<()> {
    if a.rows() != state.b.rows() || a.cols() != state.c.cols() {
        return Err(Error::dims(
            "update_c",
            format!(
                "A {}x{} incompatible with B {}x{}, C {}x{}",
                a.rows(),
                a.cols(),
                state.b.rows(),
                state.b.cols(),
                state.c.rows(),
                state.c.cols()
            ),
        ));
    }
    let iteration = state.iteration as u64 + 1;
    let b = &state.b;
    let c = &state.c;
    let columns: Vec<BinaryVector> = (0..a.cols())
        .into_par_iter()
        .map(|j| -> Result<BinaryVector> {
            let a_col = a.column(j);
            let qubo = build_column_qubo(b, &a_col)?;
            let seed = derive_seed(cfg.master_seed, &[STREAM_COLUMN, iteration, j as u64]);
            match mode {
                UpdateMode::Forward => {
                    let sampler = SamplerConfig {
                        num_samples: cfg.forward_samples_per_qubo,
                        sweeps_per_microsecond: cfg.sweeps_per_microsecond,
                        seed,
                        hot_temperature_scale: cfg.hot_temperature_scale,
                    };
                    Ok(forward_sample(&qubo, &sampler)?.best_state().clone())
                }
                UpdateMode::Reverse => {
                    let sampler = SamplerConfig {
                        num_samples: cfg.reverse_samples_per_qubo,
                        sweeps_per_microsecond: cfg.sweeps_per_microsecond,
                        seed,
                        hot_temperature_scale: cfg.hot_temperature_scale,
                    };
                    let incumbent = c.column(j);
                    let set = reverse_sample(
                        &qubo,
                        &incumbent,
                        cfg.reversal_distance,
                        cfg.reversal_time_us,
                        &sampler,
                    )?;
                    Ok(set.best_state().clone())
                }
                UpdateMode::Exact => Ok(exact_solve(&qubo)?.0),
            }
        })
        .collect::<Result<_>>()?;

    for (j, col) in columns.iter().enumerate() {
        state.c.set_column(j, col)?;
    }
    Ok(())
}

/// Run options beyond the core configuration.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Write a checkpoint here after every iteration (atomic replace).
    pub checkpoint_path: Option<PathBuf>,
}

/// Simulated QPU access time charged for one iteration's C update.
fn iteration_qpu_time(cfg: &DriverConfig, mode: UpdateMode, num_columns: usize) -> u64 {
    let per_qubo = match mode {
        UpdateMode::Forward => {
            default_forward_cost().access_time_us(cfg.forward_samples_per_qubo as u64)
        }
        UpdateMode::Reverse => reverse_cost_for_hold(cfg.reversal_time_us.round() as u64)
            .access_time_us(cfg.reverse_samples_per_qubo as u64),
        // The exact test hook is not an anneal and is not charged.
        UpdateMode::Exact => 0,
    };
    per_qubo * num_columns as u64
}

/// Full run: init, then `total_iterations` of (update_b, update_c) with the
/// warmup/reverse mode schedule, recording history and checkpoints.
pub fn run_with_options(
    a: &DenseMatrix,
    cfg: &DriverConfig,
    options: &RunOptions,
) -> Result<FactorizationState> {
    let mut state = init_state(a, cfg)?;
    let mut cumulative_qpu = 0u64;
    for i in 1..=cfg.total_iterations {
        let b_prev = state.b.clone();
        let c_prev = state.c.clone();
        update_b(&mut state, a, cfg)?;
        let mode = if i <= cfg.forward_warmup_iterations {
            UpdateMode::Forward
        } else {
            UpdateMode::Reverse
        };
        update_c(&mut state, a, cfg, mode)?;
        state.iteration = i;
        state.relative_residual = relative_residual(a, &state.b, &state.c)?;
        // A degenerate all-zero previous factor has no defined relative
        // change; record 0 rather than failing the run.
        let pct_b = percent_change_b(&b_prev, &state.b).unwrap_or(0.0);
        let pct_c = percent_change_c(&c_prev, &state.c)?;
        cumulative_qpu += iteration_qpu_time(cfg, mode, a.cols());
        state.history.push(IterationRecord {
            iteration: i,
            relative_residual: state.relative_residual,
            percent_change_b: pct_b,
            percent_change_c: pct_c,
            cumulative_qpu_time_us: cumulative_qpu,
        });
        if let Some(path) = &options.checkpoint_path {
            write_checkpoint(path, &state, cfg)?;
        }
    }
    Ok(state)
}

/// [`run_with_options`] without checkpointing.
pub fn run(a: &DenseMatrix, cfg: &DriverConfig) -> Result<FactorizationState> {
    run_with_options(a, cfg, &RunOptions::default())
}

#[derive(Serialize)]
struct CheckpointFile<'a> {
    iteration: usize,
    k: usize,
    b: &'a DenseMatrix,
    c: &'a BinaryMatrix,
    history: &'a [IterationRecord],
    config: &'a DriverConfig,
    master_seed: u64,
}

/// Checkpoint JSON with fields iteration, k, b, c, history, config,
/// master_seed.
pub fn checkpoint_json(state: &FactorizationState, cfg: &DriverConfig) -> String {
    serde_json::to_string(&CheckpointFile {
        iteration: state.iteration,
        k: cfg.rank,
        b: &state.b,
        c: &state.c,
        history: &state.history,
        config: cfg,
        master_seed: cfg.master_seed,
    })
    .expect("checkpoint serialization cannot fail")
}

/// Writes the checkpoint atomically (temp file, then rename), so an
/// interrupted run always leaves the previous checkpoint intact.
pub fn write_checkpoint(
    path: &Path,
    state: &FactorizationState,
    cfg: &DriverConfig,
) -> Result<()> {
    let json = checkpoint_json(state, cfg);
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, json).map_err(|e| Error::Io {
        context: "write_checkpoint",
        detail: format!("{}: {e}", tmp.display()),
    })?;
    fs::rename(&tmp, path).map_err(|e| Error::Io {
        context: "write_checkpoint",
        detail: format!("{}: {e}", path.display()),
    })
}

/// History CSV: one row per iteration.
pub fn history_csv(history: &[IterationRecord]) -> String {
    let mut out =
        String::from("iteration,relative_residual,pct_change_b,pct_change_c,cumulative_qpu_time_us\n");
    for r in history {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.iteration,
            r.relative_residual,
            r.percent_change_b,
            r.percent_change_c,
            r.cumulative_qpu_time_us
        ));
    }
    out
}

/// Harvests per-column QUBOs (with their incumbent columns) as they stand
/// right after the forward warmup, then samples `count` of them uniformly.
/// This is the corpus the calibration and benchmark protocols study.
pub fn harvest_corpus(
    a: &DenseMatrix,
    cfg: &DriverConfig,
    count: usize,
) -> Result<Vec<(Qubo, BinaryVector)>> {
    let mut state = init_state(a, cfg)?;
    for i in 1..=cfg.forward_warmup_iterations {
        update_b(&mut state, a, cfg)?;
        update_c(&mut state, a, cfg, UpdateMode::Forward)?;
        state.iteration = i;
    }
    update_b(&mut state, a, cfg)?;
    let mut qubos = Vec::with_capacity(a.cols());
    for j in 0..a.cols() {
        let qubo = build_column_qubo(&state.b, &a.column(j))?;
        qubos.push((qubo, state.c.column(j)));
    }
    Ok(sample_corpus(qubos, count, cfg.master_seed))
}

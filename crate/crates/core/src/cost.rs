//! Simulated QPU access-time accounting and the reversal-distance
//! calibration harness.
//!
//! Access time is `(anneal + readout + delay) × samples + programming`, in
//! exact integer µs. The default models carry the measured per-sample
//! constants: both anneals share a 123 µs readout and 8001 µs programming
//! time; the forward anneal lasts 20 µs with a 21 µs reset delay, the reverse
//! anneal 30 µs with a 520 µs delay (state preparation dominates). Equal-time
//! budgeting uses the exact 164/673 per-sample ratio by default, or the
//! rounded 0.24 factor behind a flag.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::BinaryVector;
use crate::qubo::Qubo;
use crate::sampler::{categorize_samples, reverse_sample, SamplerConfig};
use crate::seed::{derive_seed, stream_rng};
use crate::stats::mean_and_sd;

/// Per-sample and per-QUBO timing constants in µs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostModel {
    pub anneal_us: u64,
    pub readout_us: u64,
    pub delay_us: u64,
    pub programming_us: u64,
}

impl CostModel {
    /// Time attributable to one sample.
    pub fn per_sample_us(&self) -> u64 {
        self.anneal_us + self.readout_us + self.delay_us
    }

    /// Total access time for `num_samples` samples of one QUBO.
    pub fn access_time_us(&self, num_samples: u64) -> u64 {
        self.per_sample_us() * num_samples + self.programming_us
    }
}

/// Forward-anneal cost model: 20 + 123 + 21 per sample, 8001 programming.
pub fn default_forward_cost() -> CostModel {
    CostModel {
        anneal_us: 20,
        readout_us: 123,
        delay_us: 21,
        programming_us: 8001,
    }
}

/// Reverse-anneal cost model at the standard 10 µs hold: 30 + 123 + 520 per
/// sample, 8001 programming.
pub fn default_reverse_cost() -> CostModel {
    reverse_cost_for_hold(10)
}

/// Reverse-anneal cost model for an arbitrary hold time; the anneal lasts
/// `20 + t_r` µs.
pub fn reverse_cost_for_hold(t_r_us: u64) -> CostModel {
    CostModel {
        anneal_us: 20 + t_r_us,
        readout_us: 123,
        delay_us: 520,
        programming_us: 8001,
    }
}

/// How to convert a forward-sample budget into a reverse-sample count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EqualTimePolicy {
    /// Round `n × (forward per-sample) / (reverse per-sample)`.
    ExactRatio,
    /// Round `n × 0.24`, the flat two-decimal factor.
    RoundedFactor,
}

/// Reverse-sample count with the same access-time budget as
/// `forward_samples` forward samples, under the given models.
pub fn equal_time_reverse_count_for(
    forward: &CostModel,
    reverse: &CostModel,
    forward_samples: u64,
    policy: EqualTimePolicy,
) -> u64 {
    match policy {
        EqualTimePolicy::ExactRatio => {
            let ratio = forward.per_sample_us() as f64 / reverse.per_sample_us() as f64;
            (forward_samples as f64 * ratio).round() as u64
        }
        EqualTimePolicy::RoundedFactor => (forward_samples as f64 * 0.24).round() as u64,
    }
}

/// Equal-time reverse count under the default cost models.
pub fn equal_time_reverse_count(forward_samples: u64, policy: EqualTimePolicy) -> u64 {
    equal_time_reverse_count_for(
        &default_forward_cost(),
        &default_reverse_cost(),
        forward_samples,
        policy,
    )
}

/// Aggregated sample categories at one (t_r, r) grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationPoint {
    pub t_r_us: f64,
    pub r: f64,
    pub mean_better: f64,
    pub sd_better: f64,
    pub mean_same: f64,
    pub sd_same: f64,
    pub mean_worse: f64,
    pub sd_worse: f64,
}

/// Grid scan of reverse-anneal efficacy over a QUBO corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub points: Vec<CalibrationPoint>,
    /// For each hold time, the reversal distance maximizing the mean
    /// better-fraction (ties go to the earliest grid entry).
    pub best_r_per_t_r: Vec<(f64, f64)>,
}

/// Runs `reverse_sample` on every corpus entry at every grid point and
/// aggregates the same/better/worse fractions.
pub fn calibrate(
    corpus: &[(Qubo, BinaryVector)],
    r_grid: &[f64],
    t_r_grid: &[f64],
    cfg: &SamplerConfig,
) -> Result<CalibrationReport> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(Error::invalid("calibrate", "empty QUBO corpus"));
    }
    if r_grid.is_empty() || t_r_grid.is_empty() {
        return Err(Error::invalid("calibrate", "empty parameter grid"));
    }
    for &r in r_grid {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::invalid(
                "calibrate",
                format!("reversal distance {r} outside [0,1]"),
            ));
        }
    }
    for &t_r in t_r_grid {
        if !(t_r > 0.0) {
            return Err(Error::invalid(
                "calibrate",
                format!("reversal time {t_r} must be positive"),
            ));
        }
    }

    let mut points = Vec::with_capacity(t_r_grid.len() * r_grid.len());
    for (ti, &t_r) in t_r_grid.iter().enumerate() {
        for (ri, &r) in r_grid.iter().enumerate() {
            let point_tag = (ti * r_grid.len() + ri) as u64;
            let fractions: Vec<(f64, f64, f64)> = corpus
                .par_iter()
                .enumerate()
                .map(|(ei, (q, initial))| {
                    let entry_cfg = SamplerConfig {
                        seed: derive_seed(cfg.seed, &[point_tag, ei as u64]),
                        ..cfg.clone()
                    };
                    let set = reverse_sample(q, initial, r, t_r, &entry_cfg)?;
                    let f = categorize_samples(q, initial, &set)?;
                    Ok((f.same, f.better, f.worse))
                })
                .collect::<Result<_>>()?;

            let same: Vec<f64> = fractions.iter().map(|f| f.0).collect();
            let better: Vec<f64> = fractions.iter().map(|f| f.1).collect();
            let worse: Vec<f64> = fractions.iter().map(|f| f.2).collect();
            let (mean_same, sd_same) = mean_and_sd(&same);
            let (mean_better, sd_better) = mean_and_sd(&better);
            let (mean_worse, sd_worse) = mean_and_sd(&worse);
            points.push(CalibrationPoint {
                t_r_us: t_r,
                r,
                mean_better,
                sd_better,
                mean_same,
                sd_same,
                mean_worse,
                sd_worse,
            });
        }
    }

    let mut best_r_per_t_r = Vec::with_capacity(t_r_grid.len());
    for &t_r in t_r_grid {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for p in points.iter().filter(|p| p.t_r_us == t_r) {
            if p.mean_better > best.0 {
                best = (p.mean_better, p.r);
            }
        }
        best_r_per_t_r.push((t_r, best.1));
    }

    Ok(CalibrationReport {
        points,
        best_r_per_t_r,
    })
}

impl CalibrationReport {
    /// CSV rendering, one row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("t_r_us,r,mean_better,sd_better,mean_same,sd_same,mean_worse,sd_worse\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                p.t_r_us,
                p.r,
                p.mean_better,
                p.sd_better,
                p.mean_same,
                p.sd_same,
                p.mean_worse,
                p.sd_worse
            ));
        }
        out
    }
}

/// Draws `count` column QUBOs (with their incumbent columns as initial
/// states) uniformly at random, capped at the number of columns available.
pub fn sample_corpus(
    qubos: Vec<(Qubo, BinaryVector)>,
    count: usize,
    seed: u64,
) -> Vec<(Qubo, BinaryVector)> {
    let mut rng = stream_rng(seed, &[0x636f_7270]); // "corp"
    let mut indices: Vec<usize> = (0..qubos.len()).collect();
    indices.shuffle(&mut rng);
    indices.truncate(count.min(qubos.len()));
    indices.sort_unstable();
    let mut keep: Vec<Option<(Qubo, BinaryVector)>> = qubos.into_iter().map(Some).collect();
    indices
        .into_iter()
        .map(|i| keep[i].take().expect("index selected once"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::build_column_qubo;
    use crate::matrix::DenseMatrix;
    use crate::sampler::exact_solve;

    #[test]
    fn default_model_arithmetic() {
        let f = default_forward_cost();
        let r = default_reverse_cost();
        assert_eq!(f.per_sample_us(), 164);
        assert_eq!(r.per_sample_us(), 673);
        assert_eq!(f.programming_us, 8001);
        assert_eq!(r.programming_us, 8001);
        assert_eq!(f.access_time_us(1000), 172_001);
        assert_eq!(r.access_time_us(240), 169_521);
        assert_eq!(f.access_time_us(0), 8001);
    }

    #[test]
    fn equal_time_counts() {
        assert_eq!(
            equal_time_reverse_count(1000, EqualTimePolicy::ExactRatio),
            244
        );
        assert_eq!(
            equal_time_reverse_count(1000, EqualTimePolicy::RoundedFactor),
            240
        );
        assert_eq!(
            equal_time_reverse_count(100, EqualTimePolicy::ExactRatio),
            24
        );
        // The exact per-sample ratio rounds to the flat 0.24 factor.
        let ratio = 164.0_f64 / 673.0;
        assert_eq!((ratio * 100.0).round() / 100.0, 0.24);
    }

    #[test]
    fn equal_time_budget_is_within_one_reverse_sample() {
        let f = default_forward_cost();
        let r = default_reverse_cost();
        for n in [1u64, 7, 29, 100, 1000, 4096] {
            let m = equal_time_reverse_count(n, EqualTimePolicy::ExactRatio);
            let forward_budget = f.access_time_us(n) as i64;
            let reverse_budget = r.access_time_us(m) as i64;
            assert!(
                (forward_budget - reverse_budget).unsigned_abs() <= r.per_sample_us(),
                "n = {n}"
            );
        }
    }

    fn tiny_corpus() -> Vec<(Qubo, BinaryVector)> {
        let b = DenseMatrix::from_vec(3, 2, vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        let q1 = build_column_qubo(&b, &[1.0, 0.0, 1.0]).unwrap();
        let q2 = build_column_qubo(&b, &[0.0, 1.0, 0.5]).unwrap();
        vec![
            (q1, BinaryVector::new(vec![0, 1]).unwrap()),
            (q2, BinaryVector::new(vec![1, 1]).unwrap()),
        ]
    }

    #[test]
    fn calibrate_r_zero_point_is_all_same() {
        let corpus = tiny_corpus();
        let cfg = SamplerConfig {
            num_samples: 50,
            seed: 5,
            ..SamplerConfig::default()
        };
        let report = calibrate(&corpus, &[0.0, 0.5], &[10.0], &cfg).unwrap();
        let p0 = report.points.iter().find(|p| p.r == 0.0).unwrap();
        assert_eq!(p0.mean_same, 1.0);
        assert_eq!(p0.mean_better, 0.0);
        assert_eq!(p0.mean_worse, 0.0);
        for p in &report.points {
            assert!((p.mean_same + p.mean_better + p.mean_worse - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn calibrate_ground_state_initial_never_improves() {
        let corpus: Vec<_> = tiny_corpus()
            .into_iter()
            .map(|(q, _)| {
                let (ground, _) = exact_solve(&q).unwrap();
                (q, ground)
            })
            .collect();
        let cfg = SamplerConfig {
            num_samples: 40,
            seed: 9,
            ..SamplerConfig::default()
        };
        let report = calibrate(&corpus, &[0.0, 0.3, 0.7, 1.0], &[10.0], &cfg).unwrap();
        for p in &report.points {
            assert_eq!(p.mean_better, 0.0, "r = {}", p.r);
        }
    }

    #[test]
    fn calibrate_is_deterministic() {
        let corpus = tiny_corpus();
        let cfg = SamplerConfig {
            num_samples: 25,
            seed: 31,
            ..SamplerConfig::default()
        };
        let a = calibrate(&corpus, &[0.2, 0.8], &[10.0, 100.0], &cfg).unwrap();
        let b = calibrate(&corpus, &[0.2, 0.8], &[10.0, 100.0], &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn calibration_csv_has_header_and_rows() {
        let corpus = tiny_corpus();
        let cfg = SamplerConfig {
            num_samples: 10,
            seed: 2,
            ..SamplerConfig::default()
        };
        let report = calibrate(&corpus, &[0.0, 1.0], &[10.0], &cfg).unwrap();
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("t_r_us,r,mean_better"));
    }

    #[test]
    fn sample_corpus_caps_and_is_deterministic() {
        let corpus = tiny_corpus();
        let a = sample_corpus(corpus.clone(), 5, 3);
        assert_eq!(a.len(), 2);
        let b = sample_corpus(corpus.clone(), 1, 3);
        let c = sample_corpus(corpus, 1, 3);
        assert_eq!(b, c);
        assert_eq!(b.len(), 1);
    }
}

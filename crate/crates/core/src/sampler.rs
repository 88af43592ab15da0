//! Samplers for column QUBOs: exact enumeration, forward-anneal simulation,
//! and reverse-anneal simulation.
//!
//! The anneal parameter s is mapped to a classical Metropolis temperature
//! `T(s) = T_hot·(1−s)` with `T_hot = hot_temperature_scale × max|coefficient|`.
//! A schedule of duration D µs runs as `D × sweeps_per_microsecond` sweeps;
//! one sweep proposes each of the k single-bit flips once, in random order,
//! with s interpolated at the sweep's midpoint. At T = 0 only strictly
//! improving flips are accepted, so s → 1 degenerates to greedy descent and
//! s → 0 to a fully randomizing walk. This reproduces the endpoint semantics
//! of the reversal distance: r = 0 returns the initial state untouched, r = 1
//! forgets it entirely.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::BinaryVector;
use crate::qubo::Qubo;
use crate::schedule::{forward_schedule, reverse_schedule, AnnealSchedule};
use crate::seed::stream_rng;

/// Enumeration guard for `exact_solve`.
pub const EXACT_SOLVE_MAX_VARS: usize = 25;

const STREAM_FORWARD: u64 = 0x666f_7277; // "forw"
const STREAM_REVERSE: u64 = 0x7265_7673; // "revs"

/// Simulation fidelity knobs shared by the samplers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Number of independent anneal runs per call.
    pub num_samples: usize,
    /// Metropolis sweeps simulated per schedule microsecond.
    pub sweeps_per_microsecond: u32,
    /// Base seed for this call's RNG streams.
    pub seed: u64,
    /// Multiplier on the QUBO's max |coefficient| for the hot temperature.
    pub hot_temperature_scale: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            num_samples: 100,
            sweeps_per_microsecond: 10,
            seed: 0,
            hot_temperature_scale: 1.0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_samples == 0 {
            return Err(Error::invalid("SamplerConfig", "num_samples must be >= 1"));
        }
        if self.sweeps_per_microsecond == 0 {
            return Err(Error::invalid(
                "SamplerConfig",
                "sweeps_per_microsecond must be >= 1",
            ));
        }
        if !(self.hot_temperature_scale > 0.0) {
            return Err(Error::invalid(
                "SamplerConfig",
                format!(
                    "hot_temperature_scale must be positive, got {}",
                    self.hot_temperature_scale
                ),
            ));
        }
        Ok(())
    }
}

/// One recorded anneal outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub state: BinaryVector,
    pub energy: f64,
}

/// All samples from one sampler call plus the best state seen.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    samples: Vec<Sample>,
    best_state: BinaryVector,
    best_energy: f64,
}

impl SampleSet {
    /// Assembles a set from recorded samples, optionally seeding the best
    /// with an incumbent that samples must strictly beat to replace.
    pub fn from_samples(samples: Vec<Sample>, incumbent: Option<Sample>) -> Result<Self> {
        let (mut best_state, mut best_energy) = match incumbent {
            Some(s) => (s.state, s.energy),
            None => match samples.first() {
                Some(s) => (s.state.clone(), s.energy),
                None => {
                    return Err(Error::invalid(
                        "SampleSet::from_samples",
                        "no samples and no incumbent",
                    ))
                }
            },
        };
        for s in &samples {
            if s.energy < best_energy {
                best_energy = s.energy;
                best_state = s.state.clone();
            }
        }
        Ok(Self {
            samples,
            best_state,
            best_energy,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn best_state(&self) -> &BinaryVector {
        &self.best_state
    }

    pub fn best_energy(&self) -> f64 {
        self.best_energy
    }
}

/// Fractions of samples that are the same as, better than, or worse than the
/// initial state. Fractions sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CategoryFractions {
    pub same: f64,
    pub better: f64,
    pub worse: f64,
}

fn hot_temperature(q: &Qubo, cfg: &SamplerConfig) -> f64 {
    cfg.hot_temperature_scale * q.max_abs_coefficient()
}

/// Runs one anneal over `schedule`, mutating `bits`/`energy` in place.
fn run_schedule(
    q: &Qubo,
    bits: &mut [u8],
    energy: &mut f64,
    schedule: &AnnealSchedule,
    sweeps_per_microsecond: u32,
    t_hot: f64,
    order: &mut [usize],
    rng: &mut ChaCha8Rng,
) {
    let duration = schedule.duration_us();
    let num_sweeps = ((duration * f64::from(sweeps_per_microsecond)).round() as usize).max(1);
    let k = bits.len();
    for sweep in 0..num_sweeps {
        let t_mid = (sweep as f64 + 0.5) * duration / num_sweeps as f64;
        let s = schedule.parameter_at(t_mid);
        let temperature = t_hot * (1.0 - s);
        order.shuffle(rng);
        for idx in 0..k {
            let i = order[idx];
            let delta = q.flip_delta(bits, i);
            let accept = if delta < 0.0 {
                true
            } else if temperature > 0.0 {
                rng.random::<f64>() < (-delta / temperature).exp()
            } else {
                false
            };
            if accept {
                bits[i] ^= 1;
                *energy += delta;
            }
        }
    }
}

/// Simulated forward anneal: every sample starts from a uniformly random
/// state and follows the default forward schedule. The best state is the
/// minimum over the samples alone; there is no incumbent fallback.
pub fn forward_sample(q: &Qubo, cfg: &SamplerConfig) -> Result<SampleSet> {
    cfg.validate()?;
    let schedule = forward_schedule();
    let t_hot = hot_temperature(q, cfg);
    let k = q.num_variables();
    let mut samples = Vec::with_capacity(cfg.num_samples);
    let mut order: Vec<usize> = (0..k).collect();
    for sample_idx in 0..cfg.num_samples {
        let mut rng = stream_rng(cfg.seed, &[STREAM_FORWARD, sample_idx as u64]);
        let mut bits: Vec<u8> = (0..k).map(|_| u8::from(rng.random::<bool>())).collect();
        let mut energy = q.energy_of_bits(&bits);
        run_schedule(
            q,
            &mut bits,
            &mut energy,
            &schedule,
            cfg.sweeps_per_microsecond,
            t_hot,
            &mut order,
            &mut rng,
        );
        // The running energy only steers acceptance; record the exact value
        // so sample energies are comparable without accumulated drift.
        let energy = q.energy_of_bits(&bits);
        samples.push(Sample {
            state: BinaryVector::from_bits_unchecked(bits),
            energy,
        });
    }
    SampleSet::from_samples(samples, None)
}

/// Simulated reverse anneal from `initial` with reversal distance `r` and
/// hold time `t_r_us`.
///
/// `r = 0` performs no search and returns the initial state for every
/// sample. Otherwise each sample starts at `initial` and follows the reverse
/// schedule. The initial state is always kept as a fallback incumbent, so
/// `best_energy <= energy(initial)`.
pub fn reverse_sample(
    q: &Qubo,
    initial: &BinaryVector,
    r: f64,
    t_r_us: f64,
    cfg: &SamplerConfig,
) -> Result<SampleSet> {
    cfg.validate()?;
    if initial.len() != q.num_variables() {
        return Err(Error::dims(
            "reverse_sample",
            format!(
                "initial state length {} but QUBO has {} variables",
                initial.len(),
                q.num_variables()
            ),
        ));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::invalid(
            "reverse_sample",
            format!("reversal distance must lie in [0,1], got {r}"),
        ));
    }
    let initial_energy = q.energy(initial)?;
    let incumbent = Sample {
        state: initial.clone(),
        energy: initial_energy,
    };

    if r == 0.0 {
        let samples = vec![incumbent.clone(); cfg.num_samples];
        return SampleSet::from_samples(samples, Some(incumbent));
    }

    let schedule = reverse_schedule(r, t_r_us)?;
    let t_hot = hot_temperature(q, cfg);
    let k = q.num_variables();
    let mut samples = Vec::with_capacity(cfg.num_samples);
    let mut order: Vec<usize> = (0..k).collect();
    for sample_idx in 0..cfg.num_samples {
        let mut rng = stream_rng(cfg.seed, &[STREAM_REVERSE, sample_idx as u64]);
        let mut bits = initial.bits().to_vec();
        let mut energy = initial_energy;
        run_schedule(
            q,
            &mut bits,
            &mut energy,
            &schedule,
            cfg.sweeps_per_microsecond,
            t_hot,
            &mut order,
            &mut rng,
        );
        let energy = q.energy_of_bits(&bits);
        samples.push(Sample {
            state: BinaryVector::from_bits_unchecked(bits),
            energy,
        });
    }
    SampleSet::from_samples(samples, Some(incumbent))
}

/// Classifies each sample against the initial state: bit-identical or
/// equal-energy states count as "same"; otherwise strictly lower energy is
/// "better" and strictly higher is "worse".
pub fn categorize_samples(
    q: &Qubo,
    initial: &BinaryVector,
    set: &SampleSet,
) -> Result<CategoryFractions> {
    let initial_energy = q.energy(initial)?;
    if set.samples().is_empty() {
        return Err(Error::invalid("categorize_samples", "empty sample set"));
    }
    let mut same = 0usize;
    let mut better = 0usize;
    let mut worse = 0usize;
    for s in set.samples() {
        if s.state == *initial || s.energy == initial_energy {
            same += 1;
        } else if s.energy < initial_energy {
            better += 1;
        } else {
            worse += 1;
        }
    }
    let n = set.samples().len() as f64;
    Ok(CategoryFractions {
        same: same as f64 / n,
        better: better as f64 / n,
        worse: worse as f64 / n,
    })
}

/// Exhaustive minimization over all 2^k states via Gray-code enumeration.
///
/// Ties are broken toward the state with the smallest big-endian integer
/// encoding. Guarded to k <= [`EXACT_SOLVE_MAX_VARS`].
pub fn exact_solve(q: &Qubo) -> Result<(BinaryVector, f64)> {
    let k = q.num_variables();
    if k > EXACT_SOLVE_MAX_VARS {
        return Err(Error::EnumerationTooLarge {
            variables: k,
            limit: EXACT_SOLVE_MAX_VARS,
        });
    }
    if k == 0 {
        return Err(Error::invalid("exact_solve", "QUBO has no variables"));
    }
    let mut bits = vec![0u8; k];
    let mut energy = 0.0_f64;
    let mut best_bits = bits.clone();
    let mut best_energy = 0.0_f64;
    let mut best_encoding = 0u64;

    let big_endian = |bits: &[u8]| -> u64 {
        bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
    };

    for code in 1u64..(1u64 << k) {
        let flip = code.trailing_zeros() as usize;
        energy += q.flip_delta(&bits, flip);
        bits[flip] ^= 1;
        // Incremental energies drift over long enumerations; re-evaluate
        // exactly before accepting a candidate or breaking a tie.
        if energy <= best_energy + 1e-9 * (1.0 + best_energy.abs()) {
            let exact = q.energy_of_bits(&bits);
            let encoding = big_endian(&bits);
            if exact < best_energy || (exact == best_energy && encoding < best_encoding) {
                best_energy = exact;
                best_encoding = encoding;
                best_bits.copy_from_slice(&bits);
            }
        }
    }
    Ok((BinaryVector::from_bits_unchecked(best_bits), best_energy))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_qubo() -> Qubo {
        Qubo::new(vec![-2.0, 0.0], vec![2.0], 2.0).unwrap()
    }

    #[test]
    fn exact_solve_examples() {
        let q = Qubo::new(vec![1.0, 1.0], vec![0.0], 0.0).unwrap();
        let (state, energy) = exact_solve(&q).unwrap();
        assert_eq!(state.bits(), &[0, 0]);
        assert_eq!(energy, 0.0);

        let q = Qubo::new(vec![-2.0, 0.0], vec![2.0], 0.0).unwrap();
        let (state, energy) = exact_solve(&q).unwrap();
        assert_eq!(state.bits(), &[1, 0]);
        assert_eq!(energy, -2.0);

        let q = Qubo::new(vec![-1.0, -1.0], vec![-1.0], 0.0).unwrap();
        let (state, energy) = exact_solve(&q).unwrap();
        assert_eq!(state.bits(), &[1, 1]);
        assert_eq!(energy, -3.0);
    }

    #[test]
    fn exact_solve_tie_breaks_to_smallest_big_endian() {
        // States (0,1) and (1,0) both have energy -1; (0,1) encodes to 1 < 2.
        let q = Qubo::new(vec![-1.0, -1.0], vec![2.0], 0.0).unwrap();
        let (state, energy) = exact_solve(&q).unwrap();
        assert_eq!(energy, -1.0);
        assert_eq!(state.bits(), &[0, 1]);
    }

    #[test]
    fn exact_solve_respects_enumeration_guard() {
        let k = EXACT_SOLVE_MAX_VARS + 1;
        let q = Qubo::new(vec![0.0; k], vec![0.0; k * (k - 1) / 2], 0.0).unwrap();
        assert!(matches!(
            exact_solve(&q),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn exact_solve_matches_full_scan_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..25 {
            let k = rng.random_range(1..=10);
            let linear: Vec<f64> = (0..k).map(|_| rng.random_range(-3.0..3.0)).collect();
            let quadratic: Vec<f64> = (0..k * (k - 1) / 2)
                .map(|_| rng.random_range(-3.0..3.0))
                .collect();
            let q = Qubo::new(linear, quadratic, 0.0).unwrap();

            let mut best = f64::INFINITY;
            let mut best_code = 0u64;
            for code in 0..(1u64 << k) {
                let bits: Vec<u8> = (0..k).map(|i| ((code >> (k - 1 - i)) & 1) as u8).collect();
                let e = q.energy(&BinaryVector::new(bits).unwrap()).unwrap();
                if e < best || (e == best && code < best_code) {
                    best = e;
                    best_code = code;
                }
            }
            let (state, energy) = exact_solve(&q).unwrap();
            assert!((energy - best).abs() < 1e-9);
            assert_eq!(state.as_big_endian_value(), best_code);
        }
    }

    #[test]
    fn forward_sample_finds_trivial_ground_state() {
        let q = Qubo::new(vec![-2.0], vec![], 0.0).unwrap();
        let mut hits = 0;
        for rep in 0..100 {
            let cfg = SamplerConfig {
                num_samples: 1,
                sweeps_per_microsecond: 10,
                seed: rep,
                hot_temperature_scale: 1.0,
            };
            let set = forward_sample(&q, &cfg).unwrap();
            if set.best_state().bits() == [1] {
                hits += 1;
            }
        }
        assert!(hits >= 99, "ground state found only {hits}/100 times");
    }

    #[test]
    fn forward_sample_cardinality_and_determinism() {
        let q = small_qubo();
        let cfg = SamplerConfig {
            num_samples: 5,
            seed: 42,
            ..SamplerConfig::default()
        };
        let a = forward_sample(&q, &cfg).unwrap();
        let b = forward_sample(&q, &cfg).unwrap();
        assert_eq!(a.samples().len(), 5);
        assert_eq!(a, b);
    }

    #[test]
    fn forward_sample_energies_are_consistent() {
        let q = small_qubo();
        let cfg = SamplerConfig {
            num_samples: 20,
            seed: 9,
            ..SamplerConfig::default()
        };
        let set = forward_sample(&q, &cfg).unwrap();
        for s in set.samples() {
            let exact = q.energy(&s.state).unwrap();
            assert!((s.energy - exact).abs() <= 1e-12);
        }
        let min = set
            .samples()
            .iter()
            .map(|s| s.energy)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(set.best_energy(), min);
    }

    #[test]
    fn reverse_sample_r_zero_returns_initial() {
        let q = small_qubo();
        let initial = BinaryVector::new(vec![0, 1]).unwrap();
        let cfg = SamplerConfig {
            num_samples: 17,
            seed: 3,
            ..SamplerConfig::default()
        };
        let set = reverse_sample(&q, &initial, 0.0, 10.0, &cfg).unwrap();
        assert_eq!(set.samples().len(), 17);
        assert!(set.samples().iter().all(|s| s.state == initial));
        assert_eq!(set.best_state(), &initial);
        let fractions = categorize_samples(&q, &initial, &set).unwrap();
        assert_eq!(fractions.same, 1.0);
        assert_eq!(fractions.better, 0.0);
        assert_eq!(fractions.worse, 0.0);
    }

    #[test]
    fn reverse_sample_keeps_incumbent() {
        let q = small_qubo();
        // (1,0) is the global minimum at energy -2; start there.
        let initial = BinaryVector::new(vec![1, 0]).unwrap();
        let cfg = SamplerConfig {
            num_samples: 30,
            seed: 11,
            ..SamplerConfig::default()
        };
        for r in [0.1, 0.45, 1.0] {
            let set = reverse_sample(&q, &initial, r, 10.0, &cfg).unwrap();
            assert!(set.best_energy() <= q.energy(&initial).unwrap());
            assert_eq!(set.best_energy(), -2.0);
        }
    }

    #[test]
    fn reverse_sample_validates_inputs() {
        let q = small_qubo();
        let initial = BinaryVector::new(vec![1, 0]).unwrap();
        let cfg = SamplerConfig::default();
        assert!(reverse_sample(&q, &BinaryVector::zeros(3), 0.5, 10.0, &cfg).is_err());
        assert!(reverse_sample(&q, &initial, -0.1, 10.0, &cfg).is_err());
        assert!(reverse_sample(&q, &initial, 1.5, 10.0, &cfg).is_err());
    }

    #[test]
    fn categorize_counts_equal_energy_as_same() {
        // Energies: (0,0) -> 0, (1,0) -> -1, (0,1) -> 1, (1,1) -> 0.
        let q = Qubo::new(vec![-1.0, 1.0], vec![0.0], 0.0).unwrap();
        let initial = BinaryVector::zeros(2);
        let samples = vec![
            Sample {
                state: BinaryVector::new(vec![1, 0]).unwrap(),
                energy: -1.0,
            },
            Sample {
                state: BinaryVector::new(vec![0, 1]).unwrap(),
                energy: 1.0,
            },
            Sample {
                state: BinaryVector::new(vec![1, 1]).unwrap(),
                energy: 0.0,
            },
        ];
        let set = SampleSet::from_samples(samples, None).unwrap();
        let f = categorize_samples(&q, &initial, &set).unwrap();
        assert!((f.same - 1.0 / 3.0).abs() < 1e-12);
        assert!((f.better - 1.0 / 3.0).abs() < 1e-12);
        assert!((f.worse - 1.0 / 3.0).abs() < 1e-12);
        assert!((f.same + f.better + f.worse - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampler_config_validation() {
        let cfg = SamplerConfig {
            num_samples: 0,
            ..SamplerConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SamplerConfig {
            sweeps_per_microsecond: 0,
            ..SamplerConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SamplerConfig {
            hot_temperature_scale: 0.0,
            ..SamplerConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}

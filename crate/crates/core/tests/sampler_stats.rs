//! Statistical behavior of the samplers: endpoint semantics of the reversal
//! distance, search-quality monotonicity in simulation fidelity, and the
//! calibration trend.

use nbmf_core::matrix::BinaryVector;
use nbmf_core::qubo::Qubo;
use nbmf_core::sampler::{categorize_samples, exact_solve, forward_sample, reverse_sample, SamplerConfig};
use nbmf_core::stats::two_sample_ks;

/// Fixed k=8 QUBO with mixed-sign coefficients of moderate magnitude.
fn fixed_qubo() -> Qubo {
    let linear = vec![-1.8, 0.7, 1.2, -0.4, 2.1, -1.1, 0.3, -2.4];
    let quadratic = vec![
        0.9, -1.3, 0.4, 1.1, -0.6, 0.2, 1.4, //
        -0.8, 0.5, 1.0, 0.3, -1.2, 0.6, //
        1.3, -0.9, 0.8, 0.1, -0.5, //
        0.7, 1.2, -1.0, 0.4, //
        -0.3, 0.9, 1.1, //
        0.5, -1.4, //
        0.8,
    ];
    Qubo::new(linear, quadratic, 0.0).unwrap()
}

#[test]
fn full_reversal_forgets_the_initial_state() {
    let q = fixed_qubo();
    let cfg = SamplerConfig {
        num_samples: 1000,
        sweeps_per_microsecond: 10,
        seed: 1234,
        hot_temperature_scale: 1.0,
    };
    let cfg_b = SamplerConfig { seed: 5678, ..cfg.clone() };
    let from_zeros = reverse_sample(&q, &BinaryVector::zeros(8), 1.0, 10.0, &cfg).unwrap();
    let from_ones = reverse_sample(
        &q,
        &BinaryVector::new(vec![1; 8]).unwrap(),
        1.0,
        10.0,
        &cfg_b,
    )
    .unwrap();
    let energies_a: Vec<f64> = from_zeros.samples().iter().map(|s| s.energy).collect();
    let energies_b: Vec<f64> = from_ones.samples().iter().map(|s| s.energy).collect();
    let ks = two_sample_ks(&energies_a, &energies_b);
    assert!(
        ks.p_value > 0.01,
        "r = 1 energy distributions depend on the initial state: D = {}, p = {}",
        ks.statistic,
        ks.p_value
    );
}

#[test]
fn shallow_reversal_is_a_local_refinement() {
    // The instance has exactly two single-flip-stable states: the global
    // minimum at -5.9 and a shallow local minimum at -2.3. A shallow
    // excursion started at the global minimum must come back to it; started
    // at the shallow minimum it should mostly drain into the better basin.
    let q = fixed_qubo();
    let deep = BinaryVector::new(vec![1, 0, 0, 0, 0, 1, 0, 1]).unwrap();
    let shallow = BinaryVector::new(vec![1, 0, 0, 1, 0, 0, 1, 0]).unwrap();
    assert!(q.energy(&deep).unwrap() < q.energy(&shallow).unwrap());
    let cfg = SamplerConfig {
        num_samples: 1000,
        sweeps_per_microsecond: 10,
        seed: 1234,
        hot_temperature_scale: 1.0,
    };
    let cfg_b = SamplerConfig { seed: 5678, ..cfg.clone() };

    let from_deep = reverse_sample(&q, &deep, 0.1, 10.0, &cfg).unwrap();
    let f = categorize_samples(&q, &deep, &from_deep).unwrap();
    assert!(f.same >= 0.95, "deep incumbent not held: same = {}", f.same);
    assert_eq!(f.better, 0.0);

    let from_shallow = reverse_sample(&q, &shallow, 0.1, 10.0, &cfg_b).unwrap();
    let f = categorize_samples(&q, &shallow, &from_shallow).unwrap();
    assert!(
        f.better >= 0.5,
        "shallow incumbent should usually improve: better = {}",
        f.better
    );
}

#[test]
fn ground_state_hit_rate_is_monotone_in_sweep_rate() {
    // Frustrated k = 12 spin-glass-style instance with several local minima,
    // hard enough that a single short anneal often misses the optimum.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let linear: Vec<f64> = (0..12).map(|_| rng.random_range(-0.3..0.3)).collect();
    let quadratic: Vec<f64> = (0..66).map(|_| rng.random_range(-2.0..2.0)).collect();
    let q = Qubo::new(linear, quadratic, 0.0).unwrap();
    let (_, optimum) = exact_solve(&q).unwrap();

    let hit_rate = |sweeps: u32| -> f64 {
        let mut hits = 0;
        for trial in 0..200u64 {
            let cfg = SamplerConfig {
                num_samples: 1,
                sweeps_per_microsecond: sweeps,
                seed: 9000 + trial,
                hot_temperature_scale: 1.0,
            };
            let set = forward_sample(&q, &cfg).unwrap();
            if (set.best_energy() - optimum).abs() <= 1e-9 {
                hits += 1;
            }
        }
        hits as f64 / 200.0
    };

    let p_low = hit_rate(1);
    let p_mid = hit_rate(4);
    let p_high = hit_rate(16);
    assert!(
        p_low <= p_mid + 0.02 && p_mid <= p_high + 0.02,
        "hit rates not monotone: {p_low} {p_mid} {p_high}"
    );
    assert!(p_high > p_low, "more sweeps should help: {p_low} vs {p_high}");
}

#[test]
fn same_fraction_is_non_increasing_in_reversal_distance() {
    let q = fixed_qubo();
    let initial = BinaryVector::new(vec![1, 0, 1, 0, 1, 0, 1, 0]).unwrap();
    let mut previous = f64::INFINITY;
    for (i, r) in [0.0, 0.25, 0.5, 0.75, 1.0].into_iter().enumerate() {
        let cfg = SamplerConfig {
            num_samples: 1000,
            sweeps_per_microsecond: 10,
            seed: 40 + i as u64,
            hot_temperature_scale: 1.0,
        };
        let set = reverse_sample(&q, &initial, r, 10.0, &cfg).unwrap();
        let same = set
            .samples()
            .iter()
            .filter(|s| s.state == initial)
            .count() as f64
            / set.samples().len() as f64;
        assert!(
            same <= previous + 0.02,
            "same-fraction increased at r = {r}: {same} after {previous}"
        );
        previous = same;
    }
}

//! Single-bit-flip tabu search, the classical competitor in the
//! time-to-target benchmark.
//!
//! Tenure is `max(7, k/4)` with the usual aspiration rule: a tabu flip is
//! allowed when it improves the global incumbent. The search is fully
//! deterministic (ties break toward the lowest variable index); only the
//! wall-clock cutoff depends on the machine.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::matrix::BinaryVector;
use crate::qubo::Qubo;

/// Result of a tabu run toward a target energy.
#[derive(Debug, Clone, PartialEq)]
pub struct TabuOutcome {
    pub best_state: BinaryVector,
    pub best_energy: f64,
    /// Wall-clock µs until the incumbent first reached the target, or `None`
    /// if the target was not reached before the time budget expired.
    pub time_to_target_us: Option<u64>,
}

/// Runs tabu search from `initial`, recording the first instant the
/// incumbent energy reaches `target_energy` (within 1e-12). Returns as soon
/// as the target is reached, otherwise when `max_time_us` elapses.
pub fn tabu_solve(
    q: &Qubo,
    initial: &BinaryVector,
    target_energy: f64,
    max_time_us: u64,
) -> Result<TabuOutcome> {
    let k = q.num_variables();
    if initial.len() != k {
        return Err(Error::dims(
            "tabu_solve",
            format!("initial state length {} but QUBO has {k} variables", initial.len()),
        ));
    }
    if max_time_us == 0 {
        return Err(Error::invalid("tabu_solve", "max_time_us must be positive"));
    }

    let start = Instant::now();
    let target = target_energy + 1e-12;
    let mut bits = initial.bits().to_vec();
    let mut current_energy = q.energy(initial)?;
    let mut best_bits = bits.clone();
    let mut best_energy = current_energy;

    if best_energy <= target {
        return Ok(TabuOutcome {
            best_state: BinaryVector::from_bits_unchecked(best_bits),
            best_energy,
            time_to_target_us: Some(0),
        });
    }

    let tenure = 7.max(k / 4) as u64;
    let mut tabu_until = vec![0u64; k];
    let mut iteration = 0u64;

    loop {
        if start.elapsed().as_micros() as u64 >= max_time_us {
            return Ok(TabuOutcome {
                best_state: BinaryVector::from_bits_unchecked(best_bits),
                best_energy,
                time_to_target_us: None,
            });
        }
        iteration += 1;

        // Best admissible flip; fall back to the least-recently-tabued one
        // when every move is forbidden (tenure can exceed k for small QUBOs).
        let mut chosen: Option<(usize, f64)> = None;
        let mut fallback: (usize, u64) = (0, u64::MAX);
        for i in 0..k {
            let delta = q.flip_delta(&bits, i);
            let admissible =
                tabu_until[i] <= iteration || current_energy + delta < best_energy - 1e-15;
            if admissible {
                match chosen {
                    Some((_, best_delta)) if delta >= best_delta => {}
                    _ => chosen = Some((i, delta)),
                }
            }
            if tabu_until[i] < fallback.1 {
                fallback = (i, tabu_until[i]);
            }
        }
        let (flip, delta) = match chosen {
            Some(c) => c,
            None => (fallback.0, q.flip_delta(&bits, fallback.0)),
        };

        bits[flip] ^= 1;
        current_energy += delta;
        tabu_until[flip] = iteration + tenure;

        if current_energy < best_energy {
            best_energy = current_energy;
            best_bits.copy_from_slice(&bits);
            if best_energy <= target {
                return Ok(TabuOutcome {
                    best_state: BinaryVector::from_bits_unchecked(best_bits),
                    best_energy,
                    time_to_target_us: Some(start.elapsed().as_micros() as u64),
                });
            }
        }
    }
}

//! Nonnegative least squares update for the dense factor.
//!
//! Minimizes `‖A − X·C‖_F² + ridge·‖X‖_F²` over entrywise-nonnegative X by
//! projected gradient with fixed step 1/L, where `L = 2·λmax(C·Cᵀ) + 2·ridge`
//! is estimated by power iteration. The n rows of X decouple against the
//! shared Gram matrix, so each row is solved independently (and in parallel).
//! An accelerated variant with adaptive restart is on by default; both
//! variants stop when the projected gradient's infinity norm drops below the
//! configured tolerance.
//!
//! All-zero rows of C make the corresponding Gram row singular; with
//! ridge = 0 the affected components receive zero gradient and stay at their
//! zero initialization.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{BinaryMatrix, DenseMatrix};

/// Stopping and regularization controls for the nonnegative solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnlsConfig {
    pub max_iterations: usize,
    /// Projected-gradient infinity-norm stop threshold.
    pub tolerance: f64,
    /// Optional Tikhonov term on X.
    pub ridge: f64,
    /// Use the momentum (accelerated) variant with adaptive restart.
    pub accelerated: bool,
}

impl Default for NnlsConfig {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            tolerance: 1e-8,
            ridge: 0.0,
            accelerated: true,
        }
    }
}

impl NnlsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::invalid("NnlsConfig", "max_iterations must be >= 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid(
                "NnlsConfig",
                format!("tolerance must be positive, got {}", self.tolerance),
            ));
        }
        if !(self.ridge >= 0.0) {
            return Err(Error::invalid(
                "NnlsConfig",
                format!("ridge must be nonnegative, got {}", self.ridge),
            ));
        }
        Ok(())
    }
}

/// Solver output; non-convergence is flagged, not raised, and the returned
/// matrix is the best iterate found.
#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution {
    pub matrix: DenseMatrix,
    pub converged: bool,
    /// Largest iteration count over the independent row solves.
    pub iterations: usize,
    /// Largest projected-gradient infinity norm over rows at exit.
    pub max_projected_gradient: f64,
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
fn spectral_norm_psd(g: &DenseMatrix, steps: usize) -> f64 {
    let k = g.rows();
    let mut v = vec![1.0 / (k as f64).sqrt(); k];
    let mut lambda = 0.0;
    for _ in 0..steps {
        let mut w = vec![0.0; k];
        for i in 0..k {
            let row = g.row(i);
            let mut acc = 0.0;
            for (x, y) in row.iter().zip(&v) {
                acc += x * y;
            }
            w[i] = acc;
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm;
        for x in &mut w {
            *x /= norm;
        }
        v = w;
    }
    lambda
}

struct RowResult {
    x: Vec<f64>,
    converged: bool,
    iterations: usize,
    projected_gradient: f64,
}

/// Quadratic objective for one row: x·G·xᵀ − 2·h·xᵀ + const (+ ridge‖x‖²).
fn row_objective(g: &DenseMatrix, h: &[f64], ridge: f64, x: &[f64]) -> f64 {
    let k = x.len();
    let mut quad = 0.0;
    for i in 0..k {
        if x[i] == 0.0 {
            continue;
        }
        let row = g.row(i);
        let mut acc = 0.0;
        for (gij, xj) in row.iter().zip(x) {
            acc += gij * xj;
        }
        quad += x[i] * acc;
    }
    let linear: f64 = h.iter().zip(x).map(|(hi, xi)| hi * xi).sum();
    quad - 2.0 * linear + ridge * x.iter().map(|v| v * v).sum::<f64>()
}

fn row_gradient(g: &DenseMatrix, h: &[f64], ridge: f64, x: &[f64], grad: &mut [f64]) {
    let k = x.len();
    for i in 0..k {
        let row = g.row(i);
        let mut acc = 0.0;
        for (gij, xj) in row.iter().zip(x) {
            acc += gij * xj;
        }
        grad[i] = 2.0 * (acc - h[i]) + 2.0 * ridge * x[i];
    }
}

/// Infinity norm of the projected gradient at x >= 0.
fn projected_gradient_norm(x: &[f64], grad: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for (&xi, &gi) in x.iter().zip(grad) {
        let pg = if xi > 0.0 { gi } else { gi.min(0.0) };
        worst = worst.max(pg.abs());
    }
    worst
}

fn solve_row(g: &DenseMatrix, h: &[f64], step: f64, cfg: &NnlsConfig) -> RowResult {
    let k = h.len();
    let mut x = vec![0.0; k];
    let mut grad = vec![0.0; k];

    row_gradient(g, h, cfg.ridge, &x, &mut grad);
    let mut pg = projected_gradient_norm(&x, &grad);
    if pg <= cfg.tolerance {
        return RowResult {
            x,
            converged: true,
            iterations: 0,
            projected_gradient: pg,
        };
    }

    let mut best_x = x.clone();
    let mut best_obj = row_objective(g, h, cfg.ridge, &x);
    let mut y = x.clone();
    let mut momentum = 1.0_f64;

    for iter in 1..=cfg.max_iterations {
        if cfg.accelerated {
            row_gradient(g, h, cfg.ridge, &y, &mut grad);
        } else {
            row_gradient(g, h, cfg.ridge, &x, &mut grad);
        }
        let prev = x.clone();
        let base = if cfg.accelerated { &y } else { &x };
        let mut next = vec![0.0; k];
        for i in 0..k {
            next[i] = (base[i] - step * grad[i]).max(0.0);
        }

        if cfg.accelerated {
            // Adaptive restart: drop momentum when the step reverses direction.
            let mut restart = 0.0;
            for i in 0..k {
                restart += (y[i] - next[i]) * (next[i] - prev[i]);
            }
            if restart > 0.0 {
                momentum = 1.0;
                y = next.clone();
            } else {
                let next_momentum = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
                let beta = (momentum - 1.0) / next_momentum;
                for i in 0..k {
                    y[i] = next[i] + beta * (next[i] - prev[i]);
                }
                momentum = next_momentum;
            }
        }
        x = next;

        let obj = row_objective(g, h, cfg.ridge, &x);
        if obj < best_obj {
            best_obj = obj;
            best_x.copy_from_slice(&x);
        }

        row_gradient(g, h, cfg.ridge, &x, &mut grad);
        pg = projected_gradient_norm(&x, &grad);
        if pg <= cfg.tolerance {
            return RowResult {
                x,
                converged: true,
                iterations: iter,
                projected_gradient: pg,
            };
        }
    }

    row_gradient(g, h, cfg.ridge, &best_x, &mut grad);
    let pg = projected_gradient_norm(&best_x, &grad);
    RowResult {
        x: best_x,
        converged: false,
        iterations: cfg.max_iterations,
        projected_gradient: pg,
    }
}

/// Solves `argmin_{X >= 0} ‖A − X·C‖_F² + ridge·‖X‖_F²` for A n×m, C k×m.
pub fn solve_nonnegative(
    a: &DenseMatrix,
    c: &BinaryMatrix,
    cfg: &NnlsConfig,
) -> Result<NnlsSolution> {
    cfg.validate()?;
    if a.cols() != c.cols() {
        return Err(Error::dims(
            "solve_nonnegative",
            format!(
                "A is {}x{} but C is {}x{}",
                a.rows(),
                a.cols(),
                c.rows(),
                c.cols()
            ),
        ));
    }
    let n = a.rows();
    let k = c.rows();

    let gram = c.gram();
    let h = a.times_binary_transpose(c)?;
    let lipschitz = 2.0 * spectral_norm_psd(&gram, 50) + 2.0 * cfg.ridge;
    if lipschitz <= 0.0 {
        // C is identically zero: the ridge-free optimum if every component is 0.
        return Ok(NnlsSolution {
            matrix: DenseMatrix::zeros(n, k)?,
            converged: true,
            iterations: 0,
            max_projected_gradient: 0.0,
        });
    }
    let step = 1.0 / lipschitz;

    let rows: Vec<RowResult> = (0..n)
        .into_par_iter()
        .map(|i| solve_row(&gram, h.row(i), step, cfg))
        .collect();

    let mut values = Vec::with_capacity(n * k);
    let mut converged = true;
    let mut iterations = 0;
    let mut max_pg = 0.0_f64;
    for r in rows {
        values.extend_from_slice(&r.x);
        converged &= r.converged;
        iterations = iterations.max(r.iterations);
        max_pg = max_pg.max(r.projected_gradient);
    }

    Ok(NnlsSolution {
        matrix: DenseMatrix::from_vec(n, k, values)?,
        converged,
        iterations,
        max_projected_gradient: max_pg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::relative_residual;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn kkt_holds(a: &DenseMatrix, c: &BinaryMatrix, x: &DenseMatrix, cfg: &NnlsConfig) -> bool {
        // Gradient of ‖A − XC‖² + ridge‖X‖² is 2(XC − A)Cᵀ + 2·ridge·X.
        let xc = x.multiply_binary(c).unwrap();
        let mut diff_values = Vec::with_capacity(xc.values().len());
        for (p, q) in xc.values().iter().zip(a.values()) {
            diff_values.push(p - q);
        }
        let diff = DenseMatrix::from_vec(a.rows(), a.cols(), diff_values).unwrap();
        let grad_ls = diff.times_binary_transpose(c).unwrap();
        for i in 0..x.rows() {
            for j in 0..x.cols() {
                let g = 2.0 * grad_ls.get(i, j) + 2.0 * cfg.ridge * x.get(i, j);
                let xi = x.get(i, j);
                if xi > cfg.tolerance {
                    if g.abs() > 10.0 * cfg.tolerance {
                        return false;
                    }
                } else if xi == 0.0 && g < -10.0 * cfg.tolerance {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn zero_target_gives_zero_solution() {
        let a = DenseMatrix::zeros(3, 4).unwrap();
        let c = BinaryMatrix::from_vec(2, 4, vec![1, 0, 1, 1, 0, 1, 0, 1]).unwrap();
        let sol = solve_nonnegative(&a, &c, &NnlsConfig::default()).unwrap();
        assert!(sol.converged);
        assert!(sol.matrix.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_right_factor_recovers_a() {
        let a = DenseMatrix::from_vec(2, 3, vec![0.5, 1.0, 0.0, 2.0, 0.25, 3.0]).unwrap();
        let c = BinaryMatrix::identity(3).unwrap();
        let sol = solve_nonnegative(&a, &c, &NnlsConfig::default()).unwrap();
        assert!(sol.converged);
        for (x, y) in sol.matrix.values().iter().zip(a.values()) {
            assert!((x - y).abs() < 1e-6, "{x} vs {y}");
        }
    }

    #[test]
    fn identity_right_factor_projects_negative_part() {
        let a = DenseMatrix::from_vec(2, 2, vec![-1.0, 2.0, 0.5, -3.0]).unwrap();
        let c = BinaryMatrix::identity(2).unwrap();
        let sol = solve_nonnegative(&a, &c, &NnlsConfig::default()).unwrap();
        let expected = [0.0, 2.0, 0.5, 0.0];
        for (x, y) in sol.matrix.values().iter().zip(&expected) {
            assert!((x - y).abs() < 1e-6);
        }
    }

    #[test]
    fn scalar_negative_target_projects_to_zero() {
        let a = DenseMatrix::from_vec(1, 1, vec![-1.0]).unwrap();
        let c = BinaryMatrix::from_vec(1, 1, vec![1]).unwrap();
        let sol = solve_nonnegative(&a, &c, &NnlsConfig::default()).unwrap();
        assert_eq!(sol.matrix.get(0, 0), 0.0);
        assert!(sol.converged);
    }

    #[test]
    fn planted_instance_reaches_tiny_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 6;
        let k = 3;
        let m = 8;
        let b_values: Vec<f64> = (0..n * k).map(|_| rng.random_range(0.0..2.0)).collect();
        let b_star = DenseMatrix::from_vec(n, k, b_values).unwrap();
        // Identity block guarantees full row rank.
        let mut bits = vec![0u8; k * m];
        for i in 0..k {
            bits[i * m + i] = 1;
        }
        for row in 0..k {
            for col in k..m {
                bits[row * m + col] = u8::from(rng.random::<bool>());
            }
        }
        let c = BinaryMatrix::from_vec(k, m, bits).unwrap();
        let a = b_star.multiply_binary(&c).unwrap();

        let sol = solve_nonnegative(&a, &c, &NnlsConfig::default()).unwrap();
        let residual = relative_residual(&a, &sol.matrix, &c).unwrap();
        assert!(residual <= 1e-6, "residual {residual}");
    }

    #[test]
    fn all_zero_row_of_c_keeps_component_at_zero() {
        let a = DenseMatrix::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let c = BinaryMatrix::from_vec(2, 3, vec![1, 1, 1, 0, 0, 0]).unwrap();
        let sol = solve_nonnegative(&a, &c, &NnlsConfig::default()).unwrap();
        assert_eq!(sol.matrix.get(0, 1), 0.0);
        assert_eq!(sol.matrix.get(1, 1), 0.0);
        assert!(sol.matrix.is_nonnegative());
    }

    #[test]
    fn kkt_and_baseline_on_random_instances() {
        let cfg = NnlsConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..50 {
            let n = rng.random_range(1..=8);
            let k = rng.random_range(1..=6);
            let m = rng.random_range(k..=10);
            let a_values: Vec<f64> = (0..n * m).map(|_| rng.random_range(-1.0..2.0)).collect();
            let a = DenseMatrix::from_vec(n, m, a_values).unwrap();
            let bits: Vec<u8> = (0..k * m).map(|_| u8::from(rng.random::<bool>())).collect();
            let c = BinaryMatrix::from_vec(k, m, bits).unwrap();

            let sol = solve_nonnegative(&a, &c, &cfg).unwrap();
            assert!(sol.matrix.is_nonnegative(), "trial {trial}");
            assert!(kkt_holds(&a, &c, &sol.matrix, &cfg), "trial {trial}");

            // Objective never exceeds the X = 0 baseline.
            let xc = sol.matrix.multiply_binary(&c).unwrap();
            let mut sq = 0.0;
            for (p, q) in a.values().iter().zip(xc.values()) {
                let d = p - q;
                sq += d * d;
            }
            let baseline = a.frobenius_norm();
            assert!(
                sq.sqrt() <= baseline + 1e-9 * (1.0 + baseline),
                "trial {trial}"
            );
        }
    }

    #[test]
    fn plain_projected_gradient_agrees_with_accelerated() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a_values: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..2.0)).collect();
        let a = DenseMatrix::from_vec(4, 5, a_values).unwrap();
        let bits: Vec<u8> = (0..15).map(|_| u8::from(rng.random::<bool>())).collect();
        let c = BinaryMatrix::from_vec(3, 5, bits).unwrap();

        let accel = solve_nonnegative(&a, &c, &NnlsConfig::default()).unwrap();
        let plain_cfg = NnlsConfig {
            accelerated: false,
            max_iterations: 50_000,
            ..NnlsConfig::default()
        };
        let plain = solve_nonnegative(&a, &c, &plain_cfg).unwrap();
        for (x, y) in accel.matrix.values().iter().zip(plain.matrix.values()) {
            assert!((x - y).abs() < 1e-5, "{x} vs {y}");
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = DenseMatrix::zeros(2, 3).unwrap();
        let c = BinaryMatrix::zeros(2, 4).unwrap();
        assert!(solve_nonnegative(&a, &c, &NnlsConfig::default()).is_err());
    }

    #[test]
    fn ridge_shrinks_solution() {
        let a = DenseMatrix::from_vec(1, 2, vec![1.0, 1.0]).unwrap();
        let c = BinaryMatrix::from_vec(1, 2, vec![1, 1]).unwrap();
        let plain = solve_nonnegative(&a, &c, &NnlsConfig::default()).unwrap();
        let ridged = solve_nonnegative(
            &a,
            &c,
            &NnlsConfig {
                ridge: 10.0,
                ..NnlsConfig::default()
            },
        )
        .unwrap();
        assert!(ridged.matrix.get(0, 0) < plain.matrix.get(0, 0));
    }
}

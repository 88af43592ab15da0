//! Per-column binary least squares as a QUBO.
//!
//! Solving one column `q` of the binary factor against a fixed nonnegative
//! basis `B` and target column `a` means minimizing `‖a − B·q‖²`. Expanding
//! the square gives linear coefficients `a_j = Σ_l B_lj (B_lj − 2 a_l)`,
//! quadratic coefficients `b_jk = 2 Σ_l B_lj B_lk` for `j < k`, and the
//! constant `‖a‖²`. The constant does not affect the argmin but is carried as
//! an explicit offset so samplers and benchmarks can report true squared
//! residuals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{BinaryVector, DenseMatrix};

/// Quadratic unconstrained binary objective over k variables.
///
/// Quadratic coefficients are stored strictly upper-triangular (`i < j`),
/// packed row by row; the objective's double sum runs over unordered pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qubo {
    k: usize,
    linear: Vec<f64>,
    quadratic: Vec<f64>,
    offset: f64,
}

impl Qubo {
    /// Builds a QUBO from linear terms, packed upper-triangular quadratic
    /// terms, and a nonnegative constant offset.
    pub fn new(linear: Vec<f64>, quadratic: Vec<f64>, offset: f64) -> Result<Self> {
        let k = linear.len();
        let expected = k * (k.saturating_sub(1)) / 2;
        if quadratic.len() != expected {
            return Err(Error::dims(
                "Qubo::new",
                format!(
                    "k = {k} requires {expected} quadratic coefficients, got {}",
                    quadratic.len()
                ),
            ));
        }
        if !(offset >= 0.0) {
            return Err(Error::invalid(
                "Qubo::new",
                format!("offset must be nonnegative, got {offset}"),
            ));
        }
        Ok(Self {
            k,
            linear,
            quadratic,
            offset,
        })
    }

    pub fn num_variables(&self) -> usize {
        self.k
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &[f64] {
        &self.quadratic
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Index into the packed quadratic storage for the pair `i < j`.
    #[inline]
    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.k);
        i * (2 * self.k - i - 1) / 2 + (j - i - 1)
    }

    /// Quadratic coefficient for an unordered pair of distinct variables.
    #[inline]
    pub fn quadratic_at(&self, i: usize, j: usize) -> f64 {
        if i < j {
            self.quadratic[self.pair_index(i, j)]
        } else {
            self.quadratic[self.pair_index(j, i)]
        }
    }

    /// Objective value `Σ a_i q_i + Σ_{i<j} b_ij q_i q_j`, excluding the offset.
    pub fn energy(&self, q: &BinaryVector) -> Result<f64> {
        if q.len() != self.k {
            return Err(Error::dims(
                "Qubo::energy",
                format!("state length {} but k = {}", q.len(), self.k),
            ));
        }
        Ok(self.energy_of_bits(q.bits()))
    }

    /// `energy + offset`, i.e. the true squared residual `‖a − B·q‖²`.
    pub fn residual_energy(&self, q: &BinaryVector) -> Result<f64> {
        Ok(self.energy(q)? + self.offset)
    }

    /// Energy over a raw bit slice; the caller guarantees the length.
    #[inline]
    pub(crate) fn energy_of_bits(&self, bits: &[u8]) -> f64 {
        debug_assert_eq!(bits.len(), self.k);
        let mut acc = 0.0;
        for i in 0..self.k {
            if bits[i] == 0 {
                continue;
            }
            acc += self.linear[i];
            let base = i * (2 * self.k - i - 1) / 2;
            for j in (i + 1)..self.k {
                if bits[j] == 1 {
                    acc += self.quadratic[base + (j - i - 1)];
                }
            }
        }
        acc
    }

    /// Energy change from flipping bit `i` of `bits`.
    #[inline]
    pub(crate) fn flip_delta(&self, bits: &[u8], i: usize) -> f64 {
        let mut field = self.linear[i];
        for j in 0..self.k {
            if j != i && bits[j] == 1 {
                field += self.quadratic_at(i, j);
            }
        }
        if bits[i] == 0 {
            field
        } else {
            -field
        }
    }

    /// Largest coefficient magnitude; sets the hot-temperature scale.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.linear
            .iter()
            .chain(self.quadratic.iter())
            .fold(0.0_f64, |m, &v| m.max(v.abs()))
    }
}

/// Builds the QUBO for one column subproblem `argmin_q ‖a_col − B·q‖²`.
pub fn build_column_qubo(b: &DenseMatrix, a_col: &[f64]) -> Result<Qubo> {
    let n = b.rows();
    let k = b.cols();
    if a_col.len() != n {
        return Err(Error::dims(
            "build_column_qubo",
            format!("target column length {} but B has {n} rows", a_col.len()),
        ));
    }
    let mut linear = vec![0.0; k];
    for j in 0..k {
        let mut acc = 0.0;
        for l in 0..n {
            let w = b.get(l, j);
            acc += w * (w - 2.0 * a_col[l]);
        }
        linear[j] = acc;
    }
    let mut quadratic = Vec::with_capacity(k * k.saturating_sub(1) / 2);
    for j in 0..k {
        for j2 in (j + 1)..k {
            let mut acc = 0.0;
            for l in 0..n {
                acc += b.get(l, j) * b.get(l, j2);
            }
            quadratic.push(2.0 * acc);
        }
    }
    let offset = a_col.iter().map(|v| v * v).sum();
    Qubo::new(linear, quadratic, offset)
}

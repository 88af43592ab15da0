//! Dense real and binary matrix types plus the iteration-change metrics.
//!
//! Storage is row-major with explicit dimensions. Columns are extracted as
//! O(rows) copies; the QUBO builder consumes columns of the target matrix, so
//! clarity wins over micro-optimization here. All reals are `f64`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real-valued matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major values.
    pub fn from_vec(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(
                "DenseMatrix::from_vec",
                format!("dimensions must be positive, got {rows}x{cols}"),
            ));
        }
        if values.len() != rows * cols {
            return Err(Error::dims(
                "DenseMatrix::from_vec",
                format!("{rows}x{cols} requires {} values, got {}", rows * cols, values.len()),
            ));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::from_vec(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.rows && col < self.cols);
        self.values[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.rows && col < self.cols);
        self.values[row * self.cols + col] = value;
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    /// Copies column `col` out of the matrix.
    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = vec![0.0; self.values.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[c * self.rows + r] = self.get(r, c);
            }
        }
        DenseMatrix {
            rows: self.cols,
            cols: self.rows,
            values: out,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// Square root of the sum of squared entries.
    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Product with a binary right factor: `self` is n×k, `c` is k×m.
    pub fn multiply_binary(&self, c: &BinaryMatrix) -> Result<DenseMatrix> {
        if self.cols != c.rows() {
            return Err(Error::dims(
                "DenseMatrix::multiply_binary",
                format!("{}x{} times {}x{}", self.rows, self.cols, c.rows(), c.cols()),
            ));
        }
        let m = c.cols();
        let mut out = vec![0.0; self.rows * m];
        for i in 0..self.rows {
            let out_row = &mut out[i * m..(i + 1) * m];
            for l in 0..self.cols {
                let w = self.get(i, l);
                if w == 0.0 {
                    continue;
                }
                let c_row = c.row(l);
                for (j, &bit) in c_row.iter().enumerate() {
                    if bit == 1 {
                        out_row[j] += w;
                    }
                }
            }
        }
        DenseMatrix::from_vec(self.rows, m, out)
    }

    /// `self · Cᵀ` where `self` is n×m and `c` is k×m; result is n×k.
    pub fn times_binary_transpose(&self, c: &BinaryMatrix) -> Result<DenseMatrix> {
        if self.cols != c.cols() {
            return Err(Error::dims(
                "DenseMatrix::times_binary_transpose",
                format!("{}x{} with C {}x{}", self.rows, self.cols, c.rows(), c.cols()),
            ));
        }
        let k = c.rows();
        let mut out = vec![0.0; self.rows * k];
        for i in 0..self.rows {
            let a_row = self.row(i);
            for l in 0..k {
                let c_row = c.row(l);
                let mut acc = 0.0;
                for (a, &bit) in a_row.iter().zip(c_row) {
                    if bit == 1 {
                        acc += a;
                    }
                }
                out[i * k + l] = acc;
            }
        }
        DenseMatrix::from_vec(self.rows, k, out)
    }
}

/// Matrix with entries in {0,1}, stored row-major as bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<u8>,
}

impl BinaryMatrix {
    pub fn from_vec(rows: usize, cols: usize, bits: Vec<u8>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(
                "BinaryMatrix::from_vec",
                format!("dimensions must be positive, got {rows}x{cols}"),
            ));
        }
        if bits.len() != rows * cols {
            return Err(Error::dims(
                "BinaryMatrix::from_vec",
                format!("{rows}x{cols} requires {} entries, got {}", rows * cols, bits.len()),
            ));
        }
        if let Some(bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::invalid(
                "BinaryMatrix::from_vec",
                format!("entries must be 0 or 1, found {bad}"),
            ));
        }
        Ok(Self { rows, cols, bits })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::from_vec(rows, cols, vec![0; rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut bits = vec![0u8; n * n];
        for i in 0..n {
            bits[i * n + i] = 1;
        }
        Self::from_vec(n, n, bits)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        debug_assert!(row < self.rows && col < self.cols);
        self.bits[row * self.cols + col]
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[u8] {
        &self.bits[row * self.cols..(row + 1) * self.cols]
    }

    /// Copies column `col` into a standalone vector.
    pub fn column(&self, col: usize) -> BinaryVector {
        BinaryVector((0..self.rows).map(|r| self.get(r, col)).collect())
    }

    pub fn set_column(&mut self, col: usize, v: &BinaryVector) -> Result<()> {
        if v.len() != self.rows {
            return Err(Error::dims(
                "BinaryMatrix::set_column",
                format!("column length {} but matrix has {} rows", v.len(), self.rows),
            ));
        }
        for (r, &bit) in v.bits().iter().enumerate() {
            self.bits[r * self.cols + col] = bit;
        }
        Ok(())
    }

    /// Number of entries on which `self` and `other` differ.
    pub fn hamming_distance(&self, other: &BinaryMatrix) -> Result<usize> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dims(
                "BinaryMatrix::hamming_distance",
                format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols),
            ));
        }
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count())
    }

    /// Gram matrix `C·Cᵀ` as a dense k×k matrix of pair-intersection counts.
    pub fn gram(&self) -> DenseMatrix {
        let k = self.rows;
        let mut out = vec![0.0; k * k];
        for r1 in 0..k {
            let row1 = self.row(r1);
            for r2 in r1..k {
                let row2 = self.row(r2);
                let dot = row1
                    .iter()
                    .zip(row2)
                    .filter(|(a, b)| **a == 1 && **b == 1)
                    .count() as f64;
                out[r1 * k + r2] = dot;
                out[r2 * k + r1] = dot;
            }
        }
        DenseMatrix {
            rows: k,
            cols: k,
            values: out,
        }
    }
}

/// Column vector with entries in {0,1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryVector(Vec<u8>);

impl BinaryVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::invalid(
                "BinaryVector::new",
                format!("entries must be 0 or 1, found {bad}"),
            ));
        }
        Ok(Self(bits))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub(crate) fn from_bits_unchecked(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Self(bits)
    }

    /// Interprets the bits as a big-endian integer (bit 0 most significant).
    pub fn as_big_endian_value(&self) -> u64 {
        debug_assert!(self.0.len() <= 64);
        self.0
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
    }
}

/// `‖A − B·C‖_F / ‖A‖_F` for A n×m, B n×k, C k×m.
pub fn relative_residual(a: &DenseMatrix, b: &DenseMatrix, c: &BinaryMatrix) -> Result<f64> {
    if a.rows() != b.rows() || b.cols() != c.rows() || a.cols() != c.cols() {
        return Err(Error::dims(
            "relative_residual",
            format!(
                "A {}x{}, B {}x{}, C {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols(),
                c.rows(),
                c.cols()
            ),
        ));
    }
    let denom = a.frobenius_norm();
    if denom == 0.0 {
        return Err(Error::ZeroNorm {
            context: "relative_residual",
        });
    }
    let product = b.multiply_binary(c)?;
    let mut sq = 0.0;
    for (x, y) in a.values().iter().zip(product.values()) {
        let d = x - y;
        sq += d * d;
    }
    Ok(sq.sqrt() / denom)
}

/// `‖B_next − B_prev‖_F / ‖B_prev‖_F`.
pub fn percent_change_b(b_prev: &DenseMatrix, b_next: &DenseMatrix) -> Result<f64> {
    if b_prev.rows() != b_next.rows() || b_prev.cols() != b_next.cols() {
        return Err(Error::dims(
            "percent_change_b",
            format!(
                "{}x{} vs {}x{}",
                b_prev.rows(),
                b_prev.cols(),
                b_next.rows(),
                b_next.cols()
            ),
        ));
    }
    let denom = b_prev.frobenius_norm();
    if denom == 0.0 {
        return Err(Error::ZeroNorm {
            context: "percent_change_b",
        });
    }
    let mut sq = 0.0;
    for (x, y) in b_prev.values().iter().zip(b_next.values()) {
        let d = y - x;
        sq += d * d;
    }
    Ok(sq.sqrt() / denom)
}

/// Hamming distance between the two matrices divided by their entry count.
pub fn percent_change_c(c_prev: &BinaryMatrix, c_next: &BinaryMatrix) -> Result<f64> {
    let differing = c_prev.hamming_distance(c_next)?;
    Ok(differing as f64 / (c_prev.rows() * c_prev.cols()) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_identity() {
        let m = DenseMatrix::identity(2).unwrap();
        assert!((m.frobenius_norm() - 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn frobenius_zeros() {
        let m = DenseMatrix::zeros(3, 3).unwrap();
        assert_eq!(m.frobenius_norm(), 0.0);
    }

    #[test]
    fn frobenius_three_four_five() {
        let m = DenseMatrix::from_vec(1, 2, vec![3.0, 4.0]).unwrap();
        assert!((m.frobenius_norm() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn relative_residual_exact_factorization() {
        let b = DenseMatrix::from_vec(2, 2, vec![1.0, 2.0, 0.5, 3.0]).unwrap();
        let c = BinaryMatrix::from_vec(2, 3, vec![1, 0, 1, 0, 1, 1]).unwrap();
        let a = b.multiply_binary(&c).unwrap();
        let r = relative_residual(&a, &b, &c).unwrap();
        assert!(r < 1e-12, "r = {r}");
    }

    #[test]
    fn relative_residual_zero_approximant() {
        let a = DenseMatrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = DenseMatrix::zeros(2, 2).unwrap();
        let c = BinaryMatrix::from_vec(2, 2, vec![1, 1, 1, 1]).unwrap();
        assert!((relative_residual(&a, &b, &c).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relative_residual_hand_example() {
        // A = I2, B = [[1],[0]], C = [[1,1]]: residual [[0,-1],[0,1]], norm sqrt(2).
        let a = DenseMatrix::identity(2).unwrap();
        let b = DenseMatrix::from_vec(2, 1, vec![1.0, 0.0]).unwrap();
        let c = BinaryMatrix::from_vec(1, 2, vec![1, 1]).unwrap();
        assert!((relative_residual(&a, &b, &c).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relative_residual_rejects_zero_a() {
        let a = DenseMatrix::zeros(2, 2).unwrap();
        let b = DenseMatrix::zeros(2, 1).unwrap();
        let c = BinaryMatrix::from_vec(1, 2, vec![0, 0]).unwrap();
        assert!(matches!(
            relative_residual(&a, &b, &c),
            Err(Error::ZeroNorm { .. })
        ));
    }

    #[test]
    fn relative_residual_rejects_mismatched_dims() {
        let a = DenseMatrix::zeros(2, 3).unwrap();
        let b = DenseMatrix::zeros(2, 2).unwrap();
        let c = BinaryMatrix::zeros(3, 3).unwrap();
        assert!(matches!(
            relative_residual(&a, &b, &c),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn percent_change_b_cases() {
        let i = DenseMatrix::identity(2).unwrap();
        assert_eq!(percent_change_b(&i, &i).unwrap(), 0.0);

        let doubled = DenseMatrix::from_vec(2, 2, vec![2.0, 0.0, 0.0, 2.0]).unwrap();
        assert!((percent_change_b(&i, &doubled).unwrap() - 1.0).abs() < 1e-12);

        let zero = DenseMatrix::zeros(2, 2).unwrap();
        assert!((percent_change_b(&i, &zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            percent_change_b(&zero, &i),
            Err(Error::ZeroNorm { .. })
        ));
    }

    #[test]
    fn percent_change_c_cases() {
        let c = BinaryMatrix::from_vec(2, 2, vec![1, 0, 0, 1]).unwrap();
        assert_eq!(percent_change_c(&c, &c).unwrap(), 0.0);

        let complement = BinaryMatrix::from_vec(2, 2, vec![0, 1, 1, 0]).unwrap();
        assert_eq!(percent_change_c(&c, &complement).unwrap(), 1.0);

        // 3 differing entries out of 12.
        let x = BinaryMatrix::zeros(3, 4).unwrap();
        let mut bits = vec![0u8; 12];
        bits[1] = 1;
        bits[5] = 1;
        bits[10] = 1;
        let y = BinaryMatrix::from_vec(3, 4, bits).unwrap();
        assert!((percent_change_c(&x, &y).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn binary_matrix_rejects_non_bits() {
        assert!(BinaryMatrix::from_vec(1, 2, vec![0, 2]).is_err());
    }

    #[test]
    fn column_roundtrip() {
        let mut c = BinaryMatrix::zeros(3, 2).unwrap();
        let v = BinaryVector::new(vec![1, 0, 1]).unwrap();
        c.set_column(1, &v).unwrap();
        assert_eq!(c.column(1), v);
        assert_eq!(c.column(0), BinaryVector::zeros(3));
    }

    #[test]
    fn big_endian_value_orders_by_leading_bit() {
        let a = BinaryVector::new(vec![1, 0, 0]).unwrap();
        let b = BinaryVector::new(vec![0, 1, 1]).unwrap();
        assert!(a.as_big_endian_value() > b.as_big_endian_value());
        assert_eq!(a.as_big_endian_value(), 4);
        assert_eq!(b.as_big_endian_value(), 3);
    }
}

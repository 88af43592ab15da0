//! Shared fixtures for the criterion benches.

use nbmf_core::matrix::{BinaryVector, DenseMatrix};
use nbmf_core::qubo::{build_column_qubo, Qubo};
use nbmf_core::synthetic::{generate_synthetic, PlantedInstance};

/// A planted instance sized like the desk-scale experiments.
pub fn bench_instance(rank: usize) -> PlantedInstance {
    generate_synthetic(60, 60, rank, 0.01, 0.5, 0xbe9c).unwrap()
}

/// One column QUBO of the instance, with its planted column as incumbent.
pub fn bench_column(rank: usize) -> (Qubo, BinaryVector, DenseMatrix) {
    let inst = bench_instance(rank);
    let q = build_column_qubo(&inst.planted_b, &inst.matrix.column(0)).unwrap();
    (q, inst.planted_c.column(0), inst.planted_b)
}

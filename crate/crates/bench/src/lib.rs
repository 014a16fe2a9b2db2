//! Seeded fixtures shared by the benchmarks.

use boundwidth::circuit::LayeredCircuit;
use boundwidth::generate::{deep_circuit, layered_circuit, random_circuit};
use boundwidth::Circuit;
use rand::rngs::StdRng;
use rand::SeedableRng;

pub fn layered(seed: u64, n: usize, m: usize, s: usize, w: usize) -> LayeredCircuit {
    layered_circuit(&mut StdRng::seed_from_u64(seed), n, m, s, w)
}

pub fn deep(seed: u64, n: usize, s: usize, depth: usize) -> Circuit {
    deep_circuit(&mut StdRng::seed_from_u64(seed), n, s, depth)
}

pub fn random(seed: u64, n: usize, m: usize, s: usize) -> Circuit {
    random_circuit(&mut StdRng::seed_from_u64(seed), n, m, s, 8)
}

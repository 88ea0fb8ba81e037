//! Fixtures shared by the benchmarks.

use fwlab::models::{build_lattice_1d, build_synthetic_commuting, Model, Potential};

pub const SIZES: [usize; 3] = [16, 32, 64];

/// Gaussian lattice with dx = 1 so the stepwise iteration converges.
pub fn gaussian_lattice(n: usize) -> Model {
    build_lattice_1d(n, n as f64 / 2.0, 1.0, &Potential::Gaussian { strength: 0.1, width: 2.0 })
        .expect("valid lattice")
}

pub fn commuting(n: usize) -> Model {
    build_synthetic_commuting(n, 1.0, &[0.1, 0.05], 7).expect("valid synthetic model")
}

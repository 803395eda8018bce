use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::table::SMatrixTable;

/// Perturb every S^J by an independent point drawn uniformly from the disk
/// of radius `fac`. Deterministic for a given seed.
pub fn add_noise(table: &SMatrixTable, fac: f64, seed: u64) -> SMatrixTable {
    let mut out = table.clone();
    if fac <= 0.0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in out.s_values.iter_mut() {
        let r = fac * rng.gen::<f64>().sqrt();
        let phi = std::f64::consts::TAU * rng.gen::<f64>();
        *s += Complex64::from_polar(r, phi);
    }
    out
}

//! Unit conventions: energies in meV, masses in Daltons, lengths in Å.

/// ħ² / (1 Da · 1 Å²) expressed in meV (CODATA 2018 values of ħ, Da and e).
pub const HBAR2_OVER_DA_A2_MEV: f64 = 4.180_159_280_496_722;

/// Wave vector k = sqrt(2 μ E / C) in Å⁻¹ for a kinetic energy in meV.
pub fn wavevector(mu: f64, energy_mev: f64) -> f64 {
    (2.0 * mu * energy_mev / HBAR2_OVER_DA_A2_MEV).sqrt()
}

/// 2μ/C in meV⁻¹ Å⁻², the factor turning energies into squared wave numbers.
pub fn two_mu_over_c(mu: f64) -> f64 {
    2.0 * mu / HBAR2_OVER_DA_A2_MEV
}

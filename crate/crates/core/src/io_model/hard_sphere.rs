use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::table::{ReconstructionParams, SMatrixTable};
use crate::error::{Error, Result};
use crate::special::RiccatiBessel;
use crate::units::{two_mu_over_c, wavevector};

/// Hard core of radius R−d, square well of depth V on (R−d, R), a
/// delta-function barrier Ω δ(r−R), free motion outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardSphereParams {
    /// Outer radius R (Å).
    pub r: f64,
    /// Well width d (Å).
    pub d: f64,
    /// Well depth V (meV).
    pub v: f64,
    /// Barrier strength Ω (meV·Å).
    pub omega: f64,
    /// Mass (Da).
    pub mu: f64,
    /// Width ΔJ of the Gaussian reactive cutoff.
    pub delta_j: f64,
}

impl HardSphereParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.r > self.d && self.d > 0.0) {
            return Err(Error::Validation(format!(
                "need R > d > 0, got R = {}, d = {}",
                self.r, self.d
            )));
        }
        if !(self.delta_j > 0.0) {
            return Err(Error::Validation("delta_j must be positive".into()));
        }
        if !(self.mu > 0.0) {
            return Err(Error::Validation("mu must be positive".into()));
        }
        if !(self.v.is_finite() && self.omega.is_finite()) {
            return Err(Error::Validation("V and omega must be finite".into()));
        }
        Ok(())
    }
}

fn outgoing(rb: &RiccatiBessel, l: usize) -> (Complex64, Complex64) {
    (
        Complex64::new(-rb.y[l], rb.j[l]),
        Complex64::new(-rb.dy[l], rb.dj[l]),
    )
}

/// Potential-scattering S-matrix S_pot for J = 0..=jmax at one energy,
/// obtained by matching the interior solution to free waves at r = R.
pub fn potential_s_matrices(
    params: &HardSphereParams,
    energy: f64,
    jmax: usize,
) -> Result<Vec<Complex64>> {
    params.validate()?;
    if !(energy > 0.0) {
        return Err(Error::Validation(format!("energy {energy} must be positive")));
    }
    let k = wavevector(params.mu, energy);
    let kk2 = two_mu_over_c(params.mu) * (energy + params.v);
    if !(kk2 > 0.0) {
        return Err(Error::Validation(format!(
            "E + V = {} must be positive inside the well",
            energy + params.v
        )));
    }
    let kk = kk2.sqrt();
    let g = two_mu_over_c(params.mu) * params.omega;
    let a = params.r - params.d;

    let inner_a = RiccatiBessel::new(jmax, kk * a);
    let inner_r = RiccatiBessel::new(jmax, kk * params.r);
    let outer = RiccatiBessel::new(jmax, k * params.r);

    let mut out = Vec::with_capacity(jmax + 1);
    for l in 0..=jmax {
        // u vanishes at the core radius; scale by the larger coefficient
        // to keep the magnitudes moderate.
        let (ja, ya) = (inner_a.j[l], inner_a.y[l]);
        let norm = ja.abs().max(ya.abs());
        let (ja, ya) = (ja / norm, ya / norm);
        let u = ja * inner_r.y[l] - ya * inner_r.j[l];
        let du = kk * (ja * inner_r.dy[l] - ya * inner_r.dj[l]);
        let lhs = du + g * u;
        let (hp, dhp) = outgoing(&outer, l);
        let (hm, dhm) = (hp.conj(), dhp.conj());
        let num = hm * lhs - dhm * (k * u);
        let den = hp * lhs - dhp * (k * u);
        let scale = (lhs.abs() + k * u.abs()) * hp.norm();
        if !(den.norm() > 1e-14 * scale) || !den.norm().is_finite() {
            return Err(Error::Singularity {
                at: l as f64,
                message: format!("matching determinant vanishes at E = {energy} meV"),
            });
        }
        out.push(num / den);
    }
    Ok(out)
}

/// S-matrix of an impenetrable sphere of radius `radius`, ĥ⁻(kR)/ĥ⁺(kR).
pub fn hard_core_s_matrix(k: f64, radius: f64, jmax: usize) -> Vec<Complex64> {
    let rb = RiccatiBessel::new(jmax, k * radius);
    (0..=jmax)
        .map(|l| {
            let (hp, _) = outgoing(&rb, l);
            hp.conj() / hp
        })
        .collect()
}

/// Tables S^J = (−1)^J exp(−J²/ΔJ²) S^J_pot for J = 0..=jmax at each energy,
/// with default reconstruction header values.
pub fn generate_hard_sphere_tables(
    params: &HardSphereParams,
    energies: &[f64],
    jmax: usize,
) -> Result<Vec<SMatrixTable>> {
    generate_hard_sphere_tables_with(params, energies, jmax, &ReconstructionParams::default())
}

pub fn generate_hard_sphere_tables_with(
    params: &HardSphereParams,
    energies: &[f64],
    jmax: usize,
    recon: &ReconstructionParams,
) -> Result<Vec<SMatrixTable>> {
    params.validate()?;
    let beyond = ((jmax + 1) as f64 / params.delta_j).powi(2);
    if beyond < 12.0 * std::f64::consts::LN_10 {
        return Err(Error::Validation(format!(
            "jmax = {jmax} is too small: the cutoff factor at J = {} is {:.3e} > 1e-12",
            jmax + 1,
            (-beyond).exp()
        )));
    }
    let nread = jmax + 1;
    energies
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let pot = potential_s_matrices(params, e, jmax)?;
            let s_values = pot
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    let jf = j as f64;
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    s * (sign * (-(jf * jf) / (params.delta_j * params.delta_j)).exp())
                })
                .collect();
            let jfin = recon.jfin.unwrap_or(nread).min(nread);
            let table = SMatrixTable {
                energy: e,
                s_values,
                nread,
                niter: recon.niter,
                sht: recon.sht,
                jstart: recon.jstart,
                jfin,
                dxl: recon.dxl,
                file_index: i + 1,
            };
            table.validate()?;
            Ok(table)
        })
        .collect()
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PadeModel;
use crate::io_model::CamWindow;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleEntry {
    /// Position in the complex J plane.
    pub position: Complex64,
    /// Residue of the continued S(λ) at this pole.
    pub residue: Complex64,
}

/// Poles and zeros of one model inside a window of the complex J plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleZeroSet {
    pub poles: Vec<PoleEntry>,
    pub zeros: Vec<Complex64>,
    pub window: CamWindow,
}

/// Members of the model inside the closed window, poles with residues.
pub fn poles_zeros_in_window(model: &PadeModel, window: &CamWindow) -> PoleZeroSet {
    let poles = model
        .poles
        .iter()
        .enumerate()
        .filter(|(_, p)| window.contains(**p))
        .map(|(i, &p)| PoleEntry {
            position: p,
            residue: model.physical_residue_unchecked(i),
        })
        .collect();
    let zeros = model
        .zeros
        .iter()
        .copied()
        .filter(|z| window.contains(*z))
        .collect();
    PoleZeroSet {
        poles,
        zeros,
        window: *window,
    }
}

/// Remove Froissart doublets: repeatedly drop the globally closest
/// pole–zero pair while its separation is below `eps`.
pub fn filter_froissart(set: &PoleZeroSet, eps: f64) -> PoleZeroSet {
    let mut out = set.clone();
    if !(eps > 0.0) {
        return out;
    }
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, p) in out.poles.iter().enumerate() {
            for (j, z) in out.zeros.iter().enumerate() {
                let d = (p.position - z).norm();
                if best.is_none_or(|b| d < b.2) {
                    best = Some((i, j, d));
                }
            }
        }
        match best {
            Some((i, j, d)) if d < eps => {
                out.poles.remove(i);
                out.zeros.remove(j);
            }
            _ => return out,
        }
    }
}

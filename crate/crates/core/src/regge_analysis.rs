//! Regge-pole tails, closed-form resonance contributions and trajectory
//! following across energies.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A pole of S(λ) with its residue, λₙ = Jₙ + ½.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReggePole {
    pub lambda_n: Complex64,
    pub residue: Complex64,
    /// Energy in meV.
    pub energy: f64,
}

impl ReggePole {
    pub fn new(lambda_n: Complex64, residue: Complex64, energy: f64) -> Self {
        ReggePole {
            lambda_n,
            residue,
            energy,
        }
    }

    /// Pole position in J.
    pub fn j(&self) -> Complex64 {
        self.lambda_n - 0.5
    }

    /// Pole in the physical (first) quadrant of the λ plane.
    pub fn is_physical(&self) -> bool {
        self.lambda_n.re > 0.0 && self.lambda_n.im > 0.0
    }
}

fn check_tail_angle(phi: f64) -> Result<()> {
    if phi < PI {
        return Err(Error::Domain(format!(
            "pole tails are defined for phi >= pi, got {phi}"
        )));
    }
    Ok(())
}

/// 2πi √λₙ Res e^{iλₙφ}, principal square root.
pub fn tail_f(pole: &ReggePole, phi: f64) -> Result<Complex64> {
    check_tail_angle(phi)?;
    Ok(tail_f_unchecked(pole, phi))
}

/// 2πi λₙ Res e^{iλₙφ}.
pub fn tail_g(pole: &ReggePole, phi: f64) -> Result<Complex64> {
    check_tail_angle(phi)?;
    Ok(tail_g_unchecked(pole, phi))
}

fn tail_f_unchecked(pole: &ReggePole, phi: f64) -> Complex64 {
    2.0 * PI * I * pole.lambda_n.sqrt() * pole.residue * (I * pole.lambda_n * phi).exp()
}

fn tail_g_unchecked(pole: &ReggePole, phi: f64) -> Complex64 {
    2.0 * PI * I * pole.lambda_n * pole.residue * (I * pole.lambda_n * phi).exp()
}

fn check_denominator(pole: &ReggePole, den: Complex64) -> Result<()> {
    if den.norm() < 1e-10 || !den.norm().is_finite() {
        return Err(Error::ResonanceDenominator {
            lambda: pole.lambda_n,
        });
    }
    Ok(())
}

fn check_convergent(pole: &ReggePole) -> Result<()> {
    if !(pole.lambda_n.im > 0.0) {
        return Err(Error::Domain(format!(
            "geometric series needs Im lambda > 0, got {}",
            pole.lambda_n
        )));
    }
    Ok(())
}

/// Sum over all forward returns: −(2πi/k) λₙ Res e^{iπλₙ}/(1 + e^{2πiλₙ}).
pub fn fw_tail_closed(pole: &ReggePole, k: f64) -> Result<Complex64> {
    check_convergent(pole)?;
    let l = pole.lambda_n;
    let den = 1.0 + (2.0 * PI * I * l).exp();
    check_denominator(pole, den)?;
    Ok(-(2.0 * PI * I / k) * l * pole.residue * (I * PI * l).exp() / den)
}

/// Forward terms −k⁻¹(−1)^M g̃_tail((2M+1)π) for M in the range.
pub fn fw_tail_terms(pole: &ReggePole, k: f64, m_range: (i32, i32)) -> Vec<Complex64> {
    (m_range.0.max(0)..=m_range.1)
        .map(|m| -tail_g_unchecked(pole, (2.0 * m as f64 + 1.0) * PI) * (parity(m) / k))
        .collect()
}

/// Sum over backward returns after at least one rotation:
/// −(2π/k) λₙ Res/(1 + e^{−2πiλₙ}).
pub fn bw_tail_closed(pole: &ReggePole, k: f64) -> Result<Complex64> {
    check_convergent(pole)?;
    let l = pole.lambda_n;
    let den = 1.0 + (-2.0 * PI * I * l).exp();
    if !den.norm().is_finite() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    check_denominator(pole, den)?;
    Ok(-(2.0 * PI / k) * l * pole.residue / den)
}

/// Backward terms (ik)⁻¹(−1)^M g̃_tail(2Mπ), M ≥ 1.
pub fn bw_tail_terms(pole: &ReggePole, k: f64, m_range: (i32, i32)) -> Vec<Complex64> {
    (m_range.0.max(1)..=m_range.1)
        .map(|m| tail_g_unchecked(pole, 2.0 * m as f64 * PI) * parity(m) / (I * k))
        .collect()
}

fn parity(m: i32) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_sideway(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < PI) || theta.sin() <= 1e-12 {
        return Err(Error::Endpoint { theta });
    }
    Ok(())
}

/// Sum of the pole tails over every nearside and farside zone beyond the
/// first nearside one:
/// sqrt(2π/(k² sinθ)) √λₙ Res e^{−iπ/4}
///   [−e^{iλₙ(π−θ)}/(1+e^{−2πiλₙ}) − i e^{iλₙ(π+θ)}/(1+e^{2πiλₙ})].
pub fn sw_tail_closed(pole: &ReggePole, k: f64, theta: f64) -> Result<Complex64> {
    check_sideway(theta)?;
    check_convergent(pole)?;
    let l = pole.lambda_n;
    let d_near = 1.0 + (-2.0 * PI * I * l).exp();
    let d_far = 1.0 + (2.0 * PI * I * l).exp();
    check_denominator(pole, d_far)?;
    let near = if d_near.norm().is_finite() {
        check_denominator(pole, d_near)?;
        -(I * l * (PI - theta)).exp() / d_near
    } else {
        Complex64::new(0.0, 0.0)
    };
    let far = -I * (I * l * (PI + theta)).exp() / d_far;
    let pre = (2.0 * PI / (k * k * theta.sin())).sqrt();
    Ok(pre * l.sqrt() * pole.residue * Complex64::from_polar(1.0, -0.25 * PI) * (near + far))
}

/// Winding angle of the K-th zone beyond the first nearside one:
/// φ_K = (−1)^{K+1}θ + π(K + [(−1)^K + 1]/2).
pub fn zone_angle(k_index: i32, theta: f64) -> f64 {
    let s = parity(k_index);
    -s * theta + PI * (k_index as f64 + 0.5 * (s + 1.0))
}

/// Per-zone terms (2π/k)[2π sinθ]^{−½} √λₙ Res exp[i(λₙφ_K − Kπ/2 − π/4)]
/// for K ≥ 1; odd K are farside, even K nearside zones.
pub fn sw_tail_terms(
    pole: &ReggePole,
    k: f64,
    theta: f64,
    k_range: (i32, i32),
) -> Result<Vec<Complex64>> {
    check_sideway(theta)?;
    let pre = (2.0 * PI / k) / (2.0 * PI * theta.sin()).sqrt();
    let l = pole.lambda_n;
    Ok((k_range.0.max(1)..=k_range.1)
        .map(|kk| {
            let phi = zone_angle(kk, theta);
            let phase = I * (l * phi - (kk as f64) * 0.5 * PI - 0.25 * PI);
            pre * l.sqrt() * pole.residue * phase.exp()
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FollowMode {
    Automatic,
    Manual,
}

/// Energy-ordered chain of poles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub label: String,
    pub mode: FollowMode,
    pub points: Vec<ReggePole>,
    /// Energies at which no pole was accepted.
    pub gaps: Vec<f64>,
}

impl Trajectory {
    pub fn at_energy(&self, energy: f64) -> Option<&ReggePole> {
        self.points
            .iter()
            .find(|p| (p.energy - energy).abs() <= 1e-9 * energy.abs().max(1.0))
    }
}

/// Filtered, windowed poles at one energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleCandidates {
    pub energy: f64,
    pub poles: Vec<ReggePole>,
}

/// A pick among the candidates at one energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Selection {
    /// Index into the candidate list.
    Index(usize),
    /// Nearest candidate to this J within 0.5 in both Re and Im.
    Near(Complex64),
    /// No pole at this energy.
    Skip,
}

/// Resolve a selection against candidate poles.
pub fn resolve_selection(cands: &PoleCandidates, sel: Selection) -> Result<Option<ReggePole>> {
    let listing = || cands.poles.iter().map(|p| p.j()).collect::<Vec<_>>();
    match sel {
        Selection::Skip => Ok(None),
        Selection::Index(i) => cands.poles.get(i).copied().map(Some).ok_or_else(|| Error::Selection {
            message: format!(
                "pole index {i} out of range at E = {} meV ({} candidates)",
                cands.energy,
                cands.poles.len()
            ),
            candidates: listing(),
        }),
        Selection::Near(j) => {
            let best = cands
                .poles
                .iter()
                .filter(|p| (p.j().re - j.re).abs() <= 0.5 && (p.j().im - j.im).abs() <= 0.5)
                .min_by(|a, b| {
                    (a.j() - j)
                        .norm()
                        .total_cmp(&(b.j() - j).norm())
                });
            best.copied().map(Some).ok_or_else(|| Error::Selection {
                message: format!(
                    "no windowed pole within 0.5 of J = {} at E = {} meV",
                    j, cands.energy
                ),
                candidates: listing(),
            })
        }
    }
}

/// Successor of `prev` among `poles`: nearest real part, then nearest
/// imaginary part, then the lexicographically smallest (Re, Im).
pub fn nearest_successor(prev: &ReggePole, poles: &[ReggePole]) -> Option<ReggePole> {
    poles.iter().copied().min_by(|a, b| {
        let key = |p: &ReggePole| {
            (
                (p.lambda_n.re - prev.lambda_n.re).abs(),
                (p.lambda_n.im - prev.lambda_n.im).abs(),
                p.lambda_n.re,
                p.lambda_n.im,
            )
        };
        let (ka, kb) = (key(a), key(b));
        ka.0.total_cmp(&kb.0)
            .then(ka.1.total_cmp(&kb.1))
            .then(ka.2.total_cmp(&kb.2))
            .then(ka.3.total_cmp(&kb.3))
    })
}

/// Follow a trajectory across energy-ordered candidate lists. The selector
/// is called for the first energy and, in manual mode, for every energy;
/// it receives the candidates and the last accepted pole.
pub fn follow_trajectory<F>(
    candidates: &[PoleCandidates],
    label: &str,
    mode: FollowMode,
    mut selector: F,
) -> Result<Trajectory>
where
    F: FnMut(&PoleCandidates, Option<&ReggePole>) -> Result<Selection>,
{
    if candidates.windows(2).any(|w| !(w[1].energy > w[0].energy)) {
        return Err(Error::Validation("candidate energies must be strictly increasing".into()));
    }
    let first = candidates
        .first()
        .ok_or_else(|| Error::Validation("no energies to follow".into()))?;
    if first.poles.is_empty() {
        return Err(Error::NoCandidates {
            energy: first.energy,
        });
    }
    let mut traj = Trajectory {
        label: label.to_string(),
        mode,
        points: Vec::new(),
        gaps: Vec::new(),
    };
    let mut last: Option<ReggePole> = None;
    for (i, cands) in candidates.iter().enumerate() {
        let picked = if i == 0 || mode == FollowMode::Manual {
            if cands.poles.is_empty() {
                None
            } else {
                let sel = selector(cands, last.as_ref())?;
                resolve_selection(cands, sel)?
            }
        } else {
            last.as_ref()
                .and_then(|prev| nearest_successor(prev, &cands.poles))
        };
        match picked {
            Some(p) => {
                if i == 0 && !p.is_physical() {
                    return Err(Error::Selection {
                        message: format!("seed pole {} is outside the first quadrant", p.j()),
                        candidates: cands.poles.iter().map(|p| p.j()).collect(),
                    });
                }
                traj.points.push(p);
                last = Some(p);
            }
            None => traj.gaps.push(cands.energy),
        }
    }
    Ok(traj)
}

/// Which closed form a subtraction uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "theta")]
pub enum ThetaMode {
    Forward,
    Backward,
    /// Angle in radians.
    Sideway(f64),
}

/// Closed-form contribution of one pole in a given mode.
pub fn closed_form(pole: &ReggePole, k: f64, mode: ThetaMode) -> Result<Complex64> {
    match mode {
        ThetaMode::Forward => fw_tail_closed(pole, k),
        ThetaMode::Backward => bw_tail_closed(pole, k),
        ThetaMode::Sideway(theta) => sw_tail_closed(pole, k, theta),
    }
}

/// Sum the contributions of the trajectories' poles at `energy` and remove
/// them from `f_exact`. Trajectories without a point there are skipped.
pub fn subtract_resonance(
    f_exact: Complex64,
    energy: f64,
    k: f64,
    trajectories: &[Trajectory],
    mode: ThetaMode,
) -> Result<(Complex64, Complex64)> {
    let mut tail_sum = Complex64::new(0.0, 0.0);
    for t in trajectories {
        match t.at_energy(energy) {
            Some(p) => tail_sum += closed_form(p, k, mode)?,
            None => log::debug!("trajectory '{}' has no pole at E = {energy} meV", t.label),
        }
    }
    Ok((tail_sum, f_exact - tail_sum))
}

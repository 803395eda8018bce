use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    analyse_all, canonical_order, contribution_row, load_aux, save_aux, EnergyAnalysis,
    RunManifest,
};
use crate::error::{Error, Result};
use crate::pade_recon::PoleZeroSet;
use crate::regge_analysis::{
    follow_trajectory, FollowMode, PoleCandidates, Selection, ThetaMode, Trajectory,
};
use crate::scattering::{deflection_function, pws_amplitude, AngularGrid, UnfoldedKind};

/// Request to follow and store a new trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRequest {
    pub label: String,
    #[serde(default = "default_mode")]
    pub mode: FollowMode,
    pub seed: Selection,
    /// By-hand picks keyed by energy, used in manual mode.
    #[serde(default)]
    pub picks: Vec<(f64, Selection)>,
    /// Revision the client last saw; a mismatch is a conflict.
    pub revision: u64,
}

fn default_mode() -> FollowMode {
    FollowMode::Automatic
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContributionRow {
    pub energy: f64,
    pub mode: ThetaMode,
    /// |Σ tails|^np
    pub tail: f64,
    /// |f − Σ tails|^np
    pub background: f64,
    /// |f|^np
    pub exact: f64,
}

/// Filter for [`Session::contributions_with`]. Unset fields fall back to
/// all stored trajectories, every mode of the run and the configured power.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContributionQuery {
    pub labels: Option<Vec<String>>,
    pub mode: Option<ThetaMode>,
    pub power_np: Option<u8>,
}

/// In-memory analysis of a run, shared by the HTTP interface.
#[derive(Debug)]
pub struct Session {
    pub manifest: RunManifest,
    pub analyses: Vec<EnergyAnalysis>,
    trajectories: Vec<Trajectory>,
    revision: u64,
}

impl Session {
    /// Analyse every energy of the manifest and pick up trajectories stored
    /// by earlier runs.
    pub fn open(manifest: RunManifest) -> Result<Self> {
        let (analyses, _) = analyse_all(&manifest)?;
        let trajectories = load_aux(&manifest.config.output_dir)?;
        Ok(Session {
            manifest,
            analyses,
            trajectories,
            revision: 0,
        })
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn energies(&self) -> Vec<f64> {
        self.analyses.iter().map(|a| a.energy()).collect()
    }

    pub fn analysis(&self, index: usize) -> Result<&EnergyAnalysis> {
        self.analyses.get(index).ok_or_else(|| {
            Error::Validation(format!(
                "energy index {index} out of range ({} energies)",
                self.analyses.len()
            ))
        })
    }

    pub fn pole_set(&self, index: usize) -> Result<&PoleZeroSet> {
        Ok(&self.analysis(index)?.set)
    }

    /// (φ, f̃(φ)) or (φ, g̃(φ)) on the configured winding grid.
    pub fn unfolded(&self, index: usize, kind: UnfoldedKind) -> Result<Vec<(f64, Complex64)>> {
        let a = self.analysis(index)?;
        let unf = a.unfolder()?;
        Ok(super::phi_grid(&self.manifest.config)
            .into_iter()
            .map(|phi| (phi, unf.evaluate(kind, phi)))
            .collect())
    }

    /// (J, Θ(J + ½)) over the retained partial waves.
    pub fn deflection(&self, index: usize) -> Result<Vec<(f64, f64)>> {
        let a = self.analysis(index)?;
        let js = super::j_grid(a, self.manifest.config.npoints);
        let lambdas: Vec<f64> = js.iter().map(|j| j + 0.5).collect();
        Ok(js.into_iter().zip(deflection_function(&a.model, &lambdas)?).collect())
    }

    /// (θ in degrees, dσ/dΩ) on the configured angular grid.
    pub fn dcs(&self, index: usize) -> Result<Vec<(f64, f64)>> {
        let a = self.analysis(index)?;
        Ok(AngularGrid::uniform(self.manifest.config.npoints)
            .theta_values
            .iter()
            .map(|&t| (t.to_degrees(), pws_amplitude(&a.table, t, a.k).norm_sqr()))
            .collect())
    }

    pub fn trajectories(&self) -> Vec<Trajectory> {
        canonical_order(&self.trajectories)
    }

    fn persist(&self) -> Result<()> {
        let dir = &self.manifest.config.output_dir;
        if dir.is_dir() {
            save_aux(dir, &self.trajectories)?;
        }
        Ok(())
    }

    fn check_revision(&self, revision: u64) -> Result<()> {
        if revision != self.revision {
            return Err(Error::Conflict(format!(
                "stale revision {revision}; current is {}",
                self.revision
            )));
        }
        Ok(())
    }

    /// Follow a trajectory and store it, replacing one with the same label.
    pub fn add_trajectory(&mut self, req: &TrajectoryRequest) -> Result<Trajectory> {
        self.check_revision(req.revision)?;
        let candidates: Vec<PoleCandidates> = self.analyses.iter().map(|a| a.candidates()).collect();
        let picks = &req.picks;
        let traj = follow_trajectory(&candidates, &req.label, req.mode, |cands, last| {
            if last.is_none() && cands.energy == candidates[0].energy {
                return Ok(req.seed);
            }
            let tol = 1e-6 * cands.energy.abs().max(1.0);
            picks
                .iter()
                .find(|(e, _)| (e - cands.energy).abs() <= tol)
                .map(|(_, s)| *s)
                .ok_or_else(|| Error::Selection {
                    message: format!("no pick given for E = {} meV", cands.energy),
                    candidates: cands.poles.iter().map(|p| p.j()).collect(),
                })
        })?;
        self.trajectories.retain(|t| t.label != req.label);
        self.trajectories.push(traj.clone());
        self.revision += 1;
        self.persist()?;
        Ok(traj)
    }

    pub fn remove_trajectory(&mut self, label: &str, revision: Option<u64>) -> Result<Trajectory> {
        if let Some(r) = revision {
            self.check_revision(r)?;
        }
        let pos = self
            .trajectories
            .iter()
            .position(|t| t.label == label)
            .ok_or_else(|| Error::Validation(format!("no trajectory labelled '{label}'")))?;
        let t = self.trajectories.remove(pos);
        self.revision += 1;
        self.persist()?;
        Ok(t)
    }

    /// Forward, backward and (for 0 < θ_R < π) sideways subtraction rows
    /// for every energy, using all stored trajectories.
    pub fn contributions(&self) -> Result<Vec<ContributionRow>> {
        self.contributions_with(&ContributionQuery::default())
    }

    pub fn contributions_with(&self, query: &ContributionQuery) -> Result<Vec<ContributionRow>> {
        let config = &self.manifest.config;
        let modes = match query.mode {
            Some(ThetaMode::Sideway(t)) if !(t > 0.0 && t < PI) => {
                return Err(Error::Endpoint { theta: t });
            }
            Some(m) => vec![m],
            None => {
                let theta = config.theta_r.to_radians();
                let mut modes = vec![ThetaMode::Forward, ThetaMode::Backward];
                if theta > 0.0 && theta < PI {
                    modes.push(ThetaMode::Sideway(theta));
                }
                modes
            }
        };
        let np = query.power_np.unwrap_or(config.power_np);
        let chosen: Vec<Trajectory> = match &query.labels {
            None => self.trajectories.clone(),
            Some(labels) => labels
                .iter()
                .map(|l| {
                    self.trajectories
                        .iter()
                        .find(|t| &t.label == l)
                        .cloned()
                        .ok_or_else(|| Error::Validation(format!("no trajectory labelled '{l}'")))
                })
                .collect::<Result<_>>()?,
        };
        let mut rows = Vec::new();
        for a in &self.analyses {
            for &mode in &modes {
                let [tail, background, exact] = contribution_row(a, &chosen, mode, np)?;
                rows.push(ContributionRow {
                    energy: a.energy(),
                    mode,
                    tail,
                    background,
                    exact,
                });
            }
        }
        Ok(rows)
    }
}

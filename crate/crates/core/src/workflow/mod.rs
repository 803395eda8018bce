//! The two-step analysis workflow shared by the command line and the HTTP
//! interface.
//!
//! Step I reconstructs every in-window energy, catalogs poles and zeros and
//! writes the decomposition files. Step II follows one Regge trajectory
//! from user picks, writes its contributions and accumulates it with the
//! trajectories of earlier Step II runs kept in `aux.trajectories.json`.

mod selections;
mod session;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io_model::{
    add_noise, parse_energy_file, write_column_file, OutputKey, RunConfig, SMatrixTable,
};
use crate::pade_recon::{
    build_approximant, filter_froissart, phase_on_grid, poles_zeros_in_window, PadeModel,
    PoleZeroSet,
};
use crate::regge_analysis::{
    bw_tail_closed, bw_tail_terms, follow_trajectory, fw_tail_closed, fw_tail_terms,
    subtract_resonance, sw_tail_closed, sw_tail_terms, tail_f, tail_g, FollowMode,
    PoleCandidates, ReggePole, Selection, ThetaMode, Trajectory,
};
use crate::scattering::{
    deflection_function, ns_fs_simple, pws_amplitude, AmplitudeBreakdown, AngularGrid, Unfolder,
};
use crate::units::wavevector;

pub use selections::SelectionScript;
pub use session::{ContributionQuery, ContributionRow, Session, TrajectoryRequest};

/// Accumulated Step II trajectories.
pub const AUX_TRAJECTORIES: &str = "aux.trajectories.json";
/// Diagnostic dump of every model built in Step I.
pub const SCREEN_PADE: &str = "screen.pade";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedFile {
    pub index: usize,
    pub path: PathBuf,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: RunConfig,
    /// Input files inside the energy window, ascending in energy.
    pub resolved_files: Vec<ResolvedFile>,
    pub step: u8,
    pub selections: Option<SelectionScript>,
}

impl RunManifest {
    /// Locate input files `data_dir/<index>` over the file range and keep
    /// those whose energy lies in the window.
    pub fn resolve(config: RunConfig, step: u8) -> Result<Self> {
        config.validate()?;
        let mut files = Vec::new();
        for index in config.file_range.0..=config.file_range.1 {
            let path = config.data_dir.join(index.to_string());
            let table = parse_energy_file(&path)?;
            let (lo, hi) = config.energy_window;
            if table.energy >= lo && table.energy <= hi {
                files.push(ResolvedFile {
                    index,
                    path,
                    energy: table.energy,
                });
            }
        }
        files.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        if files.windows(2).any(|w| w[0].energy == w[1].energy) {
            return Err(Error::Validation("two input files carry the same energy".into()));
        }
        Ok(RunManifest {
            config,
            resolved_files: files,
            step,
            selections: None,
        })
    }
}

/// Everything Step I derives for one energy.
#[derive(Debug, Clone)]
pub struct EnergyAnalysis {
    pub file: ResolvedFile,
    pub table: SMatrixTable,
    pub k: f64,
    pub model: PadeModel,
    /// Windowed and Froissart-filtered poles and zeros.
    pub set: PoleZeroSet,
    pub noise_models: Vec<PadeModel>,
}

impl EnergyAnalysis {
    pub fn energy(&self) -> f64 {
        self.table.energy
    }

    /// Physical-quadrant poles as trajectory candidates.
    pub fn candidates(&self) -> PoleCandidates {
        PoleCandidates {
            energy: self.energy(),
            poles: self
                .set
                .poles
                .iter()
                .map(|p| ReggePole::new(p.position + 0.5, p.residue, self.energy()))
                .filter(|p| p.is_physical())
                .collect(),
        }
    }

    pub fn unfolder(&self) -> Result<Unfolder<'_>> {
        Unfolder::new(&self.model)
    }
}

fn apply_overrides(config: &RunConfig, table: SMatrixTable) -> Result<SMatrixTable> {
    let mut t = match config.overrides.nread {
        Some(n) => table.truncated(n)?,
        None => table,
    };
    if let Some(n) = config.overrides.niter {
        t.niter = n;
    }
    if let Some(d) = config.overrides.dxl {
        t.dxl = d;
    }
    t.validate()?;
    Ok(t)
}

/// Reconstruct and catalog one energy.
pub fn analyse_energy(config: &RunConfig, file: &ResolvedFile) -> Result<EnergyAnalysis> {
    let table = apply_overrides(config, parse_energy_file(&file.path)?)?;
    let kinetic = table.energy - config.e_threshold;
    if !(kinetic > 0.0) {
        return Err(Error::Validation(format!(
            "E = {} meV lies below the threshold {} meV",
            table.energy, config.e_threshold
        )));
    }
    let k = wavevector(config.reduced_mass, kinetic);
    let build = |t: &SMatrixTable| {
        build_approximant(
            t,
            config.parity_flip,
            config.remove_guessed_phase,
            config.multi_precision,
        )
    };
    let model = build(&table)?;
    let mut noise_models = Vec::with_capacity(config.nstime);
    for r in 0..config.nstime {
        let seed = config.noise_seed.wrapping_add(r as u64 + 1000 * file.index as u64);
        match build(&add_noise(&table, config.noise_fac, seed)) {
            Ok(m) => noise_models.push(m),
            Err(e) => log::warn!("noise repeat {r} at E = {} meV failed: {e}", table.energy),
        }
    }
    let set = filter_froissart(
        &poles_zeros_in_window(&model, &config.cam_window),
        config.froissart_eps,
    );
    Ok(EnergyAnalysis {
        file: file.clone(),
        table,
        k,
        model,
        set,
        noise_models,
    })
}

pub type Skipped = (ResolvedFile, Error);

/// Analyse all resolved energies in parallel. Failures are logged and
/// returned separately; the run fails only if nothing succeeds.
pub fn analyse_all(manifest: &RunManifest) -> Result<(Vec<EnergyAnalysis>, Vec<Skipped>)> {
    let results: Vec<(ResolvedFile, Result<EnergyAnalysis>)> = manifest
        .resolved_files
        .par_iter()
        .map(|f| (f.clone(), analyse_energy(&manifest.config, f)))
        .collect();
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for (f, r) in results {
        match r {
            Ok(a) => ok.push(a),
            Err(e) => {
                log::error!("skipping E = {} meV (file {}): {e}", f.energy, f.index);
                failed.push((f, e));
            }
        }
    }
    if ok.is_empty() && !failed.is_empty() {
        return Err(failed.swap_remove(0).1);
    }
    Ok((ok, failed))
}

fn pow_np(z: Complex64, np: u8) -> f64 {
    if np == 2 {
        z.norm_sqr()
    } else {
        z.norm()
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n.max(2) - 1) as f64)
        .collect()
}

fn j_grid(a: &EnergyAnalysis, n: usize) -> Vec<f64> {
    linspace(0.0, (a.table.nread - 1) as f64, n)
}

fn phi_grid(config: &RunConfig) -> Vec<f64> {
    let (nl, nr) = config.winding_range;
    linspace(nl as f64 * PI, nr as f64 * PI, config.npoints)
}

type Rows = BTreeMap<OutputKey, Vec<Vec<f64>>>;

fn push(rows: &mut Rows, key: OutputKey, row: Vec<f64>) {
    rows.entry(key).or_default().push(row);
}

// Energy-resolved Step I rows for one analysis.
fn step1_rows(config: &RunConfig, a: &EnergyAnalysis) -> Result<Rows> {
    let mut rows = Rows::new();
    let e = a.energy();
    let np = config.power_np;
    for p in &a.set.poles {
        push(&mut rows, OutputKey::DcsPole, vec![e, p.position.re, p.position.im]);
    }
    for z in &a.set.zeros {
        push(&mut rows, OutputKey::DcsZero, vec![e, z.re, z.im]);
    }
    if config.emit_3d.dcs3d {
        for &t in &AngularGrid::uniform(config.npoints).theta_values {
            let f = pws_amplitude(&a.table, t, a.k);
            push(&mut rows, OutputKey::DcsDcs3d, vec![e, t.to_degrees(), f.norm_sqr()]);
        }
    }
    let jg = j_grid(a, config.npoints);
    if config.emit_3d.prob3d {
        for &j in &jg {
            let s = a.model.physical(Complex64::new(j, 0.0));
            push(&mut rows, OutputKey::DcsProb3d, vec![e, j, s.norm_sqr()]);
        }
    }
    if config.emit_3d.ph3d {
        for &j in &jg {
            if let Ok(d) = deflection_function(&a.model, &[j + 0.5]) {
                push(&mut rows, OutputKey::DcsPh3d, vec![e, j, d[0]]);
            }
        }
    }
    if !config.unfolded {
        return Ok(rows);
    }
    let unf = a.unfolder()?;
    let phis = phi_grid(config);
    if config.emit_3d.f3d || config.emit_3d.g3d {
        for &phi in &phis {
            if config.emit_3d.f3d {
                push(&mut rows, OutputKey::DcsF3d, vec![e, phi, unf.f(phi).norm()]);
            }
            if config.emit_3d.g3d {
                push(&mut rows, OutputKey::DcsG3d, vec![e, phi, unf.g(phi).norm()]);
            }
        }
    }
    let theta = config.theta_r.to_radians();
    let br = AmplitudeBreakdown::compute(&a.table, &unf, theta, config.m_range, a.k)?;
    if !br.ns_terms.is_empty() {
        let mut ns = vec![e];
        ns.extend(br.ns_terms.iter().map(|z| pow_np(*z, np)));
        push(&mut rows, OutputKey::DcsNsind, ns);
        let mut fs = vec![e];
        fs.extend(br.fs_terms.iter().map(|z| pow_np(*z, np)));
        push(&mut rows, OutputKey::DcsFsind, fs);
        let sum: Complex64 = br.ns_terms.iter().chain(&br.fs_terms).sum();
        push(&mut rows, OutputKey::DcsSw, vec![e, pow_np(br.f_exact, np), pow_np(sum, np)]);
    }
    let mut fw = vec![e];
    fw.extend(br.fw_terms.iter().map(|z| pow_np(*z, np)));
    push(&mut rows, OutputKey::DcsFwind, fw);
    let fw_sum: Complex64 = br.fw_terms.iter().sum();
    push(&mut rows, OutputKey::DcsFw, vec![e, pow_np(br.f_forward, np), pow_np(fw_sum, np)]);
    let mut bw = vec![e];
    bw.extend(br.bw_terms.iter().map(|z| pow_np(*z, np)));
    push(&mut rows, OutputKey::DcsBwind, bw);
    let bw_sum: Complex64 = br.bw_terms.iter().sum();
    push(&mut rows, OutputKey::DcsBw, vec![e, pow_np(br.f_backward, np), pow_np(bw_sum, np)]);
    Ok(rows)
}

// Single-energy Step I files for the last energy of the range.
fn last_energy_rows(config: &RunConfig, a: &EnergyAnalysis) -> Result<Rows> {
    let mut rows = Rows::new();
    let grid = AngularGrid::uniform(config.npoints);
    for &t in &grid.theta_values {
        let f = pws_amplitude(&a.table, t, a.k);
        push(&mut rows, OutputKey::DcsXdcs, vec![t.to_degrees(), f.norm_sqr()]);
        if let Ok((ns, fs)) = ns_fs_simple(&a.table, t, a.k) {
            push(
                &mut rows,
                OutputKey::DcsNfdcs,
                vec![t.to_degrees(), ns.norm_sqr(), fs.norm_sqr(), (ns + fs).norm_sqr()],
            );
        }
    }
    let jg = j_grid(a, config.npoints);
    for &j in &jg {
        let s = a.model.physical(Complex64::new(j, 0.0));
        push(&mut rows, OutputKey::Smprod, vec![j, s.norm(), s.re]);
    }
    for (j, s) in a.table.s_values.iter().enumerate() {
        push(&mut rows, OutputKey::Inputvals, vec![j as f64, s.norm(), s.re]);
    }
    let lambdas: Vec<f64> = jg.iter().map(|j| j + 0.5).collect();
    match (
        deflection_function(&a.model, &lambdas),
        phase_on_grid(&a.model, &lambdas),
    ) {
        (Ok(defl), Ok(ph)) => {
            for ((j, d), (theta, _)) in jg.iter().zip(defl).zip(ph) {
                push(&mut rows, OutputKey::Phase, vec![*j, d, theta]);
            }
        }
        (Err(e), _) | (_, Err(e)) => log::warn!("phase file skipped: {e}"),
    }
    if config.unfolded {
        let unf = a.unfolder()?;
        for phi in phi_grid(config) {
            let f = unf.f(phi);
            let g = unf.g(phi);
            push(&mut rows, OutputKey::Funf, vec![phi, f.norm(), f.re]);
            push(&mut rows, OutputKey::Gunf, vec![phi, g.norm(), g.re]);
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
struct ScreenEntry<'a> {
    energy: f64,
    file_index: usize,
    model: &'a PadeModel,
    noise_models: &'a [PadeModel],
}

#[derive(Debug)]
pub struct Step1Report {
    pub written: Vec<PathBuf>,
    pub analysed: Vec<f64>,
    pub skipped: Vec<(ResolvedFile, Error)>,
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Step I: reconstruct every energy and write the catalog files.
pub fn run_step1(manifest: &RunManifest) -> Result<Step1Report> {
    let config = &manifest.config;
    if !config.first_run {
        return Err(Error::Validation("step 1 requires first_run = yes".into()));
    }
    ensure_dir(&config.output_dir)?;
    if manifest.resolved_files.is_empty() {
        log::warn!("no input energies inside the window {:?}; nothing to do", config.energy_window);
        return Ok(Step1Report {
            written: Vec::new(),
            analysed: Vec::new(),
            skipped: Vec::new(),
        });
    }
    let (analyses, mut skipped) = analyse_all(manifest)?;
    let per_energy: Vec<(usize, Result<Rows>)> = analyses
        .par_iter()
        .enumerate()
        .map(|(i, a)| (i, step1_rows(config, a)))
        .collect();
    let mut rows = Rows::new();
    let mut kept = Vec::new();
    for (i, r) in per_energy {
        match r {
            Ok(r) => {
                for (key, mut v) in r {
                    rows.entry(key).or_default().append(&mut v);
                }
                kept.push(i);
            }
            Err(e) => {
                log::error!("skipping E = {} meV: {e}", analyses[i].energy());
                skipped.push((analyses[i].file.clone(), e));
            }
        }
    }
    if kept.is_empty() {
        return Err(skipped.swap_remove(0).1);
    }
    let last = &analyses[*kept.last().expect("non-empty")];
    for (key, mut v) in last_energy_rows(config, last)? {
        rows.entry(key).or_default().append(&mut v);
    }

    let mut written = Vec::new();
    for (key, v) in &rows {
        written.push(write_column_file(&config.output_dir, *key, v)?);
    }
    let screen: Vec<ScreenEntry> = kept
        .iter()
        .map(|&i| ScreenEntry {
            energy: analyses[i].energy(),
            file_index: analyses[i].file.index,
            model: &analyses[i].model,
            noise_models: &analyses[i].noise_models,
        })
        .collect();
    let path = config.output_dir.join(SCREEN_PADE);
    let text = serde_json::to_string_pretty(&screen).map_err(|e| Error::Validation(e.to_string()))?;
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(Step1Report {
        written,
        analysed: kept.iter().map(|&i| analyses[i].energy()).collect(),
        skipped,
    })
}

/// Trajectories accumulated by earlier Step II runs.
pub fn load_aux(output_dir: &Path) -> Result<Vec<Trajectory>> {
    let path = output_dir.join(AUX_TRAJECTORIES);
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

pub fn save_aux(output_dir: &Path, trajectories: &[Trajectory]) -> Result<()> {
    let path = output_dir.join(AUX_TRAJECTORIES);
    let text = serde_json::to_string_pretty(trajectories)
        .map_err(|e| Error::Validation(e.to_string()))?;
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

/// Remove the accumulation state; catalog files are left alone.
pub fn clean_aux(output_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut removed = Vec::new();
    let path = output_dir.join(AUX_TRAJECTORIES);
    if path.exists() {
        std::fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
        removed.push(path);
    }
    Ok(removed)
}

/// Trajectories in a canonical order so that sums do not depend on the
/// order in which they were accumulated.
pub fn canonical_order(trajectories: &[Trajectory]) -> Vec<Trajectory> {
    let mut v = trajectories.to_vec();
    let key = |t: &Trajectory| {
        t.points
            .first()
            .map(|p| (p.energy, p.lambda_n.re, p.lambda_n.im))
            .unwrap_or((f64::INFINITY, 0.0, 0.0))
    };
    v.sort_by(|a, b| {
        let (ka, kb) = (key(a), key(b));
        ka.0.total_cmp(&kb.0)
            .then(ka.1.total_cmp(&kb.1))
            .then(ka.2.total_cmp(&kb.2))
            .then(a.label.cmp(&b.label))
    });
    v
}

/// (|Σ tails|^np, |f − Σ tails|^np, |f|^np) for one energy and mode.
pub fn contribution_row(
    a: &EnergyAnalysis,
    trajectories: &[Trajectory],
    mode: ThetaMode,
    np: u8,
) -> Result<[f64; 3]> {
    let theta = match mode {
        ThetaMode::Forward => 0.0,
        ThetaMode::Backward => PI,
        ThetaMode::Sideway(t) => t,
    };
    let f = pws_amplitude(&a.table, theta, a.k);
    let (tail, background) = subtract_resonance(f, a.energy(), a.k, &canonical_order(trajectories), mode)?;
    Ok([pow_np(tail, np), pow_np(background, np), pow_np(f, np)])
}

#[derive(Debug)]
pub struct Step2Report {
    pub trajectory: Trajectory,
    pub accumulated: Vec<String>,
    pub written: Vec<PathBuf>,
}

/// Step II: follow one trajectory from the selector's picks, then write its
/// files and the accumulated sums over all trajectories so far.
pub fn run_step2<F>(manifest: &RunManifest, selector: F) -> Result<Step2Report>
where
    F: FnMut(&PoleCandidates, Option<&ReggePole>) -> Result<Selection>,
{
    let config = &manifest.config;
    if config.first_run {
        return Err(Error::Validation("step 2 requires first_run = no".into()));
    }
    let catalog = config.output_dir.join(OutputKey::DcsPole.file_name());
    if !catalog.exists() {
        return Err(Error::Validation(format!(
            "{} not found; run step 1 first",
            catalog.display()
        )));
    }
    let (analyses, _) = analyse_all(manifest)?;
    if analyses.is_empty() {
        return Err(Error::Validation("no energies inside the window".into()));
    }
    let candidates: Vec<PoleCandidates> = analyses.iter().map(|a| a.candidates()).collect();
    let mut previous = load_aux(&config.output_dir)?;
    let label = manifest
        .selections
        .as_ref()
        .and_then(|s| s.label.clone())
        .unwrap_or_else(|| format!("trajectory-{}", previous.len() + 1));
    let mode = if config.follow_by_hand {
        FollowMode::Manual
    } else {
        FollowMode::Automatic
    };
    let traj = follow_trajectory(&candidates, &label, mode, selector)?;
    previous.retain(|t| t.label != label);
    previous.push(traj.clone());
    save_aux(&config.output_dir, &previous)?;
    let written = write_step2_files(config, &analyses, &traj, &previous)?;
    Ok(Step2Report {
        trajectory: traj,
        accumulated: previous.iter().map(|t| t.label.clone()).collect(),
        written,
    })
}

/// Selector driven by a selection script.
pub fn script_selector(
    script: &SelectionScript,
) -> impl FnMut(&PoleCandidates, Option<&ReggePole>) -> Result<Selection> + '_ {
    move |cands, last| {
        script
            .pick_for(cands.energy, last.is_none())
            .ok_or_else(|| Error::Selection {
                message: format!("no pick given for E = {} meV", cands.energy),
                candidates: cands.poles.iter().map(|p| p.j()).collect(),
            })
    }
}

fn write_step2_files(
    config: &RunConfig,
    analyses: &[EnergyAnalysis],
    traj: &Trajectory,
    all: &[Trajectory],
) -> Result<Vec<PathBuf>> {
    let np = config.power_np;
    let theta = config.theta_r.to_radians();
    let sideway = theta > 0.0 && theta < PI;
    let nr = config.winding_range.1;
    let fw_max = if nr % 2 == 1 { (nr + 1) / 2 } else { nr / 2 };
    let bw_max = if nr % 2 == 1 { (nr - 1) / 2 } else { nr / 2 };
    let mut rows = Rows::new();
    for p in &traj.points {
        let j = p.j();
        push(&mut rows, OutputKey::DcsTraj, vec![p.energy, j.re, j.im]);
        push(&mut rows, OutputKey::DcsResid, vec![p.energy, p.residue.re, p.residue.im]);
        let Some(a) = analyses.iter().find(|a| a.energy() == p.energy) else {
            continue;
        };
        if sideway {
            let mut r = vec![p.energy, pow_np(sw_tail_closed(p, a.k, theta)?, np)];
            r.extend(sw_tail_terms(p, a.k, theta, (1, nr - 1))?.iter().map(|z| pow_np(*z, np)));
            push(&mut rows, OutputKey::DcsSwtind, r);
        }
        let mut r = vec![p.energy, pow_np(fw_tail_closed(p, a.k)?, np)];
        r.extend(fw_tail_terms(p, a.k, (0, fw_max)).iter().map(|z| pow_np(*z, np)));
        push(&mut rows, OutputKey::DcsFwtind, r);
        let mut r = vec![p.energy, pow_np(bw_tail_closed(p, a.k)?, np)];
        r.extend(bw_tail_terms(p, a.k, (1, bw_max)).iter().map(|z| pow_np(*z, np)));
        push(&mut rows, OutputKey::DcsBwtind, r);
    }
    for a in analyses {
        let e = a.energy();
        if sideway {
            let [t, b, _] = contribution_row(a, all, ThetaMode::Sideway(theta), np)?;
            push(&mut rows, OutputKey::DcsSwsm, vec![e, t, b]);
        }
        let [t, b, _] = contribution_row(a, all, ThetaMode::Forward, np)?;
        push(&mut rows, OutputKey::DcsFwsm, vec![e, t, b]);
        let [t, b, _] = contribution_row(a, all, ThetaMode::Backward, np)?;
        push(&mut rows, OutputKey::DcsBwsm, vec![e, t, b]);
    }
    if analyses.len() == 1 && config.unfolded {
        let a = &analyses[0];
        let unf = a.unfolder()?;
        let ordered = canonical_order(all);
        for phi in phi_grid(config) {
            let (mut tf, mut tg) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            if phi >= PI {
                for t in &ordered {
                    if let Some(p) = t.at_energy(a.energy()) {
                        tf += tail_f(p, phi)?;
                        tg += tail_g(p, phi)?;
                    }
                }
            }
            push(&mut rows, OutputKey::Smof, vec![phi, pow_np(unf.f(phi) - tf, np)]);
            push(&mut rows, OutputKey::Smog, vec![phi, pow_np(unf.g(phi) - tg, np)]);
        }
    }
    let mut written = Vec::new();
    for key in [
        OutputKey::DcsTraj,
        OutputKey::DcsResid,
        OutputKey::DcsSwtind,
        OutputKey::DcsFwtind,
        OutputKey::DcsBwtind,
        OutputKey::DcsSwsm,
        OutputKey::DcsFwsm,
        OutputKey::DcsBwsm,
    ] {
        let v = rows.remove(&key).unwrap_or_default();
        written.push(write_column_file(&config.output_dir, key, &v)?);
    }
    for (key, v) in rows {
        written.push(write_column_file(&config.output_dir, key, &v)?);
    }
    Ok(written)
}

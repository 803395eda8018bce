use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rectangle x_min ≤ Re J ≤ x_max, y_min ≤ Im J ≤ y_max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CamWindow {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl CamWindow {
    pub fn contains(&self, z: num_complex::Complex64) -> bool {
        self.x_min <= z.re && z.re <= self.x_max && self.y_min <= z.im && z.im <= self.y_max
    }
}

impl Default for CamWindow {
    fn default() -> Self {
        CamWindow {
            x_min: 0.0,
            x_max: 50.0,
            y_min: 0.0,
            y_max: 10.0,
        }
    }
}

/// Replacement header values applied to every input file of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    pub nread: Option<usize>,
    pub niter: Option<usize>,
    pub dxl: Option<f64>,
}

/// Which energy-resolved surfaces to emit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Emit3d {
    pub dcs3d: bool,
    pub prob3d: bool,
    pub ph3d: bool,
    pub f3d: bool,
    pub g3d: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub first_run: bool,
    pub follow_by_hand: bool,
    /// 1-based inclusive range of input file names.
    pub file_range: (usize, usize),
    /// Energies (meV) outside this closed interval are skipped.
    pub energy_window: (f64, f64),
    /// Reduced mass in Da.
    pub reduced_mass: f64,
    pub froissart_eps: f64,
    pub cam_window: CamWindow,
    pub parity_flip: bool,
    pub remove_guessed_phase: bool,
    pub multi_precision: bool,
    pub nstime: usize,
    pub npoints: usize,
    pub noise_fac: f64,
    pub noise_seed: u64,
    pub overrides: Overrides,
    /// Winding angles run over [nl·π, nr·π].
    pub winding_range: (i32, i32),
    /// Analysis angle in degrees.
    pub theta_r: f64,
    pub power_np: u8,
    pub m_range: (i32, i32),
    pub emit_3d: Emit3d,
    /// Evaluate the unfolded amplitudes.
    pub unfolded: bool,
    /// Threshold energy subtracted before computing k (meV).
    pub e_threshold: f64,
    pub include_negative_m: bool,
    pub data_dir: PathBuf,
    pub output_dir: PathBuf,
}

impl RunConfig {
    /// Configuration with every optional field at its default.
    pub fn new(first_run: bool, file_range: (usize, usize), reduced_mass: f64) -> Self {
        RunConfig {
            first_run,
            follow_by_hand: false,
            file_range,
            energy_window: (0.0, f64::MAX),
            reduced_mass,
            froissart_eps: 0.0,
            cam_window: CamWindow::default(),
            parity_flip: true,
            remove_guessed_phase: true,
            multi_precision: false,
            nstime: 0,
            npoints: 181,
            noise_fac: 1e-8,
            noise_seed: 1,
            overrides: Overrides::default(),
            winding_range: (0, 4),
            theta_r: 90.0,
            power_np: 1,
            m_range: (0, 3),
            emit_3d: Emit3d::default(),
            unfolded: true,
            e_threshold: 0.0,
            include_negative_m: false,
            data_dir: PathBuf::from("input"),
            output_dir: PathBuf::from("output"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.file_range.0 < 1 || self.file_range.0 > self.file_range.1 {
            return bad(format!("file_range {:?} must satisfy 1 <= first <= last", self.file_range));
        }
        if !(self.energy_window.0 <= self.energy_window.1) {
            return bad(format!("energy_window {:?} has E_min > E_max", self.energy_window));
        }
        if !(self.reduced_mass > 0.0) {
            return bad(format!("reduced_mass {} must be positive", self.reduced_mass));
        }
        if !(self.froissart_eps >= 0.0) {
            return bad("froissart_eps must be nonnegative".into());
        }
        let w = &self.cam_window;
        if !(w.x_min < w.x_max && w.y_min < w.y_max) {
            return bad(format!("cam_window {w:?} is empty"));
        }
        if !(0.0..=180.0).contains(&self.theta_r) {
            return bad(format!("theta_r {} outside [0, 180]", self.theta_r));
        }
        if self.winding_range.0 >= self.winding_range.1 {
            return bad(format!("winding_range {:?} needs nl < nr", self.winding_range));
        }
        if self.power_np != 1 && self.power_np != 2 {
            return bad(format!("power_np {} must be 1 or 2", self.power_np));
        }
        if self.m_range.0 > self.m_range.1 {
            return bad(format!("m_range {:?} is empty", self.m_range));
        }
        if self.m_range.0 < 0 && !self.include_negative_m {
            return bad("negative M requires include_negative_m = true".into());
        }
        if self.npoints < 2 {
            return bad("npoints must be at least 2".into());
        }
        if !(self.noise_fac >= 0.0) {
            return bad("noise_fac must be nonnegative".into());
        }
        if let Some(d) = self.overrides.dxl {
            if !(d > 0.0) {
                return bad("override dxl must be positive".into());
            }
        }
        Ok(())
    }

    /// Set one field from its key=value spelling.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "first_run" => self.first_run = parse_bool(key, v)?,
            "follow_by_hand" => self.follow_by_hand = parse_bool(key, v)?,
            "file_range" => {
                let [a, b] = parse_array::<2>(key, v)?;
                self.file_range = (as_index(key, a)?, as_index(key, b)?);
            }
            "energy_window" => {
                let [a, b] = parse_array::<2>(key, v)?;
                self.energy_window = (a, b);
            }
            "reduced_mass" => self.reduced_mass = parse_f64(key, v)?,
            "froissart_eps" => self.froissart_eps = parse_f64(key, v)?,
            "cam_window" => {
                let [x_min, x_max, y_min, y_max] = parse_array::<4>(key, v)?;
                self.cam_window = CamWindow {
                    x_min,
                    x_max,
                    y_min,
                    y_max,
                };
            }
            "parity_flip" => self.parity_flip = parse_bool(key, v)?,
            "remove_guessed_phase" => self.remove_guessed_phase = parse_bool(key, v)?,
            "multi_precision" => self.multi_precision = parse_bool(key, v)?,
            "nstime" => self.nstime = as_index(key, parse_f64(key, v)?)?,
            "npoints" => self.npoints = as_index(key, parse_f64(key, v)?)?,
            "noise_fac" => self.noise_fac = parse_f64(key, v)?,
            "noise_seed" => self.noise_seed = as_index(key, parse_f64(key, v)?)? as u64,
            "nread1" | "override_nread" => {
                self.overrides.nread = Some(as_index(key, parse_f64(key, v)?)?)
            }
            "niter1" | "override_niter" => {
                self.overrides.niter = Some(as_index(key, parse_f64(key, v)?)?)
            }
            "dxl1" | "override_dxl" => self.overrides.dxl = Some(parse_f64(key, v)?),
            "winding_range" => {
                let [a, b] = parse_array::<2>(key, v)?;
                self.winding_range = (as_int(key, a)?, as_int(key, b)?);
            }
            "theta_r" => self.theta_r = parse_f64(key, v)?,
            "power_np" => self.power_np = as_int(key, parse_f64(key, v)?)? as u8,
            "m_range" => {
                let [a, b] = parse_array::<2>(key, v)?;
                self.m_range = (as_int(key, a)?, as_int(key, b)?);
            }
            "emit_dcs3d" => self.emit_3d.dcs3d = parse_bool(key, v)?,
            "emit_prob3d" => self.emit_3d.prob3d = parse_bool(key, v)?,
            "emit_ph3d" => self.emit_3d.ph3d = parse_bool(key, v)?,
            "emit_f3d" => self.emit_3d.f3d = parse_bool(key, v)?,
            "emit_g3d" => self.emit_3d.g3d = parse_bool(key, v)?,
            "unfolded" => self.unfolded = parse_bool(key, v)?,
            "e_threshold" => self.e_threshold = parse_f64(key, v)?,
            "include_negative_m" => self.include_negative_m = parse_bool(key, v)?,
            "data_dir" => self.data_dir = PathBuf::from(v),
            "output_dir" => self.output_dir = PathBuf::from(v),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Resolve relative data/output directories against `base`.
    pub fn rebase(&mut self, base: &Path) {
        if self.data_dir.is_relative() {
            self.data_dir = base.join(&self.data_dir);
        }
        if self.output_dir.is_relative() {
            self.output_dir = base.join(&self.output_dir);
        }
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "yes" | "y" | "true" | "1" | "on" => Ok(true),
        "no" | "n" | "false" | "0" | "off" => Ok(false),
        _ => Err(Error::Validation(format!("{key}: expected yes/no, got '{v}'"))),
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.replace(['D', 'd'], "E")
        .parse::<f64>()
        .map_err(|_| Error::Validation(format!("{key}: malformed number '{v}'")))
}

fn parse_array<const N: usize>(key: &str, v: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = v
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    if parts.len() != N {
        return Err(Error::Validation(format!(
            "{key}: expected {N} values, got {}",
            parts.len()
        )));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_f64(key, p)?;
    }
    Ok(out)
}

fn as_index(key: &str, x: f64) -> Result<usize> {
    if x < 0.0 || x.fract() != 0.0 || !x.is_finite() {
        return Err(Error::Validation(format!("{key}: expected a nonnegative integer, got {x}")));
    }
    Ok(x as usize)
}

fn as_int(key: &str, x: f64) -> Result<i32> {
    if x.fract() != 0.0 || !x.is_finite() {
        return Err(Error::Validation(format!("{key}: expected an integer, got {x}")));
    }
    Ok(x as i32)
}

const MANDATORY: [&str; 3] = ["first_run", "file_range", "reduced_mass"];

fn from_pairs(pairs: &[(usize, String, String)]) -> Result<RunConfig> {
    let mut seen = BTreeMap::new();
    for (line, k, v) in pairs {
        if seen.insert(k.clone(), v.clone()).is_some() {
            return Err(Error::Config(format!("line {line}: duplicate key '{k}'")));
        }
    }
    for m in MANDATORY {
        if !seen.contains_key(m) {
            return Err(Error::Config(format!("missing mandatory key '{m}'")));
        }
    }
    let mut cfg = RunConfig::new(false, (1, 1), 1.0);
    for (_, k, v) in pairs {
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

// Legacy entries: the value between the first pair of colons on the n-th
// colon-bearing line is entry #n.
fn legacy_pairs(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let mut it = line.splitn(3, ':');
        let (_, value, rest) = (it.next(), it.next(), it.next());
        if let (Some(v), Some(_)) = (value, rest) {
            entries.push((i + 1, v.trim().to_string()));
        }
    }
    let get = |n: usize| entries.get(n - 1).map(|(l, v)| (*l, v.clone()));
    let mut pairs = Vec::new();
    let mut push = |n: usize, key: &str| {
        if let Some((l, v)) = get(n) {
            pairs.push((l, key.to_string(), v));
        }
    };
    push(2, "first_run");
    push(10, "reduced_mass");
    push(11, "froissart_eps");
    push(16, "parity_flip");
    push(17, "remove_guessed_phase");
    push(18, "multi_precision");
    push(19, "nstime");
    push(20, "npoints");
    push(21, "noise_fac");

    let num = |n: usize| -> Result<Option<f64>> {
        match get(n) {
            Some((l, v)) => parse_f64(&format!("line {l}"), &v).map(Some),
            None => Ok(None),
        }
    };
    if let (Some(count), Some(skip)) = (num(6)?, num(7)?) {
        let first = skip + 1.0;
        pairs.push((0, "file_range".into(), format!("{first} {}", skip + count)));
    }
    if let (Some(a), Some(b)) = (num(8)?, num(9)?) {
        pairs.push((0, "energy_window".into(), format!("{a} {b}")));
    }
    if let (Some(a), Some(b), Some(c), Some(d)) = (num(12)?, num(13)?, num(14)?, num(15)?) {
        pairs.push((0, "cam_window".into(), format!("{a} {b} {c} {d}")));
    }
    for (flag, value, key) in [(22, 25, "nread1"), (23, 26, "niter1"), (24, 27, "dxl1")] {
        if num(flag)? == Some(1.0) {
            if let Some((l, v)) = get(value) {
                pairs.push((l, key.into(), v));
            }
        }
    }
    if let (Some(a), Some(b)) = (num(28)?, num(29)?) {
        pairs.push((0, "winding_range".into(), format!("{a} {b}")));
    }
    Ok(pairs)
}

/// Parse configuration text. `key = value` lines are the native format;
/// text without any `=` is read as the legacy colon-delimited layout.
pub fn parse_run_config_str(text: &str) -> Result<RunConfig> {
    let mut pairs = Vec::new();
    let mut modern = false;
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some((k, v)) = content.split_once('=') {
            modern = true;
            pairs.push((i + 1, k.trim().to_string(), v.trim().to_string()));
        }
    }
    if modern {
        from_pairs(&pairs)
    } else {
        from_pairs(&legacy_pairs(text)?)
    }
}

/// Read a configuration file; relative directories are taken relative to
/// the file's own directory.
pub fn parse_run_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut cfg = parse_run_config_str(&text)?;
    if let Some(base) = path.parent() {
        cfg.rebase(base);
    }
    Ok(cfg)
}

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// S-matrix elements of one collision energy at J = 0..nread−1 together
/// with the reconstruction parameters carried in the file header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SMatrixTable {
    /// Collision energy in meV.
    pub energy: f64,
    pub s_values: Vec<Complex64>,
    pub nread: usize,
    pub niter: usize,
    pub sht: f64,
    /// 1-based inclusive index range of the points used for the fit.
    pub jstart: usize,
    pub jfin: usize,
    pub dxl: f64,
    pub file_index: usize,
}

/// Header values applied to generated tables.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionParams {
    pub niter: usize,
    pub sht: f64,
    pub jstart: usize,
    /// `None` uses every generated partial wave.
    pub jfin: Option<usize>,
    pub dxl: f64,
}

impl Default for ReconstructionParams {
    fn default() -> Self {
        ReconstructionParams {
            niter: 1,
            sht: 0.0,
            jstart: 1,
            jfin: None,
            dxl: 0.1,
        }
    }
}

impl SMatrixTable {
    pub fn validate(&self) -> Result<()> {
        if self.nread < 2 {
            return Err(Error::Validation(format!("nread = {} < 2", self.nread)));
        }
        if self.s_values.len() != self.nread {
            return Err(Error::Validation(format!(
                "{} S-matrix values for nread = {}",
                self.s_values.len(),
                self.nread
            )));
        }
        if !(1 <= self.jstart && self.jstart <= self.jfin && self.jfin <= self.nread) {
            return Err(Error::Validation(format!(
                "need 1 <= jstart <= jfin <= nread, got {} {} {}",
                self.jstart, self.jfin, self.nread
            )));
        }
        if let Some(j) = self.s_values.iter().position(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::Validation(format!("S^{j} is not finite")));
        }
        if !(self.energy > 0.0 && self.energy.is_finite()) {
            return Err(Error::Validation(format!("energy {} must be positive", self.energy)));
        }
        if !(self.dxl > 0.0) {
            return Err(Error::Validation(format!("dxl {} must be positive", self.dxl)));
        }
        if !self.sht.is_finite() {
            return Err(Error::Validation("sht is not finite".into()));
        }
        Ok(())
    }

    /// Integer J of the retained points, J = jstart−1 ..= jfin−1.
    pub fn retained_j(&self) -> std::ops::RangeInclusive<usize> {
        (self.jstart - 1)..=(self.jfin - 1)
    }

    pub fn n_retained(&self) -> usize {
        self.jfin - self.jstart + 1
    }

    /// Copy truncated to the first `nread` partial waves, clamping jfin.
    pub fn truncated(&self, nread: usize) -> Result<Self> {
        if nread < 2 || nread > self.nread {
            return Err(Error::Validation(format!(
                "cannot truncate {} partial waves to {nread}",
                self.nread
            )));
        }
        let mut t = self.clone();
        t.s_values.truncate(nread);
        t.nread = nread;
        t.jfin = t.jfin.min(nread);
        t.jstart = t.jstart.min(t.jfin);
        Ok(t)
    }
}

fn parse_number(tok: &str) -> Option<f64> {
    let t = tok.replace(['D', 'd'], "E");
    t.parse::<f64>().ok()
}

fn parse_count(value: f64, what: &str, path: &str, line: usize) -> Result<usize> {
    if value.fract() != 0.0 || value < 0.0 || !value.is_finite() {
        return Err(Error::Parse {
            path: path.to_string(),
            line,
            message: format!("{what} must be a nonnegative integer, got {value}"),
        });
    }
    Ok(value as usize)
}

/// Parse the text of an energy file. `origin` names the source in errors.
pub fn parse_energy_str(text: &str, origin: &str, file_index: usize) -> Result<SMatrixTable> {
    let mut tokens: Vec<(usize, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split(['#', '!']).next().unwrap_or("");
        for tok in content.split(|c: char| c.is_whitespace() || c == ',') {
            if tok.is_empty() {
                continue;
            }
            let v = parse_number(tok).ok_or_else(|| Error::Parse {
                path: origin.to_string(),
                line: i + 1,
                message: format!("malformed number '{tok}'"),
            })?;
            tokens.push((i + 1, v));
        }
    }
    if tokens.len() < 7 {
        return Err(Error::Parse {
            path: origin.to_string(),
            line: tokens.last().map_or(1, |t| t.0),
            message: "header needs nread niter sht jstart jfin inv dxl".into(),
        });
    }
    let nread = parse_count(tokens[0].1, "nread", origin, tokens[0].0)?;
    let niter = parse_count(tokens[1].1, "niter", origin, tokens[1].0)?;
    let sht = tokens[2].1;
    let jstart = parse_count(tokens[3].1, "jstart", origin, tokens[3].0)?;
    let jfin = parse_count(tokens[4].1, "jfin", origin, tokens[4].0)?;
    let dxl = tokens[6].1;

    let body = &tokens[7..];
    if body.len() < 2 * nread + 1 {
        return Err(Error::Truncated {
            expected: nread,
            found: body.len().saturating_sub(1) / 2,
        });
    }
    let s_values = (0..nread)
        .map(|j| Complex64::new(body[2 * j].1, body[2 * j + 1].1))
        .collect();
    let energy = body[2 * nread].1;
    if body.len() > 2 * nread + 1 {
        return Err(Error::Parse {
            path: origin.to_string(),
            line: body[2 * nread + 1].0,
            message: "unexpected data after the energy record".into(),
        });
    }
    let table = SMatrixTable {
        energy,
        s_values,
        nread,
        niter,
        sht,
        jstart,
        jfin,
        dxl,
        file_index,
    };
    table.validate()?;
    Ok(table)
}

/// Read a per-energy input file. The file name, when numeric, supplies the
/// file index.
pub fn parse_energy_file(path: &Path) -> Result<SMatrixTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let index = path
        .file_name()
        .and_then(|n| n.to_str())
        .and_then(|n| n.parse::<usize>().ok())
        .unwrap_or(1);
    parse_energy_str(&text, &path.display().to_string(), index)
}

/// Write a table in the layout read by [`parse_energy_file`]; values use
/// round-trip precision. The legacy `inv` slot is written as −1.
pub fn write_energy_file(table: &SMatrixTable, path: &Path) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} {:.17e} {} {} -1 {:.17e}",
        table.nread, table.niter, table.sht, table.jstart, table.jfin, table.dxl
    );
    for s in &table.s_values {
        let _ = writeln!(out, "{:.17e} {:.17e}", s.re, s.im);
    }
    let _ = writeln!(out, "{:.17e}", table.energy);
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

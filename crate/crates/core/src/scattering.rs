//! Partial-wave amplitudes and their semiclassical decompositions.
//!
//! Amplitudes are in Å for k in Å⁻¹; θ is the reactive scattering angle
//! θ_R in radians and φ the winding angle.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io_model::SMatrixTable;
use crate::pade_recon::PadeModel;
use crate::quadrature::{integrate_points, QuadOptions};
use crate::special::legendre_table;

pub use crate::special::legendre;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Ascending scattering angles in [0, π].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularGrid {
    pub theta_values: Vec<f64>,
}

impl AngularGrid {
    pub fn new(theta_values: Vec<f64>) -> Result<Self> {
        if theta_values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Validation("angles must be strictly increasing".into()));
        }
        if theta_values.iter().any(|t| !(0.0..=PI).contains(t)) {
            return Err(Error::Validation("angles must lie in [0, pi]".into()));
        }
        Ok(AngularGrid { theta_values })
    }

    /// `n` equally spaced angles from 0 to π inclusive.
    pub fn uniform(n: usize) -> Self {
        let n = n.max(2);
        let theta_values = (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect();
        AngularGrid { theta_values }
    }
}

/// σ = |f|².
pub fn dcs(f: Complex64) -> f64 {
    f.norm_sqr()
}

/// f(θ) = (ik)⁻¹ Σ_J (J+½) S^J P_J(cos(π−θ)).
pub fn pws_amplitude(table: &SMatrixTable, theta: f64, k: f64) -> Complex64 {
    let p = legendre_table(table.nread.saturating_sub(1), (PI - theta).cos());
    let sum: Complex64 = table
        .s_values
        .iter()
        .zip(&p)
        .enumerate()
        .map(|(j, (s, pj))| s * ((j as f64 + 0.5) * pj))
        .sum();
    sum / (I * k)
}

fn check_interior(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < PI) || theta.sin() <= 1e-12 {
        return Err(Error::Endpoint { theta });
    }
    Ok(())
}

/// Travelling-wave kernels P^±_J(π−θ) = [2πλ sinθ]^{−½} exp{±i[λ(π−θ) − π/4]}.
pub fn traveling_kernels(j: usize, theta: f64) -> Result<(Complex64, Complex64)> {
    check_interior(theta)?;
    let lambda = j as f64 + 0.5;
    let amp = 1.0 / (2.0 * PI * lambda * theta.sin()).sqrt();
    let arg = lambda * (PI - theta) - 0.25 * PI;
    Ok((
        Complex64::from_polar(amp, arg),
        Complex64::from_polar(amp, -arg),
    ))
}

/// Nearside and farside parts of the partial-wave sum.
pub fn ns_fs_simple(table: &SMatrixTable, theta: f64, k: f64) -> Result<(Complex64, Complex64)> {
    check_interior(theta)?;
    let mut ns = Complex64::new(0.0, 0.0);
    let mut fs = Complex64::new(0.0, 0.0);
    for (j, s) in table.s_values.iter().enumerate() {
        let (plus, minus) = traveling_kernels(j, theta)?;
        let w = s * (j as f64 + 0.5);
        ns += w * plus;
        fs += w * minus;
    }
    Ok((ns / (I * k), fs / (I * k)))
}

/// Deflection function θ_R(λ) = π + dΘ/dλ of the continued element,
/// evaluated analytically from the model.
pub fn deflection_function(model: &PadeModel, lambda_grid: &[f64]) -> Result<Vec<f64>> {
    lambda_grid
        .iter()
        .map(|&l| {
            let j = Complex64::new(l - 0.5, 0.0);
            if model.pole_distance(j) < 1e-8 {
                return Err(Error::Singularity {
                    at: l - 0.5,
                    message: "pole on the real axis".into(),
                });
            }
            Ok(PI + model.phase_derivative(l))
        })
        .collect()
}

/// Quadrature settings for the unfolded amplitudes.
#[derive(Debug, Clone, Copy)]
pub struct UnfoldOptions {
    /// |S| threshold defining the upper integration limit.
    pub tail_eps: f64,
    pub quad: QuadOptions,
}

impl Default for UnfoldOptions {
    fn default() -> Self {
        UnfoldOptions {
            tail_eps: 1e-10,
            quad: QuadOptions::default(),
        }
    }
}

/// Upper limit of the λ integrals: the first λ on a ¼-spaced grid from ½
/// after which |S| stays below `tail_eps` for one unit, searched up to
/// 4·nread. Failing that, the end of the retained data is accepted when
/// |S| there is below 1e−3 of its maximum.
pub fn lambda_max(model: &PadeModel, tail_eps: f64) -> Result<f64> {
    let cap = 4.0 * model.nread as f64;
    let s = |l: f64| model.physical_lambda(Complex64::new(l, 0.0)).norm();
    let step = 0.25;
    let mut l = 0.5;
    let mut run_start: Option<f64> = None;
    while l <= cap {
        if s(l) < tail_eps {
            let start = *run_start.get_or_insert(l);
            if l - start >= 1.0 {
                return Ok(start);
            }
        } else {
            run_start = None;
        }
        l += step;
    }
    let end = model.j_range.1 + 0.5;
    let mut peak: f64 = 0.0;
    let mut l = 0.5;
    while l <= end {
        peak = peak.max(s(l));
        l += step;
    }
    if s(end) <= 1e-3 * peak {
        log::debug!("lambda_max falls back to the end of the retained data, {end}");
        return Ok(end);
    }
    Err(Error::Decay { tail_eps, cap })
}

/// Evaluator of f̃(φ) = ∫ √λ S(λ) e^{iλφ} dλ and g̃(φ) = ∫ λ S(λ) e^{iλφ} dλ
/// over [0, λ_max].
#[derive(Debug, Clone)]
pub struct Unfolder<'a> {
    pub model: &'a PadeModel,
    pub lambda_max: f64,
    pub options: UnfoldOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnfoldedKind {
    F,
    G,
}

impl<'a> Unfolder<'a> {
    pub fn new(model: &'a PadeModel) -> Result<Self> {
        Self::with_options(model, UnfoldOptions::default())
    }

    pub fn with_options(model: &'a PadeModel, options: UnfoldOptions) -> Result<Self> {
        let lambda_max = lambda_max(model, options.tail_eps)?;
        Ok(Unfolder {
            model,
            lambda_max,
            options,
        })
    }

    pub fn evaluate(&self, kind: UnfoldedKind, phi: f64) -> Complex64 {
        let model = self.model;
        unfold_integral(
            |l| model.physical_lambda(Complex64::new(l, 0.0)),
            kind,
            phi,
            self.lambda_max,
            &self.options.quad,
        )
    }

    pub fn f(&self, phi: f64) -> Complex64 {
        self.evaluate(UnfoldedKind::F, phi)
    }

    pub fn g(&self, phi: f64) -> Complex64 {
        self.evaluate(UnfoldedKind::G, phi)
    }
}

/// ∫₀^{λ_max} w(λ) S(λ) e^{iλφ} dλ with w = √λ (f̃) or λ (g̃) for any
/// S on the real λ axis, on unit-length panels.
pub fn unfold_integral<S: Fn(f64) -> Complex64>(
    s: S,
    kind: UnfoldedKind,
    phi: f64,
    lambda_max: f64,
    opts: &QuadOptions,
) -> Complex64 {
    let integrand = |l: f64| {
        let weight = match kind {
            UnfoldedKind::F => l.sqrt(),
            UnfoldedKind::G => l,
        };
        s(l) * Complex64::from_polar(weight, l * phi)
    };
    let pieces = (lambda_max.ceil() as usize).max(1);
    let points: Vec<f64> = (0..=pieces)
        .map(|i| lambda_max * i as f64 / pieces as f64)
        .collect();
    let r = integrate_points(integrand, &points, opts);
    if !r.converged {
        log::warn!(
            "unfolded integral at phi = {phi} not converged (error {:.3e})",
            r.abs_error
        );
    }
    r.value
}

/// f̃(φ) with default options.
pub fn unfolded_f(model: &PadeModel, phi: f64) -> Result<Complex64> {
    Ok(Unfolder::new(model)?.f(phi))
}

/// g̃(φ) with default options.
pub fn unfolded_g(model: &PadeModel, phi: f64) -> Result<Complex64> {
    Ok(Unfolder::new(model)?.g(phi))
}

fn m_values(m_range: (i32, i32)) -> impl Iterator<Item = i32> {
    m_range.0..=m_range.1
}

fn sign(m: i32) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Nearside and farside contributions of M rotations:
/// f^NS_M = (ik)⁻¹[2π sinθ]^{−½} f̃((2M+1)π − θ) e^{−i(M+¼)π},
/// f^FS_M = (ik)⁻¹[2π sinθ]^{−½} f̃((2M+1)π + θ) e^{−i(M+¾)π}.
pub fn ns_fs_detailed(
    unfolder: &Unfolder<'_>,
    theta: f64,
    m_range: (i32, i32),
    k: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_interior(theta)?;
    let pre = 1.0 / ((I * k) * (2.0 * PI * theta.sin()).sqrt());
    let mut ns = Vec::new();
    let mut fs = Vec::new();
    for m in m_values(m_range) {
        let mf = m as f64;
        let base = (2.0 * mf + 1.0) * PI;
        ns.push(pre * unfolder.f(base - theta) * Complex64::from_polar(1.0, -(mf + 0.25) * PI));
        fs.push(pre * unfolder.f(base + theta) * Complex64::from_polar(1.0, -(mf + 0.75) * PI));
    }
    Ok((ns, fs))
}

/// Forward terms −k⁻¹(−1)^M g̃((2M+1)π).
pub fn forward_terms(unfolder: &Unfolder<'_>, m_range: (i32, i32), k: f64) -> Vec<Complex64> {
    m_values(m_range)
        .map(|m| -unfolder.g((2.0 * m as f64 + 1.0) * PI) * (sign(m) / k))
        .collect()
}

/// Backward terms (ik)⁻¹(−1)^M g̃(2Mπ); M = 0 is the direct recoil.
pub fn backward_terms(unfolder: &Unfolder<'_>, m_range: (i32, i32), k: f64) -> Vec<Complex64> {
    m_values(m_range)
        .map(|m| unfolder.g(2.0 * m as f64 * PI) * sign(m) / (I * k))
        .collect()
}

/// Exact amplitude and its decompositions at one (θ, E).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeBreakdown {
    pub energy: f64,
    pub theta: f64,
    pub k: f64,
    pub m_range: (i32, i32),
    pub f_exact: Complex64,
    pub f_forward: Complex64,
    pub f_backward: Complex64,
    /// Simple nearside/farside split; absent at θ = 0, π.
    pub f_ns_simple: Option<Complex64>,
    pub f_fs_simple: Option<Complex64>,
    pub ns_terms: Vec<Complex64>,
    pub fs_terms: Vec<Complex64>,
    pub fw_terms: Vec<Complex64>,
    pub bw_terms: Vec<Complex64>,
}

impl AmplitudeBreakdown {
    pub fn compute(
        table: &SMatrixTable,
        unfolder: &Unfolder<'_>,
        theta: f64,
        m_range: (i32, i32),
        k: f64,
    ) -> Result<Self> {
        let interior = theta > 0.0 && theta < PI && theta.sin() > 1e-12;
        let (f_ns_simple, f_fs_simple, ns_terms, fs_terms) = if interior {
            let (ns, fs) = ns_fs_simple(table, theta, k)?;
            let (nst, fst) = ns_fs_detailed(unfolder, theta, m_range, k)?;
            (Some(ns), Some(fs), nst, fst)
        } else {
            (None, None, Vec::new(), Vec::new())
        };
        let terms = AmplitudeBreakdown {
            energy: table.energy,
            theta,
            k,
            m_range,
            f_exact: pws_amplitude(table, theta, k),
            f_forward: pws_amplitude(table, 0.0, k),
            f_backward: pws_amplitude(table, PI, k),
            f_ns_simple,
            f_fs_simple,
            ns_terms,
            fs_terms,
            fw_terms: forward_terms(unfolder, m_range, k),
            bw_terms: backward_terms(unfolder, m_range, k),
        };
        terms.warn_truncation();
        Ok(terms)
    }

    fn warn_truncation(&self) {
        for (name, v) in [
            ("nearside", &self.ns_terms),
            ("farside", &self.fs_terms),
            ("forward", &self.fw_terms),
            ("backward", &self.bw_terms),
        ] {
            let total: Complex64 = v.iter().sum();
            if let Some(last) = v.last() {
                if v.len() > 1 && last.norm() > 1e-3 * total.norm() {
                    log::warn!(
                        "E = {} meV: last {name} term is {:.2e} of the partial sum",
                        self.energy,
                        last.norm() / total.norm().max(f64::MIN_POSITIVE)
                    );
                }
            }
        }
    }
}

//! Type-II Padé reconstruction of S(J) with iterative quadratic-phase
//! extraction.
//!
//! The model is
//! S(J) ≈ K_N exp[i(a x² + b x + c)] ∏(J − Z_i) / ∏(J − P_i), x = J − sht,
//! built from ⌊N/2⌋ zeros and ⌊(N−1)/2⌋ poles for N retained points.
//!
//! When the parity flip is active the model represents (−1)^J S^J. The
//! continuation of the physical element is then S(λ) = e^{−iπJ}·model(J)
//! with λ = J + ½, see [`PadeModel::physical`].

mod mp;
mod poly;
mod window;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io_model::SMatrixTable;

pub use window::{filter_froissart, poles_zeros_in_window, PoleEntry, PoleZeroSet};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PadeModel {
    pub k_norm: Complex64,
    /// (a, b, c) of the quadratic phase in the shifted variable x = J − shift.
    pub phase_coeffs: (f64, f64, f64),
    pub zeros: Vec<Complex64>,
    pub poles: Vec<Complex64>,
    pub shift: f64,
    pub source_energy: f64,
    pub n_points: usize,
    pub parity_flip: bool,
    /// First and last retained integer J.
    pub j_range: (f64, f64),
    /// Number of partial waves in the source table.
    pub nread: usize,
    /// Coincident pole/zero pairs removed during construction.
    pub cancelled: Vec<Complex64>,
}

impl PadeModel {
    /// Model assembled from explicit parts, used for synthetic checks.
    pub fn from_parts(
        k_norm: Complex64,
        phase_coeffs: (f64, f64, f64),
        zeros: Vec<Complex64>,
        poles: Vec<Complex64>,
    ) -> Self {
        PadeModel {
            k_norm,
            phase_coeffs,
            n_points: zeros.len() + poles.len() + 1,
            zeros,
            poles,
            shift: 0.0,
            source_energy: 0.0,
            parity_flip: false,
            j_range: (0.0, 0.0),
            nread: 2,
            cancelled: Vec::new(),
        }
    }

    /// The constant model S ≡ 1.
    pub fn identity() -> Self {
        Self::from_parts(Complex64::new(1.0, 0.0), (0.0, 0.0, 0.0), vec![], vec![])
    }

    fn phase_at(&self, j: Complex64) -> Complex64 {
        let (a, b, c) = self.phase_coeffs;
        let x = j - self.shift;
        a * x * x + b * x + c
    }

    fn rational(&self, j: Complex64) -> Complex64 {
        let mut r = Complex64::new(1.0, 0.0);
        let n = self.zeros.len().max(self.poles.len());
        for i in 0..n {
            if let Some(z) = self.zeros.get(i) {
                r *= j - z;
            }
            if let Some(p) = self.poles.get(i) {
                r /= j - p;
            }
        }
        r
    }

    /// Distance from `j` to the nearest pole.
    pub fn pole_distance(&self, j: Complex64) -> f64 {
        self.poles
            .iter()
            .map(|p| (j - p).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Model value at complex J, without the proximity check.
    pub fn evaluate_unchecked(&self, j: Complex64) -> Complex64 {
        self.k_norm * (I * self.phase_at(j)).exp() * self.rational(j)
    }

    /// Model value at complex J.
    pub fn evaluate(&self, j: Complex64) -> Result<Complex64> {
        let d = self.pole_distance(j);
        if d < 1e-12 {
            return Err(Error::Proximity { distance: d });
        }
        Ok(self.evaluate_unchecked(j))
    }

    /// Model value at λ = J + ½.
    pub fn evaluate_lambda(&self, lambda: Complex64) -> Result<Complex64> {
        self.evaluate(lambda - 0.5)
    }

    fn parity_factor(&self, j: Complex64) -> Complex64 {
        if self.parity_flip {
            (-I * PI * j).exp()
        } else {
            Complex64::new(1.0, 0.0)
        }
    }

    /// Continuation of the input S-matrix element at complex J (equals the
    /// raw S^J at retained integers).
    pub fn physical(&self, j: Complex64) -> Complex64 {
        self.parity_factor(j) * self.evaluate_unchecked(j)
    }

    /// [`Self::physical`] as a function of λ = J + ½.
    pub fn physical_lambda(&self, lambda: Complex64) -> Complex64 {
        self.physical(lambda - 0.5)
    }

    fn residue_unchecked(&self, index: usize) -> Complex64 {
        let p = self.poles[index];
        let mut r = self.k_norm * (I * self.phase_at(p)).exp();
        let n = self.zeros.len().max(self.poles.len());
        for i in 0..n {
            if let Some(z) = self.zeros.get(i) {
                r *= p - z;
            }
            if i != index {
                if let Some(q) = self.poles.get(i) {
                    r /= p - q;
                }
            }
        }
        r
    }

    /// Residue of the model at pole `index` (same value in J and λ).
    pub fn residue_at(&self, index: usize) -> Result<Complex64> {
        if index >= self.poles.len() {
            return Err(Error::Validation(format!(
                "pole index {index} out of range (model has {} poles)",
                self.poles.len()
            )));
        }
        let p = self.poles[index];
        for (i, q) in self.poles.iter().enumerate() {
            let d = (p - q).norm();
            if i != index && d < 1e-10 {
                return Err(Error::Degeneracy { index, distance: d });
            }
        }
        Ok(self.residue_unchecked(index))
    }

    /// Residue of the continued S(λ), including the parity factor.
    pub fn physical_residue(&self, index: usize) -> Result<Complex64> {
        let r = self.residue_at(index)?;
        Ok(self.parity_factor(self.poles[index]) * r)
    }

    pub(crate) fn physical_residue_unchecked(&self, index: usize) -> Complex64 {
        self.parity_factor(self.poles[index]) * self.residue_unchecked(index)
    }

    /// dΘ/dλ of the continued element on the real axis, Θ = arg S(λ).
    pub fn phase_derivative(&self, lambda: f64) -> f64 {
        let j = Complex64::new(lambda - 0.5, 0.0);
        let (a, b, _) = self.phase_coeffs;
        let mut d = 2.0 * a * (j.re - self.shift) + b;
        for z in &self.zeros {
            d += (1.0 / (j - z)).im;
        }
        for p in &self.poles {
            d -= (1.0 / (j - p)).im;
        }
        if self.parity_flip {
            d -= PI;
        }
        d
    }
}

/// Least-squares quadratic a x² + b x + c through (x_k, y_k).
pub(crate) fn fit_quadratic(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len();
    let center = x.iter().sum::<f64>() / n as f64;
    let scale = x
        .iter()
        .map(|v| (v - center).abs())
        .fold(0.0, f64::max)
        .max(1.0);
    let mut a = nalgebra::DMatrix::<f64>::zeros(n, 3);
    let mut rhs = nalgebra::DVector::<f64>::zeros(n);
    for k in 0..n {
        let t = (x[k] - center) / scale;
        a[(k, 0)] = 1.0;
        a[(k, 1)] = t;
        a[(k, 2)] = t * t;
        rhs[k] = y[k];
    }
    let cols = n.min(3);
    let a = a.columns(0, cols).into_owned();
    let sol = a
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .unwrap_or_else(|_| nalgebra::DVector::zeros(cols));
    let g = |i: usize| if i < cols { sol[i] } else { 0.0 };
    let (c0, c1, c2) = (g(0), g(1), g(2));
    // Expand c0 + c1 t + c2 t², t = (x − center)/scale.
    let a2 = c2 / (scale * scale);
    let b1 = c1 / scale - 2.0 * c2 * center / (scale * scale);
    let c = c0 - c1 * center / scale + c2 * center * center / (scale * scale);
    (a2, b1, c)
}

/// Continuous argument along a sequence, nearest-branch continuation.
pub(crate) fn unwrap_args(values: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev = 0.0;
    for (i, v) in values.iter().enumerate() {
        let a = v.arg();
        let u = if i == 0 {
            a
        } else {
            a + (2.0 * PI) * ((prev - a) / (2.0 * PI)).round()
        };
        out.push(u);
        prev = u;
    }
    out
}

struct RationalFit {
    zeros: Vec<Complex64>,
    poles: Vec<Complex64>,
    cancelled: Vec<Complex64>,
    estimate: f64,
}

// Rational interpolant through (x_k, w_k) with roots reported in x.
fn rational_fit(x: &[f64], w: &[Complex64], multi_precision: bool) -> Result<RationalFit> {
    let n_pts = x.len();
    let m = n_pts / 2;
    let n = (n_pts - 1) / 2;
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (lo + hi);
    let half = (0.5 * (hi - lo)).max(1e-300);
    let t: Vec<f64> = x.iter().map(|v| (v - center) / half).collect();

    let (zeros_t, poles_t, estimate) = if multi_precision {
        let (_, _, roots) = mp::null_vector(&t, w, m, n)?;
        (roots[0].clone(), roots[1].clone(), 0.0)
    } else {
        let cols = m + n + 2;
        let mut a = nalgebra::DMatrix::<Complex64>::zeros(n_pts, cols);
        for k in 0..n_pts {
            let mut pw = 1.0;
            for i in 0..=m.max(n) {
                if i <= m {
                    a[(k, i)] = Complex64::new(pw, 0.0);
                }
                if i <= n {
                    a[(k, m + 1 + i)] = -w[k] * pw;
                }
                pw *= t[k];
            }
        }
        let norms: Vec<f64> = (0..cols)
            .map(|j| a.column(j).norm().max(1e-300))
            .collect();
        for (j, nm) in norms.iter().enumerate() {
            a.column_mut(j).unscale_mut(*nm);
        }
        // Square padding so that Q is complete; its last column spans the
        // null space of the scaled system.
        let mut ah = nalgebra::DMatrix::<Complex64>::zeros(cols, cols);
        ah.view_mut((0, 0), (cols, n_pts)).copy_from(&a.adjoint());
        let qr = ah.qr();
        let r = qr.r();
        let q = qr.q();
        let diag: Vec<f64> = (0..n_pts).map(|i| r[(i, i)].norm()).collect();
        let dmax = diag.iter().copied().fold(0.0, f64::max);
        let dmin = diag.iter().copied().fold(f64::INFINITY, f64::min);
        let estimate = if dmin > 0.0 { dmax / dmin } else { f64::INFINITY };
        let v: Vec<Complex64> = (0..cols).map(|j| q[(j, cols - 1)] / norms[j]).collect();
        let p = &v[..=m];
        let qv = &v[m + 1..];
        (poly::roots(p)?, poly::roots(qv)?, estimate)
    };

    // Roots this far out come from negligible leading coefficients; the
    // constant they contribute is absorbed by K_N.
    let finite = |z: &&Complex64| z.norm() < 1e12;
    let to_x = |z: &Complex64| z * half + center;
    let mut zeros: Vec<Complex64> = zeros_t.iter().filter(finite).map(to_x).collect();
    let mut poles: Vec<Complex64> = poles_t.iter().filter(finite).map(to_x).collect();
    let cancelled = cancel_pairs(&mut zeros, &mut poles, half);
    Ok(RationalFit {
        zeros,
        poles,
        cancelled,
        estimate,
    })
}

// Remove pole/zero pairs that coincide to working precision, closest first.
fn cancel_pairs(zeros: &mut Vec<Complex64>, poles: &mut Vec<Complex64>, scale: f64) -> Vec<Complex64> {
    let mut removed = Vec::new();
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, p) in poles.iter().enumerate() {
            for (j, z) in zeros.iter().enumerate() {
                let d = (p - z).norm();
                if best.is_none_or(|b| d < b.2) {
                    best = Some((i, j, d));
                }
            }
        }
        match best {
            Some((i, j, d)) if d <= 1e-7 * (scale + poles[i].norm()) => {
                removed.push(poles[i]);
                poles.remove(i);
                zeros.remove(j);
            }
            _ => return removed,
        }
    }
}

/// Build the approximant of a table following the iterative scheme:
/// optional parity flip and guessed-phase removal, rational interpolation
/// on x = J − sht, removal of strip members |Im J| < dxl, quadratic fit of
/// the remaining phase, subtraction and rebuild, `niter` times.
pub fn build_approximant(
    table: &SMatrixTable,
    parity_flip: bool,
    remove_guessed_phase: bool,
    multi_precision: bool,
) -> Result<PadeModel> {
    table.validate()?;
    let n_pts = table.n_retained();
    if n_pts < 4 {
        return Err(Error::Validation(format!(
            "need at least 4 retained points, got {n_pts}"
        )));
    }
    let js: Vec<f64> = table.retained_j().map(|j| j as f64).collect();
    let x: Vec<f64> = js.iter().map(|j| j - table.sht).collect();
    let s_in: Vec<Complex64> = table
        .retained_j()
        .map(|j| {
            let s = table.s_values[j];
            if parity_flip && j % 2 == 1 {
                -s
            } else {
                s
            }
        })
        .collect();
    let smax = s_in.iter().map(|s| s.norm()).fold(0.0, f64::max);
    if smax == 0.0 {
        return Err(Error::Validation("all retained S-matrix values vanish".into()));
    }

    let mut abc = if remove_guessed_phase {
        fit_quadratic(&x, &unwrap_args(&s_in))
    } else {
        (0.0, 0.0, 0.0)
    };
    let weighted = |abc: (f64, f64, f64)| -> Vec<Complex64> {
        let (a, b, c) = abc;
        s_in.iter()
            .zip(&x)
            .map(|(s, xv)| s * (-I * (a * xv * xv + b * xv + c)).exp())
            .collect()
    };

    let mut iteration = 0;
    let (fit, w) = loop {
        let w = weighted(abc);
        let fit = rational_fit(&x, &w, multi_precision)?;
        if iteration >= table.niter {
            break (fit, w);
        }
        let rem: Vec<Complex64> = w
            .iter()
            .zip(&x)
            .map(|(wk, &xk)| {
                let mut r = *wk;
                for z in fit.zeros.iter().filter(|z| z.im.abs() < table.dxl) {
                    r /= xk - z;
                }
                for p in fit.poles.iter().filter(|p| p.im.abs() < table.dxl) {
                    r *= xk - p;
                }
                r
            })
            .collect();
        let d = fit_quadratic(&x, &unwrap_args(&rem));
        abc = (abc.0 + d.0, abc.1 + d.1, abc.2 + d.2);
        iteration += 1;
    };

    let mut model = PadeModel {
        k_norm: Complex64::new(1.0, 0.0),
        phase_coeffs: abc,
        zeros: fit.zeros.iter().map(|z| z + table.sht).collect(),
        poles: fit.poles.iter().map(|p| p + table.sht).collect(),
        shift: table.sht,
        source_energy: table.energy,
        n_points: n_pts,
        parity_flip,
        j_range: (js[0], js[n_pts - 1]),
        nread: table.nread,
        cancelled: fit.cancelled.iter().map(|p| p + table.sht).collect(),
    };
    let r0 = model.rational(Complex64::new(js[0], 0.0));
    if !(r0.norm() > 0.0 && r0.norm().is_finite()) {
        return Err(Error::Conditioning {
            estimate: fit.estimate,
        });
    }
    model.k_norm = w[0] / r0;

    let worst = js
        .iter()
        .zip(&s_in)
        .map(|(&j, s)| (model.evaluate_unchecked(Complex64::new(j, 0.0)) - s).norm())
        .fold(0.0, f64::max);
    if !(worst <= 1e-6 * smax) {
        log::warn!(
            "interpolation residual {:.3e} at E = {} meV",
            worst / smax,
            table.energy
        );
        return Err(Error::Conditioning {
            estimate: fit.estimate,
        });
    }
    if !model.cancelled.is_empty() {
        log::info!(
            "E = {} meV: {} coincident pole/zero pair(s) cancelled",
            table.energy,
            model.cancelled.len()
        );
    }
    Ok(model)
}

/// Modulus and continuously unwrapped phase of the continued S(λ) on the
/// real axis. The branch is fixed at λ₀ = first retained J + ½.
pub fn s_phase_and_modulus(model: &PadeModel, lambda: f64) -> Result<(f64, f64)> {
    let v = phase_on_grid(model, &[lambda])?;
    Ok(v[0])
}

/// (Θ, |S|) along an ascending real λ grid.
pub fn phase_on_grid(model: &PadeModel, lambdas: &[f64]) -> Result<Vec<(f64, f64)>> {
    if lambdas.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Validation("lambda grid must be ascending".into()));
    }
    let eval = |l: f64| -> Result<Complex64> {
        let j = Complex64::new(l - 0.5, 0.0);
        let d = model.pole_distance(j);
        if d < 1e-8 {
            return Err(Error::Singularity {
                at: l - 0.5,
                message: "pole on the real axis".into(),
            });
        }
        let s = model.physical(j);
        if s.norm() == 0.0 || !s.norm().is_finite() {
            return Err(Error::Singularity {
                at: l - 0.5,
                message: "zero of S on the real axis".into(),
            });
        }
        Ok(s)
    };
    let l0 = model.j_range.0 + 0.5;
    let mut cur_l = l0;
    let mut cur_s = eval(l0)?;
    let mut theta = cur_s.arg();
    let mut out = Vec::with_capacity(lambdas.len());
    for &target in lambdas {
        while cur_l != target {
            let dir = if target > cur_l { 1.0 } else { -1.0 };
            let mut h = (target - cur_l).abs().min(0.05);
            loop {
                let next_l = if h >= (target - cur_l).abs() {
                    target
                } else {
                    cur_l + dir * h
                };
                let next_s = eval(next_l)?;
                let step = (next_s / cur_s).arg();
                if step.abs() < 0.5 * PI {
                    theta += step;
                    cur_l = next_l;
                    cur_s = next_s;
                    break;
                }
                h *= 0.5;
                if h < 1e-12 {
                    return Err(Error::Singularity {
                        at: cur_l - 0.5,
                        message: "phase jumps by more than pi/2 on an unresolvable step".into(),
                    });
                }
            }
        }
        out.push((theta, cur_s.norm()));
    }
    Ok(out)
}

//! Polynomial roots in double precision.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Length after dropping leading coefficients that are negligible on the
/// unit disk.
pub(crate) fn effective_len(mags: &[f64]) -> usize {
    let max = mags.iter().copied().fold(0.0, f64::max);
    let mut end = mags.len();
    while end > 1 && mags[end - 1] <= 1e-15 * max {
        end -= 1;
    }
    end
}

pub(crate) fn trim(coeffs: &[Complex64]) -> &[Complex64] {
    let mags: Vec<f64> = coeffs.iter().map(|c| c.norm()).collect();
    &coeffs[..effective_len(&mags)]
}

/// Roots of Σ c_i z^i as eigenvalues of the companion matrix, each
/// polished by a few Newton steps.
pub(crate) fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let c = trim(coeffs);
    let degree = c.len() - 1;
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = c[degree];
    let mut m = DMatrix::<Complex64>::zeros(degree, degree);
    for j in 0..degree {
        m[(0, j)] = -c[degree - 1 - j] / lead;
    }
    for i in 1..degree {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-15, 10_000)
        .ok_or(Error::RootFinding { degree })?;
    let eig = schur.eigenvalues().ok_or(Error::RootFinding { degree })?;
    let mut out: Vec<Complex64> = eig.iter().copied().collect();
    if out.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::RootFinding { degree });
    }
    for z in out.iter_mut() {
        *z = polish(c, *z);
    }
    Ok(out)
}

fn polish(c: &[Complex64], mut z: Complex64) -> Complex64 {
    let (mut p, _) = horner(c, z);
    for _ in 0..8 {
        let (_, dp) = horner(c, z);
        if dp.norm() == 0.0 {
            break;
        }
        let cand = z - p / dp;
        let (pc, _) = horner(c, cand);
        if !(pc.norm() < p.norm()) {
            break;
        }
        z = cand;
        p = pc;
    }
    z
}

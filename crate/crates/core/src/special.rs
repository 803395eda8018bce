//! Legendre polynomials and Riccati–Bessel functions of integer order.

use crate::error::{Error, Result};

/// P_l(x) by the upward three-term recurrence.
pub fn legendre(l: usize, x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0 + 1e-14) {
        return Err(Error::Domain(format!("legendre argument {x} outside [-1, 1]")));
    }
    Ok(legendre_unchecked(l, x.clamp(-1.0, 1.0)))
}

pub(crate) fn legendre_unchecked(l: usize, x: f64) -> f64 {
    let mut p0 = 1.0;
    if l == 0 {
        return p0;
    }
    let mut p1 = x;
    for n in 1..l {
        let nf = n as f64;
        let p2 = ((2.0 * nf + 1.0) * x * p1 - nf * p0) / (nf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// P_0(x) .. P_lmax(x) in one sweep.
pub fn legendre_table(lmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(1.0);
    if lmax == 0 {
        return out;
    }
    out.push(x);
    for n in 1..lmax {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0) * x * out[n] - nf * out[n - 1]) / (nf + 1.0);
        out.push(next);
    }
    out
}

/// Riccati–Bessel functions and their derivatives for orders 0..=lmax.
#[derive(Debug, Clone)]
pub struct RiccatiBessel {
    /// ĵ_l(x) = x j_l(x)
    pub j: Vec<f64>,
    pub dj: Vec<f64>,
    /// ŷ_l(x) = x y_l(x), with ŷ_0 = −cos x
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
}

impl RiccatiBessel {
    pub fn new(lmax: usize, x: f64) -> Self {
        assert!(x > 0.0, "Riccati-Bessel argument must be positive");
        let (s, c) = x.sin_cos();

        let mut y = Vec::with_capacity(lmax + 1);
        y.push(-c);
        if lmax >= 1 {
            y.push(-c / x - s);
        }
        for l in 1..lmax {
            let next = (2 * l + 1) as f64 / x * y[l] - y[l - 1];
            y.push(next);
        }

        // Miller's downward recurrence, normalised to ĵ_0 or ĵ_1.
        let start = lmax + x as usize + 40 + (10.0 * (lmax as f64 + 1.0).sqrt()) as usize;
        let mut j = vec![0.0; lmax + 1];
        let (mut hi, mut cur) = (0.0_f64, 1e-300_f64);
        let mut j0_raw = 0.0;
        let mut j1_raw = 0.0;
        for l in (1..=start).rev() {
            let lower = (2 * l + 1) as f64 / x * cur - hi;
            hi = cur;
            cur = lower;
            if l - 1 <= lmax {
                j[l - 1] = cur;
            }
            if l <= lmax {
                j[l] = hi;
            }
            if l == 1 {
                j0_raw = cur;
                j1_raw = hi;
            }
            if cur.abs() > 1e250 {
                hi *= 1e-250;
                cur *= 1e-250;
                for v in j.iter_mut() {
                    *v *= 1e-250;
                }
            }
        }
        let j1_exact = s / x - c;
        let scale = if s.abs() >= j1_exact.abs() {
            s / j0_raw
        } else {
            j1_exact / j1_raw
        };
        for v in j.iter_mut() {
            *v *= scale;
        }

        let deriv = |f: &[f64], f0_prime: f64| {
            let mut d = Vec::with_capacity(f.len());
            d.push(f0_prime);
            for l in 1..f.len() {
                d.push(f[l - 1] - l as f64 / x * f[l]);
            }
            d
        };
        let dj = deriv(&j, c);
        let dy = deriv(&y, s);
        RiccatiBessel { j, dj, y, dy }
    }
}

//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use regge_core::io_model::{
    generate_hard_sphere_tables_with, HardSphereParams, ReconstructionParams, SMatrixTable,
};

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// ħ²/(Da·Å²) in meV·Å², from SI constants.
pub fn hbar2_over_da_a2() -> f64 {
    let hbar = 1.054_571_817e-34;
    let da = 1.660_539_066_60e-27;
    let mev = 1.602_176_634e-22;
    hbar * hbar / (da * 1e-20) / mev
}

pub fn example1() -> HardSphereParams {
    HardSphereParams {
        r: 2.045,
        d: 0.592,
        v: 165.0,
        omega: 1.023,
        mu: 1.0,
        delta_j: 5.0,
    }
}

pub fn example2() -> HardSphereParams {
    HardSphereParams {
        omega: 66.463,
        ..example1()
    }
}

/// Table with 30 partial waves of which the first 15 are used.
pub fn table(params: &HardSphereParams, energy: f64) -> SMatrixTable {
    let recon = ReconstructionParams {
        jfin: Some(15),
        ..ReconstructionParams::default()
    };
    generate_hard_sphere_tables_with(params, &[energy], 29, &recon)
        .unwrap()
        .remove(0)
}

/// Riccati–Hankel functions ĥ±_l(x) and their x-derivatives from the
/// large-argument series, valid for complex l and x ≫ |l|².
pub fn hankel_asymptotic(l: Complex64, x: f64, outgoing: bool) -> (Complex64, Complex64) {
    let s = if outgoing { I } else { -I };
    let lam = l * (l + 1.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut h = term;
    let mut dh = s * term;
    for n in 1..200 {
        let nf = n as f64;
        term *= (lam - nf * (nf - 1.0)) / nf * s / (2.0 * x);
        h += term;
        dh += (s - nf / x) * term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    let ph = (s * (x - l * std::f64::consts::FRAC_PI_2)).exp();
    (ph * h, ph * dh)
}

/// RK4 for u'' = q(r) u from r0 to r1 with (u, u') given at r0.
pub fn rk4<Q: Fn(f64) -> Complex64>(
    q: Q,
    r0: f64,
    r1: f64,
    mut u: Complex64,
    mut du: Complex64,
    steps: usize,
) -> (Complex64, Complex64) {
    let h = (r1 - r0) / steps as f64;
    let mut r = r0;
    for _ in 0..steps {
        let f = |r: f64, u: Complex64, du: Complex64| (du, q(r) * u);
        let (k1u, k1d) = f(r, u, du);
        let (k2u, k2d) = f(r + h / 2.0, u + k1u * (h / 2.0), du + k1d * (h / 2.0));
        let (k3u, k3d) = f(r + h / 2.0, u + k2u * (h / 2.0), du + k2d * (h / 2.0));
        let (k4u, k4d) = f(r + h, u + k3u * h, du + k3d * h);
        u += (k1u + 2.0 * k2u + 2.0 * k3u + k4u) * (h / 6.0);
        du += (k1d + 2.0 * k2d + 2.0 * k3d + k4d) * (h / 6.0);
        r += h;
    }
    (u, du)
}

/// Radial-equation model of the hard-sphere system at complex J.
pub struct RadialOracle {
    pub p: HardSphereParams,
    pub energy: f64,
}

impl RadialOracle {
    fn k2(&self) -> f64 {
        2.0 * self.p.mu * self.energy / hbar2_over_da_a2()
    }

    /// Free wave ĥ±(kr) and d/dr at r = R, integrated inward from far out.
    fn free_at_r(&self, l: Complex64, outgoing: bool) -> (Complex64, Complex64) {
        let k = self.k2().sqrt();
        let far = 80.0;
        let (h, dh) = hankel_asymptotic(l, k * far, outgoing);
        let lam = l * (l + 1.0);
        let k2 = self.k2();
        rk4(|r| lam / (r * r) - k2, far, self.p.r, h, dh * k, 40_000)
    }

    /// Interior solution with u(R−d) = 0, and u'(R) + g u(R).
    fn interior(&self, l: Complex64) -> (Complex64, Complex64) {
        let kk2 = 2.0 * self.p.mu * (self.energy + self.p.v) / hbar2_over_da_a2();
        let g = 2.0 * self.p.mu * self.p.omega / hbar2_over_da_a2();
        let lam = l * (l + 1.0);
        let a = self.p.r - self.p.d;
        let (u, du) = rk4(
            |r| lam / (r * r) - kk2,
            a,
            self.p.r,
            c(0.0, 0.0),
            c(1.0, 0.0),
            4_000,
        );
        (u, du + g * u)
    }

    pub fn s_matrix(&self, l: Complex64) -> Complex64 {
        let (u, lhs) = self.interior(l);
        let (hp, dhp) = self.free_at_r(l, true);
        let (hm, dhm) = self.free_at_r(l, false);
        (lhs * hm - u * dhm) / (lhs * hp - u * dhp)
    }

    pub fn denominator(&self, l: Complex64) -> Complex64 {
        let (u, lhs) = self.interior(l);
        let (hp, dhp) = self.free_at_r(l, true);
        lhs * hp - u * dhp
    }

    /// Zero of the matching denominator near `seed` (secant iteration).
    pub fn pole_near(&self, seed: Complex64) -> Option<Complex64> {
        let mut x0 = seed;
        let mut x1 = seed + c(1e-3, 1e-3);
        let mut f0 = self.denominator(x0);
        for _ in 0..60 {
            let f1 = self.denominator(x1);
            let dx = f1 * (x1 - x0) / (f1 - f0);
            x0 = x1;
            f0 = f1;
            x1 -= dx;
            if dx.norm() < 1e-11 {
                return Some(x1);
            }
        }
        None
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite fixed-order Gauss–Legendre rule on `panels` equal panels.
pub fn composite_gl<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    order: usize,
    panels: usize,
) -> Complex64 {
    let rule = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for &(x, w) in &rule {
            sum += f(mid + 0.5 * h * x) * (0.5 * h * w);
        }
    }
    sum
}

/// Legendre polynomial from the explicit finite sum, for modest l.
pub fn legendre_explicit(l: usize, x: f64) -> f64 {
    // P_l(x) = 2^{-l} Σ_k (-1)^k C(l,k) C(2l-2k, l) x^{l-2k}
    let binom = |n: usize, k: usize| -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    };
    let mut s = 0.0;
    for k in 0..=l / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * binom(l, k) * binom(2 * l - 2 * k, l) * x.powi((l - 2 * k) as i32);
    }
    s / 2f64.powi(l as i32)
}

/// Partial-wave amplitude summed directly.
pub fn pws_direct(s: &[Complex64], theta: f64, k: f64) -> Complex64 {
    let x = (std::f64::consts::PI - theta).cos();
    let sum: Complex64 = s
        .iter()
        .enumerate()
        .map(|(j, sj)| sj * ((j as f64 + 0.5) * legendre_explicit(j, x)))
        .sum();
    sum / (I * k)
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

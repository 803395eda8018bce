//! Adaptive Gauss–Kronrod quadrature of complex integrands with Wynn
//! epsilon extrapolation of the sequence of partial results.

use num_complex::Complex64;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub epsabs: f64,
    pub epsrel: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            epsabs: 1e-8,
            epsrel: 1e-8,
            max_intervals: 2000,
        }
    }
}

/// One 21-point Kronrod rule with its embedded 10-point Gauss estimate.
pub fn gk21<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for i in 0..10 {
        let dx = half * XGK[i];
        let s = f(center - dx) + f(center + dx);
        kronrod += s * WGK[i];
        if i % 2 == 1 {
            gauss += s * WG[i / 2];
        }
    }
    let k = kronrod * half;
    let g = gauss * half;
    (k, (k - g).norm())
}

#[derive(Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

/// Wynn's epsilon algorithm on a complex sequence; returns the newest
/// extrapolated value and a crude error estimate.
pub fn wynn_epsilon(seq: &[Complex64]) -> Option<(Complex64, f64)> {
    let n = seq.len();
    if n < 3 {
        return None;
    }
    let mut prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut cur: Vec<Complex64> = seq.to_vec();
    let mut best: Option<(Complex64, f64)> = None;
    let mut order = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d.norm() == 0.0 {
                return best.or(Some((cur[i + 1], 0.0)));
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        order += 1;
        prev = cur;
        cur = next;
        if order % 2 == 0 && cur.len() >= 2 {
            let last = cur[cur.len() - 1];
            let err = (last - cur[cur.len() - 2]).norm();
            if best.is_none_or(|b| err < b.1) {
                best = Some((last, err));
            }
        }
    }
    best
}

/// Integrate f over [a, b] by globally adaptive bisection of the interval
/// with the largest error estimate, stopping when the total estimate
/// meets max(epsabs, epsrel·|I|).
pub fn integrate<F: FnMut(f64) -> Complex64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> QuadResult {
    integrate_points(f, &[a, b], opts)
}

/// As [`integrate`] over [points[0], points[last]], starting from the
/// partition given by the ascending breakpoints.
pub fn integrate_points<F: FnMut(f64) -> Complex64>(
    mut f: F,
    points: &[f64],
    opts: &QuadOptions,
) -> QuadResult {
    let mut pieces = Vec::with_capacity(points.len());
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk21(&mut f, w[0], w[1]);
            pieces.push(Piece { a: w[0], b: w[1], value: v, error: e });
        }
    }
    if pieces.is_empty() {
        return QuadResult {
            value: Complex64::new(0.0, 0.0),
            abs_error: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    let mut evaluations = 21 * pieces.len();
    let mut history: Vec<Complex64> = vec![pieces.iter().map(|p| p.value).sum()];
    loop {
        let total: Complex64 = pieces.iter().map(|p| p.value).sum();
        let err: f64 = pieces.iter().map(|p| p.error).sum();
        let tol = opts.epsabs.max(opts.epsrel * total.norm());
        if err <= tol {
            return QuadResult {
                value: total,
                abs_error: err,
                evaluations,
                converged: true,
            };
        }
        if let Some((ext, ext_err)) = wynn_epsilon(&history) {
            if history.len() > 10 && ext_err <= tol && ext_err < err {
                return QuadResult {
                    value: ext,
                    abs_error: ext_err,
                    evaluations,
                    converged: true,
                };
            }
        }
        if pieces.len() >= opts.max_intervals {
            return QuadResult {
                value: total,
                abs_error: err,
                evaluations,
                converged: false,
            };
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let worst = pieces.swap_remove(idx);
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return QuadResult {
                value: total,
                abs_error: err,
                evaluations,
                converged: false,
            };
        }
        let (v1, e1) = gk21(&mut f, worst.a, mid);
        let (v2, e2) = gk21(&mut f, mid, worst.b);
        evaluations += 42;
        pieces.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        pieces.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
        history.push(pieces.iter().map(|p| p.value).sum());
        if history.len() > 50 {
            history.remove(0);
        }
    }
}

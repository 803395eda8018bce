//! Software multi-precision path for ill-conditioned interpolation systems.

use astro_float::{BigFloat, RoundingMode};
use num_complex::Complex64;

use super::poly;
use crate::error::{Error, Result};

const PREC: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Clone, Debug)]
struct Mp {
    re: BigFloat,
    im: BigFloat,
}

fn big(x: f64) -> BigFloat {
    BigFloat::from_f64(x, PREC)
}

fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, exp, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let top = *words.last().unwrap_or(&0) as f64;
    let next = if words.len() > 1 {
        words[words.len() - 2] as f64
    } else {
        0.0
    };
    let two64 = 18_446_744_073_709_551_616.0_f64;
    let mant = (top + next / two64) / two64;
    let mag = mant * 2f64.powi(exp);
    if sign.is_negative() {
        -mag
    } else {
        mag
    }
}

impl Mp {
    fn zero() -> Self {
        Mp {
            re: big(0.0),
            im: big(0.0),
        }
    }
    fn from_c(z: Complex64) -> Self {
        Mp {
            re: big(z.re),
            im: big(z.im),
        }
    }
    fn to_c(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }
    fn add(&self, o: &Mp) -> Mp {
        Mp {
            re: self.re.add(&o.re, PREC, RM),
            im: self.im.add(&o.im, PREC, RM),
        }
    }
    fn sub(&self, o: &Mp) -> Mp {
        Mp {
            re: self.re.sub(&o.re, PREC, RM),
            im: self.im.sub(&o.im, PREC, RM),
        }
    }
    fn mul(&self, o: &Mp) -> Mp {
        let rr = self.re.mul(&o.re, PREC, RM);
        let ii = self.im.mul(&o.im, PREC, RM);
        let ri = self.re.mul(&o.im, PREC, RM);
        let ir = self.im.mul(&o.re, PREC, RM);
        Mp {
            re: rr.sub(&ii, PREC, RM),
            im: ri.add(&ir, PREC, RM),
        }
    }
    fn norm_sqr(&self) -> BigFloat {
        let a = self.re.mul(&self.re, PREC, RM);
        let b = self.im.mul(&self.im, PREC, RM);
        a.add(&b, PREC, RM)
    }
    fn div(&self, o: &Mp) -> Mp {
        let d = o.norm_sqr();
        let conj = Mp {
            re: o.re.clone(),
            im: o.im.neg(),
        };
        let n = self.mul(&conj);
        Mp {
            re: n.re.div(&d, PREC, RM),
            im: n.im.div(&d, PREC, RM),
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn magnitude_f64(&self) -> f64 {
        self.to_c().norm()
    }
}

fn horner(c: &[Mp], z: &Mp) -> (Mp, Mp) {
    let mut p = Mp::zero();
    let mut dp = Mp::zero();
    for ci in c.iter().rev() {
        dp = dp.mul(z).add(&p);
        p = p.mul(z).add(ci);
    }
    (p, dp)
}

// p and q coefficients, then [roots of p, roots of q].
type NullVector = (Vec<Complex64>, Vec<Complex64>, Vec<Vec<Complex64>>);

/// Null vector of the N×(N+1) system [t^i | −w t^i] by Gaussian
/// elimination with complete pivoting.
pub(crate) fn null_vector(
    t: &[f64],
    w: &[Complex64],
    m: usize,
    n: usize,
) -> Result<NullVector> {
    let rows = t.len();
    let cols = m + n + 2;
    let mut a: Vec<Vec<Mp>> = Vec::with_capacity(rows);
    for (k, &tk) in t.iter().enumerate() {
        let tt = Mp::from_c(Complex64::new(tk, 0.0));
        let wk = Mp::from_c(-w[k]);
        let mut row = Vec::with_capacity(cols);
        let mut pw = Mp::from_c(Complex64::new(1.0, 0.0));
        let mut powers = Vec::with_capacity(m.max(n) + 1);
        for _ in 0..=m.max(n) {
            powers.push(pw.clone());
            pw = pw.mul(&tt);
        }
        for pwr in powers.iter().take(m + 1) {
            row.push(pwr.clone());
        }
        for pwr in powers.iter().take(n + 1) {
            row.push(pwr.mul(&wk));
        }
        a.push(row);
    }

    let mut perm: Vec<usize> = (0..cols).collect();
    let mut first_pivot = 0.0_f64;
    let mut last_pivot = 0.0_f64;
    for r in 0..rows {
        let (mut bi, mut bj, mut best) = (r, r, -1.0_f64);
        for (i, row) in a.iter().enumerate().skip(r) {
            for (j, v) in row.iter().enumerate().skip(r) {
                let mag = v.magnitude_f64();
                if mag > best {
                    best = mag;
                    bi = i;
                    bj = j;
                }
            }
        }
        if r == 0 {
            first_pivot = best;
        }
        last_pivot = best;
        if best == 0.0 || a[bi][bj].is_zero() {
            return Err(Error::Conditioning { estimate: f64::INFINITY });
        }
        a.swap(r, bi);
        for row in a.iter_mut() {
            row.swap(r, bj);
        }
        perm.swap(r, bj);
        let pivot = a[r][r].clone();
        for i in (r + 1)..rows {
            if a[i][r].is_zero() {
                continue;
            }
            let f = a[i][r].div(&pivot);
            let (upper, lower) = a.split_at_mut(i);
            for (x, y) in lower[0][r..cols].iter_mut().zip(&upper[r][r..cols]) {
                *x = x.sub(&y.mul(&f));
            }
        }
    }
    log::debug!(
        "multi-precision elimination pivot ratio {:.3e}",
        last_pivot / first_pivot
    );

    // Free variables (columns rows..cols) fixed to 1 then back-substitute.
    let mut x = vec![Mp::zero(); cols];
    for v in x.iter_mut().skip(rows) {
        *v = Mp::from_c(Complex64::new(1.0, 0.0));
    }
    for r in (0..rows).rev() {
        let mut acc = Mp::zero();
        for j in (r + 1)..cols {
            acc = acc.add(&a[r][j].mul(&x[j]));
        }
        x[r] = Mp::zero().sub(&acc).div(&a[r][r]);
    }
    let mut v = vec![Mp::zero(); cols];
    for (i, &p) in perm.iter().enumerate() {
        v[p] = x[i].clone();
    }
    let p_mp: Vec<Mp> = v[..=m].to_vec();
    let q_mp: Vec<Mp> = v[m + 1..].to_vec();
    let p = p_mp.iter().map(Mp::to_c).collect();
    let q = q_mp.iter().map(Mp::to_c).collect();
    let roots = vec![refine_roots(&p_mp)?, refine_roots(&q_mp)?];
    Ok((p, q, roots))
}

/// Roots of an MP polynomial: double-precision companion seeds refined by
/// Aberth iterations at full precision.
fn refine_roots(c_mp: &[Mp]) -> Result<Vec<Complex64>> {
    let mags: Vec<f64> = c_mp.iter().map(Mp::magnitude_f64).collect();
    let end = poly::effective_len(&mags);
    let c = &c_mp[..end];
    let degree = c.len() - 1;
    if degree == 0 {
        return Ok(Vec::new());
    }
    let seeds = poly::roots(&c.iter().map(Mp::to_c).collect::<Vec<_>>())?;
    let mut z: Vec<Mp> = seeds.iter().map(|&s| Mp::from_c(s)).collect();
    let one = Mp::from_c(Complex64::new(1.0, 0.0));
    for _ in 0..100 {
        let mut max_rel = 0.0_f64;
        for i in 0..degree {
            let (p, dp) = horner(c, &z[i]);
            if p.is_zero() {
                continue;
            }
            let ratio = p.div(&dp);
            let mut s = Mp::zero();
            for j in 0..degree {
                if j != i {
                    s = s.add(&one.div(&z[i].sub(&z[j])));
                }
            }
            let step = ratio.div(&one.sub(&ratio.mul(&s)));
            let rel = step.magnitude_f64() / z[i].magnitude_f64().max(1e-300);
            max_rel = max_rel.max(rel);
            z[i] = z[i].sub(&step);
        }
        if max_rel < 1e-40 {
            return Ok(z.iter().map(Mp::to_c).collect());
        }
    }
    let out: Vec<Complex64> = z.iter().map(Mp::to_c).collect();
    if out.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(out)
    } else {
        Err(Error::RootFinding { degree })
    }
}

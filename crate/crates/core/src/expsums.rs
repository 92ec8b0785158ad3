//! Complete sums, Weyl sums, oscillatory integrals, arc dissection and moment counts.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{budget, Error, Result};
use crate::polyring::IntPoly;
use crate::regularity::thresholds;

/// `e(x) = exp(2 pi i x)`.
pub fn e(x: f64) -> Complex64 {
    let t = 2.0 * PI * x;
    Complex64::new(t.cos(), t.sin())
}

/// Compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl KahanSum {
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.sum.re, &mut self.comp.re, z.re);
        neumaier(&mut self.sum.im, &mut self.comp.im, z.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<Complex64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut k = KahanSum::default();
        for z in iter {
            k.add(z);
        }
        k
    }
}

pub(crate) fn eval_mod(coeffs: &[u64], x: u64, m: u64) -> u64 {
    let x = (x % m) as u128;
    let m128 = m as u128;
    coeffs.iter().rev().fold(0u128, |acc, &c| (acc * x + c as u128) % m128) as u64
}

const PAR_CHUNK: u64 = 1 << 15;

fn sum_over(n: u64, term: impl Fn(u64) -> Complex64 + Sync) -> Complex64 {
    if n <= 2 * PAR_CHUNK {
        return (1..=n).map(&term).collect::<KahanSum>().value();
    }
    let chunks = n.div_ceil(PAR_CHUNK);
    let parts: Vec<Complex64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * PAR_CHUNK + 1;
            let hi = ((c + 1) * PAR_CHUNK).min(n);
            (lo..=hi).map(&term).collect::<KahanSum>().value()
        })
        .collect();
    parts.into_iter().collect::<KahanSum>().value()
}

/// `S(q, a) = sum_{x=1..q} e(a f(x) / q)` with the phase reduced exactly modulo `q`.
pub fn complete_sum(f: &IntPoly, q: u64, a: &BigInt) -> Result<Complex64> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    let coeffs = f.scale(a).reduce_mod_u64(q);
    let qf = q as f64;
    Ok(sum_over(q, |x| e(eval_mod(&coeffs, x, q) as f64 / qf)))
}

/// `sum_{x=1..n} e(a f(x) / q)` with exact reduction modulo `q`.
pub fn weyl_sum_rational(f: &IntPoly, a: &BigInt, q: u64, n: u64) -> Result<Complex64> {
    if q == 0 {
        return Err(Error::InvalidInput("denominator must be positive".into()));
    }
    let coeffs = f.scale(a).reduce_mod_u64(q);
    let qf = q as f64;
    Ok(sum_over(n, |x| e(eval_mod(&coeffs, x, q) as f64 / qf)))
}

/// A double `alpha = mant * 2^-k` kept in exact form so that `alpha * n mod 1` can be
/// reduced without rounding for large integers `n`.
#[derive(Clone, Copy, Debug)]
struct ExactPhase {
    mant: i128,
    k: u32,
}

impl ExactPhase {
    fn new(alpha: f64) -> Option<Self> {
        if !alpha.is_finite() {
            return None;
        }
        if alpha == 0.0 {
            return Some(ExactPhase { mant: 0, k: 0 });
        }
        let bits = alpha.to_bits();
        let sign: i128 = if bits >> 63 == 0 { 1 } else { -1 };
        let exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        let (mut mant, mut e2) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        while mant & 1 == 0 && e2 < 0 {
            mant >>= 1;
            e2 += 1;
        }
        if e2 >= 0 {
            return Some(ExactPhase { mant: 0, k: 0 });
        }
        Some(ExactPhase { mant: sign * mant as i128, k: (-e2) as u32 })
    }

    /// `frac(alpha * n)` where `n_wrapped = n mod 2^128`.
    fn frac(&self, n_wrapped: u128) -> f64 {
        if self.k == 0 {
            return 0.0;
        }
        let prod = (self.mant as u128).wrapping_mul(n_wrapped);
        let mask = (1u128 << self.k) - 1;
        let r = prod & mask;
        r as f64 * 2f64.powi(-(self.k as i32))
    }
}

fn wrapping_coeffs(f: &IntPoly) -> Vec<u128> {
    let m = BigInt::from(1u8) << 128;
    f.coeffs()
        .iter()
        .map(|c| c.mod_floor(&m).to_u128().unwrap())
        .collect()
}

fn eval_wrapping(coeffs: &[u128], x: u64) -> u128 {
    coeffs
        .iter()
        .rev()
        .fold(0u128, |acc, &c| acc.wrapping_mul(x as u128).wrapping_add(c))
}

/// `f(alpha) = sum_{x=1..n} e(alpha f(x))`, with `alpha f(x) mod 1` computed exactly from
/// the binary expansion of `alpha`.
pub fn weyl_sum(f: &IntPoly, alpha: f64, n: u64) -> Result<Complex64> {
    let ph = ExactPhase::new(alpha).ok_or_else(|| Error::InvalidInput("alpha must be finite".into()))?;
    if ph.k < 128 {
        let coeffs = wrapping_coeffs(f);
        return Ok(sum_over(n, |x| e(ph.frac(eval_wrapping(&coeffs, x)))));
    }
    // tiny alpha: exact rational reduction with a large power of two
    let q = BigInt::from(1u8) << ph.k;
    let a = BigInt::from(ph.mant);
    Ok(sum_over(n, |x| {
        let r = (&a * f.eval(&BigInt::from(x))).mod_floor(&q);
        let top = (&r >> (ph.k - 60)).to_f64().unwrap();
        e(top * 2f64.powi(-60))
    }))
}

/// `I(beta) = int_0^N e(beta t) dt`.
pub fn osc_integral(beta: f64, n: f64) -> Complex64 {
    if beta == 0.0 {
        return Complex64::new(n, 0.0);
    }
    // (e(beta N) - 1) / (2 pi i beta) = e(beta N / 2) sin(pi beta N) / (pi beta)
    e(beta * n / 2.0) * ((PI * beta * n).sin() / (PI * beta))
}

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gauss_legendre(coeffs: &[f64], beta: f64, z: f64, panels: u64) -> Complex64 {
    let h = z / panels as f64;
    let eval = |t: f64| coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c);
    sum_over(panels, |i| {
        let mid = (i as f64 - 0.5) * h;
        let mut acc = Complex64::zero();
        for (node, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            for s in [-1.0, 1.0] {
                acc += e(beta * eval(mid + s * node * h / 2.0)) * w;
            }
        }
        acc * (h / 2.0)
    })
}

/// Largest panel count used before giving up on refinement.
pub const QUADRATURE_PANEL_LIMIT: u64 = 1 << 26;

/// `(N / Z) int_0^Z e(beta P(z)) dz` by composite Gauss-Legendre quadrature, with the
/// per-panel phase change below 0.1 radians and agreement with a half-step refinement
/// to `1e-6` relative.
pub fn osc_integral_poly(pd: &IntPoly, beta: f64, n: f64, z: f64) -> Result<Complex64> {
    if !(z > 0.0) || !(n > 0.0) {
        return Err(Error::InvalidInput("N and Z must be positive".into()));
    }
    if beta == 0.0 {
        return Ok(Complex64::new(n, 0.0));
    }
    let coeffs: Vec<f64> = pd.coeffs().iter().map(|c| c.to_f64().unwrap()).collect();
    let slope: f64 = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.abs() * i as f64 * z.powi(i as i32 - 1))
        .sum();
    let mut panels = ((2.0 * PI * beta.abs() * slope * z / 0.1).ceil() as u64).max(16);
    loop {
        if panels > QUADRATURE_PANEL_LIMIT {
            return Err(Error::Quadrature(format!(
                "refinement did not converge within {QUADRATURE_PANEL_LIMIT} panels"
            )));
        }
        let coarse = gauss_legendre(&coeffs, beta, z, panels);
        let fine = gauss_legendre(&coeffs, beta, z, 2 * panels);
        let scale = fine.norm().max(1e-300);
        if (fine - coarse).norm() <= 1e-6 * scale || (fine - coarse).norm() <= 1e-12 * z {
            return Ok(fine * (n / z));
        }
        panels *= 2;
    }
}

/// Major arcs `|alpha - a/q| <= Q/N`, `q <= Q`, with `Q = X^tau`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcDissection {
    pub x: f64,
    pub n: f64,
    pub tau: f64,
    pub q: f64,
}

impl ArcDissection {
    pub const DESK_TAU: f64 = 0.2;
    pub const ASYMPTOTIC_TAU: f64 = 0.01;

    pub fn new(x: f64, n: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau < 0.5) {
            return Err(Error::InvalidInput("tau must lie in (0, 1/2)".into()));
        }
        if !(x >= 1.0 && n > 0.0) {
            return Err(Error::InvalidInput("X must be >= 1 and N positive".into()));
        }
        Ok(ArcDissection { x, n, tau, q: x.powf(tau) })
    }

    /// Dissection with an explicit `Q`, bypassing `X^tau`.
    pub fn with_q(n: f64, q: f64) -> Self {
        ArcDissection { x: f64::NAN, n, tau: f64::NAN, q }
    }

    pub fn desk(x: f64, n: f64) -> Result<Self> {
        Self::new(x, n, Self::DESK_TAU)
    }

    pub fn radius(&self) -> f64 {
        self.q / self.n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arc {
    Major { q: u64, a: u64 },
    Minor,
}

/// Torus distance `||x||`.
pub fn torus_dist(x: f64) -> f64 {
    let f = x - x.floor();
    f.min(1.0 - f)
}

/// Major arc containing `alpha` (least `q`, then least `a`), or `Minor`.
pub fn classify_arc(alpha: f64, d: &ArcDissection) -> Arc {
    let alpha = alpha - alpha.floor();
    let r = d.radius();
    let qmax = d.q.floor().max(0.0) as u64;
    for q in 1..=qmax {
        let lo = ((alpha - r) * q as f64).floor() as i64;
        let hi = ((alpha + r) * q as f64).ceil() as i64;
        let mut best: Option<u64> = None;
        for a in lo..=hi {
            if (alpha - a as f64 / q as f64).abs() <= r {
                let ar = a.rem_euclid(q as i64) as u64;
                if ar.gcd(&q) == 1 || (q == 1) {
                    best = Some(best.map_or(ar, |b: u64| b.min(ar)));
                }
            }
        }
        if let Some(a) = best {
            return Arc::Major { q, a };
        }
    }
    Arc::Minor
}

/// Largest number of intermediate entries kept by the moment counter.
pub const MOMENT_ENTRY_LIMIT: u64 = 40_000_000;
/// Largest total work (entries times points) for the moment counter.
pub const MOMENT_WORK_LIMIT: u64 = 8_000_000_000;

/// Representation counts `r_T(n) = #{x in [X]^T : P(x_1) + ... + P(x_T) = n}`, keyed by
/// `n - T * min P`.
fn representation_counts(p: &IntPoly, t: u32, x: u64) -> Result<Vec<(u64, u64)>> {
    let vals = p.values_i128(x)?;
    let min = *vals.iter().min().unwrap();
    let shifted: Vec<u64> = vals
        .iter()
        .map(|v| u64::try_from(v - min).map_err(|_| budget("moment value range", "> 2^64", "2^64")))
        .collect::<Result<_>>()?;
    let span = *shifted.iter().max().unwrap();
    let range = span
        .checked_mul(t as u64)
        .ok_or_else(|| budget("moment value range", "> 2^64", "2^64"))?;
    let mut work: u64 = 0;
    if range < MOMENT_ENTRY_LIMIT {
        let mut cur = vec![0u64; 1];
        cur[0] = 1;
        for step in 0..t {
            let mut next = vec![0u64; (span * (step as u64 + 1) + 1) as usize];
            let nnz: Vec<(usize, u64)> = cur.iter().copied().enumerate().filter(|(_, c)| *c > 0).collect();
            work += nnz.len() as u64 * x;
            if work > MOMENT_WORK_LIMIT {
                return Err(budget("moment counting work", work, MOMENT_WORK_LIMIT));
            }
            for (i, c) in nnz {
                for &v in &shifted {
                    next[i + v as usize] += c;
                }
            }
            cur = next;
        }
        return Ok(cur.into_iter().enumerate().filter(|(_, c)| *c > 0).map(|(i, c)| (i as u64, c)).collect());
    }
    let mut cur: HashMap<u64, u64> = HashMap::from([(0, 1)]);
    for _ in 0..t {
        work += cur.len() as u64 * x;
        if work > MOMENT_WORK_LIMIT {
            return Err(budget("moment counting work", work, MOMENT_WORK_LIMIT));
        }
        let mut next: HashMap<u64, u64> = HashMap::with_capacity(cur.len() * 2);
        for (&i, &c) in &cur {
            for &v in &shifted {
                *next.entry(i + v).or_insert(0) += c;
            }
        }
        if next.len() as u64 > MOMENT_ENTRY_LIMIT {
            return Err(budget("moment hash entries", next.len(), MOMENT_ENTRY_LIMIT));
        }
        cur = next;
    }
    Ok(cur.into_iter().collect())
}

/// Number of solutions of `P(x_1)+...+P(x_T) = P(x_{T+1})+...+P(x_{2T})` over `[X]^{2T}`.
pub fn moment_count(p: &IntPoly, t: u32, x: u64) -> Result<u128> {
    if t == 0 || x == 0 {
        return Err(Error::InvalidInput("T and X must be positive".into()));
    }
    Ok(representation_counts(p, t, x)?
        .into_iter()
        .map(|(_, c)| c as u128 * c as u128)
        .sum())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TEstimate {
    /// Smallest `T` whose fitted slope met the target, if any.
    pub t: Option<u32>,
    /// `(T, fitted slope, target 2T - d + slack)` for each `T` tried.
    pub fits: Vec<(u32, f64, f64)>,
    pub xs: Vec<u64>,
}

fn loglog_slope(xs: &[u64], ys: &[u128]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(&x, &y)| ((x as f64).ln(), (y as f64).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Least `T` up to the default bound whose moment counts grow with log-log slope at
/// most `2T - d + slack`. An empirical estimate only.
pub fn estimate_t(p: &IntPoly, xs: &[u64], slack: f64) -> Result<TEstimate> {
    if xs.len() < 2 {
        return Err(Error::InvalidInput("need at least two X values".into()));
    }
    let d = p.degree() as u32;
    let bound = thresholds(d)?.t_bound;
    let mut fits = Vec::new();
    for t in 1..=bound {
        let ys: Vec<u128> = xs.iter().map(|&x| moment_count(p, t, x)).collect::<Result<_>>()?;
        let slope = loglog_slope(xs, &ys);
        let target = 2.0 * t as f64 - d as f64 + slack;
        fits.push((t, slope, target));
        if slope <= target {
            return Ok(TEstimate { t: Some(t), fits, xs: xs.to_vec() });
        }
    }
    Ok(TEstimate { t: None, fits, xs: xs.to_vec() })
}

/// Inverse DFT (unnormalised): `out[j] = sum_r hist[r] e(j r / G)`.
pub fn spectrum(hist: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = hist.iter().map(|&h| Complex64::new(h, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

/// All Weyl sums `sum_{x<=X} e(j P(x) / G)`, `j = 0..G`, via one FFT of the value histogram.
pub fn weyl_grid(p: &IntPoly, x: u64, g: u64) -> Result<Vec<Complex64>> {
    if g == 0 {
        return Err(Error::InvalidInput("grid size must be positive".into()));
    }
    let coeffs = p.reduce_mod_u64(g);
    let mut hist = vec![0.0; g as usize];
    for n in 1..=x {
        hist[eval_mod(&coeffs, n, g) as usize] += 1.0;
    }
    Ok(spectrum(&hist))
}

/// Grid size for which the Riemann sum of `|f(alpha)|^{2T}` is exact.
pub fn parseval_grid_size(p: &IntPoly, t: u32, x: u64) -> Result<u64> {
    let vals = p.values_i128(x)?;
    let max_abs = vals.iter().map(|v| v.unsigned_abs()).max().unwrap() as u64;
    let span = (vals.iter().max().unwrap() - vals.iter().min().unwrap()) as u64;
    Ok((4 * max_abs).max(2 * t as u64 * span + 1))
}

/// `(1/G) sum_j |f(j/G)|^{2T}`.
pub fn parseval_integral(p: &IntPoly, t: u32, x: u64, g: u64) -> Result<f64> {
    let grid = weyl_grid(p, x, g)?;
    let total: KahanSum = grid.iter().map(|z| Complex64::new(z.norm_sqr().powi(t as i32), 0.0)).collect();
    Ok(total.value().re / g as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylBoundReport {
    pub exponent: f64,
    pub max_ratio: f64,
    pub argmax: (u64, u64),
    pub qmax: u64,
}

/// `max |S(q,a)| q^{-exponent}` over `q <= qmax`, `(a,q) = 1`, using one FFT per `q`.
pub fn weyl_bound_report(f: &IntPoly, qmax: u64, exponent: f64) -> Result<WeylBoundReport> {
    let best = (1..=qmax)
        .into_par_iter()
        .map(|q| {
            let coeffs = f.reduce_mod_u64(q);
            let mut hist = vec![0.0; q as usize];
            for x in 1..=q {
                hist[eval_mod(&coeffs, x, q) as usize] += 1.0;
            }
            let s = spectrum(&hist);
            let scale = (q as f64).powf(-exponent);
            (0..q)
                .filter(|a| a.gcd(&q) == 1)
                .map(|a| (s[a as usize].norm() * scale, (q, a)))
                .fold((0.0, (1, 0)), |acc, v| if v.0 > acc.0 { v } else { acc })
        })
        .reduce(|| (0.0, (1, 0)), |x, y| if y.0 > x.0 { y } else { x });
    Ok(WeylBoundReport { exponent, max_ratio: best.0, argmax: best.1, qmax })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorArcSample {
    pub alpha: f64,
    pub q: u64,
    pub a: u64,
    pub error: f64,
    /// `q + X^d ||q alpha||`, the size the approximation error is measured against.
    pub scale: f64,
}

/// Compares `f(alpha)` with `q^{-1} S(q,a) v(alpha - a/q)` where `v(beta) = int_0^X e(beta P)`.
pub fn major_arc_sample(p: &IntPoly, x: u64, alpha: f64, q: u64, a: u64) -> Result<MajorArcSample> {
    let beta = alpha - a as f64 / q as f64;
    let truth = weyl_sum(p, alpha, x)?;
    let s = complete_sum(p, q, &BigInt::from(a))?;
    let v = osc_integral_poly(p, beta, x as f64, x as f64)?;
    let approx = s * v / q as f64;
    let d = p.degree() as i32;
    Ok(MajorArcSample {
        alpha,
        q,
        a,
        error: (truth - approx).norm(),
        scale: q as f64 + (x as f64).powi(d) * torus_dist(q as f64 * alpha),
    })
}

/// Worst relative error `|f - approx| / X` over evenly spaced points of the major arcs.
pub fn major_arc_error(p: &IntPoly, x: u64, dissection: &ArcDissection, per_arc: u32) -> Result<f64> {
    let qmax = dissection.q.floor() as u64;
    let r = dissection.radius();
    let mut worst: f64 = 0.0;
    for q in 1..=qmax {
        for a in (0..q).filter(|a| a.gcd(&q) == 1) {
            for i in 0..per_arc {
                let off = r * (2.0 * i as f64 / (per_arc.max(2) - 1) as f64 - 1.0);
                let alpha = a as f64 / q as f64 + off;
                let s = major_arc_sample(p, x, alpha, q, a)?;
                worst = worst.max(s.error / x as f64);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn direct_sum(f: &IntPoly, q: u64, a: i64) -> Complex64 {
        (1..=q as i64)
            .map(|x| {
                let v = (BigInt::from(a) * f.eval_i64(x)).mod_floor(&BigInt::from(q));
                e(v.to_f64().unwrap() / q as f64)
            })
            .sum()
    }

    #[test]
    fn complete_sum_examples() {
        let sq = p(&[0, 0, 1]);
        let s5 = complete_sum(&sq, 5, &BigInt::from(1)).unwrap();
        assert!(close(s5, Complex64::new(5f64.sqrt(), 0.0), 1e-12));
        assert!(close(complete_sum(&sq, 1, &BigInt::from(7)).unwrap(), Complex64::new(1.0, 0.0), 1e-15));
        assert!(close(complete_sum(&sq, 4, &BigInt::from(1)).unwrap(), Complex64::new(2.0, 2.0), 1e-12));
    }

    #[test]
    fn gauss_modulus() {
        let sq = p(&[0, 0, 1]);
        for q in crate::arith::primes_up_to(500).into_iter().skip(1) {
            for a in [1u64, 2, q - 1] {
                let s = complete_sum(&sq, q, &BigInt::from(a)).unwrap();
                assert!((s.norm() - (q as f64).sqrt()).abs() < 1e-9 * (q as f64).sqrt());
            }
        }
    }

    #[test]
    fn weyl_examples() {
        let sq = p(&[0, 0, 1]);
        assert!(close(weyl_sum(&sq, 0.0, 17).unwrap(), Complex64::new(17.0, 0.0), 1e-12));
        assert!(close(weyl_sum(&sq, 0.5, 4).unwrap(), Complex64::zero(), 1e-12));
        assert!(close(weyl_sum(&sq, 0.25, 2).unwrap(), Complex64::new(1.0, 1.0), 1e-12));
    }

    #[test]
    fn weyl_phase_is_exact_for_large_values() {
        // alpha = 3/8 and P(x) = x^5 + 10^18: the phase must come from the exact residue
        let f = IntPoly::new(vec![BigInt::from(10).pow(18), 0.into(), 0.into(), 0.into(), 0.into(), 1.into()]);
        let w = weyl_sum(&f, 0.375, 1000).unwrap();
        let r = weyl_sum_rational(&f, &BigInt::from(3), 8, 1000).unwrap();
        assert!(close(w, r, 1e-9));
        let neg = weyl_sum(&f, -0.625, 1000).unwrap();
        assert!(close(neg, r, 1e-9));
        let tiny = weyl_sum(&p(&[0, 1]), 2f64.powi(-140), 10).unwrap();
        assert!(close(tiny, Complex64::new(10.0, 0.0), 1e-9));
    }

    #[test]
    fn osc_examples() {
        assert_eq!(osc_integral(0.0, 3.5), Complex64::new(3.5, 0.0));
        assert!(close(osc_integral(0.5, 2.0), Complex64::zero(), 1e-12));
        assert!(close(osc_integral(0.25, 2.0), Complex64::new(0.0, 4.0 / PI), 1e-12));
        for i in 1..200 {
            let b = i as f64 * 0.013 - 1.3;
            let v = osc_integral(b, 50.0).norm();
            assert!(v <= 50.0 + 1e-9 && v <= 1.0 / (PI * torus_dist(b)) + 1e-9);
        }
    }

    #[test]
    fn osc_poly_matches_substitution_oracle() {
        let sq = p(&[0, 0, 1]);
        let (n, z) = (100.0, 10.0);
        assert_eq!(osc_integral_poly(&sq, 0.0, n, z).unwrap(), Complex64::new(n, 0.0));
        for beta in [1e-3, 7e-3, 0.02, -0.011] {
            let got = osc_integral_poly(&sq, beta, n, z).unwrap();
            // (N/Z) * (1/2) int_0^N e(beta g) g^{-1/2} dg; the head [0, delta] by series
            let delta: f64 = 1e-4;
            let head = Complex64::new(2.0 * delta.sqrt(), 2.0 * PI * beta * 2.0 / 3.0 * delta.powf(1.5));
            let m = 2_000_000;
            let h = (n - delta) / m as f64;
            let tail: Complex64 = (0..m)
                .map(|i| {
                    let g = delta + (i as f64 + 0.5) * h;
                    e(beta * g) * (h / g.sqrt())
                })
                .sum();
            let want = (head + tail) * 0.5 * (n / z);
            assert!((got - want).norm() < 1e-4 * want.norm().max(1.0), "{beta}: {got} vs {want}");
            assert!(got.norm() <= n + 1e-9);
        }
    }

    #[test]
    fn arcs() {
        let d = ArcDissection::with_q(1000.0, 3.0);
        assert_eq!(classify_arc(0.0, &d), Arc::Major { q: 1, a: 0 });
        assert_eq!(classify_arc(0.5, &d), Arc::Major { q: 2, a: 1 });
        assert_eq!(classify_arc(2f64.sqrt() - 1.0, &d), Arc::Minor);
        assert_eq!(classify_arc(0.9995, &d), Arc::Major { q: 1, a: 0 });
        assert_eq!(classify_arc(2.0 / 3.0 + 0.002, &d), Arc::Major { q: 3, a: 2 });
        assert!(ArcDissection::new(100.0, 100.0, 0.7).is_err());
    }

    #[test]
    fn moments() {
        let sq = p(&[0, 0, 1]);
        assert_eq!(moment_count(&sq, 1, 40).unwrap(), 40);
        assert_eq!(moment_count(&sq, 2, 3).unwrap(), 15);
        let x = 50i64;
        let mut direct = 0u128;
        for a in 1..=x {
            for b in 1..=x {
                for c in 1..=x {
                    let r = a * a + b * b - c * c;
                    if r > 0 {
                        let s = (r as f64).sqrt().round() as i64;
                        if s >= 1 && s <= x && s * s == r {
                            direct += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(moment_count(&sq, 2, 50).unwrap(), direct);
        // the hash path agrees with the dense path
        let big = IntPoly::from_i64(&[0, 0, 0, 0, 0, 0, 1]);
        let dense = moment_count(&p(&[0, 0, 0, 1]), 2, 40).unwrap();
        assert!(dense >= 2 * 40 * 40 - 40);
        assert!(moment_count(&big, 2, 30).unwrap() >= 2 * 30 * 30 - 30);
    }

    #[test]
    fn parseval_identity() {
        for (d, t, x) in [(2usize, 2u32, 50u64), (3, 2, 30)] {
            let mut c = vec![0i64; d + 1];
            c[d] = 1;
            let f = p(&c);
            let g = parseval_grid_size(&f, t, x).unwrap();
            let integral = parseval_integral(&f, t, x, g).unwrap();
            let count = moment_count(&f, t, x).unwrap() as f64;
            assert!((integral - count).abs() <= 1e-6 * count, "{integral} vs {count}");
        }
    }

    #[test]
    fn grid_matches_direct_weyl() {
        let f = p(&[3, -1, 2, 1]);
        let grid = weyl_grid(&f, 40, 97).unwrap();
        for j in [0u64, 1, 13, 96] {
            let w = weyl_sum_rational(&f, &BigInt::from(j), 97, 40).unwrap();
            assert!(close(grid[j as usize], w, 1e-9));
        }
    }

    #[test]
    fn t_estimates() {
        let est = estimate_t(&p(&[0, 0, 1]), &[50, 100, 200, 400], 0.3).unwrap();
        assert_eq!(est.t, Some(2));
        let est = estimate_t(&p(&[0, 0, 0, 1]), &[25, 50, 100, 200], 0.3).unwrap();
        assert!(matches!(est.t, Some(3) | Some(4)), "{est:?}");
    }

    #[test]
    fn weyl_report_is_finite() {
        let r = weyl_bound_report(&p(&[0, 0, 1]), 300, 1.0 - 0.5 + 0.1).unwrap();
        assert!(r.max_ratio.is_finite() && r.max_ratio > 0.0);
        // |S(q,a)| <= sqrt(2q) for squares
        assert!(r.max_ratio <= 2f64.sqrt() * 300f64.powf(-0.1) * 10.0);
    }

    #[test]
    fn major_arc_error_shrinks() {
        let f = p(&[0, 0, 1]);
        let errs: Vec<f64> = [100u64, 400, 1600]
            .iter()
            .map(|&x| {
                let d = ArcDissection::new(x as f64, (x * x) as f64, 0.2).unwrap();
                major_arc_error(&f, x, &d, 5).unwrap()
            })
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    proptest! {
        #[test]
        fn complete_sum_matches_direct(c in prop::collection::vec(-20i64..20, 1..5), q in 1u64..60, a in -30i64..30) {
            let f = p(&c);
            let s = complete_sum(&f, q, &BigInt::from(a)).unwrap();
            prop_assert!(close(s, direct_sum(&f, q, a), 1e-9));
        }

        #[test]
        fn twisted_multiplicativity(c in prop::collection::vec(-9i64..9, 2..5), q1 in 1u64..25, q2 in 1u64..25, a in 1i64..50) {
            prop_assume!(q1.gcd(&q2) == 1);
            let f = p(&c);
            let inv = |x: u64, m: u64| crate::arith::mod_inverse(&BigInt::from(x), &BigInt::from(m)).unwrap_or_default();
            let whole = complete_sum(&f, q1 * q2, &BigInt::from(a)).unwrap();
            let s1 = complete_sum(&f, q1, &(BigInt::from(a) * inv(q2, q1))).unwrap();
            let s2 = complete_sum(&f, q2, &(BigInt::from(a) * inv(q1, q2))).unwrap();
            prop_assert!(close(whole, s1 * s2, 1e-8 * (q1 * q2) as f64));
        }

        #[test]
        fn weyl_float_matches_rational(c in prop::collection::vec(-1000i64..1000, 2..6), num in 0u64..1024, n in 1u64..300) {
            let f = p(&c);
            let w = weyl_sum(&f, num as f64 / 1024.0, n).unwrap();
            let r = weyl_sum_rational(&f, &BigInt::from(num), 1024, n).unwrap();
            prop_assert!(close(w, r, 1e-9 * n as f64));
        }
    }
}

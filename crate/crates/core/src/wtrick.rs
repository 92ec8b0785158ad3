//! W-trick: scaled regimes, residue selection, the weights `nu` and `mu_D`, and their
//! Fourier decay.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::arith::{primes_up_to, primorial};
use crate::error::{budget, Error, Result};
use crate::expsums::{classify_arc, complete_sum, e, Arc, ArcDissection};
use crate::intersective::{aux_data, has_padic_zero, AuxiliaryData};
use crate::polyring::IntPoly;

/// Parameters of one W-tricked regime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaledRegime {
    pub poly: IntPoly,
    pub w: u64,
    pub e: u32,
    pub big_w: BigInt,
    pub v: BigInt,
    /// `C d^2 10^{2w}` with `C = 1`; recorded only, the residue filter is `(P'(b), W) | V`.
    pub m: BigInt,
    pub d: BigInt,
    pub lambda: BigInt,
    pub r: BigInt,
    pub pd: IntPoly,
    /// Requested scale and the adjusted scale with `D | X - r_D`.
    pub x_requested: BigInt,
    pub x: BigInt,
    pub z: BigInt,
    pub n: BigInt,
}

fn to_u64(v: &BigInt, what: &'static str) -> Result<u64> {
    v.to_u64().ok_or_else(|| budget(what, v, u64::MAX))
}

impl ScaledRegime {
    pub fn w_u64(&self) -> Result<u64> {
        to_u64(&self.big_w, "W")
    }

    pub fn x_u64(&self) -> Result<u64> {
        to_u64(&self.x, "X")
    }

    pub fn n_u64(&self) -> Result<u64> {
        to_u64(&self.n, "N")
    }
}

/// Builds the regime for `P`, `W = (prod_{p<=w} p)^e`, `D = W^2`, moving `X` down to the
/// nearest value with `D | X - r_D`.
pub fn build_regime(p: &IntPoly, w: u64, e: u32, x: &BigInt) -> Result<ScaledRegime> {
    if e == 0 || e % 2 == 1 {
        return Err(Error::InvalidInput("the exponent e must be even and positive".into()));
    }
    if w < 2 {
        return Err(Error::InvalidInput("w must be at least 2".into()));
    }
    if p.degree() < 1 {
        return Err(Error::InvalidInput("polynomial must be nonconstant".into()));
    }
    for q in primes_up_to(w) {
        if !has_padic_zero(p, q)? {
            return Err(Error::NoPadicZero(q));
        }
    }
    let base = primorial(w);
    let big_w = num_traits::pow(base.clone(), e as usize);
    let v = num_traits::pow(base, e as usize / 2);
    let d = &big_w * &big_w;
    let du = to_u64(&d, "D")?;
    let AuxiliaryData { lambda, r, pd, .. } = aux_data(p, du)?;
    let x_adj = x - (x - &r).mod_floor(&d);
    let z = (&x_adj - &r) / &d;
    if !z.is_positive() {
        return Err(Error::InvalidInput(format!("X = {x} is too small for D = {d}")));
    }
    let n = pd.eval(&z);
    if !n.is_positive() {
        return Err(Error::InvalidInput(format!("N = P_D(Z) = {n} is not positive")));
    }
    let deg = p.degree() as u32;
    let m = BigInt::from(deg * deg) * num_traits::pow(BigInt::from(10), 2 * w as usize);
    Ok(ScaledRegime {
        poly: p.clone(),
        w,
        e,
        big_w,
        v,
        m,
        d,
        lambda,
        r,
        pd,
        x_requested: x.clone(),
        x: x_adj,
        z,
        n,
    })
}

/// `(P'(b), W)`.
pub fn derivative_gcd(regime: &ScaledRegime, b: &BigInt) -> BigInt {
    regime.poly.derivative().eval(b).gcd(&regime.big_w)
}

/// `kappa` with `W kappa (P'(b), W) = lambda(D)`, or `None` when `(P'(b), W)` does not divide `V`.
pub fn kappa_for(regime: &ScaledRegime, b: &BigInt) -> Result<Option<BigInt>> {
    let g = derivative_gcd(regime, b);
    if !(&regime.v % &g).is_zero() {
        return Ok(None);
    }
    let den = &regime.big_w * &g;
    let (k, rem) = regime.lambda.div_rem(&den);
    if !rem.is_zero() || !k.is_positive() {
        return Err(Error::Consistency(format!(
            "W (P'(b), W) = {den} does not divide lambda(D) = {}",
            regime.lambda
        )));
    }
    Ok(Some(k))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueSelection {
    pub b0: u64,
    pub b: u64,
    pub kappa: u64,
    pub g: u64,
    pub count_b0: usize,
    pub count_b: usize,
    /// `(P(x) - P(b)) / lambda(D)` for `x` in `A` with `x = b mod W kappa`.
    pub image: Vec<BigInt>,
}

/// Largest modulus `W kappa` for which residue classes are tabulated.
pub const RESIDUE_TABLE_LIMIT: u64 = 100_000_000;

/// Chooses `b0 mod W` with `(P'(b0), W) | V` holding the most elements of `A` (ties to the
/// smallest `b0`), then `b = b0 mod W` in `[W kappa]` holding the most elements (ties to the
/// smallest `b`), and maps `A_{b, W kappa}` through `(P(x) - P(b)) / lambda(D)`.
pub fn select_residue(a: &[u64], regime: &ScaledRegime) -> Result<ResidueSelection> {
    let wu = regime.w_u64()?;
    if wu > RESIDUE_TABLE_LIMIT {
        return Err(budget("residue table", wu, RESIDUE_TABLE_LIMIT));
    }
    let mut counts = vec![0usize; wu as usize];
    for &x in a {
        counts[(x % wu) as usize] += 1;
    }
    let mut best: Option<(u64, usize, BigInt)> = None;
    for b0 in 1..=wu {
        let bb = BigInt::from(b0);
        if let Some(k) = kappa_for(regime, &bb)? {
            let c = counts[(b0 % wu) as usize];
            if best.as_ref().is_none_or(|(_, bc, _)| c > *bc) {
                best = Some((b0, c, k));
            }
        }
    }
    let (b0, count_b0, kappa) = best.ok_or_else(|| {
        Error::Consistency("no residue b0 mod W with (P'(b0), W) dividing V".into())
    })?;
    let kappa_u = to_u64(&kappa, "kappa")?;
    let modulus = wu
        .checked_mul(kappa_u)
        .filter(|m| *m <= RESIDUE_TABLE_LIMIT)
        .ok_or_else(|| budget("residue table W kappa", &kappa * wu, RESIDUE_TABLE_LIMIT))?;
    let mut fine = vec![0usize; kappa_u as usize];
    for &x in a {
        if x % wu == b0 % wu {
            fine[((x % modulus) / wu) as usize] += 1;
        }
    }
    // residues b = b0 + W t for t = 0..kappa, reduced into [1, W kappa]
    let (mut b, mut count_b) = (0u64, 0usize);
    for t in 0..kappa_u {
        let cand = b0 + wu * t;
        let c = fine[((cand % modulus) / wu) as usize];
        if b == 0 || c > count_b {
            b = cand;
            count_b = c;
        }
    }
    let pb = regime.poly.eval(&BigInt::from(b));
    let image = a
        .iter()
        .filter(|&&x| x % modulus == b % modulus)
        .map(|&x| {
            let (q, rem) = (regime.poly.eval(&BigInt::from(x)) - &pb).div_rem(&regime.lambda);
            if rem.is_zero() {
                Ok(q)
            } else {
                Err(Error::Consistency(format!("lambda(D) does not divide P({x}) - P({b})")))
            }
        })
        .collect::<Result<_>>()?;
    Ok(ResidueSelection {
        b0,
        b,
        kappa: kappa_u,
        g: to_u64(&derivative_gcd(regime, &BigInt::from(b)), "g")?,
        count_b0,
        count_b,
        image,
    })
}

/// A nonnegative weight on `[N]`, stored as integer numerators over a common denominator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightArray {
    pub n: u64,
    /// `(position, numerator)`, positions strictly increasing and in `[1, N]`.
    pub entries: Vec<(u64, i128)>,
    pub den: i128,
}

impl WeightArray {
    pub fn value(&self, pos: u64) -> BigRational {
        match self.entries.binary_search_by_key(&pos, |e| e.0) {
            Ok(i) => BigRational::new(self.entries[i].1.into(), self.den.into()),
            Err(_) => BigRational::zero(),
        }
    }

    pub fn l1_norm(&self) -> BigRational {
        let s: BigInt = self.entries.iter().map(|e| BigInt::from(e.1)).sum();
        BigRational::new(s, self.den.into())
    }

    /// The indicator of `[N]`.
    pub fn interval(n: u64) -> Self {
        WeightArray { n, entries: (1..=n).map(|k| (k, 1)).collect(), den: 1 }
    }

    fn from_unsorted(n: u64, mut raw: Vec<(u64, i128)>, den: i128) -> Self {
        raw.sort_unstable_by_key(|e| e.0);
        let mut entries: Vec<(u64, i128)> = Vec::with_capacity(raw.len());
        for (pos, v) in raw {
            match entries.last_mut() {
                Some(last) if last.0 == pos => last.1 += v,
                _ => entries.push((pos, v)),
            }
        }
        WeightArray { n, entries, den }
    }
}

/// Largest support size built by the weight constructors.
pub const WEIGHT_SUPPORT_LIMIT: u64 = 50_000_000;

/// `nu(n) = (P'(b), W)^{-1} sum P'(x)` over `x in (b, X]`, `x = b mod W kappa`,
/// `(P(x) - P(b)) / lambda(D) = n`.
pub fn nu_weight(regime: &ScaledRegime, b: u64, kappa: u64) -> Result<WeightArray> {
    let bb = BigInt::from(b);
    let g = derivative_gcd(regime, &bb);
    if !(&regime.v % &g).is_zero() {
        return Err(Error::InvalidInput(format!("(P'(b), W) = {g} does not divide V")));
    }
    if &regime.big_w * BigInt::from(kappa) * &g != regime.lambda {
        return Err(Error::InvalidInput("kappa does not satisfy W kappa (P'(b), W) = lambda(D)".into()));
    }
    let step = (&regime.big_w * BigInt::from(kappa)).to_u64().ok_or_else(|| budget("W kappa", "> 2^64", "2^64"))?;
    let x_max = regime.x_u64()?;
    let n = regime.n_u64()?;
    let count = x_max.saturating_sub(b) / step;
    if count > WEIGHT_SUPPORT_LIMIT {
        return Err(budget("nu support", count, WEIGHT_SUPPORT_LIMIT));
    }
    let pb = regime.poly.eval(&bb);
    let dp = regime.poly.derivative();
    let raw: Vec<(u64, i128)> = (1..=count)
        .into_par_iter()
        .map(|t| {
            let x = BigInt::from(b + t * step);
            let (q, rem) = (regime.poly.eval(&x) - &pb).div_rem(&regime.lambda);
            if !rem.is_zero() {
                return Err(Error::Consistency(format!("lambda(D) does not divide P({x}) - P({b})")));
            }
            let pos = q.to_u64().filter(|p| (1..=n).contains(p)).ok_or_else(|| {
                Error::Consistency(format!("nu position {q} lies outside [1, {n}]"))
            })?;
            let wgt = dp.eval(&x).to_i128().ok_or_else(|| budget("P'(x)", "> 2^127", "2^127"))?;
            Ok((pos, wgt))
        })
        .collect::<Result<_>>()?;
    Ok(WeightArray::from_unsorted(n, raw, g.to_i128().unwrap()))
}

/// `mu_D(n) = (N/Z) #{z <= Z : P_D(z) = n}` with `N = P_D(Z)`.
pub fn mu_weight(p: &IntPoly, d: u64, z: u64) -> Result<WeightArray> {
    if z == 0 || z > WEIGHT_SUPPORT_LIMIT {
        return Err(budget("mu support", z, WEIGHT_SUPPORT_LIMIT));
    }
    let pd = aux_data(p, d)?.pd;
    let vals: Vec<BigInt> = (1..=z).map(|k| pd.eval(&BigInt::from(k))).collect();
    if vals[0] < BigInt::one() || vals.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("P_D must satisfy 1 <= P_D(1) < P_D(2) < ... on [Z]".into()));
    }
    let n = to_u64(vals.last().unwrap(), "N")?;
    let g = BigInt::from(n).gcd(&BigInt::from(z));
    let num = (BigInt::from(n) / &g).to_i128().unwrap();
    let den = (BigInt::from(z) / &g).to_i128().unwrap();
    let raw = vals.iter().map(|v| (v.to_u64().unwrap(), num)).collect();
    Ok(WeightArray::from_unsorted(n, raw, den))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierDecayReport {
    pub n: u64,
    pub grid: u64,
    /// `max_j |nu^(j/G) - 1_[N]^(j/G)| / N`.
    pub sup: f64,
    pub argmax_alpha: f64,
    pub argmax_arc: Arc,
    pub major_sup: f64,
    pub minor_sup: f64,
    pub major_q: f64,
}

/// FFT length used per block of the strided grid transform.
pub const DFT_BLOCK: u64 = 1 << 20;

/// `1_[N]^(alpha) = sum_{n=1..N} e(alpha n)` at `alpha = j/G`.
fn interval_transform(j: u64, n: u64, g: u64) -> Complex64 {
    if j == 0 {
        return Complex64::new(n as f64, 0.0);
    }
    let alpha = j as f64 / g as f64;
    let half = ((j as u128 * (n as u128 + 1)) % (2 * g as u128)) as f64 / (2 * g) as f64;
    let num = (std::f64::consts::PI * ((j as u128 * n as u128) % (2 * g as u128)) as f64 / g as f64).sin();
    let den = (std::f64::consts::PI * alpha).sin();
    e(half) * (num / den)
}

/// Grid sup of `|weight^ - 1_[N]^| / N` with `G >= grid` points, split into major and minor
/// arcs of `dissection`.
pub fn fourier_decay_report(weight: &WeightArray, grid: u64, dissection: &ArcDissection) -> Result<FourierDecayReport> {
    let n = weight.n;
    if grid < 4 * n {
        return Err(Error::InvalidInput(format!("grid {grid} is smaller than 4N = {}", 4 * n)));
    }
    let c = DFT_BLOCK.min(grid.next_power_of_two());
    let rows = grid.div_ceil(c);
    let g = rows * c;
    let den = weight.den as f64;
    let pts: Vec<(u64, f64)> = weight.entries.iter().map(|&(p, v)| (p, v as f64 / den)).collect();
    let majors = major_intervals(dissection, g);
    let nf = n as f64;
    // (sup, argmax j, major sup, minor sup)
    let fold = |a: (f64, u64, f64, f64), b: (f64, u64, f64, f64)| {
        let (s, j) = if b.0 > a.0 { (b.0, b.1) } else { (a.0, a.1) };
        (s, j, a.2.max(b.2), a.3.max(b.3))
    };
    let best = (0..rows)
        .into_par_iter()
        .map_init(
            || (FftPlanner::<f64>::new().plan_fft_inverse(c as usize), vec![Complex64::zero(); c as usize]),
            |(fft, buf), j1| {
                buf.iter_mut().for_each(|z| *z = Complex64::zero());
                for &(p, v) in &pts {
                    let ph = ((j1 as u128 * p as u128) % g as u128) as f64 / g as f64;
                    buf[(p % c) as usize] += e(ph) * v;
                }
                fft.process(buf);
                let mut acc = (0.0f64, 0u64, 0.0f64, 0.0f64);
                for (j2, val) in buf.iter().enumerate() {
                    let j = j1 + rows * j2 as u64;
                    let diff = (*val - interval_transform(j, n, g)).norm() / nf;
                    if diff > acc.0 {
                        acc.0 = diff;
                        acc.1 = j;
                    }
                    if in_major(&majors, j) {
                        acc.2 = acc.2.max(diff);
                    } else {
                        acc.3 = acc.3.max(diff);
                    }
                }
                acc
            },
        )
        .reduce(|| (0.0, 0, 0.0, 0.0), fold);
    let argmax_alpha = best.1 as f64 / g as f64;
    Ok(FourierDecayReport {
        n,
        grid: g,
        sup: best.0,
        argmax_alpha,
        argmax_arc: classify_arc(argmax_alpha, dissection),
        major_sup: best.2,
        minor_sup: best.3,
        major_q: dissection.q,
    })
}

/// Merged grid-index intervals `[lo, hi]` covering the major arcs.
fn major_intervals(d: &ArcDissection, g: u64) -> Vec<(i64, i64)> {
    let qmax = d.q.floor().max(1.0) as u64;
    let r = d.radius();
    let gf = g as f64;
    let mut iv: Vec<(i64, i64)> = Vec::new();
    for q in 1..=qmax {
        for a in (0..q).filter(|a| a.gcd(&q) == 1) {
            let centre = a as f64 / q as f64;
            let lo = ((centre - r) * gf).ceil() as i64;
            let hi = ((centre + r) * gf).floor() as i64;
            // wrap around the torus
            if lo < 0 {
                iv.push((lo + g as i64, g as i64 - 1));
                iv.push((0, hi));
            } else {
                iv.push((lo, hi));
            }
        }
    }
    iv.sort_unstable();
    let mut merged: Vec<(i64, i64)> = Vec::new();
    for (lo, hi) in iv {
        match merged.last_mut() {
            Some(last) if lo <= last.1 + 1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    merged
}

fn in_major(iv: &[(i64, i64)], j: u64) -> bool {
    let j = j as i64;
    match iv.binary_search_by(|&(lo, _)| lo.cmp(&j)) {
        Ok(_) => true,
        Err(0) => false,
        Err(i) => j <= iv[i - 1].1,
    }
}

/// `(P(W kappa y + b) - P(b)) / lambda(D)` as a polynomial in `y`.
pub fn tricked_poly(regime: &ScaledRegime, b: u64, kappa: u64) -> Result<IntPoly> {
    let bb = BigInt::from(b);
    let step = &regime.big_w * BigInt::from(kappa);
    let shifted = &regime.poly.shift_scale(&bb, &step) - &IntPoly::constant(regime.poly.eval(&bb));
    shifted
        .div_exact_int(&regime.lambda)
        .ok_or_else(|| Error::Consistency("lambda(D) does not divide the W-tricked polynomial".into()))
}

/// Whether, for every prime `p <= w`, the W-tricked polynomial agrees modulo `p` with
/// `(P'(b) / (P'(b), W)) y`, a bijection of residues.
pub fn equidistribution_check(regime: &ScaledRegime, b: u64, kappa: u64) -> Result<bool> {
    let tp = tricked_poly(regime, b, kappa)?;
    let bb = BigInt::from(b);
    let dp = regime.poly.derivative().eval(&bb);
    let slope = &dp / derivative_gcd(regime, &bb);
    for p in primes_up_to(regime.w) {
        let pb = BigInt::from(p);
        let mut seen = vec![false; p as usize];
        for y in 0..p {
            let yb = BigInt::from(y);
            let v = tp.eval(&yb).mod_floor(&pb);
            if v != (&slope * &yb).mod_floor(&pb) {
                return Ok(false);
            }
            seen[v.to_usize().unwrap()] = true;
        }
        if seen.iter().any(|s| !s) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `max |S(q, a)| / q` of the W-tricked polynomial over `q <= qmax` with `(q, W) > 1` and
/// `(a, q) = 1`.
pub fn ramified_sum_max(regime: &ScaledRegime, b: u64, kappa: u64, qmax: u64) -> Result<f64> {
    let tp = tricked_poly(regime, b, kappa)?;
    let mut worst: f64 = 0.0;
    for q in 2..=qmax {
        if BigInt::from(q).gcd(&regime.big_w).is_one() {
            continue;
        }
        for a in (1..q).filter(|a| a.gcd(&q) == 1) {
            let s = complete_sum(&tp, q, &BigInt::from(a))?;
            worst = worst.max(s.norm() / q as f64);
        }
    }
    Ok(worst)
}

/// `sum_{n in image} nu(n) / N`.
pub fn density_transfer(weight: &WeightArray, image: &[BigInt]) -> f64 {
    let mut ns: Vec<u64> = image.iter().filter_map(|v| v.to_u64()).collect();
    ns.sort_unstable();
    ns.dedup();
    let total: BigRational = ns.iter().map(|&k| weight.value(k)).sum();
    (total / BigRational::from_integer(weight.n.into())).to_f64().unwrap_or(f64::NAN)
}

/// Smallest `b` in `[W]` with `(P'(b), W) = V`, the residue giving the densest image.
pub fn residue_with_full_gcd(regime: &ScaledRegime) -> Result<Option<u64>> {
    let wu = regime.w_u64()?;
    Ok((1..=wu).find(|&b| derivative_gcd(regime, &BigInt::from(b)) == regime.v))
}

/// Scale `X` at which the `nu` weight for residue `b` has `k` support points, rounded up to
/// the adjustment modulus `D`.
pub fn scale_for_support(regime_probe: &ScaledRegime, b: u64, k: u64) -> Result<BigInt> {
    let kappa = kappa_for(regime_probe, &BigInt::from(b))?
        .ok_or_else(|| Error::InvalidInput("(P'(b), W) does not divide V".into()))?;
    let raw = &regime_probe.big_w * kappa * BigInt::from(k) + BigInt::from(b);
    let d = &regime_probe.d;
    Ok(&raw + (&regime_probe.r - &raw).mod_floor(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn regime_examples() {
        let r = build_regime(&p(&[0, 0, 1]), 2, 2, &BigInt::from(160)).unwrap();
        assert_eq!(r.big_w, BigInt::from(4));
        assert_eq!(r.v, BigInt::from(2));
        assert_eq!(r.d, BigInt::from(16));
        assert_eq!(r.r, BigInt::zero());
        assert_eq!(r.lambda, BigInt::from(256));
        assert_eq!((r.z.clone(), r.n.clone()), (BigInt::from(10), BigInt::from(100)));
        let r3 = build_regime(&p(&[0, 0, 1]), 3, 2, &BigInt::from(5000)).unwrap();
        assert_eq!((r3.big_w.clone(), r3.d.clone()), (BigInt::from(36), BigInt::from(1296)));
        assert_eq!(r3.x, BigInt::from(3888));
        assert!(build_regime(&p(&[1, 0, 1]), 3, 2, &BigInt::from(5000)).is_err());
        assert!(build_regime(&p(&[0, 0, 1]), 3, 3, &BigInt::from(5000)).is_err());
    }

    #[test]
    fn residue_selection_for_squares() {
        let r = build_regime(&p(&[0, 0, 1]), 2, 2, &BigInt::from(2000)).unwrap();
        let a: Vec<u64> = (1..=r.x_u64().unwrap()).collect();
        let sel = select_residue(&a, &r).unwrap();
        assert_eq!(sel.b0 % 2, 1);
        assert_eq!(sel.kappa, 32);
        assert_eq!(sel.b % 4, sel.b0 % 4);
        let odd: Vec<u64> = (1..=r.x_u64().unwrap()).filter(|x| x % 2 == 1).collect();
        let sel = select_residue(&odd, &r).unwrap();
        assert_eq!(sel.b % 2, 1);
        assert!(sel.count_b >= odd.len() / (4 * 32) / 2);
        assert_eq!(sel.image.len(), sel.count_b);
    }

    #[test]
    fn nu_support_for_squares() {
        let r = build_regime(&p(&[0, 0, 1]), 2, 2, &BigInt::from(20_000)).unwrap();
        let nu = nu_weight(&r, 1, 32).unwrap();
        for &(n, _) in &nu.entries {
            let m = 256 * n as u128 + 1;
            let s = (m as f64).sqrt().round() as u128;
            assert_eq!(s * s, m);
            assert_eq!(s % 128, 1);
        }
        assert!(nu.entries.last().unwrap().0 <= nu.n);
        let ratio = nu.l1_norm().to_f64().unwrap() / nu.n as f64;
        assert!(ratio > 0.5 && ratio < 1.5, "{ratio}");
        assert!(nu_weight(&r, 2, 32).is_err());
    }

    #[test]
    fn mu_examples() {
        let mu = mu_weight(&p(&[0, 0, 1]), 1, 3).unwrap();
        assert_eq!(mu.n, 9);
        assert_eq!(mu.entries.iter().map(|e| e.0).collect::<Vec<_>>(), vec![1, 4, 9]);
        assert_eq!(mu.value(4), BigRational::from_integer(3.into()));
        assert_eq!(mu.l1_norm(), BigRational::from_integer(9.into()));
        let mu = mu_weight(&p(&[0, 1, 1]), 6, 40).unwrap();
        assert_eq!(mu.l1_norm(), BigRational::from_integer(mu.n.into()));
    }

    #[test]
    fn interval_has_no_decay_gap() {
        let w = WeightArray::interval(500);
        let d = ArcDissection::with_q(500.0, 3.0);
        let rep = fourier_decay_report(&w, 2000, &d).unwrap();
        assert!(rep.sup < 1e-9, "{}", rep.sup);
        assert!(fourier_decay_report(&w, 1999, &d).is_err());
    }

    #[test]
    fn strided_transform_matches_direct() {
        let r = build_regime(&p(&[0, 2, 1]), 2, 2, &BigInt::from(200)).unwrap();
        let b = residue_with_full_gcd(&r).unwrap().unwrap();
        let k = kappa_for(&r, &BigInt::from(b)).unwrap().unwrap().to_u64().unwrap();
        let nu = nu_weight(&r, b, k).unwrap();
        let d = ArcDissection::with_q(nu.n as f64, 2.0);
        let rep = fourier_decay_report(&nu, 4 * nu.n, &d).unwrap();
        // brute force over the same grid
        let g = rep.grid;
        let mut best: f64 = 0.0;
        for j in 0..g {
            let mut s = Complex64::zero();
            for &(pos, v) in &nu.entries {
                s += e(((j as u128 * pos as u128) % g as u128) as f64 / g as f64) * (v as f64 / nu.den as f64);
            }
            let one: Complex64 = (1..=nu.n).map(|m| e(((j * m) % g) as f64 / g as f64)).sum();
            best = best.max((s - one).norm() / nu.n as f64);
        }
        assert!((best - rep.sup).abs() < 1e-8, "{best} vs {}", rep.sup);
        assert!((rep.sup - rep.major_sup.max(rep.minor_sup)).abs() < 1e-15);
    }

    #[test]
    fn identities_for_tricked_polynomial() {
        for (w, x) in [(2u64, 10_000u64), (3, 2_000_000)] {
            let r = build_regime(&p(&[0, 0, 1]), w, 2, &BigInt::from(x)).unwrap();
            let a: Vec<u64> = (1..=r.x_u64().unwrap().min(200_000)).collect();
            let sel = select_residue(&a, &r).unwrap();
            assert!(equidistribution_check(&r, sel.b, sel.kappa).unwrap());
            assert!(ramified_sum_max(&r, sel.b, sel.kappa, 60).unwrap() < 1e-9);
        }
    }

    #[test]
    fn density_transfer_is_bounded_below() {
        for w in [2u64, 3] {
            let r = build_regime(&p(&[0, 2, 1]), w, 2, &BigInt::from(3_000_000)).unwrap();
            let x = r.x_u64().unwrap();
            for a in [(1..=x).collect::<Vec<u64>>(), (1..=x).filter(|v| v % 3 == 1).collect()] {
                let sel = select_residue(&a, &r).unwrap();
                let nu = nu_weight(&r, sel.b, sel.kappa).unwrap();
                let frac = density_transfer(&nu, &sel.image);
                assert!(frac > 0.2, "w={w}: {frac}");
            }
        }
    }

}

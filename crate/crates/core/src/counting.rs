//! Exact and weighted solution counts for polynomial and linearised equations, colourings,
//! and supersaturation experiments.

use std::collections::HashMap;
use std::ops::{AddAssign, Mul};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{budget, Error, Result};
use crate::expsums::spectrum;
use crate::polyring::IntPoly;
use crate::regularity::{
    decide_density_regular, decide_partition_regular, DecideOptions, RadoEquation, RegularityStatus,
};

/// Values usable as weights in the counting operators.
pub trait Weight: Copy + Zero + One + AddAssign + Mul<Output = Self> + PartialEq + Send + Sync {}
impl<T: Copy + Zero + One + AddAssign + Mul<Output = T> + PartialEq + Send + Sync> Weight for T {}

/// A finitely supported weight: `(position, value)` pairs.
pub type SparseWeight<T> = Vec<(i128, T)>;

pub fn indicator(set: &[u64]) -> SparseWeight<i128> {
    set.iter().map(|&x| (x as i128, 1)).collect()
}

/// Spans up to this size are convolved in a dense buffer.
const DENSE_SPAN: i128 = 1 << 22;
/// Largest number of intermediate pairs produced by one sparse convolution step.
pub const CONVOLUTION_LIMIT: usize = 60_000_000;

fn convolve_step<T: Weight>(cur: &[(i128, T)], c: i128, w: &[(i128, T)]) -> Result<Vec<(i128, T)>> {
    if cur.is_empty() || w.is_empty() {
        return Ok(Vec::new());
    }
    let scaled: Vec<(i128, T)> = w.iter().map(|&(p, v)| (c * p, v)).collect();
    let wmin = scaled.iter().map(|e| e.0).min().unwrap();
    let wmax = scaled.iter().map(|e| e.0).max().unwrap();
    let lo = cur[0].0 + wmin;
    let hi = cur[cur.len() - 1].0 + wmax;
    if hi - lo <= DENSE_SPAN {
        let mut buf = vec![T::zero(); (hi - lo + 1) as usize];
        for &(k, a) in cur {
            for &(p, v) in &scaled {
                buf[(k + p - lo) as usize] += a * v;
            }
        }
        return Ok(buf
            .into_iter()
            .enumerate()
            .filter(|(_, v)| *v != T::zero())
            .map(|(i, v)| (i as i128 + lo, v))
            .collect());
    }
    let pairs = cur.len().saturating_mul(scaled.len());
    if pairs > CONVOLUTION_LIMIT {
        return Err(budget("sparse convolution pairs", pairs, CONVOLUTION_LIMIT));
    }
    let mut out: Vec<(i128, T)> = Vec::with_capacity(pairs);
    for &(k, a) in cur {
        for &(p, v) in &scaled {
            out.push((k + p, a * v));
        }
    }
    out.sort_unstable_by_key(|e| e.0);
    let mut merged: Vec<(i128, T)> = Vec::with_capacity(out.len());
    for (k, v) in out {
        match merged.last_mut() {
            Some(last) if last.0 == k => last.1 += v,
            _ => merged.push((k, v)),
        }
    }
    Ok(merged)
}

/// Distribution of `sum c_i n_i` weighted by `prod w_i(n_i)`, sorted by key.
fn distribution<T: Weight>(parts: &[(i128, &[(i128, T)])]) -> Result<Vec<(i128, T)>> {
    let mut cur = vec![(0i128, T::one())];
    for &(c, w) in parts {
        cur = convolve_step(&cur, c, w)?;
    }
    Ok(cur)
}

fn lookup<T: Weight>(dist: &[(i128, T)], key: i128) -> T {
    match dist.binary_search_by_key(&key, |e| e.0) {
        Ok(i) => dist[i].1,
        Err(_) => T::zero(),
    }
}

fn join_at<T: Weight>(left: &[(i128, T)], right: &[(i128, T)], target: i128) -> T {
    let mut acc = T::zero();
    let mut j = right.len();
    for &(k, a) in left {
        let want = target - k;
        while j > 0 && right[j - 1].0 > want {
            j -= 1;
        }
        if j > 0 && right[j - 1].0 == want {
            acc += a * right[j - 1].1;
        }
    }
    acc
}

/// `sum over sum_i c_i n_i = target of prod_i w_i(n_i)`, splitting the variables into a
/// prefix and suffix whose support products are as balanced as possible.
pub fn hyperplane_sum<T: Weight>(parts: &[(i128, &[(i128, T)])], target: i128) -> Result<T> {
    if parts.is_empty() {
        return Ok(if target == 0 { T::one() } else { T::zero() });
    }
    let logs: Vec<f64> = parts.iter().map(|p| (p.1.len().max(1) as f64).ln()).collect();
    let total: f64 = logs.iter().sum();
    let mut split = 0;
    let mut best = f64::INFINITY;
    let mut prefix: f64 = 0.0;
    for k in 0..=parts.len() {
        let cost = prefix.max(total - prefix);
        if cost < best - 1e-12 {
            best = cost;
            split = k;
        }
        if k < parts.len() {
            prefix += logs[k];
        }
    }
    let left = distribution(&parts[..split])?;
    let right = distribution(&parts[split..])?;
    Ok(join_at(&left, &right, target))
}

/// Which solutions of `sum a_i P(x_i) = b` are counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolutionFilter {
    All,
    /// Excludes solutions with all coordinates equal.
    NonConstant,
    /// Only solutions with pairwise distinct coordinates.
    Distinct,
}

/// Largest `s` for which distinct solutions are counted by inclusion-exclusion.
pub const DISTINCT_LIMIT: usize = 10;

fn poly_values(p: &IntPoly, set: &[u64]) -> Result<Vec<(i128, i128)>> {
    set.iter()
        .map(|&x| {
            p.eval(&BigInt::from(x))
                .to_i128()
                .map(|v| (v, 1i128))
                .ok_or_else(|| budget("polynomial value", "> 2^127", "2^127"))
        })
        .collect()
}

/// All set partitions of `0..s` as block-label vectors (restricted growth strings).
pub fn set_partitions(s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; s];
    fn rec(i: usize, maxb: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=maxb + 1 {
            cur[i] = b;
            rec(i + 1, maxb.max(b), cur, out);
        }
    }
    if s == 0 {
        return vec![vec![]];
    }
    rec(1, 0, &mut cur, &mut out);
    out
}

fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}

fn count_with_coeffs(coeffs: &[i64], vals: &[(i128, i128)], b: i128) -> Result<i128> {
    let parts: Vec<(i128, &[(i128, i128)])> = coeffs.iter().map(|&c| (c as i128, vals)).collect();
    hyperplane_sum(&parts, b)
}

/// Exact number of `x in set^s` with `sum a_i P(x_i) = b` under `filter`.
pub fn enumerate_solutions(eq: &RadoEquation, set: &[u64], filter: SolutionFilter) -> Result<u128> {
    let vals = poly_values(&eq.p, set)?;
    let b = eq.b.to_i128().ok_or_else(|| budget("b", "> 2^127", "2^127"))?;
    let total = match filter {
        SolutionFilter::All => count_with_coeffs(&eq.a, &vals, b)?,
        SolutionFilter::NonConstant => {
            let sum: i128 = eq.a.iter().map(|&c| c as i128).sum();
            let constant = vals.iter().filter(|v| sum * v.0 == b).count() as i128;
            count_with_coeffs(&eq.a, &vals, b)? - constant
        }
        SolutionFilter::Distinct => {
            let s = eq.s();
            if s > DISTINCT_LIMIT {
                return Err(budget("distinct-solution inclusion-exclusion", s, DISTINCT_LIMIT));
            }
            let mut cache: HashMap<Vec<i64>, i128> = HashMap::new();
            let mut acc = 0i128;
            for part in set_partitions(s) {
                let blocks = part.iter().max().map_or(0, |m| m + 1);
                let mut coeffs = vec![0i64; blocks];
                let mut sizes = vec![0usize; blocks];
                for (i, &blk) in part.iter().enumerate() {
                    coeffs[blk] += eq.a[i];
                    sizes[blk] += 1;
                }
                let mu: i128 = sizes
                    .iter()
                    .map(|&k| if k % 2 == 1 { factorial(k - 1) } else { -factorial(k - 1) })
                    .product();
                coeffs.sort_unstable();
                let n = match cache.get(&coeffs) {
                    Some(&n) => n,
                    None => {
                        let n = count_with_coeffs(&coeffs, &vals, b)?;
                        cache.insert(coeffs, n);
                        n
                    }
                };
                acc += mu * n;
            }
            acc
        }
    };
    u128::try_from(total).map_err(|_| Error::Consistency(format!("negative solution count {total}")))
}

/// Constraint eliminating one variable (1-based indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagonalConstraint {
    Fixed { j: usize, c: i64 },
    Equal { j: usize, k: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalCount {
    pub n: u64,
    pub count: u128,
    pub unconstrained: u128,
    /// `count / N^{s-d}`.
    pub ratio_power: f64,
    /// `count / unconstrained`.
    pub ratio_total: f64,
}

/// Solutions over `[N]^s` with one coordinate fixed or two coordinates equal.
pub fn count_diagonal(eq: &RadoEquation, n: u64, constraint: DiagonalConstraint) -> Result<DiagonalCount> {
    let s = eq.s();
    let set: Vec<u64> = (1..=n).collect();
    let vals = poly_values(&eq.p, &set)?;
    let b = eq.b.to_i128().ok_or_else(|| budget("b", "> 2^127", "2^127"))?;
    let count = match constraint {
        DiagonalConstraint::Fixed { j, c } => {
            if j == 0 || j > s {
                return Err(Error::InvalidInput(format!("index {j} out of range")));
            }
            if c < 1 || c as u64 > n {
                0
            } else {
                let pc = eq.p.eval_i64(c).to_i128().unwrap();
                let rest: Vec<i64> = (0..s).filter(|&i| i != j - 1).map(|i| eq.a[i]).collect();
                count_with_coeffs(&rest, &vals, b - eq.a[j - 1] as i128 * pc)?
            }
        }
        DiagonalConstraint::Equal { j, k } => {
            if j == k || j == 0 || k == 0 || j > s || k > s {
                return Err(Error::InvalidInput("need two distinct indices in range".into()));
            }
            let mut rest: Vec<i64> = (0..s).filter(|&i| i != j - 1 && i != k - 1).map(|i| eq.a[i]).collect();
            rest.push(eq.a[j - 1] + eq.a[k - 1]);
            count_with_coeffs(&rest, &vals, b)?
        }
    } as u128;
    let unconstrained = count_with_coeffs(&eq.a, &vals, b)? as u128;
    let power = (n as f64).powi(s as i32 - eq.degree() as i32);
    Ok(DiagonalCount {
        n,
        count,
        unconstrained,
        ratio_power: count as f64 / power,
        ratio_total: if unconstrained == 0 { 0.0 } else { count as f64 / unconstrained as f64 },
    })
}

/// Linear forms `L1(n) = sum a_i n_i` and `L2(m) = sum c_j m_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearFormPair {
    pub l1: Vec<i64>,
    pub l2: Vec<i64>,
}

impl LinearFormPair {
    pub fn new(l1: Vec<i64>, l2: Vec<i64>) -> Result<Self> {
        if l1.is_empty() || l1.iter().chain(&l2).any(|&c| c == 0) {
            return Err(Error::InvalidInput("linear forms must be non-degenerate".into()));
        }
        Ok(LinearFormPair { l1, l2 })
    }

    pub fn translation_invariant(&self) -> bool {
        self.l1.iter().sum::<i64>() == 0
    }

    pub fn gcd_l1(&self) -> i64 {
        self.l1.iter().fold(0i64, |g, &c| g.gcd(&c))
    }
}

/// `Phi(f; h) = sum over L1(n) = L2(m) of prod f_i(n_i) prod h_j(m_j)`.
pub fn operator_phi<T: Weight>(fs: &[SparseWeight<T>], hs: &[SparseWeight<T>], forms: &LinearFormPair) -> Result<T> {
    if fs.len() != forms.l1.len() || hs.len() != forms.l2.len() {
        return Err(Error::InvalidInput("weight count does not match the forms".into()));
    }
    let mut parts: Vec<(i128, &[(i128, T)])> = Vec::new();
    for (f, &a) in fs.iter().zip(&forms.l1) {
        parts.push((a as i128, f));
    }
    for (h, &c) in hs.iter().zip(&forms.l2) {
        parts.push((-(c as i128), h));
    }
    hyperplane_sum(&parts, 0)
}

/// `Phi` evaluated as `int prod f_i^(a_i alpha) prod h_j^(-c_j alpha) d alpha` on a grid
/// longer than the range of the forms.
pub fn phi_spectral(fs: &[SparseWeight<f64>], hs: &[SparseWeight<f64>], forms: &LinearFormPair) -> Result<f64> {
    if fs.len() != forms.l1.len() || hs.len() != forms.l2.len() {
        return Err(Error::InvalidInput("weight count does not match the forms".into()));
    }
    let reach = |w: &SparseWeight<f64>| w.iter().map(|e| e.0.abs()).max().unwrap_or(0);
    let range: i128 = fs.iter().zip(&forms.l1).map(|(f, &a)| reach(f) * a.abs() as i128).sum::<i128>()
        + hs.iter().zip(&forms.l2).map(|(h, &c)| reach(h) * c.abs() as i128).sum::<i128>();
    let g = (2 * range + 1) as usize;
    if g > 1 << 26 {
        return Err(budget("spectral grid", g, 1usize << 26));
    }
    let table = |w: &SparseWeight<f64>| {
        let mut hist = vec![0.0; g];
        for &(p, v) in w {
            hist[p.rem_euclid(g as i128) as usize] += v;
        }
        spectrum(&hist)
    };
    let ft: Vec<Vec<Complex64>> = fs.iter().map(table).collect();
    let ht: Vec<Vec<Complex64>> = hs.iter().map(table).collect();
    let gi = g as i128;
    let total: f64 = (0..g)
        .into_par_iter()
        .map(|k| {
            let mut z = Complex64::new(1.0, 0.0);
            for (t, &a) in ft.iter().zip(&forms.l1) {
                z *= t[(a as i128 * k as i128).rem_euclid(gi) as usize];
            }
            for (t, &c) in ht.iter().zip(&forms.l2) {
                z *= t[(-(c as i128) * k as i128).rem_euclid(gi) as usize];
            }
            z.re
        })
        .sum();
    Ok(total / g as f64)
}

/// `h(m) = sum_{z : P_D(z) = m} g(z)`.
pub fn pushforward<T: Weight>(g: &SparseWeight<T>, pd: &IntPoly) -> Result<SparseWeight<T>> {
    let mut out: Vec<(i128, T)> = g
        .iter()
        .map(|&(z, v)| {
            let m = pd.eval(&BigInt::from(z)).to_i128().ok_or_else(|| budget("P_D value", "> 2^127", "2^127"))?;
            Ok((m, v))
        })
        .collect::<Result<_>>()?;
    out.sort_unstable_by_key(|e| e.0);
    let mut merged: Vec<(i128, T)> = Vec::new();
    for (k, v) in out {
        match merged.last_mut() {
            Some(last) if last.0 == k => last.1 += v,
            _ => merged.push((k, v)),
        }
    }
    Ok(merged)
}

/// Largest number of `z` tuples enumerated by [`operator_lambda`].
pub const Z_TUPLE_LIMIT: usize = 20_000_000;

/// `Lambda_D(f; g) = sum over L1(n) = L2(P_D(z)) of prod f_i(n_i) prod g_j(z_j)`, by tabulating
/// `L1` and enumerating `z`.
pub fn operator_lambda<T: Weight>(
    fs: &[SparseWeight<T>],
    gs: &[SparseWeight<T>],
    forms: &LinearFormPair,
    pd: &IntPoly,
) -> Result<T> {
    if fs.len() != forms.l1.len() || gs.len() != forms.l2.len() {
        return Err(Error::InvalidInput("weight count does not match the forms".into()));
    }
    let parts: Vec<(i128, &[(i128, T)])> = fs.iter().zip(&forms.l1).map(|(f, &a)| (a as i128, f.as_slice())).collect();
    let left = distribution(&parts)?;
    let tuples: usize = gs.iter().map(|g| g.len()).product();
    if tuples > Z_TUPLE_LIMIT {
        return Err(budget("z tuples", tuples, Z_TUPLE_LIMIT));
    }
    let images: Vec<Vec<(i128, T)>> = gs
        .iter()
        .map(|g| {
            g.iter()
                .map(|&(z, v)| Ok((pd.eval(&BigInt::from(z)).to_i128().ok_or_else(|| budget("P_D value", "> 2^127", "2^127"))?, v)))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let mut acc = T::zero();
    let mut idx = vec![0usize; gs.len()];
    if images.iter().any(|g| g.is_empty()) {
        return Ok(acc);
    }
    loop {
        let mut target = 0i128;
        let mut w = T::one();
        for (j, &i) in idx.iter().enumerate() {
            target += forms.l2[j] as i128 * images[j][i].0;
            w = w * images[j][i].1;
        }
        acc += w * lookup(&left, target);
        // odometer
        let mut j = 0;
        loop {
            if j == idx.len() {
                return Ok(acc);
            }
            idx[j] += 1;
            if idx[j] < images[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// An integer vector `v` with `L1(v) = 1`, when `gcd(L1) = 1`.
pub fn unit_vector(l1: &[i64]) -> Option<Vec<i64>> {
    // running extended gcd: g = sum v_i a_i
    let mut g = 0i64;
    let mut v: Vec<i64> = Vec::with_capacity(l1.len());
    for &a in l1 {
        let e = g.extended_gcd(&a);
        // e.gcd = e.x * g + e.y * a
        for vi in v.iter_mut() {
            *vi *= e.x;
        }
        v.push(e.y);
        g = e.gcd;
    }
    if g == -1 {
        v.iter_mut().for_each(|x| *x = -*x);
        g = 1;
    }
    (g == 1).then_some(v)
}

/// `Psi_z(f) = sum over L1(n) = 0 of prod f_i(n_i + v_i L2(P_D(z)))`.
pub fn operator_psi<T: Weight>(
    z: &[i64],
    fs: &[SparseWeight<T>],
    forms: &LinearFormPair,
    pd: &IntPoly,
    v: &[i64],
) -> Result<T> {
    if v.len() != forms.l1.len() || forms.l1.iter().zip(v).map(|(a, b)| a * b).sum::<i64>() != 1 {
        return Err(Error::InvalidInput("v must satisfy L1(v) = 1".into()));
    }
    if z.len() != forms.l2.len() || fs.len() != forms.l1.len() {
        return Err(Error::InvalidInput("argument lengths do not match the forms".into()));
    }
    let u: i128 = z
        .iter()
        .zip(&forms.l2)
        .map(|(&zj, &c)| c as i128 * pd.eval_i64(zj).to_i128().unwrap())
        .sum();
    let shifted: Vec<SparseWeight<T>> = fs
        .iter()
        .zip(v)
        .map(|(f, &vi)| f.iter().map(|&(p, w)| (p - vi as i128 * u, w)).collect())
        .collect();
    let parts: Vec<(i128, &[(i128, T)])> = shifted.iter().zip(&forms.l1).map(|(f, &a)| (a as i128, f.as_slice())).collect();
    hyperplane_sum(&parts, 0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TelescopeCheck {
    pub lhs: i128,
    pub rhs: f64,
    pub diff_sq: i128,
    pub holds: bool,
}

/// `|Psi_z(f) - Psi_z(g)| <= s N^{s-1} (||f - g||_2^2 / N)^{1/2}` for `{0,1}`-valued `f, g`
/// on `[N]`, decided exactly by squaring.
pub fn telescoping_check(
    z: &[i64],
    f: &SparseWeight<i128>,
    g: &SparseWeight<i128>,
    forms: &LinearFormPair,
    pd: &IntPoly,
    v: &[i64],
    n: u64,
) -> Result<TelescopeCheck> {
    for w in [f, g] {
        if w.iter().any(|&(p, x)| p < 1 || p > n as i128 || !(x == 0 || x == 1)) {
            return Err(Error::InvalidInput("weights must be {0,1}-valued on [N]".into()));
        }
    }
    let s = forms.l1.len();
    let fs = vec![f.clone(); s];
    let gs = vec![g.clone(); s];
    let lhs = (operator_psi(z, &fs, forms, pd, v)? - operator_psi(z, &gs, forms, pd, v)?).abs();
    let fm: HashMap<i128, i128> = f.iter().copied().collect();
    let gm: HashMap<i128, i128> = g.iter().copied().collect();
    let diff_sq: i128 = (1..=n as i128)
        .map(|k| {
            let d = fm.get(&k).copied().unwrap_or(0) - gm.get(&k).copied().unwrap_or(0);
            d * d
        })
        .sum();
    let nb = BigInt::from(n);
    let left = BigInt::from(lhs) * BigInt::from(lhs) * &nb;
    let right = BigInt::from((s * s) as u64) * num_traits::pow(nb, 2 * (s - 1)) * BigInt::from(diff_sq);
    let rhs = s as f64 * (n as f64).powi(s as i32 - 1) * (diff_sq as f64 / n as f64).sqrt();
    Ok(TelescopeCheck { lhs, rhs, diff_sq, holds: left <= right })
}

/// A colouring of `[N]` with classes numbered `1..=r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Colouring {
    pub n: u64,
    pub classes: Vec<u32>,
}

impl Colouring {
    pub fn new(classes: Vec<u32>) -> Result<Self> {
        if classes.iter().any(|&c| c == 0) {
            return Err(Error::InvalidInput("classes are numbered from 1".into()));
        }
        Ok(Colouring { n: classes.len() as u64, classes })
    }

    /// Relabels arbitrary labels to `1..=r` in order of first appearance.
    pub fn from_labels<L: std::hash::Hash + Eq>(labels: impl IntoIterator<Item = L>) -> Self {
        let mut ids: HashMap<L, u32> = HashMap::new();
        let classes: Vec<u32> = labels
            .into_iter()
            .map(|l| {
                let next = ids.len() as u32 + 1;
                *ids.entry(l).or_insert(next)
            })
            .collect();
        Colouring { n: classes.len() as u64, classes }
    }

    pub fn r(&self) -> u32 {
        self.classes.iter().copied().max().unwrap_or(0)
    }

    pub fn class_of(&self, x: u64) -> u32 {
        self.classes[(x - 1) as usize]
    }

    pub fn members(&self, k: u32) -> Vec<u64> {
        (1..=self.n).filter(|&x| self.class_of(x) == k).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,class\n");
        for (i, c) in self.classes.iter().enumerate() {
            s.push_str(&format!("{},{}\n", i + 1, c));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<(u64, u32)> = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('n')) {
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::InvalidInput(format!("bad colouring row: {line}")))?;
            let n: u64 = a.trim().parse().map_err(|_| Error::InvalidInput(format!("bad row: {line}")))?;
            let c: u32 = b.trim().parse().map_err(|_| Error::InvalidInput(format!("bad row: {line}")))?;
            rows.push((n, c));
        }
        rows.sort_unstable();
        if rows.iter().enumerate().any(|(i, r)| r.0 != i as u64 + 1) {
            return Err(Error::InvalidInput("colouring rows must cover 1..N exactly once".into()));
        }
        Colouring::new(rows.into_iter().map(|r| r.1).collect())
    }
}

/// Parses a newline-separated list of integers.
pub fn parse_set(text: &str) -> Result<Vec<u64>> {
    let mut v: Vec<u64> = text
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::InvalidInput(format!("bad set element: {t}"))))
        .collect::<Result<_>>()?;
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

pub fn random_colouring(n: u64, r: u32, seed: u64) -> Colouring {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Colouring { n, classes: (0..n).map(|_| rng.gen_range(1..=r)).collect() }
}

pub fn congruence_colouring(n: u64, q: u64) -> Colouring {
    Colouring { n, classes: (1..=n).map(|x| (x % q) as u32 + 1).collect() }
}

fn pow_exceeds(x: u64, e: u64, n: u64) -> bool {
    // x^e > n without overflow
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc *= x as u128;
        if acc > n as u128 {
            return true;
        }
    }
    false
}

/// Colours `x` by the least `i` with `x^{d^i} > N`, capped at `r`: class `r` is
/// `{1, ..., M^d}` with `M = N^{d^{-r}}`.
pub fn sharpness_colouring(n: u64, d: u32, r: u32) -> Result<Colouring> {
    if d < 2 || r < 1 {
        return Err(Error::InvalidInput("need d >= 2 and r >= 1".into()));
    }
    let dr = (d as u64).checked_pow(r).ok_or_else(|| budget("d^r", "overflow", u64::MAX))?;
    if pow_exceeds(2, dr, n) {
        return Err(Error::InvalidInput("N^{d^-r} must be at least 2".into()));
    }
    let classes: Vec<u32> = (1..=n)
        .map(|x| {
            let mut i = 1u32;
            while i < r && !pow_exceeds(x, (d as u64).pow(i), n) {
                i += 1;
            }
            i
        })
        .collect();
    let col = Colouring { n, classes };
    for k in 1..=r {
        if col.members(k).is_empty() {
            return Err(Error::InvalidInput(format!("colour class {k} is empty")));
        }
    }
    Ok(col)
}

/// `#{(n, z) in C_k^s x C_k^t : L1(n) = L2(P(z))}` for each class `k`.
pub fn monochromatic_linearised_counts(forms: &LinearFormPair, p: &IntPoly, col: &Colouring) -> Result<Vec<u128>> {
    (1..=col.r())
        .map(|k| {
            let ind = indicator(&col.members(k));
            let fs = vec![ind.clone(); forms.l1.len()];
            let gs = vec![ind; forms.l2.len()];
            Ok(operator_lambda(&fs, &gs, forms, p)? as u128)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassBound {
    pub class: u32,
    pub count: u128,
    pub bound: BigInt,
    pub holds: bool,
}

/// `#{(n, z) in A^s x C_k^t : L1(n) = L2(P_D(z))} <= |C_k| N^{s-1} Z^{t-1}` per class, for a
/// colouring of `[Z]` and `A` in `[N]`, `N = P_D(Z)`.
pub fn class_count_bounds(forms: &LinearFormPair, pd: &IntPoly, a: &[u64], col: &Colouring) -> Result<Vec<ClassBound>> {
    let t = forms.l2.len();
    if t == 0 {
        return Err(Error::InvalidInput("the bound needs t >= 1".into()));
    }
    let s = forms.l1.len();
    let z = col.n;
    let n = pd.eval(&BigInt::from(z));
    let fa = indicator(a);
    (1..=col.r())
        .map(|k| {
            let members = col.members(k);
            let fs = vec![fa.clone(); s];
            let gs = vec![indicator(&members); t];
            let count = operator_lambda(&fs, &gs, forms, pd)? as u128;
            let bound = BigInt::from(members.len()) * num_traits::pow(n.clone(), s - 1) * num_traits::pow(BigInt::from(z), t - 1);
            Ok(ClassBound { class: k, count, holds: BigInt::from(count) <= bound, bound })
        })
        .collect()
}

/// Linearised counts for `A` and `A + h`; equal whenever `L1(1, ..., 1) = 0`.
pub fn translation_counts(forms: &LinearFormPair, pd: &IntPoly, a: &[u64], zs: &[u64], h: i64) -> Result<(i128, i128)> {
    let fa = indicator(a);
    let shifted: SparseWeight<i128> = fa.iter().map(|&(p, v)| (p + h as i128, v)).collect();
    let gs = vec![indicator(zs); forms.l2.len()];
    let before = operator_lambda(&vec![fa; forms.l1.len()], &gs, forms, pd)?;
    let after = operator_lambda(&vec![shifted; forms.l1.len()], &gs, forms, pd)?;
    Ok((before, after))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteChoice {
    /// Every `S` in `U` with `|S| <= |V|` has a common partner in `V`.
    pub hypothesis: bool,
    /// Some `x` in `V` is a partner of every `u` in `U`.
    pub conclusion: bool,
}

/// Largest `|U|` for which the hypothesis is checked over all subsets.
pub const FINITE_CHOICE_LIMIT: usize = 20;

/// Checks the hypothesis and conclusion of the finite choice principle on a table
/// `e[u][v]` by exhaustion.
pub fn finite_choice_check(e: &[Vec<bool>]) -> Result<FiniteChoice> {
    let nu = e.len();
    if nu == 0 || nu > FINITE_CHOICE_LIMIT {
        return Err(budget("finite choice rows", nu, FINITE_CHOICE_LIMIT));
    }
    let nv = e[0].len();
    if nv == 0 || e.iter().any(|row| row.len() != nv) {
        return Err(Error::InvalidInput("table must be a nonempty rectangle".into()));
    }
    let conclusion = (0..nv).any(|x| e.iter().all(|row| row[x]));
    let hypothesis = (1u32..(1 << nu)).filter(|m| m.count_ones() as usize <= nv).all(|m| {
        (0..nv).any(|x| (0..nu).filter(|u| m >> u & 1 == 1).all(|u| e[u][x]))
    });
    Ok(FiniteChoice { hypothesis, conclusion })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ColourGenerator {
    Random { r: u32 },
    Congruence { q: u64 },
    Interval { r: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DenseGenerator {
    RandomSubset { delta: f64 },
    /// A random residue class modulo `floor(1/delta)`.
    Progression { delta: f64 },
    Evens,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub label: String,
    pub seed: Option<u64>,
    /// `max_k |S(C_k)| / N^{s-d}` (colourings) or `|S(A)| / N^{s-d}` (sets).
    pub ratio: f64,
    pub counts: Vec<u128>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupersaturationReport {
    pub n: u64,
    pub s: usize,
    pub d: usize,
    pub trials: Vec<TrialRecord>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub argmin: String,
    /// Colour classes or set elements of the minimizing instance.
    pub argmin_instance: Vec<u64>,
}

fn finish_report(n: u64, eq: &RadoEquation, trials: Vec<TrialRecord>, instances: Vec<Vec<u64>>) -> SupersaturationReport {
    let (imin, _) = trials
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.ratio.total_cmp(&b.1.ratio))
        .expect("at least one trial");
    SupersaturationReport {
        n,
        s: eq.s(),
        d: eq.degree(),
        min_ratio: trials[imin].ratio,
        max_ratio: trials.iter().map(|t| t.ratio).fold(f64::MIN, f64::max),
        argmin: trials[imin].label.clone(),
        argmin_instance: instances[imin].clone(),
        trials,
    }
}

/// For each colouring, `max_k |S(C_k)| / N^{s-d}` with `S` the distinct-coordinate solutions.
pub fn supersaturation_colourings(eq: &RadoEquation, colourings: &[(String, Option<u64>, Colouring)]) -> Result<SupersaturationReport> {
    if !eq.b.is_zero() {
        return Err(Error::InvalidInput("supersaturation counts need b = 0".into()));
    }
    let verdict = decide_partition_regular(eq, &DecideOptions::default())?;
    if verdict.status != RegularityStatus::Regular {
        return Err(Error::NotRegular(serde_json_like(&verdict.status, &verdict.reason)));
    }
    let n = colourings.first().map(|c| c.2.n).ok_or_else(|| Error::InvalidInput("no colourings".into()))?;
    let power = (n as f64).powi(eq.s() as i32 - eq.degree() as i32);
    let trials: Vec<TrialRecord> = colourings
        .par_iter()
        .map(|(label, seed, col)| {
            let counts: Vec<u128> = (1..=col.r())
                .map(|k| enumerate_solutions(eq, &col.members(k), SolutionFilter::Distinct))
                .collect::<Result<_>>()?;
            let best = counts.iter().copied().max().unwrap_or(0);
            Ok(TrialRecord { label: label.clone(), seed: *seed, ratio: best as f64 / power, counts })
        })
        .collect::<Result<_>>()?;
    let instances = colourings.iter().map(|c| c.2.classes.iter().map(|&k| k as u64).collect()).collect();
    Ok(finish_report(n, eq, trials, instances))
}

/// For each set, `|S(A)| / N^{s-d}`.
pub fn supersaturation_sets(eq: &RadoEquation, n: u64, sets: &[(String, Option<u64>, Vec<u64>)]) -> Result<SupersaturationReport> {
    let verdict = decide_density_regular(eq, &DecideOptions::default())?;
    if verdict.status != RegularityStatus::Regular {
        return Err(Error::NotRegular(serde_json_like(&verdict.status, &verdict.reason)));
    }
    let power = (n as f64).powi(eq.s() as i32 - eq.degree() as i32);
    let trials: Vec<TrialRecord> = sets
        .par_iter()
        .map(|(label, seed, set)| {
            let c = enumerate_solutions(eq, set, SolutionFilter::Distinct)?;
            Ok(TrialRecord { label: label.clone(), seed: *seed, ratio: c as f64 / power, counts: vec![c] })
        })
        .collect::<Result<_>>()?;
    let instances = sets.iter().map(|s| s.2.clone()).collect();
    Ok(finish_report(n, eq, trials, instances))
}

fn serde_json_like(status: &RegularityStatus, reason: &str) -> String {
    format!("verdict {status:?} ({reason})")
}

pub fn generate_colourings(n: u64, d: u32, generator: &ColourGenerator, trials: u32, seed: u64) -> Result<Vec<(String, Option<u64>, Colouring)>> {
    Ok(match generator {
        ColourGenerator::Random { r } => (0..trials as u64)
            .map(|i| (format!("random-{}", seed + i), Some(seed + i), random_colouring(n, *r, seed + i)))
            .collect(),
        ColourGenerator::Congruence { q } => vec![(format!("mod-{q}"), None, congruence_colouring(n, *q))],
        ColourGenerator::Interval { r } => vec![(format!("interval-{r}"), None, sharpness_colouring(n, d, *r)?)],
    })
}

pub fn generate_sets(n: u64, generator: &DenseGenerator, trials: u32, seed: u64) -> Result<Vec<(String, Option<u64>, Vec<u64>)>> {
    let check = |delta: f64| {
        if delta > 0.0 && delta <= 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidInput("delta must lie in (0, 1]".into()))
        }
    };
    Ok(match generator {
        DenseGenerator::RandomSubset { delta } => {
            check(*delta)?;
            (0..trials as u64)
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed + i);
                    let set = (1..=n).filter(|_| rng.gen_bool(*delta)).collect();
                    (format!("subset-{}", seed + i), Some(seed + i), set)
                })
                .collect()
        }
        DenseGenerator::Progression { delta } => {
            check(*delta)?;
            let q = (1.0 / delta).floor().max(1.0) as u64;
            (0..trials as u64)
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed + i);
                    let a = rng.gen_range(0..q);
                    (format!("progression-{a}-mod-{q}"), Some(seed + i), (1..=n).filter(|x| x % q == a).collect())
                })
                .collect()
        }
        DenseGenerator::Evens => vec![("evens".to_string(), None, (1..=n).filter(|x| x % 2 == 0).collect())],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sq() -> IntPoly {
        IntPoly::from_i64(&[0, 0, 1])
    }

    fn brute(a: &[i64], b: i64, set: &[u64], p: &IntPoly, filter: SolutionFilter) -> u128 {
        let vals: Vec<i64> = set.iter().map(|&x| p.eval_i64(x as i64).to_i64().unwrap()).collect();
        let s = a.len();
        let mut idx = vec![0usize; s];
        let mut count = 0u128;
        loop {
            let sum: i64 = (0..s).map(|i| a[i] * vals[idx[i]]).sum();
            if sum == b {
                let ok = match filter {
                    SolutionFilter::All => true,
                    SolutionFilter::NonConstant => idx.iter().any(|&i| i != idx[0]),
                    SolutionFilter::Distinct => (0..s).all(|i| (i + 1..s).all(|j| idx[i] != idx[j])),
                };
                count += ok as u128;
            }
            let mut j = 0;
            loop {
                if j == s {
                    return count;
                }
                idx[j] += 1;
                if idx[j] < set.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
        }
    }

    #[test]
    fn solution_counts() {
        let set: Vec<u64> = (1..=10).collect();
        let eq = RadoEquation::homogeneous(&[1, -1], sq()).unwrap();
        assert_eq!(enumerate_solutions(&eq, &set, SolutionFilter::All).unwrap(), 10);
        let eq = RadoEquation::homogeneous(&[1, 1, -1, -1], sq()).unwrap();
        for f in [SolutionFilter::All, SolutionFilter::NonConstant, SolutionFilter::Distinct] {
            assert_eq!(enumerate_solutions(&eq, &set, f).unwrap(), brute(&eq.a, 0, &set, &sq(), f));
        }
        let set20: Vec<u64> = (1..=20).collect();
        let eq = RadoEquation::homogeneous(&[1, 2, -3], sq()).unwrap();
        assert_eq!(
            enumerate_solutions(&eq, &set20, SolutionFilter::All).unwrap(),
            brute(&eq.a, 0, &set20, &sq(), SolutionFilter::All)
        );
    }

    #[test]
    fn set_partition_counts() {
        let bell = [1usize, 1, 2, 5, 15, 52, 203];
        for (s, &b) in bell.iter().enumerate() {
            assert_eq!(set_partitions(s).len(), b);
        }
    }

    #[test]
    fn diagonal_counts() {
        let eq = RadoEquation::homogeneous(&[1, 1, -1, -1], sq()).unwrap();
        let out = count_diagonal(&eq, 30, DiagonalConstraint::Fixed { j: 1, c: 31 }).unwrap();
        assert_eq!(out.count, 0);
        let eqc = RadoEquation::homogeneous(&[2, -1, -1], sq()).unwrap();
        let set: Vec<u64> = (1..=30).collect();
        let out = count_diagonal(&eq, 30, DiagonalConstraint::Equal { j: 1, k: 2 }).unwrap();
        assert_eq!(out.count, brute(&eqc.a, 0, &set, &sq(), SolutionFilter::All));
        let ratios: Vec<f64> = [20u64, 40, 80]
            .iter()
            .map(|&n| count_diagonal(&eq, n, DiagonalConstraint::Equal { j: 1, k: 2 }).unwrap().ratio_total)
            .collect();
        assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2], "{ratios:?}");
    }

    #[test]
    fn phi_examples() {
        let forms = LinearFormPair::new(vec![1, -1], vec![1]).unwrap();
        let f = indicator(&[1, 2, 3]);
        let h = indicator(&[1, 2]);
        assert_eq!(operator_phi(&[f.clone(), f.clone()], &[h.clone()], &forms).unwrap(), 3);
        let zero: SparseWeight<i128> = vec![(1, 0), (2, 0)];
        assert_eq!(operator_phi(&[zero.clone(), zero.clone()], &[zero], &forms).unwrap(), 0);
    }

    #[test]
    fn lambda_examples() {
        let forms = LinearFormPair::new(vec![1, -1], vec![1]).unwrap();
        let f = indicator(&(1..=9).collect::<Vec<_>>());
        let g = indicator(&[1, 2, 3]);
        assert_eq!(operator_lambda(&[f.clone(), f.clone()], &[g.clone()], &forms, &sq()).unwrap(), 13);
        // the same count through the pushforward and Phi
        let h = pushforward(&g, &sq()).unwrap();
        assert_eq!(operator_phi(&[f.clone(), f.clone()], &[h], &forms).unwrap(), 13);
        // t = 0
        let forms0 = LinearFormPair::new(vec![1, -1], vec![]).unwrap();
        assert_eq!(operator_lambda(&[f.clone(), f], &[], &forms0, &sq()).unwrap(), 9);
    }

    #[test]
    fn phi_with_mu_matches_scaled_lambda() {
        use num_rational::BigRational;
        let forms = LinearFormPair::new(vec![1, 1, -2], vec![3]).unwrap();
        let pd = IntPoly::from_i64(&[0, 1, 1]);
        let z = 7u64;
        let mu = crate::wtrick::mu_weight(&pd, 1, z).unwrap();
        let hmu: SparseWeight<f64> = mu.entries.iter().map(|&(p, v)| (p as i128, v as f64 / mu.den as f64)).collect();
        let f: SparseWeight<f64> = (1..=mu.n as i128).filter(|x| x % 3 != 1).map(|x| (x, 1.0)).collect();
        let phi = operator_phi(&[f.clone(), f.clone(), f.clone()], &[hmu], &forms).unwrap();
        let g: SparseWeight<f64> = (1..=z as i128).map(|x| (x, 1.0)).collect();
        let lam = operator_lambda(&[f.clone(), f.clone(), f], &[g], &forms, &pd).unwrap();
        let scale = BigRational::new(mu.n.into(), z.into()).to_f64().unwrap();
        assert!((phi - scale * lam).abs() < 1e-9 * phi.abs().max(1.0), "{phi} vs {}", scale * lam);
    }

    #[test]
    fn psi_decomposes_lambda() {
        let forms = LinearFormPair::new(vec![2, -3, 1], vec![1, 2]).unwrap();
        let v = unit_vector(&forms.l1).unwrap();
        assert_eq!(forms.l1.iter().zip(&v).map(|(a, b)| a * b).sum::<i64>(), 1);
        let f = indicator(&(1..=30).filter(|x| x % 4 != 0).collect::<Vec<_>>());
        let g = indicator(&[1, 2, 3]);
        let fs = vec![f.clone(), f.clone(), f.clone()];
        let lam = operator_lambda(&fs, &[g.clone(), g.clone()], &forms, &sq()).unwrap();
        let mut total = 0i128;
        for z1 in 1..=3 {
            for z2 in 1..=3 {
                total += operator_psi(&[z1, z2], &fs, &forms, &sq(), &v).unwrap();
            }
        }
        assert_eq!(total, lam);
        // zero shift gives the shift-free count
        let forms1 = LinearFormPair::new(vec![1, -1], vec![1, -1]).unwrap();
        let v1 = unit_vector(&forms1.l1).unwrap();
        let p0 = operator_psi(&[2, 2], &[f.clone(), f.clone()], &forms1, &sq(), &v1).unwrap();
        assert_eq!(p0, f.len() as i128);
        assert!(operator_psi(&[1], &fs, &forms, &sq(), &[1, 1, 1]).is_err());
        assert!(unit_vector(&[2, 4]).is_none());
    }

    #[test]
    fn sharpness_example() {
        let col = sharpness_colouring(256, 2, 2).unwrap();
        assert_eq!(col.members(2), (1..=16).collect::<Vec<_>>());
        assert_eq!(col.members(1), (17..=256).collect::<Vec<_>>());
        assert!(sharpness_colouring(15, 2, 2).is_err());
        let forms = LinearFormPair::new(vec![1, -1], vec![2]).unwrap();
        let counts = monochromatic_linearised_counts(&forms, &sq(), &col).unwrap();
        assert_eq!(counts, vec![0, 22]);
        assert!(counts.iter().all(|&c| c <= 64));
    }

    #[test]
    fn colouring_csv_roundtrip() {
        let col = random_colouring(25, 3, 9);
        assert_eq!(Colouring::from_csv(&col.to_csv()).unwrap(), col);
        assert_eq!(parse_set("3\n1\n2\n3\n").unwrap(), vec![1, 2, 3]);
        let c = Colouring::from_labels([5, 7, 5, -1]);
        assert_eq!(c.classes, vec![1, 2, 1, 3]);
    }

    #[test]
    fn finite_choice() {
        let e = vec![vec![true, false], vec![true, true], vec![true, false]];
        let r = finite_choice_check(&e).unwrap();
        assert!(r.hypothesis && r.conclusion);
        let e = vec![vec![true, false], vec![false, true]];
        let r = finite_choice_check(&e).unwrap();
        assert!(!r.hypothesis && !r.conclusion);
    }

    #[test]
    fn class_bounds_and_translation() {
        let forms = LinearFormPair::new(vec![1, 1, -2], vec![1]).unwrap();
        let pd = IntPoly::from_i64(&[0, 1, 1]);
        let col = random_colouring(8, 2, 3);
        let n = pd.eval_i64(8).to_u64().unwrap();
        let a: Vec<u64> = (1..=n).filter(|x| x % 2 == 1).collect();
        for cb in class_count_bounds(&forms, &pd, &a, &col).unwrap() {
            assert!(cb.holds);
        }
        let (x, y) = translation_counts(&forms, &pd, &a, &[1, 2, 3], 5).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn supersaturation_gate() {
        let eq = RadoEquation::homogeneous(&[1, 1, -1, -1, 1], sq()).unwrap();
        let sets = generate_sets(30, &DenseGenerator::Evens, 1, 0).unwrap();
        assert!(matches!(supersaturation_sets(&eq, 30, &sets), Err(Error::NotRegular(_))));
        let eq = RadoEquation::homogeneous(&[1, 1, 1, -1, -1, -1], sq()).unwrap();
        let rep = supersaturation_sets(&eq, 30, &sets).unwrap();
        assert!(rep.min_ratio > 0.0);
    }

    proptest! {
        #[test]
        fn counts_match_brute_force(
            a in prop::collection::vec(prop_oneof![-3i64..=-1, 1i64..=3], 2..5),
            b in -6i64..6,
            set in prop::collection::btree_set(1u64..12, 1..7),
            c in prop::collection::vec(-2i64..3, 2..4),
        ) {
            let mut c = c;
            if c.last() == Some(&0) { c.push(1); }
            let p = IntPoly::from_i64(&c);
            prop_assume!(p.degree() >= 2);
            let set: Vec<u64> = set.into_iter().collect();
            let eq = RadoEquation::new(a.clone(), BigInt::from(b), p.clone()).unwrap();
            for f in [SolutionFilter::All, SolutionFilter::NonConstant, SolutionFilter::Distinct] {
                prop_assert_eq!(enumerate_solutions(&eq, &set, f).unwrap(), brute(&a, b, &set, &p, f));
            }
        }

        #[test]
        fn phi_matches_spectral(
            l1 in prop::collection::vec(prop_oneof![-3i64..=-1, 1i64..=3], 1..4),
            l2 in prop::collection::vec(prop_oneof![-2i64..=-1, 1i64..=2], 0..3),
            seed in 0u64..1000,
        ) {
            let forms = LinearFormPair::new(l1, l2).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut w = || -> SparseWeight<f64> { (1..=15).map(|x| (x, rand::Rng::gen_range(&mut rng, 0.0..1.0))).collect() };
            let fs: Vec<_> = (0..forms.l1.len()).map(|_| w()).collect();
            let hs: Vec<_> = (0..forms.l2.len()).map(|_| w()).collect();
            let exact = operator_phi(&fs, &hs, &forms).unwrap();
            let spectral = phi_spectral(&fs, &hs, &forms).unwrap();
            prop_assert!((exact - spectral).abs() <= 1e-6 * exact.abs().max(1.0));
        }
    }
}

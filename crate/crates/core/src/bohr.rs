//! Polynomial Bohr sets `{n : max_i ||Q(n) theta_i|| < rho}` and a polynomial growth check.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intersective::{aux_data, intersectivity_verdict, IntersectivityStatus};
use crate::polyring::IntPoly;

/// A frequency modulo 1: exact, or a 128-bit truncation of an irrational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theta {
    Rational(BigRational),
    /// `frac` is the fractional part in units of `2^-128`, off by at most `err` units.
    Fixed { label: String, frac: u128, err: u128 },
}

fn two_128() -> BigUint {
    BigUint::one() << 128u32
}

impl Theta {
    pub fn rational(num: i64, den: i64) -> Self {
        Theta::Rational(BigRational::new(num.into(), den.into()))
    }

    /// Fractional part of `sqrt(k)` for non-square `k`.
    pub fn sqrt(k: u64) -> Result<Self> {
        let r = (k as f64).sqrt().round() as u64;
        if r * r == k {
            return Ok(Theta::rational(0, 1));
        }
        let root: BigUint = (BigUint::from(k) << 256u32).sqrt();
        let frac = (root % two_128()).to_u128().unwrap();
        Ok(Theta::Fixed { label: format!("sqrt{k}"), frac, err: 1 })
    }

    /// Fractional part of the golden ratio.
    pub fn golden() -> Self {
        let root: BigUint = (BigUint::from(5u32) << 256u32).sqrt();
        let frac = (((root - two_128()) >> 1u32) % two_128()).to_u128().unwrap();
        Theta::Fixed { label: "golden".into(), frac, err: 2 }
    }

    /// Accepts `p/q`, a decimal, `sqrtK` or `golden`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "golden" {
            return Ok(Theta::golden());
        }
        if let Some(k) = t.strip_prefix("sqrt") {
            let k: u64 = k.trim_matches(|c| c == '(' || c == ')').parse().map_err(|_| Error::InvalidInput(format!("bad theta: {t}")))?;
            return Theta::sqrt(k);
        }
        parse_rational(t).map(Theta::Rational)
    }

    pub fn label(&self) -> String {
        match self {
            Theta::Rational(r) => r.to_string(),
            Theta::Fixed { label, .. } => label.clone(),
        }
    }

    fn scaled(&self, a: &BigInt) -> Theta {
        match self {
            Theta::Rational(r) => Theta::Rational(r * BigRational::from_integer(a.clone())),
            Theta::Fixed { label, frac, err } => {
                let m = a.mod_floor(&BigInt::from(two_128())).to_u128().unwrap();
                Theta::Fixed {
                    label: format!("{a}*{label}"),
                    frac: frac.wrapping_mul(m),
                    err: err.saturating_mul(a.abs().to_u128().unwrap_or(u128::MAX)),
                }
            }
        }
    }
}

/// Parses `p/q` or a decimal string exactly.
pub fn parse_rational(t: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("bad rational: {t}"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), fp.len());
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    In,
    Out,
    /// Within the precision budget of the boundary; counted as out.
    Unsure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BohrSpec {
    pub q: IntPoly,
    pub theta: Vec<Theta>,
    pub rho: BigRational,
}

impl BohrSpec {
    pub fn new(q: IntPoly, theta: Vec<Theta>, rho: BigRational) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidInput("theta must have at least one coordinate".into()));
        }
        if !rho.is_positive() {
            return Err(Error::InvalidInput("rho must be positive".into()));
        }
        Ok(BohrSpec { q, theta, rho })
    }

    pub fn k(&self) -> usize {
        self.theta.len()
    }

    pub fn with_rho(&self, rho: BigRational) -> Self {
        BohrSpec { rho, ..self.clone() }
    }
}

fn member_single(value: &BigInt, theta: &Theta, rho: &BigRational) -> Result<Membership> {
    match theta {
        Theta::Rational(t) => {
            let q = t.denom();
            let r = (value * t.numer()).mod_floor(q);
            let dist = (q - &r).min(r);
            // dist / q < rho
            Ok(if &dist * rho.denom() < rho.numer() * q { Membership::In } else { Membership::Out })
        }
        Theta::Fixed { frac, err, .. } => {
            let scale = BigRational::from_integer(BigInt::from(two_128()));
            let rho_units = rho * &scale;
            let e = BigInt::from(*err) * value.abs();
            if BigRational::from_integer(e.clone() * 100) >= rho_units {
                return Err(Error::PrecisionBudget(format!(
                    "|Q(n)| = {} exceeds the fixed-point budget for rho",
                    value.abs()
                )));
            }
            let e = e.to_u128().unwrap();
            let m = value.mod_floor(&BigInt::from(two_128())).to_u128().unwrap();
            let f = m.wrapping_mul(*frac);
            let d = f.min(f.wrapping_neg());
            let lo = BigRational::from_integer(BigInt::from(d.saturating_sub(e)));
            let hi = BigRational::from_integer(BigInt::from(d) + BigInt::from(e));
            Ok(if hi < rho_units {
                Membership::In
            } else if lo >= rho_units {
                Membership::Out
            } else {
                Membership::Unsure
            })
        }
    }
}

fn member_value(value: &BigInt, spec: &BohrSpec) -> Result<Membership> {
    let mut out = Membership::In;
    for t in &spec.theta {
        match member_single(value, t, &spec.rho)? {
            Membership::Out => return Ok(Membership::Out),
            Membership::Unsure => out = Membership::Unsure,
            Membership::In => {}
        }
    }
    Ok(out)
}

pub fn membership(spec: &BohrSpec, n: u64) -> Result<Membership> {
    member_value(&spec.q.eval(&BigInt::from(n)), spec)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BohrSet {
    pub z: u64,
    /// `mask[n - 1]` for `n` in `[Z]`; unsure points are excluded.
    pub mask: Vec<bool>,
    pub unsure: u64,
}

impl BohrSet {
    pub fn members(&self) -> Vec<u64> {
        (1..=self.z).filter(|&n| self.mask[(n - 1) as usize]).collect()
    }

    pub fn size(&self) -> u64 {
        self.mask.iter().filter(|&&b| b).count() as u64
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= 1 && n <= self.z && self.mask[(n - 1) as usize]
    }

    /// One `0`/`1` character per element of `[Z]`.
    pub fn bitstring(&self) -> String {
        self.mask.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

pub fn bohr_set(spec: &BohrSpec, z: u64) -> Result<BohrSet> {
    let status: Vec<Membership> = (1..=z).into_par_iter().map(|n| membership(spec, n)).collect::<Result<_>>()?;
    Ok(BohrSet {
        z,
        mask: status.iter().map(|&m| m == Membership::In).collect(),
        unsure: status.iter().filter(|&&m| m == Membership::Unsure).count() as u64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BohrDensityReport {
    pub k: usize,
    pub z: u64,
    pub rho: String,
    pub samples: usize,
    pub min_density: f64,
    pub argmin_theta: Vec<String>,
    /// First element of `Bohr_Q(theta, rho/2)` for the minimizing `theta`.
    pub witness: Option<u64>,
    pub unsure_total: u64,
    /// Least `Z` at which every sampled Bohr set is nonempty, if it is at most `z`.
    pub least_nonempty_z: Option<u64>,
    pub below_threshold: bool,
}

/// Sample frequencies: small-denominator rationals, random dyadic rationals and two irrationals.
pub fn sample_thetas(k: usize, samples: usize, seed: u64) -> Result<Vec<Vec<Theta>>> {
    let mut out: Vec<Vec<Theta>> = Vec::new();
    for q in 1..=12i64 {
        for a in 0..q {
            out.push((0..k as i64).map(|i| Theta::rational((a * (i + 1)) % q, q)).collect());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        out.push((0..k).map(|_| Theta::rational(rng.gen_range(0..1i64 << 32), 1i64 << 32)).collect());
    }
    out.push(vec![Theta::sqrt(2)?; k]);
    out.push(vec![Theta::golden(); k]);
    Ok(out)
}

/// Minimum density of `Bohr_Q(theta, rho) ∩ [Z]` over sampled `theta`; `Q` must be certified
/// intersective.
pub fn bohr_density_report(q: &IntPoly, k: usize, rho: &BigRational, z: u64, samples: usize, seed: u64) -> Result<BohrDensityReport> {
    let verdict = intersectivity_verdict(q, 1000)?;
    if verdict.status != IntersectivityStatus::Certified {
        return Err(Error::InvalidInput(format!(
            "Bohr density needs an intersective polynomial; verdict {:?}",
            verdict.status
        )));
    }
    if k == 0 || z == 0 {
        return Err(Error::InvalidInput("need K >= 1 and Z >= 1".into()));
    }
    let values: Vec<BigInt> = (1..=z).map(|n| q.eval(&BigInt::from(n))).collect();
    let thetas = sample_thetas(k, samples, seed)?;
    let results: Vec<(u64, u64, Option<u64>)> = thetas
        .par_iter()
        .map(|th| {
            let spec = BohrSpec::new(q.clone(), th.clone(), rho.clone())?;
            let mut count = 0u64;
            let mut unsure = 0u64;
            let mut first = None;
            for (i, v) in values.iter().enumerate() {
                match member_value(v, &spec)? {
                    Membership::In => {
                        count += 1;
                        first.get_or_insert(i as u64 + 1);
                    }
                    Membership::Unsure => unsure += 1,
                    Membership::Out => {}
                }
            }
            Ok((count, unsure, first))
        })
        .collect::<Result<_>>()?;
    let (imin, _) = results.iter().enumerate().min_by_key(|(_, r)| r.0).unwrap();
    let half = BohrSpec::new(q.clone(), thetas[imin].clone(), rho / BigInt::from(2))?;
    let mut witness = None;
    for (i, v) in values.iter().enumerate() {
        if member_value(v, &half)? == Membership::In {
            witness = Some(i as u64 + 1);
            break;
        }
    }
    let below = results.iter().any(|r| r.2.is_none());
    Ok(BohrDensityReport {
        k,
        z,
        rho: rho.to_string(),
        samples: thetas.len(),
        min_density: results[imin].0 as f64 / z as f64,
        argmin_theta: thetas[imin].iter().map(Theta::label).collect(),
        witness,
        unsure_total: results.iter().map(|r| r.1).sum(),
        least_nonempty_z: if below { None } else { results.iter().filter_map(|r| r.2).max() },
        below_threshold: below,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainmentCheck {
    pub t: Option<u64>,
    pub checked: u64,
    pub holds: bool,
}

/// With `t` the first element of `Bohr_Q(theta, rho/2)` below `Z/2` and `P(X) = Q(X+t) - Q(t)`,
/// checks `t + (Bohr_P(theta, rho/2) ∩ [Z/2]) ⊆ Bohr_Q(theta, rho) ∩ [Z]`.
pub fn translate_containment(spec: &BohrSpec, z: u64) -> Result<ContainmentCheck> {
    let half = spec.with_rho(&spec.rho / BigInt::from(2));
    let zh = z / 2;
    let mut t = None;
    for n in 1..zh {
        if membership(&half, n)? == Membership::In {
            t = Some(n);
            break;
        }
    }
    let Some(t) = t else {
        return Ok(ContainmentCheck { t: None, checked: 0, holds: true });
    };
    let tb = BigInt::from(t);
    let p = IntPoly::new(
        spec.q
            .shift_scale(&tb, &BigInt::one())
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| if i == 0 { c - spec.q.eval(&tb) } else { c.clone() })
            .collect(),
    );
    let inner = bohr_set(&BohrSpec { q: p, ..half }, zh)?;
    let outer = bohr_set(spec, z)?;
    let members = inner.members();
    let holds = members.iter().all(|&x| outer.contains(t + x));
    Ok(ContainmentCheck { t: Some(t), checked: members.len() as u64, holds })
}

/// Checks `∩_i Bohr_{x^i}(a_i theta, rho/d) ⊆ Bohr_Q(theta, rho)` on `[Z]` for `Q(0) = 0`.
pub fn triangle_splitting(spec: &BohrSpec, z: u64) -> Result<ContainmentCheck> {
    let d = spec.q.degree();
    if d == 0 || !spec.q.coeff(0).is_zero() {
        return Err(Error::InvalidInput("need Q(0) = 0 and deg Q >= 1".into()));
    }
    let rho_d = &spec.rho / BigInt::from(d);
    let pieces: Vec<BohrSpec> = (1..=d)
        .filter(|&i| !spec.q.coeff(i).is_zero())
        .map(|i| BohrSpec {
            q: IntPoly::monomial(BigInt::one(), i),
            theta: spec.theta.iter().map(|t| t.scaled(&spec.q.coeff(i))).collect(),
            rho: rho_d.clone(),
        })
        .collect();
    let sets: Vec<BohrSet> = pieces.iter().map(|s| bohr_set(s, z)).collect::<Result<_>>()?;
    let outer = bohr_set(spec, z)?;
    let mut checked = 0;
    let mut holds = true;
    for n in 1..=z {
        if sets.iter().all(|s| s.contains(n)) {
            checked += 1;
            holds &= outer.contains(n);
        }
    }
    Ok(ContainmentCheck { t: None, checked, holds })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub m0: BigInt,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub margin: BigRational,
    pub holds: bool,
}

fn nonnegative_after_shift(p: &IntPoly, y: &BigInt) -> bool {
    p.shift_scale(y, &BigInt::one()).coeffs().iter().all(|c| !c.is_negative())
}

/// Least `Y0 >= 4` such that `2P - l Y^d` and `3 l Y^d - 2P` have nonnegative Taylor
/// coefficients at `Y0`, which gives `l Y^d <= 2 P(Y) <= 3 l Y^d` for real `Y >= Y0`.
pub fn growth_m0(p: &IntPoly) -> Result<BigInt> {
    let d = p.degree();
    let l = p.leading();
    if d == 0 || !l.is_positive() {
        return Err(Error::InvalidInput("need a positive leading coefficient and degree >= 1".into()));
    }
    let two_p = p.scale(&BigInt::from(2));
    let a = IntPoly::new(
        two_p.coeffs().iter().enumerate().map(|(i, c)| if i == d { c - &l } else { c.clone() }).collect(),
    );
    let b = IntPoly::new(
        two_p.coeffs().iter().enumerate().map(|(i, c)| if i == d { BigInt::from(3) * &l - c } else { -c }).collect(),
    );
    let ok = |y: &BigInt| nonnegative_after_shift(&a, y) && nonnegative_after_shift(&b, y);
    // Cauchy bound of both polynomials
    let cauchy = |q: &IntPoly| {
        let lead = q.leading().abs();
        let m = q.coeffs().iter().map(|c| c.abs()).max().unwrap_or_default();
        BigInt::one() + m.div_ceil(&lead)
    };
    let mut hi = cauchy(&a).max(cauchy(&b)).max(BigInt::from(4));
    while !ok(&hi) {
        hi *= 2;
    }
    let mut lo = BigInt::from(4);
    if ok(&lo) {
        return Ok(lo);
    }
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) / 2;
        if ok(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Compares `P_D(eta M)` with `(4 eta)^d P_D(M)` exactly, for `M >= (M0 + 1)/eta`.
pub fn growth_check(p: &IntPoly, dd: u64, eta: &BigRational, m: &BigInt) -> Result<GrowthReport> {
    if !eta.is_positive() || eta >= &BigRational::one() {
        return Err(Error::InvalidInput("eta must lie in (0, 1)".into()));
    }
    let m0 = growth_m0(p)?;
    let need = BigRational::from_integer(&m0 + 1) / eta;
    if BigRational::from_integer(m.clone()) < need {
        return Err(Error::InvalidInput(format!(
            "M = {m} is too small: need M >= (M0 + 1)/eta = {} with M0 = {m0}",
            need.ceil()
        )));
    }
    let aux = aux_data(p, dd)?;
    let d = p.degree();
    let mr = BigRational::from_integer(m.clone());
    let lhs = aux.pd.eval_rational(&(eta * &mr));
    let rhs = num_traits::pow(eta * BigInt::from(4), d) * aux.pd.eval_rational(&mr);
    let margin = &rhs - &lhs;
    Ok(GrowthReport { m0, holds: !margin.is_negative(), lhs, rhs, margin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn spec(q: &[i64], th: Vec<Theta>, rho: BigRational) -> BohrSpec {
        BohrSpec::new(IntPoly::from_i64(q), th, rho).unwrap()
    }

    #[test]
    fn small_bohr_sets() {
        let s = spec(&[0, 1], vec![Theta::rational(1, 2)], parse_rational("0.26").unwrap());
        assert_eq!(bohr_set(&s, 10).unwrap().members(), vec![2, 4, 6, 8, 10]);
        let s = spec(&[0, 0, 1], vec![Theta::rational(1, 4)], rat(1, 5));
        assert_eq!(bohr_set(&s, 8).unwrap().members(), vec![2, 4, 6, 8]);
        let s = spec(&[0, 0, 1], vec![Theta::sqrt(2).unwrap(), Theta::rational(1, 3)], rat(3, 5));
        assert_eq!(bohr_set(&s, 50).unwrap().size(), 50);
    }

    #[test]
    fn fixed_point_matches_float() {
        let th = Theta::sqrt(2).unwrap();
        let s = spec(&[0, 1], vec![th], rat(1, 10));
        let set = bohr_set(&s, 2000).unwrap();
        for n in 1..=2000u64 {
            let x = (n as f64 * 2f64.sqrt()).fract();
            let dist = x.min(1.0 - x);
            if (dist - 0.1).abs() > 1e-9 {
                assert_eq!(set.contains(n), dist < 0.1, "n = {n}");
            }
        }
        let g = Theta::golden();
        if let Theta::Fixed { frac, .. } = g {
            assert!((frac as f64 / 2f64.powi(128) - 0.618_033_988_749_895).abs() < 1e-15);
        }
    }

    #[test]
    fn precision_budget() {
        let s = spec(&[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1], vec![Theta::golden()], rat(1, 10));
        assert!(matches!(bohr_set(&s, 300), Err(Error::PrecisionBudget(_))));
    }

    #[test]
    fn density_reports() {
        let rep = bohr_density_report(&IntPoly::from_i64(&[0, 1]), 1, &rat(1, 10), 10_000, 20, 1).unwrap();
        assert!(rep.min_density >= 0.099, "{rep:?}");
        assert!(!rep.below_threshold);
        assert!(bohr_density_report(&IntPoly::from_i64(&[1, 0, 1]), 1, &rat(1, 10), 100, 5, 1).is_err());
        let s = spec(&[-1, 0, 1], vec![Theta::sqrt(2).unwrap()], rat(1, 10));
        assert!(bohr_set(&s, 100_000).unwrap().size() > 0);
    }

    #[test]
    fn growth_examples() {
        let r = growth_check(&IntPoly::from_i64(&[0, 0, 1]), 1, &rat(1, 2), &BigInt::from(10)).unwrap();
        assert_eq!(r.lhs, rat(25, 1));
        assert_eq!(r.rhs, rat(400, 1));
        assert!(r.holds);
        assert!(growth_check(&IntPoly::from_i64(&[0, 0, 1]), 1, &rat(1, 2), &BigInt::from(9)).is_err());
        let p = IntPoly::from_i64(&[-1, 0, 1]);
        let m0 = growth_m0(&p).unwrap();
        let m = (&m0 + 1) * 4 + 100;
        let r = growth_check(&p, 3, &rat(1, 4), &m).unwrap();
        assert!(r.holds && r.margin.is_positive());
    }

    #[test]
    fn growth_m0_sandwich() {
        let p = IntPoly::from_i64(&[5, -30, 2, 1]);
        let m0 = growth_m0(&p).unwrap().to_i64().unwrap();
        for y in m0..m0 + 200 {
            let v = p.eval_i64(y) * 2;
            let y3 = BigInt::from(y).pow(3);
            assert!(y3 <= v && v <= &y3 * 3);
        }
    }

    #[test]
    fn containments() {
        for (q, th) in [(vec![0i64, 0, 1], (1, 7)), (vec![0, 3, -2, 1], (5, 13)), (vec![0, -1, 0, 2], (2, 9))] {
            let s = spec(&q, vec![Theta::rational(th.0, th.1)], rat(1, 5));
            assert!(translate_containment(&s, 400).unwrap().holds);
            let tri = triangle_splitting(&s, 400).unwrap();
            assert!(tri.holds);
        }
    }

    proptest! {
        #[test]
        fn density_monotone_in_rho(
            a in 0i64..50, q in 1i64..50, r1 in 1i64..50, r2 in 1i64..50,
            c in prop::collection::vec(-5i64..6, 2..4),
        ) {
            let (lo, hi) = (r1.min(r2), r1.max(r2));
            let s = spec(&c, vec![Theta::rational(a, q)], rat(lo, 100));
            let small = bohr_set(&s, 200).unwrap();
            let large = bohr_set(&s.with_rho(rat(hi, 100)), 200).unwrap();
            prop_assert!(small.size() <= large.size());
            prop_assert!(small.members().iter().all(|&n| large.contains(n)));
        }

        #[test]
        fn triangle_splitting_holds(
            c in prop::collection::vec(-6i64..7, 2..4), a in 0i64..60, q in 1i64..60, r in 1i64..50,
        ) {
            let mut c = c;
            c.insert(0, 0);
            prop_assume!(c.iter().skip(1).any(|&x| x != 0));
            let s = spec(&c, vec![Theta::rational(a, q)], rat(r, 100));
            prop_assert!(triangle_splitting(&s, 300).unwrap().holds);
        }
    }
}

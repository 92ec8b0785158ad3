//! Decision procedures for partition and density regularity of `Σ a_i P(x_i) = b`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, ord_p, pow_big};
use crate::error::{budget, Error, Result};
use crate::intersective::{intersectivity_verdict, IntersectivityStatus};
use crate::polyring::IntPoly;

/// Largest coefficient count searched exhaustively for zero-sum subsets.
pub const SUBSET_EXHAUSTIVE_LIMIT: usize = 25;
/// Largest coefficient count handled by the split search.
pub const SUBSET_SPLIT_LIMIT: usize = 44;

/// The equation `a_1 P(x_1) + ... + a_s P(x_s) = b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadoEquation {
    pub a: Vec<i64>,
    pub b: BigInt,
    pub p: IntPoly,
}

impl RadoEquation {
    pub fn new(a: Vec<i64>, b: BigInt, p: IntPoly) -> Result<Self> {
        if a.is_empty() || a.iter().any(|&c| c == 0) {
            return Err(Error::InvalidInput("coefficients must be nonzero".into()));
        }
        if p.degree() < 2 {
            return Err(Error::InvalidInput("polynomial must have degree >= 2".into()));
        }
        Ok(RadoEquation { a, b, p })
    }

    pub fn homogeneous(a: &[i64], p: IntPoly) -> Result<Self> {
        Self::new(a.to_vec(), BigInt::zero(), p)
    }

    pub fn s(&self) -> usize {
        self.a.len()
    }

    pub fn degree(&self) -> usize {
        self.p.degree()
    }

    pub fn coefficient_sum(&self) -> i64 {
        self.a.iter().sum()
    }
}

/// Least nonempty zero-sum subset (1-based indices), ordered by size and then
/// lexicographically, or `None`.
pub fn rado_subset(a: &[i64]) -> Result<Option<Vec<usize>>> {
    let s = a.len();
    if s == 0 {
        return Err(Error::InvalidInput("empty coefficient list".into()));
    }
    if s > SUBSET_EXHAUSTIVE_LIMIT {
        return Err(budget(
            "exhaustive subset search (use zero_sum_subset_split)",
            s,
            SUBSET_EXHAUSTIVE_LIMIT,
        ));
    }
    for size in 1..=s {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            if idx.iter().map(|&i| a[i]).sum::<i64>() == 0 {
                return Ok(Some(idx.iter().map(|i| i + 1).collect()));
            }
            // next combination in lexicographic order
            let mut k = size;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                if idx[k] < s - size + k {
                    idx[k] += 1;
                    for j in k + 1..size {
                        idx[j] = idx[j - 1] + 1;
                    }
                    k = usize::MAX;
                    break;
                }
            }
            if k != usize::MAX {
                break;
            }
        }
    }
    Ok(None)
}

/// Some nonempty zero-sum subset found by splitting the coefficients into two halves and
/// matching subset sums. Exact, but the returned subset need not be the least one.
pub fn zero_sum_subset_split(a: &[i64]) -> Result<Option<Vec<usize>>> {
    let s = a.len();
    if s > SUBSET_SPLIT_LIMIT {
        return Err(budget("split subset search", s, SUBSET_SPLIT_LIMIT));
    }
    let h = s / 2;
    let left = &a[..h];
    let right = &a[h..];
    let mut table: HashMap<i64, u64> = HashMap::new();
    for mask in 1u64..(1 << left.len()) {
        let sum: i64 = (0..left.len()).filter(|i| mask >> i & 1 == 1).map(|i| left[i]).sum();
        table.entry(sum).or_insert(mask);
    }
    let unpack = |lm: u64, rm: u64| -> Vec<usize> {
        let mut v: Vec<usize> = (0..left.len()).filter(|i| lm >> i & 1 == 1).map(|i| i + 1).collect();
        v.extend((0..right.len()).filter(|i| rm >> i & 1 == 1).map(|i| h + i + 1));
        v
    };
    if let Some(&lm) = table.get(&0) {
        return Ok(Some(unpack(lm, 0)));
    }
    for mask in 1u64..(1 << right.len()) {
        let sum: i64 = (0..right.len()).filter(|i| mask >> i & 1 == 1).map(|i| right[i]).sum();
        if sum == 0 {
            return Ok(Some(unpack(0, mask)));
        }
        if let Some(&lm) = table.get(&-sum) {
            return Ok(Some(unpack(lm, mask)));
        }
    }
    Ok(None)
}

fn find_zero_sum(a: &[i64]) -> Result<Option<Vec<usize>>> {
    if a.len() <= SUBSET_EXHAUSTIVE_LIMIT {
        rado_subset(a)
    } else {
        zero_sum_subset_split(a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdSource {
    Published,
    UserCertificate,
}

/// Variable-count thresholds for degree `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub d: u32,
    pub t_bound: u32,
    pub s0: u32,
    pub s1: u32,
    pub source: ThresholdSource,
}

fn isqrt(n: u32) -> u32 {
    let mut r = (n as f64).sqrt() as u32;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Default bounds: `s1` and the moment exponent bound `T`, with `s0 = 2T + 1`.
pub fn thresholds(d: u32) -> Result<Thresholds> {
    if d < 2 {
        return Err(Error::InvalidInput("degree must be >= 2".into()));
    }
    let root = isqrt(2 * d + 2);
    let (s1, t) = match d {
        2 => (5, 2),
        3 => (9, 4),
        _ => (d * d - d + 2 * root + 1, d * (d - 1) / 2 + root),
    };
    Ok(Thresholds {
        d,
        t_bound: t,
        s0: 2 * t + 1,
        s1,
        source: ThresholdSource::Published,
    })
}

impl Thresholds {
    /// Replaces the moment exponent by a user-supplied value for a specific polynomial.
    pub fn with_t_override(mut self, t: u32) -> Self {
        self.t_bound = t;
        self.s0 = 2 * t + 1;
        self.source = ThresholdSource::UserCertificate;
        self
    }

    /// Variables needed before regularity is asserted.
    pub fn required(&self) -> u32 {
        match self.source {
            ThresholdSource::Published => self.s1,
            ThresholdSource::UserCertificate => self.s0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Partition,
    Density,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegularityStatus {
    Regular,
    ConditionalRegular,
    NotRegular,
    CriterionHoldsButTooFewVariables,
}

/// A finite obstruction certifying a `NotRegular` verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NecessityWitness {
    /// Colour `x` by `x mod modulus`.
    Congruence { modulus: BigInt },
    /// Colour `x` by the sign and last nonzero base-`prime` digit of `P(x) - shift`;
    /// each zero of `P - shift` gets a colour of its own.
    LastDigit { prime: u64, shift: BigInt },
    /// The residue class `residue mod prime` contains no solution at all.
    DenseResidue { prime: u64, residue: u64 },
}

impl NecessityWitness {
    /// Colour class of `x` under a colouring witness. Dense witnesses return 1 on the
    /// residue class and 0 elsewhere.
    pub fn colour(&self, poly: &IntPoly, x: u64) -> i64 {
        match self {
            NecessityWitness::Congruence { modulus } => {
                BigInt::from(x).mod_floor(modulus).to_i64().expect("small modulus")
            }
            NecessityWitness::LastDigit { prime, shift } => {
                let y = poly.eval(&BigInt::from(x)) - shift;
                if y.is_zero() {
                    return -(x as i64) - 1;
                }
                let v = ord_p(&y, *prime).unwrap();
                let digit = (y.abs() / pow_big(*prime, v))
                    .mod_floor(&BigInt::from(*prime))
                    .to_i64()
                    .unwrap();
                if y.is_negative() {
                    digit + *prime as i64
                } else {
                    digit
                }
            }
            NecessityWitness::DenseResidue { prime, residue } => (x % prime == *residue) as i64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MSearch {
    /// Use the forced value of `m` (or `P(0)` for homogeneous zero-sum equations).
    Default,
    /// Also list every value `P(x)`, `|x| <= bound`, for which `P - m` is certified.
    Exhaustive { bound: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecideOptions {
    pub intersectivity_bound: u64,
    pub t_override: Option<u32>,
    pub m_search: MSearch,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            intersectivity_bound: 1000,
            t_override: None,
            m_search: MSearch::Default,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub mode: Mode,
    pub status: RegularityStatus,
    /// Machine-readable tag for the deciding condition.
    pub reason: String,
    pub s: usize,
    pub thresholds: Thresholds,
    pub subset: Option<Vec<usize>>,
    pub shift_m: Option<BigInt>,
    pub intersectivity: Option<IntersectivityStatus>,
    pub intersectivity_bound: u64,
    pub witness: Option<NecessityWitness>,
    /// Values of `m` found by the exhaustive search option.
    pub m_candidates: Vec<BigInt>,
}

fn smallest_prime_above(n: u64) -> u64 {
    (n + 1..).find(|&p| is_prime(p)).unwrap()
}

fn smallest_nondivisor(b: &BigInt) -> BigInt {
    let mut q = BigInt::from(2);
    while (b % &q).is_zero() {
        q += 1;
    }
    q
}

fn thresholds_for(eq: &RadoEquation, opts: &DecideOptions) -> Result<Thresholds> {
    let t = thresholds(eq.degree() as u32)?;
    Ok(match opts.t_override {
        Some(v) => t.with_t_override(v),
        None => t,
    })
}

/// Partition regularity: requires a zero-sum subset and an `m` with `b = (Σa) m` such that
/// `P - m` is intersective. Failures are certified by colouring witnesses.
pub fn decide_partition_regular(eq: &RadoEquation, opts: &DecideOptions) -> Result<RegularityVerdict> {
    let th = thresholds_for(eq, opts)?;
    let sum = eq.coefficient_sum();
    let mut v = RegularityVerdict {
        mode: Mode::Partition,
        status: RegularityStatus::NotRegular,
        reason: String::new(),
        s: eq.s(),
        thresholds: th,
        subset: None,
        shift_m: None,
        intersectivity: None,
        intersectivity_bound: opts.intersectivity_bound,
        witness: None,
        m_candidates: Vec::new(),
    };
    let sum_big = BigInt::from(sum);
    let m = if sum != 0 {
        let (q, r) = eq.b.div_rem(&sum_big);
        if !r.is_zero() {
            v.reason = "b_not_multiple_of_coefficient_sum".into();
            v.witness = Some(NecessityWitness::Congruence { modulus: sum_big.abs() });
            return Ok(v);
        }
        q
    } else {
        if !eq.b.is_zero() {
            v.reason = "zero_coefficient_sum_with_nonzero_b".into();
            v.witness = Some(NecessityWitness::Congruence {
                modulus: smallest_nondivisor(&eq.b),
            });
            return Ok(v);
        }
        if let MSearch::Exhaustive { bound } = opts.m_search {
            let mut c: Vec<BigInt> = (-bound..=bound).map(|x| eq.p.eval_i64(x)).collect();
            c.sort();
            c.dedup();
            v.m_candidates = c;
        }
        eq.p.coeff(0)
    };
    v.shift_m = Some(m.clone());
    let shifted = &eq.p - &IntPoly::constant(m.clone());
    let iv = intersectivity_verdict(&shifted, opts.intersectivity_bound)?;
    v.intersectivity = Some(iv.status);
    if iv.status == IntersectivityStatus::Refuted {
        let w = iv.refutation.expect("refuted verdicts carry a witness");
        let h = ord_p(&sum_big, w.p).unwrap_or(0) + 1;
        v.reason = "shift_not_intersective".into();
        v.witness = Some(NecessityWitness::Congruence {
            modulus: pow_big(w.p, h + w.k),
        });
        return Ok(v);
    }
    match find_zero_sum(&eq.a)? {
        None => {
            let total: u64 = eq.a.iter().map(|c| c.unsigned_abs()).sum();
            v.reason = "no_zero_sum_subset".into();
            v.witness = Some(NecessityWitness::LastDigit {
                prime: smallest_prime_above(total),
                shift: m,
            });
            return Ok(v);
        }
        Some(i) => v.subset = Some(i),
    }
    let enough = eq.s() as u32 >= th.required();
    let certain = iv.status == IntersectivityStatus::Certified;
    v.reason = "criterion_holds".into();
    v.status = match (enough, certain) {
        (true, true) => RegularityStatus::Regular,
        (true, false) => RegularityStatus::ConditionalRegular,
        (false, _) => RegularityStatus::CriterionHoldsButTooFewVariables,
    };
    Ok(v)
}

/// Density regularity: requires `b = 0` and `Σ a_i = 0`. Failures are certified by a
/// residue class that contains no solution.
pub fn decide_density_regular(eq: &RadoEquation, opts: &DecideOptions) -> Result<RegularityVerdict> {
    let th = thresholds_for(eq, opts)?;
    let sum = eq.coefficient_sum();
    let mut v = RegularityVerdict {
        mode: Mode::Density,
        status: RegularityStatus::NotRegular,
        reason: String::new(),
        s: eq.s(),
        thresholds: th,
        subset: None,
        shift_m: None,
        intersectivity: None,
        intersectivity_bound: opts.intersectivity_bound,
        witness: None,
        m_candidates: Vec::new(),
    };
    if sum != 0 || !eq.b.is_zero() {
        v.reason = if sum != 0 {
            "coefficient_sum_nonzero".into()
        } else {
            "b_nonzero".into()
        };
        let total: u64 = eq.a.iter().map(|c| c.unsigned_abs()).sum();
        let mut prime = smallest_prime_above(total.max(eq.degree() as u64));
        while sum == 0 && (&eq.b % prime).is_zero() {
            prime = smallest_prime_above(prime);
        }
        let pb = BigInt::from(prime);
        let target = eq.b.mod_floor(&pb);
        let residue = (0..prime)
            .find(|&t| (BigInt::from(sum) * eq.p.eval(&BigInt::from(t))).mod_floor(&pb) != target)
            .expect("a polynomial of degree < p is not constant modulo p");
        v.witness = Some(NecessityWitness::DenseResidue { prime, residue });
        return Ok(v);
    }
    v.subset = Some((1..=eq.s()).collect());
    v.shift_m = Some(eq.p.coeff(0));
    v.intersectivity = Some(IntersectivityStatus::Certified);
    v.reason = "criterion_holds".into();
    v.status = if eq.s() as u32 >= th.required() {
        RegularityStatus::Regular
    } else {
        RegularityStatus::CriterionHoldsButTooFewVariables
    };
    Ok(v)
}

pub fn decide(eq: &RadoEquation, mode: Mode, opts: &DecideOptions) -> Result<RegularityVerdict> {
    match mode {
        Mode::Partition => decide_partition_regular(eq, opts),
        Mode::Density => decide_density_regular(eq, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    fn subset_oracle(a: &[i64]) -> Option<Vec<usize>> {
        let s = a.len();
        let mut all: Vec<Vec<usize>> = (1u32..(1 << s))
            .map(|m| (0..s).filter(|i| m >> i & 1 == 1).map(|i| i + 1).collect::<Vec<_>>())
            .filter(|v| v.iter().map(|&i| a[i - 1]).sum::<i64>() == 0)
            .collect();
        all.sort_by(|x, y| (x.len(), x).cmp(&(y.len(), y)));
        all.into_iter().next()
    }

    #[test]
    fn subset_examples() {
        assert_eq!(rado_subset(&[1, 1, -1]).unwrap(), Some(vec![1, 3]));
        assert_eq!(rado_subset(&[2, 3, -5]).unwrap(), Some(vec![1, 2, 3]));
        assert_eq!(rado_subset(&[1, 2, 4]).unwrap(), None);
        assert!(rado_subset(&[1; 26]).is_err());
    }

    #[test]
    fn split_search_handles_long_lists() {
        let mut a: Vec<i64> = (0..30).map(|i| 1i64 << (i % 20)).collect();
        assert!(zero_sum_subset_split(&a).unwrap().is_none());
        a[29] = -(1 << 3) - (1 << 17);
        let found = zero_sum_subset_split(&a).unwrap().unwrap();
        assert_eq!(found.iter().map(|&i| a[i - 1]).sum::<i64>(), 0);
    }

    #[test]
    fn threshold_examples() {
        let t2 = thresholds(2).unwrap();
        assert_eq!((t2.s1, t2.s0), (5, 5));
        let t3 = thresholds(3).unwrap();
        assert_eq!((t3.s1, t3.s0), (9, 9));
        let t4 = thresholds(4).unwrap();
        assert_eq!((t4.t_bound, t4.s0, t4.s1), (9, 19, 19));
        for d in 2..40 {
            let t = thresholds(d).unwrap();
            assert!(t.s0 <= t.s1 && t.s0 >= 2 * d + 1 && t.t_bound >= d);
        }
        assert_eq!(t4.with_t_override(5).required(), 11);
    }

    #[test]
    fn partition_examples() {
        let o = DecideOptions::default();
        let eq = RadoEquation::homogeneous(&[1, 1, -1, -1, 1], p(&[0, 0, 1])).unwrap();
        let v = decide_partition_regular(&eq, &o).unwrap();
        assert_eq!(v.status, RegularityStatus::Regular);
        assert_eq!(v.subset, Some(vec![1, 3]));
        assert_eq!(v.shift_m, Some(BigInt::zero()));

        let eq = RadoEquation::homogeneous(&[1, 2, 4, 8, 16], p(&[0, 0, 1])).unwrap();
        let v = decide_partition_regular(&eq, &o).unwrap();
        assert_eq!(v.status, RegularityStatus::NotRegular);
        assert_eq!(v.reason, "no_zero_sum_subset");

        let eq = RadoEquation::new(vec![1, 1, 1, -1, -1], BigInt::one(), p(&[1, 0, 1])).unwrap();
        let v = decide_partition_regular(&eq, &o).unwrap();
        assert_eq!(v.status, RegularityStatus::Regular);
        assert_eq!(v.subset, Some(vec![1, 4]));
        assert_eq!(v.shift_m, Some(BigInt::one()));
    }

    #[test]
    fn partition_failures_carry_witnesses() {
        let o = DecideOptions::default();
        // m = 0 but x^2 + 1 is not intersective
        let eq = RadoEquation::homogeneous(&[1, 1, 1, -1, -1], p(&[1, 0, 1])).unwrap();
        let v = decide_partition_regular(&eq, &o).unwrap();
        assert_eq!(v.reason, "shift_not_intersective");
        assert_eq!(v.witness, Some(NecessityWitness::Congruence { modulus: BigInt::from(9) }));
        // 2 does not divide 1
        let eq = RadoEquation::new(vec![1, 1, 1, -1, 1], BigInt::one(), p(&[0, 0, 1])).unwrap();
        let v = decide_partition_regular(&eq, &o).unwrap();
        assert_eq!(v.reason, "b_not_multiple_of_coefficient_sum");
        let eq = RadoEquation::new(vec![1, -1, 1, -1, 1, -1], BigInt::from(6), p(&[0, 0, 1])).unwrap();
        let v = decide_partition_regular(&eq, &o).unwrap();
        assert_eq!(v.witness, Some(NecessityWitness::Congruence { modulus: BigInt::from(4) }));
    }

    #[test]
    fn density_examples() {
        let o = DecideOptions::default();
        let eq = RadoEquation::homogeneous(&[1, 1, 1, -1, -1, -1], p(&[0, 0, 1])).unwrap();
        assert_eq!(decide_density_regular(&eq, &o).unwrap().status, RegularityStatus::Regular);
        let eq = RadoEquation::homogeneous(&[1, 1, -1, -1, 1], p(&[0, 0, 1])).unwrap();
        let v = decide_density_regular(&eq, &o).unwrap();
        assert_eq!(v.status, RegularityStatus::NotRegular);
        let Some(NecessityWitness::DenseResidue { prime, residue }) = v.witness else {
            panic!("dense witness expected")
        };
        // no solution inside the residue class: check all small tuples
        let class: Vec<i64> = (1..60).filter(|x| (*x as u64) % prime == residue).collect();
        for &x1 in &class {
            for &x2 in &class {
                for &x3 in &class {
                    for &x4 in &class {
                        for &x5 in class.iter().take(4) {
                            assert_ne!(x1 * x1 + x2 * x2 - x3 * x3 - x4 * x4 + x5 * x5, 0);
                        }
                    }
                }
            }
        }
        let eq = RadoEquation::homogeneous(&[1, 1, -2], p(&[0, 0, 1])).unwrap();
        assert_eq!(
            decide_density_regular(&eq, &o).unwrap().status,
            RegularityStatus::CriterionHoldsButTooFewVariables
        );
    }

    #[test]
    fn override_and_conditional() {
        let o = DecideOptions { t_override: Some(2), ..Default::default() };
        let eq = RadoEquation::homogeneous(&[1, 1, -1, -1, 1, -1, 1, -1, 1], p(&[0, 0, 0, 0, 1])).unwrap();
        let v = decide_partition_regular(&eq, &o).unwrap();
        assert_eq!(v.status, RegularityStatus::Regular);
        assert_eq!(v.thresholds.source, ThresholdSource::UserCertificate);
        let v = decide_partition_regular(&eq, &DecideOptions::default()).unwrap();
        assert_eq!(v.status, RegularityStatus::CriterionHoldsButTooFewVariables);
        // (x^3 - 19)(x^2 + x + 1) + 5 shifted by m = 5 has no rational root
        let base = &p(&[-19, 0, 0, 1]) * &p(&[1, 1, 1]);
        let q = &base + &p(&[5]);
        let a = vec![1i64; 5].into_iter().chain(vec![-1i64; 4]).chain([1i64; 1]).collect::<Vec<_>>();
        let sum: i64 = a.iter().sum();
        let eq = RadoEquation::new(a, BigInt::from(5 * sum), q).unwrap();
        let o = DecideOptions { intersectivity_bound: 200, t_override: Some(4), ..Default::default() };
        let v = decide_partition_regular(&eq, &o).unwrap();
        assert_eq!(v.status, RegularityStatus::ConditionalRegular);
    }

    proptest! {
        #[test]
        fn subset_matches_oracle(a in prop::collection::vec(prop_oneof![-6i64..=-1, 1i64..=6], 1..11)) {
            prop_assert_eq!(rado_subset(&a).unwrap(), subset_oracle(&a));
            let split = zero_sum_subset_split(&a).unwrap();
            prop_assert_eq!(split.is_some(), subset_oracle(&a).is_some());
        }

        #[test]
        fn density_implies_partition(
            a in prop::collection::vec(prop_oneof![-4i64..=-1, 1i64..=4], 2..8),
            c0 in -5i64..5, c1 in -5i64..5, c2 in 1i64..4,
        ) {
            let eq = RadoEquation::homogeneous(&a, IntPoly::from_i64(&[c0, c1, c2])).unwrap();
            let o = DecideOptions { intersectivity_bound: 60, ..Default::default() };
            let dr = decide_density_regular(&eq, &o).unwrap();
            let pr = decide_partition_regular(&eq, &o).unwrap();
            if dr.status == RegularityStatus::Regular {
                prop_assert_ne!(pr.status, RegularityStatus::NotRegular);
            }
            if eq.coefficient_sum() == 0 {
                let q = &eq.p - &IntPoly::constant(eq.p.coeff(0));
                let eq0 = RadoEquation::homogeneous(&a, q).unwrap();
                let pr0 = decide_partition_regular(&eq0, &o).unwrap();
                prop_assert_eq!(pr.status, pr0.status);
            }
        }
    }
}

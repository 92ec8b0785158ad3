//! p-adic zeros, intersectivity verdicts and auxiliary polynomials `P_D`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{crt, factor_u64, ord_p, pow_big, primes_up_to, small_prime_factors};
use crate::congruence::{lift_tree, newton_refine, roots_mod_p};
use crate::error::{Error, Result};
use crate::polyring::{resultant, IntPoly};

/// Trial-division limit used when factoring discriminants and coefficients.
pub const FACTOR_LIMIT: u64 = 1_000_000;

/// A p-adic zero known modulo `p^k`, with its multiplicity as a zero of the polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PAdicRoot {
    pub p: u64,
    /// Residue in `[0, p^k)`.
    pub z: BigInt,
    pub k: u32,
    pub m: u32,
}

#[derive(Clone, Debug)]
struct SquarefreeFactor {
    g: IntPoly,
    multiplicity: u32,
    disc_resultant: BigInt,
}

/// A certified zero of one squarefree factor: a lift-tree node at a level where the
/// Hensel criterion is guaranteed.
#[derive(Clone, Debug)]
struct CertifiedZero {
    factor: usize,
    multiplicity: u32,
    node: BigInt,
    level: u32,
    key: BigInt,
}

/// Precomputed squarefree structure of a polynomial, reused across primes.
#[derive(Clone, Debug)]
pub struct PadicContext {
    poly: IntPoly,
    factors: Vec<SquarefreeFactor>,
}

impl PadicContext {
    pub fn new(poly: &IntPoly) -> Result<Self> {
        if poly.degree() < 1 {
            return Err(Error::InvalidInput("polynomial must have degree >= 1".into()));
        }
        let factors = poly
            .squarefree_decomposition()
            .into_iter()
            .map(|(g, multiplicity)| {
                let disc_resultant = resultant(&g, &g.derivative());
                SquarefreeFactor {
                    g,
                    multiplicity,
                    disc_resultant,
                }
            })
            .collect();
        Ok(PadicContext {
            poly: poly.clone(),
            factors,
        })
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    /// All p-adic zeros, one entry per distinct zero.
    ///
    /// For a squarefree factor `g` with `e = ord_p res(g, g')`, no residue satisfies
    /// `g ≡ g' ≡ 0 (mod p^{e+1})`, so every root modulo `p^{2e+1}` meets the Hensel
    /// criterion and an empty tree at that level certifies that no zero exists. Two
    /// nodes belong to the same zero exactly when they agree modulo `p^{e+1}`.
    fn zeros(&self, p: u64) -> Result<Vec<CertifiedZero>> {
        let mut out = Vec::new();
        for (idx, f) in self.factors.iter().enumerate() {
            let e = ord_p(&f.disc_resultant, p).expect("squarefree factor");
            let level = 2 * e + 1;
            let base: Vec<BigInt> = roots_mod_p(&f.g, p)?.into_iter().map(BigInt::from).collect();
            let nodes = lift_tree(&f.g, p, base, 1, level)?;
            let sep = pow_big(p, e + 1);
            let mut seen: Vec<BigInt> = Vec::new();
            for node in nodes {
                let key = node.mod_floor(&sep);
                if seen.contains(&key) {
                    continue;
                }
                seen.push(key.clone());
                out.push(CertifiedZero {
                    factor: idx,
                    multiplicity: f.multiplicity,
                    node,
                    level,
                    key,
                });
            }
        }
        out.sort_by(|a, b| (a.multiplicity, &a.key).cmp(&(b.multiplicity, &b.key)));
        Ok(out)
    }

    fn realise(&self, p: u64, zero: &CertifiedZero, precision: u32) -> Result<PAdicRoot> {
        let g = &self.factors[zero.factor].g;
        let z = newton_refine(g, p, &zero.node, precision.max(1))?;
        Ok(PAdicRoot {
            p,
            z,
            k: precision.max(1),
            m: zero.multiplicity,
        })
    }

    /// Every p-adic zero of the polynomial at the given precision.
    pub fn all_roots(&self, p: u64, precision: u32) -> Result<Vec<PAdicRoot>> {
        self.zeros(p)?
            .iter()
            .map(|z| self.realise(p, z, precision))
            .collect()
    }

    /// The selected zero: least multiplicity, then least residue modulo the separating
    /// precision `p^{e+1}` (a choice independent of the requested precision).
    pub fn root(&self, p: u64, precision: u32) -> Result<Option<PAdicRoot>> {
        match self.zeros(p)?.first() {
            None => Ok(None),
            Some(z) => Ok(Some(self.realise(p, z, precision)?)),
        }
    }

    /// A certificate at the Hensel-stable level, or `None` when no zero exists.
    fn certificate(&self, p: u64) -> Result<Option<PAdicRoot>> {
        match self.zeros(p)?.first() {
            None => Ok(None),
            Some(z) => Ok(Some(self.realise(p, z, z.level)?)),
        }
    }

    /// Least `k` with no root of the polynomial modulo `p^k`. Only meaningful when the
    /// polynomial has no p-adic zero, in which case the tree dies out.
    fn extinction_level(&self, p: u64) -> Result<u32> {
        let mut nodes: Vec<BigInt> = roots_mod_p(&self.poly, p)?
            .into_iter()
            .map(BigInt::from)
            .collect();
        let mut k = 1;
        while !nodes.is_empty() {
            nodes = lift_tree(&self.poly, p, nodes, k, k + 1)?;
            k += 1;
            if k > 4096 {
                return Err(Error::PrecisionExhausted {
                    p,
                    reached: k,
                    target: 4096,
                });
            }
        }
        Ok(k)
    }

    /// Primes dividing a leading coefficient or a discriminant resultant of a squarefree
    /// factor, as far as trial division finds them.
    fn bad_primes(&self) -> (Vec<u64>, bool) {
        let mut out = Vec::new();
        let mut complete = true;
        for f in &self.factors {
            for n in [&f.disc_resultant, &f.g.leading()] {
                let (fs, rest) = small_prime_factors(n, FACTOR_LIMIT);
                complete &= rest.is_one();
                out.extend(fs.into_iter().map(|(p, _)| p));
            }
        }
        out.sort();
        out.dedup();
        (out, complete)
    }
}

/// A p-adic zero of `P` at the requested precision, chosen by least multiplicity then
/// least separating residue; `None` when `P` has no zero in `Z_p`.
pub fn padic_root(p_poly: &IntPoly, p: u64, precision: u32) -> Result<Option<PAdicRoot>> {
    PadicContext::new(p_poly)?.root(p, precision)
}

/// Rational roots of `P`, as reduced fractions with positive denominators. `None` if the
/// relevant coefficients could not be factored by trial division.
pub fn rational_roots(p_poly: &IntPoly) -> Option<Vec<BigRational>> {
    let mut out = Vec::new();
    for (g, _) in p_poly.squarefree_decomposition() {
        let mut g = g;
        if g.coeff(0).is_zero() {
            out.push(BigRational::zero());
            g = g.div_exact(&IntPoly::from_i64(&[0, 1]))?;
        }
        if g.degree() == 0 {
            continue;
        }
        let nums = divisors(&g.coeff(0))?;
        let dens = divisors(&g.leading())?;
        if nums.len().saturating_mul(dens.len()) > 4_000_000 {
            return None;
        }
        for u in &nums {
            for v in &dens {
                for s in [u.clone(), -u.clone()] {
                    if !s.gcd(v).is_one() {
                        continue;
                    }
                    let q = BigRational::new(s, v.clone());
                    if g.eval_rational(&q).is_zero() {
                        out.push(q);
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Some(out)
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let (fs, rest) = small_prime_factors(n, FACTOR_LIMIT);
    if !rest.is_one() {
        return None;
    }
    let mut ds = vec![BigInt::one()];
    for (p, e) in fs {
        let mut next = Vec::with_capacity(ds.len() * (e as usize + 1));
        for d in &ds {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= p;
            }
        }
        ds = next;
        if ds.len() > 100_000 {
            return None;
        }
    }
    Some(ds)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntersectivityStatus {
    Certified,
    Refuted,
    UnknownBeyondBound,
}

/// A prime power modulo which the polynomial has no root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    pub p: u64,
    pub k: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectivityVerdict {
    pub status: IntersectivityStatus,
    pub bound: u64,
    /// Hensel-stable zeros for every examined prime that has one.
    pub certificates: Vec<PAdicRoot>,
    /// An exact rational root, as (numerator, denominator).
    pub rational_root: Option<(BigInt, BigInt)>,
    /// The smallest prime power without roots among the failing primes.
    pub refutation: Option<Refutation>,
    /// Primes above the bound examined because they divide a discriminant or a
    /// leading coefficient.
    pub extra_primes: Vec<u64>,
    /// False when some discriminant could not be fully factored.
    pub bad_primes_complete: bool,
}

impl IntersectivityVerdict {
    pub fn certified_up_to_bound(&self) -> bool {
        self.status != IntersectivityStatus::Refuted
    }
}

/// Three-valued intersectivity test.
///
/// Every prime up to `bound`, and every prime dividing a discriminant or leading
/// coefficient of the squarefree factors, is examined. A failing prime refutes; the
/// reported witness is the smallest prime power `p^k` without roots. Otherwise the
/// polynomial is certified when it has a rational root (whose denominator's primes were
/// all examined), and left unknown beyond the bound when it has none.
pub fn intersectivity_verdict(p_poly: &IntPoly, bound: u64) -> Result<IntersectivityVerdict> {
    let ctx = PadicContext::new(p_poly)?;
    let (bad, complete) = ctx.bad_primes();
    let mut primes = primes_up_to(bound);
    let extra: Vec<u64> = bad.iter().copied().filter(|&p| p > bound).collect();
    primes.extend(extra.iter().copied());
    let results: Result<Vec<(u64, Option<PAdicRoot>)>> = primes
        .par_iter()
        .map(|&p| Ok((p, ctx.certificate(p)?)))
        .collect();
    let results = results?;
    let mut certificates = Vec::new();
    let mut failing = Vec::new();
    for (p, c) in results {
        match c {
            Some(c) => certificates.push(c),
            None => failing.push(p),
        }
    }
    let rational = rational_roots(p_poly).and_then(|r| r.into_iter().min_by_key(|q| q.denom().clone()));
    let rational_root = rational.map(|q| (q.numer().clone(), q.denom().clone()));
    if !failing.is_empty() {
        let mut best: Option<(BigInt, Refutation)> = None;
        for p in failing {
            let k = ctx.extinction_level(p)?;
            let size = pow_big(p, k);
            if best.as_ref().is_none_or(|(s, _)| size < *s) {
                best = Some((size, Refutation { p, k }));
            }
        }
        return Ok(IntersectivityVerdict {
            status: IntersectivityStatus::Refuted,
            bound,
            certificates,
            rational_root,
            refutation: best.map(|b| b.1),
            extra_primes: extra,
            bad_primes_complete: complete,
        });
    }
    let status = if rational_root.is_some() && complete {
        IntersectivityStatus::Certified
    } else {
        IntersectivityStatus::UnknownBeyondBound
    };
    Ok(IntersectivityVerdict {
        status,
        bound,
        certificates,
        rational_root,
        refutation: None,
        extra_primes: extra,
        bad_primes_complete: complete,
    })
}

/// Working precision for the prime `p` when building `P_D`.
fn working_precision(d: usize, ord: u32) -> u32 {
    d as u32 * ord + 2
}

/// `λ(D) = ∏_{p | D} p^{m_p ord_p D}` using the selected zero at each prime.
pub fn lambda_of(p_poly: &IntPoly, dd: u64) -> Result<BigInt> {
    let ctx = PadicContext::new(p_poly)?;
    Ok(lambda_with(&ctx, dd)?.0)
}

fn lambda_with(ctx: &PadicContext, dd: u64) -> Result<(BigInt, Vec<PAdicRoot>)> {
    if dd == 0 {
        return Err(Error::InvalidInput("D must be positive".into()));
    }
    let d = ctx.poly().degree();
    let mut lambda = BigInt::one();
    let mut roots = Vec::new();
    for (p, e) in factor_u64(dd) {
        let root = ctx
            .root(p, working_precision(d, e))?
            .ok_or(Error::NoPadicZero(p))?;
        lambda *= pow_big(p, root.m * e);
        roots.push(root);
    }
    Ok((lambda, roots))
}

/// The auxiliary data `(D, λ(D), r_D, P_D)` with `P_D(x) = P(r_D + Dx)/λ(D)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxiliaryData {
    pub d: u64,
    pub lambda: BigInt,
    pub r: BigInt,
    pub pd: IntPoly,
    pub roots: Vec<PAdicRoot>,
}

pub fn aux_data(p_poly: &IntPoly, dd: u64) -> Result<AuxiliaryData> {
    let ctx = PadicContext::new(p_poly)?;
    aux_data_with(&ctx, dd)
}

/// As [`aux_data`], reusing a prepared context.
pub fn aux_data_with(ctx: &PadicContext, dd: u64) -> Result<AuxiliaryData> {
    let (lambda, roots) = lambda_with(ctx, dd)?;
    let parts: Vec<(BigInt, BigInt)> = roots
        .iter()
        .zip(factor_u64(dd))
        .map(|(root, (p, e))| {
            let m = pow_big(p, e);
            (root.z.mod_floor(&m), m)
        })
        .collect();
    let (res, _) = crt(&parts)?;
    let dbig = BigInt::from(dd);
    let r = if res.is_zero() { res } else { res - &dbig };
    let shifted = ctx.poly().shift_scale(&r, &dbig);
    let pd = shifted.div_exact_int(&lambda).ok_or_else(|| {
        Error::Consistency(format!(
            "P(r + Dx) is not divisible by lambda = {lambda} for D = {dd}"
        ))
    })?;
    Ok(AuxiliaryData {
        d: dd,
        lambda,
        r,
        pd,
        roots,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxCheckReport {
    pub d: u64,
    pub m: u64,
    /// `D | λ(D) | D^deg`.
    pub divisibility: bool,
    /// The shift `m ∈ (-M, 0]` with `λ(M) P_{DM}(X) = P_D(m + MX)`, if one exists.
    pub composition_shift: Option<i64>,
    /// Whether `P_D` has a certified zero at every prime up to the bound.
    pub pd_locally_soluble: bool,
    pub bound: u64,
    pub content_shifted: BigInt,
}

pub fn divides_chain(a: &AuxiliaryData, degree: usize) -> bool {
    let dbig = BigInt::from(a.d);
    let top = num_traits::pow(dbig.clone(), degree);
    (&a.lambda % &dbig).is_zero() && (&top % &a.lambda).is_zero()
}

/// The shift `m ∈ (-M, 0]` realising `λ(M) P_{DM}(X) = P_D(m + MX)`, by exhaustive search.
pub fn composition_shift(ctx: &PadicContext, dd: u64, mm: u64) -> Result<Option<i64>> {
    let a_d = aux_data_with(ctx, dd)?;
    let a_dm = aux_data_with(ctx, dd * mm)?;
    let (lambda_m, _) = lambda_with(ctx, mm)?;
    let lhs = a_dm.pd.scale(&lambda_m);
    let mb = BigInt::from(mm);
    for m in (-(mm as i64) + 1..=0).rev() {
        if a_d.pd.shift_scale(&BigInt::from(m), &mb) == lhs {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Checks the divisibility chain, the composition identity, local solubility of `P_D` up
/// to `bound`, and reports `content_shifted(P_D)`.
pub fn check_aux_identities(p_poly: &IntPoly, dd: u64, mm: u64, bound: u64) -> Result<AuxCheckReport> {
    let ctx = PadicContext::new(p_poly)?;
    let a = aux_data_with(&ctx, dd)?;
    let divisibility = divides_chain(&a, p_poly.degree());
    let composition_shift = composition_shift(&ctx, dd, mm)?;
    let pd_ctx = PadicContext::new(&a.pd)?;
    let mut soluble = true;
    for p in primes_up_to(bound) {
        if pd_ctx.certificate(p)?.is_none() {
            soluble = false;
            break;
        }
    }
    Ok(AuxCheckReport {
        d: dd,
        m: mm,
        divisibility,
        composition_shift,
        pd_locally_soluble: soluble,
        bound,
        content_shifted: a.pd.content_shifted()?,
    })
}

/// `content_shifted(P_D)` for each `D` in `1..=max_d`, with the maximum.
pub fn content_profile(p_poly: &IntPoly, max_d: u64) -> Result<(Vec<BigInt>, BigInt)> {
    let ctx = PadicContext::new(p_poly)?;
    let values: Result<Vec<BigInt>> = (1..=max_d)
        .map(|dd| aux_data_with(&ctx, dd)?.pd.content_shifted())
        .collect();
    let values = values?;
    let max = values.iter().cloned().max().unwrap_or_default();
    Ok((values, max))
}

/// Whether `P` has a zero in `Z_p` (certified either way).
pub fn has_padic_zero(p_poly: &IntPoly, p: u64) -> Result<bool> {
    Ok(PadicContext::new(p_poly)?.certificate(p)?.is_some())
}

/// Absolute value of an integer as `u64`, when it fits.
pub fn abs_u64(n: &BigInt) -> Option<u64> {
    n.abs().to_u64()
}

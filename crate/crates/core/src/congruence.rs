//! Polynomial congruences modulo prime powers and composite moduli.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factor_u64, is_prime, mod_inverse, ord_p, pow_big};
use crate::error::{budget, Error, Result};
use crate::polyring::{resultant, IntPoly};

/// Largest prime for which roots mod p are found by direct scanning.
pub const ROOT_SCAN_LIMIT: u64 = 200_000_000;
/// Largest number of live nodes in a lift tree.
pub const NODE_LIMIT: usize = 2_000_000;

/// Complete root set of a polynomial modulo `modulus`, residues in `{1, ..., modulus}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSetModM {
    pub modulus: BigInt,
    pub roots: Vec<BigInt>,
}

impl RootSetModM {
    fn from_zero_based(modulus: BigInt, mut zero_based: Vec<BigInt>) -> Self {
        for r in zero_based.iter_mut() {
            if r.is_zero() {
                *r = modulus.clone();
            }
        }
        zero_based.sort();
        zero_based.dedup();
        RootSetModM {
            modulus,
            roots: zero_based,
        }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// Result of a lifting request.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftOutcome {
    /// A root modulo `p^precision`, given in `[0, p^precision)`.
    Lifted { residue: BigInt, precision: u32 },
    NoLift,
}

fn horner_mod(coeffs: &[u64], x: u64, p: u64) -> u64 {
    let mut acc: u128 = 0;
    for &c in coeffs.iter().rev() {
        acc = (acc * x as u128 + c as u128) % p as u128;
    }
    acc as u64
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Roots of `f` modulo a prime, in `[0, p)`.
pub fn roots_mod_p(f: &IntPoly, p: u64) -> Result<Vec<u64>> {
    check_prime(p)?;
    if p > ROOT_SCAN_LIMIT {
        return Err(budget("root scan modulo p", p, ROOT_SCAN_LIMIT));
    }
    let c = f.reduce_mod_u64(p);
    if c.iter().all(|&x| x == 0) {
        return Ok((0..p).collect());
    }
    Ok((0..p).filter(|&x| horner_mod(&c, x, p) == 0).collect())
}

/// Children at level `j+1` of the root `a` modulo `p^j` (`j >= 1`), using
/// `f(a + t p^j) ≡ f(a) + t p^j f'(a) (mod p^{j+1})`.
fn lift_children(f: &IntPoly, fp: &IntPoly, p: u64, a: &BigInt, pj: &BigInt) -> Vec<BigInt> {
    let pb = BigInt::from(p);
    let fa = f.eval(a);
    let u = (&fa / pj).mod_floor(&pb);
    let v = fp.eval(a).mod_floor(&pb);
    if v.is_zero() {
        if u.is_zero() {
            (0..p).map(|t| a + pj * BigInt::from(t)).collect()
        } else {
            Vec::new()
        }
    } else {
        let vinv = mod_inverse(&v, &pb).expect("p prime");
        let t = (-u * vinv).mod_floor(&pb);
        vec![a + pj * t]
    }
}

/// All roots modulo `p^s` reached from the given level-`j` nodes, zero-based.
pub(crate) fn lift_tree(
    f: &IntPoly,
    p: u64,
    mut nodes: Vec<BigInt>,
    from: u32,
    to: u32,
) -> Result<Vec<BigInt>> {
    let fp = f.derivative();
    let mut pj = pow_big(p, from);
    for j in from..to {
        let mut next = Vec::new();
        for a in &nodes {
            next.extend(lift_children(f, &fp, p, a, &pj));
            if next.len() > NODE_LIMIT {
                return Err(Error::PrecisionExhausted {
                    p,
                    reached: j,
                    target: to,
                });
            }
        }
        nodes = next;
        pj *= p;
        if nodes.is_empty() {
            break;
        }
    }
    nodes.sort();
    Ok(nodes)
}

/// Complete root set of `f` modulo `p^s`, by scanning modulo `p` and lifting branch-wise.
pub fn roots_mod_prime_power(f: &IntPoly, p: u64, s: u32) -> Result<RootSetModM> {
    if s == 0 {
        return Err(Error::InvalidInput("exponent s must be >= 1".into()));
    }
    let base: Vec<BigInt> = roots_mod_p(f, p)?.into_iter().map(BigInt::from).collect();
    let nodes = lift_tree(f, p, base, 1, s)?;
    Ok(RootSetModM::from_zero_based(pow_big(p, s), nodes))
}

/// Number of roots modulo `p^s` reached from level 1; cheaper than materialising the set
/// when only the count matters.
pub fn count_roots_mod_prime_power(f: &IntPoly, p: u64, s: u32) -> Result<usize> {
    Ok(roots_mod_prime_power(f, p, s)?.len())
}

/// Refines `a` by p-adic Newton iteration until it agrees with the p-adic root it
/// converges to modulo `p^target`. Requires `ord_p f(a) > 2 ord_p f'(a)`.
pub fn newton_refine(f: &IntPoly, p: u64, a: &BigInt, target: u32) -> Result<BigInt> {
    let fp = f.derivative();
    let modk = pow_big(p, target);
    let mut a = a.clone();
    let delta = ord_p(&fp.eval(&a), p)
        .ok_or_else(|| Error::Consistency("Newton step at a critical point".into()))?;
    let work = pow_big(p, target + delta + 1);
    for _ in 0..256 {
        let fa = f.eval(&a);
        let of = match ord_p(&fa, p) {
            None => return Ok(a.mod_floor(&modk)),
            Some(o) => o,
        };
        if of <= 2 * delta {
            return Err(Error::Consistency(format!(
                "Hensel criterion lost during Newton iteration at p={p}"
            )));
        }
        if of >= target + delta {
            return Ok(a.mod_floor(&modk));
        }
        let pd = pow_big(p, delta);
        let unit = fp.eval(&a) / &pd;
        let inv = mod_inverse(&unit.mod_floor(&work), &work).expect("unit");
        let corr = ((fa / &pd) * inv).mod_floor(&work);
        a = (a - corr).mod_floor(&work);
    }
    Err(Error::PrecisionExhausted {
        p,
        reached: 0,
        target,
    })
}

/// Lifts a root `a` of `f` modulo `p^j` to a root modulo `p^k`.
///
/// When `ord_p f(a) > 2 ord_p f'(a)` the lift is the Newton limit, so the result agrees
/// with `a` modulo `p^{j-δ}`. Otherwise the descendants of `a` in the lift tree are
/// searched exhaustively and the smallest survivor is returned, or `NoLift`.
pub fn hensel_lift(f: &IntPoly, p: u64, a: &BigInt, j: u32, k: u32) -> Result<LiftOutcome> {
    check_prime(p)?;
    if j == 0 || k <= j {
        return Err(Error::InvalidInput(format!(
            "need 1 <= j < k, got j={j}, k={k}"
        )));
    }
    let pj = pow_big(p, j);
    let a = a.mod_floor(&pj);
    let fa = f.eval(&a);
    if !fa.mod_floor(&pj).is_zero() {
        return Err(Error::InvalidInput(format!(
            "{a} is not a root modulo {p}^{j}"
        )));
    }
    let of = ord_p(&fa, p);
    let od = ord_p(&f.derivative().eval(&a), p);
    let hensel = match (of, od) {
        (None, _) => return Ok(LiftOutcome::Lifted { residue: a, precision: k }),
        (Some(of), Some(od)) => of > 2 * od,
        (Some(_), None) => false,
    };
    if hensel {
        let r = newton_refine(f, p, &a, k)?;
        return Ok(LiftOutcome::Lifted {
            residue: r,
            precision: k,
        });
    }
    let nodes = lift_tree(f, p, vec![a], j, k)?;
    Ok(match nodes.into_iter().next() {
        Some(r) => LiftOutcome::Lifted {
            residue: r,
            precision: k,
        },
        None => LiftOutcome::NoLift,
    })
}

/// Number of `x ∈ [m]` with `f(x) ≡ 0 (mod m)` for squarefree `f`, assembled over the
/// prime-power factors of `m`.
pub fn count_roots_mod(f: &IntPoly, m: u64) -> Result<BigInt> {
    if m == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    if f.degree() == 0 {
        return Err(Error::InvalidInput("polynomial must have degree >= 1".into()));
    }
    if resultant(f, &f.derivative()).is_zero() {
        return Err(Error::NotSquarefree);
    }
    let parts = factor_u64(m);
    let counts: Result<Vec<usize>> = parts
        .par_iter()
        .map(|&(p, e)| count_roots_mod_prime_power(f, p, e))
        .collect();
    Ok(counts?.into_iter().map(BigInt::from).product())
}

/// Brute-force root count modulo `m`, used as an oracle and for small moduli.
pub fn count_roots_mod_exhaustive(f: &IntPoly, m: u64) -> usize {
    let c = f.reduce_mod_u64(m);
    (0..m).filter(|&x| horner_mod(&c, x, m) == 0).count()
}

/// Residues `y ∈ [p^j]` with `f(y) ≡ f'(y) ≡ 0 (mod p^j)`, by exhaustive scan.
pub fn joint_roots(f: &IntPoly, p: u64, j: u32) -> Result<RootSetModM> {
    check_prime(p)?;
    let m = (p as u128).checked_pow(j).filter(|&m| m <= 10_000_000);
    let m = match m {
        Some(m) => m as u64,
        None => return Err(budget("joint root scan", format!("{p}^{j}"), 10_000_000)),
    };
    let c = f.reduce_mod_u64(m);
    let d = f.derivative().reduce_mod_u64(m);
    let roots = (0..m)
        .filter(|&y| horner_mod(&c, y, m) == 0 && horner_mod(&d, y, m) == 0)
        .map(BigInt::from)
        .collect();
    Ok(RootSetModM::from_zero_based(BigInt::from(m), roots))
}

/// Largest `m` with `m^d | g`, given the factorisation of a multiple of `g`.
fn dth_power_part(g: u64, d: u32, primes: &[(u64, u32)]) -> u64 {
    let mut m = 1u64;
    for &(p, _) in primes {
        let e = crate::arith::ord_p_u64(g, p);
        m *= p.pow(e / d);
    }
    m
}

pub const BAD_RESIDUE_LIMIT: u64 = 20_000_000;

/// `#{b ∈ [W] : (P'(b), W)_d > M}` where `(H, W)_d` is the largest `m` with
/// `m^d | gcd(H, W)`.
pub fn bad_residue_count(p: &IntPoly, w: u64, m: u64) -> Result<u64> {
    let d = p.degree() as u32;
    if d < 2 {
        return Err(Error::InvalidInput("degree must be >= 2".into()));
    }
    if w == 0 {
        return Err(Error::InvalidInput("W must be positive".into()));
    }
    if w > BAD_RESIDUE_LIMIT {
        return Err(budget("bad residue scan", w, BAD_RESIDUE_LIMIT));
    }
    let primes = factor_u64(w);
    let dp = p.derivative().reduce_mod_u64(w);
    let count = (1..=w)
        .into_par_iter()
        .filter(|&b| {
            let h = horner_mod(&dp, b % w, w);
            let g = if h == 0 { w } else { h.gcd(&w) };
            dth_power_part(g, d, &primes) > m
        })
        .count();
    Ok(count as u64)
}

/// `gcd(P'(b), W)` computed exactly.
pub fn derivative_gcd(p: &IntPoly, b: &BigInt, w: &BigInt) -> BigInt {
    p.derivative().eval(b).gcd(w)
}

/// The least `j` such that `Y_{j+1}` is empty, found by exhaustive scans up to the
/// resultant bound on the height of `f` at `p`.
pub fn joint_root_height(f: &IntPoly, p: u64) -> Result<u32> {
    let r = resultant(f, &f.derivative());
    let bound = ord_p(&r, p).ok_or(Error::NotSquarefree)?;
    for j in 0..=bound {
        if joint_roots(f, p, j + 1)?.is_empty() {
            return Ok(j);
        }
    }
    Ok(bound)
}

/// Convenience: root count modulo `m` as a `u64`, failing on overflow.
pub fn count_roots_mod_u64(f: &IntPoly, m: u64) -> Result<u64> {
    count_roots_mod(f, m)?
        .to_u64()
        .ok_or_else(|| budget("root count", "u64 overflow", u64::MAX))
}

/// Whether `f(x) ≡ 0 (mod n)` for the given residue.
pub fn is_root_mod(f: &IntPoly, x: &BigInt, n: &BigInt) -> bool {
    f.eval(x).mod_floor(n).is_zero()
}

/// `p^e` as `BigInt` for callers outside the crate.
pub fn prime_power(p: u64, e: u32) -> BigInt {
    pow_big(p, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn root_set_examples() {
        assert_eq!(
            roots_mod_prime_power(&p(&[-1, 0, 1]), 2, 3).unwrap().roots,
            big(&[1, 3, 5, 7])
        );
        assert!(roots_mod_prime_power(&p(&[-2, 0, 1]), 2, 2).unwrap().is_empty());
        assert_eq!(roots_mod_prime_power(&p(&[0, 1]), 5, 1).unwrap().roots, big(&[5]));
        assert!(matches!(
            roots_mod_prime_power(&p(&[0, 1]), 6, 1),
            Err(Error::NotPrime(6))
        ));
    }

    #[test]
    fn lift_tree_matches_exhaustive() {
        let polys = [
            p(&[-1, 0, 1]),
            p(&[0, 0, 1]),
            p(&[0, 0, 0, 1]),
            p(&[1, 1, 1]),
            p(&[-19, 0, 0, 1]),
            p(&[0, -2, 1]),
            p(&[4, 0, 0, 0, 2]),
        ];
        for f in &polys {
            for &pr in &[2u64, 3, 5, 7] {
                for s in 1..=5u32 {
                    let m = pr.pow(s);
                    let tree = roots_mod_prime_power(f, pr, s).unwrap();
                    let c = f.reduce_mod_u64(m);
                    let brute: Vec<BigInt> = (1..=m)
                        .filter(|&x| horner_mod(&c, x % m, m) == 0)
                        .map(BigInt::from)
                        .collect();
                    assert_eq!(tree.roots, brute, "f={f} p={pr} s={s}");
                }
            }
        }
    }

    #[test]
    fn hensel_examples() {
        let f = p(&[-19, 0, 0, 1]);
        match hensel_lift(&f, 3, &BigInt::from(7), 3, 5).unwrap() {
            LiftOutcome::Lifted { residue, precision } => {
                assert_eq!(precision, 5);
                let m = BigInt::from(243);
                assert_eq!(residue.pow(3).mod_floor(&m), BigInt::from(19));
                assert_eq!(residue.mod_floor(&BigInt::from(9)), BigInt::from(7));
            }
            LiftOutcome::NoLift => panic!("expected a lift"),
        }
        assert_eq!(
            hensel_lift(&p(&[-1, 0, 1]), 5, &BigInt::one(), 1, 3).unwrap(),
            LiftOutcome::Lifted {
                residue: BigInt::one(),
                precision: 3
            }
        );
        assert_eq!(
            hensel_lift(&p(&[1, 1, 1]), 3, &BigInt::one(), 1, 2).unwrap(),
            LiftOutcome::NoLift
        );
        assert!(hensel_lift(&p(&[1, 1, 1]), 3, &BigInt::from(2), 1, 2).is_err());
    }

    #[test]
    fn precision_exhaustion_is_distinct() {
        // x^40 modulo 2: every even branch survives for many levels
        let f = IntPoly::monomial(BigInt::one(), 40);
        let err = roots_mod_prime_power(&f, 2, 30).unwrap_err();
        assert!(matches!(err, Error::PrecisionExhausted { .. }));
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_roots_mod(&p(&[-1, 0, 1]), 15).unwrap(), BigInt::from(4));
        assert_eq!(count_roots_mod(&p(&[-1, 0, 1]), 8).unwrap(), BigInt::from(4));
        for m in 1..200u64 {
            assert_eq!(count_roots_mod(&p(&[-3, 1]), m).unwrap(), BigInt::one());
        }
        assert!(matches!(
            count_roots_mod(&p(&[0, 0, 1]), 8),
            Err(Error::NotSquarefree)
        ));
    }

    fn bad_oracle(f: &IntPoly, w: u64, m: u64) -> u64 {
        let d = f.degree() as u32;
        let fp = f.derivative();
        (1..=w)
            .filter(|&b| {
                let g = fp.eval(&BigInt::from(b)).gcd(&BigInt::from(w)).to_u64().unwrap();
                let largest = (1..=w).filter(|k| g % k.pow(d) == 0).max().unwrap();
                largest > m
            })
            .count() as u64
    }

    #[test]
    fn bad_residue_examples() {
        assert_eq!(bad_residue_count(&p(&[0, 0, 1]), 16, 1).unwrap(), 8);
        assert_eq!(bad_residue_count(&p(&[0, 0, 1]), 16, 16).unwrap(), 0);
        let cube = p(&[0, 0, 0, 1]);
        assert_eq!(bad_residue_count(&cube, 27, 1).unwrap(), bad_oracle(&cube, 27, 1));
        assert_eq!(bad_residue_count(&cube, 27, 1).unwrap(), 9);
        for w in [12u64, 36, 64, 100, 216] {
            for f in [p(&[0, 0, 1]), p(&[1, 2, 3]), p(&[0, 0, 0, 2])] {
                for m in [1u64, 2, 3] {
                    assert_eq!(bad_residue_count(&f, w, m).unwrap(), bad_oracle(&f, w, m));
                }
            }
        }
        assert!(bad_residue_count(&p(&[0, 1]), 16, 1).is_err());
        assert!(bad_residue_count(&p(&[0, 0, 1]), BAD_RESIDUE_LIMIT + 1, 1).is_err());
    }

    #[test]
    fn joint_roots_and_height() {
        // x^2 - 1 at p = 2: res = -4, so Y_3 must be empty
        let f = p(&[-1, 0, 1]);
        assert!(!joint_roots(&f, 2, 1).unwrap().is_empty());
        assert!(joint_roots(&f, 2, 3).unwrap().is_empty());
        assert_eq!(joint_root_height(&f, 2).unwrap(), 1);
        assert_eq!(joint_root_height(&f, 3).unwrap(), 0);
    }
}

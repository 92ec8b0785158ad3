//! Small integer utilities: primes, factorisation, modular arithmetic, valuations.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Deterministic primality for 64-bit integers (Miller-Rabin with a fixed base set).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// All primes `<= n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

/// Prime factorisation of a 64-bit integer by trial division, ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Prime factors of |n| found by trial division up to `limit`. The second value is the
/// unfactored cofactor (1 when the factorisation is complete).
pub fn small_prime_factors(n: &BigInt, limit: u64) -> (Vec<(u64, u32)>, BigUint) {
    let mut m = n.magnitude().clone();
    let mut out = Vec::new();
    if m.is_zero() {
        return (out, m);
    }
    for p in primes_up_to(limit) {
        let pb = BigUint::from(p);
        if &pb * &pb > m {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = m.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            m = q;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    if m > BigUint::one() {
        if let Some(v) = m.to_u64() {
            if v <= limit.saturating_mul(limit) {
                out.push((v, 1));
                out.sort();
                return (out, BigUint::one());
            }
        }
    }
    (out, m)
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn ord_p(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(e);
        }
        m = q;
        e += 1;
    }
}

pub fn ord_p_u64(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// Non-negative remainder.
pub fn modulo(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

/// Inverse of `a` modulo `m` (m >= 1), if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Chinese remaindering of `x ≡ r_i (mod m_i)` over pairwise coprime moduli.
/// Returns the residue in `[0, ∏ m_i)`.
pub fn crt(parts: &[(BigInt, BigInt)]) -> Result<(BigInt, BigInt)> {
    let mut r = BigInt::zero();
    let mut m = BigInt::one();
    for (ri, mi) in parts {
        let inv = mod_inverse(&m, mi)
            .ok_or_else(|| Error::InvalidInput("CRT moduli are not coprime".into()))?;
        let t = ((ri - &r) * inv).mod_floor(mi);
        r += &m * t;
        m *= mi;
        r = r.mod_floor(&m);
    }
    Ok((r, m))
}

pub fn pow_big(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Product of the primes `<= w`.
pub fn primorial(w: u64) -> BigInt {
    primes_up_to(w).into_iter().map(BigInt::from).product()
}

//! Exact integer polynomials in ascending coefficient order.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An integer polynomial. Coefficients are stored lowest degree first with no trailing
/// zeros, so the zero polynomial has an empty coefficient list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c·x^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k];
        v.push(c);
        Self::new(v)
    }

    /// `x - a`.
    pub fn linear_root(a: &BigInt) -> Self {
        Self::new(vec![-a, BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.eval(&BigInt::from(x))
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Evaluates at every integer in `1..=n` as `i128`, failing if any value overflows.
    pub fn values_i128(&self, n: u64) -> Result<Vec<i128>> {
        (1..=n)
            .map(|x| {
                self.eval(&BigInt::from(x)).to_i128().ok_or_else(|| {
                    crate::error::budget("polynomial value", format!("P({x})"), "i128")
                })
            })
            .collect()
    }

    /// Coefficients reduced into `[0, m)`.
    pub fn reduce_mod_u64(&self, m: u64) -> Vec<u64> {
        let mb = BigInt::from(m);
        self.coeffs
            .iter()
            .map(|c| c.mod_floor(&mb).to_u64().unwrap())
            .collect()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    /// The polynomial `X ↦ P(c + mX)`.
    pub fn shift_scale(&self, c: &BigInt, m: &BigInt) -> Self {
        // Horner in the polynomial ring with the linear substitution.
        let lin = IntPoly::new(vec![c.clone(), m.clone()]);
        let mut acc = IntPoly::zero();
        for a in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &IntPoly::constant(a.clone());
        }
        acc
    }

    /// Gcd of the coefficients (nonnegative; zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Gcd of the coefficients of `P - P(0)`.
    pub fn content_shifted(&self) -> Result<BigInt> {
        if self.degree() == 0 {
            return Err(Error::InvalidInput(
                "content_shifted needs a polynomial of degree >= 1".into(),
            ));
        }
        Ok(self.coeffs[1..].iter().fold(BigInt::zero(), |g, c| g.gcd(c)))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Exact division by an integer; `None` if some coefficient is not divisible.
    pub fn div_exact_int(&self, k: &BigInt) -> Option<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = c.div_rem(k);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(Self::new(out))
    }

    /// Exact polynomial division in `Z[x]`; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &IntPoly) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.degree() < d.degree() || self.is_zero() {
            return if self.is_zero() { Some(Self::zero()) } else { None };
        }
        let mut rem = self.coeffs.clone();
        let dl = d.leading();
        let dd = d.degree();
        let mut q = vec![BigInt::zero(); self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let top = &rem[k + dd];
            let (qk, r) = top.div_rem(&dl);
            if !r.is_zero() {
                return None;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &qk * dc;
            }
            q[k] = qk;
        }
        if rem.iter().all(|c| c.is_zero()) {
            Some(Self::new(q))
        } else {
            None
        }
    }

    /// Pseudo-remainder of `self` by `d`.
    fn pseudo_rem(&self, d: &IntPoly) -> IntPoly {
        let mut r = self.clone();
        let dl = d.leading();
        let dd = d.degree();
        while !r.is_zero() && r.degree() >= dd {
            let shift = r.degree() - dd;
            let rl = r.leading();
            r = &r.scale(&dl) - &(&IntPoly::monomial(rl, shift) * d);
        }
        r
    }

    /// Greatest common divisor, primitive with positive leading coefficient.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.degree() == 0 {
                return IntPoly::constant(BigInt::one());
            }
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else if a.degree() == 0 {
            IntPoly::constant(BigInt::one())
        } else {
            a
        }
    }

    /// Squarefree decomposition: primitive pairwise coprime squarefree factors `g_i`
    /// with `P = c·∏ g_i^i`. Only factors of positive degree are returned.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPoly, u32)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let f = self.primitive_part();
        let fp = f.derivative();
        let a = f.gcd(&fp);
        let mut b = f.div_exact(&a).expect("gcd divides f");
        let c = fp.div_exact(&a).expect("gcd divides f'");
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while b.degree() > 0 {
            let ai = b.gcd(&d);
            b = b.div_exact(&ai).expect("gcd divides b");
            let ci = d.div_exact(&ai).expect("gcd divides d");
            d = &ci - &b.derivative();
            if ai.degree() > 0 {
                out.push((ai, i));
            }
            i += 1;
        }
        out
    }

    /// Product of the distinct irreducible factors, primitive.
    pub fn squarefree_part(&self) -> IntPoly {
        self.squarefree_decomposition()
            .into_iter()
            .fold(IntPoly::constant(BigInt::one()), |acc, (g, _)| &acc * &g)
    }

    pub fn is_squarefree(&self) -> bool {
        self.degree() >= 1 && !resultant(self, &self.derivative()).is_zero()
    }

    /// Parses the comma-separated ascending coefficient format, e.g. `"-1,0,1"`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.is_empty() {
            return Err(Error::InvalidInput("empty polynomial".into()));
        }
        let mut v = Vec::new();
        for part in t.split(',') {
            let p = part.trim();
            let c = BigInt::from_str(p)
                .map_err(|_| Error::InvalidInput(format!("bad coefficient '{p}'")))?;
            v.push(c);
        }
        Ok(Self::new(v))
    }

    /// Human-readable form such as `3x^2 - 4x + 1`.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let show = !(a.is_one() && k > 0);
            if show {
                s.push_str(&a.to_string());
            }
            match k {
                0 => {}
                1 => s.push('x'),
                _ => s.push_str(&format!("x^{k}")),
            }
        }
        s
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for IntPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        IntPoly::parse(s)
    }
}

impl From<IntPoly> for String {
    fn from(p: IntPoly) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for IntPoly {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        IntPoly::parse(&s)
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly::zero();
        }
        let mut v = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        IntPoly::new(v)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Determinant of an integer matrix by fraction-free (Bareiss) elimination.
fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Resultant of `f` and `g` as the determinant of their Sylvester matrix, so that
/// `res(f, g) = lc(f)^{deg g} ∏_{f(α)=0} g(α)`.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> BigInt {
    if f.is_zero() || g.is_zero() {
        return BigInt::zero();
    }
    let m = f.degree();
    let n = g.degree();
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut r = vec![BigInt::zero(); size];
        for (k, c) in f.coeffs.iter().enumerate() {
            r[i + m - k] = c.clone();
        }
        rows.push(r);
    }
    for i in 0..m {
        let mut r = vec![BigInt::zero(); size];
        for (k, c) in g.coeffs.iter().enumerate() {
            r[i + n - k] = c.clone();
        }
        rows.push(r);
    }
    bareiss_det(rows)
}

/// Discriminant normalised as `(-1)^{d(d-1)/2} res(f, f') / lc(f)`, which gives
/// `b² - 4ac` for quadratics.
pub fn discriminant(f: &IntPoly) -> BigInt {
    let d = f.degree();
    if d == 0 {
        return BigInt::zero();
    }
    let r = resultant(f, &f.derivative()) / f.leading();
    if (d * (d - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

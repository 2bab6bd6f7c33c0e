//! Arithmetic in GF(p^e) for odd primes p.
//!
//! An element is stored packed as the integer `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`
//! where `c_i` is the coefficient of `X^i` modulo the field's defining polynomial.
//! The packed value doubles as a dense index in `0..q`, which is what the
//! sweep and graph code use for flag arrays.
//!
//! The defining polynomial is the lexicographically smallest monic irreducible
//! of degree `e`, comparing coefficient vectors constant term first. For
//! `e = 1` this is `X` itself, so prime fields need no special casing.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on `q` for field construction.
pub const DEFAULT_FIELD_CAP: u64 = 1_000_000;

/// Largest extension degree representable with `q < 2^32` and `p >= 3`.
const MAX_DEGREE: usize = 21;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    /// Packed index in `0..q`.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn packed(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus, coefficients low degree first, length `e + 1`.
    modulus: Vec<u32>,
    order: Vec<FieldElement>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Splits `q` into `(p, e)` with `q = p^e`, `p` prime.
pub fn prime_power_decomposition(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    if rest != 1 {
        return Err(Error::NotPrimePower(q));
    }
    Ok((p, e))
}

impl Field {
    pub fn new(p: u64, e: u32) -> Result<Self> {
        Self::with_cap(p, e, DEFAULT_FIELD_CAP)
    }

    pub fn with_cap(p: u64, e: u32, cap: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            return Err(Error::EvenPrime);
        }
        if e == 0 {
            return Err(Error::ZeroDegree);
        }
        let cap = cap.min(u32::MAX as u64);
        let q = p
            .checked_pow(e)
            .filter(|&q| q <= cap)
            .ok_or(Error::CapExceeded {
                what: "field order",
                value: p.saturating_pow(e),
                cap,
            })?;

        let modulus = smallest_irreducible(p, e as usize);
        let order = canonical_order(p as u32, e as usize);
        Ok(Field {
            p: p as u32,
            e,
            q: q as u32,
            modulus,
            order,
        })
    }

    /// Builds the field of order `q`, which must be an odd prime power.
    pub fn from_order(q: u64) -> Result<Self> {
        Self::from_order_with_cap(q, DEFAULT_FIELD_CAP)
    }

    pub fn from_order_with_cap(q: u64, cap: u64) -> Result<Self> {
        let (p, e) = prime_power_decomposition(q)?;
        if p == 2 {
            return Err(Error::EvenPrime);
        }
        if q > cap {
            return Err(Error::CapExceeded {
                what: "field order",
                value: q,
                cap,
            });
        }
        Self::with_cap(p, e, cap)
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p as u64
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.e
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q as u64
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.q as usize
    }

    /// Modulus coefficients, constant term first, monic leading term last.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Human-readable modulus such as `X^2 + 1`.
    pub fn modulus_string(&self) -> String {
        let mut terms = Vec::new();
        for (deg, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match deg {
                0 => String::new(),
                1 => "X".to_string(),
                d => format!("X^{d}"),
            };
            terms.push(match (c, deg) {
                (c, 0) => c.to_string(),
                (1, _) => mono,
                (c, _) => format!("{c}*{mono}"),
            });
        }
        terms.join(" + ")
    }

    /// All `q` elements: zero, one, then the rest in lexicographic order of
    /// their coefficient vectors read constant term first.
    pub fn elements(&self) -> &[FieldElement] {
        &self.order
    }

    #[inline]
    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    #[inline]
    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// The image of an integer in the prime subfield.
    #[inline]
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u32)
    }

    /// The class of `X`, a generator of the field over the prime subfield.
    pub fn generator(&self) -> FieldElement {
        if self.e == 1 {
            FieldElement(0)
        } else {
            FieldElement(self.p)
        }
    }

    pub fn element_from_index(&self, index: u64) -> Result<FieldElement> {
        if index >= self.q as u64 {
            return Err(Error::InvalidElement(format!(
                "index {index} outside 0..{}",
                self.q
            )));
        }
        Ok(FieldElement(index as u32))
    }

    pub fn element_from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.e as usize {
            return Err(Error::InvalidElement(format!(
                "expected {} coefficients, got {}",
                self.e,
                coeffs.len()
            )));
        }
        let mut packed = 0u32;
        for &c in coeffs.iter().rev() {
            if c >= self.p {
                return Err(Error::InvalidElement(format!(
                    "coefficient {c} not reduced mod {}",
                    self.p
                )));
            }
            packed = packed * self.p + c;
        }
        Ok(FieldElement(packed))
    }

    pub fn coeffs(&self, x: FieldElement) -> Vec<u32> {
        let mut v = x.0;
        (0..self.e)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    #[inline]
    fn unpack(&self, x: FieldElement, out: &mut [u64; MAX_DEGREE]) {
        let p = self.p;
        let mut v = x.0;
        for c in out.iter_mut().take(self.e as usize) {
            *c = (v % p) as u64;
            v /= p;
        }
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.p;
        if self.e == 1 {
            return FieldElement((a.0 + b.0) % p);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.e {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.p;
        let mut x = a.0;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.e {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.p as u64;
        if self.e == 1 {
            return FieldElement((a.0 as u64 * b.0 as u64 % p) as u32);
        }
        if a.0 == 0 || b.0 == 0 {
            return FieldElement(0);
        }
        let e = self.e as usize;
        let mut ac = [0u64; MAX_DEGREE];
        let mut bc = [0u64; MAX_DEGREE];
        self.unpack(a, &mut ac);
        self.unpack(b, &mut bc);

        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..e {
            if ac[i] == 0 {
                continue;
            }
            for j in 0..e {
                prod[i + j] += ac[i] * bc[j];
            }
        }
        // X^e = -(m_0 + ... + m_{e-1} X^{e-1})
        for d in (e..2 * e - 1).rev() {
            let c = prod[d] % p;
            prod[d] = 0;
            if c == 0 {
                continue;
            }
            for j in 0..e {
                prod[d - e + j] += c * ((p - self.modulus[j] as u64) % p);
            }
        }
        let mut packed = 0u64;
        for i in (0..e).rev() {
            packed = packed * p + prod[i] % p;
        }
        FieldElement(packed as u32)
    }

    /// `x^n` by square-and-multiply, with `x^0 = 1` for every `x` including zero.
    pub fn pow(&self, x: FieldElement, mut n: u64) -> FieldElement {
        let mut acc = self.one();
        let mut base = x;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn display(&self, x: FieldElement) -> String {
        if self.e == 1 {
            return x.0.to_string();
        }
        let coeffs = self.coeffs(x);
        let mut terms = Vec::new();
        for (deg, &c) in coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            terms.push(match (deg, c) {
                (0, c) => c.to_string(),
                (1, 1) => "X".to_string(),
                (1, c) => format!("{c}X"),
                (d, 1) => format!("X^{d}"),
                (d, c) => format!("{c}X^{d}"),
            });
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {}", self.p, self.e, self.modulus_string())
    }
}

/// Packed indices sorted lexicographically by coefficient vector, constant
/// term most significant, with zero and one pulled to the front.
fn canonical_order(p: u32, e: usize) -> Vec<FieldElement> {
    let q = p.pow(e as u32);
    let mut order = Vec::with_capacity(q as usize);
    order.push(FieldElement(0));
    order.push(FieldElement(1));
    for rank in 0..q {
        // rank's base-p digits, most significant first, are (c_0, ..., c_{e-1})
        let mut r = rank;
        let mut packed = 0;
        let mut place = p.pow(e as u32 - 1);
        for _ in 0..e {
            packed += (r % p) * place;
            r /= p;
            place /= p;
        }
        if packed > 1 {
            order.push(FieldElement(packed));
        }
    }
    order
}

fn smallest_irreducible(p: u64, e: usize) -> Vec<u32> {
    // monic polynomials of degree e, in lexicographic order of (c_0, ..., c_{e-1})
    let count = p.pow(e as u32);
    for rank in 0..count {
        let mut f = vec![0u64; e + 1];
        let mut r = rank;
        for j in (0..e).rev() {
            f[j] = r % p;
            r /= p;
        }
        f[e] = 1;
        if e > 1 && f[0] == 0 {
            continue;
        }
        if poly::is_irreducible(&f, p) {
            return f.into_iter().map(|c| c as u32).collect();
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over a prime field")
}

/// Dense polynomials over Z_p, coefficients low degree first.
mod poly {
    fn trim(a: &mut Vec<u64>) {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
    }

    fn inv_mod(a: u64, p: u64) -> u64 {
        let mut acc = 1u64;
        let mut base = a % p;
        let mut n = p - 2;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            n >>= 1;
        }
        acc
    }

    fn degree(a: &[u64]) -> Option<usize> {
        a.iter().rposition(|&c| c != 0)
    }

    /// Remainder of `a` modulo `m` (m nonzero).
    fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let dm = degree(m).expect("nonzero modulus");
        let lead_inv = inv_mod(m[dm], p);
        let mut r: Vec<u64> = a.iter().map(|c| c % p).collect();
        while let Some(dr) = degree(&r) {
            if dr < dm {
                break;
            }
            let c = r[dr] * lead_inv % p;
            let shift = dr - dm;
            for (j, &mj) in m.iter().enumerate().take(dm + 1) {
                r[shift + j] = (r[shift + j] + p - c * mj % p) % p;
            }
        }
        r.truncate(dm.max(1));
        trim(&mut r);
        r
    }

    fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut prod = vec![0u64; a.len() + b.len()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        rem(&prod, m, p)
    }

    fn powmod(base: &[u64], mut n: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(base, m, p);
        while n > 0 {
            if n & 1 == 1 {
                acc = mulmod(&acc, &b, m, p);
            }
            n >>= 1;
            if n > 0 {
                b = mulmod(&b, &b, m, p);
            }
        }
        acc
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while degree(&y).is_some() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    /// Ben-Or: `f` of degree `n` is irreducible iff `gcd(f, X^{p^i} - X) = 1`
    /// for every `1 <= i <= n/2`.
    pub(super) fn is_irreducible(f: &[u64], p: u64) -> bool {
        let n = degree(f).unwrap_or(0);
        if n == 0 {
            return false;
        }
        let x = vec![0, 1];
        let mut h = rem(&x, f, p);
        for _ in 0..n / 2 {
            h = powmod(&h, p, f, p);
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            trim(&mut diff);
            let g = gcd(f, &diff, p);
            if degree(&g).is_none_or(|d| d > 0) {
                return false;
            }
        }
        true
    }
}

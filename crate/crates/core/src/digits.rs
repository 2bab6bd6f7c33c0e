//! Base-p digit algebra on exponent classes modulo `q - 1`.
//!
//! Exponents of nonzero field elements live in `Z/(q-1)`. The star map picks
//! the representative in `{1, ..., q-1}` for positive integers and sends `0`
//! to `0`, so a positive multiple of `q - 1` becomes `q - 1` (all digits
//! `p - 1`) and never the all-zero vector.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::Field;

/// Representative of `a` modulo `q - 1` in `{1, ..., q-1}`, with `0* = 0`.
#[inline]
pub fn star_reduce(a: u64, q: u64) -> u64 {
    if a == 0 {
        return 0;
    }
    match a % (q - 1) {
        0 => q - 1,
        r => r,
    }
}

/// `(a * b)*` without overflow.
#[inline]
pub fn star_mul(a: u64, b: u64, q: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    let m = (q - 1) as u128;
    match (a as u128 % m) * (b as u128 % m) % m {
        0 => q - 1,
        r => r as u64,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigitVector {
    p: u64,
    digits: Vec<u64>,
}

impl DigitVector {
    /// Digits `l_0, ..., l_{e-1}`, low digit first.
    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> usize {
        self.digits.len()
    }

    pub fn value(&self) -> u64 {
        self.digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    pub fn digit_sum(&self) -> u64 {
        self.digits.iter().sum()
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.digits
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Position `i` receives old position `i - t` (indices mod `e`).
    pub fn rotate(&self, t: usize) -> DigitVector {
        let e = self.digits.len();
        let digits = (0..e).map(|i| self.digits[(i + e - t % e) % e]).collect();
        DigitVector { p: self.p, digits }
    }
}

/// `d(l)`: base-p digits of `l*` modulo `q = p^e`, padded to length `e`.
pub fn digit_vector(l: u64, p: u64, e: u32) -> DigitVector {
    let q = p.pow(e);
    let mut v = star_reduce(l, q);
    let digits = (0..e)
        .map(|_| {
            let d = v % p;
            v /= p;
            d
        })
        .collect();
    DigitVector { p, digits }
}

pub fn support(dv: &DigitVector) -> BTreeSet<usize> {
    dv.support()
}

/// Digits of `(p^t * l)*`.
pub fn shift_class(l: u64, t: u32, p: u64, e: u32) -> DigitVector {
    let q = p.pow(e);
    digit_vector(star_mul(l, p.pow(t), q), p, e)
}

/// `C(a, b) mod p` for single digits `a, b < p`, via a product of residues.
fn digit_binom(a: u64, b: u64, p: u64) -> u64 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..b {
        num = num * ((a - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    num * pow_mod(den, p - 2, p) % p
}

pub fn pow_mod(base: u64, mut n: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc = 1u128 % m128;
    let mut b = base as u128 % m128;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        n >>= 1;
    }
    acc as u64
}

/// `C(m, n) mod p` as the product of digitwise binomials.
pub fn lucas_binom(mut m: u64, mut n: u64, p: u64) -> u64 {
    if n > m {
        return 0;
    }
    let mut acc = 1;
    while n > 0 {
        let (mi, ni) = (m % p, n % p);
        if ni > mi {
            return 0;
        }
        acc = acc * digit_binom(mi, ni, p) % p;
        m /= p;
        n /= p;
    }
    acc
}

/// Lucas binomials with per-digit factorial tables, for hot loops.
#[derive(Clone, Debug)]
pub struct LucasTable {
    p: u64,
    fact: Vec<u64>,
    inv_fact: Vec<u64>,
}

impl LucasTable {
    pub fn new(p: u64) -> Self {
        let mut fact = vec![1u64; p as usize];
        for i in 1..p as usize {
            fact[i] = fact[i - 1] * i as u64 % p;
        }
        let inv_fact = fact.iter().map(|&f| pow_mod(f, p - 2, p)).collect();
        LucasTable { p, fact, inv_fact }
    }

    #[inline]
    pub fn binom(&self, mut m: u64, mut n: u64) -> u64 {
        if n > m {
            return 0;
        }
        let p = self.p;
        let mut acc = 1;
        while n > 0 {
            let (mi, ni) = ((m % p) as usize, (n % p) as usize);
            if ni > mi {
                return 0;
            }
            acc = acc * self.fact[mi] % p * self.inv_fact[ni] % p * self.inv_fact[mi - ni] % p;
            m /= p;
            n /= p;
        }
        acc
    }
}

/// Exact `C(m, n)`; 128-bit arithmetic up to `m = 64`, big integers above.
pub fn exact_binom(m: u64, n: u64) -> BigUint {
    if n > m {
        return BigUint::default();
    }
    let n = n.min(m - n);
    if m <= 64 {
        let mut acc: u128 = 1;
        for i in 0..n {
            // exact at every step: acc = C(m - n + i + 1, i + 1)
            acc = acc * (m - n + i + 1) as u128 / (i + 1) as u128;
        }
        return BigUint::from(acc);
    }
    let mut acc = BigUint::one();
    for i in 0..n {
        acc = acc * BigUint::from(m - n + i + 1) / BigUint::from(i + 1);
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `k` modulo `m`, normalized to `{1, ..., m-1}` (`m = 2` gives 1).
pub fn mod_inverse(k: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::ParamDomain(format!("modulus {m} < 2")));
    }
    let (mut old_r, mut r) = (k as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return Err(Error::NotCoprime { k, m });
    }
    Ok(old_s.rem_euclid(m as i128) as u64)
}

/// Whether `k` lies in `{1, p, ..., p^{e-1}}`.
pub fn is_p_power(k: u64, field: &Field) -> bool {
    (0..field.e()).any(|i| field.p().pow(i) == k)
}

/// Whether every base-p digit of `k'` is 0 or 1.
pub fn digits_binary(k_prime: u64, p: u64, e: u32) -> bool {
    digit_vector(k_prime, p, e).digits().iter().all(|&d| d <= 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn star_examples() {
        assert_eq!(star_reduce(0, 9), 0);
        assert_eq!(star_reduce(9, 9), 1);
        assert_eq!(star_reduce(16, 9), 8);
        assert_eq!(star_reduce(8, 9), 8);
    }

    #[test]
    fn digit_vector_examples() {
        assert_eq!(digit_vector(4, 3, 3).digits(), &[1, 1, 0]);
        assert_eq!(digit_vector(26, 3, 3).digits(), &[2, 2, 2]);
        assert_eq!(digit_vector(27, 3, 3).digits(), &[1, 0, 0]);
        assert_eq!(digit_vector(0, 3, 3).digits(), &[0, 0, 0]);
        assert_eq!(digit_vector(52, 3, 3).digits(), &[2, 2, 2]);
    }

    #[test]
    fn support_examples() {
        assert_eq!(digit_vector(4, 3, 3).support(), BTreeSet::from([0, 1]));
        assert!(digit_vector(0, 3, 3).support().is_empty());
        // (0, 2, 1) = 0 + 2*3 + 1*9
        assert_eq!(support(&digit_vector(15, 3, 3)), BTreeSet::from([1, 2]));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift_class(4, 1, 3, 3).digits(), &[0, 1, 1]);
        for t in 0..3 {
            assert_eq!(shift_class(26, t, 3, 3).digits(), &[2, 2, 2]);
            assert_eq!(shift_class(0, t, 3, 3).digits(), &[0, 0, 0]);
        }
    }

    #[test]
    fn shift_is_rotation_exhaustive() {
        for (p, e) in [(3u64, 3u32), (5, 3), (3, 4)] {
            let q = p.pow(e);
            for l in 1..=q - 2 {
                let dv = digit_vector(l, p, e);
                for t in 0..e {
                    assert_eq!(
                        shift_class(l, t, p, e),
                        dv.rotate(t as usize),
                        "l={l} t={t}"
                    );
                }
            }
        }
    }

    #[test]
    fn lucas_examples() {
        assert_eq!(lucas_binom(7, 5, 3), 0);
        assert_eq!(exact_binom(7, 5), BigUint::from(21u32));
        for m in 0..50 {
            assert_eq!(lucas_binom(m, 0, 5), 1);
        }
        for p in [3u64, 5, 7] {
            for j in 0..p {
                let expected = if j % 2 == 0 { 1 } else { p - 1 };
                assert_eq!(lucas_binom(p - 1, j, p), expected);
            }
        }
        assert_eq!(lucas_binom(3, 5, 7), 0);
    }

    #[test]
    fn lucas_table_matches_free_function() {
        for p in [3u64, 5, 7, 11] {
            let t = LucasTable::new(p);
            for m in 0..200 {
                for n in 0..=m + 2 {
                    assert_eq!(t.binom(m, n), lucas_binom(m, n, p));
                }
            }
        }
    }

    #[test]
    fn exact_binom_crosses_threshold() {
        // C(70, 35) via Pascal's rule on big integers
        let mut row = vec![BigUint::one()];
        for _ in 0..70 {
            let mut next = vec![BigUint::one(); row.len() + 1];
            for i in 1..row.len() {
                next[i] = &row[i - 1] + &row[i];
            }
            row = next;
        }
        assert_eq!(exact_binom(70, 35), row[35]);
        assert_eq!(exact_binom(64, 32), BigUint::from(1832624140942590534u64));
        assert_eq!(exact_binom(3, 4), BigUint::default());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(5, 8), Ok(5));
        assert_eq!(mod_inverse(1, 26), Ok(1));
        assert_eq!(mod_inverse(1, 2), Ok(1));
        assert_eq!(mod_inverse(2, 8), Err(Error::NotCoprime { k: 2, m: 8 }));
        assert_eq!(mod_inverse(7, 26), Ok(15));
    }

    #[test]
    fn p_power_examples() {
        let f9 = Field::new(3, 2).unwrap();
        assert!(is_p_power(1, &f9));
        assert!(is_p_power(3, &f9));
        assert!(!is_p_power(4, &f9));
        assert!(!is_p_power(9, &f9));
    }

    #[test]
    fn binary_digit_examples() {
        assert!(digits_binary(4, 3, 3));
        assert!(!digits_binary(2, 3, 3));
        assert!(digits_binary(13, 3, 3));
    }

    #[test]
    fn star_respects_multiplication_exhaustive() {
        for q in [9u64, 27, 81, 243] {
            for a in 1..=2 * q {
                for b in 1..=2 * q {
                    assert_eq!(
                        star_reduce(a * b, q),
                        star_reduce(star_reduce(a, q) * star_reduce(b, q), q)
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn star_idempotent(e in 1u32..6, a in 0u64..1500) {
            let q = 3u64.pow(e).max(9);
            let a = a % (5 * q + 1);
            prop_assert_eq!(star_reduce(star_reduce(a, q), q), star_reduce(a, q));
        }

        #[test]
        fn star_mul_agrees(a in 0u64..100_000, b in 0u64..100_000) {
            prop_assert_eq!(star_mul(a, b, 243), star_reduce(a * b, 243));
        }

        #[test]
        fn xy_split_counts_support(l in 1u64..242, t in 0u32..5) {
            let (p, e) = (3, 5);
            let dv = digit_vector(l, p, e);
            let y = dv.support().intersection(&shift_class(l, t, p, e).support()).count();
            let x = dv.support().difference(&shift_class(l, t, p, e).support()).count();
            prop_assert_eq!(x + y, dv.support().len());
        }

        #[test]
        fn inverse_is_inverse(k in 1u64..1000, m in 2u64..1000) {
            match mod_inverse(k, m) {
                Ok(inv) => {
                    prop_assert!(inv >= 1 && inv < m.max(2));
                    prop_assert_eq!(k * inv % m, 1 % m);
                }
                Err(_) => prop_assert!(gcd(k, m) != 1),
            }
        }
    }
}

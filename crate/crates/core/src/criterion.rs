//! Binomial-sum characterizations of when `A_k` permutes `F_q`, and numeric
//! verifiers for the digit identity used to rule out non-p-power exponents.
//!
//! Two independent binomial routes are used on purpose. Plain binomials whose
//! arguments are below `q` (`C(s, i)`, `C(i, 2s)`) come from a Pascal triangle
//! reduced mod p, which is exact integer arithmetic. Binomials of starred
//! exponent classes go through Lucas' theorem. Agreement between the criteria
//! and the direct permutation test therefore exercises both.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::digits::{digit_vector, gcd, mod_inverse, pow_mod, shift_class, star_mul, LucasTable};
use crate::error::{Error, Result};
use crate::gf::Field;

/// Largest `q` for which the Pascal table is built.
pub const CRITERION_CAP: u64 = 2187;

/// Rows `0..=n_max` of Pascal's triangle mod p.
#[derive(Clone, Debug)]
struct Pascal {
    n_max: u64,
    cells: Vec<u32>,
}

impl Pascal {
    fn new(n_max: u64, p: u64) -> Self {
        let rows = n_max as usize + 1;
        let mut cells = Vec::with_capacity(rows * (rows + 1) / 2);
        let mut prev: Vec<u32> = Vec::new();
        for n in 0..rows {
            let mut row = vec![1u32; n + 1];
            for j in 1..n {
                row[j] = ((prev[j - 1] as u64 + prev[j] as u64) % p) as u32;
            }
            cells.extend_from_slice(&row);
            prev = row;
        }
        Pascal { n_max, cells }
    }

    #[inline]
    fn get(&self, n: u64, k: u64) -> u64 {
        debug_assert!(n <= self.n_max);
        if k > n {
            return 0;
        }
        let n = n as usize;
        self.cells[n * (n + 1) / 2 + k as usize] as u64
    }
}

/// Precomputed tables for the binomial sums over one field.
#[derive(Clone, Debug)]
pub struct BinomialSums<'f> {
    field: &'f Field,
    q: u64,
    p: u64,
    pascal: Pascal,
    lucas: LucasTable,
}

#[inline]
fn signed_add(acc: u64, term: u64, negative: bool, p: u64) -> u64 {
    if negative {
        (acc + p - term) % p
    } else {
        (acc + term) % p
    }
}

impl<'f> BinomialSums<'f> {
    pub fn new(field: &'f Field) -> Result<Self> {
        let q = field.q();
        if q > CRITERION_CAP {
            return Err(Error::CapExceeded {
                what: "criterion field order",
                value: q,
                cap: CRITERION_CAP,
            });
        }
        let p = field.p();
        Ok(BinomialSums {
            field,
            q,
            p,
            pascal: Pascal::new(q - 1, p),
            lucas: LucasTable::new(p),
        })
    }

    pub fn field(&self) -> &Field {
        self.field
    }

    fn check_k(&self, k: u64) -> Result<()> {
        if k == 0 || k >= self.q {
            return Err(Error::ParamDomain(format!(
                "k = {k} outside 1..={}",
                self.q - 1
            )));
        }
        Ok(())
    }

    /// `sum_{1<=i<=q-2} (-1)^i C(s, i) C((ki)*, (2ks)*) mod p`.
    pub fn coefficient_sum(&self, k: u64, s: u64) -> Result<u64> {
        self.check_k(k)?;
        let (q, p) = (self.q, self.p);
        if s == 0 || s > q - 2 {
            return Err(Error::ParamDomain(format!("s = {s} outside 1..={}", q - 2)));
        }
        let col = star_mul(2 * k, s, q);
        let mut acc = 0;
        for i in 1..=q - 2 {
            let left = self.pascal.get(s, i);
            if left == 0 {
                continue;
            }
            let right = self.lucas.binom(star_mul(k, i, q), col);
            acc = signed_add(acc, left * right % p, i % 2 == 1, p);
        }
        Ok(acc)
    }

    /// `gcd(k, q-1) = 1` and every `coefficient_sum(k, s)` vanishes for `1 <= s <= q-2`.
    pub fn binomial_criterion(&self, k: u64) -> Result<bool> {
        self.check_k(k)?;
        if gcd(k, self.q - 1) != 1 {
            return Ok(false);
        }
        for s in 1..=self.q - 2 {
            if self.coefficient_sum(k, s)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `sum_{2<=i<=q-2} (-1)^i C(row*, (k'i)*) C(i, 2s) mod p` where `row` is
    /// `k's` (first family) or `k'(s + (q-1)/2)` (second family, `half`).
    pub fn class_sum(&self, k_prime: u64, s: u64, half: bool) -> Result<u64> {
        let q = self.q;
        let h = (q - 1) / 2;
        let s_ok = if half {
            s >= 1 && s < h
        } else {
            s >= 1 && s <= h
        };
        if !s_ok {
            return Err(Error::ParamDomain(format!(
                "s = {s} (half = {half}) out of range"
            )));
        }
        if k_prime == 0 || gcd(k_prime, q - 1) != 1 {
            return Err(Error::ParamDomain(format!(
                "k' = {k_prime} not a unit mod {}",
                q - 1
            )));
        }
        let row = if half {
            star_mul(k_prime, s + h, q)
        } else {
            star_mul(k_prime, s, q)
        };
        Ok(self.class_sum_body(row, k_prime, 2 * s))
    }

    /// Shared body of the exponent-class sums: `sum_{2<=i<=q-2} (-1)^i C(row, (li)*) C(i, two_s)`.
    fn class_sum_body(&self, row: u64, l: u64, two_s: u64) -> u64 {
        let (q, p) = (self.q, self.p);
        let mut acc = 0;
        for i in 2..=q - 2 {
            let right = self.pascal.get(i, two_s);
            if right == 0 {
                continue;
            }
            let left = self.lucas.binom(row, star_mul(l, i, q));
            acc = signed_add(acc, left * right % p, i % 2 == 1, p);
        }
        acc
    }

    /// `gcd(k, q-1) = 1` and both families of sums vanish for `k' = k^{-1} mod (q-1)`.
    pub fn inverse_criterion(&self, k: u64) -> Result<bool> {
        self.check_k(k)?;
        let q = self.q;
        if gcd(k, q - 1) != 1 {
            return Ok(false);
        }
        let k_prime = mod_inverse(k, q - 1)?;
        let h = (q - 1) / 2;
        for s in 1..=h {
            if self.class_sum(k_prime, s, false)? != 0 {
                return Ok(false);
            }
        }
        for s in 1..h {
            if self.class_sum(k_prime, s, true)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Left side of the digit identity with `s = (q-1)/2 - (u + v p^t)`.
    pub fn identity_lhs(&self, l: u64, t: u32, u: u64, v: u64) -> Result<u64> {
        let field = self.field;
        let (p, e, q) = (self.p, field.e(), self.q);
        check_identity_domain(l, t, u, v, p, e)?;
        let h = (q - 1) / 2;
        let s = h - (u + v * p.pow(t));
        let row = star_mul(l, s + h, q);
        Ok(self.class_sum_body(row, l, 2 * s))
    }

    /// Every admissible `(l, t, u, v)` for this field, in lexicographic order.
    pub fn identity_grid(&self) -> Result<Vec<IdentityCheck>> {
        let (p, e, q) = (self.p, self.field.e(), self.q);
        if e < 3 {
            return Err(Error::ParamDomain(format!("e = {e} < 3")));
        }
        let half = (p - 1) / 2;
        let mut points = Vec::new();
        for l in binary_exponents(p, e) {
            for t in 1..e {
                for u in 0..=half {
                    for v in 0..=half {
                        points.push((l, t, u, v));
                    }
                }
            }
        }
        points
            .into_par_iter()
            .map(|(l, t, u, v)| {
                let (x, y) = xy_params(l, t, p, e)?;
                let lhs = self.identity_lhs(l, t, u, v)?;
                let rhs = identity_rhs(p, x, y, u, v);
                Ok(IdentityCheck {
                    q,
                    l,
                    t,
                    u,
                    v,
                    x,
                    y,
                    lhs,
                    rhs,
                    holds: lhs == rhs,
                    u_v_zero: u == 0 && v == 0,
                    zero_class_term: u == half && v == half && y == 0 && 2 * x == e as u64,
                })
            })
            .collect()
    }
}

/// Exponents `1 <= l < q` with all base-p digits in {0, 1}, excluding all-ones.
pub fn binary_exponents(p: u64, e: u32) -> Vec<u64> {
    let all_ones: u64 = (0..e).map(|i| p.pow(i)).sum();
    (1u64..1 << e)
        .map(|mask| {
            (0..e)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| p.pow(i))
                .sum()
        })
        .filter(|&l| l != all_ones)
        .collect()
}

fn check_identity_domain(l: u64, t: u32, u: u64, v: u64, p: u64, e: u32) -> Result<()> {
    if e < 3 {
        return Err(Error::ParamDomain(format!("e = {e} < 3")));
    }
    if t == 0 || t >= e {
        return Err(Error::ParamDomain(format!("t = {t} outside 1..={}", e - 1)));
    }
    let half = (p - 1) / 2;
    if u > half || v > half {
        return Err(Error::ParamDomain(format!(
            "u = {u}, v = {v} exceed {half}"
        )));
    }
    check_binary_l(l, p, e)?;
    let dv = digit_vector(l, p, e);
    if dv.digits().iter().all(|&d| d == 1) {
        return Err(Error::ParamDomain(format!("l = {l} has all digits 1")));
    }
    Ok(())
}

fn check_binary_l(l: u64, p: u64, e: u32) -> Result<()> {
    let dv = digit_vector(l, p, e);
    if l == 0 || dv.value() != l || dv.digits().iter().any(|&d| d > 1) {
        return Err(Error::ParamDomain(format!(
            "l = {l} must be positive with base-{p} digits in {{0, 1}}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub q: u64,
    pub l: u64,
    pub t: u32,
    pub u: u64,
    pub v: u64,
    pub x: u64,
    pub y: u64,
    pub lhs: u64,
    pub rhs: u64,
    pub holds: bool,
    /// `u = v = 0`, where `2s = q - 1` and the row class is a multiple of `q - 1`.
    pub u_v_zero: bool,
    /// `u = v = (p-1)/2`, `y = 0` and the two supports cover every digit: the
    /// `a = b = p-1` summand has `l i ≡ 0 (mod q-1)`, whose star is `q - 1`.
    pub zero_class_term: bool,
}

impl IdentityCheck {
    pub fn is_corner(&self) -> bool {
        self.u_v_zero || self.zero_class_term
    }
}

/// `y = |supp(l) ∩ supp(p^t l)|` and `x = digit sum of l - y`.
pub fn xy_params(l: u64, t: u32, p: u64, e: u32) -> Result<(u64, u64)> {
    check_binary_l(l, p, e)?;
    if t == 0 || t >= e {
        return Err(Error::ParamDomain(format!("t = {t} outside 1..={}", e - 1)));
    }
    let dv = digit_vector(l, p, e);
    let shifted = shift_class(l, t, p, e);
    let y = dv.support().intersection(&shifted.support()).count() as u64;
    Ok((dv.digit_sum() - y, y))
}

/// Rows `0..=n_max` of Pascal's triangle mod p, as nested vectors.
fn small_pascal(n_max: u64, p: u64) -> Vec<Vec<u64>> {
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max as usize {
        let mut row = vec![1u64; n + 1];
        for j in 1..n {
            row[j] = (rows[n - 1][j - 1] + rows[n - 1][j]) % p;
        }
        rows.push(row);
    }
    rows
}

fn binom_from(rows: &[Vec<u64>], n: u64, k: u64) -> u64 {
    if k > n {
        0
    } else {
        rows[n as usize][k as usize]
    }
}

/// Right side of the digit identity: the double sum over `0 <= a <= 2u`,
/// `0 <= b <= 2v` with `0^0 = 1` for the powered factors.
pub fn identity_rhs(p: u64, x: u64, y: u64, u: u64, v: u64) -> u64 {
    let rows = small_pascal(2 * (u + v).max(1), p);
    let c = |n, k| binom_from(&rows, n, k);
    let mut acc = 0;
    for a in 0..=2 * u {
        for b in 0..=2 * v {
            let term = pow_mod(c(a, u), x, p) * pow_mod(c(b, v), x, p) % p
                * pow_mod(c(a + b, u + v), y, p)
                % p
                * c(2 * u, a)
                % p
                * c(2 * v, b)
                % p;
            let negative = (a + b + u + v) % 2 == 1 && (x + y) % 2 == 1;
            acc = signed_add(acc, term, negative, p);
        }
    }
    acc
}

/// The closing sum over `(p-1)/2 <= a, b <= p-1`.
pub fn closing_sum(p: u64, x: u64, y: u64) -> u64 {
    let h = (p - 1) / 2;
    let rows = small_pascal(2 * (p - 1), p);
    let c = |n, k| binom_from(&rows, n, k);
    let mut acc = 0;
    for a in h..p {
        for b in h..p {
            let term = pow_mod(c(a, h), x, p) * pow_mod(c(b, h), x, p) % p
                * pow_mod(c(a + b, p - 1), y, p)
                % p
                * c(p - 1, a)
                % p
                * c(p - 1, b)
                % p;
            acc = signed_add(acc, term, (a + b) % 2 == 1, p);
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureCheck {
    pub p: u64,
    pub x: u64,
    pub y: u64,
    pub value: u64,
    pub holds: bool,
}

/// `closing_sum` over `x in 0..=x_max`, `y in 1..=y_max`; holds iff the value is 1.
pub fn closure_grid(p: u64, x_max: u64, y_max: u64) -> Vec<ClosureCheck> {
    let mut out = Vec::new();
    for x in 0..=x_max {
        for y in 1..=y_max {
            let value = closing_sum(p, x, y);
            out.push(ClosureCheck {
                p,
                x,
                y,
                value,
                holds: value == 1,
            });
        }
    }
    out
}

pub fn coefficient_sum(field: &Field, k: u64, s: u64) -> Result<u64> {
    BinomialSums::new(field)?.coefficient_sum(k, s)
}

pub fn binomial_criterion(field: &Field, k: u64) -> Result<bool> {
    BinomialSums::new(field)?.binomial_criterion(k)
}

pub fn class_sum(field: &Field, k_prime: u64, s: u64, half: bool) -> Result<u64> {
    BinomialSums::new(field)?.class_sum(k_prime, s, half)
}

pub fn inverse_criterion(field: &Field, k: u64) -> Result<bool> {
    BinomialSums::new(field)?.inverse_criterion(k)
}

pub fn identity_lhs(field: &Field, l: u64, t: u32, u: u64, v: u64) -> Result<u64> {
    BinomialSums::new(field)?.identity_lhs(l, t, u, v)
}

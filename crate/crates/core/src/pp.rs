//! The polynomial families
//!
//! ```text
//! A_k = X^k ((X+1)^k - X^k)
//! B_k = ((X+1)^{2k} - 1) X^{q-1-k} - 2 X^{q-1}
//! ```
//!
//! for `1 <= k <= q-1`, direct permutation tests over the whole field, and the
//! per-`(q, k)` records the sweeps are built from.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criterion::BinomialSums;
use crate::digits::{digits_binary, gcd, is_p_power, mod_inverse};
use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};
use crate::graphs::{MonomialGraph, DEFAULT_GIRTH_CAP};

pub fn eval_a(field: &Field, k: u64, x: FieldElement) -> FieldElement {
    let xk = field.pow(x, k);
    let shifted = field.pow(field.add(x, field.one()), k);
    field.mul(xk, field.sub(shifted, xk))
}

pub fn eval_b(field: &Field, k: u64, x: FieldElement) -> FieldElement {
    let q = field.q();
    let lead = field.sub(field.pow(field.add(x, field.one()), 2 * k), field.one());
    let head = field.mul(lead, field.pow(x, q - 1 - k));
    let tail = field.mul(field.from_int(2), field.pow(x, q - 1));
    field.sub(head, tail)
}

/// Values of `f` listed in the field's canonical element order.
pub fn value_table<F>(field: &Field, f: F) -> Vec<FieldElement>
where
    F: Fn(FieldElement) -> FieldElement,
{
    field.elements().iter().map(|&x| f(x)).collect()
}

/// True iff the `q` values are pairwise distinct.
pub fn is_permutation(field: &Field, values: &[FieldElement]) -> Result<bool> {
    if values.len() != field.size() {
        return Err(Error::LengthMismatch {
            expected: field.size(),
            actual: values.len(),
        });
    }
    let mut seen = vec![false; field.size()];
    for v in values {
        let slot = seen
            .get_mut(v.index())
            .ok_or_else(|| Error::InvalidElement(format!("index {}", v.index())))?;
        if *slot {
            return Ok(false);
        }
        *slot = true;
    }
    Ok(true)
}

fn permutes<F>(field: &Field, f: F) -> bool
where
    F: Fn(FieldElement) -> FieldElement,
{
    let mut seen = vec![false; field.size()];
    for &x in field.elements() {
        let slot = &mut seen[f(x).index()];
        if *slot {
            return false;
        }
        *slot = true;
    }
    true
}

pub fn a_is_pp(field: &Field, k: u64) -> bool {
    permutes(field, |x| eval_a(field, k, x))
}

pub fn b_is_pp(field: &Field, k: u64) -> bool {
    permutes(field, |x| eval_b(field, k, x))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Conjecture {
    A,
    B,
    /// Both `A_k` and `B_k` permute only for p-powers.
    #[serde(rename = "two")]
    Two,
}

impl fmt::Display for Conjecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conjecture::A => "A",
            Conjecture::B => "B",
            Conjecture::Two => "two",
        })
    }
}

impl FromStr for Conjecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Conjecture::A),
            "B" | "b" => Ok(Conjecture::B),
            "two" | "2" | "both" => Ok(Conjecture::Two),
            other => Err(Error::ParamDomain(format!("unknown conjecture {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub q: u64,
    pub k: u64,
    pub gcd_ok: bool,
    pub a_pp: bool,
    pub b_pp: bool,
    pub k_is_p_power: bool,
    pub k_prime: Option<u64>,
    pub k_prime_binary: Option<bool>,
    pub criterion: Option<bool>,
    pub girth_ge_8: Option<bool>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SweepOptions {
    pub criterion: bool,
    pub girth: bool,
    pub girth_cap: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            criterion: false,
            girth: false,
            girth_cap: DEFAULT_GIRTH_CAP,
        }
    }
}

fn check_k(field: &Field, k: u64) -> Result<()> {
    if k == 0 || k >= field.q() {
        return Err(Error::ParamDomain(format!(
            "k = {k} outside 1..={}",
            field.q() - 1
        )));
    }
    Ok(())
}

fn build_record(
    field: &Field,
    k: u64,
    opts: &SweepOptions,
    sums: Option<&BinomialSums<'_>>,
) -> Result<SweepRecord> {
    check_k(field, k)?;
    let (p, e, q) = (field.p(), field.e(), field.q());
    let gcd_ok = gcd(k, q - 1) == 1;
    let k_prime = if gcd_ok {
        Some(mod_inverse(k, q - 1)?)
    } else {
        None
    };
    let criterion = match sums {
        Some(s) => Some(s.binomial_criterion(k)?),
        None => None,
    };
    let girth_ge_8 = if opts.girth {
        Some(MonomialGraph::family(field, k).girth_at_least_with_cap(8, opts.girth_cap)?)
    } else {
        None
    };
    Ok(SweepRecord {
        q,
        k,
        gcd_ok,
        a_pp: a_is_pp(field, k),
        b_pp: b_is_pp(field, k),
        k_is_p_power: is_p_power(k, field),
        k_prime,
        k_prime_binary: k_prime.map(|kp| digits_binary(kp, p, e)),
        criterion,
        girth_ge_8,
    })
}

pub fn sweep_record(field: &Field, k: u64, opts: &SweepOptions) -> Result<SweepRecord> {
    let sums = if opts.criterion {
        Some(BinomialSums::new(field)?)
    } else {
        None
    };
    build_record(field, k, opts, sums.as_ref())
}

/// Records for every `1 <= k <= q-1`, in increasing `k`.
pub fn sweep(field: &Field, opts: &SweepOptions) -> Result<Vec<SweepRecord>> {
    let sums = if opts.criterion {
        Some(BinomialSums::new(field)?)
    } else {
        None
    };
    (1..field.q())
        .into_par_iter()
        .map(|k| build_record(field, k, opts, sums.as_ref()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureVerdict {
    pub q: u64,
    pub which: Conjecture,
    /// Exponents passing the relevant PP test.
    pub witnesses: Vec<u64>,
    pub p_powers: Vec<u64>,
    pub pass: bool,
}

pub fn p_powers(field: &Field) -> Vec<u64> {
    (0..field.e()).map(|i| field.p().pow(i)).collect()
}

pub fn verdict_from_records(
    field: &Field,
    which: Conjecture,
    records: &[SweepRecord],
) -> ConjectureVerdict {
    let witnesses: Vec<u64> = records
        .iter()
        .filter(|r| match which {
            Conjecture::A => r.a_pp,
            Conjecture::B => r.b_pp,
            Conjecture::Two => r.a_pp && r.b_pp,
        })
        .map(|r| r.k)
        .collect();
    let powers = p_powers(field);
    let pass = match which {
        Conjecture::A | Conjecture::B => witnesses == powers,
        Conjecture::Two => witnesses.iter().all(|k| powers.contains(k)),
    };
    ConjectureVerdict {
        q: field.q(),
        which,
        witnesses,
        p_powers: powers,
        pass,
    }
}

pub fn conjecture_verdict(field: &Field, which: Conjecture) -> ConjectureVerdict {
    let records: Vec<SweepRecord> = (1..field.q())
        .into_par_iter()
        .map(|k| {
            let (a_pp, b_pp) = match which {
                Conjecture::A => (a_is_pp(field, k), false),
                Conjecture::B => (false, b_is_pp(field, k)),
                Conjecture::Two => {
                    let a = a_is_pp(field, k);
                    (a, a && b_is_pp(field, k))
                }
            };
            SweepRecord {
                q: field.q(),
                k,
                gcd_ok: gcd(k, field.q() - 1) == 1,
                a_pp,
                b_pp,
                k_is_p_power: is_p_power(k, field),
                k_prime: None,
                k_prime_binary: None,
                criterion: None,
                girth_ge_8: None,
            }
        })
        .collect();
    verdict_from_records(field, which, &records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_examples() {
        for (p, e) in [(3, 1), (3, 2), (5, 1)] {
            let f = Field::new(p, e).unwrap();
            for &x in f.elements() {
                assert_eq!(eval_a(&f, 1, x), x);
            }
            for k in 1..f.q() {
                assert_eq!(eval_a(&f, k, f.zero()), f.zero());
            }
        }
        let f3 = Field::new(3, 1).unwrap();
        // A_2(1) = 1 * (2^2 - 1) = 3 = 0
        assert_eq!(eval_a(&f3, 2, f3.one()), f3.zero());
        let table = value_table(&f3, |x| eval_a(&f3, 2, x));
        assert_eq!(is_permutation(&f3, &table), Ok(false));
    }

    #[test]
    fn b_examples() {
        for (p, e) in [(3, 1), (3, 2), (7, 1)] {
            let f = Field::new(p, e).unwrap();
            for &x in f.elements() {
                assert_eq!(eval_b(&f, 1, x), x);
            }
            for k in 1..f.q() {
                assert_eq!(eval_b(&f, k, f.zero()), f.zero(), "k={k}");
            }
        }
    }

    #[test]
    fn permutation_tables() {
        let f9 = Field::new(3, 2).unwrap();
        let id = value_table(&f9, |x| x);
        assert_eq!(is_permutation(&f9, &id), Ok(true));
        let constant = vec![f9.one(); 9];
        assert_eq!(is_permutation(&f9, &constant), Ok(false));
        assert!(matches!(
            is_permutation(&f9, &id[..8]),
            Err(Error::LengthMismatch {
                expected: 9,
                actual: 8
            })
        ));
        let a3 = value_table(&f9, |x| eval_a(&f9, 3, x));
        assert_eq!(is_permutation(&f9, &a3), Ok(true));
    }

    #[test]
    fn permutation_test_ignores_order() {
        let f = Field::new(5, 2).unwrap();
        for k in [1, 2, 5, 7] {
            let mut table = value_table(&f, |x| eval_a(&f, k, x));
            let before = is_permutation(&f, &table).unwrap();
            table.reverse();
            table.rotate_left(7);
            assert_eq!(is_permutation(&f, &table).unwrap(), before);
            assert_eq!(before, a_is_pp(&f, k));
        }
    }

    #[test]
    fn record_examples() {
        let f9 = Field::new(3, 2).unwrap();
        let r = sweep_record(&f9, 3, &SweepOptions::default()).unwrap();
        assert!(r.a_pp && r.b_pp && r.k_is_p_power);
        assert_eq!(r.k_prime, Some(3));
        let r = sweep_record(&f9, 2, &SweepOptions::default()).unwrap();
        assert!(!r.gcd_ok && !r.a_pp);
        assert_eq!(r.k_prime, None);
        assert!(sweep_record(&f9, 9, &SweepOptions::default()).is_err());
        assert!(sweep_record(&f9, 0, &SweepOptions::default()).is_err());

        let f27 = Field::new(3, 3).unwrap();
        assert!(
            !sweep_record(&f27, 5, &SweepOptions::default())
                .unwrap()
                .a_pp
        );
    }

    #[test]
    fn verdict_examples() {
        let f9 = Field::new(3, 2).unwrap();
        for which in [Conjecture::A, Conjecture::B] {
            let v = conjecture_verdict(&f9, which);
            assert!(v.pass);
            assert_eq!(v.witnesses, vec![1, 3]);
        }
        let f3 = Field::new(3, 1).unwrap();
        let v = conjecture_verdict(&f3, Conjecture::A);
        assert!(v.pass);
        assert_eq!(v.witnesses, vec![1]);

        let f27 = Field::new(3, 3).unwrap();
        let v = conjecture_verdict(&f27, Conjecture::Two);
        assert!(v.pass);
        assert_eq!(v.witnesses, vec![1, 3, 9]);
    }

    #[test]
    fn conjecture_parsing() {
        assert_eq!("A".parse::<Conjecture>(), Ok(Conjecture::A));
        assert_eq!("two".parse::<Conjecture>(), Ok(Conjecture::Two));
        assert!("C".parse::<Conjecture>().is_err());
    }
}

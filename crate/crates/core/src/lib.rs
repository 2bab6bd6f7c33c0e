//! Exhaustive computation over small finite fields `GF(p^e)`, `p` odd:
//! permutation tests for the families `A_k` and `B_k`, their binomial-sum
//! criteria, base-p digit identities on exponent classes, and girth of the
//! bipartite monomial graphs `G_q(f, g)`.

pub mod criterion;
pub mod digits;
pub mod error;
pub mod gf;
pub mod graphs;
pub mod pp;

pub use error::{Error, Result};
pub use gf::{Field, FieldElement};

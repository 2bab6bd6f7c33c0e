//! Bipartite monomial graphs `G_q(f, g)` with `f = X^α Y^β`, `g = X^γ Y^δ`.
//!
//! Both sides are copies of `F_q^3`. A point `(p1, p2, p3)` is adjacent to a
//! line `[l1, l2, l3]` iff `p2 + l2 = f(p1, l1)` and `p3 + l3 = g(p1, l1)`.
//! Adjacency is never materialized: each vertex has exactly `q` neighbours,
//! one per value of the free first coordinate, and they are computed on demand
//! from two `q x q` monomial tables.
//!
//! Girth search uses the translations `(p2, p3) += (a, b)`, `(l2, l3) -= (a, b)`,
//! which are automorphisms acting transitively on each slice `p1 = c`. Every
//! cycle passes through a point, so BFS from the `q` representatives
//! `(c, 0, 0)` is enough.

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};
use crate::pp::{a_is_pp, b_is_pp, p_powers};

/// Default upper bound on `q` for girth computations.
pub const DEFAULT_GIRTH_CAP: u64 = 17;

const UNSEEN: u32 = u32::MAX;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// Points `(p1, p2, p3)`.
    P,
    /// Lines `[l1, l2, l3]`.
    L,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub side: Side,
    pub coords: [FieldElement; 3],
}

/// Shortest cycle length; `None` for a forest.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Girth(pub Option<u32>);

impl Girth {
    pub fn at_least(self, bound: u32) -> bool {
        self.0.is_none_or(|g| g >= bound)
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(g) => write!(f, "{g}"),
            None => f.write_str("infinite"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MonomialGraph<'f> {
    field: &'f Field,
    f_exps: (u64, u64),
    g_exps: (u64, u64),
    q: usize,
    /// `f(x, y)` at `x * q + y`, packed indices.
    f_table: Vec<u32>,
    g_table: Vec<u32>,
    /// `a - b` at `a * q + b`.
    sub_table: Vec<u32>,
}

impl<'f> MonomialGraph<'f> {
    pub fn new(field: &'f Field, f_exps: (u64, u64), g_exps: (u64, u64)) -> Self {
        let q = field.size();
        let els: Vec<FieldElement> = (0..q as u64)
            .map(|i| field.element_from_index(i).expect("index below q"))
            .collect();
        let powers =
            |exp: u64| -> Vec<FieldElement> { els.iter().map(|&x| field.pow(x, exp)).collect() };
        let monomial_table = |(alpha, beta): (u64, u64)| -> Vec<u32> {
            let xs = powers(alpha);
            let ys = powers(beta);
            let mut table = Vec::with_capacity(q * q);
            for &xa in &xs {
                for &yb in &ys {
                    table.push(field.mul(xa, yb).packed());
                }
            }
            table
        };
        let f_table = monomial_table(f_exps);
        let g_table = monomial_table(g_exps);
        let mut sub_table = Vec::with_capacity(q * q);
        for &a in &els {
            for &b in &els {
                sub_table.push(field.sub(a, b).packed());
            }
        }
        MonomialGraph {
            field,
            f_exps,
            g_exps,
            q,
            f_table,
            g_table,
            sub_table,
        }
    }

    /// `G_q(XY, X^k Y^{2k})`.
    pub fn family(field: &'f Field, k: u64) -> Self {
        Self::new(field, (1, 1), (k, 2 * k))
    }

    pub fn field(&self) -> &Field {
        self.field
    }

    pub fn f_exps(&self) -> (u64, u64) {
        self.f_exps
    }

    pub fn g_exps(&self) -> (u64, u64) {
        self.g_exps
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.q * self.q * self.q
    }

    /// Dense id: side offset plus `c1 q^2 + c2 q + c3`.
    pub fn vertex_id(&self, v: &Vertex) -> usize {
        let q = self.q;
        let base = match v.side {
            Side::P => 0,
            Side::L => q * q * q,
        };
        let [a, b, c] = v.coords;
        base + a.index() * q * q + b.index() * q + c.index()
    }

    pub fn vertex(&self, id: usize) -> Vertex {
        let q = self.q;
        let cube = q * q * q;
        let (side, rest) = if id < cube {
            (Side::P, id)
        } else {
            (Side::L, id - cube)
        };
        let el = |i: usize| {
            self.field
                .element_from_index(i as u64)
                .expect("index below q")
        };
        Vertex {
            side,
            coords: [el(rest / (q * q)), el(rest / q % q), el(rest % q)],
        }
    }

    /// The `q` neighbours of `v`, ordered by the canonical enumeration of the
    /// free first coordinate.
    pub fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        let mut ids = Vec::with_capacity(self.q);
        self.neighbor_ids(self.vertex_id(v), &mut ids);
        ids.into_iter().map(|id| self.vertex(id)).collect()
    }

    #[inline]
    fn neighbor_ids(&self, id: usize, out: &mut Vec<usize>) {
        let q = self.q;
        let cube = q * q * q;
        out.clear();
        let (on_p, rest) = if id < cube {
            (true, id)
        } else {
            (false, id - cube)
        };
        let c1 = rest / (q * q);
        let c2 = rest / q % q;
        let c3 = rest % q;
        let base = if on_p { cube } else { 0 };
        for free in self.field.elements() {
            let free = free.index();
            let cell = if on_p { c1 * q + free } else { free * q + c1 };
            let f = self.f_table[cell] as usize;
            let g = self.g_table[cell] as usize;
            let n2 = self.sub_table[f * q + c2] as usize;
            let n3 = self.sub_table[g * q + c3] as usize;
            out.push(base + free * q * q + n2 * q + n3);
        }
    }

    /// Length of the shortest cycle through `src` found by BFS, if it is at most `limit`.
    fn shortest_cycle_from(&self, src: usize, limit: u32) -> Option<u32> {
        let mut depth = vec![UNSEEN; self.vertex_count()];
        let mut parent = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        let mut buf = Vec::with_capacity(self.q);
        let mut best = u32::MAX;
        depth[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let d = depth[u];
            if 2 * d >= best || 2 * d > limit {
                break;
            }
            self.neighbor_ids(u, &mut buf);
            for &w in &buf {
                if depth[w] == UNSEEN {
                    depth[w] = d + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if w != parent[u] {
                    best = best.min(d + depth[w] + 1);
                }
            }
        }
        (best <= limit).then_some(best)
    }

    fn check_cap(&self, cap: u64) -> Result<()> {
        let q = self.field.q();
        if q > cap {
            return Err(Error::CapExceeded {
                what: "girth field order",
                value: q,
                cap,
            });
        }
        Ok(())
    }

    fn sources(&self) -> Vec<usize> {
        let q = self.q;
        (0..q).map(|c| c * q * q).collect()
    }

    pub fn girth(&self) -> Result<Girth> {
        self.girth_with_cap(DEFAULT_GIRTH_CAP)
    }

    pub fn girth_with_cap(&self, cap: u64) -> Result<Girth> {
        self.check_cap(cap)?;
        let best = self
            .sources()
            .into_par_iter()
            .filter_map(|s| self.shortest_cycle_from(s, u32::MAX - 1))
            .min();
        Ok(Girth(best))
    }

    /// True iff there is no cycle shorter than `bound`.
    pub fn girth_at_least(&self, bound: u32) -> Result<bool> {
        self.girth_at_least_with_cap(bound, DEFAULT_GIRTH_CAP)
    }

    pub fn girth_at_least_with_cap(&self, bound: u32, cap: u64) -> Result<bool> {
        self.check_cap(cap)?;
        if bound <= 3 {
            return Ok(true);
        }
        let limit = bound - 1;
        Ok(!self
            .sources()
            .into_par_iter()
            .any(|s| self.shortest_cycle_from(s, limit).is_some()))
    }

    /// Girth by BFS from every vertex, without the translation shortcut.
    pub fn girth_all_sources(&self) -> Girth {
        let best = (0..self.vertex_count())
            .into_par_iter()
            .filter_map(|s| self.shortest_cycle_from(s, u32::MAX - 1))
            .min();
        Girth(best)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyGirth {
    pub k: u64,
    pub girth: Girth,
    pub girth_ge_8: bool,
    pub a_pp: bool,
    pub b_pp: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GirthFamilyReport {
    pub q: u64,
    pub rows: Vec<FamilyGirth>,
    /// `k` with `G_q(XY, X^k Y^{2k})` of girth at least 8.
    pub passing: Vec<u64>,
    pub p_powers: Vec<u64>,
    /// Every passing `k` has both `A_k` and `B_k` permutations.
    pub implication_ok: bool,
    pub pass: bool,
}

pub fn girth_family_scan(field: &Field) -> Result<GirthFamilyReport> {
    girth_family_scan_with_cap(field, DEFAULT_GIRTH_CAP)
}

pub fn girth_family_scan_with_cap(field: &Field, cap: u64) -> Result<GirthFamilyReport> {
    let q = field.q();
    if q > cap {
        return Err(Error::CapExceeded {
            what: "girth field order",
            value: q,
            cap,
        });
    }
    let rows = (1..q)
        .into_par_iter()
        .map(|k| {
            let graph = MonomialGraph::family(field, k);
            let girth = graph.girth_with_cap(cap)?;
            Ok(FamilyGirth {
                k,
                girth,
                girth_ge_8: girth.at_least(8),
                a_pp: a_is_pp(field, k),
                b_pp: b_is_pp(field, k),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passing: Vec<u64> = rows.iter().filter(|r| r.girth_ge_8).map(|r| r.k).collect();
    let implication_ok = rows
        .iter()
        .filter(|r| r.girth_ge_8)
        .all(|r| r.a_pp && r.b_pp);
    let powers = p_powers(field);
    let pass = implication_ok && passing == powers;
    Ok(GirthFamilyReport {
        q,
        rows,
        passing,
        p_powers: powers,
        implication_ok,
        pass,
    })
}

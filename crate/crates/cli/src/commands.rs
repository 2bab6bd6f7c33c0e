//! Subcommand bodies. Each q (or p, for the closing sums) is one section;
//! sections run in the order given and are cached independently.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use anyhow::{bail, Result};
use ffpp::criterion::{closure_grid, BinomialSums, IdentityCheck, CRITERION_CAP};
use ffpp::gf::{is_prime, prime_power_decomposition};
use ffpp::graphs::{girth_family_scan_with_cap, MonomialGraph};
use ffpp::pp::{
    a_is_pp, b_is_pp, p_powers, sweep as pp_sweep, verdict_from_records, Conjecture, SweepOptions,
    SweepRecord,
};
use ffpp::Field;
use rayon::prelude::*;
use serde_json::json;

use crate::args::Command;
use crate::cache::{cache_key, Cache};
use crate::report::{CriterionRow, FieldRow, GirthRow, Row, RunReport, Section, Verdict};

/// Closing sums are checked for x in 0..=CLOSURE_X_MAX, y in 1..=CLOSURE_Y_MAX.
pub const CLOSURE_X_MAX: u64 = 4;
pub const CLOSURE_Y_MAX: u64 = 4;

#[derive(Clone, Debug)]
pub struct Context {
    pub field_cap: u64,
    pub girth_cap: u64,
    pub cache: Option<Cache>,
}

impl Context {
    fn section<F>(
        &self,
        command: &str,
        params: serde_json::Value,
        modulus: &str,
        compute: F,
    ) -> Result<Section>
    where
        F: FnOnce() -> Section,
    {
        match &self.cache {
            Some(cache) => cache.get_or_compute(&cache_key(command, &params, modulus), compute),
            None => Ok(compute()),
        }
    }
}

fn guard<F>(item: String, q: Option<u64>, f: F) -> Section
where
    F: FnOnce() -> ffpp::Result<Section>,
{
    f().unwrap_or_else(|err| {
        log::error!("{item}: {err}");
        Section::error(item, q, err.to_string())
    })
}

#[derive(Default)]
struct Body {
    moduli: BTreeMap<u64, String>,
    section: Section,
}

impl Body {
    /// Builds each field, records its modulus and appends the section
    /// computed (or recalled) for it. Bad orders become failing items.
    fn per_q<P, F>(
        &mut self,
        ctx: &Context,
        command: &str,
        qs: &[u64],
        params: P,
        body: F,
    ) -> Result<()>
    where
        P: Fn(u64) -> serde_json::Value,
        F: Fn(&Field) -> Section,
    {
        for &q in qs {
            let field = match Field::from_order_with_cap(q, ctx.field_cap) {
                Ok(f) => f,
                Err(err) => {
                    log::error!("q={q}: {err}");
                    self.section
                        .extend(Section::error(format!("q={q}"), Some(q), err.to_string()));
                    continue;
                }
            };
            let modulus = field.modulus_string();
            log::info!("{command}: q={q} modulus {modulus}");
            let section = ctx.section(command, params(q), &modulus, || body(&field))?;
            self.moduli.insert(q, modulus);
            self.section.extend(section);
        }
        Ok(())
    }
}

pub fn run(command: &Command, ctx: &Context) -> Result<RunReport> {
    let start = Instant::now();
    let (name, params, body) = match command {
        Command::Sweep {
            q,
            which,
            with_criterion,
            with_girth,
        } => {
            let params = json!({
                "q": q,
                "which": which.map(|w| w.to_string()),
                "with_criterion": with_criterion,
                "with_girth": with_girth,
                "girth_cap": ctx.girth_cap,
                "field_cap": ctx.field_cap,
            });
            (
                "sweep",
                params,
                sweep(ctx, q, *which, *with_criterion, *with_girth)?,
            )
        }
        Command::Identities { q, p } => {
            if q.is_empty() && p.is_empty() {
                bail!("identities needs --q and/or --p");
            }
            let params = json!({ "q": q, "p": p, "field_cap": ctx.field_cap });
            ("identities", params, identities(ctx, q, p)?)
        }
        Command::Girth { q, k, exps } => {
            let exps = match exps.as_deref() {
                None => None,
                Some(&[a, b, c, d]) => Some(((a, b), (c, d))),
                Some(other) => bail!("--exps takes four exponents, got {}", other.len()),
            };
            let params = json!({
                "q": q,
                "k": k,
                "exps": exps,
                "girth_cap": ctx.girth_cap,
                "field_cap": ctx.field_cap,
            });
            ("girth", params, girth(ctx, q, k, exps)?)
        }
        Command::VerifyAll { q_max } => {
            let params = json!({
                "q_max": q_max,
                "girth_cap": ctx.girth_cap,
                "field_cap": ctx.field_cap,
            });
            ("verify-all", params, verify_all(ctx, *q_max)?)
        }
        Command::FieldInfo { q } => {
            let params = json!({ "q": q, "field_cap": ctx.field_cap });
            ("field-info", params, field_info(ctx, q)?)
        }
    };
    let elapsed = start.elapsed().as_millis() as u64;
    let report = RunReport::new(name, params, body.moduli, body.section, elapsed);
    for v in &report.verdicts {
        let status = if v.pass { "pass" } else { "FAIL" };
        let tag = if v.gating { "" } else { " (informational)" };
        match v.q {
            Some(q) => log::info!("{} q={q}: {status}{tag} {}", v.name, v.detail),
            None => log::info!("{}: {status}{tag} {}", v.name, v.detail),
        }
    }
    Ok(report)
}

fn conjecture_name(which: Conjecture) -> &'static str {
    match which {
        Conjecture::A => "conjecture_a",
        Conjecture::B => "conjecture_b",
        Conjecture::Two => "conjecture_two",
    }
}

fn conjecture_verdicts(
    field: &Field,
    which: &[Conjecture],
    records: &[SweepRecord],
) -> Vec<Verdict> {
    which
        .iter()
        .map(|&w| {
            let v = verdict_from_records(field, w, records);
            Verdict::gating(
                conjecture_name(w),
                Some(v.q),
                v.pass,
                format!("witnesses {:?}, p-powers {:?}", v.witnesses, v.p_powers),
            )
        })
        .collect()
}

fn girth_family_verdict(field: &Field, records: &[SweepRecord]) -> Verdict {
    let passing: Vec<u64> = records
        .iter()
        .filter(|r| r.girth_ge_8 == Some(true))
        .map(|r| r.k)
        .collect();
    let implication = records
        .iter()
        .filter(|r| r.girth_ge_8 == Some(true))
        .all(|r| r.a_pp && r.b_pp);
    let powers = p_powers(field);
    Verdict::gating(
        "girth_family",
        Some(field.q()),
        implication && passing == powers,
        format!(
            "girth >= 8 for k in {passing:?}, p-powers {powers:?}, implies both PP: {implication}"
        ),
    )
}

fn sweep_section(field: &Field, which: &[Conjecture], opts: &SweepOptions) -> Section {
    guard(format!("q={}", field.q()), Some(field.q()), || {
        let records = pp_sweep(field, opts)?;
        let mut verdicts = conjecture_verdicts(field, which, &records);
        if opts.criterion {
            let bad: Vec<u64> = records
                .iter()
                .filter(|r| r.criterion != Some(r.a_pp))
                .map(|r| r.k)
                .collect();
            verdicts.push(Verdict::gating(
                "criterion_equivalence",
                Some(field.q()),
                bad.is_empty(),
                format!("binomial-sum criterion vs direct test, mismatched k: {bad:?}"),
            ));
        }
        if opts.girth {
            verdicts.push(girth_family_verdict(field, &records));
        }
        Ok(Section {
            rows: records.into_iter().map(Row::Sweep).collect(),
            verdicts,
        })
    })
}

fn sweep(
    ctx: &Context,
    qs: &[u64],
    which: Option<Conjecture>,
    with_criterion: bool,
    with_girth: bool,
) -> Result<Body> {
    let which: Vec<Conjecture> = match which {
        Some(w) => vec![w],
        None => vec![Conjecture::A, Conjecture::B, Conjecture::Two],
    };
    let opts = SweepOptions {
        criterion: with_criterion,
        girth: with_girth,
        girth_cap: ctx.girth_cap,
    };
    let mut body = Body::default();
    body.per_q(
        ctx,
        "sweep",
        qs,
        |q| json!({ "q": q, "which": which, "criterion": with_criterion, "girth": with_girth, "girth_cap": ctx.girth_cap }),
        |field| sweep_section(field, &which, &opts),
    )?;
    Ok(body)
}

fn count_holding<'a, I>(checks: I) -> (usize, usize, Vec<&'a IdentityCheck>)
where
    I: Iterator<Item = &'a IdentityCheck>,
{
    let mut total = 0;
    let mut failing = Vec::new();
    for c in checks {
        total += 1;
        if !c.holds {
            failing.push(c);
        }
    }
    (total - failing.len(), total, failing)
}

fn describe(failing: &[&IdentityCheck]) -> String {
    failing
        .iter()
        .take(8)
        .map(|c| {
            format!(
                "(l={}, t={}, u={}, v={}): {} vs {}",
                c.l, c.t, c.u, c.v, c.lhs, c.rhs
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// The identity verdict gates on points away from the two corner cases;
/// each corner gets its own informational verdict.
fn identity_section(field: &Field) -> Section {
    let q = field.q();
    guard(format!("q={q}"), Some(q), || {
        let grid = BinomialSums::new(field)?.identity_grid()?;
        let mut verdicts = Vec::new();
        let (ok, total, failing) = count_holding(grid.iter().filter(|c| !c.is_corner()));
        verdicts.push(Verdict::gating(
            "identity",
            Some(q),
            failing.is_empty(),
            format!(
                "{ok} of {total} points hold away from the corners {}",
                describe(&failing)
            )
            .trim_end()
            .to_string(),
        ));
        let (ok, total, failing) = count_holding(grid.iter().filter(|c| c.u_v_zero));
        verdicts.push(Verdict::informational(
            "identity_u_v_zero",
            Some(q),
            failing.is_empty(),
            format!("{ok} of {total} points with u = v = 0 hold"),
        ));
        let (ok, total, failing) = count_holding(grid.iter().filter(|c| c.zero_class_term));
        if total > 0 {
            verdicts.push(Verdict::informational(
                "identity_zero_class",
                Some(q),
                failing.is_empty(),
                format!("{ok} of {total} points with u = v = (p-1)/2, y = 0 hold"),
            ));
        }
        Ok(Section {
            rows: grid.into_iter().map(Row::Identity).collect(),
            verdicts,
        })
    })
}

fn closure_section(p: u64) -> Section {
    if p == 2 || !is_prime(p) {
        let err = if p == 2 {
            ffpp::Error::EvenPrime
        } else {
            ffpp::Error::NotPrime(p)
        };
        return Section::error(format!("p={p}"), None, err.to_string());
    }
    let grid = closure_grid(p, CLOSURE_X_MAX, CLOSURE_Y_MAX);
    let bad: Vec<(u64, u64)> = grid
        .iter()
        .filter(|c| !c.holds)
        .map(|c| (c.x, c.y))
        .collect();
    let verdict = Verdict::gating(
        "closing_sum",
        None,
        bad.is_empty(),
        format!(
            "p={p}: {} of {} (x, y) points equal 1; failing {bad:?}",
            grid.len() - bad.len(),
            grid.len()
        ),
    );
    Section {
        rows: grid.into_iter().map(Row::Closure).collect(),
        verdicts: vec![verdict],
    }
}

fn closure_sections(ctx: &Context, ps: &[u64], body: &mut Body) -> Result<()> {
    for &p in ps {
        let params = json!({ "p": p, "x_max": CLOSURE_X_MAX, "y_max": CLOSURE_Y_MAX });
        let section = ctx.section("closing-sum", params, "", || closure_section(p))?;
        body.section.extend(section);
    }
    Ok(())
}

fn identities(ctx: &Context, qs: &[u64], ps: &[u64]) -> Result<Body> {
    let mut body = Body::default();
    body.per_q(
        ctx,
        "identities",
        qs,
        |q| json!({ "q": q }),
        identity_section,
    )?;
    closure_sections(ctx, ps, &mut body)?;
    Ok(body)
}

fn girth_row(field: &Field, k: u64, cap: u64) -> ffpp::Result<(GirthRow, Verdict)> {
    let girth = MonomialGraph::family(field, k).girth_with_cap(cap)?;
    let (a_pp, b_pp) = (a_is_pp(field, k), b_is_pp(field, k));
    let pass = !girth.at_least(8) || (a_pp && b_pp);
    let verdict = Verdict::gating(
        "girth_implication",
        Some(field.q()),
        pass,
        format!("k={k}: girth {girth}, A_k PP {a_pp}, B_k PP {b_pp}"),
    );
    let row = GirthRow {
        q: field.q(),
        f: (1, 1),
        g: (k, 2 * k),
        k: Some(k),
        girth,
        a_pp: Some(a_pp),
        b_pp: Some(b_pp),
    };
    Ok((row, verdict))
}

fn girth_section(
    field: &Field,
    ks: &[u64],
    exps: Option<((u64, u64), (u64, u64))>,
    cap: u64,
) -> Section {
    let q = field.q();
    guard(format!("q={q}"), Some(q), || {
        let mut section = Section::default();
        if let Some((f, g)) = exps {
            let girth = MonomialGraph::new(field, f, g).girth_with_cap(cap)?;
            section.rows.push(Row::Girth(GirthRow {
                q,
                f,
                g,
                k: None,
                girth,
                a_pp: None,
                b_pp: None,
            }));
            section.verdicts.push(Verdict::informational(
                "girth",
                Some(q),
                true,
                format!(
                    "f = X^{}Y^{}, g = X^{}Y^{}: girth {girth}",
                    f.0, f.1, g.0, g.1
                ),
            ));
        } else if ks.is_empty() {
            let scan = girth_family_scan_with_cap(field, cap)?;
            for r in &scan.rows {
                section.rows.push(Row::Girth(GirthRow {
                    q,
                    f: (1, 1),
                    g: (r.k, 2 * r.k),
                    k: Some(r.k),
                    girth: r.girth,
                    a_pp: Some(r.a_pp),
                    b_pp: Some(r.b_pp),
                }));
            }
            section.verdicts.push(Verdict::gating(
                "girth_family",
                Some(q),
                scan.pass,
                format!(
                    "girth >= 8 for k in {:?}, p-powers {:?}, implies both PP: {}",
                    scan.passing, scan.p_powers, scan.implication_ok
                ),
            ));
        } else {
            let rows = ks
                .par_iter()
                .map(|&k| {
                    if k == 0 || k >= q {
                        return Err(ffpp::Error::ParamDomain(format!(
                            "k = {k} outside 1..={}",
                            q - 1
                        )));
                    }
                    girth_row(field, k, cap)
                })
                .collect::<ffpp::Result<Vec<_>>>()?;
            for (row, verdict) in rows {
                section.rows.push(Row::Girth(row));
                section.verdicts.push(verdict);
            }
        }
        Ok(section)
    })
}

fn girth(
    ctx: &Context,
    qs: &[u64],
    ks: &[u64],
    exps: Option<((u64, u64), (u64, u64))>,
) -> Result<Body> {
    let mut body = Body::default();
    body.per_q(
        ctx,
        "girth",
        qs,
        |q| json!({ "q": q, "k": ks, "exps": exps, "girth_cap": ctx.girth_cap }),
        |field| girth_section(field, ks, exps, ctx.girth_cap),
    )?;
    Ok(body)
}

/// Odd prime powers 3 <= q <= q_max in increasing order.
pub fn odd_prime_powers(q_max: u64) -> Vec<u64> {
    (3..=q_max)
        .filter(|&q| matches!(prime_power_decomposition(q), Ok((p, _)) if p != 2))
        .collect()
}

fn criterion_section(field: &Field, records: &[SweepRecord]) -> Section {
    let q = field.q();
    guard(format!("q={q}"), Some(q), || {
        let sums = BinomialSums::new(field)?;
        let rows = records
            .par_iter()
            .map(|r| {
                Ok(CriterionRow {
                    q,
                    k: r.k,
                    direct: r.a_pp,
                    binomial: sums.binomial_criterion(r.k)?,
                    inverse: sums.inverse_criterion(r.k)?,
                })
            })
            .collect::<ffpp::Result<Vec<_>>>()?;
        let bad: Vec<u64> = rows
            .iter()
            .filter(|r| r.inverse != r.binomial)
            .map(|r| r.k)
            .collect();
        Ok(Section {
            verdicts: vec![Verdict::gating(
                "criterion_inverse_form",
                Some(q),
                bad.is_empty(),
                format!("inverse-exponent vs binomial-sum criterion, mismatched k: {bad:?}"),
            )],
            rows: rows.into_iter().map(Row::Criterion).collect(),
        })
    })
}

fn girth_eight_section(field: &Field, cap: u64) -> Section {
    let q = field.q();
    guard(format!("q={q}"), Some(q), || {
        let girth = MonomialGraph::new(field, (1, 1), (1, 2)).girth_with_cap(cap)?;
        Ok(Section {
            rows: vec![Row::Girth(GirthRow {
                q,
                f: (1, 1),
                g: (1, 2),
                k: None,
                girth,
                a_pp: None,
                b_pp: None,
            })],
            verdicts: vec![Verdict::gating(
                "girth_eight",
                Some(q),
                girth.0 == Some(8),
                format!("f = XY, g = XY^2: girth {girth}"),
            )],
        })
    })
}

fn verify_section(field: &Field, girth_cap: u64) -> Section {
    let q = field.q();
    let in_girth_cap = q <= girth_cap;
    let opts = SweepOptions {
        criterion: q <= CRITERION_CAP,
        girth: in_girth_cap,
        girth_cap,
    };
    let all = [Conjecture::A, Conjecture::B, Conjecture::Two];
    let mut section = sweep_section(field, &all, &opts);
    let records: Vec<SweepRecord> = section
        .rows
        .iter()
        .filter_map(|r| match r {
            Row::Sweep(s) => Some(s.clone()),
            _ => None,
        })
        .collect();
    if q <= CRITERION_CAP {
        section.extend(criterion_section(field, &records));
    }
    if field.e() >= 3 && q <= CRITERION_CAP {
        section.extend(identity_section(field));
    }
    if in_girth_cap {
        section.extend(girth_eight_section(field, girth_cap));
    }
    section
}

fn verify_all(ctx: &Context, q_max: u64) -> Result<Body> {
    let qs = odd_prime_powers(q_max);
    log::info!("verify-all over q in {qs:?}");
    let mut body = Body::default();
    body.per_q(
        ctx,
        "verify-all",
        &qs,
        |q| json!({ "q": q, "girth_cap": ctx.girth_cap }),
        |field| verify_section(field, ctx.girth_cap),
    )?;
    let ps: Vec<u64> = qs
        .iter()
        .filter_map(|&q| prime_power_decomposition(q).ok().map(|(p, _)| p))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    closure_sections(ctx, &ps, &mut body)?;
    Ok(body)
}

fn field_info(ctx: &Context, qs: &[u64]) -> Result<Body> {
    let mut body = Body::default();
    body.per_q(
        ctx,
        "field-info",
        qs,
        |q| json!({ "q": q }),
        |field| Section {
            rows: vec![Row::Field(FieldRow {
                q: field.q(),
                p: field.p(),
                e: field.e(),
                modulus: field.modulus_string(),
                generator: field.generator().packed(),
            })],
            verdicts: Vec::new(),
        },
    )?;
    Ok(body)
}

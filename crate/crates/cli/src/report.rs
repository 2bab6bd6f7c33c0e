//! Report structure shared by every subcommand, and its JSON/CSV writers.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use ffpp::criterion::{ClosureCheck, IdentityCheck};
use ffpp::graphs::Girth;
use ffpp::pp::SweepRecord;
use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CSV_HEADER: [&str; 10] = [
    "q",
    "k",
    "gcd_ok",
    "a_pp",
    "b_pp",
    "criterion",
    "k_prime",
    "k_prime_binary",
    "girth_class",
    "p_power",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionRow {
    pub q: u64,
    pub k: u64,
    pub direct: bool,
    pub binomial: bool,
    pub inverse: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GirthRow {
    pub q: u64,
    pub f: (u64, u64),
    pub g: (u64, u64),
    pub k: Option<u64>,
    pub girth: Girth,
    pub a_pp: Option<bool>,
    pub b_pp: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRow {
    pub q: u64,
    pub p: u64,
    pub e: u32,
    pub modulus: String,
    pub generator: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemError {
    pub item: String,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Row {
    Sweep(SweepRecord),
    Criterion(CriterionRow),
    Identity(IdentityCheck),
    Closure(ClosureCheck),
    Girth(GirthRow),
    Field(FieldRow),
    Error(ItemError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub q: Option<u64>,
    pub pass: bool,
    /// Non-gating verdicts are reported but do not affect the exit status.
    pub gating: bool,
    pub detail: String,
}

impl Verdict {
    pub fn gating(name: &str, q: Option<u64>, pass: bool, detail: String) -> Self {
        Verdict {
            name: name.to_string(),
            q,
            pass,
            gating: true,
            detail,
        }
    }

    pub fn informational(name: &str, q: Option<u64>, pass: bool, detail: String) -> Self {
        Verdict {
            gating: false,
            ..Verdict::gating(name, q, pass, detail)
        }
    }
}

/// Rows and verdicts for one unit of work, usually a single q. This is also
/// the unit stored in the cache.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub rows: Vec<Row>,
    pub verdicts: Vec<Verdict>,
}

impl Section {
    pub fn error(item: String, q: Option<u64>, error: String) -> Self {
        Section {
            rows: vec![Row::Error(ItemError {
                item: item.clone(),
                error: error.clone(),
            })],
            verdicts: vec![Verdict::gating("item", q, false, error)],
        }
    }

    pub fn extend(&mut self, other: Section) {
        self.rows.extend(other.rows);
        self.verdicts.extend(other.verdicts);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub params: serde_json::Value,
    pub modulus_by_q: BTreeMap<u64, String>,
    pub rows: Vec<Row>,
    pub verdicts: Vec<Verdict>,
    pub overall: bool,
    pub version: String,
    pub elapsed_ms: u64,
}

impl RunReport {
    pub fn new(
        command: &str,
        params: serde_json::Value,
        modulus_by_q: BTreeMap<u64, String>,
        body: Section,
        elapsed_ms: u64,
    ) -> Self {
        let overall = body.verdicts.iter().filter(|v| v.gating).all(|v| v.pass);
        RunReport {
            command: command.to_string(),
            params,
            modulus_by_q,
            rows: body.rows,
            verdicts: body.verdicts,
            overall,
            version: VERSION.to_string(),
            elapsed_ms,
        }
    }

    pub fn sweep_records(&self) -> impl Iterator<Item = &SweepRecord> {
        self.rows.iter().filter_map(|r| match r {
            Row::Sweep(s) => Some(s),
            _ => None,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")
            .with_context(|| format!("writing {}", path.display()))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in self.sweep_records() {
            w.write_record(csv_fields(r))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let file =
            std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        self.write_csv(file)
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_fields(r: &SweepRecord) -> [String; 10] {
    let girth_class = match r.girth_ge_8 {
        Some(true) => "ge8",
        Some(false) => "lt8",
        None => "",
    };
    [
        r.q.to_string(),
        r.k.to_string(),
        r.gcd_ok.to_string(),
        r.a_pp.to_string(),
        r.b_pp.to_string(),
        opt(r.criterion),
        opt(r.k_prime),
        opt(r.k_prime_binary),
        girth_class.to_string(),
        r.k_is_p_power.to_string(),
    ]
}

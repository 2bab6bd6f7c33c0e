use std::fs;
use std::process::{Command as Process, Output};

use ffpp::graphs::Girth;
use ffpp_cli::cache::{cache_key, Cache};
use ffpp_cli::report::{GirthRow, CSV_HEADER};
use ffpp_cli::{run, Command, Context, Row, RunReport, Section};

fn ffpp(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_ffpp"))
        .args(args)
        .env_remove("FFPP_GIRTH_CAP")
        .env_remove("FFPP_FIELD_CAP")
        .output()
        .expect("binary runs")
}

fn report_from_stdout(out: &Output) -> RunReport {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn ctx() -> Context {
    Context {
        field_cap: 1_000_000,
        girth_cap: 17,
        cache: None,
    }
}

fn verdict<'a>(report: &'a RunReport, name: &str) -> &'a ffpp_cli::Verdict {
    report
        .verdicts
        .iter()
        .find(|v| v.name == name)
        .unwrap_or_else(|| panic!("no verdict {name}"))
}

fn girth_rows(report: &RunReport) -> Vec<&GirthRow> {
    report
        .rows
        .iter()
        .filter_map(|r| match r {
            Row::Girth(g) => Some(g),
            _ => None,
        })
        .collect()
}

#[test]
fn sweep_conjecture_a_at_nine() {
    let out = ffpp(&["sweep", "--q", "9", "--which", "A"]);
    assert!(out.status.success());
    let report = report_from_stdout(&out);
    let v = verdict(&report, "conjecture_a");
    assert!(v.pass);
    assert!(v.detail.contains("witnesses [1, 3]"));
    assert_eq!(report.sweep_records().count(), 8);
    assert_eq!(report.modulus_by_q[&9], "X^2 + 1");
}

#[test]
fn even_order_is_an_item_error_and_processing_continues() {
    let out = ffpp(&["sweep", "--q", "4,3"]);
    assert_eq!(out.status.code(), Some(1));
    let report = report_from_stdout(&out);
    assert!(!report.overall);
    match &report.rows[0] {
        Row::Error(e) => {
            assert_eq!(e.item, "q=4");
            assert!(e.error.contains("characteristic 2"));
        }
        other => panic!("expected an error row, got {other:?}"),
    }
    assert!(report.sweep_records().all(|r| r.q == 3));
    assert_eq!(report.sweep_records().count(), 2);
}

#[test]
fn non_prime_power_is_an_item_error() {
    let report = run(
        &Command::Sweep {
            q: vec![15, 5],
            which: None,
            with_criterion: false,
            with_girth: false,
        },
        &ctx(),
    )
    .unwrap();
    assert!(!report.overall);
    assert!(matches!(&report.rows[0], Row::Error(e) if e.item == "q=15"));
    assert_eq!(
        report
            .verdicts
            .iter()
            .filter(|v| v.q == Some(5) && v.pass)
            .count(),
        3
    );
}

#[test]
fn sweep_two_passes_for_small_primes() {
    let out = ffpp(&[
        "sweep",
        "--q",
        "3,5,7",
        "--which",
        "two",
        "--with-criterion",
        "--with-girth",
    ]);
    assert!(out.status.success());
    let report = report_from_stdout(&out);
    for q in [3, 5, 7] {
        for name in ["conjecture_two", "criterion_equivalence", "girth_family"] {
            let v = report
                .verdicts
                .iter()
                .find(|v| v.name == name && v.q == Some(q))
                .unwrap();
            assert!(v.pass, "{name} q={q}");
        }
    }
}

#[test]
fn identities_at_27_gate_on_non_corner_points() {
    let out = ffpp(&["identities", "--q", "27"]);
    assert!(out.status.success());
    let report = report_from_stdout(&out);
    let main = verdict(&report, "identity");
    assert!(main.pass && main.gating);
    assert!(main.detail.starts_with("36 of 36"));
    let corner = verdict(&report, "identity_u_v_zero");
    assert!(!corner.pass && !corner.gating);
    assert!(corner.detail.starts_with("0 of 12"));
    let identity_rows = report
        .rows
        .iter()
        .filter(|r| matches!(r, Row::Identity(_)))
        .count();
    assert_eq!(identity_rows, 48);
}

#[test]
fn identities_reject_degree_two() {
    let out = ffpp(&["identities", "--q", "9"]);
    assert_eq!(out.status.code(), Some(1));
    let report = report_from_stdout(&out);
    assert!(matches!(&report.rows[0], Row::Error(e) if e.error.contains("e = 2 < 3")));
}

#[test]
fn closing_sums_for_small_primes() {
    let out = ffpp(&["identities", "--p", "3,5,7"]);
    assert!(out.status.success());
    let report = report_from_stdout(&out);
    let closures: Vec<_> = report
        .rows
        .iter()
        .filter_map(|r| match r {
            Row::Closure(c) => Some(c),
            _ => None,
        })
        .collect();
    assert_eq!(closures.len(), 3 * 5 * 4);
    assert!(closures.iter().all(|c| c.value == 1 && c.holds));
}

#[test]
fn identities_without_arguments_is_a_usage_error() {
    let out = ffpp(&["identities"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn girth_examples() {
    let cases: [(&str, &str, Option<u32>); 3] = [
        ("5", "1", Some(8)),
        ("3", "2", Some(6)),
        ("9", "3", Some(8)),
    ];
    for (q, k, expected) in cases {
        let out = ffpp(&["girth", "--q", q, "--k", k]);
        assert!(out.status.success(), "q={q} k={k}");
        let report = report_from_stdout(&out);
        let rows = girth_rows(&report);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].girth, Girth(expected), "q={q} k={k}");
    }
}

#[test]
fn girth_with_explicit_exponents() {
    let out = ffpp(&["girth", "--q", "3", "--exps", "1,1,2,4"]);
    assert!(out.status.success());
    let report = report_from_stdout(&out);
    let rows = girth_rows(&report);
    assert_eq!(
        (rows[0].f, rows[0].g, rows[0].girth),
        ((1, 1), (2, 4), Girth(Some(6)))
    );
    let out = ffpp(&["girth", "--q", "3", "--exps", "1,1,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn girth_scan_when_no_k_given() {
    let report = run(
        &Command::Girth {
            q: vec![9],
            k: vec![],
            exps: None,
        },
        &ctx(),
    )
    .unwrap();
    assert!(verdict(&report, "girth_family").pass);
    let ge8: Vec<u64> = girth_rows(&report)
        .iter()
        .filter(|r| r.girth.at_least(8))
        .filter_map(|r| r.k)
        .collect();
    assert_eq!(ge8, vec![1, 3]);
}

#[test]
fn girth_cap_from_environment() {
    let out = Process::new(env!("CARGO_BIN_EXE_ffpp"))
        .args(["girth", "--q", "5", "--k", "1"])
        .env("FFPP_GIRTH_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report = report_from_stdout(&out);
    assert!(matches!(&report.rows[0], Row::Error(e) if e.error.contains("exceeds")));
}

#[test]
fn field_cap_from_environment() {
    let out = Process::new(env!("CARGO_BIN_EXE_ffpp"))
        .args(["field-info", "--q", "27,7"])
        .env("FFPP_FIELD_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report = report_from_stdout(&out);
    assert_eq!(report.rows.len(), 2);
    assert!(matches!(&report.rows[1], Row::Field(f) if f.q == 7 && f.modulus == "X"));
}

#[test]
fn verify_all_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = ffpp(&[
        "verify-all",
        "--q-max",
        "9",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: RunReport = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(report.overall);
    assert_eq!(report.command, "verify-all");
    let keys: Vec<u64> = report.modulus_by_q.keys().copied().collect();
    assert_eq!(keys, vec![3, 5, 7, 9]);
    let value: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    for key in [
        "command",
        "params",
        "modulus_by_q",
        "rows",
        "verdicts",
        "overall",
        "version",
    ] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn reruns_are_identical_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for (i, jobs) in ["1", "4"].iter().enumerate() {
        let path = dir.path().join(format!("run{i}.json"));
        let out = ffpp(&[
            "verify-all",
            "--q-max",
            "27",
            "--jobs",
            jobs,
            "--json",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let mut value: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        value.as_object_mut().unwrap().remove("elapsed_ms");
        bodies.push(serde_json::to_string(&value).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn report_round_trips() {
    let report = run(&Command::VerifyAll { q_max: 27 }, &ctx()).unwrap();
    let text = report.to_json().unwrap();
    let back: RunReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
}

#[test]
fn csv_columns_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let out = ffpp(&[
        "sweep",
        "--q",
        "5,9",
        "--with-criterion",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, CSV_HEADER);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4 + 8);
    assert_eq!(
        &rows[0],
        vec!["5", "1", "true", "true", "true", "true", "1", "true", "", "true"]
    );
    // q = 9, k = 2 shares a factor with 8: no inverse, no PP
    assert_eq!(
        &rows[5],
        vec!["9", "2", "false", "false", "false", "false", "", "", "", "false"]
    );
}

#[test]
fn cache_hits_match_fresh_results() {
    let dir = tempfile::tempdir().unwrap();
    let cached = Context {
        cache: Some(Cache::open(dir.path()).unwrap()),
        ..ctx()
    };
    let command = Command::VerifyAll { q_max: 13 };
    let fresh = run(&command, &ctx()).unwrap();
    let first = run(&command, &cached).unwrap();
    let entries = fs::read_dir(dir.path()).unwrap().count();
    assert!(entries > 0);
    let second = run(&command, &cached).unwrap();
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), entries);
    for r in [&first, &second] {
        assert_eq!(r.rows, fresh.rows);
        assert_eq!(r.verdicts, fresh.verdicts);
    }
}

#[test]
fn cache_is_append_only_and_ignores_corrupt_entries() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::open(dir.path()).unwrap();
    let key = cache_key("test", &serde_json::json!({ "q": 3 }), "X");
    assert_eq!(key.len(), 64);
    assert_ne!(
        key,
        cache_key("test", &serde_json::json!({ "q": 3 }), "X + 1")
    );

    let a = Section::error("a".into(), None, "first".into());
    let b = Section::error("b".into(), None, "second".into());
    cache.put(&key, &a).unwrap();
    cache.put(&key, &b).unwrap();
    assert_eq!(cache.get(&key), Some(a));

    fs::write(dir.path().join(format!("{key}.json")), "not json").unwrap();
    assert_eq!(cache.get(&key), None);
}

use std::io::Write;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;
use ffpp_cli::cache::Cache;
use ffpp_cli::{run, Cli, Context};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            log::error!("{err:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<bool> {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()?;
    }
    let ctx = Context {
        field_cap: cli.field_cap,
        girth_cap: cli.girth_cap,
        cache: cli.cache.as_deref().map(Cache::open).transpose()?,
    };
    let report = run(&cli.command, &ctx)?;
    if let Some(path) = &cli.json {
        report.write_json(path)?;
    }
    if let Some(path) = &cli.csv {
        report.write_csv_file(path)?;
    }
    if cli.json.is_none() && cli.csv.is_none() {
        let mut out = std::io::stdout().lock();
        writeln!(out, "{}", report.to_json()?)?;
    }
    log::info!(
        "overall: {} ({} ms)",
        if report.overall { "pass" } else { "FAIL" },
        report.elapsed_ms
    );
    Ok(report.overall)
}

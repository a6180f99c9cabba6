use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use schursim::oracle::MAX_QUBITS;
use schursim::verify::{run_suite, Fault, VerifyConfig};

use super::merge_from_file;
use crate::error::{config, CliError, CliResult};
use crate::output::{open_output, read_config};

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct VerifyArgs {
    /// Qubit counts to check [default: 2,3,4,5,6].
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Deliberately break one component; currently `global-y-sign`.
    #[arg(long)]
    inject_fault: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Serialize)]
struct JsonCheck<'a> {
    name: &'a str,
    n: usize,
    residual: f64,
    tolerance: f64,
    passed: bool,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    passed: bool,
    checks: Vec<JsonCheck<'a>>,
}

pub fn run(mut args: VerifyArgs) -> CliResult<()> {
    let file: VerifyArgs = read_config(args.config.as_deref())?;
    merge_from_file!(args, file; n, seed, inject_fault, output);
    let mut cfg = VerifyConfig::default();
    if let Some(ns) = args.n {
        if let Some(&n) = ns.iter().find(|&&n| n > MAX_QUBITS) {
            return Err(CliError::Resource(format!(
                "n = {n}: the dense oracle is limited to n <= {MAX_QUBITS}"
            )));
        }
        if ns.contains(&0) {
            return Err(config("n must be positive"));
        }
        cfg.ns = ns;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(f) = &args.inject_fault {
        cfg.fault = Some(Fault::parse(f).ok_or_else(|| config(format!("unknown fault {f:?}")))?);
    }

    let report = run_suite(&cfg)?;
    let json = JsonReport {
        passed: report.passed(),
        checks: report
            .checks
            .iter()
            .map(|c| JsonCheck {
                name: &c.name,
                n: c.n,
                residual: c.residual,
                tolerance: c.tolerance,
                passed: c.passed,
            })
            .collect(),
    };
    let mut out = open_output(args.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &json).map_err(std::io::Error::from)?;
    writeln!(out)?;
    out.flush()?;

    if report.passed() {
        return Ok(());
    }
    let failed: Vec<String> = report
        .failures()
        .map(|c| {
            eprintln!(
                "FAIL {} (n={}): residual {:e} > tolerance {:e}",
                c.name, c.n, c.residual, c.tolerance
            );
            format!("{} (n={})", c.name, c.n)
        })
        .collect();
    Err(CliError::Verification(failed.join(", ")))
}

use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use serde::Deserialize;

use schursim::bench::{loglog_exponent, time_task, BenchTask};

use super::{merge_from_file, parse_kvec};
use crate::error::{config, CliResult};
use crate::output::{csv_float, open_output, read_config};

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct BenchArgs {
    /// Tasks among `aqc`, `algorithm1`, `heisenberg` [default: aqc].
    #[arg(long, value_delimiter = ',')]
    task: Option<Vec<String>>,
    /// Qubit counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Runs per size; the median is reported [default: 3].
    #[arg(long)]
    repetitions: Option<usize>,
    /// Weight vector for `algorithm1` [default: 1,1,1].
    #[arg(long)]
    kvec: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

pub fn run(mut args: BenchArgs) -> CliResult<()> {
    let file: BenchArgs = read_config(args.config.as_deref())?;
    merge_from_file!(args, file; task, n, repetitions, kvec, output);
    let ns = args.n.ok_or_else(|| config("--n is required"))?;
    let reps = args.repetitions.unwrap_or(3);
    if reps == 0 {
        return Err(config("--repetitions must be positive"));
    }
    let kvec = args.kvec.as_deref().map(parse_kvec).transpose()?;
    let tasks = args
        .task
        .unwrap_or_else(|| vec!["aqc".into()])
        .iter()
        .map(|t| {
            let task: BenchTask = t.parse()?;
            Ok(match (task, kvec) {
                (BenchTask::Algorithm1(_), Some(w)) => BenchTask::Algorithm1(w),
                _ => task,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut out = open_output(args.output.as_deref())?;
    writeln!(out, "task,n,repetitions,median_seconds,loglog_exponent")?;
    for task in tasks {
        let rows = time_task(task, &ns, reps)?;
        for r in &rows {
            writeln!(out, "{},{},{},{},", r.task, r.n, r.repetitions, csv_float(r.median_seconds))?;
        }
        let fit = loglog_exponent(&rows).map(csv_float).unwrap_or_default();
        writeln!(out, "{},fit,,,{fit}", task.name())?;
        out.flush()?;
    }
    Ok(())
}

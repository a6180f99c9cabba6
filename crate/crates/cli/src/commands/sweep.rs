use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rayon::prelude::*;
use serde::Deserialize;

use schursim::lmg::{aqc_run, measure, thermodynamic_references, LmgParams, LmgPoint, Schedule, ScheduleParams};

use super::merge_from_file;
use crate::error::{config, CliError, CliResult};
use crate::output::{csv_float, open_output, parse_grid, read_config};

/// Per-point size limit; a point above it is reported and skipped.
pub const MAX_QUBITS: usize = 4096;

const HEADER: &str =
    "n,J,gamma,hz,L,T,order_param,order_param_limit,concurrence,rescaled_concurrence,CR_limit,wall_seconds";

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SweepArgs {
    /// Qubit counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Anisotropies, comma separated [default: 0.5].
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    /// Coupling [default: 1].
    #[arg(long)]
    j: Option<f64>,
    /// Field grid as `start:stop:step` or a comma list [default: 0:2:0.1].
    #[arg(long)]
    hz: Option<String>,
    /// Steps per qubit [default: 4].
    #[arg(long)]
    steps_factor: Option<usize>,
    /// Annealing time per qubit [default: 10].
    #[arg(long)]
    time_factor: Option<f64>,
    /// Fill the wall_seconds column.
    #[arg(long)]
    #[serde(default)]
    timing: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

struct Point {
    n: usize,
    gamma: f64,
    hz: f64,
}

pub fn run(mut args: SweepArgs) -> CliResult<()> {
    let file: SweepArgs = read_config(args.config.as_deref())?;
    merge_from_file!(args, file; n, gamma, j, hz, steps_factor, time_factor, output);
    let timing = args.timing || file.timing;

    let ns = args.n.ok_or_else(|| config("--n is required"))?;
    if let Some(&n) = ns.iter().find(|&&n| n < 2) {
        return Err(config(format!("n = {n}: the LMG model needs at least 2 qubits")));
    }
    let gammas = args.gamma.unwrap_or_else(|| vec![0.5]);
    let j = args.j.unwrap_or(1.0);
    let hzs = parse_grid(args.hz.as_deref().unwrap_or("0:2:0.1"))?;
    let steps_factor = args.steps_factor.unwrap_or(4);
    let time_factor = args.time_factor.unwrap_or(10.0);
    if steps_factor == 0 || time_factor.is_nan() || time_factor <= 0.0 {
        return Err(config("--steps-factor and --time-factor must be positive"));
    }
    for &g in &gammas {
        LmgParams::new(j, g, 0.0)?;
        thermodynamic_references(g, 0.0)?;
    }

    let mut points = Vec::with_capacity(ns.len() * gammas.len() * hzs.len());
    for &n in &ns {
        for &gamma in &gammas {
            points.extend(hzs.iter().map(|&hz| Point { n, gamma, hz }));
        }
    }

    let results: Vec<CliResult<(LmgPoint, f64)>> = points
        .par_iter()
        .map(|p| {
            if p.n > MAX_QUBITS {
                return Err(CliError::Resource(format!(
                    "n = {} exceeds the sweep limit of {MAX_QUBITS}",
                    p.n
                )));
            }
            let sched = ScheduleParams::new(time_factor * p.n as f64, steps_factor * p.n, Schedule::Linear)?;
            let start = Instant::now();
            let state = aqc_run(LmgParams::new(j, p.gamma, p.hz)?, sched, p.n)?;
            let point = measure(&state)?;
            Ok((point, start.elapsed().as_secs_f64()))
        })
        .collect();

    let mut out = open_output(args.output.as_deref())?;
    writeln!(out, "{HEADER}")?;
    let mut first_error = None;
    for (p, res) in points.iter().zip(results) {
        match res {
            Ok((r, secs)) => {
                let (m_lim, cr_lim) = thermodynamic_references(p.gamma, p.hz)?;
                let wall = if timing { format!("{secs:.6}") } else { String::new() };
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    p.n,
                    j,
                    p.gamma,
                    p.hz,
                    steps_factor * p.n,
                    time_factor * p.n as f64,
                    csv_float(r.order_param),
                    csv_float(m_lim),
                    csv_float(r.concurrence),
                    csv_float(r.rescaled_concurrence),
                    csv_float(cr_lim),
                    wall
                )?;
            }
            Err(e) => {
                eprintln!("schursim: point n={} gamma={} hz={}: {e}", p.n, p.gamma, p.hz);
                first_error.get_or_insert(e);
            }
        }
    }
    out.flush()?;
    match first_error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

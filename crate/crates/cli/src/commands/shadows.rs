use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::Args;
use serde::Deserialize;

use schursim::evolution::{expectation, prepare_state, SchurState, StateKind};
use schursim::ops::{generator, symmetrized_pauli_operator};
use schursim::oracle::Oracle;
use schursim::shadows::{
    aggregate, channel_matrix, collect_snapshots, deep_variance_bound, estimate_all, snapshot_rng,
    symmetrized_variance_bound, Aggregation, Protocol, SnapshotRecord,
};
use schursim::verify::twirled_random_state;
use schursim::{BlockOperator, GeneratorKind, WeightVector};

use super::merge_from_file;
use crate::error::{config, CliResult};
use crate::output::{csv_float, open_output, read_config};

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ShadowsArgs {
    /// `deep` or `sym`.
    #[arg(long)]
    protocol: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// `zero`, `plus`, `dicke:W` or `random` (n <= 8) [default: plus].
    #[arg(long)]
    state: Option<String>,
    /// Number of snapshots [default: 10000].
    #[arg(long)]
    snapshots: Option<usize>,
    /// Observable names such as `sum-z` or `k-local-1-0-2` [default: all standard ones].
    #[arg(long, value_delimiter = ',')]
    observables: Option<Vec<String>>,
    /// Master seed; required.
    #[arg(long)]
    seed: Option<u64>,
    /// `mean` or `median-of-means:K` [default: mean].
    #[arg(long)]
    aggregate: Option<String>,
    /// Write the raw snapshots to this file.
    #[arg(long)]
    records_out: Option<PathBuf>,
    /// Estimate from a snapshot file instead of sampling.
    #[arg(long)]
    records_in: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

fn parse_state(spec: &str, n: usize, seed: u64) -> CliResult<SchurState> {
    let kind = match spec {
        "zero" => StateKind::AllZero,
        "plus" => StateKind::AllPlus,
        "random" => {
            // substream index far away from the snapshot streams
            let mut rng = snapshot_rng(seed, u64::MAX);
            return Ok(twirled_random_state(&mut rng, &Oracle::new(n)?)?.0);
        }
        other => {
            let w = other
                .strip_prefix("dicke:")
                .and_then(|w| w.parse().ok())
                .ok_or_else(|| config(format!("unknown state {other:?}")))?;
            StateKind::Dicke(w)
        }
    };
    Ok(prepare_state(kind, n)?)
}

fn parse_observable(name: &str, n: usize) -> CliResult<(String, BlockOperator)> {
    if let Some(kind) = GeneratorKind::parse(name) {
        if n < kind.min_qubits() {
            return Err(config(format!("{name} needs at least {} qubits", kind.min_qubits())));
        }
        return Ok((kind.name(), generator(kind, n)?));
    }
    let w: Vec<usize> = name
        .strip_prefix("k-local-")
        .map(|rest| rest.split('-').filter_map(|s| s.parse().ok()).collect())
        .unwrap_or_default();
    match w.as_slice() {
        &[x, y, z] => {
            let w = WeightVector::new(x, y, z);
            Ok((GeneratorKind::KLocal(w).name(), symmetrized_pauli_operator(n, w)?))
        }
        _ => Err(config(format!("unknown observable {name:?}"))),
    }
}

fn parse_aggregation(s: &str) -> CliResult<Aggregation> {
    if s == "mean" {
        return Ok(Aggregation::Mean);
    }
    s.strip_prefix("median-of-means:")
        .and_then(|k| k.parse().ok())
        .filter(|&k: &usize| k > 0)
        .map(Aggregation::MedianOfMeans)
        .ok_or_else(|| config(format!("unknown aggregation {s:?}")))
}

fn read_records(path: &PathBuf, protocol: Protocol) -> CliResult<Vec<SnapshotRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: SnapshotRecord = line.parse()?;
        let matches = matches!(
            (&rec, protocol),
            (SnapshotRecord::Symmetrized { .. }, Protocol::Symmetrized) | (SnapshotRecord::Deep { .. }, Protocol::Deep)
        );
        if !matches {
            return Err(config(format!(
                "{}: record {line:?} does not belong to protocol {}",
                path.display(),
                protocol.tag()
            )));
        }
        records.push(rec);
    }
    Ok(records)
}

pub fn run(mut args: ShadowsArgs) -> CliResult<()> {
    let file: ShadowsArgs = read_config(args.config.as_deref())?;
    merge_from_file!(
        args, file;
        protocol, n, state, snapshots, observables, seed, aggregate, records_out, records_in, output
    );
    let protocol: Protocol = args
        .protocol
        .as_deref()
        .ok_or_else(|| config("--protocol is required"))?
        .parse()?;
    let n = args.n.ok_or_else(|| config("--n is required"))?;
    let seed = args.seed.ok_or_else(|| config("--seed is required for reproducible sampling"))?;
    let state_spec = args.state.unwrap_or_else(|| "plus".into());
    let count = args.snapshots.unwrap_or(10_000);
    let strategy = parse_aggregation(args.aggregate.as_deref().unwrap_or("mean"))?;

    let state = parse_state(&state_spec, n, seed)?;
    let observables: Vec<(String, BlockOperator)> = match args.observables {
        Some(names) => names.iter().map(|s| parse_observable(s, n)).collect::<CliResult<_>>()?,
        None => GeneratorKind::STANDARD
            .iter()
            .filter(|k| k.min_qubits() <= n)
            .map(|k| Ok((k.name(), generator(*k, n)?)))
            .collect::<CliResult<_>>()?,
    };

    let records = match &args.records_in {
        Some(path) => read_records(path, protocol)?,
        None => collect_snapshots(protocol, &state, count, seed)?,
    };
    if let Some(path) = &args.records_out {
        let mut w = BufWriter::new(File::create(path)?);
        for r in &records {
            writeln!(w, "{r}")?;
        }
        w.flush()?;
    }

    let chan = match protocol {
        Protocol::Symmetrized => Some(channel_matrix(n)?),
        Protocol::Deep => None,
    };
    let ops: Vec<BlockOperator> = observables.iter().map(|(_, o)| o.clone()).collect();
    let estimates = estimate_all(&records, &ops, chan.as_ref())?;

    let mut out = open_output(args.output.as_deref())?;
    writeln!(
        out,
        "protocol,state,observable,truth,estimate,std_error,variance,variance_bound,n_snapshots"
    )?;
    for ((name, obs), est) in observables.iter().zip(&estimates) {
        let e = aggregate(est, strategy)?;
        let bound = match protocol {
            Protocol::Symmetrized => symmetrized_variance_bound(obs),
            Protocol::Deep => deep_variance_bound(obs)?,
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            protocol.tag(),
            state_spec,
            name,
            csv_float(expectation(&state, obs)?),
            csv_float(e.value),
            csv_float(e.std_error),
            csv_float(e.variance),
            csv_float(bound),
            e.count
        )?;
    }
    out.flush()?;
    Ok(())
}

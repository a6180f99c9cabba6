use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use serde::Deserialize;

use schursim::block::{BlockMatrix, GeneratorKind};
use schursim::ops::{closed_form_block, PauliColumns};
use schursim::{enumerate_irreps, IrrepLabel};

use super::{merge_from_file, parse_kvec};
use crate::error::{config, CliError, CliResult};
use crate::output::{json_float, open_output, read_config};

/// Output grows as `n^3`; larger dumps are refused.
pub const MAX_QUBITS: usize = 1024;

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct BlocksArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Generator name such as `sum-z`, `global-y` or `two-local-xz`.
    #[arg(long)]
    kind: Option<String>,
    /// Weight vector `x,y,z` of a symmetrized Pauli string.
    #[arg(long)]
    kvec: Option<String>,
    /// Only emit the irrep with this `m`.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

enum Source {
    Kind(GeneratorKind),
    Kvec(PauliColumns, schursim::WeightVector),
}

pub fn run(mut args: BlocksArgs) -> CliResult<()> {
    let file: BlocksArgs = read_config(args.config.as_deref())?;
    merge_from_file!(args, file; n, kind, kvec, m, output);
    let n = args.n.ok_or_else(|| config("--n is required"))?;
    if n > MAX_QUBITS {
        return Err(CliError::Resource(format!("block dumps are limited to n <= {MAX_QUBITS}")));
    }
    let irreps = enumerate_irreps(n)?;
    let (source, label) = match (&args.kind, &args.kvec) {
        (Some(k), None) => {
            let kind = GeneratorKind::parse(k).ok_or_else(|| config(format!("unknown generator {k:?}")))?;
            (Source::Kind(kind), format!("\"kind\":\"{}\"", kind.name()))
        }
        (None, Some(v)) => {
            let w = parse_kvec(v)?;
            if w.k() > n {
                return Err(schursim::Error::LocalityTooLarge { k: w.k(), n }.into());
            }
            (
                Source::Kvec(PauliColumns::new(n)?, w),
                format!("\"kvec\":[{},{},{}]", w.x, w.y, w.z),
            )
        }
        _ => return Err(config("exactly one of --kind and --kvec is required")),
    };
    let selected: Vec<&IrrepLabel> = match args.m {
        Some(m) => vec![irreps
            .get(m)
            .ok_or_else(|| config(format!("m = {m} out of range for n = {n}")))?],
        None => irreps.iter().collect(),
    };
    let mut out = open_output(args.output.as_deref())?;
    write!(out, "{{\"n\":{n},{label},\"blocks\":[")?;
    for (i, ir) in selected.iter().enumerate() {
        let block = match &source {
            Source::Kind(kind) => closed_form_block(*kind, n, ir)?,
            Source::Kvec(cols, w) => cols.block(*w, ir)?,
        };
        if i > 0 {
            out.write_all(b",")?;
        }
        write_block(&mut out, &block)?;
    }
    out.write_all(b"]}\n")?;
    out.flush()?;
    Ok(())
}

fn write_block(out: &mut dyn Write, block: &BlockMatrix) -> std::io::Result<()> {
    let d = block.dim();
    write!(out, "{{\"m\":{},\"d\":{d}", block.irrep().m)?;
    for (key, part) in [("real", 0), ("imag", 1)] {
        write!(out, ",\"{key}\":[")?;
        for i in 0..d {
            if i > 0 {
                out.write_all(b",")?;
            }
            out.write_all(b"[")?;
            for j in 0..d {
                if j > 0 {
                    out.write_all(b",")?;
                }
                let z = block.get(i, j);
                let x = if part == 0 { z.re } else { z.im };
                out.write_all(json_float(x).as_bytes())?;
            }
            out.write_all(b"]")?;
        }
        out.write_all(b"]")?;
    }
    out.write_all(b"}")
}

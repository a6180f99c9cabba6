//! Wall-clock timing of the main pipelines and log-log scaling fits.

use std::str::FromStr;
use std::time::Instant;

use crate::block::GeneratorKind;
use crate::error::{Error, Result};
use crate::evolution::{heisenberg_evolve, CircuitLayer, EigenCache};
use crate::lmg::{aqc_run, measure, LmgParams, ScheduleParams};
use crate::ops::{generator, symmetrized_pauli_operator};
use crate::schur::WeightVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchTask {
    /// Full AQC run plus concurrence in the symmetric sector.
    Aqc,
    /// Algorithm 1 assembly of one symmetrized Pauli on every irrep.
    Algorithm1(WeightVector),
    /// One Heisenberg layer over every irrep.
    Heisenberg,
}

impl BenchTask {
    pub fn name(&self) -> &'static str {
        match self {
            BenchTask::Aqc => "aqc",
            BenchTask::Algorithm1(_) => "algorithm1",
            BenchTask::Heisenberg => "heisenberg",
        }
    }

    /// Runs the task once at `n`.
    pub fn run(&self, n: usize) -> Result<()> {
        match self {
            BenchTask::Aqc => {
                let state = aqc_run(LmgParams::new(1.0, 0.5, 0.5)?, ScheduleParams::default_for(n), n)?;
                measure(&state)?;
            }
            BenchTask::Algorithm1(w) => {
                symmetrized_pauli_operator(n, *w)?;
            }
            BenchTask::Heisenberg => {
                let h = generator(GeneratorKind::SumX, n)?;
                let obs = generator(GeneratorKind::SumZZ, n)?;
                heisenberg_evolve(&[CircuitLayer::new(h, 0.7)], &obs, &mut EigenCache::new())?;
            }
        }
        Ok(())
    }
}

impl FromStr for BenchTask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aqc" => Ok(BenchTask::Aqc),
            "algorithm1" => Ok(BenchTask::Algorithm1(WeightVector::new(1, 1, 1))),
            "heisenberg" => Ok(BenchTask::Heisenberg),
            _ => Err(Error::InvalidParameter(format!("unknown bench task {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub task: &'static str,
    pub n: usize,
    pub repetitions: usize,
    pub median_seconds: f64,
}

pub fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k == 0 {
        return f64::NAN;
    }
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        0.5 * (xs[k / 2 - 1] + xs[k / 2])
    }
}

/// Median wall time of `repetitions` runs at each `n`.
pub fn time_task(task: BenchTask, ns: &[usize], repetitions: usize) -> Result<Vec<BenchRow>> {
    let reps = repetitions.max(1);
    ns.iter()
        .map(|&n| {
            let mut times = Vec::with_capacity(reps);
            for _ in 0..reps {
                let t = Instant::now();
                task.run(n)?;
                times.push(t.elapsed().as_secs_f64());
            }
            Ok(BenchRow {
                task: task.name(),
                n,
                repetitions: reps,
                median_seconds: median(&mut times),
            })
        })
        .collect()
}

/// Least-squares slope of `ln t` against `ln n`.
pub fn loglog_exponent(rows: &[BenchRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.median_seconds > 0.0)
        .map(|r| ((r.n as f64).ln(), r.median_seconds.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_of_power_law() {
        let rows: Vec<BenchRow> = [8usize, 16, 32]
            .iter()
            .map(|&n| BenchRow {
                task: "x",
                n,
                repetitions: 1,
                median_seconds: 1e-6 * (n as f64).powi(3),
            })
            .collect();
        assert!((loglog_exponent(&rows).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(loglog_exponent(&rows[..1]), None);
    }

    #[test]
    fn median_of_even_count() {
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn tasks_parse_and_run() {
        for name in ["aqc", "algorithm1", "heisenberg"] {
            let t: BenchTask = name.parse().unwrap();
            assert_eq!(t.name(), name);
            t.run(6).unwrap();
        }
        assert!("nope".parse::<BenchTask>().is_err());
    }
}

//! Structural invariant suite cross-checking the block representation
//! against the dense oracle.

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::block::{BlockOperator, GeneratorKind};
use crate::error::Result;
use crate::evolution::{
    eigendecompose, expectation, heisenberg_evolve, prepare_state, unitary_block, CircuitLayer, EigenCache,
    SchurState, StateKind,
};
use crate::linalg::eigh_dense;
use crate::lmg::{aqc_run, order_parameter, two_qubit_rdm, LmgParams, ScheduleParams};
use crate::oracle::{DenseCircuit, DenseOperator, Oracle};
use crate::ops::generator;
use crate::schur::{commutant_dim, enumerate_irreps, enumerate_weight_vectors};
use crate::shadows::channel_matrix;
use crate::{compose, C64};

/// Largest `n` for which the permutation twirl is checked explicitly.
const TWIRL_MAX_QUBITS: usize = 5;

/// A random combination of the standard generators, in block and dense form.
pub fn random_hamiltonian(rng: &mut impl Rng, o: &Oracle) -> Result<(BlockOperator, DenseOperator)> {
    let n = o.n();
    let mut terms = Vec::new();
    for kind in GeneratorKind::STANDARD {
        if n >= kind.min_qubits() && rng.random_bool(0.5) {
            terms.push((rng.random_range(-1.0..1.0), kind));
        }
    }
    if terms.is_empty() {
        terms.push((1.0, GeneratorKind::SumX));
    }
    let ops = terms
        .iter()
        .map(|&(c, k)| Ok((c, generator(k, n)?)))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<(f64, &BlockOperator)> = ops.iter().map(|(c, b)| (*c, b)).collect();
    let block = compose(&refs)?;
    let mut dense = DMatrix::zeros(o.dim(), o.dim());
    for &(c, k) in &terms {
        dense += o.generator(k)? * C64::new(c, 0.0);
    }
    Ok((block, dense))
}

/// Between 1 and `max_layers` layers with times in `[-2, 2]`.
pub fn random_circuit(
    rng: &mut impl Rng,
    o: &Oracle,
    max_layers: usize,
) -> Result<(Vec<CircuitLayer>, DenseCircuit)> {
    let layers = rng.random_range(1..=max_layers.max(1));
    let mut blocks = Vec::with_capacity(layers);
    let mut dense = Vec::with_capacity(layers);
    for _ in 0..layers {
        let (b, d) = random_hamiltonian(rng, o)?;
        let t = rng.random_range(-2.0..2.0);
        blocks.push(CircuitLayer::new(b, t));
        dense.push((d, t));
    }
    Ok((blocks, dense))
}

/// Random density matrix twirled onto the commutant, as block state and
/// dense matrix.
pub fn twirled_random_state(rng: &mut impl Rng, o: &Oracle) -> Result<(SchurState, DenseOperator)> {
    let dim = o.dim();
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let rho = &g * g.adjoint();
    let rho = &rho / rho.trace();
    let rho = o.twirl(&rho)?;
    let blocks = enumerate_irreps(o.n())?
        .iter()
        .map(|ir| {
            let p = o.project_block(&rho, ir.m)?;
            let p = (&p + p.adjoint()) * C64::new(0.5 * ir.mult_f64(), 0.0);
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    let state = SchurState::BlockMixed { n: o.n(), blocks };
    state.validate()?;
    Ok((state, rho))
}

/// Deliberate defects for checking that the suite detects them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    GlobalYSign,
}

impl Fault {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "global-y-sign" => Some(Fault::GlobalYSign),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub ns: Vec<usize>,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            ns: (2..=6).collect(),
            seed: 0,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub n: usize,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, n: usize, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            n,
            residual,
            tolerance,
            // NaN residuals fail
            passed: residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn max_dev(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).camax()
}

fn generator_with_fault(kind: GeneratorKind, n: usize, fault: Option<Fault>) -> Result<BlockOperator> {
    let op = generator(kind, n)?;
    Ok(match (fault, kind) {
        (Some(Fault::GlobalYSign), GeneratorKind::GlobalY) => op.scaled(C64::new(-1.0, 0.0)),
        _ => op,
    })
}

/// Runs every check for every `n` in the configuration.
pub fn run_suite(config: &VerifyConfig) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    let checks = &mut report.checks;

    let mut worst = 0.0f64;
    for n in 1..=64usize {
        let total = enumerate_irreps(n)?
            .iter()
            .fold(BigUint::zero(), |acc, l| acc + &l.mult * l.d);
        if total != BigUint::one() << n {
            worst = 1.0;
        }
    }
    checks.push(Check::new("dimension-sum", 64, worst, 0.0));

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for &n in &config.ns {
        let o = Oracle::new(n)?;
        suite_for_n(&o, config.fault, &mut rng, checks)?;
    }
    Ok(report)
}

fn suite_for_n(o: &Oracle, fault: Option<Fault>, rng: &mut ChaCha8Rng, checks: &mut Vec<Check>) -> Result<()> {
    let n = o.n();
    let irreps = enumerate_irreps(n)?;

    let counted = enumerate_weight_vectors(n, n)?.len();
    let chan = channel_matrix(n)?;
    let expected = commutant_dim(n)?;
    let dim_res = counted.abs_diff(expected).max(chan.dim().abs_diff(expected)) as f64;
    checks.push(Check::new("commutant-dim", n, dim_res, 0.0));

    // all canonical vectors together form an orthonormal set
    let mut cols = Vec::new();
    for ir in &irreps {
        for q in 0..ir.d {
            cols.push(o.canonical_schur_vector(ir.m, q)?);
        }
    }
    let v = DMatrix::from_columns(&cols);
    let gram = v.adjoint() * &v;
    let id = DMatrix::<C64>::identity(cols.len(), cols.len());
    checks.push(Check::new("schur-orthonormality", n, max_dev(&gram, &id), 1e-12));

    for kind in GeneratorKind::STANDARD {
        if n < kind.min_qubits() {
            continue;
        }
        let blocks = generator_with_fault(kind, n, fault)?;
        let dense = o.generator(kind)?;
        let mut res = 0.0f64;
        for ir in &irreps {
            res = res.max(blocks.block(ir.m).max_abs_diff_dense(&o.project_block(&dense, ir.m)?));
        }
        checks.push(Check::new(format!("oracle-blocks-{}", kind.name()), n, res, 1e-10));
    }

    if n <= TWIRL_MAX_QUBITS {
        let a = DMatrix::from_fn(o.dim(), o.dim(), |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let t = o.twirl(&a)?;
        let tt = o.twirl(&t)?;
        checks.push(Check::new("twirl-idempotence", n, max_dev(&tt, &t), 1e-12));
    }

    let (h, _) = random_hamiltonian(rng, o)?;
    let mut unit_res = 0.0f64;
    for b in h.blocks() {
        let f = eigendecompose(b)?;
        let u = unitary_block(&f, rng.random_range(-10.0..10.0)).into_dense();
        let d = u.nrows();
        unit_res = unit_res.max(max_dev(&(u.adjoint() * &u), &DMatrix::identity(d, d)));
    }
    checks.push(Check::new("unitarity", n, unit_res, 1e-11));

    let (circuit, dense_circuit) = random_circuit(rng, o, 5)?;
    let (obs, obs_dense) = random_hamiltonian(rng, o)?;
    let evolved = heisenberg_evolve(&circuit, &obs, &mut EigenCache::new())?;
    let mut trace_res = 0.0f64;
    let mut spec_res = 0.0f64;
    for (a, b) in obs.blocks().iter().zip(evolved.blocks()) {
        trace_res = trace_res.max((a.trace() - b.trace()).norm());
        let ea = eigh_dense(&a.to_dense())?.values;
        let eb = eigh_dense(&b.to_dense())?.values;
        for (x, y) in ea.iter().zip(&eb) {
            spec_res = spec_res.max((x - y).abs());
        }
    }
    checks.push(Check::new("trace-preservation", n, trace_res, 1e-10));
    checks.push(Check::new("spectrum-preservation", n, spec_res, 1e-9));

    let (mixed, rho) = twirled_random_state(rng, o)?;
    let plus = o.all_plus();
    let mut dyn_res = 0.0f64;
    for (state, rho) in [
        (prepare_state(StateKind::AllPlus, n)?, &plus * plus.adjoint()),
        (mixed, rho),
    ] {
        let got = expectation(&state, &evolved)?;
        let want = o.dense_expectation(&dense_circuit, &rho, &obs_dense)?;
        dyn_res = dyn_res.max((got - want).abs());
    }
    checks.push(Check::new("dynamics-oracle", n, dyn_res, 1e-8));

    let mut parity_res = 0.0f64;
    for i in 0..chan.dim() {
        for j in 0..chan.dim() {
            let (a, b) = (chan.basis()[i], chan.basis()[j]);
            let cij = chan.entry(i, j);
            if a.parity_class() != b.parity_class() {
                parity_res = parity_res.max(cij.abs());
            }
            parity_res = parity_res.max((cij - chan.entry(j, i)).abs());
        }
    }
    checks.push(Check::new("channel-parity-blocks", n, parity_res, 0.0));

    if n >= 2 {
        checks.push(Check::new("lmg-point", n, lmg_point_residual(o)?, 1e-8));
    }
    Ok(())
}

/// Compares one short AQC run with the dense statevector running the same steps.
fn lmg_point_residual(o: &Oracle) -> Result<f64> {
    let n = o.n();
    let params = LmgParams::new(1.0, 0.5, 0.7)?;
    let sched = ScheduleParams::default_for(n);
    let state = aqc_run(params, sched, n)?;

    let nf = n as f64;
    let c = |x: f64| C64::new(x, 0.0);
    let h1 = o.generator(GeneratorKind::SumXX)? * c(-(nf - 1.0) / 2.0)
        + o.generator(GeneratorKind::SumYY)? * c(-params.gamma * (nf - 1.0) / 2.0)
        + o.generator(GeneratorKind::SumZ)? * c(params.hz * nf);
    let h0 = o.generator(GeneratorKind::SumX)? * c(-nf);
    let mut psi = o.all_plus();
    for j in 1..=sched.steps {
        let s = sched.s_at(j);
        let h = &h0 * c(1.0 - s) + &h1 * c(s);
        psi = o.expm(&h, sched.dt())? * psi;
    }
    let rho = &psi * psi.adjoint();
    let zsum = o.generator(GeneratorKind::SumZ)? * c(nf);
    let m_dense = 1.0 - (&rho * &zsum * &zsum).trace().re / (nf * nf);
    let pt = o.partial_trace_two(&rho)?;
    let rdm = two_qubit_rdm(&state)?;
    let rdm_res = rdm
        .matrix()
        .iter()
        .zip(pt.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok((order_parameter(&state)? - m_dense).abs().max(rdm_res))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let cfg = VerifyConfig {
            ns: vec![2, 3],
            ..VerifyConfig::default()
        };
        let report = run_suite(&cfg).unwrap();
        let failed: Vec<_> = report.failures().collect();
        assert!(failed.is_empty(), "{failed:?}");
    }

    #[test]
    fn injected_fault_is_caught() {
        let cfg = VerifyConfig {
            ns: vec![3],
            seed: 0,
            fault: Some(Fault::GlobalYSign),
        };
        let report = run_suite(&cfg).unwrap();
        let failed: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
        assert_eq!(failed, vec!["oracle-blocks-global-y"]);
    }
}

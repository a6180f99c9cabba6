//! Circuit evolution on irrep blocks: eigendecomposition of layer
//! generators, Heisenberg conjugation of observables, Schrödinger
//! propagation in the symmetric sector and expectation values.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use rayon::prelude::*;

use crate::block::{BlockMatrix, BlockOperator, Provenance, Structure};
use crate::error::{Error, Result};
use crate::linalg::{eigh_block, zgemm, ImplicitEigh, BANDED_PATH_MAX};
use crate::schur::{enumerate_irreps, IrrepLabel, LogFactorials};
use crate::C64;

/// `Q diag(lambda) Q^dagger` of one Hermitian block, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenFactorization {
    pub irrep: IrrepLabel,
    pub q: DMatrix<C64>,
    pub lambda: Vec<f64>,
}

pub fn eigendecompose(block: &BlockMatrix) -> Result<EigenFactorization> {
    let e = eigh_block(block)?;
    Ok(EigenFactorization {
        irrep: block.irrep().clone(),
        q: e.vectors,
        lambda: e.values,
    })
}

/// `exp(-i t A)` from a factorization of `A`.
pub fn unitary_block(fact: &EigenFactorization, t: f64) -> BlockMatrix {
    let mut qe = fact.q.clone();
    for (j, &l) in fact.lambda.iter().enumerate() {
        let ph = C64::from_polar(1.0, -l * t);
        qe.column_mut(j).iter_mut().for_each(|x| *x *= ph);
    }
    let u = zgemm(&qe, &fact.q.adjoint());
    BlockMatrix::from_dense(fact.irrep.clone(), u, Structure::Dense).expect("factorization shape")
}

/// One layer `exp(-i time H)`. Layers sharing a `key` share cached
/// factorizations and must carry the same Hamiltonian.
#[derive(Debug, Clone)]
pub struct CircuitLayer {
    pub hamiltonian: BlockOperator,
    pub time: f64,
    pub key: Option<String>,
}

impl CircuitLayer {
    pub fn new(hamiltonian: BlockOperator, time: f64) -> Self {
        Self {
            hamiltonian,
            time,
            key: None,
        }
    }

    pub fn keyed(hamiltonian: BlockOperator, time: f64, key: impl Into<String>) -> Self {
        Self {
            hamiltonian,
            time,
            key: Some(key.into()),
        }
    }
}

/// Factorizations keyed by `(generator key, m)`.
pub type EigenCache = HashMap<(String, usize), EigenFactorization>;

fn check_circuit(circuit: &[CircuitLayer], n: usize) -> Result<()> {
    for layer in circuit {
        if layer.hamiltonian.n() != n {
            return Err(Error::QubitMismatch(layer.hamiltonian.n(), n));
        }
        let dev = layer.hamiltonian.hermitian_deviation();
        if dev > 1e-10 {
            return Err(Error::NotHermitian(dev));
        }
    }
    Ok(())
}

/// `U^dagger O U` with `U = U_L ... U_1`, processed irrep by irrep.
pub fn heisenberg_evolve(
    circuit: &[CircuitLayer],
    obs: &BlockOperator,
    cache: &mut EigenCache,
) -> Result<BlockOperator> {
    let n = obs.n();
    check_circuit(circuit, n)?;
    let irreps = enumerate_irreps(n)?;

    // fill the cache first so workers only read it
    for layer in circuit {
        let Some(key) = &layer.key else { continue };
        let missing: Vec<usize> = (0..irreps.len())
            .filter(|&m| !cache.contains_key(&(key.clone(), m)))
            .collect();
        let facts = missing
            .par_iter()
            .map(|&m| eigendecompose(layer.hamiltonian.block(m)).map(|f| (m, f)))
            .collect::<Result<Vec<_>>>()?;
        for (m, f) in facts {
            cache.insert((key.clone(), m), f);
        }
    }
    let cache: &EigenCache = cache;

    let blocks = (0..irreps.len())
        .into_par_iter()
        .map(|m| {
            let mut o = obs.block(m).to_dense();
            for layer in circuit.iter().rev() {
                let owned;
                let fact = match &layer.key {
                    Some(key) => &cache[&(key.clone(), m)],
                    None => {
                        owned = eigendecompose(layer.hamiltonian.block(m))?;
                        &owned
                    }
                };
                o = conjugate(&o, fact, layer.time);
            }
            BlockMatrix::from_dense(irreps[m].clone(), o, Structure::Dense)
        })
        .collect::<Result<Vec<_>>>()?;
    BlockOperator::new(n, blocks, Provenance::Composite)
}

/// `U^dagger O U` for `U = Q exp(-i t Lambda) Q^dagger`.
fn conjugate(o: &DMatrix<C64>, fact: &EigenFactorization, t: f64) -> DMatrix<C64> {
    let qh = fact.q.adjoint();
    let mut x = zgemm(&zgemm(&qh, o), &fact.q);
    let phases: Vec<C64> = fact
        .lambda
        .iter()
        .map(|&l| C64::from_polar(1.0, l * t))
        .collect();
    let d = phases.len();
    for j in 0..d {
        let pj = phases[j].conj();
        for i in 0..d {
            x[(i, j)] *= phases[i] * pj;
        }
    }
    zgemm(&zgemm(&fact.q, &x), &qh)
}

/// Multiplicity-summed state data.
#[derive(Debug, Clone)]
pub enum SchurState {
    /// Amplitudes on the symmetric irrep `m = 0`, indexed by Hamming weight.
    PureSymmetric { n: usize, psi: Vec<C64> },
    /// `tau_lambda = sum_p rho_lambda^p` for every irrep, indexed by `m`.
    BlockMixed { n: usize, blocks: Vec<DMatrix<C64>> },
}

#[derive(Debug, Clone)]
pub enum StateKind {
    AllZero,
    AllPlus,
    Dicke(usize),
    FromBlocks(Vec<DMatrix<C64>>),
}

pub fn prepare_state(kind: StateKind, n: usize) -> Result<SchurState> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n));
    }
    let basis = |w: usize| {
        let mut psi = vec![C64::zero(); n + 1];
        psi[w] = C64::new(1.0, 0.0);
        psi
    };
    let state = match kind {
        StateKind::AllZero => SchurState::PureSymmetric { n, psi: basis(0) },
        StateKind::Dicke(w) => {
            if w > n {
                return Err(Error::InvalidState(format!("Dicke weight {w} exceeds n={n}")));
            }
            SchurState::PureSymmetric { n, psi: basis(w) }
        }
        StateKind::AllPlus => {
            let lf = LogFactorials::new(n);
            let half_ln2n = 0.5 * n as f64 * std::f64::consts::LN_2;
            let psi = (0..=n)
                .map(|q| C64::new((0.5 * lf.ln_binomial(n, q) - half_ln2n).exp(), 0.0))
                .collect();
            SchurState::PureSymmetric { n, psi }
        }
        StateKind::FromBlocks(blocks) => SchurState::BlockMixed { n, blocks },
    };
    state.validate()?;
    Ok(state)
}

impl SchurState {
    pub fn n(&self) -> usize {
        match self {
            SchurState::PureSymmetric { n, .. } | SchurState::BlockMixed { n, .. } => *n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SchurState::PureSymmetric { n, psi } => {
                if psi.len() != n + 1 {
                    return Err(Error::InvalidState(format!(
                        "symmetric vector has length {}, expected {}",
                        psi.len(),
                        n + 1
                    )));
                }
                let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
                if (norm - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidState(format!("norm {norm}")));
                }
            }
            SchurState::BlockMixed { n, blocks } => {
                if blocks.len() != n / 2 + 1 {
                    return Err(Error::InvalidState("wrong number of blocks".into()));
                }
                let mut total = 0.0;
                for (m, b) in blocks.iter().enumerate() {
                    let d = n - 2 * m + 1;
                    if b.nrows() != d || b.ncols() != d {
                        return Err(Error::BlockShape {
                            m,
                            got: b.nrows(),
                            expected: d,
                        });
                    }
                    let dev = (b - b.adjoint()).camax();
                    if dev > 1e-10 {
                        return Err(Error::InvalidState(format!("block {m} not Hermitian ({dev:e})")));
                    }
                    if d > 0 && b.iter().any(|z| z.norm() > 0.0) {
                        let lam = crate::linalg::eigh_dense(b)?.values[0];
                        if lam < -1e-10 {
                            return Err(Error::InvalidState(format!(
                                "block {m} has eigenvalue {lam:e}"
                            )));
                        }
                    }
                    total += b.trace().re;
                }
                if (total - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidState(format!("trace {total}")));
                }
            }
        }
        Ok(())
    }

    /// Block form of the state; a symmetric vector becomes `tau_0 = psi psi^dagger`.
    pub fn to_blocks(&self) -> Vec<DMatrix<C64>> {
        match self {
            SchurState::BlockMixed { blocks, .. } => blocks.clone(),
            SchurState::PureSymmetric { n, psi } => (0..=n / 2)
                .map(|m| {
                    if m == 0 {
                        let v = DVector::from_column_slice(psi);
                        &v * v.adjoint()
                    } else {
                        let d = n - 2 * m + 1;
                        DMatrix::zeros(d, d)
                    }
                })
                .collect(),
        }
    }

    /// Probability of each irrep, `tr tau_lambda`.
    pub fn irrep_weights(&self) -> Vec<f64> {
        match self {
            SchurState::PureSymmetric { n, .. } => {
                let mut w = vec![0.0; n / 2 + 1];
                w[0] = 1.0;
                w
            }
            SchurState::BlockMixed { blocks, .. } => blocks.iter().map(|b| b.trace().re).collect(),
        }
    }
}

/// Applies every layer to a symmetric-sector vector.
pub fn schrodinger_evolve_symmetric(circuit: &[CircuitLayer], state: &SchurState) -> Result<SchurState> {
    let SchurState::PureSymmetric { n, psi } = state else {
        return Err(Error::InvalidState(
            "symmetric propagation needs a pure symmetric state".into(),
        ));
    };
    let n = *n;
    check_circuit(circuit, n)?;
    let mut psi = psi.clone();
    for layer in circuit {
        propagate_symmetric(layer.hamiltonian.block(0), layer.time, &mut psi)?;
    }
    Ok(SchurState::PureSymmetric { n, psi })
}

/// `psi <- exp(-i t H) psi` for one block, without forming eigenvectors
/// when the block is narrow-banded.
pub fn propagate_symmetric(h: &BlockMatrix, t: f64, psi: &mut [C64]) -> Result<()> {
    match h.band() {
        Some(b) if b <= BANDED_PATH_MAX => {
            ImplicitEigh::new(h)?.apply_exp(t, psi);
        }
        _ => {
            let u = unitary_block(&eigendecompose(h)?, t);
            let out = u.matvec(psi);
            psi.copy_from_slice(&out);
        }
    }
    Ok(())
}

/// Tolerance on the imaginary part of an expectation value.
pub const IMAG_TOL: f64 = 1e-10;

/// `sum_lambda tr(tau_lambda O_lambda)`.
pub fn expectation(state: &SchurState, obs: &BlockOperator) -> Result<f64> {
    let z = expectation_complex(state, obs)?;
    if z.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}

pub fn expectation_complex(state: &SchurState, obs: &BlockOperator) -> Result<C64> {
    if state.n() != obs.n() {
        return Err(Error::QubitMismatch(state.n(), obs.n()));
    }
    Ok(match state {
        SchurState::PureSymmetric { psi, .. } => {
            let opsi = obs.block(0).matvec(psi);
            psi.iter().zip(&opsi).map(|(a, b)| a.conj() * b).sum()
        }
        SchurState::BlockMixed { blocks, .. } => {
            let mut acc = C64::zero();
            for (tau, o) in blocks.iter().zip(obs.blocks()) {
                o.for_each_entry(|i, j, v| {
                    if v != C64::zero() {
                        acc += tau[(j, i)] * v;
                    }
                });
            }
            acc
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::GeneratorKind;
    use crate::ops::generator;

    #[test]
    fn all_plus_n2() {
        let s = prepare_state(StateKind::AllPlus, 2).unwrap();
        let SchurState::PureSymmetric { psi, .. } = s else { panic!() };
        let want = [0.5, 0.5f64.sqrt(), 0.5];
        for (a, b) in psi.iter().zip(want) {
            assert!((a.re - b).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_state_sum_z() {
        let s = prepare_state(StateKind::AllZero, 5).unwrap();
        let z = generator(GeneratorKind::SumZ, 5).unwrap();
        assert!((expectation(&s, &z).unwrap() - 1.0).abs() < 1e-15);
        let id = BlockOperator::identity(5).unwrap();
        assert!((expectation(&s, &id).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_states_rejected() {
        assert!(prepare_state(StateKind::Dicke(5), 4).is_err());
        let bad = vec![DMatrix::<C64>::identity(3, 3), DMatrix::zeros(1, 1)];
        assert!(prepare_state(StateKind::FromBlocks(bad), 2).is_err());
    }

    #[test]
    fn zero_time_is_identity() {
        let h = generator(GeneratorKind::SumX, 6).unwrap();
        let f = eigendecompose(h.block(0)).unwrap();
        let u = unitary_block(&f, 0.0).into_dense();
        assert!((u - DMatrix::<C64>::identity(7, 7)).camax() < 1e-13);
    }

    #[test]
    fn empty_circuit_keeps_observable() {
        let o = generator(GeneratorKind::GlobalZ, 4).unwrap();
        let out = heisenberg_evolve(&[], &o, &mut EigenCache::new()).unwrap();
        assert!(out.max_abs_diff(&o) < 1e-15);
    }

    #[test]
    fn plus_state_is_eigenstate_of_sum_x() {
        let n = 7;
        let h = generator(GeneratorKind::SumX, n).unwrap();
        let s = prepare_state(StateKind::AllPlus, n).unwrap();
        let out = schrodinger_evolve_symmetric(&[CircuitLayer::new(h, 1.3)], &s).unwrap();
        let z = generator(GeneratorKind::SumZZ, n).unwrap();
        let before = expectation(&s, &z).unwrap();
        let after = expectation(&out, &z).unwrap();
        assert!((before - after).abs() < 1e-12);
    }
}

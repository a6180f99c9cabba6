mod common;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schursim::block::GeneratorKind;
use schursim::evolution::{
    eigendecompose, expectation, heisenberg_evolve, prepare_state, schrodinger_evolve_symmetric,
    unitary_block, CircuitLayer, EigenCache, SchurState, StateKind,
};
use schursim::linalg::eigh_dense;
use schursim::oracle::Oracle;
use schursim::ops::generator;
use schursim::{enumerate_irreps, C64};

#[test]
fn random_circuits_match_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [4usize, 6] {
        let o = Oracle::new(n).unwrap();
        let zero = o.basis_state(0);
        let plus = o.all_plus();
        for _ in 0..6 {
            let (circuit, dense) = common::random_circuit(&mut rng, &o, 5);
            let (obs, obs_dense) = common::random_hamiltonian(&mut rng, &o);
            let evolved = heisenberg_evolve(&circuit, &obs, &mut EigenCache::new()).unwrap();
            let (mixed, rho_mixed) = common::twirled_random_state(&mut rng, &o);
            let cases = [
                (prepare_state(StateKind::AllZero, n).unwrap(), &zero * zero.adjoint()),
                (prepare_state(StateKind::AllPlus, n).unwrap(), &plus * plus.adjoint()),
                (mixed, rho_mixed),
            ];
            for (state, rho) in cases {
                let got = expectation(&state, &evolved).unwrap();
                let want = o.dense_expectation(&dense, &rho, &obs_dense).unwrap();
                assert!((got - want).abs() < 1e-8, "n={n}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn unitary_block_matches_dense_exponential() {
    let n = 6;
    let o = Oracle::new(n).unwrap();
    let u = o.expm(&o.generator(GeneratorKind::SumX).unwrap(), 0.37).unwrap();
    let h = generator(GeneratorKind::SumX, n).unwrap();
    for ir in enumerate_irreps(n).unwrap() {
        let f = eigendecompose(h.block(ir.m)).unwrap();
        let ub = unitary_block(&f, 0.37);
        assert!(ub.max_abs_diff_dense(&o.project_block(&u, ir.m).unwrap()) < 1e-9);
    }
}

#[test]
fn unitarity_and_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [5usize, 8, 13] {
        for kind in GeneratorKind::STANDARD {
            let h = generator(kind, n).unwrap();
            for b in h.blocks() {
                let f = eigendecompose(b).unwrap();
                let t = rng.random_range(-10.0..10.0);
                let u = unitary_block(&f, t).into_dense();
                let d = u.nrows();
                assert!((u.adjoint() * &u - DMatrix::<C64>::identity(d, d)).camax() < 1e-11);
                let back = unitary_block(&f, -t).into_dense();
                assert!((back * &u - DMatrix::<C64>::identity(d, d)).camax() < 1e-11);
            }
        }
    }
}

#[test]
fn trace_and_spectrum_preserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [7usize, 10] {
        let circuit: Vec<CircuitLayer> = (0..3)
            .map(|i| {
                let kind = GeneratorKind::STANDARD[(i * 4 + 1) % 9];
                CircuitLayer::new(generator(kind, n).unwrap(), rng.random_range(-2.0..2.0))
            })
            .collect();
        let obs = generator(GeneratorKind::SumZZ, n).unwrap();
        let out = heisenberg_evolve(&circuit, &obs, &mut EigenCache::new()).unwrap();
        for (a, b) in obs.blocks().iter().zip(out.blocks()) {
            assert!((a.trace() - b.trace()).norm() < 1e-10);
            let ea = eigh_dense(&a.to_dense()).unwrap().values;
            let eb = eigh_dense(&b.to_dense()).unwrap().values;
            for (x, y) in ea.iter().zip(&eb) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn conserved_observable_is_unchanged() {
    let h = generator(GeneratorKind::SumXX, 9).unwrap();
    let out = heisenberg_evolve(&[CircuitLayer::new(h.clone(), 1.7)], &h, &mut EigenCache::new()).unwrap();
    assert!(out.max_abs_diff(&h) < 1e-11);
}

#[test]
fn keyed_cache_is_reused() {
    let n = 6;
    let h = generator(GeneratorKind::SumX, n).unwrap();
    let circuit = vec![
        CircuitLayer::keyed(h.clone(), 0.3, "x"),
        CircuitLayer::keyed(h.clone(), 0.4, "x"),
    ];
    let mut cache = EigenCache::new();
    let obs = generator(GeneratorKind::SumZ, n).unwrap();
    let a = heisenberg_evolve(&circuit, &obs, &mut cache).unwrap();
    assert_eq!(cache.len(), n / 2 + 1);
    let b = heisenberg_evolve(&[CircuitLayer::new(h, 0.7)], &obs, &mut EigenCache::new()).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-12);
}

#[test]
fn heisenberg_and_schrodinger_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let o = Oracle::new(4).unwrap();
    for _ in 0..5 {
        let (circuit, _) = common::random_circuit(&mut rng, &o, 5);
        let state = prepare_state(StateKind::AllPlus, 4).unwrap();
        let out = schrodinger_evolve_symmetric(&circuit, &state).unwrap();
        for kind in GeneratorKind::STANDARD {
            let obs = generator(kind, 4).unwrap();
            let a = expectation(&out, &obs).unwrap();
            let ev = heisenberg_evolve(&circuit, &obs, &mut EigenCache::new()).unwrap();
            let b = expectation(&state, &ev).unwrap();
            assert!((a - b).abs() < 1e-10, "{kind:?}: {a} vs {b}");
        }
        let SchurState::PureSymmetric { psi, .. } = out else { panic!() };
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-10);
    }
}

#[test]
fn permutation_invariance_of_expectation() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n = 5;
    let o = Oracle::new(n).unwrap();
    let (_, dense) = common::random_circuit(&mut rng, &o, 3);
    let (_, obs) = common::random_hamiltonian(&mut rng, &o);
    let dim = o.dim();
    let g = DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let rho = &g * g.adjoint();
    let rho = &rho / rho.trace();
    let base = o.dense_expectation(&dense, &rho, &obs).unwrap();
    for _ in 0..20 {
        let mut sigma: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            sigma.swap(i, rng.random_range(0..=i));
        }
        let r = o.permutation_matrix(&sigma).unwrap();
        let moved = &r * &rho * r.adjoint();
        let val = o.dense_expectation(&dense, &moved, &obs).unwrap();
        assert!((val - base).abs() < 1e-10);
    }
}

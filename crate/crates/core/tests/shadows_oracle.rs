mod common;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use schursim::block::GeneratorKind;
use schursim::evolution::{expectation, prepare_state, SchurState, StateKind};
use schursim::oracle::Oracle;
use schursim::ops::{generator, symmetrized_pauli_operator};
use schursim::shadows::{
    aggregate, channel_matrix, collect_snapshots, deep_variance_bound, estimate_all, sample_euler,
    symmetrized_variance_bound, Aggregation, EulerAngles, HammingSampler, Protocol, SymmetrizedSnapshot,
};
use schursim::{enumerate_irreps, C64};

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(k: usize) -> Vec<(f64, f64)> {
    (0..k)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=k {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = k as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

#[test]
fn channel_matches_quadrature_of_definition() {
    for n in 1..=4 {
        let chan = channel_matrix(n).unwrap();
        let d = chan.dim();
        let mut acc = DMatrix::<f64>::zeros(d, d);
        let m1 = 2 * n + 3;
        for (u, wu) in gauss_legendre(n + 2) {
            for j in 0..m1 {
                let angles = EulerAngles {
                    theta1: 2.0 * PI * j as f64 / m1 as f64,
                    theta2: u.acos(),
                    theta3: 0.3,
                };
                for h in 0..=n {
                    let v = chan.measurement_vector(&SymmetrizedSnapshot { angles, hamming: h });
                    let w = 0.5 * wu / m1 as f64;
                    for a in 0..d {
                        for b in 0..d {
                            acc[(a, b)] += w * v[a] * v[b];
                        }
                    }
                }
            }
        }
        let dev = (acc - chan.to_dense()).amax();
        assert!(dev < 1e-12, "n={n} dev={dev:e}");
    }
}

#[test]
fn basis_is_orthonormal() {
    for n in 1..=6 {
        let chan = channel_matrix(n).unwrap();
        // coordinates of B_k itself must be the unit vector e_k
        for (i, &w) in chan.basis().iter().enumerate() {
            let op = symmetrized_pauli_operator(n, w).unwrap();
            let coords = chan.observable_coordinates(&op).unwrap();
            let norm = coords[i];
            for (j, c) in coords.iter().enumerate() {
                let want = if i == j { norm } else { 0.0 };
                assert!((c - want).abs() < 1e-10 * norm.abs().max(1.0), "n={n} {w} vs {}", chan.basis()[j]);
            }
            // tr(T T) = 2^n / N_k, so tr(B_k T) = sqrt(2^n / N_k)
            assert!((norm * norm - op.frobenius_sq()).abs() < 1e-9 * op.frobenius_sq());
        }
    }
}

#[test]
fn coordinates_match_dense_traces() {
    let n = 3;
    let o = Oracle::new(n).unwrap();
    let chan = channel_matrix(n).unwrap();
    let obs = generator(GeneratorKind::SumXX, n).unwrap();
    let dense_obs = o.generator(GeneratorKind::SumXX).unwrap();
    let coords = chan.observable_coordinates(&obs).unwrap();
    for (i, &w) in chan.basis().iter().enumerate() {
        let t = o.symmetrized_pauli(w).unwrap();
        // B_k = T / ||T||_F
        let want = (&t * &dense_obs).trace().re / t.norm();
        assert!((coords[i] - want).abs() < 1e-10, "{w}");
    }
}

#[test]
fn hamming_distribution_matches_born_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let n = 4;
    let o = Oracle::new(n).unwrap();
    let (state, rho) = common::twirled_random_state(&mut rng, &o);
    let sampler = HammingSampler::new(&state).unwrap();
    for _ in 0..10 {
        let angles = sample_euler(&mut rng);
        let p = sampler.distribution(&angles).unwrap();
        let h = o.generator(GeneratorKind::SumY).unwrap() * C64::new(n as f64, 0.0);
        let z = o.generator(GeneratorKind::SumZ).unwrap() * C64::new(n as f64, 0.0);
        let w = o.expm(&z, angles.theta3 / 2.0).unwrap()
            * o.expm(&h, angles.theta2 / 2.0).unwrap()
            * o.expm(&z, angles.theta1 / 2.0).unwrap();
        let rot = &w * &rho * w.adjoint();
        let mut want = vec![0.0; n + 1];
        for x in 0..o.dim() {
            want[(x as u32).count_ones() as usize] += rot[(x, x)].re;
        }
        for (a, b) in p.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }
}

fn check_protocol(protocol: Protocol, n: usize, state: &SchurState, snapshots: usize, seed: u64) {
    let obs: Vec<_> = GeneratorKind::STANDARD
        .iter()
        .filter(|k| n >= k.min_qubits())
        .map(|&k| generator(k, n).unwrap())
        .collect();
    let records = collect_snapshots(protocol, state, snapshots, seed).unwrap();
    let chan = matches!(protocol, Protocol::Symmetrized).then(|| channel_matrix(n).unwrap());
    let est = estimate_all(&records, &obs, chan.as_ref()).unwrap();
    for (o, e) in obs.iter().zip(&est) {
        let truth = expectation(state, o).unwrap();
        let agg = aggregate(e, Aggregation::Mean).unwrap();
        let bound = match protocol {
            Protocol::Deep => deep_variance_bound(o).unwrap(),
            Protocol::Symmetrized => symmetrized_variance_bound(o),
        };
        assert!(
            (agg.value - truth).abs() <= 5.0 * agg.std_error + 1e-12,
            "{protocol:?} n={n} {:?}: {} vs {truth} (se {})",
            o.provenance(),
            agg.value,
            agg.std_error
        );
        assert!(agg.variance <= bound, "{protocol:?} variance {} > {bound}", agg.variance);
    }
}

#[test]
fn both_protocols_unbiased() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for n in [2usize, 3, 4] {
        let o = Oracle::new(n).unwrap();
        let states = [
            prepare_state(StateKind::AllZero, n).unwrap(),
            prepare_state(StateKind::AllPlus, n).unwrap(),
            common::twirled_random_state(&mut rng, &o).0,
        ];
        for (i, s) in states.iter().enumerate() {
            for p in [Protocol::Deep, Protocol::Symmetrized] {
                check_protocol(p, n, s, 20_000, 100 + i as u64);
            }
        }
    }
}

#[test]
fn identity_estimate_is_exact_for_symmetrized() {
    let n = 3;
    let state = prepare_state(StateKind::AllPlus, n).unwrap();
    let records = collect_snapshots(Protocol::Symmetrized, &state, 200, 5).unwrap();
    let id = schursim::BlockOperator::identity(n).unwrap();
    let chan = channel_matrix(n).unwrap();
    let est = estimate_all(&records, &[id], Some(&chan)).unwrap();
    assert!(est[0].iter().all(|x| (x - 1.0).abs() < 1e-10));
}

#[test]
fn pure_symmetric_state_only_samples_symmetric_irrep() {
    let state = prepare_state(StateKind::AllPlus, 4).unwrap();
    let records = collect_snapshots(Protocol::Deep, &state, 500, 9).unwrap();
    assert!(records.iter().all(|r| matches!(r, schursim::shadows::SnapshotRecord::Deep { snap, .. } if snap.irrep_m == 0)));
    assert_eq!(enumerate_irreps(4).unwrap().len(), 3);
}

#[test]
fn snapshots_are_reproducible() {
    let state = prepare_state(StateKind::AllPlus, 3).unwrap();
    let a = collect_snapshots(Protocol::Symmetrized, &state, 50, 77).unwrap();
    let b = collect_snapshots(Protocol::Symmetrized, &state, 50, 77).unwrap();
    assert_eq!(a, b);
}

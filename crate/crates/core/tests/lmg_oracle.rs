use nalgebra::{DMatrix, DVector};

use schursim::block::GeneratorKind;
use schursim::evolution::SchurState;
use schursim::lmg::{
    aqc_run, concurrence, lmg_hamiltonian, order_parameter, thermodynamic_references, two_qubit_rdm, LmgParams,
    Schedule, ScheduleParams, TwoQubitRdm,
};
use schursim::linalg::eigh_dense;
use schursim::oracle::{DenseOperator, Oracle};
use schursim::{enumerate_irreps, C64};

fn dense_lmg(o: &Oracle, p: LmgParams) -> DenseOperator {
    let n = o.n() as f64;
    let c = |x: f64| C64::new(x, 0.0);
    o.generator(GeneratorKind::SumXX).unwrap() * c(-p.j * (n - 1.0) / 2.0)
        + o.generator(GeneratorKind::SumYY).unwrap() * c(-p.j * p.gamma * (n - 1.0) / 2.0)
        + o.generator(GeneratorKind::SumZ).unwrap() * c(p.hz * n)
}

/// Dense statevector run of the same step sequence.
fn dense_aqc(o: &Oracle, p: LmgParams, sched: ScheduleParams) -> DVector<C64> {
    let n = o.n() as f64;
    let h1 = dense_lmg(o, p);
    let h0 = o.generator(GeneratorKind::SumX).unwrap() * C64::new(-n, 0.0);
    let mut psi = o.all_plus();
    for j in 1..=sched.steps {
        let s = sched.s_at(j);
        let h = &h0 * C64::new(1.0 - s, 0.0) + &h1 * C64::new(s, 0.0);
        psi = o.expm(&h, sched.dt()).unwrap() * psi;
    }
    psi
}

fn symmetric_embedding(o: &Oracle, state: &SchurState) -> DVector<C64> {
    let SchurState::PureSymmetric { psi, .. } = state else { panic!("expected symmetric state") };
    let mut out = DVector::zeros(o.dim());
    for (q, a) in psi.iter().enumerate() {
        out += o.canonical_schur_vector(0, q).unwrap() * *a;
    }
    out
}

#[test]
fn hamiltonian_blocks_match_dense() {
    for (n, p) in [(6, LmgParams::new(1.0, 0.0, 0.0).unwrap()), (4, LmgParams::new(1.0, 0.5, 1.0).unwrap())] {
        let o = Oracle::new(n).unwrap();
        let dense = dense_lmg(&o, p);
        let blocks = lmg_hamiltonian(p, n).unwrap();
        for ir in enumerate_irreps(n).unwrap() {
            let proj = o.project_block(&dense, ir.m).unwrap();
            assert!(blocks.block(ir.m).max_abs_diff_dense(&proj) < 1e-10);
        }
        // the raw pair sum of the model
        let mut raw = DMatrix::<C64>::zeros(o.dim(), o.dim());
        let x = schursim::Pauli::X;
        let y = schursim::Pauli::Y;
        let z = schursim::Pauli::Z;
        let id = schursim::Pauli::I;
        for i in 0..n {
            let mut s = vec![id; n];
            s[i] = z;
            raw += o.pauli_string(&s).unwrap() * C64::new(p.hz, 0.0);
            for j in i + 1..n {
                for (pp, c) in [(x, 1.0), (y, p.gamma)] {
                    let mut s = vec![id; n];
                    s[i] = pp;
                    s[j] = pp;
                    raw -= o.pauli_string(&s).unwrap() * C64::new(p.j * c / n as f64, 0.0);
                }
            }
        }
        assert!((raw - dense).camax() < 1e-12);
    }
}

#[test]
fn aqc_matches_dense_statevector() {
    let params = LmgParams::new(1.0, 0.5, 0.7).unwrap();
    for n in [4usize, 6, 8] {
        let o = Oracle::new(n).unwrap();
        let sched = ScheduleParams::default_for(n);
        let state = aqc_run(params, sched, n).unwrap();
        let got = symmetric_embedding(&o, &state);
        let want = dense_aqc(&o, params, sched);
        let overlap = got.dotc(&want).norm();
        assert!(overlap >= 1.0 - 1e-8, "n={n} overlap {overlap}");

        let rho = &want * want.adjoint();
        let zsum = o.generator(GeneratorKind::SumZ).unwrap() * C64::new(n as f64, 0.0);
        let z2 = (&rho * &zsum * &zsum).trace().re;
        let m_dense = 1.0 - z2 / (n * n) as f64;
        assert!((order_parameter(&state).unwrap() - m_dense).abs() < 1e-8);

        let rdm = two_qubit_rdm(&state).unwrap();
        let pt = o.partial_trace_two(&rho).unwrap();
        let dev = rdm.matrix().iter().zip(pt.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(dev < 1e-8, "n={n} rdm dev {dev:e}");
        let dense_rdm = TwoQubitRdm::new(nalgebra::Matrix4::from_iterator(pt.iter().copied())).unwrap();
        assert!((concurrence(&rdm).unwrap() - concurrence(&dense_rdm).unwrap()).abs() < 1e-7);
    }
}

#[test]
fn slow_anneal_reaches_ground_state() {
    let n = 8;
    let params = LmgParams::new(1.0, 0.5, 2.0).unwrap();
    let o = Oracle::new(n).unwrap();
    let h = dense_lmg(&o, params);
    let ground = eigh_dense(&h).unwrap().values[0];
    let sched = ScheduleParams::new(400.0, 2000, Schedule::Linear).unwrap();
    let state = aqc_run(params, sched, n).unwrap();
    let psi = symmetric_embedding(&o, &state);
    let energy = psi.dotc(&(&h * &psi)).re;
    assert!((energy - ground).abs() < 1e-3, "{energy} vs {ground}");
}

#[test]
fn short_anneal_keeps_plus_state() {
    let n = 6;
    let sched = ScheduleParams::new(1e-9, 1, Schedule::Linear).unwrap();
    let state = aqc_run(LmgParams::new(1.0, 0.5, 0.3).unwrap(), sched, n).unwrap();
    let rdm = two_qubit_rdm(&state).unwrap();
    assert!(rdm.matrix().iter().all(|z| (z.re - 0.25).abs() < 1e-6));
}

#[test]
fn order_parameter_independent_of_anisotropy() {
    let n = 256;
    for hz in [0.0, 0.5, 1.5] {
        let sched = ScheduleParams::default_for(n);
        let a = order_parameter(&aqc_run(LmgParams::new(1.0, 0.2, hz).unwrap(), sched, n).unwrap()).unwrap();
        let b = order_parameter(&aqc_run(LmgParams::new(1.0, 0.8, hz).unwrap(), sched, n).unwrap()).unwrap();
        assert!((a - b).abs() <= 0.02, "hz={hz}: {a} vs {b}");
        let (m_lim, _) = thermodynamic_references(0.5, hz).unwrap();
        assert!((a - m_lim).abs() <= 0.02);
    }
}

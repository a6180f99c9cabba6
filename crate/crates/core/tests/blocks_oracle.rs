use schursim::block::{GeneratorKind, Pauli};
use schursim::oracle::Oracle;
use schursim::ops::{generator, symmetrized_pauli_operator};
use schursim::{enumerate_irreps, WeightVector};

fn max_block_deviation(n: usize, kind: GeneratorKind) -> f64 {
    let o = Oracle::new(n).unwrap();
    let dense = o.generator(kind).unwrap();
    let blocks = generator(kind, n).unwrap();
    enumerate_irreps(n)
        .unwrap()
        .iter()
        .map(|ir| {
            let p = o.project_block(&dense, ir.m).unwrap();
            blocks.block(ir.m).max_abs_diff_dense(&p)
        })
        .fold(0.0, f64::max)
}

#[test]
fn standard_kinds_match_oracle() {
    for n in 2..=6 {
        for kind in GeneratorKind::STANDARD {
            let dev = max_block_deviation(n, kind);
            assert!(dev <= 1e-10, "{kind:?} n={n} dev={dev:e}");
        }
    }
}

#[test]
fn single_qubit_kinds() {
    for kind in [GeneratorKind::SumX, GeneratorKind::SumY, GeneratorKind::SumZ, GeneratorKind::GlobalY] {
        assert!(max_block_deviation(1, kind) <= 1e-12);
    }
}

#[test]
fn two_local_match_oracle() {
    for n in 2..=5 {
        for p in Pauli::ALL {
            for q in Pauli::ALL {
                let dev = max_block_deviation(n, GeneratorKind::TwoLocal(p, q));
                assert!(dev <= 1e-10, "{p:?}{q:?} n={n} dev={dev:e}");
            }
        }
    }
}

#[test]
fn small_weight_vectors_match_oracle() {
    for n in 3..=6 {
        let o = Oracle::new(n).unwrap();
        for w in schursim::enumerate_weight_vectors(n, 3.min(n)).unwrap() {
            let dense = o.symmetrized_pauli(w).unwrap();
            let blocks = symmetrized_pauli_operator(n, w).unwrap();
            for ir in enumerate_irreps(n).unwrap() {
                let p = o.project_block(&dense, ir.m).unwrap();
                let dev = blocks.block(ir.m).max_abs_diff_dense(&p);
                assert!(dev <= 1e-10, "{w} n={n} m={} dev={dev:e}", ir.m);
            }
        }
    }
}

#[test]
fn spec_weight_vector_examples() {
    // (2,0,0) on n=3, m=1 is a single number
    let b = symmetrized_pauli_operator(3, WeightVector::new(2, 0, 0)).unwrap();
    assert_eq!(b.block(1).dim(), 2);
    let o = Oracle::new(3).unwrap();
    let p = o.project_block(&o.symmetrized_pauli(WeightVector::new(2, 0, 0)).unwrap(), 1).unwrap();
    assert!(b.block(1).max_abs_diff_dense(&p) < 1e-12);
    // (1,1,1) on n=6 is Hermitian
    let b = symmetrized_pauli_operator(6, WeightVector::new(1, 1, 1)).unwrap();
    assert!(b.hermitian_deviation() < 1e-12);
}

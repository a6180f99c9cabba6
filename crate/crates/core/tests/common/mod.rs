#![allow(dead_code)]

use rand_chacha::ChaCha8Rng;

use schursim::evolution::{CircuitLayer, SchurState};
use schursim::oracle::{DenseCircuit, DenseOperator, Oracle};
use schursim::verify;
use schursim::BlockOperator;

pub fn random_hamiltonian(rng: &mut ChaCha8Rng, o: &Oracle) -> (BlockOperator, DenseOperator) {
    verify::random_hamiltonian(rng, o).unwrap()
}

pub fn random_circuit(
    rng: &mut ChaCha8Rng,
    o: &Oracle,
    max_layers: usize,
) -> (Vec<CircuitLayer>, DenseCircuit) {
    verify::random_circuit(rng, o, max_layers).unwrap()
}

pub fn twirled_random_state(rng: &mut ChaCha8Rng, o: &Oracle) -> (SchurState, DenseOperator) {
    verify::twirled_random_state(rng, o).unwrap()
}

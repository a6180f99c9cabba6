//! Block simulation of permutation-equivariant qubit circuits.
//!
//! Operators that commute with every qubit permutation are stored as one
//! small matrix per irrep `(n-m, m)` of the canonical Schur basis, which
//! makes circuits on hundreds of qubits tractable.

pub mod bench;
pub mod block;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod lmg;
pub mod ops;
pub mod oracle;
pub mod schur;
pub mod shadows;
pub mod verify;

pub use block::{compose, BlockMatrix, BlockOperator, GeneratorKind, Pauli, Provenance, Structure};
pub use error::{Error, Result};
pub use schur::{commutant_dim, enumerate_irreps, enumerate_weight_vectors, IrrepLabel, SchurIndex, WeightVector};

pub type C64 = num_complex::Complex<f64>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid qubit count {0}")]
    InvalidQubitCount(usize),
    #[error("irrep m={m} out of range for n={n}")]
    InvalidIrrep { n: usize, m: usize },
    #[error("dimension label q={q} out of range for block dimension {d}")]
    InvalidDimensionLabel { q: usize, d: usize },
    #[error("locality {k} exceeds n={n}")]
    LocalityTooLarge { k: usize, n: usize },
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),
    #[error("block for m={m} has dimension {got}, expected {expected}")]
    BlockShape { m: usize, got: usize, expected: usize },
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("{what} requires n >= {min}")]
    TooFewQubits { what: &'static str, min: usize },
    #[error("dense oracle is limited to n <= {max}, got {n}")]
    OracleGuard { n: usize, max: usize },
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("expectation value has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
    #[error("channel matrix block with parity {0:?} is singular")]
    SingularChannel([usize; 3]),
    #[error("reduced state needed eigenvalue clipping of {0:e}")]
    RdmClipping(f64),
    #[error("negative probability {0:e}")]
    NegativeProbability(f64),
    #[error("no estimates to aggregate")]
    EmptyEstimates,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

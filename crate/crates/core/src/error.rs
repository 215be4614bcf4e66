use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count {n} outside supported range 1..={max}")]
    QubitCount { n: usize, max: usize },
    #[error("locality k={k} invalid for n={n} qubits")]
    Locality { n: usize, k: usize },
    #[error("enumeration infeasible: {0}")]
    Infeasible(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("value expected to be real has imaginary part {0:e}")]
    NotReal(f64),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("noise parameter p={0} outside [0, 1]")]
    NoiseParam(f64),
    #[error("invalid Pauli string {0:?}")]
    PauliParse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("bias {0} is not positive: signal is beyond the horizon, no finite shot budget resolves it")]
    BeyondHorizon(f64),
    #[error("measurement outcome is deterministic (p+ = {0}); Fisher information undefined")]
    DegenerateOutcome(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

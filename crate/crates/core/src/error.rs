use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("gate support has repeated qubit {0}")]
    RepeatedQubit(usize),
    #[error("register size mismatch: expected {expected} qubits, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("observable phase must be +1 or -1, got a non-real phase")]
    NonRealPhase,
    #[error("depolarizing parameter {0} outside [0, 1]")]
    GammaOutOfRange(f64),
    #[error("invalid amplitude vector: {0}")]
    InvalidState(String),
    #[error("invalid Pauli string: {0}")]
    InvalidPauli(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid Trotter plan: {0}")]
    InvalidPlan(String),
    #[error("unsupported term shape: {0}")]
    UnsupportedTerm(String),
    #[error("register of {n_qubits} qubits exceeds the dense limit of {limit}")]
    RegisterTooLarge { n_qubits: usize, limit: usize },
    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid estimator configuration: {0}")]
    InvalidConfig(String),
    #[error("ground state is not a parity eigenstate (<P> = {0})")]
    NotParityEigenstate(f64),
    #[error("time grid is not uniform: {0}")]
    NonUniformGrid(String),
    #[error("fit failed: {0}")]
    FitFailed(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

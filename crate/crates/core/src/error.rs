use alloc::string::String;

/// Errors raised by the library. Protocol aborts are not errors; they are
/// recorded in transcripts.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("capacity exceeded: {requested} > {limit}")]
    CapacityExceeded { requested: usize, limit: usize },
    #[error("forced outcome {outcome} on qubit {qubit} has probability zero")]
    ForcedOutcomeImpossible { qubit: usize, outcome: u8 },
    #[error("forced outcome list exhausted after {0} measurements")]
    ForcedOutcomesExhausted(usize),
    #[error("qubit index {index} out of range for {qubits} qubits")]
    QubitOutOfRange { index: usize, qubits: usize },
    #[error("the honest set is empty")]
    EmptyHonestSet,
    #[error("correction rejected by the validator")]
    InvalidCorrection,
    #[error("an upstream resource aborted")]
    AbortedUpstream,
    #[error("input sum is odd")]
    OddInputSum,
    #[error("corrupted parties are not supported here")]
    UnsupportedCorruption,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("value {0} out of range")]
    OutOfRange(f64),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

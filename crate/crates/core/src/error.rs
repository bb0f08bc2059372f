use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("two-qubit gate needs distinct targets, got ({0}, {0})")]
    DuplicateTargets(usize),

    #[error("gate {kind} expects {expected} target(s), got {got}")]
    TargetArity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("gate {0} requires an angle")]
    MissingAngle(&'static str),

    #[error("gate {0} takes no angle")]
    UnexpectedAngle(&'static str),

    #[error("non-finite angle in gate {0}")]
    NonFiniteAngle(&'static str),

    #[error("pair ({0}, {1}) is not in the connectivity graph")]
    PairNotConnected(usize, usize),

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("shot-based estimation needs a preparation circuit; member {0} is a raw state vector")]
    ShotsOnRawVector(String),

    #[error("state set would need {needed} bytes, budget is {budget}")]
    MemoryBudget { needed: usize, budget: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

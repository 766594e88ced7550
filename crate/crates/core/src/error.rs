use thiserror::Error;

/// Errors raised anywhere in the simulator, Hamiltonian backends or pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HhlError {
    #[error("matrix is not Hermitian: max |A[i][j] - conj(A[j][i])| = {max_asymmetry:e}")]
    NonHermitian { max_asymmetry: f64 },

    #[error("matrix is singular: min |lambda| = {min_abs:e}, max |lambda| = {max_abs:e}")]
    SingularMatrix { min_abs: f64, max_abs: f64 },

    #[error("dimension {0} is not a power of two")]
    NonPowerOfTwoDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary: max |U^dag U - I| = {deviation:e}")]
    NonUnitary { deviation: f64 },

    #[error("qubit {0} appears more than once among targets and controls")]
    IndexOverlap(usize),

    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("register of {qubits} qubits exceeds the {max}-qubit budget")]
    RegisterTooLarge { qubits: usize, max: usize },

    #[error("measurement outcome {outcome} has probability {probability:e}; cannot collapse")]
    ZeroProbabilityBranch { outcome: u8, probability: f64 },

    #[error("vector has zero norm")]
    ZeroVector,

    #[error("block encoding failed: I - (A/alpha)^2 has eigenvalue {min_eigenvalue:e}")]
    NormalizationFailure { min_eigenvalue: f64 },

    #[error(
        "Taylor truncation K = {order} gives error bound {bound:e} above tolerance {tolerance:e}"
    )]
    TruncationInsufficient {
        order: usize,
        bound: f64,
        tolerance: f64,
    },

    #[error("clock register is not in |0...0>: off-zero mass {mass:e}")]
    ClockRegisterNotCleared { mass: f64 },

    #[error("clock bin 0 carries probability {probability:e}; problem is singular or mis-scaled")]
    ZeroEigenvalueBin { probability: f64 },

    #[error("post-selection impossible: ancilla |1> probability {probability:e}")]
    PostSelectionImpossible { probability: f64 },

    #[error("matrix is not positive definite: smallest eigenvalue {min_eigenvalue:e}")]
    IndefiniteMatrix { min_eigenvalue: f64 },

    #[error("infeasible family spec: {0}")]
    InfeasibleSpec(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T, E = HhlError> = std::result::Result<T, E>;

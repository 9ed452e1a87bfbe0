use thiserror::Error;

/// Errors produced by the simulation and estimation layers.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("qubit index {0} out of range for {1}-qubit system")]
    QubitOutOfRange(usize, usize),

    #[error("gate targets must be distinct, got {0}")]
    DuplicateTarget(usize),

    #[error("matrix is not unitary (max |U\u{2020}U - I| = {0:.3e})")]
    NonUnitary(f64),

    #[error("projection branch has probability {0:.3e}, below threshold; record inconsistent with circuit")]
    DegenerateBranch(f64),

    #[error("subsystem of {0} qubits exceeds the reduced-density cap of {1}")]
    SubsystemTooLarge(usize, usize),

    #[error("H has a null space; V completed with identity on the kernel")]
    NonInvertibleH,

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("circuit error: {0}")]
    Circuit(String),

    #[error("decoding error: {0}")]
    Decode(String),

    #[error("estimator error: {0}")]
    Estimator(String),

    #[error("MPS truncated to zero norm at site {0}")]
    TruncatedToZero(usize),

    #[error("spectral error: {0}")]
    Spectral(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;

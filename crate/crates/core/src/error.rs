use thiserror::Error;

#[derive(Debug, Error)]
pub enum QktError {
    #[error("invalid spin quantum number: 2j = {0}")]
    InvalidSpin(u32),

    #[error("operation requires j = 1, got 2j = {0}")]
    UnsupportedSpin(u32),

    #[error("state is not normalized (norm deviation {0:e})")]
    NotNormalized(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("decomposition failed: reconstruction error {0:e}")]
    DecompositionFailure(f64),

    #[error("malformed gate: {0}")]
    MalformedGate(String),

    #[error("tomography is missing measurement basis {0}")]
    MissingBasis(String),

    #[error("state has singlet weight {0:e}; O_SCS requires a symmetric state")]
    SymmetryViolation(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("netlist parse error on line {line}: {msg}")]
    Netlist { line: usize, msg: String },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, QktError>;

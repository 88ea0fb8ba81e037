use thiserror::Error;

/// Everything that can go wrong while building models or transforms.
#[derive(Debug, Error)]
pub enum FwError {
    #[error("input is not Hermitian (relative residual {residual:e})")]
    NonHermitianInput { residual: f64 },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("operand is singular: minimum eigenvalue {min_eigenvalue:e} below gap tolerance {gap_tol:e}")]
    SingularOperand { min_eigenvalue: f64, gap_tol: f64 },

    #[error("Hamiltonian has no usable spectral gap at zero: min eigenvalue of H^2 is {min_eigenvalue:e}, tolerance {gap_tol:e}")]
    SingularHamiltonian { min_eigenvalue: f64, gap_tol: f64 },

    #[error("eigenphase {phase} lies within 1e-8 of the logarithm branch cut")]
    BranchCutProximity { phase: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("1 + beta*lambda is numerically singular (minimum singular value {min_singular_value:e})")]
    DegenerateFactor { min_singular_value: f64 },

    #[error("even and odd parts do not commute (relative residual {residual:e})")]
    NotCommuting { residual: f64 },

    #[error("closed-form square root is not the principal branch (minimum eigenvalue {min_eigenvalue:e})")]
    OutsideValidityDomain { min_eigenvalue: f64 },

    #[error("invalid grading: dim {dim}, upper block {upper_dim}")]
    InvalidGrading { dim: usize, upper_dim: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl FwError {
    /// Stable variant name, used for error records in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            FwError::NonHermitianInput { .. } => "NonHermitianInput",
            FwError::NotPositiveSemidefinite { .. } => "NotPositiveSemidefinite",
            FwError::SingularOperand { .. } => "SingularOperand",
            FwError::SingularHamiltonian { .. } => "SingularHamiltonian",
            FwError::BranchCutProximity { .. } => "BranchCutProximity",
            FwError::NotUnitary { .. } => "NotUnitary",
            FwError::DimensionMismatch { .. } => "DimensionMismatch",
            FwError::DegenerateFactor { .. } => "DegenerateFactor",
            FwError::NotCommuting { .. } => "NotCommuting",
            FwError::OutsideValidityDomain { .. } => "OutsideValidityDomain",
            FwError::InvalidGrading { .. } => "InvalidGrading",
            FwError::InvalidGrid(_) => "InvalidGrid",
            FwError::InvalidModel(_) => "InvalidModel",
            FwError::Parse { .. } => "ParseError",
            FwError::Io(_) => "IoError",
            FwError::Json(_) => "JsonError",
            FwError::Csv(_) => "CsvError",
        }
    }
}

pub type Result<T, E = FwError> = std::result::Result<T, E>;

use thiserror::Error;

use crate::numerics::DensityReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("not a density matrix: {0}")]
    InvalidDensity(DensityReport),

    #[error("hamiltonian is not hermitian (relative defect {defect:.3e})")]
    NonHermitianHamiltonian { defect: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "step {dt:e} too large: generator step norm {norm:.3e} must stay below 1"
    )]
    StepTooLarge { dt: f64, norm: f64 },

    #[error("kraus map produced a state with vanishing trace {trace:e}")]
    DegenerateMap { trace: f64 },

    #[error("kraus completeness defect {defect:.3e} exceeds bound {bound:.3e}")]
    DefectTooLarge { defect: f64, bound: f64 },

    #[error("operator is not unitary (defect {defect:.3e})")]
    NonUnitary { defect: f64 },

    #[error(
        "integration diagnostic at t = {time}: {what}; retry with a smaller dt"
    )]
    Integration { time: f64, what: String },

    #[error("visibility below threshold at t = {time}: |tr S(t) rho0| = {visibility:e}, phase undefined")]
    NodalPoint { time: f64, visibility: f64 },

    #[error("phase grid too coarse: jump of {jump:.3} rad between samples {index} and {}", index + 1)]
    GridTooCoarse { index: usize, jump: f64 },

    #[error("trajectory grid is not uniform at sample {index}")]
    NonUniformGrid { index: usize },

    #[error("expectation value has imaginary residue {residue:e}")]
    ComplexExpectation { residue: f64 },

    #[error("fock cutoff {cutoff} leaks {leakage:.3e} of the coherent state norm")]
    CutoffTooSmall { cutoff: usize, leakage: f64 },

    #[error("model file: {0}")]
    ModelFile(String),
}

impl Error {
    /// Errors that come from the physics rather than malformed input.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::NodalPoint { .. } | Error::Integration { .. } | Error::DegenerateMap { .. }
        )
    }
}

//! Completely positive Markovian dynamics.
//!
//! A [`LindbladModel`] holds the Hamiltonian `H`, the jump operators `V_n`
//! and `ħ`, and generates
//!
//! ```text
//! dρ/dt = (1/iħ)[H, ρ] + ½ Σ_n (2 V_n ρ V_n† − ρ V_n† V_n − V_n† V_n ρ)
//! ```

mod dilation;
mod integrate;
mod kraus;
mod model_file;

pub use dilation::{dilate, Dilation};
pub use integrate::{effective_propagator, evolve, evolve_final, Trajectory};
pub use kraus::{apply_kraus, compose_nonselective, kraus_step, KrausSet, MeasurementSchedule};
pub use model_file::{matrix_from_pairs, ModelFile};

use crate::error::{Error, Result};
use crate::numerics::{c, ensure_dim, ensure_finite, ensure_square, ComplexMatrix, DensityMatrix};

const HERMITICITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    hamiltonian: ComplexMatrix,
    jump_ops: Vec<ComplexMatrix>,
    hbar: f64,
    /// `i H/ħ + ½ Σ V_n† V_n`, the generator of the no-jump evolution.
    effective: ComplexMatrix,
    /// `Σ V_n† V_n`.
    decay: ComplexMatrix,
}

impl LindbladModel {
    pub fn new(hamiltonian: ComplexMatrix, jump_ops: Vec<ComplexMatrix>, hbar: f64) -> Result<Self> {
        let dim = ensure_square(&hamiltonian)?;
        ensure_finite(&hamiltonian)?;
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter {
                name: "hbar",
                reason: format!("must be positive and finite, got {hbar}"),
            });
        }
        let norm = hamiltonian.norm();
        if norm > 0.0 {
            let defect = (&hamiltonian - hamiltonian.adjoint()).norm() / norm;
            if defect > HERMITICITY_TOL {
                return Err(Error::NonHermitianHamiltonian { defect });
            }
        }
        let mut decay = ComplexMatrix::zeros(dim, dim);
        for v in &jump_ops {
            ensure_dim(v, dim)?;
            ensure_finite(v)?;
            decay += v.adjoint() * v;
        }
        let effective = &hamiltonian * c(0.0, 1.0 / hbar) + &decay * c(0.5, 0.0);
        Ok(Self {
            hamiltonian,
            jump_ops,
            hbar,
            effective,
            decay,
        })
    }

    /// Closed system with no jump operators.
    pub fn unitary(hamiltonian: ComplexMatrix, hbar: f64) -> Result<Self> {
        Self::new(hamiltonian, Vec::new(), hbar)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn jump_ops(&self) -> &[ComplexMatrix] {
        &self.jump_ops
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `i H/ħ + ½ Σ V_n† V_n`.
    pub fn effective_generator(&self) -> &ComplexMatrix {
        &self.effective
    }

    /// `Σ V_n† V_n`.
    pub fn decay_operator(&self) -> &ComplexMatrix {
        &self.decay
    }

    /// Applies the generator to an arbitrary square matrix of the model's
    /// dimension. Used for intermediate integrator stages, which need not be
    /// valid states.
    pub fn apply_generator(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        // −Gρ − ρG† equals (1/iħ)[H,ρ] − ½{ΣV†V, ρ}
        let mut out = -(&self.effective * rho) - rho * self.effective.adjoint();
        for v in &self.jump_ops {
            out += v * rho * v.adjoint();
        }
        out
    }
}

/// Right-hand side of the master equation at state `rho`.
pub fn lindblad_rhs(model: &LindbladModel, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    ensure_dim(rho.matrix(), model.dim())?;
    Ok(model.apply_generator(rho.matrix()))
}

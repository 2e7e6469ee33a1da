//! Dense complex linear algebra shared by the rest of the crate.
//!
//! Operators are plain [`nalgebra::DMatrix`] values over [`Complex64`];
//! density matrices are wrapped in [`DensityMatrix`], which can only be
//! built from a matrix that passes [`check_density`].

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense square complex matrix, the carrier for every operator.
pub type ComplexMatrix = DMatrix<Complex64>;

/// Scaled one-norm below which the truncated Taylor series is summed.
const SCALED_NORM: f64 = 0.5;
/// Terms smaller than this fraction of the partial sum end the series.
const SERIES_TOL: f64 = 1e-18;
const MAX_SERIES_TERMS: usize = 40;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn ensure_square(a: &ComplexMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

pub fn ensure_finite(a: &ComplexMatrix) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_dim(a: &ComplexMatrix, expected: usize) -> Result<()> {
    let found = ensure_square(a)?;
    if found != expected {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Maximum absolute column sum.
pub fn one_norm(a: &ComplexMatrix) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest singular value.
pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    let gram = a.adjoint() * a;
    hermitian_eigenvalues(&gram)
        .iter()
        .cloned()
        .fold(0.0, f64::max)
        .max(0.0)
        .sqrt()
}

/// Computes `exp(a * t)` by scaling and squaring a truncated Taylor series.
///
/// The argument is scaled by `2^-s` until its one-norm is at most 0.5, the
/// series is summed until the next term drops below 1e-18 of the partial
/// sum, and the result is squared `s` times.
pub fn matexp(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let n = ensure_square(a)?;
    ensure_finite(a)?;
    if !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("must be finite, got {t}"),
        });
    }
    let x = a * c(t, 0.0);
    let norm = one_norm(&x);
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scaled = x * c(2f64.powi(-squarings), 0.0);

    let mut sum = ComplexMatrix::identity(n, n);
    let mut term = ComplexMatrix::identity(n, n);
    for k in 1..=MAX_SERIES_TERMS {
        term = &term * &scaled * c(1.0 / k as f64, 0.0);
        sum += &term;
        if one_norm(&term) <= SERIES_TOL * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// Kronecker product with block layout `a[j,k] * b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

/// `(a + a†) / 2`.
pub fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()) * c(0.5, 0.0)
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> DVector<f64> {
    let mut ev = hermitian_part(a).symmetric_eigenvalues();
    ev.as_mut_slice().sort_by(|x, y| x.total_cmp(y));
    ev
}

/// `‖a† a − 1‖_F`.
pub fn unitarity_defect(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    (a.adjoint() * a - ComplexMatrix::identity(n, n)).norm()
}

/// Trace distance `½‖ρ − σ‖₁` between two Hermitian matrices.
pub fn trace_distance(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> f64 {
    0.5 * hermitian_eigenvalues(&(rho - sigma))
        .iter()
        .map(|l| l.abs())
        .sum::<f64>()
}

/// Outcome of [`check_density`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityReport {
    /// `‖ρ − ρ†‖_F / ‖ρ‖_F`.
    pub hermiticity_defect: f64,
    /// `|tr ρ − 1|`.
    pub trace_defect: f64,
    /// Smallest eigenvalue of `(ρ + ρ†)/2`.
    pub min_eigenvalue: f64,
    pub pass: bool,
}

impl fmt::Display for DensityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "hermiticity defect {:.3e}, trace defect {:.3e}, min eigenvalue {:.3e}",
            self.hermiticity_defect, self.trace_defect, self.min_eigenvalue
        )
    }
}

/// Separate tolerances for the three density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityTolerance {
    pub hermiticity: f64,
    pub trace: f64,
    pub eigenvalue: f64,
}

impl Default for DensityTolerance {
    fn default() -> Self {
        Self {
            hermiticity: 1e-10,
            trace: 1e-8,
            eigenvalue: 1e-8,
        }
    }
}

impl DensityTolerance {
    pub fn uniform(tol: f64) -> Self {
        Self {
            hermiticity: tol,
            trace: tol,
            eigenvalue: tol,
        }
    }
}

impl DensityReport {
    pub fn within(&self, tol: &DensityTolerance) -> bool {
        self.hermiticity_defect <= tol.hermiticity
            && self.trace_defect <= tol.trace
            && self.min_eigenvalue >= -tol.eigenvalue
    }
}

/// Measures the density-matrix invariants of `rho`; passes iff all three
/// defects are within `tol`. Non-square input reports a failure.
pub fn check_density(rho: &ComplexMatrix, tol: f64) -> DensityReport {
    check_density_with(rho, &DensityTolerance::uniform(tol))
}

pub fn check_density_with(rho: &ComplexMatrix, tol: &DensityTolerance) -> DensityReport {
    if ensure_square(rho).is_err() || ensure_finite(rho).is_err() {
        return DensityReport {
            hermiticity_defect: f64::INFINITY,
            trace_defect: f64::INFINITY,
            min_eigenvalue: f64::NEG_INFINITY,
            pass: false,
        };
    }
    let norm = rho.norm();
    let hermiticity_defect = if norm > 0.0 {
        (rho - rho.adjoint()).norm() / norm
    } else {
        0.0
    };
    let trace_defect = (rho.trace() - c(1.0, 0.0)).norm();
    let min_eigenvalue = hermitian_eigenvalues(rho)[0];
    let mut report = DensityReport {
        hermiticity_defect,
        trace_defect,
        min_eigenvalue,
        pass: false,
    };
    report.pass = report.within(tol);
    report
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates `mat` against the default [`DensityTolerance`].
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(mat, &DensityTolerance::default())
    }

    pub fn with_tolerance(mat: ComplexMatrix, tol: &DensityTolerance) -> Result<Self> {
        let report = check_density_with(&mat, tol);
        if report.pass {
            Ok(Self(mat))
        } else {
            Err(Error::InvalidDensity(report))
        }
    }

    /// Wraps a matrix whose invariants the caller has already established.
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        Self(mat)
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn pure(psi: &DVector<Complex64>) -> Result<Self> {
        let norm2 = psi.norm_squared();
        if norm2 == 0.0 || !norm2.is_finite() {
            return Err(Error::InvalidParameter {
                name: "psi",
                reason: "state vector must have finite nonzero norm".into(),
            });
        }
        Ok(Self(psi * psi.adjoint() * c(1.0 / norm2, 0.0)))
    }

    /// Projector onto basis state `index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidParameter {
                name: "index",
                reason: format!("{index} outside dimension {dim}"),
            });
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(index, index)] = c(1.0, 0.0);
        Ok(Self(m))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim, dim) * c(1.0 / dim as f64, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// `tr(ρ A)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Complex64 {
        (&self.0 * op).trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    pub fn report(&self) -> DensityReport {
        check_density_with(&self.0, &DensityTolerance::default())
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

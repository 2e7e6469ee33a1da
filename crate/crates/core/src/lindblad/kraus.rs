use crate::error::{Error, Result};
use crate::numerics::{c, ensure_dim, ensure_square, hermitian_part, spectral_norm, ComplexMatrix, DensityMatrix};

use super::LindbladModel;

/// Traces at or below this make the renormalization of a Kraus image undefined.
const DEGENERATE_TRACE: f64 = 1e-300;

/// Measurement operators `{W_n}` together with their completeness defect
/// `‖Σ W_n†W_n − 1‖_F`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    ops: Vec<ComplexMatrix>,
    completeness_defect: f64,
    defect_constant: Option<f64>,
}

impl KrausSet {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = ops.first().ok_or_else(|| Error::InvalidParameter {
            name: "kraus",
            reason: "at least one operator is required".into(),
        })?;
        let dim = ensure_square(first)?;
        for w in &ops {
            ensure_dim(w, dim)?;
        }
        let completeness_defect = (completeness(&ops) - ComplexMatrix::identity(dim, dim)).norm();
        Ok(Self {
            ops,
            completeness_defect,
            defect_constant: None,
        })
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    pub fn completeness_defect(&self) -> f64 {
        self.completeness_defect
    }

    /// `C` in `defect = C·dt²`, known for sets built by [`kraus_step`].
    pub fn defect_constant(&self) -> Option<f64> {
        self.defect_constant
    }

    /// `Σ_n W_n ρ W_n†` without renormalization.
    pub fn apply_unnormalized(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let n = rho.nrows();
        self.ops
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, w| acc + w * rho * w.adjoint())
    }

    /// Probability `tr(W_n†W_n ρ)` of outcome `n`.
    pub fn outcome_probability(&self, n: usize, rho: &DensityMatrix) -> f64 {
        let w = &self.ops[n];
        (w.adjoint() * w * rho.matrix()).trace().re
    }
}

fn completeness(ops: &[ComplexMatrix]) -> ComplexMatrix {
    let n = ops[0].nrows();
    ops.iter()
        .fold(ComplexMatrix::zeros(n, n), |acc, w| acc + w.adjoint() * w)
}

/// Infinitesimal measurement operators `W_0 = 1 − (iH/ħ + ½ΣV†V) dt`,
/// `W_n = V_n √dt`.
///
/// The defect is exactly `‖G†G‖_F dt²` with `G = iH/ħ + ½ΣV†V`; the constant
/// is recorded on the returned set.
pub fn kraus_step(model: &LindbladModel, dt: f64) -> Result<KrausSet> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must be positive, got {dt}"),
        });
    }
    let generator = model.effective_generator();
    let norm = spectral_norm(generator) * dt;
    if norm >= 1.0 {
        return Err(Error::StepTooLarge { dt, norm });
    }
    let n = model.dim();
    let mut ops = Vec::with_capacity(model.jump_ops().len() + 1);
    ops.push(ComplexMatrix::identity(n, n) - generator * c(dt, 0.0));
    ops.extend(model.jump_ops().iter().map(|v| v * c(dt.sqrt(), 0.0)));
    let mut set = KrausSet::new(ops)?;
    set.defect_constant = Some((generator.adjoint() * generator).norm());
    Ok(set)
}

/// Non-selective update `Σ W_n ρ W_n†`, renormalized to unit trace.
pub fn apply_kraus(kraus: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    ensure_dim(rho.matrix(), kraus.dim())?;
    renormalized(kraus.apply_unnormalized(rho.matrix())).map(DensityMatrix::from_trusted)
}

fn renormalized(raw: ComplexMatrix) -> Result<ComplexMatrix> {
    let trace = raw.trace().re;
    if trace.is_nan() || trace <= DEGENERATE_TRACE {
        return Err(Error::DegenerateMap { trace });
    }
    Ok(hermitian_part(&raw) * c(1.0 / trace, 0.0))
}

/// `N` repeated measurements of duration `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSchedule {
    dt: f64,
    steps: usize,
}

impl MeasurementSchedule {
    pub fn new(dt: f64, steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be positive, got {dt}"),
            });
        }
        if steps == 0 {
            return Err(Error::InvalidParameter {
                name: "steps",
                reason: "must be at least 1".into(),
            });
        }
        Ok(Self { dt, steps })
    }

    /// Splits `[0, t]` into `round(t/dt)` steps; the step is adjusted so that
    /// `N·dt = t`.
    pub fn for_horizon(t: f64, dt: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidParameter {
                name: "t",
                reason: format!("must be positive, got {t}"),
            });
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be positive, got {dt}"),
            });
        }
        let steps = (t / dt).round().max(1.0) as usize;
        Self::new(t / steps as f64, steps)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.steps as f64
    }
}

/// Repeats the infinitesimal measurement `N` times with the probe reset in
/// between, i.e. applies [`apply_kraus`] with the same [`kraus_step`] set.
pub fn compose_nonselective(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    schedule: &MeasurementSchedule,
) -> Result<DensityMatrix> {
    ensure_dim(rho0.matrix(), model.dim())?;
    let kraus = kraus_step(model, schedule.dt())?;
    let mut rho = rho0.matrix().clone();
    for _ in 0..schedule.steps() {
        rho = renormalized(kraus.apply_unnormalized(&rho))?;
    }
    DensityMatrix::new(rho)
}

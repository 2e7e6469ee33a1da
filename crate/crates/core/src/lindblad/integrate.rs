use crate::error::{Error, Result};
use crate::numerics::{c, ensure_dim, hermitian_eigenvalues, hermitian_part, matexp, ComplexMatrix, DensityMatrix};

use super::LindbladModel;

/// Negative eigenvalues below this abort the integration.
const POSITIVITY_TOL: f64 = 1e-6;
const TRACE_DRIFT_TOL: f64 = 1e-8;

/// States of a Lindblad evolution on a uniform time grid starting at 0.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(Error::InvalidParameter {
                name: "trajectory",
                reason: format!("{} times for {} states", times.len(), states.len()),
            });
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidParameter {
                name: "trajectory",
                reason: format!("must start at t = 0, starts at {}", times[0]),
            });
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter {
                name: "trajectory",
                reason: format!("times not strictly increasing at sample {}", i + 1),
            });
        }
        Ok(Self { times, states })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}

/// Number of uniform steps covering `[0, t]` with spacing at most `dt`.
pub(crate) fn step_count(t: f64, dt: f64) -> Result<usize> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("must be positive, got {t}"),
        });
    }
    if !(dt.is_finite() && dt > 0.0 && dt <= t * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must satisfy 0 < dt <= t, got dt = {dt}, t = {t}"),
        });
    }
    Ok(((t / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize)
}

fn rk4_step(model: &LindbladModel, rho: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let half = c(0.5 * h, 0.0);
    let k1 = model.apply_generator(rho);
    let k2 = model.apply_generator(&(rho + &k1 * half));
    let k3 = model.apply_generator(&(rho + &k2 * half));
    let k4 = model.apply_generator(&(rho + &k3 * c(h, 0.0)));
    let next = rho + (k1 + (k2 + k3) * c(2.0, 0.0) + k4) * c(h / 6.0, 0.0);
    hermitian_part(&next)
}

fn diagnose(rho: &ComplexMatrix, time: f64) -> Result<()> {
    let drift = (rho.trace() - c(1.0, 0.0)).norm();
    if drift > TRACE_DRIFT_TOL {
        return Err(Error::Integration {
            time,
            what: format!("trace drifted by {drift:.3e}"),
        });
    }
    // Cholesky of ρ + tol·1 exists iff every eigenvalue exceeds −tol.
    let n = rho.nrows();
    let shifted = rho + ComplexMatrix::identity(n, n) * c(POSITIVITY_TOL, 0.0);
    if shifted.cholesky().is_none() {
        let min = hermitian_eigenvalues(rho)[0];
        return Err(Error::Integration {
            time,
            what: format!("positivity violated, minimum eigenvalue {min:.3e}"),
        });
    }
    Ok(())
}

fn integrate<F>(model: &LindbladModel, rho0: &DensityMatrix, t: f64, dt: f64, mut record: F) -> Result<ComplexMatrix>
where
    F: FnMut(f64, &ComplexMatrix),
{
    ensure_dim(rho0.matrix(), model.dim())?;
    let steps = step_count(t, dt)?;
    let h = t / steps as f64;
    let mut rho = rho0.matrix().clone();
    record(0.0, &rho);
    for j in 1..=steps {
        rho = rk4_step(model, &rho, h);
        let time = if j == steps { t } else { j as f64 * h };
        diagnose(&rho, time)?;
        record(time, &rho);
    }
    Ok(rho)
}

/// Integrates the master equation with the classical fourth-order
/// Runge-Kutta scheme on a uniform grid of `ceil(t/dt)` steps.
///
/// Every state is re-symmetrized after its step. Integration stops with
/// [`Error::Integration`] if the trace drifts by more than 1e-8 or an
/// eigenvalue falls below −1e-6.
pub fn evolve(model: &LindbladModel, rho0: &DensityMatrix, t: f64, dt: f64) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    integrate(model, rho0, t, dt, |time, rho| {
        times.push(time);
        states.push(DensityMatrix::from_trusted(rho.clone()));
    })?;
    Trajectory::new(times, states)
}

/// Like [`evolve`] but keeps only the final state.
pub fn evolve_final(model: &LindbladModel, rho0: &DensityMatrix, t: f64, dt: f64) -> Result<DensityMatrix> {
    if t == 0.0 {
        ensure_dim(rho0.matrix(), model.dim())?;
        return Ok(rho0.clone());
    }
    integrate(model, rho0, t, dt, |_, _| {}).map(DensityMatrix::from_trusted)
}

/// No-jump propagator `S(t) = exp[−(iH/ħ + ½ Σ V_n†V_n) t]`.
pub fn effective_propagator(model: &LindbladModel, t: f64) -> Result<ComplexMatrix> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("must be non-negative, got {t}"),
        });
    }
    if t == 0.0 {
        let n = model.dim();
        return Ok(ComplexMatrix::identity(n, n));
    }
    matexp(model.effective_generator(), -t)
}

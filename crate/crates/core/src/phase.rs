//! Total, dynamical and geometric phases of a state under Lindblad evolution.
//!
//! The total phase between `ρ(0)` and `ρ(t)` is `arg tr[S(t)ρ(0)]` and the
//! visibility is its modulus. The dynamical phase integrates the energy along
//! the trajectory, `−(1/ħ)∫ tr[ρ(τ)H] dτ`, and the geometric phase is what
//! remains.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lindblad::{effective_propagator, evolve, LindbladModel, Trajectory};
use crate::numerics::{ensure_dim, ComplexMatrix, DensityMatrix};

/// Visibilities below this make the phase undefined.
pub const NODAL_THRESHOLD: f64 = 1e-12;
/// Largest principal-value change between adjacent samples that can still be
/// assigned to a branch unambiguously.
pub const MAX_BRANCH_STEP: f64 = PI / 2.0;
const IMAGINARY_RESIDUE_TOL: f64 = 1e-10;
const UNIFORM_GRID_TOL: f64 = 1e-9;

/// Maps an angle onto `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// `arg` and modulus of `tr[S(t)ρ0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pancharatnam {
    /// Principal value in `(−π, π]`.
    pub phase: f64,
    pub visibility: f64,
    pub overlap: Complex64,
}

fn overlap_phase(z: Complex64, time: f64) -> Result<Pancharatnam> {
    let visibility = z.norm();
    if visibility.is_nan() || visibility < NODAL_THRESHOLD {
        return Err(Error::NodalPoint { time, visibility });
    }
    Ok(Pancharatnam {
        phase: wrap_phase(z.arg()),
        visibility,
        overlap: z,
    })
}

pub fn pancharatnam(model: &LindbladModel, rho0: &DensityMatrix, t: f64) -> Result<Pancharatnam> {
    ensure_dim(rho0.matrix(), model.dim())?;
    let s = effective_propagator(model, t)?;
    overlap_phase((s * rho0.matrix()).trace(), t)
}

/// Continuous branch of the total phase `φ(0, τ)` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCurve {
    pub times: Vec<f64>,
    pub total_unwrapped: Vec<f64>,
    pub visibility: Vec<f64>,
}

impl PhaseCurve {
    pub fn final_phase(&self) -> f64 {
        *self.total_unwrapped.last().expect("curve has at least two samples")
    }
}

/// Lifts principal values to a continuous branch starting at `principal[0]`,
/// choosing at each step the branch nearest the previous sample.
///
/// Fails if any step would have to exceed [`MAX_BRANCH_STEP`].
pub fn unwrap_phases(principal: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(principal.len());
    let mut prev = match principal.first() {
        Some(&p) => p,
        None => return Ok(out),
    };
    out.push(prev);
    for (i, w) in principal.windows(2).enumerate() {
        let jump = wrap_phase(w[1] - w[0]);
        if jump.abs() > MAX_BRANCH_STEP {
            return Err(Error::GridTooCoarse { index: i, jump });
        }
        prev += jump;
        out.push(prev);
    }
    Ok(out)
}

/// Samples `tr[S(τ)ρ0]` at `n_grid + 1` uniform points of `[0, t]` and
/// unwraps its argument from `φ(0, 0) = 0`.
pub fn phase_curve(model: &LindbladModel, rho0: &DensityMatrix, t: f64, n_grid: usize) -> Result<PhaseCurve> {
    ensure_dim(rho0.matrix(), model.dim())?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("must be positive, got {t}"),
        });
    }
    if n_grid == 0 {
        return Err(Error::InvalidParameter {
            name: "n_grid",
            reason: "must be at least 1".into(),
        });
    }
    let h = t / n_grid as f64;
    let step = effective_propagator(model, h)?;
    let mut times = Vec::with_capacity(n_grid + 1);
    let mut principal = Vec::with_capacity(n_grid + 1);
    let mut visibility = Vec::with_capacity(n_grid + 1);
    // S(τ_{j+1}) ρ0 = S(h) S(τ_j) ρ0
    let mut propagated: ComplexMatrix = rho0.matrix().clone();
    for j in 0..=n_grid {
        let time = if j == n_grid { t } else { j as f64 * h };
        if j > 0 {
            propagated = &step * &propagated;
        }
        let p = overlap_phase(propagated.trace(), time)?;
        times.push(time);
        principal.push(p.phase);
        visibility.push(p.visibility);
    }
    // tr ρ0 = 1 up to rounding, so the first principal value is ~0
    principal[0] = 0.0;
    let total_unwrapped = unwrap_phases(&principal)?;
    Ok(PhaseCurve {
        times,
        total_unwrapped,
        visibility,
    })
}

/// `tr[ρ H]` with the imaginary rounding residue checked and dropped.
pub(crate) fn real_expectation(rho: &DensityMatrix, op: &ComplexMatrix) -> Result<f64> {
    let z = rho.expectation(op);
    if z.im.abs() > IMAGINARY_RESIDUE_TOL * z.re.abs().max(1.0) {
        return Err(Error::ComplexExpectation { residue: z.im });
    }
    Ok(z.re)
}

fn ensure_uniform(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Ok(0.0);
    }
    let h = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    for (i, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - h).abs() > UNIFORM_GRID_TOL * h {
            return Err(Error::NonUniformGrid { index: i + 1 });
        }
    }
    Ok(h)
}

/// Composite Simpson rule on uniform samples; an odd interval count closes
/// with one trapezoid on the last interval.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let intervals = values.len().saturating_sub(1);
    if intervals == 0 {
        return 0.0;
    }
    let simpson_intervals = intervals - intervals % 2;
    let mut sum = 0.0;
    if simpson_intervals > 0 {
        let inner: f64 = values[1..simpson_intervals]
            .iter()
            .enumerate()
            .map(|(i, v)| if i % 2 == 0 { 4.0 * v } else { 2.0 * v })
            .sum();
        sum += h / 3.0 * (values[0] + inner + values[simpson_intervals]);
    }
    if intervals % 2 == 1 {
        sum += 0.5 * h * (values[intervals - 1] + values[intervals]);
    }
    sum
}

/// `−(1/ħ)∫₀ᵗ tr[ρ(τ)H] dτ` over the trajectory grid.
pub fn dynamical_phase(model: &LindbladModel, traj: &Trajectory) -> Result<f64> {
    energy_integral(model.hamiltonian(), model.hbar(), traj)
}

pub(crate) fn energy_integral(hamiltonian: &ComplexMatrix, hbar: f64, traj: &Trajectory) -> Result<f64> {
    let h = ensure_uniform(traj.times())?;
    let energies = traj
        .states()
        .iter()
        .map(|rho| {
            ensure_dim(rho.matrix(), hamiltonian.nrows())?;
            real_expectation(rho, hamiltonian)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(-simpson(&energies, h) / hbar)
}

/// Phases accumulated over `[0, t]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseReport {
    /// Unwrapped total phase `φ(0, t)`.
    pub total: f64,
    /// `arg tr[S(t)ρ0]` in `(−π, π]`.
    pub total_principal: f64,
    pub visibility: f64,
    pub dynamical: f64,
    /// `total − dynamical`.
    pub geometric: f64,
    /// `geometric` reduced to `(−π, π]`.
    pub geometric_wrapped: f64,
    pub t: f64,
    /// Integration step actually used (`t / ceil(t/dt)`).
    pub dt: f64,
}

impl PhaseReport {
    fn at_origin(dt: f64) -> Self {
        Self {
            total: 0.0,
            total_principal: 0.0,
            visibility: 1.0,
            dynamical: 0.0,
            geometric: 0.0,
            geometric_wrapped: 0.0,
            t: 0.0,
            dt,
        }
    }
}

/// Evolves `rho0` to `t` with step `dt` and decomposes the total phase into
/// its dynamical and geometric parts.
pub fn phase_report(model: &LindbladModel, rho0: &DensityMatrix, t: f64, dt: f64) -> Result<PhaseReport> {
    ensure_dim(rho0.matrix(), model.dim())?;
    if t == 0.0 {
        return Ok(PhaseReport::at_origin(dt));
    }
    let traj = evolve(model, rho0, t, dt)?;
    phase_report_on(model, rho0, &traj)
}

/// [`phase_report`] on an already integrated trajectory.
pub fn phase_report_on(model: &LindbladModel, rho0: &DensityMatrix, traj: &Trajectory) -> Result<PhaseReport> {
    let t = traj.final_time();
    let steps = traj.len() - 1;
    if steps == 0 {
        return Ok(PhaseReport::at_origin(0.0));
    }
    let curve = phase_curve(model, rho0, t, steps)?;
    let endpoint = pancharatnam(model, rho0, t)?;
    // snap the unwrapped endpoint onto the branch of the directly computed value
    let branch = ((curve.final_phase() - endpoint.phase) / TAU).round();
    let total = endpoint.phase + branch * TAU;
    let dynamical = dynamical_phase(model, traj)?;
    let geometric = total - dynamical;
    Ok(PhaseReport {
        total,
        total_principal: endpoint.phase,
        visibility: endpoint.visibility,
        dynamical,
        geometric,
        geometric_wrapped: wrap_phase(geometric),
        t,
        dt: t / steps as f64,
    })
}

/// Result of [`parallel_transport_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelTransportReport {
    /// `max_τ |tr[Hρ(τ)]|` on the trajectory grid.
    pub max_abs_energy: f64,
    /// Whether the necessary condition `tr[Hρ(τ)] = 0` holds within tolerance.
    /// Passing does not establish parallel transport.
    pub pass: bool,
    pub tol: f64,
}

impl ParallelTransportReport {
    pub const CAVEAT: &'static str = "tr[H rho(tau)] = 0 is necessary but not sufficient for parallel transport";
}

impl fmt::Display for ParallelTransportReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: max |tr[H rho]| = {:.3e} (tol {:.1e}); {}",
            if self.pass { "pass" } else { "fail" },
            self.max_abs_energy,
            self.tol,
            Self::CAVEAT
        )
    }
}

pub fn parallel_transport_check(model: &LindbladModel, traj: &Trajectory, tol: f64) -> Result<ParallelTransportReport> {
    let mut max_abs_energy: f64 = 0.0;
    for rho in traj.states() {
        ensure_dim(rho.matrix(), model.dim())?;
        max_abs_energy = max_abs_energy.max(rho.expectation(model.hamiltonian()).re.abs());
    }
    Ok(ParallelTransportReport {
        max_abs_energy,
        pass: max_abs_energy <= tol,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_element(2, 2, c(0.5, 0.0))).unwrap()
    }

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_phase(0.3 + 4.0 * TAU) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn unwrap_follows_nearest_branch() {
        let true_phase: Vec<f64> = (0..200).map(|i| -0.05 * i as f64).collect();
        let principal: Vec<f64> = true_phase.iter().map(|&x| wrap_phase(x)).collect();
        let lifted = unwrap_phases(&principal).unwrap();
        for (a, b) in lifted.iter().zip(&true_phase) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn unwrap_rejects_large_jumps() {
        let err = unwrap_phases(&[0.0, 0.1, 2.0]).unwrap_err();
        assert!(matches!(err, Error::GridTooCoarse { index: 1, .. }));
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let f = |x: f64| 2.0 * x * x * x - x + 1.0;
        let exact = |x: f64| 0.5 * x.powi(4) - 0.5 * x * x + x;
        let h = 0.25;
        let even: Vec<f64> = (0..=8).map(|i| f(i as f64 * h)).collect();
        assert!((simpson(&even, h) - exact(2.0)).abs() < 1e-13);
        // odd count: the trapezoid tail is only second order
        let odd: Vec<f64> = (0..=3).map(|i| i as f64 * 0.01).collect();
        assert!((simpson(&odd, 0.01) - 0.00045).abs() < 1e-15);
    }

    #[test]
    fn origin_report() {
        let model = LindbladModel::unitary(sigma_z(), 1.0).unwrap();
        let p = pancharatnam(&model, &plus(), 0.0).unwrap();
        assert_eq!((p.phase, p.visibility), (0.0, 1.0));
        let r = phase_report(&model, &plus(), 0.0, 1e-3).unwrap();
        assert_eq!(r.total, 0.0);
        assert_eq!(r.dynamical, 0.0);
        assert_eq!(r.geometric, 0.0);
        assert_eq!(r.visibility, 1.0);
    }

    #[test]
    fn nodal_point_is_an_error() {
        // tr[exp(−iσ_z t)|+⟩⟨+|] = cos t vanishes at t = π/2
        let model = LindbladModel::unitary(sigma_z(), 1.0).unwrap();
        let err = pancharatnam(&model, &plus(), PI / 2.0).unwrap_err();
        assert!(matches!(err, Error::NodalPoint { .. }));
        assert!(err.is_domain_error());
    }

    #[test]
    fn free_evolution_has_flat_curve() {
        let model = LindbladModel::unitary(ComplexMatrix::zeros(2, 2), 1.0).unwrap();
        let curve = phase_curve(&model, &plus(), 3.0, 30).unwrap();
        assert!(curve.total_unwrapped.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn constant_energy_gives_linear_dynamical_phase() {
        let model = LindbladModel::unitary(sigma_z(), 1.0).unwrap();
        let ground = DensityMatrix::basis(2, 0).unwrap();
        let traj = evolve(&model, &ground, 2.5, 1e-2).unwrap();
        assert!((dynamical_phase(&model, &traj).unwrap() + 2.5).abs() < 1e-12);

        let zero = LindbladModel::unitary(ComplexMatrix::zeros(2, 2), 1.0).unwrap();
        let traj = evolve(&zero, &ground, 1.0, 0.1).unwrap();
        assert_eq!(dynamical_phase(&zero, &traj).unwrap(), 0.0);
    }

    #[test]
    fn parallel_transport_examples() {
        let zero = LindbladModel::unitary(ComplexMatrix::zeros(2, 2), 1.0).unwrap();
        let traj = evolve(&zero, &plus(), 1.0, 0.1).unwrap();
        let r = parallel_transport_check(&zero, &traj, 1e-12).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_abs_energy, 0.0);
        assert!(r.to_string().contains("necessary"));

        let model = LindbladModel::unitary(sigma_z(), 1.0).unwrap();
        let traj = evolve(&model, &plus(), 1.0, 0.1).unwrap();
        assert!(parallel_transport_check(&model, &traj, 1e-10).unwrap().pass);

        let traj = evolve(&model, &DensityMatrix::basis(2, 0).unwrap(), 1.0, 0.1).unwrap();
        assert!(!parallel_transport_check(&model, &traj, 1e-10).unwrap().pass);
    }

    #[test]
    fn non_uniform_trajectory_is_rejected() {
        let model = LindbladModel::unitary(sigma_z(), 1.0).unwrap();
        let rho = plus();
        let traj = Trajectory::new(vec![0.0, 0.1, 0.3], vec![rho.clone(), rho.clone(), rho]).unwrap();
        assert!(matches!(dynamical_phase(&model, &traj), Err(Error::NonUniformGrid { index: 1 })));
    }
}

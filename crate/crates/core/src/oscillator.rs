//! Damped harmonic oscillator at zero temperature on a truncated Fock space.
//!
//! The mode obeys `dρ/dt = −iω[a†a, ρ] + k(2aρa† − a†aρ − ρa†a)`, i.e.
//! `H = ħω a†a` and a single jump operator `V = √(2k) a`. A coherent state
//! `|α⟩` stays coherent with amplitude `α(τ) = α e^{−(iω+k)τ}`, which gives
//! closed forms for every phase.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lindblad::LindbladModel;
use crate::numerics::{c, ComplexMatrix, DensityMatrix};

pub const MAX_LEAKAGE: f64 = 1e-10;

/// `⌈|α|² + 6|α| + 10⌉`.
pub fn default_cutoff(alpha: Complex64) -> usize {
    let r = alpha.norm();
    (r * r + 6.0 * r + 10.0).ceil() as usize
}

/// Poisson weights `e^{−|α|²}|α|^{2n}/n!` for `n < cutoff`.
fn poisson_weights(alpha: Complex64, cutoff: usize) -> Vec<f64> {
    let mean = alpha.norm_sqr();
    let mut w = Vec::with_capacity(cutoff);
    let mut term = (-mean).exp();
    for n in 0..cutoff {
        w.push(term);
        term *= mean / (n + 1) as f64;
    }
    w
}

/// Norm of `|α⟩` lost by truncating to the first `cutoff` Fock states.
pub fn truncation_leakage(alpha: Complex64, cutoff: usize) -> f64 {
    let kept: f64 = poisson_weights(alpha, cutoff).iter().sum();
    (1.0 - kept).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub alpha: Complex64,
    pub omega: f64,
    pub k: f64,
    pub cutoff: usize,
}

impl OscillatorParams {
    /// Parameters with the default cutoff rule.
    pub fn new(alpha: Complex64, omega: f64, k: f64) -> Result<Self> {
        Self::with_cutoff(alpha, omega, k, default_cutoff(alpha))
    }

    /// Parameters with an explicit cutoff. A cutoff below the default rule is
    /// accepted with a warning as long as the leakage bound holds.
    pub fn with_cutoff(alpha: Complex64, omega: f64, k: f64, cutoff: usize) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: "must be finite".into(),
            });
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter {
                name: "omega",
                reason: format!("must be positive, got {omega}"),
            });
        }
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: format!("must be non-negative, got {k}"),
            });
        }
        if cutoff < 2 {
            return Err(Error::InvalidParameter {
                name: "cutoff",
                reason: format!("must be at least 2, got {cutoff}"),
            });
        }
        let leakage = truncation_leakage(alpha, cutoff);
        if leakage > MAX_LEAKAGE {
            return Err(Error::CutoffTooSmall { cutoff, leakage });
        }
        let rule = default_cutoff(alpha);
        if cutoff < rule {
            log::warn!("fock cutoff {cutoff} is below the default rule {rule} for |alpha| = {}", alpha.norm());
        }
        Ok(Self { alpha, omega, k, cutoff })
    }

    /// `α(τ) = α e^{−(iω+k)τ}`.
    pub fn amplitude(&self, tau: f64) -> Complex64 {
        self.alpha * (c(-self.k, -self.omega) * tau).exp()
    }
}

/// Truncated ladder operators.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperators {
    pub annihilation: ComplexMatrix,
    pub creation: ComplexMatrix,
    pub number: ComplexMatrix,
}

pub fn fock_operators(cutoff: usize) -> Result<FockOperators> {
    if cutoff < 2 {
        return Err(Error::InvalidParameter {
            name: "cutoff",
            reason: format!("must be at least 2, got {cutoff}"),
        });
    }
    let annihilation = ComplexMatrix::from_fn(cutoff, cutoff, |i, j| {
        if j == i + 1 {
            c((j as f64).sqrt(), 0.)
        } else {
            c(0., 0.)
        }
    });
    let creation = annihilation.adjoint();
    let number = ComplexMatrix::from_diagonal(&DVector::from_fn(cutoff, |n, _| c(n as f64, 0.)));
    Ok(FockOperators {
        annihilation,
        creation,
        number,
    })
}

/// Normalized truncated coherent state `|α⟩⟨α|`.
pub fn coherent_state(alpha: Complex64, cutoff: usize) -> Result<DensityMatrix> {
    let leakage = truncation_leakage(alpha, cutoff);
    if leakage > MAX_LEAKAGE {
        return Err(Error::CutoffTooSmall { cutoff, leakage });
    }
    // amplitudes α^n/√n! built recursively to avoid factorial overflow
    let mut psi = DVector::zeros(cutoff);
    let mut amp = c((-0.5 * alpha.norm_sqr()).exp(), 0.);
    for n in 0..cutoff {
        psi[n] = amp;
        amp = amp * alpha / ((n + 1) as f64).sqrt();
    }
    DensityMatrix::pure(&psi)
}

/// `H = ħω a†a`, `V = √(2k) a`.
pub fn damped_model(p: &OscillatorParams, hbar: f64) -> Result<LindbladModel> {
    let ops = fock_operators(p.cutoff)?;
    let h = &ops.number * c(hbar * p.omega, 0.);
    let v = &ops.annihilation * c((2.0 * p.k).sqrt(), 0.);
    LindbladModel::new(h, vec![v], hbar)
}

/// Closed-form phases of the coherent-state evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticPhases {
    /// `−|α|² e^{−kt} sin ωt`.
    pub total: f64,
    /// `−(ω/2k)|α|²(1 − e^{−2kt})`, or `−ω|α|²t` when `k = 0`.
    pub dynamical: f64,
    pub geometric: f64,
}

pub fn analytic_phases(p: &OscillatorParams, t: f64) -> AnalyticPhases {
    let n = p.alpha.norm_sqr();
    let total = -n * (-p.k * t).exp() * (p.omega * t).sin();
    // (1 − e^{−2kt})/(2k) without cancellation, with its k → 0 limit t
    let decay_time = if p.k == 0.0 {
        t
    } else {
        -(-2.0 * p.k * t).exp_m1() / (2.0 * p.k)
    };
    let dynamical = -p.omega * n * decay_time;
    AnalyticPhases {
        total,
        dynamical,
        geometric: total - dynamical,
    }
}

/// Local-oscillator amplitude of a homodyne measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneShift {
    pub beta: Complex64,
}

/// `H' = H − (iħ/2) Σ_n (β* V_n − β V_n†)`, `V_n' = V_n + β`.
///
/// The master equation is unchanged. The single-jump case is the physical
/// one; with several jump operators each is shifted by the same `β`.
pub fn homodyne_transform(model: &LindbladModel, shift: HomodyneShift) -> Result<LindbladModel> {
    if model.jump_ops().len() != 1 {
        log::warn!(
            "homodyne shift applied to {} jump operators; only the single-channel case is standard",
            model.jump_ops().len()
        );
    }
    let beta = shift.beta;
    let n = model.dim();
    let identity = ComplexMatrix::identity(n, n);
    let mut h = model.hamiltonian().clone();
    let mut jumps = Vec::with_capacity(model.jump_ops().len());
    for v in model.jump_ops() {
        h -= (v * beta.conj() - v.adjoint() * beta) * c(0., 0.5 * model.hbar());
        jumps.push(v + &identity * beta);
    }
    // the correction is Hermitian analytically; drop rounding asymmetry
    let h = crate::numerics::hermitian_part(&h);
    LindbladModel::new(h, jumps, model.hbar())
}

/// Signed area enclosed by the amplitude spiral `α(τ)`, `τ ∈ [0, t]`, closed
/// by the chord from `α(t)` back to `α`. Counterclockwise is positive.
///
/// The spiral is sampled at `n_samples + 1` uniform times and the area is
/// taken with the shoelace rule.
pub fn spiral_area(p: &OscillatorParams, t: f64, n_samples: usize) -> Result<f64> {
    if n_samples < 100 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            reason: format!("must be at least 100, got {n_samples}"),
        });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("must be non-negative, got {t}"),
        });
    }
    let points: Vec<Complex64> = (0..=n_samples)
        .map(|j| p.amplitude(t * j as f64 / n_samples as f64))
        .collect();
    // closing edge back to the first point is the chord
    let twice_area: f64 = points
        .iter()
        .zip(points.iter().cycle().skip(1))
        .map(|(a, b)| a.re * b.im - b.re * a.im)
        .sum();
    Ok(0.5 * twice_area)
}

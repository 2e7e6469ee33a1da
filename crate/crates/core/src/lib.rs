//! Phases of density matrices under completely positive, non-unitary
//! (Lindblad) evolution.
//!
//! The crate computes the total phase `arg tr[S(t)ρ0]` and visibility
//! `|tr[S(t)ρ0]|` of a mixed state, splits the total phase into dynamical and
//! geometric parts, and simulates the meter-augmented Mach-Zehnder
//! interferometer whose detector reads those quantities off as a fringe
//! shift and contrast.
//!
//! Modules, bottom up:
//!
//! - [`numerics`]: dense complex matrices, matrix exponential, density checks.
//! - [`lindblad`]: master equation, integrator, Kraus sets and their dilation.
//! - [`phase`]: total, dynamical and geometric phases.
//! - [`interferometer`]: gate-level and block-level interferometer output.
//! - [`oscillator`]: the damped harmonic oscillator with closed-form phases.

pub mod error;
pub mod interferometer;
pub mod lindblad;
pub mod numerics;
pub mod oscillator;
pub mod phase;

pub use error::{Error, Result};
pub use lindblad::{KrausSet, LindbladModel, MeasurementSchedule, Trajectory};
pub use numerics::{ComplexMatrix, DensityMatrix};
pub use oscillator::{AnalyticPhases, HomodyneShift, OscillatorParams};
pub use phase::{PhaseCurve, PhaseReport};

pub use num_complex::Complex64;

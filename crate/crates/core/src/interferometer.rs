//! Mach-Zehnder interferometer with a meter in arm 1.
//!
//! The composite space is path ⊗ internal ⊗ probe, indexed in that order.
//! The beam enters arm 0; the detector measures arm 0 after the second beam
//! splitter.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lindblad::{effective_propagator, evolve_final, Dilation, KrausSet, LindbladModel};
use crate::numerics::{c, ensure_dim, hermitian_part, kron, unitarity_defect, ComplexMatrix, DensityMatrix};
use crate::phase::wrap_phase;

const UNITARY_TOL: f64 = 1e-10;
const POINTER_TOL: f64 = 1e-12;
/// Integration step used by [`output_state`].
pub const DEFAULT_OUTPUT_DT: f64 = 1e-3;

fn m2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[a, b, cc, d])
}

/// Mirror pair `[[0, i], [i, 0]]`.
pub fn mirror() -> ComplexMatrix {
    m2(c(0., 0.), c(0., 1.), c(0., 1.), c(0., 0.))
}

/// Balanced beam splitter `[[1, i], [i, 1]]/√2`.
pub fn beam_splitter() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    m2(c(s, 0.), c(0., s), c(0., s), c(s, 0.))
}

/// U(1) shift `diag(e^{iχ}, 1)` on arm 0.
pub fn phase_shift(chi: f64) -> ComplexMatrix {
    m2(Complex64::from_polar(1.0, chi), c(0., 0.), c(0., 0.), c(1., 0.))
}

fn projector(arm: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(2, 2);
    p[(arm, arm)] = c(1., 0.);
    p
}

/// Path state at the detector for the interferometer without internal
/// degrees of freedom.
pub fn bare_output(chi: f64) -> ComplexMatrix {
    let u = beam_splitter() * mirror() * phase_shift(chi) * beam_splitter();
    &u * projector(0) * u.adjoint()
}

/// `⟨0̃|ρ̃_out|0̃⟩ = ½(1 + cos χ)`.
pub fn bare_intensity(chi: f64) -> f64 {
    bare_output(chi)[(0, 0)].re
}

/// Meter coupling and U(1) shift for one pass through the interferometer.
#[derive(Debug, Clone)]
pub struct InterferometerSetup {
    chi: f64,
    internal_dim: usize,
    probe_dim: usize,
    u_ip: ComplexMatrix,
    /// Columns are the pointer states `|ζ_n⟩`; column 0 is quiescent.
    pointer_basis: ComplexMatrix,
}

impl InterferometerSetup {
    /// Setup whose pointer basis is the probe's computational basis.
    pub fn new(chi: f64, u_ip: ComplexMatrix, internal_dim: usize, probe_dim: usize) -> Result<Self> {
        Self::with_pointer_basis(chi, u_ip, internal_dim, ComplexMatrix::identity(probe_dim, probe_dim))
    }

    pub fn with_pointer_basis(
        chi: f64,
        u_ip: ComplexMatrix,
        internal_dim: usize,
        pointer_basis: ComplexMatrix,
    ) -> Result<Self> {
        let probe_dim = pointer_basis.ncols();
        if internal_dim == 0 || probe_dim == 0 {
            return Err(Error::InvalidParameter {
                name: "setup",
                reason: "internal and probe dimensions must be positive".into(),
            });
        }
        ensure_dim(&u_ip, internal_dim * probe_dim)?;
        ensure_dim(&pointer_basis, probe_dim)?;
        let defect = unitarity_defect(&u_ip);
        if defect > UNITARY_TOL {
            return Err(Error::NonUnitary { defect });
        }
        let basis_defect = unitarity_defect(&pointer_basis);
        if basis_defect > POINTER_TOL {
            return Err(Error::InvalidParameter {
                name: "pointer_basis",
                reason: format!("not orthonormal (defect {basis_defect:.3e})"),
            });
        }
        if !chi.is_finite() {
            return Err(Error::InvalidParameter {
                name: "chi",
                reason: format!("must be finite, got {chi}"),
            });
        }
        Ok(Self {
            chi,
            internal_dim,
            probe_dim,
            u_ip,
            pointer_basis,
        })
    }

    pub fn from_dilation(dilation: &Dilation, chi: f64) -> Result<Self> {
        Self::new(chi, dilation.unitary().clone(), dilation.internal_dim(), dilation.probe_dim())
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    pub fn probe_dim(&self) -> usize {
        self.probe_dim
    }

    pub fn u_ip(&self) -> &ComplexMatrix {
        &self.u_ip
    }

    pub fn pointer_state(&self, n: usize) -> DVector<Complex64> {
        self.pointer_basis.column(n).into_owned()
    }

    /// `W_n = ⟨ζ_n|U_ip|ζ_0⟩` for every pointer state.
    pub fn measurement_ops(&self) -> Vec<ComplexMatrix> {
        let (d, m) = (self.internal_dim, self.probe_dim);
        let zeta0 = self.pointer_state(0);
        (0..m)
            .map(|n| {
                let zeta_n = self.pointer_state(n);
                ComplexMatrix::from_fn(d, d, |i, j| {
                    let mut sum = c(0., 0.);
                    for a in 0..m {
                        for b in 0..m {
                            sum += zeta_n[a].conj() * self.u_ip[(i * m + a, j * m + b)] * zeta0[b];
                        }
                    }
                    sum
                })
            })
            .collect()
    }
}

/// `U = |1̃⟩⟨1̃| ⊗ U_ip + e^{iχ}|0̃⟩⟨0̃| ⊗ 1_i ⊗ 1_p`, the evolution between
/// the beam splitters.
pub fn composed_evolution(setup: &InterferometerSetup) -> ComplexMatrix {
    let n = setup.internal_dim * setup.probe_dim;
    kron(&projector(1), &setup.u_ip)
        + kron(&projector(0), &ComplexMatrix::identity(n, n)) * Complex64::from_polar(1.0, setup.chi)
}

/// Full output state on path ⊗ internal ⊗ probe for input
/// `|0̃⟩⟨0̃| ⊗ ρ_i0 ⊗ |ζ_0⟩⟨ζ_0|`, before any probe readout.
pub fn simulate(setup: &InterferometerSetup, rho_i0: &DensityMatrix) -> Result<ComplexMatrix> {
    ensure_dim(rho_i0.matrix(), setup.internal_dim)?;
    let n = setup.internal_dim * setup.probe_dim;
    let lift = |g: ComplexMatrix| kron(&g, &ComplexMatrix::identity(n, n));
    let total = lift(beam_splitter()) * lift(mirror()) * composed_evolution(setup) * lift(beam_splitter());
    let zeta0 = setup.pointer_state(0);
    let input = kron(&kron(&projector(0), rho_i0.matrix()), &(&zeta0 * zeta0.adjoint()));
    Ok(&total * input * total.adjoint())
}

/// Partial trace over the probe of a path ⊗ internal ⊗ probe operator.
pub fn trace_out_probe(full: &ComplexMatrix, probe_dim: usize) -> ComplexMatrix {
    let outer = full.nrows() / probe_dim;
    ComplexMatrix::from_fn(outer, outer, |r, s| {
        (0..probe_dim).map(|k| full[(r * probe_dim + k, s * probe_dim + k)]).sum()
    })
}

/// `⟨ζ|X|ζ⟩` over the probe factor, unnormalized.
pub fn project_probe(full: &ComplexMatrix, zeta: &DVector<Complex64>) -> ComplexMatrix {
    let m = zeta.len();
    let outer = full.nrows() / m;
    ComplexMatrix::from_fn(outer, outer, |r, s| {
        let mut sum = c(0., 0.);
        for a in 0..m {
            for b in 0..m {
                sum += zeta[a].conj() * full[(r * m + a, s * m + b)] * zeta[b];
            }
        }
        sum
    })
}

/// χ-dependent detector intensity of the null outcome:
/// `constant + amplitude·cos(χ − phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullOutcome {
    /// `¼[1 + tr(W_0†W_0 ρ)]`.
    pub constant: f64,
    /// `½ν₀` with `ν₀ = |tr(W_0 ρ)|`.
    pub amplitude: f64,
    /// `φ₀ = arg tr(W_0 ρ)`.
    pub phase: f64,
}

impl NullOutcome {
    pub fn visibility(&self) -> f64 {
        2.0 * self.amplitude
    }

    pub fn at(&self, chi: f64) -> f64 {
        self.constant + self.amplitude * (chi - self.phase).cos()
    }
}

/// Normalized detection probabilities for each pointer outcome of one
/// generalized measurement in arm 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectiveIntensities {
    pub null: NullOutcome,
    /// `(n, ¼ tr(W_n†W_n ρ))` for `n ≥ 1`; independent of χ.
    pub others: Vec<(usize, f64)>,
}

impl SelectiveIntensities {
    /// `(n, I_n(χ))` for every outcome, null first.
    pub fn at(&self, chi: f64) -> Vec<(usize, f64)> {
        std::iter::once((0, self.null.at(chi)))
            .chain(self.others.iter().copied())
            .collect()
    }

    /// Non-selective intensity `Σ_n I_n(χ)`.
    pub fn total_at(&self, chi: f64) -> f64 {
        self.null.at(chi) + self.others.iter().map(|(_, i)| i).sum::<f64>()
    }
}

pub fn selective_intensities(kraus: &KrausSet, rho_i0: &DensityMatrix) -> Result<SelectiveIntensities> {
    ensure_dim(rho_i0.matrix(), kraus.dim())?;
    let rho = rho_i0.matrix();
    let ops = kraus.ops();
    let w0_rho = (&ops[0] * rho).trace();
    let null = NullOutcome {
        constant: 0.25 * (1.0 + kraus.outcome_probability(0, rho_i0)),
        amplitude: 0.5 * w0_rho.norm(),
        phase: if w0_rho.norm() > 0.0 { wrap_phase(w0_rho.arg()) } else { 0.0 },
    };
    let others = (1..ops.len())
        .map(|n| (n, 0.25 * kraus.outcome_probability(n, rho_i0)))
        .collect();
    Ok(SelectiveIntensities { null, others })
}

/// The χ-independent ingredients of the detector state at time `t`:
/// `ρ_i(0)`, `ρ_i(t)` and `S(t)ρ_i(0)`.
#[derive(Debug, Clone)]
pub struct OutputBlocks {
    rho0: ComplexMatrix,
    rho_t: ComplexMatrix,
    s_rho0: ComplexMatrix,
}

impl OutputBlocks {
    pub fn prepare(model: &LindbladModel, rho_i0: &DensityMatrix, t: f64, dt: f64) -> Result<Self> {
        ensure_dim(rho_i0.matrix(), model.dim())?;
        let rho_t = evolve_final(model, rho_i0, t, dt.min(t))?;
        let s = effective_propagator(model, t)?;
        Ok(Self::from_parts(rho_i0, &rho_t, &s))
    }

    /// Blocks from an arbitrary no-jump operator `S` and non-selective image
    /// `ρ_t`, e.g. `W_0` and `Σ W_n ρ W_n†` for a single measurement.
    pub fn from_parts(rho0: &DensityMatrix, rho_t: &DensityMatrix, s: &ComplexMatrix) -> Self {
        Self {
            rho0: rho0.matrix().clone(),
            rho_t: rho_t.matrix().clone(),
            s_rho0: s * rho0.matrix(),
        }
    }

    /// Assembles the path ⊗ internal detector state for shift `χ`.
    pub fn assemble(&self, chi: f64) -> DensityMatrix {
        let e = Complex64::from_polar(1.0, chi);
        let ec = e.conj();
        let i = c(0., 1.);
        let one = c(1., 0.);
        let direct0 = m2(one, i, -i, one);
        let cross_dag = m2(e, -i * e, -i * e, -e);
        let cross = m2(ec, i * ec, i * ec, -ec);
        let direct_t = m2(one, -i, i, one);
        let rho0_s_dag = self.s_rho0.adjoint();
        let out = (kron(&direct0, &self.rho0)
            + kron(&cross_dag, &rho0_s_dag)
            + kron(&cross, &self.s_rho0)
            + kron(&direct_t, &self.rho_t))
            * c(0.25, 0.);
        DensityMatrix::from_trusted(hermitian_part(&out))
    }
}

/// Detector state on path ⊗ internal after evolution for time `t` in arm 1,
/// integrating `ρ_i(t)` with [`DEFAULT_OUTPUT_DT`].
pub fn output_state(model: &LindbladModel, rho_i0: &DensityMatrix, t: f64, chi: f64) -> Result<DensityMatrix> {
    output_state_with_step(model, rho_i0, t, chi, DEFAULT_OUTPUT_DT)
}

pub fn output_state_with_step(
    model: &LindbladModel,
    rho_i0: &DensityMatrix,
    t: f64,
    chi: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    Ok(OutputBlocks::prepare(model, rho_i0, t, dt)?.assemble(chi))
}

/// Intensity at the detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorReading {
    /// `tr[(|0̃⟩⟨0̃| ⊗ 1) ρ_out]`.
    pub raw: f64,
    /// `raw` relative to the bare interferometer at χ = 0.
    pub normalized: f64,
}

pub fn detector_intensity(rho_out: &DensityMatrix) -> Result<DetectorReading> {
    let n = rho_out.dim();
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter {
            name: "rho_out",
            reason: format!("dimension {n} is not path (2) times internal"),
        });
    }
    let d = n / 2;
    let raw = rho_out.matrix().view((0, 0), (d, d)).trace().re;
    Ok(DetectorReading {
        raw,
        normalized: raw / bare_intensity(0.0),
    })
}

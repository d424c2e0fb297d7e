//! Piecewise-constant control dynamics with optional Lindblad decoherence.
//!
//! The control Hamiltonian for segment `i` is
//! `H = ω (cos φ_i Fx + sin φ_i Fy) + χ Fx²`: a Larmor term from a field of
//! fixed magnitude rotating in the x–y plane plus the nonlinear light-shift
//! term that makes the dynamics controllable.

mod history;
mod lindblad;
mod timeline;

pub use history::{heisenberg_history, ObservableHistory};
pub use lindblad::{lindblad_superoperator, JumpOperators};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RVector};
use crate::rng::{CounterRng, STREAM_PHASES};
use crate::spin::{DensityMatrix, HermitianBasis, SpinSystem};

use timeline::Timeline;

/// Piecewise-constant control schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlWaveform {
    /// Field angle in the x–y plane for each segment (radians).
    pub phi: Vec<f64>,
    /// Segment duration (s).
    pub dt: f64,
    /// Larmor rate of the control field (rad/s).
    pub omega_larmor: f64,
    /// Strength of the `Fx²` term (rad/s).
    pub chi: f64,
    /// Decoherence rate (1/s) multiplying every jump operator.
    pub gamma_dec: f64,
    pub jumps: JumpOperators,
}

impl ControlWaveform {
    pub const DEFAULT_SEGMENTS: usize = 30;
    pub const DEFAULT_DT: f64 = 50e-6;
    pub const DEFAULT_OMEGA: f64 = 1e5;
    pub const DEFAULT_CHI: f64 = 3e4;
    pub const DEFAULT_GAMMA: f64 = 10.0;

    /// Default schedule: 30 segments of 50 μs with random field angles, weak
    /// isotropic decoherence.
    pub fn standard(seed: u64) -> Self {
        Self {
            phi: Self::random_phases(Self::DEFAULT_SEGMENTS, seed),
            dt: Self::DEFAULT_DT,
            omega_larmor: Self::DEFAULT_OMEGA,
            chi: Self::DEFAULT_CHI,
            gamma_dec: Self::DEFAULT_GAMMA,
            jumps: JumpOperators::Isotropic,
        }
    }

    pub fn n_steps(&self) -> usize {
        self.phi.len()
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.phi.len() as f64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Validation(msg.to_string()));
        if self.phi.is_empty() {
            return bad("waveform needs at least one segment");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("segment duration dt must be positive");
        }
        if !(self.omega_larmor >= 0.0 && self.omega_larmor.is_finite()) {
            return bad("omega_larmor must be nonnegative");
        }
        if !(self.chi >= 0.0 && self.chi.is_finite()) {
            return bad("chi must be nonnegative");
        }
        if !(self.gamma_dec >= 0.0 && self.gamma_dec.is_finite()) {
            return bad("gamma_dec must be nonnegative");
        }
        if self.phi.iter().any(|p| !p.is_finite()) {
            return bad("field angles must be finite");
        }
        Ok(())
    }

    /// Uniform random field angles in `[0, 2π)` drawn from `seed`.
    pub fn random_phases(n_steps: usize, seed: u64) -> Vec<f64> {
        let rng = CounterRng::new(seed, STREAM_PHASES);
        (0..n_steps as u64)
            .map(|i| std::f64::consts::TAU * rng.uniform(i))
            .collect()
    }

    /// Copy with the Larmor and nonlinear rates multiplied by calibration factors.
    pub fn scaled(&self, omega_scale: f64, chi_scale: f64) -> Self {
        Self {
            omega_larmor: self.omega_larmor * omega_scale,
            chi: self.chi * chi_scale,
            ..self.clone()
        }
    }

    /// Same segments played in reverse order.
    pub fn time_reversed(&self) -> Self {
        let mut phi = self.phi.clone();
        phi.reverse();
        Self { phi, ..self.clone() }
    }

    pub(crate) fn is_dissipative(&self) -> bool {
        self.gamma_dec > 0.0 && !self.jumps.is_empty()
    }
}

/// How the waveform is coarse-grained into measurement samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPlan {
    /// Number of samples `N`; sample `i` is taken at `t_i = i·T/N`.
    pub n_samples: usize,
    /// Propagation pieces per sample interval.
    pub substeps: usize,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            n_samples: 150,
            substeps: 4,
        }
    }
}

impl SamplingPlan {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Validation("n_samples must be at least 1".into()));
        }
        if self.substeps == 0 {
            return Err(Error::Validation("substeps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn sample_times(&self, duration: f64) -> Vec<f64> {
        (0..self.n_samples)
            .map(|i| i as f64 * duration / self.n_samples as f64)
            .collect()
    }
}

/// Hamiltonian of segment `step`.
pub fn step_hamiltonian(sys: &SpinSystem, wf: &ControlWaveform, step: usize) -> Result<CMatrix> {
    let phi = *wf.phi.get(step).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "segment {step} out of range (waveform has {})",
            wf.n_steps()
        ))
    })?;
    let field = sys.fx().scale(phi.cos()) + sys.fy().scale(phi.sin());
    Ok(field.scale(wf.omega_larmor) + (sys.fx() * sys.fx()).scale(wf.chi))
}

/// `U = exp(−iH·dt)` for Hermitian `H`.
pub fn step_propagator(h: &CMatrix, dt: f64) -> Result<CMatrix> {
    linalg::ensure_hermitian(h, 1e-10)?;
    Ok(linalg::expm_hermitian(h, dt))
}

/// Schrödinger-picture states at every sample time `t_0 … t_{N−1}`.
pub fn propagate_state(
    rho0: &DensityMatrix,
    sys: &SpinSystem,
    wf: &ControlWaveform,
    plan: &SamplingPlan,
) -> Result<Vec<DensityMatrix>> {
    wf.validate()?;
    plan.validate()?;
    linalg::ensure_dim(rho0.matrix(), sys.dim())?;
    let basis = HermitianBasis::new(sys.dim());
    let timeline = Timeline::new(wf, plan);
    let mut cache = timeline::SuperopCache::new(sys, wf, &basis)?;

    let mut x: RVector = basis.coords_unchecked(rho0.matrix());
    let mut out = Vec::with_capacity(plan.n_samples);
    out.push(rho0.clone());
    for interval in timeline.intervals().iter().take(plan.n_samples - 1) {
        for piece in interval {
            x = cache.exp(piece.segment, piece.duration) * x;
        }
        out.push(DensityMatrix::assume_physical(basis.matrix_unchecked(x.as_slice())));
    }
    Ok(out)
}

/// Total unitary of a dissipation-free waveform, `U(T)`.
pub fn evolution_unitary(sys: &SpinSystem, wf: &ControlWaveform) -> Result<CMatrix> {
    wf.validate()?;
    let mut u = linalg::identity(sys.dim());
    for step in 0..wf.n_steps() {
        u = step_propagator(&step_hamiltonian(sys, wf, step)?, wf.dt)? * u;
    }
    Ok(u)
}

/// Undoes [`evolution_unitary`] by playing the segments backwards in time.
pub fn reverse_evolution_unitary(sys: &SpinSystem, wf: &ControlWaveform) -> Result<CMatrix> {
    wf.validate()?;
    let mut u = linalg::identity(sys.dim());
    for step in (0..wf.n_steps()).rev() {
        u = step_propagator(&step_hamiltonian(sys, wf, step)?, -wf.dt)? * u;
    }
    Ok(u)
}

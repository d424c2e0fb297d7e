#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::DVector;
use num_complex::Complex64;
use spin_tomography::design::{optimize_waveform, DesignOptions};
use spin_tomography::dynamics::{step_hamiltonian, ControlWaveform, JumpOperators, SamplingPlan};
use spin_tomography::linalg::CMatrix;
use spin_tomography::spin::{DensityMatrix, SpinSystem, TestState};

pub fn f3() -> SpinSystem {
    SpinSystem::new(3.0).unwrap()
}

/// Seed of the default random field-angle schedule.
pub const WAVEFORM_SEED: u64 = 7;

/// The default schedule after a budget-200 design pass, with decoherence `gamma`.
pub fn designed_waveform(gamma: f64) -> ControlWaveform {
    let sys = f3();
    let template = ControlWaveform::standard(WAVEFORM_SEED);
    let out = optimize_waveform(
        &sys,
        &template,
        &SamplingPlan::default(),
        200,
        WAVEFORM_SEED,
        &DesignOptions::default(),
    )
    .unwrap();
    ControlWaveform {
        gamma_dec: gamma,
        jumps: if gamma > 0.0 { JumpOperators::Isotropic } else { JumpOperators::None },
        ..out.waveform
    }
}

pub fn reference_states(sys: &SpinSystem) -> Vec<(String, DensityMatrix)> {
    TestState::reference_set(sys)
        .into_iter()
        .map(|s| (s.label(), s.prepare(sys).unwrap()))
        .collect()
}

/// Column-stacked Liouvillian, `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.
pub fn vec_liouvillian(h: &CMatrix, gamma: f64, jumps: &[CMatrix]) -> CMatrix {
    let d = h.nrows();
    let id = CMatrix::identity(d, d);
    let mut l = (id.kronecker(h) - h.transpose().kronecker(&id)) * Complex64::new(0.0, -1.0);
    for a in jumps {
        let ada = a.adjoint() * a;
        l += (a.conjugate().kronecker(a) - id.kronecker(&ada).scale(0.5) - ada.transpose().kronecker(&id).scale(0.5))
            .scale(gamma);
    }
    l
}

/// `Tr[O ρ(t)]` at each time by exponentiating the vectorized master equation
/// segment by segment.
pub struct VecOracle {
    sys: SpinSystem,
    wf: ControlWaveform,
    generators: Vec<CMatrix>,
    cache: HashMap<(usize, u64), CMatrix>,
}

impl VecOracle {
    pub fn new(sys: &SpinSystem, wf: &ControlWaveform) -> Self {
        let jumps = if wf.gamma_dec > 0.0 { wf.jumps.operators(sys).unwrap() } else { Vec::new() };
        let generators = (0..wf.n_steps())
            .map(|k| vec_liouvillian(&step_hamiltonian(sys, wf, k).unwrap(), wf.gamma_dec, &jumps))
            .collect();
        Self {
            sys: sys.clone(),
            wf: wf.clone(),
            generators,
            cache: HashMap::new(),
        }
    }

    fn propagator(&mut self, seg: usize, tau: f64) -> &CMatrix {
        let g = &self.generators[seg];
        self.cache
            .entry((seg, tau.to_bits()))
            .or_insert_with(|| (g * Complex64::new(tau, 0.0)).exp())
    }

    pub fn expectations(&mut self, rho0: &CMatrix, o: &CMatrix, times: &[f64]) -> Vec<f64> {
        let d = self.sys.dim();
        let dt = self.wf.dt;
        let mut v = DVector::from_column_slice(rho0.as_slice());
        let mut now = 0.0;
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            while t - now > 1e-15 {
                let seg = (((now / dt) + 1e-9).floor() as usize).min(self.wf.n_steps() - 1);
                let end = ((seg + 1) as f64 * dt).min(t);
                let u = self.propagator(seg, end - now).clone();
                v = u * v;
                now = end;
            }
            let rho = CMatrix::from_column_slice(d, d, v.as_slice());
            out.push((o * rho).trace().re);
        }
        out
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    (p0, p1) = (p1, ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf);
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

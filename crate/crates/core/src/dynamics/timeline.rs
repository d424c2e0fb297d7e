//! Splitting of the sampling grid into constant-Hamiltonian pieces.

use std::collections::HashMap;

use super::{lindblad_superoperator, step_hamiltonian, ControlWaveform, SamplingPlan};
use crate::error::Result;
use crate::linalg::{self, CMatrix, RMatrix};
use crate::spin::{HermitianBasis, SpinSystem};

#[derive(Debug, Clone, Copy)]
pub(crate) struct Piece {
    pub segment: usize,
    pub duration: f64,
}

/// Pieces of every sample interval `[t_i, t_{i+1}]`, `i = 0 … N−1`.
pub(crate) struct Timeline {
    intervals: Vec<Vec<Piece>>,
}

impl Timeline {
    pub fn new(wf: &ControlWaveform, plan: &SamplingPlan) -> Self {
        let total = wf.duration();
        let parts = plan.n_samples * plan.substeps;
        let at = |k: usize| total * k as f64 / parts as f64;
        let eps = 1e-12 * total;
        let last = wf.n_steps() - 1;

        let intervals = (0..plan.n_samples)
            .map(|i| {
                let mut pieces = Vec::new();
                for s in 0..plan.substeps {
                    let k = i * plan.substeps + s;
                    let (start, end) = (at(k), at(k + 1));
                    let mut cur = start;
                    while end - cur > eps {
                        let seg = ((cur / wf.dt + 1e-9).floor() as usize).min(last);
                        let seg_end = if seg == last {
                            end
                        } else {
                            ((seg + 1) as f64 * wf.dt).min(end)
                        };
                        if seg_end - cur > eps {
                            pieces.push(Piece {
                                segment: seg,
                                duration: seg_end - cur,
                            });
                        }
                        cur = seg_end.max(cur + eps);
                    }
                }
                pieces
            })
            .collect();
        Self { intervals }
    }

    pub fn intervals(&self) -> &[Vec<Piece>] {
        &self.intervals
    }
}

fn duration_key(duration: f64, total: f64) -> u64 {
    (duration / total * 1e13).round() as u64
}

/// Lazily computed `exp(G_seg τ)` for the coordinate-space Lindblad generators.
pub(crate) struct SuperopCache<'a> {
    sys: &'a SpinSystem,
    wf: &'a ControlWaveform,
    basis: &'a HermitianBasis,
    jumps: Vec<CMatrix>,
    generators: Vec<Option<RMatrix>>,
    exps: HashMap<(usize, u64), RMatrix>,
}

impl<'a> SuperopCache<'a> {
    pub fn new(sys: &'a SpinSystem, wf: &'a ControlWaveform, basis: &'a HermitianBasis) -> Result<Self> {
        let jumps = if wf.gamma_dec > 0.0 {
            wf.jumps.operators(sys)?
        } else {
            Vec::new()
        };
        Ok(Self {
            sys,
            wf,
            basis,
            jumps,
            generators: vec![None; wf.n_steps()],
            exps: HashMap::new(),
        })
    }

    pub fn exp(&mut self, segment: usize, duration: f64) -> &RMatrix {
        let key = (segment, duration_key(duration, self.wf.duration()));
        if !self.exps.contains_key(&key) {
            if self.generators[segment].is_none() {
                let h = step_hamiltonian(self.sys, self.wf, segment)
                    .expect("segment index comes from the timeline");
                let g = lindblad_superoperator(self.basis, &h, self.wf.gamma_dec, &self.jumps)
                    .expect("dimensions fixed by the spin system");
                self.generators[segment] = Some(g);
            }
            let g = self.generators[segment].as_ref().unwrap();
            self.exps.insert(key, (g * duration).exp());
        }
        &self.exps[&key]
    }
}

/// Lazily computed step unitaries for dissipation-free evolution.
pub(crate) struct UnitaryCache<'a> {
    sys: &'a SpinSystem,
    wf: &'a ControlWaveform,
    hamiltonians: Vec<Option<CMatrix>>,
    exps: HashMap<(usize, u64), CMatrix>,
}

impl<'a> UnitaryCache<'a> {
    pub fn new(sys: &'a SpinSystem, wf: &'a ControlWaveform) -> Self {
        Self {
            sys,
            wf,
            hamiltonians: vec![None; wf.n_steps()],
            exps: HashMap::new(),
        }
    }

    pub fn exp(&mut self, segment: usize, duration: f64) -> &CMatrix {
        let key = (segment, duration_key(duration, self.wf.duration()));
        if !self.exps.contains_key(&key) {
            if self.hamiltonians[segment].is_none() {
                self.hamiltonians[segment] = Some(
                    step_hamiltonian(self.sys, self.wf, segment)
                        .expect("segment index comes from the timeline"),
                );
            }
            let h = self.hamiltonians[segment].as_ref().unwrap();
            self.exps.insert(key, linalg::expm_hermitian(h, duration));
        }
        &self.exps[&key]
    }
}

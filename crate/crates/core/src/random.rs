//! Seeded random states, unitaries and Hermitian matrices.
//!
//! Used for randomized checks and for the sweep tooling; every draw is keyed
//! by an explicit seed through the counter-based generator.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::linalg::{self, CMatrix};
use crate::rng::CounterRng;
use crate::spin::DensityMatrix;

const STREAM_RANDOM: u64 = 0x72616e646f6d;

struct Normals {
    rng: CounterRng,
    next: u64,
}

impl Normals {
    fn new(seed: u64) -> Self {
        Self {
            rng: CounterRng::new(seed, STREAM_RANDOM),
            next: 0,
        }
    }

    fn real(&mut self) -> f64 {
        let v = self.rng.normal(self.next);
        self.next += 1;
        v
    }

    fn complex(&mut self) -> Complex64 {
        Complex64::new(self.real(), self.real())
    }

    fn ginibre(&mut self, rows: usize, cols: usize) -> CMatrix {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self.complex();
            }
        }
        m
    }
}

/// Haar-distributed unitary.
pub fn haar_unitary(d: usize, seed: u64) -> CMatrix {
    let g = Normals::new(seed).ginibre(d, d);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let phase = r[(j, j)] / r[(j, j)].norm();
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random pure state.
pub fn random_pure_state(d: usize, seed: u64) -> DensityMatrix {
    let mut n = Normals::new(seed);
    let psi = DVector::from_fn(d, |_, _| n.complex());
    DensityMatrix::pure(&psi).expect("Gaussian vector is nonzero")
}

/// Random mixed state `G G† / Tr[G G†]` with `G` a `d × rank` Ginibre matrix.
pub fn random_mixed_state(d: usize, rank: usize, seed: u64) -> DensityMatrix {
    let g = Normals::new(seed).ginibre(d, rank.max(1));
    let w = &g * g.adjoint();
    let t = linalg::trace(&w).re;
    DensityMatrix::assume_physical(w.unscale(t))
}

/// Random Hermitian matrix with Gaussian entries (GUE-like), scaled by `scale`.
pub fn random_hermitian(d: usize, scale: f64, seed: u64) -> CMatrix {
    let g = Normals::new(seed).ginibre(d, d);
    linalg::hermitian_part(&g).scale(scale)
}

/// Random Hermitian matrix with unit trace, generally not positive.
pub fn random_unit_trace_hermitian(d: usize, spread: f64, seed: u64) -> CMatrix {
    let mut h = random_hermitian(d, spread, seed);
    let shift = (1.0 - linalg::trace(&h).re) / d as f64;
    for i in 0..d {
        h[(i, i)] += Complex64::new(shift, 0.0);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary() {
        for seed in 0..5 {
            assert!(linalg::unitarity_defect(&haar_unitary(7, seed)) < 1e-12);
        }
    }

    #[test]
    fn random_states_are_physical() {
        for seed in 0..5 {
            DensityMatrix::new(random_pure_state(5, seed).into_matrix()).unwrap();
            DensityMatrix::new(random_mixed_state(5, 3, seed).into_matrix()).unwrap();
        }
    }

    #[test]
    fn unit_trace_hermitian_has_unit_trace() {
        let h = random_unit_trace_hermitian(3, 0.5, 9);
        assert!((linalg::trace(&h).re - 1.0).abs() < 1e-14);
        assert!(linalg::hermiticity_defect(&h) < 1e-15);
    }
}

//! Spherical Wigner function of a spin-F state.
//!
//! `W(θ,φ) = √(d/4π) Σ_kq ρ_kq Y_kq(θ,φ)` with multipole moments
//! `ρ_kq = Tr[T_kq† ρ]`, normalized so that `∫ W dΩ = 1`.

mod harmonics;

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

pub use harmonics::{clenshaw_curtis, normalized_legendre};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix};
use crate::spin::{clebsch_gordan_twice, DensityMatrix, SpinSystem};

/// Tag written into grid files so consumers can tell the normalization apart.
pub const CONVENTION: &str = "multipole-sum/c=sqrt(d/4pi)/integral=1/v1";

pub const DEFAULT_N_THETA: usize = 181;
pub const DEFAULT_N_PHI: usize = 360;
const MIN_GRID: usize = 8;

/// Irreducible tensor operators `T_kq`, `k = 0 … 2F`, `q = −k … k`.
#[derive(Debug, Clone)]
pub struct MultipoleOperators {
    two_f: u32,
    ops: Vec<Vec<CMatrix>>,
}

impl MultipoleOperators {
    /// `⟨F m′|T_kq|F m⟩ = √((2k+1)/(2F+1)) ⟨F m; k q|F m′⟩`
    pub fn new(sys: &SpinSystem) -> Self {
        let two_f = sys.two_f() as i64;
        let d = sys.dim();
        let ops = (0..=two_f)
            .map(|k| {
                let norm = ((2 * k + 1) as f64 / d as f64).sqrt();
                (-k..=k)
                    .map(|q| {
                        CMatrix::from_fn(d, d, |row, col| {
                            // row/column index i holds m = F − i
                            let two_mp = two_f - 2 * row as i64;
                            let two_m = two_f - 2 * col as i64;
                            linalg::c(norm * clebsch_gordan_twice(two_f, two_m, 2 * k, 2 * q, two_f, two_mp))
                        })
                    })
                    .collect()
            })
            .collect();
        Self { two_f: sys.two_f(), ops }
    }

    pub fn kmax(&self) -> usize {
        self.two_f as usize
    }

    pub fn len(&self) -> usize {
        self.ops.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn get(&self, k: usize, q: i64) -> Option<&CMatrix> {
        let row = self.ops.get(k)?;
        let idx = q + k as i64;
        if idx < 0 {
            return None;
        }
        row.get(idx as usize)
    }

    /// `(k, q, T_kq)` in order of increasing `k`, then `q`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, &CMatrix)> {
        self.ops.iter().enumerate().flat_map(|(k, row)| {
            row.iter()
                .enumerate()
                .map(move |(i, t)| (k, i as i64 - k as i64, t))
        })
    }
}

pub fn multipole_operators(sys: &SpinSystem) -> MultipoleOperators {
    MultipoleOperators::new(sys)
}

/// Pointwise evaluator built from the multipole moments of a state.
#[derive(Debug, Clone)]
pub struct WignerFunction {
    /// `ρ_kq` for `q ≥ 0`; the `q < 0` terms are their conjugate partners.
    moments: Vec<Vec<Complex64>>,
    scale: f64,
}

impl WignerFunction {
    pub fn new(rho: &DensityMatrix, sys: &SpinSystem) -> Result<Self> {
        Self::with_operators(rho, &MultipoleOperators::new(sys))
    }

    pub fn with_operators(rho: &DensityMatrix, t: &MultipoleOperators) -> Result<Self> {
        let d = t.two_f as usize + 1;
        linalg::ensure_dim(rho.matrix(), d)?;
        let moments = (0..=t.kmax())
            .map(|k| {
                (0..=k as i64)
                    .map(|q| linalg::trace_product(&t.get(k, q).unwrap().adjoint(), rho.matrix()))
                    .collect()
            })
            .collect();
        Ok(Self {
            moments,
            scale: (d as f64 / (4.0 * PI)).sqrt(),
        })
    }

    fn row(&self, theta: f64, phis: &[f64]) -> Vec<f64> {
        let p = normalized_legendre(self.moments.len() - 1, theta);
        phis.iter()
            .map(|&phi| {
                let mut w = 0.0;
                for (k, row) in self.moments.iter().enumerate() {
                    w += row[0].re * p[k][0];
                    for (q, m) in row.iter().enumerate().skip(1) {
                        let (s, c) = (q as f64 * phi).sin_cos();
                        // 2 Re(ρ_kq e^{iqφ}) P̄_k^q
                        w += 2.0 * (m.re * c - m.im * s) * p[k][q];
                    }
                }
                self.scale * w
            })
            .collect()
    }

    pub fn value(&self, theta: f64, phi: f64) -> f64 {
        self.row(theta, &[phi])[0]
    }

    /// Values on `θ_i = iπ/(n_θ−1)` (both poles included) × `φ_l = 2πl/n_φ`.
    pub fn grid(&self, n_theta: usize, n_phi: usize) -> Result<WignerGrid> {
        if n_theta < MIN_GRID || n_phi < MIN_GRID {
            return Err(Error::InvalidArgument(format!(
                "grid must be at least {MIN_GRID}×{MIN_GRID}, got {n_theta}×{n_phi}"
            )));
        }
        let thetas: Vec<f64> = (0..n_theta).map(|i| PI * i as f64 / (n_theta - 1) as f64).collect();
        let phis: Vec<f64> = (0..n_phi).map(|l| TAU * l as f64 / n_phi as f64).collect();
        let rows: Vec<Vec<f64>> = thetas.par_iter().map(|&t| self.row(t, &phis)).collect();
        let values = RMatrix::from_fn(n_theta, n_phi, |i, l| rows[i][l]);
        Ok(WignerGrid {
            thetas,
            phis,
            values,
        })
    }
}

/// Sampled Wigner function.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    /// `n_theta × n_phi`
    pub values: RMatrix,
}

impl WignerGrid {
    pub fn n_theta(&self) -> usize {
        self.thetas.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phis.len()
    }

    /// `∫ W dΩ` by Clenshaw–Curtis in `cos θ` and the trapezoid rule in `φ`.
    ///
    /// Exact for states with `2F < n_θ` and `2F < n_φ`.
    pub fn integral(&self) -> f64 {
        let w = clenshaw_curtis(self.n_theta() - 1);
        let dphi = TAU / self.n_phi() as f64;
        (0..self.n_theta())
            .map(|i| w[i] * self.values.row(i).sum() * dphi)
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(48 * self.values.len());
        let _ = writeln!(
            s,
            "# n_theta={} n_phi={} convention={CONVENTION}",
            self.n_theta(),
            self.n_phi()
        );
        s.push_str("theta,phi,w\n");
        for (i, t) in self.thetas.iter().enumerate() {
            for (l, p) in self.phis.iter().enumerate() {
                let _ = writeln!(s, "{t:.16e},{p:.16e},{:.16e}", self.values[(i, l)]);
            }
        }
        s
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

pub fn wigner_function(rho: &DensityMatrix, sys: &SpinSystem, n_theta: usize, n_phi: usize) -> Result<WignerGrid> {
    WignerFunction::new(rho, sys)?.grid(n_theta, n_phi)
}

#[cfg(test)]
mod tests;

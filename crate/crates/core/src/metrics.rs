//! State-comparison and state-quality functionals.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::spin::SpinSystem;

/// Negative eigenvalues down to this value are treated as rounding noise.
pub const NEGATIVITY_TOLERANCE: f64 = 1e-10;

/// Eigenvalues below this are zeroed before taking square roots, so that
/// rounding noise in a rank-deficient state does not turn into `√ε` errors.
const EIGEN_FLOOR: f64 = 1e-14;

fn check_pair(a: &CMatrix, b: &CMatrix) -> Result<()> {
    linalg::ensure_square(a)?;
    linalg::ensure_dim(b, a.nrows())
}

fn physical_sqrt(m: &CMatrix) -> Result<CMatrix> {
    linalg::ensure_hermitian(m, 1e-10)?;
    let (vals, vecs) = linalg::eigh(m);
    if vals[0] < -NEGATIVITY_TOLERANCE {
        return Err(Error::NotPositive(vals[0]));
    }
    Ok(linalg::from_spectrum(&vals, &vecs, |l| {
        linalg::c(if l > EIGEN_FLOOR { l.sqrt() } else { 0.0 })
    }))
}

/// Uhlmann fidelity `(Tr √(√a b √a))²`.
///
/// Evaluated as the squared nuclear norm of `√a √b`, which equals the trace
/// above and is symmetric in its arguments by construction.
pub fn fidelity(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    check_pair(a, b)?;
    let sa = physical_sqrt(a)?;
    let sb = physical_sqrt(b)?;
    let nuclear: f64 = (sa * sb).singular_values().iter().sum();
    Ok((nuclear * nuclear).clamp(0.0, 1.0))
}

/// `Tr[ρ²]`
pub fn purity(rho: &CMatrix) -> Result<f64> {
    linalg::ensure_hermitian(rho, 1e-10)?;
    Ok(linalg::trace_product(rho, rho).re)
}

pub fn max_eigenvalue(rho: &CMatrix) -> Result<f64> {
    linalg::ensure_hermitian(rho, 1e-10)?;
    Ok(*linalg::eigvalsh(rho).last().expect("nonempty matrix"))
}

/// `½ ‖a − b‖₁`
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    check_pair(a, b)?;
    let diff = a - b;
    linalg::ensure_hermitian(&diff, 1e-10)?;
    Ok(0.5 * linalg::eigvalsh(&diff).iter().map(|l| l.abs()).sum::<f64>())
}

/// First and symmetrized second moments of the spin vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMoments {
    /// `⟨F_a⟩`
    pub mean: [f64; 3],
    /// `⟨½{F_a, F_b}⟩`
    pub second: [[f64; 3]; 3],
}

impl SpinMoments {
    pub fn of_state(rho: &CMatrix, sys: &SpinSystem) -> Self {
        let ops = [sys.fx(), sys.fy(), sys.fz()];
        let mut mean = [0.0; 3];
        let mut second = [[0.0; 3]; 3];
        for a in 0..3 {
            mean[a] = linalg::trace_product(ops[a], rho).re;
            for b in 0..3 {
                let sym = linalg::anticommutator(ops[a], ops[b]).scale(0.5);
                second[a][b] = linalg::trace_product(&sym, rho).re;
            }
        }
        Self { mean, second }
    }

    pub fn covariance(&self) -> [[f64; 3]; 3] {
        let mut cov = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                cov[a][b] = self.second[a][b] - self.mean[a] * self.mean[b];
            }
        }
        cov
    }

    /// Smallest spin variance over directions orthogonal to the mean spin.
    ///
    /// For a spin-coherent state this equals `F/2`; smaller values signal
    /// squeezing.
    pub fn min_transverse_variance(&self) -> f64 {
        let cov = self.covariance();
        let norm = self.mean.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            let m = nalgebra::Matrix3::from_fn(|i, j| cov[i][j]);
            return m.symmetric_eigenvalues().min();
        }
        let n = self.mean.map(|x| x / norm);
        // any vector not parallel to n seeds the orthonormal frame
        let seed = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let dot = seed[0] * n[0] + seed[1] * n[1] + seed[2] * n[2];
        let mut e1 = [seed[0] - dot * n[0], seed[1] - dot * n[1], seed[2] - dot * n[2]];
        let e1n = e1.iter().map(|x| x * x).sum::<f64>().sqrt();
        e1 = e1.map(|x| x / e1n);
        let e2 = [
            n[1] * e1[2] - n[2] * e1[1],
            n[2] * e1[0] - n[0] * e1[2],
            n[0] * e1[1] - n[1] * e1[0],
        ];
        let quad = |u: &[f64; 3], v: &[f64; 3]| {
            let mut s = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    s += u[a] * cov[a][b] * v[b];
                }
            }
            s
        };
        let (v11, v22, v12) = (quad(&e1, &e1), quad(&e2, &e2), quad(&e1, &e2));
        0.5 * ((v11 + v22) - ((v11 - v22).powi(2) + 4.0 * v12 * v12).sqrt())
    }
}

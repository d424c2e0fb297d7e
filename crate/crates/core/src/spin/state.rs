use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SpinSystem;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;

/// A physical state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: CMatrix,
}

impl DensityMatrix {
    /// Validates `rho` against the physical-state invariants.
    pub fn new(rho: CMatrix) -> Result<Self> {
        Self::with_tolerance(rho, HERMITIAN_TOL, TRACE_TOL, POSITIVITY_TOL)
    }

    pub fn with_tolerance(rho: CMatrix, herm: f64, tr: f64, pos: f64) -> Result<Self> {
        linalg::ensure_hermitian(&rho, herm)?;
        let t = linalg::trace(&rho).re;
        if (t - 1.0).abs() > tr {
            return Err(Error::NotUnitTrace(t));
        }
        let min = linalg::eigvalsh(&rho)[0];
        if min < -pos {
            return Err(Error::NotPositive(min));
        }
        Ok(Self {
            rho: linalg::hermitian_part(&rho),
        })
    }

    /// Skips validation; the caller guarantees the invariants.
    pub(crate) fn assume_physical(rho: CMatrix) -> Self {
        Self {
            rho: linalg::hermitian_part(&rho),
        }
    }

    /// Projector onto the normalized ket `psi`.
    pub fn pure(psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize zero ket".into()));
        }
        let v = psi.unscale(norm);
        Ok(Self::assume_physical(linalg::outer(&v, &v)))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            rho: CMatrix::identity(d, d).scale(1.0 / d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }

    /// `U ρ U†`
    pub fn conjugate(&self, u: &CMatrix) -> Self {
        Self::assume_physical(u * &self.rho * u.adjoint())
    }

    /// `Tr[O ρ]` (real part; exact for Hermitian `O`).
    pub fn expectation(&self, o: &CMatrix) -> f64 {
        linalg::trace_product(o, &self.rho).re
    }

    pub fn purity(&self) -> f64 {
        linalg::trace_product(&self.rho, &self.rho).re
    }
}

/// Named families of test states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestState {
    /// `|m⟩⟨m|`
    BasisState { m: f64 },
    /// `|m = F⟩` rotated to polar angle `theta`, azimuth `phi`.
    SpinCoherent { theta: f64, phi: f64 },
    /// `(|m=+F⟩ + i|m=−F⟩)/√2`
    Cat,
    /// `I/d`
    Mixed,
    /// `exp(−iμFx²)|m=F⟩`
    Twisted { mu: f64 },
}

impl TestState {
    pub fn prepare(&self, sys: &SpinSystem) -> Result<DensityMatrix> {
        let d = sys.dim();
        match *self {
            TestState::BasisState { m } => {
                let idx = sys.index_of(m)?;
                DensityMatrix::pure(&sys.ket(idx))
            }
            TestState::SpinCoherent { theta, phi } => {
                if !theta.is_finite() || !phi.is_finite() {
                    return Err(Error::InvalidArgument("non-finite angle".into()));
                }
                let psi = sys.rotation(theta, phi) * sys.ket(0);
                DensityMatrix::pure(&psi)
            }
            TestState::Cat => {
                let psi = sys.ket(0) + sys.ket(d - 1) * Complex64::new(0.0, 1.0);
                DensityMatrix::pure(&psi)
            }
            TestState::Mixed => Ok(DensityMatrix::maximally_mixed(d)),
            TestState::Twisted { mu } => {
                if !mu.is_finite() {
                    return Err(Error::InvalidArgument("non-finite twist".into()));
                }
                let fx2 = sys.fx() * sys.fx();
                let psi = linalg::expm_hermitian(&fx2, mu) * sys.ket(0);
                DensityMatrix::pure(&psi)
            }
        }
    }

    /// The three reference inputs: `|m=−F⟩`, the cat state and `I/d`.
    pub fn reference_set(sys: &SpinSystem) -> Vec<TestState> {
        vec![
            TestState::BasisState { m: -sys.f() },
            TestState::Cat,
            TestState::Mixed,
        ]
    }

    pub fn label(&self) -> String {
        match self {
            TestState::BasisState { m } => format!("basis(m={m})"),
            TestState::SpinCoherent { theta, phi } => format!("coherent({theta},{phi})"),
            TestState::Cat => "cat".into(),
            TestState::Mixed => "mixed".into(),
            TestState::Twisted { mu } => format!("twisted({mu})"),
        }
    }
}

/// Free function form of [`TestState::prepare`].
pub fn test_state(kind: &TestState, sys: &SpinSystem) -> Result<DensityMatrix> {
    kind.prepare(sys)
}

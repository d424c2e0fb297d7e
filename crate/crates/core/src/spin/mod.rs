//! Spin-F angular momentum operators, physical states and operator bases.
//!
//! Basis states are ordered `m = +F, F−1, …, −F` by row/column index and
//! `ħ = 1` throughout.

mod basis;
mod clebsch;
mod state;

pub use basis::{coords_to_state, hermitian_basis, state_to_coords, HermitianBasis};
pub use clebsch::{clebsch_gordan, clebsch_gordan_twice};
pub use state::{test_state, DensityMatrix, TestState};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};

/// Angular momentum operators of a single spin-F system.
#[derive(Debug, Clone)]
pub struct SpinSystem {
    two_f: u32,
    fx: CMatrix,
    fy: CMatrix,
    fz: CMatrix,
    fplus: CMatrix,
}

impl SpinSystem {
    /// Builds the spin-`f` operators; `f` must be a positive multiple of 1/2.
    pub fn new(f: f64) -> Result<Self> {
        let doubled = 2.0 * f;
        if !f.is_finite() || f <= 0.0 || (doubled - doubled.round()).abs() > 1e-9 {
            return Err(Error::InvalidSpin(f));
        }
        Ok(Self::from_twice(doubled.round() as u32))
    }

    /// Builds the system with spin `two_f / 2`.
    ///
    /// Panics if `two_f == 0`.
    pub fn from_twice(two_f: u32) -> Self {
        assert!(two_f > 0, "spin must be at least 1/2");
        let d = two_f as usize + 1;
        let f = two_f as f64 / 2.0;
        let m_of = |idx: usize| f - idx as f64;

        let fz = CMatrix::from_fn(d, d, |i, j| if i == j { c(m_of(i)) } else { c(0.0) });
        // F+|m⟩ = √(F(F+1) − m(m+1)) |m+1⟩, and |m+1⟩ sits one row above |m⟩.
        let fplus = CMatrix::from_fn(d, d, |i, j| {
            if j >= 1 && i == j - 1 {
                let m = m_of(j);
                c((f * (f + 1.0) - m * (m + 1.0)).sqrt())
            } else {
                c(0.0)
            }
        });
        let fminus = fplus.adjoint();
        let fx = (&fplus + &fminus).scale(0.5);
        let fy = (&fplus - &fminus) * Complex64::new(0.0, -0.5);
        Self {
            two_f,
            fx,
            fy,
            fz,
            fplus,
        }
    }

    pub fn f(&self) -> f64 {
        self.two_f as f64 / 2.0
    }

    pub fn two_f(&self) -> u32 {
        self.two_f
    }

    /// Hilbert space dimension `2F + 1`.
    pub fn dim(&self) -> usize {
        self.two_f as usize + 1
    }

    pub fn fx(&self) -> &CMatrix {
        &self.fx
    }

    pub fn fy(&self) -> &CMatrix {
        &self.fy
    }

    pub fn fz(&self) -> &CMatrix {
        &self.fz
    }

    pub fn fplus(&self) -> &CMatrix {
        &self.fplus
    }

    pub fn fminus(&self) -> CMatrix {
        self.fplus.adjoint()
    }

    /// Component of **F** along the unit vector `n`.
    pub fn along(&self, n: [f64; 3]) -> CMatrix {
        self.fx.scale(n[0]) + self.fy.scale(n[1]) + self.fz.scale(n[2])
    }

    /// Row index of the magnetic sublevel `m`.
    pub fn index_of(&self, m: f64) -> Result<usize> {
        let offset = self.f() - m;
        let rounded = offset.round();
        if (offset - rounded).abs() > 1e-9 || rounded < 0.0 || rounded > self.two_f as f64 {
            return Err(Error::InvalidArgument(format!(
                "m = {m} is not a sublevel of F = {}",
                self.f()
            )));
        }
        Ok(rounded as usize)
    }

    /// Magnetic quantum number of row `idx`.
    pub fn m_of(&self, idx: usize) -> f64 {
        self.f() - idx as f64
    }

    /// The measured observable `FxFy + FyFx`.
    pub fn measured_observable(&self) -> CMatrix {
        &self.fx * &self.fy + &self.fy * &self.fx
    }

    /// Spin rotation `exp(−iφFz) exp(−iθFy)`.
    pub fn rotation(&self, theta: f64, phi: f64) -> CMatrix {
        let rz = crate::linalg::expm_hermitian(&self.fz, phi);
        let ry = crate::linalg::expm_hermitian(&self.fy, theta);
        rz * ry
    }

    pub(crate) fn ket(&self, idx: usize) -> nalgebra::DVector<Complex64> {
        let mut v = nalgebra::DVector::from_element(self.dim(), c(0.0));
        v[idx] = c(1.0);
        v
    }
}

/// Free function form of [`SpinSystem::new`].
pub fn build_spin_system(f: f64) -> Result<SpinSystem> {
    SpinSystem::new(f)
}

/// Free function form of [`SpinSystem::measured_observable`].
pub fn measured_observable(sys: &SpinSystem) -> CMatrix {
    sys.measured_observable()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, frobenius, identity, trace, I};

    fn max_entry(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn rejects_bad_spin() {
        assert!(SpinSystem::new(0.0).is_err());
        assert!(SpinSystem::new(-1.0).is_err());
        assert!(SpinSystem::new(0.3).is_err());
        assert!(SpinSystem::new(f64::NAN).is_err());
    }

    #[test]
    fn f3_has_dimension_seven() {
        assert_eq!(SpinSystem::new(3.0).unwrap().dim(), 7);
    }

    #[test]
    fn spin_half_is_pauli_over_two() {
        let s = SpinSystem::new(0.5).unwrap();
        let sx = CMatrix::from_row_slice(2, 2, &[c(0.0), c(0.5), c(0.5), c(0.0)]);
        let sy = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0), Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.5), c(0.0)],
        );
        let sz = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(frobenius(&(s.fx() - sx)) < 1e-15);
        assert!(frobenius(&(s.fy() - sy)) < 1e-15);
        assert!(frobenius(&(s.fz() - sz)) < 1e-15);
    }

    #[test]
    fn ladder_element_f3() {
        let s = SpinSystem::new(3.0).unwrap();
        let lo = s.index_of(-3.0).unwrap();
        let hi = s.index_of(-2.0).unwrap();
        assert!((s.fplus()[(hi, lo)] - c(6f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn algebra_identities_hold_for_many_spins() {
        for two_f in 1..=12 {
            let s = SpinSystem::from_twice(two_f);
            let f = s.f();
            let d = s.dim();
            assert!(max_entry(&(commutator(s.fx(), s.fy()) - s.fz() * I)) < 1e-12);
            assert!(max_entry(&(commutator(s.fy(), s.fz()) - s.fx() * I)) < 1e-12);
            assert!(max_entry(&(commutator(s.fz(), s.fx()) - s.fy() * I)) < 1e-12);
            let casimir = s.fx() * s.fx() + s.fy() * s.fy() + s.fz() * s.fz();
            assert!(max_entry(&(casimir - identity(d).scale(f * (f + 1.0)))) < 1e-12);
            for i in 0..d {
                assert_eq!(s.fz()[(i, i)].re, f - i as f64);
            }
            for j in 1..d {
                let m = s.m_of(j);
                let expected = (f * (f + 1.0) - m * (m + 1.0)).sqrt();
                assert!((s.fplus()[(j - 1, j)].re - expected).abs() < 1e-12);
                let down = s.fminus()[(j, j - 1)].re;
                let mp = s.m_of(j - 1);
                assert!((down - (f * (f + 1.0) - mp * (mp - 1.0)).sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn observable_is_traceless_hermitian() {
        let s = SpinSystem::new(3.0).unwrap();
        let o = s.measured_observable();
        assert!(crate::linalg::hermiticity_defect(&o) < 1e-14);
        assert!(trace(&o).norm() < 1e-13);
        let down = s.index_of(-3.0).unwrap();
        assert!(o[(down, down)].norm() < 1e-14);
    }

    #[test]
    fn observable_vanishes_for_spin_half() {
        let s = SpinSystem::new(0.5).unwrap();
        assert!(max_entry(&s.measured_observable()) < 1e-15);
    }

    #[test]
    fn index_of_rejects_foreign_levels() {
        let s = SpinSystem::new(3.0).unwrap();
        assert!(s.index_of(3.5).is_err());
        assert!(s.index_of(4.0).is_err());
        assert_eq!(s.index_of(3.0).unwrap(), 0);
        assert_eq!(s.index_of(-3.0).unwrap(), 6);
    }
}

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, RVector};

/// Orthonormal Hermitian operator basis (generalized Gell-Mann matrices).
///
/// Element 0 is `I/√d`. It is followed by the symmetric and antisymmetric
/// off-diagonal pairs `(j, k)`, `j < k`, in row-major order, then the
/// `d − 1` traceless diagonal elements. For `d = 2` this is
/// `{I, σx, σy, σz}/√2`.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl HermitianBasis {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1);
        let zero = CMatrix::from_element(dim, dim, c(0.0));
        let mut elements = Vec::with_capacity(dim * dim);
        elements.push(CMatrix::identity(dim, dim).scale(1.0 / (dim as f64).sqrt()));

        let r = std::f64::consts::FRAC_1_SQRT_2;
        for j in 0..dim {
            for k in (j + 1)..dim {
                let mut sym = zero.clone();
                sym[(j, k)] = c(r);
                sym[(k, j)] = c(r);
                elements.push(sym);

                let mut anti = zero.clone();
                anti[(j, k)] = Complex64::new(0.0, -r);
                anti[(k, j)] = Complex64::new(0.0, r);
                elements.push(anti);
            }
        }
        for l in 1..dim {
            let norm = ((l * (l + 1)) as f64).sqrt();
            let mut diag = zero.clone();
            for i in 0..l {
                diag[(i, i)] = c(1.0 / norm);
            }
            diag[(l, l)] = c(-(l as f64) / norm);
            elements.push(diag);
        }
        Self { dim, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis elements, `d²`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn element(&self, a: usize) -> &CMatrix {
        &self.elements[a]
    }

    /// Real coordinates `x_a = Tr[B_a m]` of a Hermitian matrix.
    pub fn coords(&self, m: &CMatrix) -> Result<RVector> {
        self.check(m)?;
        Ok(self.coords_unchecked(m))
    }

    pub(crate) fn coords_unchecked(&self, m: &CMatrix) -> RVector {
        RVector::from_iterator(
            self.elements.len(),
            self.elements.iter().map(|b| {
                // Tr[B m] = Σ conj(B_ij) m_ij for Hermitian B.
                b.iter()
                    .zip(m.iter())
                    .map(|(bij, mij)| (bij.conj() * mij).re)
                    .sum::<f64>()
            }),
        )
    }

    /// Inverse of [`coords`](Self::coords): `Σ_a x_a B_a`.
    pub fn matrix(&self, x: &RVector) -> Result<CMatrix> {
        if x.len() != self.elements.len() {
            return Err(Error::DimensionMismatch {
                expected: self.elements.len(),
                found: x.len(),
            });
        }
        Ok(self.matrix_unchecked(x.as_slice()))
    }

    pub(crate) fn matrix_unchecked(&self, x: &[f64]) -> CMatrix {
        let mut out = CMatrix::from_element(self.dim, self.dim, c(0.0));
        for (b, &xa) in self.elements.iter().zip(x) {
            if xa != 0.0 {
                out += b.scale(xa);
            }
        }
        out
    }

    fn check(&self, m: &CMatrix) -> Result<()> {
        crate::linalg::ensure_dim(m, self.dim)
    }
}

/// Generalized Gell-Mann basis for the spin system's Hilbert space.
pub fn hermitian_basis(sys: &super::SpinSystem) -> HermitianBasis {
    HermitianBasis::new(sys.dim())
}

/// Coordinates of `rho` in `basis`.
pub fn state_to_coords(basis: &HermitianBasis, rho: &CMatrix) -> Result<RVector> {
    basis.coords(rho)
}

/// Hermitian matrix with coordinates `x` in `basis`.
pub fn coords_to_state(basis: &HermitianBasis, x: &RVector) -> Result<CMatrix> {
    basis.matrix(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, trace_product};

    #[test]
    fn qubit_basis_is_normalized_pauli() {
        let b = HermitianBasis::new(2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sx = CMatrix::from_row_slice(2, 2, &[c(0.0), c(s), c(s), c(0.0)]);
        let sy = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0), Complex64::new(0.0, -s), Complex64::new(0.0, s), c(0.0)],
        );
        let sz = CMatrix::from_row_slice(2, 2, &[c(s), c(0.0), c(0.0), c(-s)]);
        assert!(frobenius(&(b.element(1) - sx)) < 1e-15);
        assert!(frobenius(&(b.element(2) - sy)) < 1e-15);
        assert!(frobenius(&(b.element(3) - sz)) < 1e-15);
    }

    #[test]
    fn gram_matrix_is_identity() {
        for d in 1..=8 {
            let b = HermitianBasis::new(d);
            assert_eq!(b.len(), d * d);
            for (i, bi) in b.elements().iter().enumerate() {
                assert!(crate::linalg::hermiticity_defect(bi) < 1e-15);
                if i > 0 {
                    assert!(crate::linalg::trace(bi).norm() < 1e-12);
                }
                for (j, bj) in b.elements().iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((trace_product(bi, bj) - c(expect)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn f3_basis_has_49_elements() {
        let sys = super::super::SpinSystem::new(3.0).unwrap();
        assert_eq!(hermitian_basis(&sys).len(), 49);
    }

    #[test]
    fn maximally_mixed_coordinates() {
        let d = 7;
        let b = HermitianBasis::new(d);
        let x = b.coords(&CMatrix::identity(d, d).scale(1.0 / d as f64)).unwrap();
        assert!((x[0] - 1.0 / (d as f64).sqrt()).abs() < 1e-15);
        assert!(x.iter().skip(1).all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn qubit_up_state_coordinates() {
        let b = HermitianBasis::new(2);
        let up = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let x = b.coords(&up).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [s, 0.0, 0.0, s];
        for (a, e) in x.iter().zip(expected) {
            assert!((a - e).abs() < 1e-15);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let b = HermitianBasis::new(3);
        assert!(b.coords(&CMatrix::identity(2, 2)).is_err());
        assert!(b.matrix(&RVector::zeros(4)).is_err());
    }
}

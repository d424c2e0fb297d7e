//! Small dense linear-algebra helpers shared by the physics modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn ensure_dim(m: &CMatrix, d: usize) -> Result<()> {
    ensure_square(m)?;
    if m.nrows() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: m.nrows(),
        });
    }
    Ok(())
}

pub fn ensure_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    ensure_square(m)?;
    let defect = hermiticity_defect(m);
    if defect > tol {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// `(m + m†) / 2`
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted ascending.
///
/// The input is symmetrized first so that rounding noise in the lower
/// triangle cannot leak into the result.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    eigh(m).0
}

/// Rebuild `V diag(f(λ)) V†` from an eigendecomposition.
pub fn from_spectrum(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let n = vectors.nrows();
    let mut scaled = vectors.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let w = f(lambda);
        for i in 0..n {
            scaled[(i, j)] *= w;
        }
    }
    scaled * vectors.adjoint()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `Tr[a b]` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// `‖U†U − I‖_F`
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    frobenius(&(u.adjoint() * u - identity(u.nrows())))
}

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(c)
}

/// `exp(−i·h·t)` for Hermitian `h`, via its eigendecomposition.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let (vals, vecs) = eigh(h);
    from_spectrum(&vals, &vecs, |lambda| Complex64::from_polar(1.0, -lambda * t))
}

/// Outer product `|a⟩⟨b|`.
pub fn outer(a: &DVector<Complex64>, b: &DVector<Complex64>) -> CMatrix {
    a * b.adjoint()
}

/// Serde adapter: complex matrices as row-major nested `[re, im]` pairs.
pub mod serde_cmatrix {
    use super::CMatrix;
    use num_complex::Complex64;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect()
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix, String> {
        let n = rows.len();
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err("ragged matrix rows".into());
        }
        if n == 0 {
            return Err("empty matrix".into());
        }
        Ok(CMatrix::from_fn(n, cols, |i, j| {
            Complex64::new(rows[i][j][0], rows[i][j][1])
        }))
    }

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_rows(&rows).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_sorts_ascending_and_reconstructs() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(2.0),
                Complex64::new(0.5, 0.3),
                c(0.0),
                Complex64::new(0.5, -0.3),
                c(-1.0),
                c(0.1),
                c(0.0),
                c(0.1),
                c(0.5),
            ],
        );
        let (vals, vecs) = eigh(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let back = from_spectrum(&vals, &vecs, c);
        assert!(frobenius(&(back - &m)) < 1e-12);
    }

    #[test]
    fn hermiticity_detects_asymmetry() {
        let mut m = identity(2);
        m[(0, 1)] = c(1.0);
        assert!((hermiticity_defect(&m) - 1.0).abs() < 1e-15);
        assert!(ensure_hermitian(&m, 1e-12).is_err());
    }
}

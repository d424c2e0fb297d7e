use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::spin::DensityMatrix;

/// Frobenius-nearest density matrix to a Hermitian unit-trace matrix.
///
/// Eigenvalues are visited from the most negative upward; each one that is
/// still negative after receiving its share of the accumulated deficit is
/// zeroed and its value spread evenly over the eigenvalues above it.
/// Eigenvectors are untouched.
pub fn project_to_physical(rho: &CMatrix) -> Result<DensityMatrix> {
    linalg::ensure_square(rho)?;
    linalg::ensure_hermitian(rho, 1e-10)?;
    let tr = linalg::trace(rho).re;
    if (tr - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnitTrace(tr));
    }
    let (mut vals, vecs) = linalg::eigh(rho);
    if vals[0] >= 0.0 {
        return Ok(DensityMatrix::assume_physical(rho.clone()));
    }
    water_fill(&mut vals);
    Ok(DensityMatrix::assume_physical(linalg::from_spectrum(&vals, &vecs, linalg::c)))
}

/// In-place projection of an ascending spectrum onto the probability simplex.
pub(crate) fn water_fill(ascending: &mut [f64]) {
    let d = ascending.len();
    let mut deficit = 0.0;
    let mut first_kept = 0;
    while first_kept < d - 1 {
        let share = deficit / (d - first_kept) as f64;
        if ascending[first_kept] + share >= 0.0 {
            break;
        }
        deficit += ascending[first_kept];
        ascending[first_kept] = 0.0;
        first_kept += 1;
    }
    let share = deficit / (d - first_kept) as f64;
    for v in &mut ascending[first_kept..] {
        *v += share;
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix};
use crate::spin::{HermitianBasis, SpinSystem};

/// Jump operators of the decoherence channel, all applied at rate `gamma_dec`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum JumpOperators {
    /// No decoherence.
    None,
    /// `{Fx, Fy, Fz}`: unital, rotation-invariant depolarization.
    #[default]
    Isotropic,
    /// `{Fz}`: pure dephasing in the m basis.
    Dephasing,
    /// User supplied operators.
    Explicit(#[serde(with = "explicit_ops")] Vec<CMatrix>),
}

mod explicit_ops {
    use super::CMatrix;
    use crate::linalg::serde_cmatrix::{from_rows, to_rows};
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(ops: &[CMatrix], s: S) -> Result<S::Ok, S::Error> {
        ops.iter().map(to_rows).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMatrix>, D::Error> {
        let raw = Vec::<Vec<Vec<[f64; 2]>>>::deserialize(d)?;
        raw.iter()
            .map(|m| from_rows(m).map_err(D::Error::custom))
            .collect()
    }
}

impl JumpOperators {
    pub fn operators(&self, sys: &SpinSystem) -> Result<Vec<CMatrix>> {
        match self {
            JumpOperators::None => Ok(Vec::new()),
            JumpOperators::Isotropic => Ok(vec![sys.fx().clone(), sys.fy().clone(), sys.fz().clone()]),
            JumpOperators::Dephasing => Ok(vec![sys.fz().clone()]),
            JumpOperators::Explicit(ops) => {
                for op in ops {
                    linalg::ensure_dim(op, sys.dim())?;
                }
                Ok(ops.clone())
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            JumpOperators::None => true,
            JumpOperators::Explicit(ops) => ops.is_empty(),
            _ => false,
        }
    }

    /// Stable tag used in fingerprints.
    pub(crate) fn tag(&self) -> &'static str {
        match self {
            JumpOperators::None => "none",
            JumpOperators::Isotropic => "isotropic",
            JumpOperators::Dephasing => "dephasing",
            JumpOperators::Explicit(_) => "explicit",
        }
    }
}

/// Lindblad generator
/// `L(ρ) = −i[H,ρ] + γ Σ_k (A_k ρ A_k† − ½{A_k†A_k, ρ})`
/// as a real `d² × d²` matrix acting on Hermitian-basis coordinates.
///
/// Entry `(a, b)` is `Tr[B_a L(B_b)]`.
pub fn lindblad_superoperator(
    basis: &HermitianBasis,
    h: &CMatrix,
    gamma: f64,
    jumps: &[CMatrix],
) -> Result<RMatrix> {
    let d = basis.dim();
    linalg::ensure_dim(h, d)?;
    for a in jumps {
        linalg::ensure_dim(a, d)?;
    }
    if !(gamma >= 0.0) {
        return Err(Error::InvalidArgument("decoherence rate must be nonnegative".into()));
    }
    let minus_i = num_complex::Complex64::new(0.0, -1.0);
    let decay: Vec<(CMatrix, CMatrix, CMatrix)> = jumps
        .iter()
        .map(|a| (a.clone(), a.adjoint(), (a.adjoint() * a).scale(0.5)))
        .collect();

    let n = basis.len();
    let mut g = RMatrix::zeros(n, n);
    for (b_idx, b) in basis.elements().iter().enumerate() {
        let mut image = linalg::commutator(h, b) * minus_i;
        if gamma > 0.0 {
            for (a, a_dag, half_ada) in &decay {
                let term = a * b * a_dag - linalg::anticommutator(half_ada, b);
                image += term.scale(gamma);
            }
        }
        let col = basis.coords_unchecked(&image);
        g.set_column(b_idx, &col);
    }
    Ok(g)
}

//! Two-step state reconstruction: unconstrained least squares, then the
//! nearest physical state.

mod nuisance;
mod projection;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use nuisance::{estimate_with_nuisance, NuisanceKind, NuisanceParam, NuisanceSearch};
pub use projection::project_to_physical;

use crate::dynamics::{propagate_state, ControlWaveform, ObservableHistory, SamplingPlan};
use crate::error::{Error, Result};
use crate::linalg::{self, serde_cmatrix, CMatrix, RMatrix, RVector};
use crate::measurement::MeasurementRecord;
use crate::metrics;
use crate::spin::{DensityMatrix, HermitianBasis, SpinSystem};

/// Singular values below this fraction of the largest are discarded.
pub const SVD_CUTOFF: f64 = 1e-10;

pub const ESTIMATE_VERSION: u32 = 1;

/// Unconstrained fit over the traceless coordinates with `Tr ρ = 1` fixed.
#[derive(Debug, Clone)]
pub struct LeastSquaresFit {
    pub rho_ls: CMatrix,
    /// Traceless coordinates `x_1 … x_{d²−1}`.
    pub coords: RVector,
    /// `σ²(AᵀA)⁺`, zero outside the retained subspace.
    pub covariance: RMatrix,
    /// Orthonormal columns spanning the retained subspace.
    pub row_space: RMatrix,
    /// Descending singular values of the traceless design matrix.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub residual_norm: f64,
}

/// Least squares on raw values against a full `N × d²` design matrix.
pub(crate) fn fit_values(values: &[f64], design: &RMatrix, sigma: f64) -> LeastSquaresFit {
    let n = design.nrows();
    let d2 = design.ncols();
    let d = (d2 as f64).sqrt().round() as usize;
    let offset = 1.0 / (d as f64).sqrt();
    let a = design.columns(1, d2 - 1).into_owned();
    let b = RVector::from_fn(n, |i, _| values[i] - design[(i, 0)] * offset);

    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested Vᵀ");
    let s = &svd.singular_values;
    let smax = s.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..s.len()).filter(|&i| smax > 0.0 && s[i] > SVD_CUTOFF * smax).collect();

    let mut x = RVector::zeros(d2 - 1);
    let mut covariance = RMatrix::zeros(d2 - 1, d2 - 1);
    let mut row_space = RMatrix::zeros(d2 - 1, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        let v = vt.row(i).transpose();
        let coef = u.column(i).dot(&b) / s[i];
        x.axpy(coef, &v, 1.0);
        covariance += (&v * v.transpose()) * (sigma * sigma / (s[i] * s[i]));
        row_space.set_column(col, &v);
    }
    let residual_norm = (&a * &x - &b).norm();

    let mut full = vec![offset];
    full.extend(x.iter());
    let basis = HermitianBasis::new(d);
    LeastSquaresFit {
        rho_ls: basis.matrix_unchecked(&full),
        coords: x,
        covariance,
        row_space,
        singular_values: s.iter().copied().collect(),
        rank: keep.len(),
        residual_norm,
    }
}

/// Ordinary least-squares fit of a record against its observable history.
pub fn least_squares(record: &MeasurementRecord, history: &ObservableHistory) -> Result<LeastSquaresFit> {
    if record.is_empty() {
        return Err(Error::EmptyRecord);
    }
    record.check_matches(history)?;
    Ok(fit_values(&record.values, history.design_matrix(), record.effective_sigma()))
}

/// Estimated nuisance parameters and how the search ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NuisanceEstimate {
    pub values: BTreeMap<String, f64>,
    pub converged: bool,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct EstimateResult {
    pub spin: f64,
    pub rho_ls: CMatrix,
    pub rho_ml: DensityMatrix,
    pub covariance: RMatrix,
    pub singular_values: Vec<f64>,
    pub residual_norm: f64,
    pub rank: usize,
    pub nuisance: Option<NuisanceEstimate>,
    pub waveform_fingerprint: String,
}

impl EstimateResult {
    fn from_fit(fit: LeastSquaresFit, spin: f64, fingerprint: &str) -> Result<Self> {
        let rho_ml = project_to_physical(&fit.rho_ls)?;
        Ok(Self {
            spin,
            rho_ls: fit.rho_ls,
            rho_ml,
            covariance: fit.covariance,
            singular_values: fit.singular_values,
            residual_norm: fit.residual_norm,
            rank: fit.rank,
            nuisance: None,
            waveform_fingerprint: fingerprint.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        let n = self.covariance.nrows();
        let doc = EstimateDocument {
            version: ESTIMATE_VERSION,
            spin: self.spin,
            waveform_fingerprint: self.waveform_fingerprint.clone(),
            rank: self.rank,
            residual_norm: self.residual_norm,
            singular_values: self.singular_values.clone(),
            rho_ls: serde_cmatrix::to_rows(&self.rho_ls),
            rho_ml: serde_cmatrix::to_rows(self.rho_ml.matrix()),
            covariance_lower: (0..n)
                .map(|i| (0..=i).map(|j| self.covariance[(i, j)]).collect())
                .collect(),
            nuisance: self.nuisance.clone(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("estimate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: EstimateDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.version != ESTIMATE_VERSION {
            return Err(Error::UnsupportedVersion {
                expected: ESTIMATE_VERSION,
                found: doc.version,
            });
        }
        let sys = SpinSystem::new(doc.spin)?;
        let d = sys.dim();
        let rho_ls = serde_cmatrix::from_rows(&doc.rho_ls).map_err(Error::Parse)?;
        linalg::ensure_dim(&rho_ls, d)?;
        let rho_ml = serde_cmatrix::from_rows(&doc.rho_ml).map_err(Error::Parse)?;
        linalg::ensure_dim(&rho_ml, d)?;
        let rho_ml = DensityMatrix::with_tolerance(rho_ml, 1e-10, 1e-10, 1e-10)?;
        let n = d * d - 1;
        if doc.covariance_lower.len() != n || doc.covariance_lower.iter().enumerate().any(|(i, r)| r.len() != i + 1) {
            return Err(Error::Validation(format!("covariance_lower must be the lower triangle of a {n}×{n} matrix")));
        }
        let covariance = RMatrix::from_fn(n, n, |i, j| {
            if j <= i {
                doc.covariance_lower[i][j]
            } else {
                doc.covariance_lower[j][i]
            }
        });
        Ok(Self {
            spin: doc.spin,
            rho_ls,
            rho_ml,
            covariance,
            singular_values: doc.singular_values,
            residual_norm: doc.residual_norm,
            rank: doc.rank,
            nuisance: doc.nuisance,
            waveform_fingerprint: doc.waveform_fingerprint,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EstimateDocument {
    version: u32,
    #[serde(rename = "F")]
    spin: f64,
    waveform_fingerprint: String,
    rank: usize,
    residual_norm: f64,
    singular_values: Vec<f64>,
    rho_ls: Vec<Vec<[f64; 2]>>,
    rho_ml: Vec<Vec<[f64; 2]>>,
    covariance_lower: Vec<Vec<f64>>,
    nuisance: Option<NuisanceEstimate>,
}

/// Least squares followed by projection onto physical states.
pub fn estimate(record: &MeasurementRecord, history: &ObservableHistory) -> Result<EstimateResult> {
    let fit = least_squares(record, history)?;
    EstimateResult::from_fit(fit, history.spin(), history.fingerprint())
}

/// One point of a time-resolved reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrefixPoint {
    /// Number of leading samples used.
    pub samples: usize,
    /// Time of the last sample used (0 for the prior).
    pub time: f64,
    pub fidelity: f64,
    /// Largest eigenvalue of the true state evolved to `time`.
    pub max_eigenvalue: f64,
    pub rank: usize,
}

/// Reconstructs from the first `k` samples for `k = 0, stride, 2·stride, …, N`.
///
/// `k = 0` is the unbiased prior `I/d`. Prefixes are independent fits and run
/// in parallel; points come back in order of `k`.
pub fn estimate_prefix_curve(
    record: &MeasurementRecord,
    history: &ObservableHistory,
    rho_true: &DensityMatrix,
    sys: &SpinSystem,
    wf: &ControlWaveform,
    plan: &SamplingPlan,
    stride: usize,
) -> Result<Vec<PrefixPoint>> {
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be at least 1".into()));
    }
    if record.is_empty() {
        return Err(Error::EmptyRecord);
    }
    record.check_matches(history)?;
    linalg::ensure_dim(rho_true.matrix(), history.dim())?;
    let evolved = propagate_state(rho_true, sys, wf, plan)?;
    if evolved.len() != record.len() {
        return Err(Error::DimensionMismatch {
            expected: record.len(),
            found: evolved.len(),
        });
    }

    let n = record.len();
    let mut ks: Vec<usize> = (0..n).step_by(stride).collect();
    if *ks.last().unwrap() != n {
        ks.push(n);
    }
    let d = history.dim();
    let sigma = record.effective_sigma();
    ks.par_iter()
        .map(|&k| {
            let at = k.saturating_sub(1);
            let max_eigenvalue = metrics::max_eigenvalue(evolved[at].matrix())?;
            let (rho, rank) = if k == 0 {
                (DensityMatrix::maximally_mixed(d), 0)
            } else {
                let design = history.design_matrix().rows(0, k).into_owned();
                let fit = fit_values(&record.values[..k], &design, sigma);
                let rank = fit.rank;
                (project_to_physical(&fit.rho_ls)?, rank)
            };
            Ok(PrefixPoint {
                samples: k,
                time: record.times[at],
                fidelity: metrics::fidelity(rho_true.matrix(), rho.matrix())?,
                max_eigenvalue,
                rank,
            })
        })
        .collect()
}

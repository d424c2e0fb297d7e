use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{estimate, fit_values, EstimateResult, NuisanceEstimate};
use crate::dynamics::{heisenberg_history, ControlWaveform, SamplingPlan};
use crate::error::{Error, Result};
use crate::measurement::MeasurementRecord;
use crate::optimize::NelderMead;
use crate::spin::SpinSystem;

/// Global calibration factors that can be co-estimated with the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NuisanceKind {
    /// Multiplies the Larmor rate.
    OmegaScale,
    /// Multiplies the nonlinear strength.
    ChiScale,
}

impl NuisanceKind {
    pub fn name(self) -> &'static str {
        match self {
            NuisanceKind::OmegaScale => "omega_scale",
            NuisanceKind::ChiScale => "chi_scale",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "omega_scale" => Ok(NuisanceKind::OmegaScale),
            "chi_scale" => Ok(NuisanceKind::ChiScale),
            other => Err(Error::InvalidArgument(format!(
                "unknown nuisance parameter `{other}` (expected omega_scale or chi_scale)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuisanceParam {
    pub kind: NuisanceKind,
    pub lower: f64,
    pub upper: f64,
}

impl NuisanceParam {
    /// Parses `name=lower:upper`, e.g. `omega_scale=0.95:1.05`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("nuisance spec `{spec}` is not name=lower:upper"));
        let (name, range) = spec.split_once('=').ok_or_else(bad)?;
        let (lo, hi) = range.split_once(':').ok_or_else(bad)?;
        Ok(Self {
            kind: NuisanceKind::parse(name.trim())?,
            lower: lo.trim().parse().map_err(|_| bad())?,
            upper: hi.trim().parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NuisanceSearch {
    pub params: Vec<NuisanceParam>,
    /// Total residual evaluations, each one a fresh observable history.
    pub budget: usize,
}

impl Default for NuisanceSearch {
    fn default() -> Self {
        Self {
            params: Vec::new(),
            budget: 200,
        }
    }
}

impl NuisanceSearch {
    fn validate(&self) -> Result<()> {
        for (i, p) in self.params.iter().enumerate() {
            if !(p.lower.is_finite() && p.upper.is_finite() && 0.0 <= p.lower && p.lower < p.upper) {
                return Err(Error::InvalidArgument(format!(
                    "bounds for {} must satisfy 0 ≤ lower < upper, got [{}, {}]",
                    p.kind.name(),
                    p.lower,
                    p.upper
                )));
            }
            if self.params[..i].iter().any(|q| q.kind == p.kind) {
                return Err(Error::InvalidArgument(format!("{} listed twice", p.kind.name())));
            }
        }
        if !self.params.is_empty() && self.budget == 0 {
            return Err(Error::InvalidArgument("nuisance budget must be at least 1".into()));
        }
        Ok(())
    }
}

/// Grid points per axis of the coarse scan that seeds the simplex.
fn scan_points(dims: usize) -> usize {
    if dims == 1 {
        9
    } else {
        5
    }
}

/// Profile-likelihood estimate over the state and global scale factors.
///
/// With Gaussian noise the likelihood maximized over `ρ` for fixed scales is
/// a monotone function of the least-squares residual, so the outer search
/// minimizes that residual. A coarse grid scan picks the starting vertex and
/// bounded Nelder–Mead polishes it.
pub fn estimate_with_nuisance(
    record: &MeasurementRecord,
    sys: &SpinSystem,
    wf: &ControlWaveform,
    plan: &SamplingPlan,
    search: &NuisanceSearch,
) -> Result<EstimateResult> {
    search.validate()?;
    let o = sys.measured_observable();
    let nominal = heisenberg_history(sys, wf, plan, &o)?;
    if search.params.is_empty() {
        return estimate(record, &nominal);
    }
    if record.is_empty() {
        return Err(Error::EmptyRecord);
    }
    record.check_matches(&nominal)?;

    let sigma = record.effective_sigma();
    let model_at = |p: &[f64]| {
        let (mut omega, mut chi) = (1.0, 1.0);
        for (param, &v) in search.params.iter().zip(p) {
            match param.kind {
                NuisanceKind::OmegaScale => omega = v,
                NuisanceKind::ChiScale => chi = v,
            }
        }
        wf.scaled(omega, chi)
    };
    let residual = |p: &[f64]| -> f64 {
        match heisenberg_history(sys, &model_at(p), plan, &o) {
            Ok(h) => fit_values(&record.values, h.design_matrix(), sigma).residual_norm.powi(2),
            Err(_) => f64::INFINITY,
        }
    };

    let dims = search.params.len();
    let lower: Vec<f64> = search.params.iter().map(|p| p.lower).collect();
    let upper: Vec<f64> = search.params.iter().map(|p| p.upper).collect();

    let per_axis = scan_points(dims);
    let total_scan = per_axis.pow(dims as u32).min(search.budget / 2);
    let mut best = (f64::INFINITY, lower.iter().zip(&upper).map(|(l, u)| 0.5 * (l + u)).collect::<Vec<_>>());
    for idx in 0..total_scan {
        let mut rem = idx;
        let p: Vec<f64> = (0..dims)
            .map(|j| {
                let t = (rem % per_axis) as f64 / (per_axis - 1) as f64;
                rem /= per_axis;
                lower[j] + t * (upper[j] - lower[j])
            })
            .collect();
        let r = residual(&p);
        if r < best.0 {
            best = (r, p);
        }
    }

    let step: Vec<f64> = lower
        .iter()
        .zip(&upper)
        .map(|(l, u)| (u - l) / (2.0 * (per_axis - 1) as f64))
        .collect();
    let nm = NelderMead {
        max_evals: search.budget - total_scan,
        x_tol: 1e-9,
        f_tol: 1e-14,
    };
    let (x, converged, evaluations) = if nm.max_evals == 0 {
        (best.1, false, total_scan)
    } else {
        let m = nm.minimize(residual, &best.1, &step, &lower, &upper);
        let x = if m.value <= best.0 { m.x } else { best.1 };
        (x, m.converged, total_scan + m.evaluations)
    };

    let scaled = model_at(&x);
    let h = heisenberg_history(sys, &scaled, plan, &o)?;
    let fit = fit_values(&record.values, h.design_matrix(), sigma);
    let mut result = EstimateResult::from_fit(fit, sys.f(), nominal.fingerprint())?;
    result.nuisance = Some(NuisanceEstimate {
        values: search
            .params
            .iter()
            .zip(&x)
            .map(|(p, &v)| (p.kind.name().to_string(), v))
            .collect::<BTreeMap<_, _>>(),
        converged,
        evaluations,
    });
    Ok(result)
}

//! Informational completeness and field-angle schedule optimization.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{heisenberg_history, ControlWaveform, ObservableHistory, SamplingPlan};
use crate::error::{Error, Result};
use crate::estimator::SVD_CUTOFF;
use crate::optimize::NelderMead;
use crate::rng::{derive_seed, STREAM_DESIGN};
use crate::spin::SpinSystem;

/// Numerical rank summary of a design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessReport {
    pub rank: usize,
    /// Rank required for a unique reconstruction.
    pub required: usize,
    /// Descending singular values of the matrix whose rank is reported.
    pub singular_values: Vec<f64>,
    pub complete: bool,
    /// Whether every `O_i` is traceless, in which case only the `d² − 1`
    /// traceless coordinates are informative.
    pub traceless: bool,
}

pub fn completeness_report(history: &ObservableHistory) -> Result<CompletenessReport> {
    if history.is_empty() {
        return Err(Error::EmptyRecord);
    }
    let design = history.design_matrix();
    let d2 = design.ncols();
    let scale = design.amax().max(f64::MIN_POSITIVE);
    let traceless = design.column(0).iter().all(|v| v.abs() <= 1e-12 * scale);
    let (m, required) = if traceless {
        (design.columns(1, d2 - 1).into_owned(), d2 - 1)
    } else {
        (design.clone(), d2)
    };
    let singular_values: Vec<f64> = m.singular_values().iter().copied().collect();
    let smax = singular_values.first().copied().unwrap_or(0.0);
    let rank = singular_values
        .iter()
        .filter(|&&s| smax > 0.0 && s > SVD_CUTOFF * smax)
        .count();
    Ok(CompletenessReport {
        rank,
        required,
        singular_values,
        complete: rank == required,
        traceless,
    })
}

/// Scalar score of a design; larger is better and incomplete designs score 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Smallest singular value (E-optimality).
    #[default]
    MinSingularValue,
    /// `1 / Σ s⁻²`, the reciprocal of the total parameter variance (A-optimality).
    InverseTraceCovariance,
    /// `s_min / s_max`.
    InverseCondition,
}

impl Objective {
    pub fn score(self, report: &CompletenessReport) -> f64 {
        if !report.complete {
            return 0.0;
        }
        let s = &report.singular_values[..report.required];
        let smin = *s.last().unwrap();
        match self {
            Objective::MinSingularValue => smin,
            Objective::InverseTraceCovariance => 1.0 / s.iter().map(|v| 1.0 / (v * v)).sum::<f64>(),
            Objective::InverseCondition => smin / s[0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignOptions {
    pub objective: Objective,
    /// Weight of the penalty for losing score under a ±1% Larmor-rate error.
    pub robustness_weight: f64,
    /// Fraction of the budget spent on random restarts before polishing.
    pub restart_fraction: f64,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self {
            objective: Objective::MinSingularValue,
            robustness_weight: 0.0,
            restart_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DesignOutcome {
    pub waveform: ControlWaveform,
    pub objective: f64,
    pub template_objective: f64,
    pub evaluations: usize,
    /// Best objective after each evaluation; nondecreasing.
    pub best_trace: Vec<f64>,
}

/// Objective of one waveform, including the optional robustness penalty.
pub fn design_objective(
    sys: &SpinSystem,
    wf: &ControlWaveform,
    plan: &SamplingPlan,
    options: &DesignOptions,
) -> f64 {
    let o = sys.measured_observable();
    let score = |w: &ControlWaveform| {
        heisenberg_history(sys, w, plan, &o)
            .and_then(|h| completeness_report(&h))
            .map(|r| options.objective.score(&r))
            .unwrap_or(0.0)
    };
    let nominal = score(wf);
    if options.robustness_weight <= 0.0 || nominal == 0.0 {
        return nominal;
    }
    let worst = score(&wf.scaled(0.99, 1.0)).min(score(&wf.scaled(1.01, 1.0)));
    nominal - options.robustness_weight * (nominal - worst).max(0.0)
}

/// Searches field-angle schedules that keep everything else in `template`.
///
/// The template is scored first, then uniformly random schedules, then
/// Nelder–Mead polishes the best schedule found. The result is never worse
/// than the template and depends only on the inputs and `seed`.
pub fn optimize_waveform(
    sys: &SpinSystem,
    template: &ControlWaveform,
    plan: &SamplingPlan,
    budget: usize,
    seed: u64,
    options: &DesignOptions,
) -> Result<DesignOutcome> {
    template.validate()?;
    plan.validate()?;
    if budget == 0 {
        return Err(Error::InvalidArgument("design budget must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&options.restart_fraction) {
        return Err(Error::InvalidArgument("restart_fraction must lie in [0, 1]".into()));
    }
    let with_phi = |phi: &[f64]| ControlWaveform {
        phi: phi.to_vec(),
        ..template.clone()
    };
    let eval = |phi: &[f64]| design_objective(sys, &with_phi(phi), plan, options);

    let template_objective = eval(&template.phi);
    let mut best = (template_objective, template.phi.clone());
    let mut trace = vec![template_objective];

    let remaining = budget - 1;
    let restarts = ((remaining as f64) * options.restart_fraction).round() as usize;
    let candidates: Vec<(f64, Vec<f64>)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let phi = ControlWaveform::random_phases(template.n_steps(), derive_seed(seed ^ STREAM_DESIGN, r as u64));
            (eval(&phi), phi)
        })
        .collect();
    for (score, phi) in candidates {
        // strict improvement keeps the earliest candidate on ties
        if score > best.0 {
            best = (score, phi);
        }
        trace.push(best.0);
    }

    let polish = remaining - restarts;
    if polish > 0 {
        let n = template.n_steps();
        let nm = NelderMead {
            max_evals: polish,
            x_tol: 1e-10,
            f_tol: 0.0,
        };
        let m = nm.minimize(
            |phi| -eval(phi),
            &best.1,
            &vec![0.5; n],
            &vec![-100.0; n],
            &vec![100.0; n],
        );
        for v in &m.best_trace {
            trace.push(best.0.max(-v));
        }
        if -m.value > best.0 {
            best = (-m.value, m.x);
        }
    }

    Ok(DesignOutcome {
        waveform: with_phi(&best.1),
        objective: best.0,
        template_objective,
        evaluations: trace.len(),
        best_trace: trace,
    })
}

//! Repeated noisy reconstructions and their fidelity statistics.

use rayon::prelude::*;

use crate::dynamics::ObservableHistory;
use crate::error::{Error, Result};
use crate::estimator::estimate;
use crate::measurement::synthesize_record;
use crate::metrics;
use crate::rng::derive_seed;
use crate::spin::DensityMatrix;

/// One reconstruction of one state from one noise realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub trial: usize,
    pub state: String,
    pub seed: u64,
    pub fidelity: f64,
}

/// Runs `n_trials` noise seeds over every labelled state.
///
/// Trial `t` draws its noise from `derive_seed(base_seed, t)` for every
/// state. Trials run concurrently; rows come back ordered by trial, then by
/// position in `states`.
pub fn run_trials(
    history: &ObservableHistory,
    states: &[(String, DensityMatrix)],
    sigma: f64,
    n_averaged: u32,
    base_seed: u64,
    n_trials: usize,
) -> Result<Vec<Trial>> {
    let rows: Result<Vec<Vec<Trial>>> = (0..n_trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(base_seed, t as u64);
            states
                .iter()
                .map(|(label, rho)| {
                    let record = synthesize_record(rho, history, sigma, seed, n_averaged)?;
                    let est = estimate(&record, history)?;
                    Ok(Trial {
                        trial: t,
                        state: label.clone(),
                        seed,
                        fidelity: metrics::fidelity(rho.matrix(), est.rho_ml.matrix())?,
                    })
                })
                .collect()
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

/// Mean, median and interquartile range of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

impl Summary {
    /// `None` for an empty sample. Quantiles interpolate linearly between
    /// order statistics.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let pos = p * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
        };
        Some(Self {
            count: v.len(),
            mean: v.iter().sum::<f64>() / v.len() as f64,
            median: q(0.5),
            q1: q(0.25),
            q3: q(0.75),
        })
    }

    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

/// Noise level at which the mean single-record fidelity over `states` and
/// `n_seeds` seeds equals `target`, by bisection in `log σ`.
pub fn calibrate_sigma(
    history: &ObservableHistory,
    states: &[(String, DensityMatrix)],
    n_seeds: usize,
    base_seed: u64,
    target: f64,
) -> Result<f64> {
    if !(0.0 < target && target < 1.0) {
        return Err(Error::InvalidArgument(format!("target fidelity must lie in (0, 1), got {target}")));
    }
    if states.is_empty() || n_seeds == 0 {
        return Err(Error::InvalidArgument("calibration needs at least one state and one seed".into()));
    }
    let mean_at = |sigma: f64| -> Result<f64> {
        let trials = run_trials(history, states, sigma, 1, base_seed, n_seeds)?;
        Ok(trials.iter().map(|t| t.fidelity).sum::<f64>() / trials.len() as f64)
    };
    let (mut lo, mut hi) = (1e-4f64.ln(), 1e3f64.ln());
    if mean_at(lo.exp())? < target || mean_at(hi.exp())? > target {
        return Err(Error::InvalidArgument(format!(
            "target fidelity {target} not bracketed by sigma in [1e-4, 1e3]"
        )));
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if mean_at(mid.exp())? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{heisenberg_history, ControlWaveform, SamplingPlan};
    use crate::spin::{SpinSystem, TestState};

    fn setup() -> (ObservableHistory, Vec<(String, DensityMatrix)>) {
        let sys = SpinSystem::new(3.0).unwrap();
        let wf = ControlWaveform::standard(7);
        let h = heisenberg_history(&sys, &wf, &SamplingPlan::default(), &sys.measured_observable()).unwrap();
        let states = TestState::reference_set(&sys)
            .into_iter()
            .map(|s| (s.label(), s.prepare(&sys).unwrap()))
            .collect();
        (h, states)
    }

    #[test]
    fn summary_quantiles() {
        let s = Summary::of(&[4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!((s.count, s.mean, s.median, s.q1, s.q3), (5, 3.0, 3.0, 2.0, 4.0));
        assert_eq!(Summary::of(&[1.0, 2.0]).unwrap().median, 1.5);
        assert!(Summary::of(&[]).is_none());
    }

    #[test]
    fn trials_are_ordered_and_reproducible() {
        let (h, states) = setup();
        let a = run_trials(&h, &states, 0.5, 1, 3, 6).unwrap();
        assert_eq!(a.len(), 18);
        for (i, t) in a.iter().enumerate() {
            assert_eq!(t.trial, i / 3);
            assert_eq!(t.state, states[i % 3].0);
        }
        assert_eq!(a, run_trials(&h, &states, 0.5, 1, 3, 6).unwrap());
        assert!(run_trials(&h, &states, 0.5, 1, 3, 0).unwrap().is_empty());
    }

    #[test]
    fn noiseless_trials_are_exact() {
        let (h, states) = setup();
        let trials = run_trials(&h, &states, 0.0, 1, 0, 2).unwrap();
        assert!(trials.iter().all(|t| t.fidelity > 1.0 - 1e-6));
    }

    #[test]
    fn calibration_hits_its_target() {
        let (h, states) = setup();
        let sigma = calibrate_sigma(&h, &states, 4, 11, 0.9).unwrap();
        let trials = run_trials(&h, &states, sigma, 1, 11, 4).unwrap();
        let mean = trials.iter().map(|t| t.fidelity).sum::<f64>() / trials.len() as f64;
        assert!((mean - 0.9).abs() < 1e-3, "{mean}");
        assert!(calibrate_sigma(&h, &states, 4, 11, 1.5).is_err());
    }
}

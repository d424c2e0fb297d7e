//! Calibrate the noise level to a target fidelity, then sweep many seeds.

use spin_tomography::dynamics::{heisenberg_history, ControlWaveform, SamplingPlan};
use spin_tomography::spin::{SpinSystem, TestState};
use spin_tomography::sweep::{calibrate_sigma, run_trials, Summary};

fn main() -> spin_tomography::Result<()> {
    let sys = SpinSystem::new(3.0)?;
    let wf = ControlWaveform::standard(7);
    let history = heisenberg_history(&sys, &wf, &SamplingPlan::default(), &sys.measured_observable())?;
    let states: Vec<_> = TestState::reference_set(&sys)
        .into_iter()
        .map(|s| Ok((s.label(), s.prepare(&sys)?)))
        .collect::<spin_tomography::Result<_>>()?;

    let sigma = calibrate_sigma(&history, &states, 8, 99, 0.86)?;
    println!("calibrated sigma {sigma:.4}");

    for n in [1, 8, 64] {
        let rows = run_trials(&history, &states, sigma, n, 5, 40)?;
        let f: Vec<f64> = rows.iter().map(|r| r.fidelity).collect();
        let s = Summary::of(&f).unwrap();
        println!("n_averaged {n:>3}: mean {:.4} median {:.4} iqr {:.4}", s.mean, s.median, s.iqr());
    }
    Ok(())
}

//! Simulate a noisy record for a cat state and reconstruct it.

use spin_tomography::dynamics::{heisenberg_history, ControlWaveform, SamplingPlan};
use spin_tomography::estimator::estimate;
use spin_tomography::measurement::synthesize_record;
use spin_tomography::metrics;
use spin_tomography::spin::{SpinSystem, TestState};

fn main() -> spin_tomography::Result<()> {
    let sys = SpinSystem::new(3.0)?;
    let wf = ControlWaveform::standard(7);
    let plan = SamplingPlan::default();
    let history = heisenberg_history(&sys, &wf, &plan, &sys.measured_observable())?;
    let rho = TestState::Cat.prepare(&sys)?;

    for sigma in [0.0, 0.1, 0.5, 1.0] {
        let record = synthesize_record(&rho, &history, sigma, 2024, 1)?;
        let est = estimate(&record, &history)?;
        println!(
            "sigma {sigma:<4} rank {} residual {:.3e} fidelity {:.5}",
            est.rank,
            est.residual_norm,
            metrics::fidelity(rho.matrix(), est.rho_ml.matrix())?
        );
    }
    Ok(())
}

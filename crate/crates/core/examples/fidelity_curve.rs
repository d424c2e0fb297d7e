//! Fidelity as a function of how much of the record is used.

use spin_tomography::dynamics::{heisenberg_history, ControlWaveform, SamplingPlan};
use spin_tomography::estimator::estimate_prefix_curve;
use spin_tomography::measurement::synthesize_record;
use spin_tomography::spin::{SpinSystem, TestState};

fn main() -> spin_tomography::Result<()> {
    let sys = SpinSystem::new(3.0)?;
    let wf = ControlWaveform { gamma_dec: 10.0, ..ControlWaveform::standard(7) };
    let plan = SamplingPlan::default();
    let history = heisenberg_history(&sys, &wf, &plan, &sys.measured_observable())?;
    let rho = TestState::BasisState { m: -3.0 }.prepare(&sys)?;
    let record = synthesize_record(&rho, &history, 0.3, 1, 1)?;

    println!("samples  time[ms]  fidelity  lambda_max");
    for p in estimate_prefix_curve(&record, &history, &rho, &sys, &wf, &plan, 15)? {
        println!("{:>7}  {:>8.3}  {:>8.4}  {:>10.4}", p.samples, p.time * 1e3, p.fidelity, p.max_eigenvalue);
    }
    Ok(())
}

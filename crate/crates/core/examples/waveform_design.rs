//! Improve a random field-angle schedule for conditioning.

use spin_tomography::design::{completeness_report, optimize_waveform, DesignOptions, Objective};
use spin_tomography::dynamics::{heisenberg_history, ControlWaveform, SamplingPlan};
use spin_tomography::spin::SpinSystem;

fn main() -> spin_tomography::Result<()> {
    let sys = SpinSystem::new(3.0)?;
    let plan = SamplingPlan::default();
    let template = ControlWaveform::standard(7);

    for objective in [Objective::MinSingularValue, Objective::InverseCondition] {
        let options = DesignOptions { objective, ..DesignOptions::default() };
        let out = optimize_waveform(&sys, &template, &plan, 60, 7, &options)?;
        let h = heisenberg_history(&sys, &out.waveform, &plan, &sys.measured_observable())?;
        let report = completeness_report(&h)?;
        println!(
            "{objective:?}: {:.4e} -> {:.4e} after {} evaluations, rank {}/{}",
            out.template_objective, out.objective, out.evaluations, report.rank, report.required
        );
    }
    Ok(())
}

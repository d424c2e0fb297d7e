//! Recover a miscalibrated Larmor frequency along with the state.

use spin_tomography::dynamics::{heisenberg_history, ControlWaveform, SamplingPlan};
use spin_tomography::estimator::{estimate, estimate_with_nuisance, NuisanceParam, NuisanceSearch};
use spin_tomography::measurement::synthesize_record;
use spin_tomography::metrics;
use spin_tomography::random::random_pure_state;
use spin_tomography::spin::SpinSystem;

fn main() -> spin_tomography::Result<()> {
    let sys = SpinSystem::new(3.0)?;
    let plan = SamplingPlan::default();
    let nominal = ControlWaveform::standard(7);
    let truth = nominal.scaled(1.02, 1.0);
    let rho = random_pure_state(sys.dim(), 11);

    let true_history = heisenberg_history(&sys, &truth, &plan, &sys.measured_observable())?;
    let mut record = synthesize_record(&rho, &true_history, 0.05, 3, 1)?;
    let nominal_history = heisenberg_history(&sys, &nominal, &plan, &sys.measured_observable())?;
    // the lab only knows the nominal schedule
    record.waveform_fingerprint = nominal_history.fingerprint().to_string();

    let naive = estimate(&record, &nominal_history)?;
    println!("ignoring drift: fidelity {:.4}", metrics::fidelity(rho.matrix(), naive.rho_ml.matrix())?);

    let search = NuisanceSearch {
        params: vec![NuisanceParam::parse("omega_scale=0.95:1.05")?],
        budget: 120,
    };
    let fit = estimate_with_nuisance(&record, &sys, &nominal, &plan, &search)?;
    if let Some(n) = &fit.nuisance {
        println!("fitted {:?} in {} evaluations", n.values, n.evaluations);
    }
    println!("with drift fit: fidelity {:.4}", metrics::fidelity(rho.matrix(), fit.rho_ml.matrix())?);
    Ok(())
}

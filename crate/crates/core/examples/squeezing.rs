//! Transverse spin variance of a one-axis-twisted coherent state.

use spin_tomography::metrics::SpinMoments;
use spin_tomography::spin::{SpinSystem, TestState};

fn main() -> spin_tomography::Result<()> {
    let sys = SpinSystem::new(3.0)?;
    println!("coherent limit F/2 = {}", sys.f() / 2.0);
    for i in 0..=10 {
        let mu = 0.03 * i as f64;
        let rho = TestState::Twisted { mu }.prepare(&sys)?;
        let m = SpinMoments::of_state(rho.matrix(), &sys);
        let len = m.mean.iter().map(|x| x * x).sum::<f64>().sqrt();
        println!("mu {mu:.2}  |<F>| {len:.4}  min var {:.4}", m.min_transverse_variance());
    }
    Ok(())
}

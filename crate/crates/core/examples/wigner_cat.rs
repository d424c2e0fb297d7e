//! Spherical Wigner function of a spin cat state, written as CSV.
//!
//! Run with an output path to keep the grid:
//! `cargo run --example wigner_cat -- cat.csv`

use spin_tomography::spin::{SpinSystem, TestState};
use spin_tomography::wigner::wigner_function;

fn main() -> spin_tomography::Result<()> {
    let sys = SpinSystem::new(3.0)?;
    let rho = TestState::Cat.prepare(&sys)?;
    let grid = wigner_function(&rho, &sys, 91, 180)?;

    let values: Vec<f64> = grid.to_csv().lines().skip(1).filter_map(|l| l.rsplit(',').next()?.parse().ok()).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!("integral {:.8}", grid.integral());
    println!("range [{min:.4}, {max:.4}]");

    if let Some(path) = std::env::args().nth(1) {
        grid.write_csv(&path)?;
        println!("wrote {path}");
    }
    Ok(())
}

//! Angular-momentum algebra for a spin-3 system.

use spin_tomography::linalg;
use spin_tomography::spin::{HermitianBasis, SpinSystem};

fn main() -> spin_tomography::Result<()> {
    let sys = SpinSystem::new(3.0)?;
    let (fx, fy, fz) = (sys.fx(), sys.fy(), sys.fz());

    let casimir = fx * fx + fy * fy + fz * fz;
    let f = sys.f();
    let expected = linalg::identity(sys.dim()).scale(f * (f + 1.0));
    println!("dim = {}", sys.dim());
    println!("|F² - F(F+1)| = {:.2e}", linalg::frobenius(&(casimir - expected)));

    let comm = linalg::commutator(fx, fy) - fz * num_complex::Complex64::new(0.0, 1.0);
    println!("|[Fx,Fy] - iFz| = {:.2e}", linalg::frobenius(&comm));

    let o = sys.measured_observable();
    println!("Tr O = {:.2e}, |O| = {:.4}", linalg::trace(&o).norm(), linalg::frobenius(&o));

    let basis = HermitianBasis::new(sys.dim());
    let x = basis.coords(&o)?;
    let nonzero = x.iter().filter(|v| v.abs() > 1e-12).count();
    println!("O has {nonzero} nonzero coordinates out of {}", basis.len());
    Ok(())
}

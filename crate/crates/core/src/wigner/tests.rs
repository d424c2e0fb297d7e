use super::*;
use crate::random::{random_mixed_state, random_pure_state};
use crate::spin::TestState;

fn f3() -> SpinSystem {
    SpinSystem::new(3.0).unwrap()
}

/// Gauss–Legendre nodes and weights by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    (p0, p1) = (p1, ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf);
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn sphere_integral(w: &WignerFunction) -> f64 {
    let n_phi = 32;
    gauss_legendre(16)
        .iter()
        .map(|&(x, wx)| {
            let theta = x.acos();
            let s: f64 = (0..n_phi).map(|l| w.value(theta, TAU * l as f64 / n_phi as f64)).sum();
            wx * s * TAU / n_phi as f64
        })
        .sum()
}

#[test]
fn multipoles_are_orthonormal() {
    for two_f in 1..=6 {
        let sys = SpinSystem::from_twice(two_f);
        let t = MultipoleOperators::new(&sys);
        assert_eq!(t.len(), sys.dim() * sys.dim());
        let all: Vec<_> = t.iter().collect();
        for (k, q, a) in &all {
            for (k2, q2, b) in &all {
                let ip = linalg::trace_product(&a.adjoint(), b);
                let want = if (k, q) == (k2, q2) { 1.0 } else { 0.0 };
                assert!((ip - linalg::c(want)).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn low_rank_multipoles() {
    let sys = f3();
    let t = MultipoleOperators::new(&sys);
    let t00 = t.get(0, 0).unwrap();
    assert!(linalg::frobenius(&(t00 - CMatrix::identity(7, 7).scale(1.0 / 7f64.sqrt()))) < 1e-14);
    let f = sys.f();
    let c = (3.0 / (f * (f + 1.0) * (2.0 * f + 1.0))).sqrt();
    assert!(linalg::frobenius(&(t.get(1, 0).unwrap() - sys.fz().scale(c))) < 1e-12);
    for k in 0..=6 {
        for q in 1..=k as i64 {
            let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
            let lhs = t.get(k, -q).unwrap();
            let rhs = t.get(k, q).unwrap().adjoint().scale(sign);
            assert!(linalg::frobenius(&(lhs - rhs)) < 1e-12);
        }
    }
    assert!(t.get(2, 3).is_none() && t.get(7, 0).is_none());
}

#[test]
fn maximally_mixed_is_flat() {
    let sys = f3();
    let g = wigner_function(&DensityMatrix::maximally_mixed(7), &sys, 19, 24).unwrap();
    let target = 1.0 / (4.0 * PI);
    assert!(g.values.iter().all(|v| (v - target).abs() < 1e-14));
}

#[test]
fn normalization_two_ways() {
    let sys = f3();
    for seed in 0..5 {
        for rho in [random_pure_state(7, seed), random_mixed_state(7, 3, 40 + seed)] {
            let w = WignerFunction::new(&rho, &sys).unwrap();
            assert!((sphere_integral(&w) - 1.0).abs() < 1e-10);
            assert!((w.grid(181, 360).unwrap().integral() - 1.0).abs() < 1e-10);
            assert!((w.grid(9, 8).unwrap().integral() - 1.0).abs() < 1e-10);
        }
    }
}

fn argmax_row(g: &WignerGrid) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..g.n_theta() {
        for l in 0..g.n_phi() {
            if g.values[(i, l)] > best.1 {
                best = (i, g.values[(i, l)]);
            }
        }
    }
    best.0
}

#[test]
fn stretched_state_peaks_at_the_north_pole() {
    let sys = f3();
    let rho = TestState::BasisState { m: 3.0 }.prepare(&sys).unwrap();
    let g = wigner_function(&rho, &sys, 91, 36).unwrap();
    assert_eq!(argmax_row(&g), 0);
    let south = TestState::BasisState { m: -3.0 }.prepare(&sys).unwrap();
    let g = wigner_function(&south, &sys, 91, 36).unwrap();
    assert_eq!(argmax_row(&g), 90);
}

#[test]
fn coherent_state_peaks_along_its_direction() {
    let sys = f3();
    let (theta, phi) = (1.1, 2.0);
    let rho = TestState::SpinCoherent { theta, phi }.prepare(&sys).unwrap();
    let w = WignerFunction::new(&rho, &sys).unwrap();
    let peak = w.value(theta, phi);
    for (dt, dp) in [(0.05, 0.0), (-0.05, 0.0), (0.0, 0.05), (0.0, -0.05), (0.4, 1.0)] {
        assert!(w.value(theta + dt, phi + dp) < peak);
    }
}

#[test]
fn z_rotation_shifts_azimuth() {
    let sys = f3();
    let rho = random_mixed_state(7, 2, 9);
    let n_phi = 36;
    let shift = 5;
    let alpha = TAU * shift as f64 / n_phi as f64;
    let u = linalg::expm_hermitian(sys.fz(), alpha);
    let rotated = rho.conjugate(&u);
    let a = wigner_function(&rho, &sys, 19, n_phi).unwrap();
    let b = wigner_function(&rotated, &sys, 19, n_phi).unwrap();
    for i in 0..19 {
        for l in 0..n_phi {
            let src = (l + n_phi - shift) % n_phi;
            assert!((b.values[(i, l)] - a.values[(i, src)]).abs() < 1e-12);
        }
    }
}

#[test]
fn linear_in_the_state() {
    let sys = f3();
    let r1 = random_mixed_state(7, 2, 1);
    let r2 = random_pure_state(7, 2);
    let a = 0.3;
    let mix = DensityMatrix::new(r1.matrix().scale(a) + r2.matrix().scale(1.0 - a)).unwrap();
    let g1 = wigner_function(&r1, &sys, 13, 12).unwrap();
    let g2 = wigner_function(&r2, &sys, 13, 12).unwrap();
    let gm = wigner_function(&mix, &sys, 13, 12).unwrap();
    let expected = g1.values.scale(a) + g2.values.scale(1.0 - a);
    assert!((gm.values - expected).amax() < 1e-12);
}

#[test]
fn cat_state_lobes_and_fringes() {
    let sys = f3();
    let rho = TestState::Cat.prepare(&sys).unwrap();
    let w = WignerFunction::new(&rho, &sys).unwrap();
    assert!(w.value(0.0, 0.0) > 0.0 && w.value(PI, 0.0) > 0.0);
    let n = 720;
    let eq: Vec<f64> = (0..n).map(|l| w.value(PI / 2.0, TAU * l as f64 / n as f64)).collect();
    let changes = (0..n).filter(|&l| eq[l].signum() != eq[(l + 1) % n].signum()).count();
    assert_eq!(changes, 12);
}

#[test]
fn csv_layout() {
    let sys = SpinSystem::new(0.5).unwrap();
    let g = wigner_function(&DensityMatrix::maximally_mixed(2), &sys, 8, 8).unwrap();
    let csv = g.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# n_theta=8 n_phi=8 convention="));
    assert_eq!(lines[1], "theta,phi,w");
    assert_eq!(lines.len(), 2 + 64);
    assert!(wigner_function(&DensityMatrix::maximally_mixed(2), &sys, 7, 8).is_err());
}

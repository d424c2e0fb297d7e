use std::f64::consts::PI;

/// Orthonormal associated Legendre values `P̄_k^q(cos θ)` for `0 ≤ q ≤ k ≤ kmax`,
/// Condon–Shortley phase included, so that `Y_kq = P̄_k^q e^{iqφ}`.
///
/// Indexed as `out[k][q]`.
pub fn normalized_legendre(kmax: usize, theta: f64) -> Vec<Vec<f64>> {
    let (s, x) = theta.sin_cos();
    let mut p: Vec<Vec<f64>> = (0..=kmax).map(|k| vec![0.0; k + 1]).collect();
    p[0][0] = (1.0 / (4.0 * PI)).sqrt();
    for q in 1..=kmax {
        let qf = q as f64;
        p[q][q] = -((2.0 * qf + 1.0) / (2.0 * qf)).sqrt() * s * p[q - 1][q - 1];
    }
    for q in 0..kmax {
        let qf = q as f64;
        p[q + 1][q] = (2.0 * qf + 3.0).sqrt() * x * p[q][q];
    }
    for q in 0..=kmax {
        let qf = q as f64;
        for k in (q + 2)..=kmax {
            let kf = k as f64;
            let a = ((4.0 * kf * kf - 1.0) / (kf * kf - qf * qf)).sqrt();
            let b = (((kf - 1.0).powi(2) - qf * qf) / (4.0 * (kf - 1.0).powi(2) - 1.0)).sqrt();
            p[k][q] = a * (x * p[k - 1][q] - b * p[k - 2][q]);
        }
    }
    p
}

/// Clenshaw–Curtis weights for the nodes `cos(jπ/n)`, `j = 0 … n`.
///
/// Exact for polynomials of degree ≤ n on `[−1, 1]`.
pub fn clenshaw_curtis(n: usize) -> Vec<f64> {
    assert!(n >= 1);
    let nf = n as f64;
    (0..=n)
        .map(|j| {
            let c = if j == 0 || j == n { 1.0 } else { 2.0 };
            let mut sum = 0.0;
            for k in 1..=n / 2 {
                let b = if 2 * k == n { 1.0 } else { 2.0 };
                let kf = k as f64;
                sum += b / (4.0 * kf * kf - 1.0) * (2.0 * kf * j as f64 * PI / nf).cos();
            }
            c / nf * (1.0 - sum)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_closed_forms() {
        for theta in [0.0, 0.3, 1.2, 2.9, PI] {
            let p = normalized_legendre(2, theta);
            let (s, c) = (f64::sin(theta), f64::cos(theta));
            let checks = [
                (p[1][0], (3.0 / (4.0 * PI)).sqrt() * c),
                (p[1][1], -(3.0 / (8.0 * PI)).sqrt() * s),
                (p[2][0], (5.0 / (16.0 * PI)).sqrt() * (3.0 * c * c - 1.0)),
                (p[2][1], -(15.0 / (8.0 * PI)).sqrt() * s * c),
                (p[2][2], (15.0 / (32.0 * PI)).sqrt() * s * s),
            ];
            for (got, want) in checks {
                assert!((got - want).abs() < 1e-14, "{theta}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn clenshaw_curtis_integrates_polynomials() {
        for n in [1usize, 2, 5, 8, 12] {
            let w = clenshaw_curtis(n);
            let xs: Vec<f64> = (0..=n).map(|j| (j as f64 * PI / n as f64).cos()).collect();
            for deg in 0..=n {
                let got: f64 = w.iter().zip(&xs).map(|(w, x)| w * x.powi(deg as i32)).sum();
                let want = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg}: {got}");
            }
        }
    }
}

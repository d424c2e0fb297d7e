//! Derivative-free minimization over a box.

/// Nelder–Mead settings.
#[derive(Debug, Clone, PartialEq)]
pub struct NelderMead {
    /// Objective evaluations allowed, including the initial simplex.
    pub max_evals: usize,
    /// Converged once every vertex lies within this distance of the best one, per coordinate.
    pub x_tol: f64,
    /// Also required for convergence: vertex values within this of the best value,
    /// relative once the best value exceeds one.
    pub f_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_evals: 200,
            x_tol: 1e-8,
            f_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Best value seen after each evaluation.
    pub best_trace: Vec<f64>,
}

struct Counter<F> {
    f: F,
    lower: Vec<f64>,
    upper: Vec<f64>,
    evals: usize,
    best_x: Vec<f64>,
    best: f64,
    trace: Vec<f64>,
}

impl<F: FnMut(&[f64]) -> f64> Counter<F> {
    fn clamp(&self, x: &mut [f64]) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = xi.clamp(self.lower[i], self.upper[i]);
        }
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        let mut v = (self.f)(x);
        if v.is_nan() {
            v = f64::INFINITY;
        }
        self.evals += 1;
        if v < self.best {
            self.best = v;
            self.best_x = x.to_vec();
        }
        self.trace.push(self.best);
        v
    }
}

impl NelderMead {
    /// Minimizes `f` inside `[lower, upper]`, starting from `x0` with
    /// initial simplex edges `step`. Trial points are clamped to the box.
    pub fn minimize<F>(&self, f: F, x0: &[f64], step: &[f64], lower: &[f64], upper: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = x0.len();
        assert!(n >= 1 && step.len() == n && lower.len() == n && upper.len() == n);
        let mut c = Counter {
            f,
            lower: lower.to_vec(),
            upper: upper.to_vec(),
            evals: 0,
            best_x: x0.to_vec(),
            best: f64::INFINITY,
            trace: Vec::new(),
        };

        let mut start = x0.to_vec();
        c.clamp(&mut start);
        let mut simplex = vec![start.clone()];
        for i in 0..n {
            let mut v = start.clone();
            // step inward when the edge would leave the box
            v[i] = if start[i] + step[i] <= upper[i] { start[i] + step[i] } else { start[i] - step[i] };
            c.clamp(&mut v);
            simplex.push(v);
        }
        let mut values = Vec::with_capacity(n + 1);
        for v in &simplex {
            if c.evals >= self.max_evals {
                values.push(f64::INFINITY);
            } else {
                values.push(c.eval(v));
            }
        }

        let mut converged = false;
        while c.evals < self.max_evals {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let spread_f = values.iter().map(|v| (v - values[0]).abs()).fold(0.0, f64::max);
            let spread_x = simplex[1..]
                .iter()
                .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if spread_f <= self.f_tol * values[0].abs().max(1.0) && spread_x <= self.x_tol {
                converged = true;
                break;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
                .collect();
            let toward = |t: f64| -> Vec<f64> {
                (0..n).map(|j| centroid[j] + t * (simplex[n][j] - centroid[j])).collect()
            };

            let mut xr = toward(-1.0);
            c.clamp(&mut xr);
            let fr = c.eval(&xr);
            if fr < values[0] {
                if c.evals >= self.max_evals {
                    simplex[n] = xr;
                    values[n] = fr;
                    break;
                }
                let mut xe = toward(-2.0);
                c.clamp(&mut xe);
                let fe = c.eval(&xe);
                (simplex[n], values[n]) = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < values[n - 1] {
                simplex[n] = xr;
                values[n] = fr;
                continue;
            }
            if c.evals >= self.max_evals {
                break;
            }
            let (mut xc, outside) = if fr < values[n] { (toward(-0.5), true) } else { (toward(0.5), false) };
            c.clamp(&mut xc);
            let fc = c.eval(&xc);
            if (outside && fc <= fr) || (!outside && fc < values[n]) {
                simplex[n] = xc;
                values[n] = fc;
                continue;
            }
            for i in 1..=n {
                if c.evals >= self.max_evals {
                    break;
                }
                let shrunk: Vec<f64> = (0..n).map(|j| simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j])).collect();
                values[i] = c.eval(&shrunk);
                simplex[i] = shrunk;
            }
        }

        Minimum {
            x: c.best_x,
            value: c.best,
            evaluations: c.evals,
            converged,
            best_trace: c.trace,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn finds_rosenbrock_minimum() {
        let nm = NelderMead {
            max_evals: 2000,
            ..Default::default()
        };
        let m = nm.minimize(rosenbrock, &[-1.2, 1.0], &[0.5, 0.5], &[-5.0, -5.0], &[5.0, 5.0]);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{:?}", m.x);
    }

    #[test]
    fn respects_bounds() {
        let nm = NelderMead::default();
        let m = nm.minimize(|x| (x[0] - 3.0).powi(2), &[0.0], &[0.5], &[-1.0], &[1.0]);
        assert!((m.x[0] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn budget_and_monotone_trace() {
        let nm = NelderMead {
            max_evals: 37,
            ..Default::default()
        };
        let m = nm.minimize(rosenbrock, &[-1.2, 1.0], &[0.5, 0.5], &[-5.0, -5.0], &[5.0, 5.0]);
        assert_eq!(m.evaluations, 37);
        assert!(!m.converged);
        assert_eq!(m.best_trace.len(), 37);
        assert!(m.best_trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*m.best_trace.last().unwrap(), m.value);
    }

    #[test]
    fn deterministic() {
        let nm = NelderMead::default();
        let a = nm.minimize(rosenbrock, &[0.3, -0.2], &[0.1, 0.1], &[-2.0, -2.0], &[2.0, 2.0]);
        let b = nm.minimize(rosenbrock, &[0.3, -0.2], &[0.1, 0.1], &[-2.0, -2.0], &[2.0, 2.0]);
        assert_eq!(a, b);
    }
}

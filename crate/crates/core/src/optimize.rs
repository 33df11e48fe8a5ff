//! Derivative-free Nelder–Mead simplex minimization.

use std::cell::Cell;

/// Settings for [`NelderMead::minimize`].
#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    /// Maximum objective evaluations, restarts included.
    pub max_evaluations: usize,
    /// Converged once the spread of objective values across the simplex
    /// falls to this (absolute) level and a restart brings no improvement.
    pub tolerance: f64,
    /// Edge length of the initial simplex along each coordinate.
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            max_evaluations: 10_000,
            tolerance: 1e-9,
            initial_step: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl NelderMead {
    pub fn minimize<F>(&self, mut objective: F, start: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let evaluations = Cell::new(0usize);
        let mut eval = |x: &[f64]| {
            evaluations.set(evaluations.get() + 1);
            let v = objective(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };

        let mut best_point = start.to_vec();
        let mut best_value = eval(start);
        let mut step = self.initial_step;
        let mut converged = false;

        while evaluations.get() < self.max_evaluations {
            let (point, value, settled) = self.run_simplex(&mut eval, &best_point, best_value, step, &evaluations);
            let improvement = best_value - value;
            if value <= best_value {
                best_point = point;
                best_value = value;
            }
            if settled && improvement.abs() <= self.tolerance {
                converged = true;
                break;
            }
            step = (step * 0.5).max(1e-3);
        }

        Minimum {
            point: best_point,
            value: best_value,
            evaluations: evaluations.get(),
            converged,
        }
    }

    fn run_simplex<E>(
        &self,
        eval: &mut E,
        start: &[f64],
        start_value: f64,
        step: f64,
        evaluations: &Cell<usize>,
    ) -> (Vec<f64>, f64, bool)
    where
        E: FnMut(&[f64]) -> f64,
    {
        let n = start.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((start.to_vec(), start_value));
        for i in 0..n {
            let mut p = start.to_vec();
            p[i] += step;
            let v = eval(&p);
            simplex.push((p, v));
        }

        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[n].1 - simplex[0].1;
            if spread <= self.tolerance || (simplex[0].1.is_infinite() && simplex[n].1.is_infinite()) {
                let (p, v) = simplex.swap_remove(0);
                return (p, v, true);
            }
            if evaluations.get() >= self.max_evaluations {
                let (p, v) = simplex.swap_remove(0);
                return (p, v, false);
            }

            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|(p, _)| p[j]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (w - c))
                    .collect()
            };

            let reflected = along(-1.0);
            let fr = eval(&reflected);
            if fr < simplex[0].1 {
                let expanded = along(-2.0);
                let fe = eval(&expanded);
                simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (reflected, fr);
                continue;
            }
            let (contracted, fc) = if fr < simplex[n].1 {
                let c = along(-0.5);
                let f = eval(&c);
                (c, f)
            } else {
                let c = along(0.5);
                let f = eval(&c);
                (c, f)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for (p, v) in simplex.iter_mut().skip(1) {
                for (x, b) in p.iter_mut().zip(&best) {
                    *x = b + 0.5 * (*x - b);
                }
                *v = eval(p);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let nm = NelderMead {
            max_evaluations: 20_000,
            tolerance: 1e-14,
            initial_step: 0.5,
        };
        let m = nm.minimize(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
        );
        assert!(m.converged);
        assert!((m.point[0] - 1.0).abs() < 1e-4, "{:?}", m.point);
        assert!((m.point[1] - 1.0).abs() < 1e-4, "{:?}", m.point);
    }

    #[test]
    fn quadratic_in_four_dimensions() {
        let target = [0.3, -2.0, 5.0, 1.5];
        let m = NelderMead::default().minimize(
            |x| x.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum(),
            &[0.0; 4],
        );
        assert!(m.converged);
        for (a, b) in m.point.iter().zip(&target) {
            assert!((a - b).abs() < 1e-3);
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let nm = NelderMead {
            max_evaluations: 30,
            tolerance: 0.0,
            initial_step: 0.1,
        };
        let m = nm.minimize(|x| (x[0] - 100.0).powi(2) + x[1].abs(), &[0.0, 3.0]);
        assert!(!m.converged);
        assert!(m.evaluations < 40);
    }

    #[test]
    fn nan_is_treated_as_worst() {
        let m = NelderMead::default().minimize(
            |x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 2.0).powi(2) },
            &[1.0],
        );
        assert!((m.point[0] - 2.0).abs() < 1e-3);
    }
}

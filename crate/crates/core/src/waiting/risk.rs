//! Risk functions `R(t) = Σ_{τ≥t} f(τ)` and their rescaled forms.

use super::WaitingTimeDistribution;

/// `R(t)` for `t = 1..=support_len`, held as exact suffix counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiskFunction {
    suffix: Vec<u64>,
    total: u64,
}

impl RiskFunction {
    pub fn support_len(&self) -> usize {
        self.suffix.len()
    }

    /// `R(t)`; one for `t ≤ 1`, zero past the support.
    pub fn value(&self, t: usize) -> f64 {
        if t <= 1 {
            return 1.0;
        }
        self.suffix.get(t - 1).map_or(0.0, |&s| s as f64 / self.total as f64)
    }

    /// `P(τ > t) = R(t + 1)`, for `t ≥ 0`.
    pub fn exceedance(&self, t: usize) -> f64 {
        self.value(t + 1)
    }

    /// `R(t)` for `t = 1..=support_len`.
    pub fn values(&self) -> Vec<f64> {
        (1..=self.suffix.len()).map(|t| self.value(t)).collect()
    }

    /// `f(τ) = R(τ) − R(τ + 1)`, differenced on the exact counts.
    pub fn density(&self) -> Vec<f64> {
        let n = self.total as f64;
        (0..self.suffix.len())
            .map(|i| {
                let next = self.suffix.get(i + 1).copied().unwrap_or(0);
                (self.suffix[i] - next) as f64 / n
            })
            .collect()
    }
}

pub fn risk_function(dist: &WaitingTimeDistribution) -> RiskFunction {
    let mut suffix = dist.counts().to_vec();
    for i in (0..suffix.len().saturating_sub(1)).rev() {
        suffix[i] += suffix[i + 1];
    }
    RiskFunction {
        suffix,
        total: dist.sample_count(),
    }
}

/// A curve over rescaled time `t_R = t·k/T`, with abscissae increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledCurve {
    pub k: u64,
    pub points: Vec<(f64, f64)>,
}

impl RescaledCurve {
    /// Exceedance `P(τ > t)` placed at `t_R = t·k/T` for `t = 0, 1, ...`;
    /// starts at `(0, 1)`, so curves of different classes can be compared
    /// with `exp(−t_R)` on a common origin.
    pub fn exceedance(risk: &RiskFunction, k: u64, horizon: u32) -> Self {
        let scale = k as f64 / f64::from(horizon);
        RescaledCurve {
            k,
            points: (0..=risk.support_len())
                .map(|t| (t as f64 * scale, risk.exceedance(t)))
                .collect(),
        }
    }

    /// Value at `t_R`, interpolated linearly in `ln value` between grid
    /// points (exact for exponential curves), linearly where a value is
    /// zero. `None` outside the grid.
    pub fn value_at(&self, t_r: f64) -> Option<f64> {
        let i = self.points.partition_point(|p| p.0 < t_r);
        let (x1, y1) = *self.points.get(i)?;
        if x1 == t_r || i == 0 {
            return (x1 == t_r).then_some(y1);
        }
        let (x0, y0) = self.points[i - 1];
        let w = (t_r - x0) / (x1 - x0);
        Some(if y0 > 0.0 && y1 > 0.0 {
            (y0.ln() + w * (y1.ln() - y0.ln())).exp()
        } else {
            y0 + w * (y1 - y0)
        })
    }

    /// Largest `|self − g|` over own grid points with `t_R ≤ max_t`.
    pub fn sup_distance_to(&self, g: impl Fn(f64) -> f64, max_t: f64) -> f64 {
        self.points
            .iter()
            .take_while(|p| p.0 <= max_t)
            .map(|&(x, y)| (y - g(x)).abs())
            .fold(0.0, f64::max)
    }

    /// Largest difference over both grids on `[0, max_t]`, each curve
    /// interpolated at the other's points.
    pub fn sup_distance(&self, other: &RescaledCurve, max_t: f64) -> f64 {
        let one_way = |a: &RescaledCurve, b: &RescaledCurve| {
            a.points
                .iter()
                .take_while(|p| p.0 <= max_t)
                .filter_map(|&(x, y)| b.value_at(x).map(|v| (y - v).abs()))
                .fold(0.0, f64::max)
        };
        one_way(self, other).max(one_way(other, self))
    }
}

/// `R(t)` placed at `t_R = t·k/T` for `t = 1..=support_len`.
pub fn rescale_time(risk: &RiskFunction, k: u64, horizon: u32) -> RescaledCurve {
    let scale = k as f64 / f64::from(horizon);
    RescaledCurve {
        k,
        points: (1..=risk.support_len())
            .map(|t| (t as f64 * scale, risk.value(t)))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{WaitingTimeDistribution, WaitingTimeSample};
    use super::*;
    use proptest::prelude::*;

    fn dist(taus: &[u32], support: usize) -> WaitingTimeDistribution {
        WaitingTimeDistribution::from_samples(None, &[WaitingTimeSample { taus: taus.to_vec() }], support).unwrap()
    }

    #[test]
    fn point_mass() {
        let r = risk_function(&dist(&[5], 8));
        assert_eq!(r.values(), [1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(r.exceedance(0), 1.0);
        assert_eq!(r.exceedance(5), 0.0);
    }

    #[test]
    fn geometric_suffix_sums() {
        // Exact geometric weights with p = 1/2 on τ = 1..=10, scaled to integers.
        let mut taus = Vec::new();
        for tau in 1..=10u32 {
            taus.extend(std::iter::repeat_n(tau, 1 << (10 - tau)));
        }
        taus.push(10);
        let r = risk_function(&dist(&taus, 10));
        for t in 1..=10 {
            assert!((r.value(t) - 0.5f64.powi(t as i32 - 1)).abs() < 1e-15);
        }
    }

    #[test]
    fn rescaling_arithmetic() {
        let r = risk_function(&dist(&[1, 2, 4], 6));
        let same = rescale_time(&r, 214, 214);
        assert!(same.points.iter().enumerate().all(|(i, p)| p.0 == (i + 1) as f64));
        let half = rescale_time(&r, 107, 214);
        assert_eq!(half.points[3], (2.0, r.value(4)));
    }

    #[test]
    fn log_linear_interpolation_is_exact_for_exponentials() {
        let c = RescaledCurve {
            k: 1,
            points: (0..10).map(|i| (i as f64 * 0.4, (-(i as f64) * 0.4).exp())).collect(),
        };
        assert!((c.value_at(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-14);
        assert!(c.value_at(-0.1).is_none());
        assert!(c.value_at(10.0).is_none());
        assert!(c.sup_distance_to(|x| (-x).exp(), 3.0) < 1e-15);
    }

    proptest! {
        #[test]
        fn risk_is_a_survival_function(taus in prop::collection::vec(1u32..60, 1..200)) {
            let d = dist(&taus, 59);
            let r = risk_function(&d);
            prop_assert_eq!(r.value(1), 1.0);
            let v = r.values();
            prop_assert!(v.windows(2).all(|w| w[1] <= w[0]));
            prop_assert!(v.iter().all(|&x| x >= 0.0));
            prop_assert_eq!(r.density(), d.probabilities());
        }
    }
}

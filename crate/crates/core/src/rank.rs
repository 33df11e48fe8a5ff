//! Rank-frequency curves and their fits.
//!
//! The main model is the two-exponent law
//!
//! ```text
//! count(x) = A / (1 + a1·x^γ1 + a2·x^γ2),   γ2 > γ1 > 0
//! ```
//!
//! fitted by least squares on `ln count` over at most 500 log-spaced ranks.
//! Pure Zipf `A/x^λ` and Zipf–Mandelbrot `A/(1 + a·x)^ν` fits are provided
//! as baselines; the models are compared by residual only.
//!
//! In every model the amplitude enters `ln count` additively and is solved
//! in closed form for each trial shape, so the simplex only searches the
//! shape parameters.

use serde::Serialize;
use thiserror::Error;

use crate::matrix::WordDayMatrix;
use crate::optimize::NelderMead;

/// Largest number of ranks entering a fit.
pub const MAX_FIT_POINTS: usize = 500;

#[derive(Debug, Error)]
pub enum RankError {
    #[error("rank curve is empty")]
    Empty,
    #[error("rank fit needs at least 100 ranks (two decades), got {0}")]
    InsufficientData(usize),
    #[error("fit did not converge within {evaluations} evaluations (best residual {})", best.residual)]
    FitFailed {
        best: Box<ModifiedPowerLawFit>,
        evaluations: usize,
    },
}

/// Counts sorted by decreasing size; rank `x` is `index + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankCurve {
    counts: Vec<u64>,
    words: Vec<String>,
}

impl RankCurve {
    /// A curve without word labels.
    pub fn from_counts(mut counts: Vec<u64>) -> Result<Self, RankError> {
        counts.retain(|&c| c > 0);
        if counts.is_empty() {
            return Err(RankError::Empty);
        }
        counts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(RankCurve {
            counts,
            words: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count_at(&self, rank: usize) -> Option<u64> {
        rank.checked_sub(1).and_then(|i| self.counts.get(i).copied())
    }

    /// Word at `rank` (1-based), when the curve was built from a matrix.
    pub fn word_at(&self, rank: usize) -> Option<&str> {
        rank.checked_sub(1)
            .and_then(|i| self.words.get(i))
            .map(String::as_str)
    }

    /// `(rank, count)` pairs.
    pub fn points(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().enumerate().map(|(i, &c)| (i + 1, c))
    }

    /// Multiplies every count by `factor`.
    pub fn scaled(&self, factor: u64) -> RankCurve {
        RankCurve {
            counts: self.counts.iter().map(|c| c * factor).collect(),
            words: self.words.clone(),
        }
    }
}

/// Rank curve of the totals `W_α`; ties are ordered by word.
pub fn rank_curve(matrix: &WordDayMatrix) -> Result<RankCurve, RankError> {
    if matrix.is_empty() {
        return Err(RankError::Empty);
    }
    let mut pairs: Vec<(&str, u64)> = matrix.iter().map(|(w, s)| (w, s.total())).collect();
    pairs.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Ok(RankCurve {
        counts: pairs.iter().map(|p| p.1).collect(),
        words: pairs.into_iter().map(|p| p.0.to_string()).collect(),
    })
}

/// Ranks (1-based) used by the fits: every rank when the curve has at most
/// `max_points`, otherwise `max_points` log-spaced ranks with duplicates
/// removed. Always includes rank 1 and the last rank.
pub fn subsample_ranks(len: usize, max_points: usize) -> Vec<usize> {
    if len <= max_points {
        return (1..=len).collect();
    }
    let top = (len as f64).ln();
    let mut ranks: Vec<usize> = (0..max_points)
        .map(|i| {
            let u = i as f64 / (max_points - 1) as f64;
            ((u * top).exp().round() as usize).clamp(1, len)
        })
        .collect();
    ranks.dedup();
    ranks
}

struct LogPoints {
    ln_x: Vec<f64>,
    ln_c: Vec<f64>,
}

impl LogPoints {
    fn new(curve: &RankCurve) -> Self {
        let ranks = subsample_ranks(curve.len(), MAX_FIT_POINTS);
        LogPoints {
            ln_x: ranks.iter().map(|&r| (r as f64).ln()).collect(),
            ln_c: ranks.iter().map(|&r| (curve.counts[r - 1] as f64).ln()).collect(),
        }
    }

    /// For a model `ln c ≈ ln A + shape(x)`, the optimal `ln A` and the
    /// mean squared residual.
    fn profile(&self, shape: impl Fn(f64) -> f64) -> (f64, f64) {
        let n = self.ln_x.len() as f64;
        let diffs: Vec<f64> = self
            .ln_x
            .iter()
            .zip(&self.ln_c)
            .map(|(&lx, &lc)| lc - shape(lx))
            .collect();
        let ln_a = diffs.iter().sum::<f64>() / n;
        let mse = diffs.iter().map(|d| (d - ln_a).powi(2)).sum::<f64>() / n;
        (ln_a, mse)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModifiedPowerLawFit {
    #[serde(rename = "A")]
    pub amplitude: f64,
    pub a1: f64,
    pub a2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Root-mean-square error of `ln count` over the fitted ranks.
    pub residual: f64,
    /// Set for flat curves, where `a1 = a2 = 0` and the exponents carry no
    /// information.
    pub degenerate: bool,
}

impl ModifiedPowerLawFit {
    pub fn predict(&self, rank: f64) -> f64 {
        self.amplitude / (1.0 + self.a1 * rank.powf(self.gamma1) + self.a2 * rank.powf(self.gamma2))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fit serializes")
    }
}

// Shape parameters: (ln a1, ln a2, ln γ1, ln(γ2 - γ1)).
fn decode(theta: &[f64]) -> (f64, f64, f64, f64) {
    let gamma1 = theta[2].exp();
    (theta[0].exp(), theta[1].exp(), gamma1, gamma1 + theta[3].exp())
}

fn modified_shape(a1: f64, a2: f64, g1: f64, g2: f64) -> impl Fn(f64) -> f64 {
    move |lx: f64| -((a1.ln() + g1 * lx).exp() + (a2.ln() + g2 * lx).exp()).ln_1p()
}

/// Fixed starting shapes `(a1, a2, γ1, γ2)` for the multi-start search.
const STARTS: [(f64, f64, f64, f64); 5] = [
    (1.0, 1e-3, 0.5, 1.5),
    (0.1, 1e-4, 1.0, 2.0),
    (1.0, 1e-2, 0.8, 1.2),
    (0.01, 1e-6, 0.5, 2.5),
    (10.0, 1e-3, 1.0, 1.5),
];

pub fn fit_modified_power_law(curve: &RankCurve) -> Result<ModifiedPowerLawFit, RankError> {
    fit_modified_power_law_with(curve, &NelderMead::default())
}

pub fn fit_modified_power_law_with(
    curve: &RankCurve,
    optimizer: &NelderMead,
) -> Result<ModifiedPowerLawFit, RankError> {
    if curve.is_empty() {
        return Err(RankError::Empty);
    }
    if curve.counts.iter().all(|&c| c == curve.counts[0]) {
        return Ok(ModifiedPowerLawFit {
            amplitude: curve.counts[0] as f64,
            a1: 0.0,
            a2: 0.0,
            gamma1: 1.0,
            gamma2: 2.0,
            residual: 0.0,
            degenerate: true,
        });
    }
    if curve.len() < 100 {
        return Err(RankError::InsufficientData(curve.len()));
    }

    let points = LogPoints::new(curve);
    let objective = |theta: &[f64]| {
        let (a1, a2, g1, g2) = decode(theta);
        points.profile(modified_shape(a1, a2, g1, g2)).1
    };

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut any_converged = false;
    let mut evaluations = 0;
    for &(a1, a2, g1, g2) in &STARTS {
        let start = [a1.ln(), a2.ln(), g1.ln(), (g2 - g1).ln()];
        let m = optimizer.minimize(objective, &start);
        evaluations += m.evaluations;
        any_converged |= m.converged;
        if best.as_ref().is_none_or(|b| m.value < b.1) {
            best = Some((m.point, m.value));
        }
    }
    let (theta, _) = best.expect("at least one start");
    let (a1, a2, gamma1, gamma2) = decode(&theta);
    let (ln_amp, mse) = points.profile(modified_shape(a1, a2, gamma1, gamma2));
    let fit = ModifiedPowerLawFit {
        amplitude: ln_amp.exp(),
        a1,
        a2,
        gamma1,
        gamma2,
        residual: mse.sqrt(),
        degenerate: false,
    };
    if any_converged {
        Ok(fit)
    } else {
        Err(RankError::FitFailed {
            best: Box::new(fit),
            evaluations,
        })
    }
}

/// `count = A / x^λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZipfFit {
    #[serde(rename = "A")]
    pub amplitude: f64,
    pub exponent: f64,
    pub residual: f64,
}

/// `count = A / (1 + a·x)^ν`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZipfMandelbrotFit {
    #[serde(rename = "A")]
    pub amplitude: f64,
    pub scale: f64,
    pub exponent: f64,
    pub residual: f64,
}

/// Least-squares line `y = α + β·x`; returns `(α, β, mse)`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let beta = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let alpha = my - beta * mx;
    let mse = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - alpha - beta * a).powi(2))
        .sum::<f64>()
        / n;
    (alpha, beta, mse)
}

pub fn fit_zipf(curve: &RankCurve) -> Result<ZipfFit, RankError> {
    if curve.is_empty() {
        return Err(RankError::Empty);
    }
    let points = LogPoints::new(curve);
    let (alpha, beta, mse) = linear_fit(&points.ln_x, &points.ln_c);
    Ok(ZipfFit {
        amplitude: alpha.exp(),
        exponent: -beta,
        residual: mse.sqrt(),
    })
}

pub fn fit_zipf_mandelbrot(curve: &RankCurve) -> Result<ZipfMandelbrotFit, RankError> {
    if curve.is_empty() {
        return Err(RankError::Empty);
    }
    let points = LogPoints::new(curve);
    let regress = |ln_scale: f64| {
        let scale = ln_scale.exp();
        let z: Vec<f64> = points
            .ln_x
            .iter()
            .map(|&lx| (scale * lx.exp()).ln_1p())
            .collect();
        linear_fit(&z, &points.ln_c)
    };
    let optimizer = NelderMead::default();
    let best = [-6.0, -2.0, 0.0, 3.0]
        .iter()
        .map(|&s| optimizer.minimize(|t| regress(t[0]).2, &[s]))
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("starts are non-empty");
    let (alpha, beta, mse) = regress(best.point[0]);
    Ok(ZipfMandelbrotFit {
        amplitude: alpha.exp(),
        scale: best.point[0].exp(),
        exponent: -beta,
        residual: mse.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::WordSeries;

    fn matrix_with(totals: &[(&str, u32)]) -> WordDayMatrix {
        let mut m = WordDayMatrix::new(1);
        for &(w, c) in totals {
            m.insert(w, WordSeries::from_pairs([(0, c)])).unwrap();
        }
        m
    }

    fn two_exponent_curve(amplitude: f64, n: usize) -> RankCurve {
        let counts = (1..=n)
            .map(|x| {
                let x = x as f64;
                (amplitude / (1.0 + 0.2 * x.powf(0.65) + 0.0004 * x.powf(1.5))).round() as u64
            })
            .collect();
        RankCurve::from_counts(counts).unwrap()
    }

    #[test]
    fn ties_broken_by_word() {
        let c = rank_curve(&matrix_with(&[("c", 3), ("a", 5), ("b", 3)])).unwrap();
        assert_eq!(c.points().collect::<Vec<_>>(), [(1, 5), (2, 3), (3, 3)]);
        assert_eq!(c.word_at(2), Some("b"));
        assert_eq!(c.word_at(3), Some("c"));
    }

    #[test]
    fn single_word_curve() {
        let c = rank_curve(&matrix_with(&[("x", 7)])).unwrap();
        assert_eq!(c.points().collect::<Vec<_>>(), [(1, 7)]);
        let fit = fit_modified_power_law(&c).unwrap();
        assert!(fit.degenerate);
    }

    #[test]
    fn empty_matrix() {
        assert!(matches!(rank_curve(&WordDayMatrix::new(3)), Err(RankError::Empty)));
    }

    #[test]
    fn subsample_is_log_spaced() {
        let r = subsample_ranks(100_000, 500);
        assert!(r.len() <= 500 && r.len() > 300);
        assert_eq!(r[0], 1);
        assert_eq!(*r.last().unwrap(), 100_000);
        assert!(r.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(subsample_ranks(7, 500), [1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn recovers_exact_two_exponent_curve() {
        let fit = fit_modified_power_law(&two_exponent_curve(1e9, 100_000)).unwrap();
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(fit.a1, 0.2) < 0.01, "{fit:?}");
        assert!(rel(fit.a2, 0.0004) < 0.01, "{fit:?}");
        assert!(rel(fit.gamma1, 0.65) < 0.01, "{fit:?}");
        assert!(rel(fit.gamma2, 1.5) < 0.01, "{fit:?}");
        assert!(rel(fit.amplitude, 1e9) < 0.01, "{fit:?}");
    }

    #[test]
    fn pure_power_law_is_reproduced() {
        let gamma = 1.1;
        let counts = (1..=20_000)
            .map(|x| (1e12 * (x as f64).powf(-gamma)).round() as u64)
            .collect();
        let curve = RankCurve::from_counts(counts).unwrap();
        let fit = fit_modified_power_law(&curve).unwrap();
        assert!(fit.residual < 1e-3, "{fit:?}");
        // Local log-log slope of the fitted curve matches the data.
        let slope = (fit.predict(2000.0).ln() - fit.predict(200.0).ln()) / 10f64.ln();
        assert!((slope + gamma).abs() < 0.01, "{fit:?}");
        let zipf = fit_zipf(&curve).unwrap();
        assert!((zipf.exponent - gamma).abs() < 1e-3);
    }

    #[test]
    fn flat_curve_is_degenerate() {
        let curve = RankCurve::from_counts(vec![4; 300]).unwrap();
        let fit = fit_modified_power_law(&curve).unwrap();
        assert!(fit.degenerate);
        assert_eq!((fit.a1, fit.a2, fit.residual), (0.0, 0.0, 0.0));
    }

    #[test]
    fn too_few_ranks() {
        let curve = RankCurve::from_counts((1..50).rev().collect()).unwrap();
        assert!(matches!(
            fit_modified_power_law(&curve),
            Err(RankError::InsufficientData(49))
        ));
    }

    #[test]
    fn scale_equivariance() {
        let curve = two_exponent_curve(1e7, 5_000);
        let base = fit_modified_power_law(&curve).unwrap();
        let scaled = fit_modified_power_law(&curve.scaled(7)).unwrap();
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(scaled.amplitude, 7.0 * base.amplitude) < 1e-4);
        for (a, b) in [
            (scaled.a1, base.a1),
            (scaled.a2, base.a2),
            (scaled.gamma1, base.gamma1),
            (scaled.gamma2, base.gamma2),
        ] {
            assert!(rel(a, b) < 1e-4, "{scaled:?} vs {base:?}");
        }
    }

    #[test]
    fn refit_of_own_output() {
        let first = fit_modified_power_law(&two_exponent_curve(1e9, 50_000)).unwrap();
        let regenerated = (1..=50_000)
            .map(|x| first.predict(x as f64).round() as u64)
            .collect();
        let second = fit_modified_power_law(&RankCurve::from_counts(regenerated).unwrap()).unwrap();
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(second.gamma1, first.gamma1) < 1e-3);
        assert!(rel(second.gamma2, first.gamma2) < 1e-3);
        assert!(rel(second.a1, first.a1) < 1e-2);
        assert!(rel(second.a2, first.a2) < 1e-2);
    }

    #[test]
    fn fitted_curve_is_decreasing() {
        let fit = fit_modified_power_law(&two_exponent_curve(1e9, 10_000)).unwrap();
        let values: Vec<f64> = (1..=10_000).map(|x| fit.predict(x as f64)).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn zipf_mandelbrot_recovers_its_own_law() {
        let counts = (1..=10_000)
            .map(|x| (1e10 / (1.0 + 0.05 * x as f64).powf(1.3)).round() as u64)
            .collect();
        let fit = fit_zipf_mandelbrot(&RankCurve::from_counts(counts).unwrap()).unwrap();
        assert!((fit.scale - 0.05).abs() / 0.05 < 1e-3, "{fit:?}");
        assert!((fit.exponent - 1.3).abs() < 1e-3, "{fit:?}");
        assert!(fit.residual < 1e-4);
    }

    #[test]
    fn json_keys() {
        let fit = fit_modified_power_law(&RankCurve::from_counts(vec![2; 3]).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&fit.to_json()).unwrap();
        for key in ["A", "a1", "a2", "gamma1", "gamma2", "residual"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}

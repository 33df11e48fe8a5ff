//! Dilute-limit statistics: waiting times between successive event-days of
//! a word, pooled per frequency class.
//!
//! A waiting time is a whole number of days `τ ≥ 1`. Several posts on the
//! same day make one event-day, and the open intervals before the first and
//! after the last event-day are dropped.

mod display;
mod fit;
mod moments;
mod risk;

pub use display::{log_binned, LogBin};
pub use fit::{fit_stretched_exponential, fit_stretched_exponential_with, StretchedExpFit, MAX_FIT_SUPPORT};
pub use moments::{
    bootstrap_zeta, mean_waiting_check, zeta, zeta_of_values, ExponentialMixture, MeanCheck, ZetaStat,
    LOW_SAMPLE_THRESHOLD,
};
pub use risk::{rescale_time, risk_function, RescaledCurve, RiskFunction};

use thiserror::Error;

use crate::ensembles::Ensemble;
use crate::matrix::{WordDayMatrix, WordSeries};
use crate::stretched::LawError;

#[derive(Debug, Error)]
pub enum WaitingError {
    #[error("no waiting times to pool")]
    EmptySample,
    #[error("need at least 2 waiting times, got {0}")]
    TooFewSamples(usize),
    #[error("ensemble k={k} is not dilute for horizon {horizon}")]
    NotDilute { k: u64, horizon: u32 },
    #[error("no dilute ensemble given")]
    NoEnsembles,
    #[error("fit needs at least 10 support points with R > 1e-4, got {0}")]
    InsufficientSupport(usize),
    #[error("fit did not converge within {evaluations} evaluations (best a={}, nu={})", best.a, best.nu)]
    FitFailed {
        best: Box<StretchedExpFit>,
        evaluations: usize,
    },
    #[error(transparent)]
    Law(#[from] LawError),
}

/// Waiting times of one word, in order of occurrence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WaitingTimeSample {
    pub taus: Vec<u32>,
}

impl WaitingTimeSample {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// `(n, Σ τ, Σ τ²)`.
    pub fn sums(&self) -> (u64, u128, u128) {
        self.taus.iter().fold((0, 0, 0), |(n, s1, s2), &t| {
            let t = u128::from(t);
            (n + 1, s1 + t, s2 + t * t)
        })
    }
}

/// Differences of consecutive event-days. Fewer than two event-days give
/// an empty sample.
pub fn waiting_times(series: &WordSeries) -> WaitingTimeSample {
    let days: Vec<u32> = series.event_days().collect();
    WaitingTimeSample {
        taus: days.windows(2).map(|w| w[1] - w[0]).collect(),
    }
}

/// One sample per word of the ensemble, in word order.
pub fn ensemble_samples(ensemble: &Ensemble, matrix: &WordDayMatrix) -> Vec<WaitingTimeSample> {
    ensemble
        .words
        .iter()
        .filter_map(|w| matrix.get(w))
        .map(waiting_times)
        .collect()
}

/// Pooled waiting-time histogram. `counts[τ - 1]` is the number of waiting
/// times equal to `τ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaitingTimeDistribution {
    /// Class of origin; `None` for a pool over several classes.
    pub k: Option<u64>,
    counts: Vec<u64>,
    sample_count: u64,
}

impl WaitingTimeDistribution {
    /// Pools `samples`; the support is at least `1..=min_support`.
    pub fn from_samples<'a, I>(k: Option<u64>, samples: I, min_support: usize) -> Result<Self, WaitingError>
    where
        I: IntoIterator<Item = &'a WaitingTimeSample>,
    {
        let mut counts = vec![0u64; min_support];
        let mut sample_count = 0;
        for s in samples {
            for &tau in &s.taus {
                debug_assert!(tau >= 1);
                let i = tau as usize - 1;
                if i >= counts.len() {
                    counts.resize(i + 1, 0);
                }
                counts[i] += 1;
                sample_count += 1;
            }
        }
        if sample_count == 0 {
            return Err(WaitingError::EmptySample);
        }
        Ok(WaitingTimeDistribution {
            k,
            counts,
            sample_count,
        })
    }

    pub fn sample_count(&self) -> u64 {
        self.sample_count
    }

    /// Largest `τ` of the support.
    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, tau: usize) -> u64 {
        tau.checked_sub(1)
            .and_then(|i| self.counts.get(i).copied())
            .unwrap_or(0)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn f(&self, tau: usize) -> f64 {
        self.count(tau) as f64 / self.sample_count as f64
    }

    /// `f(τ)` for `τ = 1..=support_len`.
    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.sample_count as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// `(n, Σ τ, Σ τ²)` over the pooled sample.
    pub fn sums(&self) -> (u64, u128, u128) {
        let (mut s1, mut s2) = (0u128, 0u128);
        for (i, &c) in self.counts.iter().enumerate() {
            let t = i as u128 + 1;
            s1 += t * u128::from(c);
            s2 += t * t * u128::from(c);
        }
        (self.sample_count, s1, s2)
    }

    pub fn mean(&self) -> f64 {
        let (n, s1, _) = self.sums();
        s1 as f64 / n as f64
    }
}

/// Waiting times of every word of `E_k`, pooled.
pub fn ensemble_distribution(
    ensemble: &Ensemble,
    matrix: &WordDayMatrix,
) -> Result<WaitingTimeDistribution, WaitingError> {
    let horizon = matrix.horizon();
    if ensemble.k >= u64::from(horizon) {
        return Err(WaitingError::NotDilute {
            k: ensemble.k,
            horizon,
        });
    }
    let samples = ensemble_samples(ensemble, matrix);
    WaitingTimeDistribution::from_samples(Some(ensemble.k), &samples, support_for(horizon))
}

/// Waiting times of every word of every listed ensemble, pooled with no
/// rescaling. Mixing classes of different rates fattens the tail even when
/// each class is exponential.
pub fn aggregate_distribution(
    ensembles: &[&Ensemble],
    matrix: &WordDayMatrix,
) -> Result<WaitingTimeDistribution, WaitingError> {
    if ensembles.is_empty() {
        return Err(WaitingError::NoEnsembles);
    }
    let horizon = matrix.horizon();
    if let Some(e) = ensembles.iter().find(|e| e.k >= u64::from(horizon)) {
        return Err(WaitingError::NotDilute { k: e.k, horizon });
    }
    let samples: Vec<WaitingTimeSample> = ensembles
        .iter()
        .flat_map(|e| ensemble_samples(e, matrix))
        .collect();
    WaitingTimeDistribution::from_samples(None, &samples, support_for(horizon))
}

fn support_for(horizon: u32) -> usize {
    horizon.saturating_sub(1) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::build_ensembles;
    use proptest::prelude::*;

    fn series(days: &[u32]) -> WordSeries {
        WordSeries::from_pairs(days.iter().map(|&d| (d, 1)))
    }

    #[test]
    fn waiting_times_from_event_days() {
        assert_eq!(waiting_times(&series(&[3, 7, 8])).taus, [4, 1]);
        assert!(waiting_times(&series(&[5])).is_empty());
        // Multiplicity within a day is ignored.
        let s = WordSeries::from_pairs([(3, 4), (7, 2)]);
        assert_eq!(waiting_times(&s).taus, [4]);
    }

    #[test]
    fn daily_word_has_unit_waits() {
        let s = waiting_times(&series(&(0..30).collect::<Vec<_>>()));
        assert!(s.taus.iter().all(|&t| t == 1));
        assert_eq!(zeta(&s).unwrap().zeta, 1.0);
    }

    #[test]
    fn single_word_distribution() {
        let mut m = WordDayMatrix::new(10);
        m.insert("w", series(&[0, 5])).unwrap();
        let idx = build_ensembles(&m);
        let d = ensemble_distribution(idx.get(2).unwrap(), &m).unwrap();
        assert_eq!(d.f(5), 1.0);
        assert_eq!(d.support_len(), 9);
    }

    #[test]
    fn duplicate_words_do_not_change_the_distribution() {
        let mut one = WordDayMatrix::new(20);
        one.insert("a", series(&[1, 4, 5, 11])).unwrap();
        let mut two = one.clone();
        two.insert("b", series(&[1, 4, 5, 11])).unwrap();
        let d1 = ensemble_distribution(build_ensembles(&one).get(4).unwrap(), &one).unwrap();
        let d2 = ensemble_distribution(build_ensembles(&two).get(4).unwrap(), &two).unwrap();
        assert_eq!(d1.probabilities(), d2.probabilities());
    }

    #[test]
    fn dense_ensembles_are_rejected() {
        let mut m = WordDayMatrix::new(3);
        m.insert("w", WordSeries::from_pairs([(0, 2), (2, 1)])).unwrap();
        let idx = build_ensembles(&m);
        assert!(matches!(
            ensemble_distribution(idx.get(3).unwrap(), &m),
            Err(WaitingError::NotDilute { k: 3, horizon: 3 })
        ));
        assert!(matches!(aggregate_distribution(&[], &m), Err(WaitingError::NoEnsembles)));
    }

    #[test]
    fn empty_pool_is_an_error() {
        let mut m = WordDayMatrix::new(10);
        m.insert("w", series(&[4])).unwrap();
        let idx = build_ensembles(&m);
        assert!(matches!(
            ensemble_distribution(idx.get(1).unwrap(), &m),
            Err(WaitingError::EmptySample)
        ));
    }

    #[test]
    fn same_rate_aggregate_equals_class() {
        let mut m = WordDayMatrix::new(50);
        m.insert("a", series(&[0, 10, 13, 40])).unwrap();
        m.insert("b", series(&[2, 3, 20, 21])).unwrap();
        let idx = build_ensembles(&m);
        let class = ensemble_distribution(idx.get(4).unwrap(), &m).unwrap();
        let agg = aggregate_distribution(&crate::ensembles::select_dilute(&idx), &m).unwrap();
        assert_eq!(class.probabilities(), agg.probabilities());
    }

    proptest! {
        #[test]
        fn normalized_and_counted(days in prop::collection::vec(prop::collection::btree_set(0u32..300, 0..40), 1..20)) {
            let samples: Vec<WaitingTimeSample> = days
                .iter()
                .map(|d| waiting_times(&series(&d.iter().copied().collect::<Vec<_>>())))
                .collect();
            for (d, s) in days.iter().zip(&samples) {
                prop_assert_eq!(s.len(), d.len().saturating_sub(1));
                prop_assert!(s.taus.iter().all(|&t| t >= 1));
            }
            if let Ok(dist) = WaitingTimeDistribution::from_samples(None, &samples, 299) {
                let total: f64 = dist.probabilities().iter().sum();
                prop_assert!((total - 1.0).abs() < 1e-12);
                prop_assert!(dist.probabilities().iter().all(|&p| p >= 0.0));
            }
        }
    }
}

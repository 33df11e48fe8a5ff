//! Dense-limit statistics: how many times per day a frequent word occurs.
//!
//! For a word with total `k` over `T` days the daily counts `x` have mean
//! `k/T` exactly. Each day is rescaled to `x̃ = (x − k/T)/σ` with `σ` the
//! word's own standard deviation over all `T` days (zero days included),
//! so every word contributes a mean-zero, unit-variance sample and words
//! of different `k` can be pooled. Words with `σ = 0` are skipped.
//!
//! The null model throws `k` events independently and uniformly into `T`
//! day boxes, giving Binomial(k, 1/T) daily counts.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Binomial, Discrete};
use thiserror::Error;

use crate::ensembles::Ensemble;
use crate::io::Csv;
use crate::matrix::{WordDayMatrix, WordSeries};
use crate::rng::{item_stream, EVENTS, PARAMETERS};
use crate::stats::{chi_square_test, ChiSquareTest};

pub const BIN_WIDTH: f64 = 0.25;
pub const RANGE_LO: f64 = -6.0;
pub const RANGE_HI: f64 = 10.0;
const N_BINS: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum DenseError {
    #[error("series total {actual} does not match k={expected}")]
    KMismatch { expected: u64, actual: u64 },
    #[error("sigma scaling needs at least 3 distinct k, got {0}")]
    TooFewClasses(usize),
    #[error("sigma scaling needs k spanning a decade, got [{lo}, {hi}]")]
    NarrowRange { lo: u64, hi: u64 },
    #[error("no words to compare")]
    Empty,
}

/// Histogram of one word's daily counts over the whole horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DailyCountDistribution {
    pub k: u64,
    pub horizon: u32,
    /// `days[x]`: number of days with exactly `x` occurrences.
    pub days: Vec<u64>,
    pub mean: f64,
    /// Population standard deviation over the `T` days.
    pub std: f64,
}

impl DailyCountDistribution {
    pub fn p(&self, x: usize) -> f64 {
        self.days.get(x).map_or(0.0, |&d| d as f64 / f64::from(self.horizon))
    }

    /// Every day has the same count.
    pub fn is_degenerate(&self) -> bool {
        self.std == 0.0
    }
}

pub fn daily_count_distribution(
    series: &WordSeries,
    k: u64,
    horizon: u32,
) -> Result<DailyCountDistribution, DenseError> {
    let actual = series.total();
    if actual != k {
        return Err(DenseError::KMismatch { expected: k, actual });
    }
    let max = series.entries().iter().map(|e| e.1).max().unwrap_or(0) as usize;
    let mut days = vec![0u64; max + 1];
    for &(_, c) in series.entries() {
        days[c as usize] += 1;
    }
    days[0] = u64::from(horizon) - series.event_day_count() as u64;
    // Integer sums keep a constant series at exactly zero spread.
    let t = u128::from(horizon);
    let s2: u128 = series.entries().iter().map(|e| u128::from(e.1).pow(2)).sum();
    let var_num = t * s2 - u128::from(k).pow(2);
    Ok(DailyCountDistribution {
        k,
        horizon,
        days,
        mean: k as f64 / f64::from(horizon),
        std: (var_num as f64).sqrt() / f64::from(horizon),
    })
}

/// Rescaled values `(x̃, number of days)` of one word, or `None` when
/// `σ = 0`.
pub fn rescale_counts(dist: &DailyCountDistribution) -> Option<Vec<(f64, u64)>> {
    if dist.is_degenerate() {
        return None;
    }
    Some(
        dist.days
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(x, &d)| ((x as f64 - dist.mean) / dist.std, d))
            .collect(),
    )
}

/// Pooled `x̃` values, binned at width 0.25 on `[−6, 10)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RescaledCountDistribution {
    pub bins: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
    pub contributing_words: usize,
    pub skipped_words: usize,
    sum: f64,
    sum_sq: f64,
}

impl Default for RescaledCountDistribution {
    fn default() -> Self {
        RescaledCountDistribution {
            bins: vec![0; N_BINS],
            underflow: 0,
            overflow: 0,
            contributing_words: 0,
            skipped_words: 0,
            sum: 0.0,
            sum_sq: 0.0,
        }
    }
}

impl RescaledCountDistribution {
    pub fn add_word(&mut self, dist: &DailyCountDistribution) {
        let Some(values) = rescale_counts(dist) else {
            self.skipped_words += 1;
            return;
        };
        self.contributing_words += 1;
        for (v, d) in values {
            self.sum += v * d as f64;
            self.sum_sq += v * v * d as f64;
            if v < RANGE_LO {
                self.underflow += d;
            } else if v >= RANGE_HI {
                self.overflow += d;
            } else {
                let i = (((v - RANGE_LO) / BIN_WIDTH) as usize).min(N_BINS - 1);
                self.bins[i] += d;
            }
        }
    }

    pub fn merge(&mut self, other: &RescaledCountDistribution) {
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self.underflow += other.underflow;
        self.overflow += other.overflow;
        self.contributing_words += other.contributing_words;
        self.skipped_words += other.skipped_words;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    /// All pooled values, in range or not.
    pub fn value_count(&self) -> u64 {
        self.bins.iter().sum::<u64>() + self.underflow + self.overflow
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.value_count() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.sum_sq / self.value_count() as f64 - m * m
    }

    pub fn bin_center(i: usize) -> f64 {
        RANGE_LO + (i as f64 + 0.5) * BIN_WIDTH
    }

    /// Density per unit `x̃`, normalized over the in-range values.
    pub fn density(&self) -> Vec<f64> {
        let inside: u64 = self.bins.iter().sum();
        self.bins
            .iter()
            .map(|&b| if inside == 0 { 0.0 } else { b as f64 / inside as f64 / BIN_WIDTH })
            .collect()
    }

    pub fn density_at(&self, xtilde: f64) -> f64 {
        if !(RANGE_LO..RANGE_HI).contains(&xtilde) {
            return 0.0;
        }
        self.density()[((xtilde - RANGE_LO) / BIN_WIDTH) as usize]
    }

    /// Share of all values in bins starting at or above `threshold`,
    /// overflow included.
    pub fn fraction_above(&self, threshold: f64) -> f64 {
        let tail: u64 = self
            .bins
            .iter()
            .enumerate()
            .filter(|(i, _)| RANGE_LO + *i as f64 * BIN_WIDTH >= threshold)
            .map(|(_, &b)| b)
            .sum();
        (tail + self.overflow) as f64 / self.value_count() as f64
    }
}

/// Pools every word of the given series set; each series must total its
/// paired `k`. Per-word work runs in parallel, the merge runs in order, so
/// the result is bit-for-bit reproducible.
pub fn pool_rescaled<'a, I>(words: I, horizon: u32) -> Result<RescaledCountDistribution, DenseError>
where
    I: IntoIterator<Item = (u64, &'a WordSeries)>,
{
    let words: Vec<(u64, &WordSeries)> = words.into_iter().collect();
    let dists = words
        .par_iter()
        .map(|&(k, s)| daily_count_distribution(s, k, horizon))
        .collect::<Result<Vec<_>, _>>()?;
    let mut pooled = RescaledCountDistribution::default();
    for d in &dists {
        pooled.add_word(d);
    }
    Ok(pooled)
}

/// Pools the words of the given ensembles.
pub fn pool_ensembles(
    ensembles: &[&Ensemble],
    matrix: &WordDayMatrix,
) -> Result<RescaledCountDistribution, DenseError> {
    let words = ensembles
        .iter()
        .flat_map(|e| e.words.iter().filter_map(move |w| matrix.get(w).map(|s| (e.k, s))));
    pool_rescaled(words, matrix.horizon())
}

/// `n_words` series of `k` events each, thrown uniformly into `T` days.
pub fn poisson_null_ensemble(k: u64, horizon: u32, n_words: usize, seed: u64) -> Vec<WordSeries> {
    (0..n_words)
        .into_par_iter()
        .map(|i| {
            let mut rng = item_stream(seed, i as u64, EVENTS);
            WordSeries::from_pairs((0..k).map(|_| (rng.random_range(0..horizon), 1)))
        })
        .collect()
}

/// `n_words` series of `k` events each, thrown uniformly into
/// `burst_days` distinct days chosen at random per word.
pub fn bursty_ensemble(k: u64, horizon: u32, n_words: usize, burst_days: u32, seed: u64) -> Vec<WordSeries> {
    assert!(burst_days >= 1 && burst_days <= horizon, "burst days must fit in the horizon");
    (0..n_words)
        .into_par_iter()
        .map(|i| {
            let mut pick = item_stream(seed, i as u64, PARAMETERS);
            let days = rand::seq::index::sample(&mut pick, horizon as usize, burst_days as usize);
            let days: Vec<u32> = days.into_iter().map(|d| d as u32).collect();
            let mut rng = item_stream(seed, i as u64, EVENTS);
            WordSeries::from_pairs((0..k).map(|_| (days[rng.random_range(0..days.len())], 1)))
        })
        .collect()
}

/// `k_i` evenly spaced over `[k_lo, k_hi]`, one word each; word `i` uses
/// stream `i` of `seed`.
pub fn poisson_null_range(k_lo: u64, k_hi: u64, horizon: u32, n_words: usize, seed: u64) -> Vec<(u64, WordSeries)> {
    (0..n_words)
        .into_par_iter()
        .map(|i| {
            let k = if n_words == 1 {
                k_lo
            } else {
                k_lo + ((k_hi - k_lo) as u128 * i as u128 / (n_words - 1) as u128) as u64
            };
            let mut rng = item_stream(seed, i as u64, EVENTS);
            (k, WordSeries::from_pairs((0..k).map(|_| (rng.random_range(0..horizon), 1))))
        })
        .collect()
}

/// Chi-square test of the pooled raw daily counts against the matching
/// mixture of Binomial(k, 1/T) laws, one component per word.
pub fn binomial_chi_square<'a, I>(words: I, horizon: u32) -> Result<ChiSquareTest, DenseError>
where
    I: IntoIterator<Item = (u64, &'a WordSeries)>,
{
    let mut observed: Vec<u64> = Vec::new();
    let mut expected: Vec<f64> = Vec::new();
    let mut n_words = 0usize;
    for (k, s) in words {
        let d = daily_count_distribution(s, k, horizon)?;
        if observed.len() < d.days.len() {
            observed.resize(d.days.len(), 0);
        }
        for (x, &c) in d.days.iter().enumerate() {
            observed[x] += c;
        }
        let law = Binomial::new(1.0 / f64::from(horizon), k).expect("valid binomial");
        let top = (k as usize).min(4 * (k as usize / horizon as usize + 10));
        if expected.len() < top + 1 {
            expected.resize(top + 1, 0.0);
        }
        for (x, e) in expected.iter_mut().enumerate().take(top + 1) {
            *e += law.pmf(x as u64);
        }
        n_words += 1;
    }
    if n_words == 0 {
        return Err(DenseError::Empty);
    }
    let len = observed.len().max(expected.len()) + 1;
    observed.resize(len, 0);
    expected.resize(len, 0.0);
    let mut probs: Vec<f64> = expected.iter().map(|e| e / n_words as f64).collect();
    // The last cell takes whatever probability lies beyond.
    let head: f64 = probs[..len - 1].iter().sum();
    probs[len - 1] = (1.0 - head).max(0.0);
    chi_square_test(&observed, &probs).ok_or(DenseError::Empty)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaRow {
    pub k: u64,
    pub n_words: usize,
    /// Mean over words of the absolute daily-count `σ`.
    pub sigma: f64,
    /// `σ/⟨x⟩` with `⟨x⟩ = k/T`.
    pub sigma_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaScaling {
    pub rows: Vec<SigmaRow>,
    /// Log-log slope of `σ/⟨x⟩` against `k`; −1/2 for box allocation.
    pub relative_exponent: f64,
    /// Log-log slope of `σ` against `k`; +1/2 for box allocation.
    pub absolute_exponent: f64,
}

impl SigmaScaling {
    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new(&["k", "n_words", "sigma", "sigma_rel"]);
        for r in &self.rows {
            csv.row([r.k.to_string(), r.n_words.to_string(), r.sigma.to_string(), r.sigma_rel.to_string()]);
        }
        csv.into_string()
    }
}

/// Mean `σ` per class and its power-law exponents in `k`, in both the
/// relative and the absolute reading. Degenerate words are skipped, and
/// classes left empty are dropped.
pub fn sigma_scaling_check<'a, I>(classes: I, horizon: u32) -> Result<SigmaScaling, DenseError>
where
    I: IntoIterator<Item = (u64, Vec<&'a WordSeries>)>,
{
    let mut rows = Vec::new();
    for (k, words) in classes {
        let sigmas: Vec<f64> = words
            .iter()
            .map(|s| daily_count_distribution(s, k, horizon))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|d| !d.is_degenerate())
            .map(|d| d.std)
            .collect();
        if sigmas.is_empty() {
            continue;
        }
        let sigma = sigmas.iter().sum::<f64>() / sigmas.len() as f64;
        rows.push(SigmaRow {
            k,
            n_words: sigmas.len(),
            sigma,
            sigma_rel: sigma * f64::from(horizon) / k as f64,
        });
    }
    rows.sort_by_key(|r| r.k);
    rows.dedup_by_key(|r| r.k);
    if rows.len() < 3 {
        return Err(DenseError::TooFewClasses(rows.len()));
    }
    let (lo, hi) = (rows[0].k, rows[rows.len() - 1].k);
    if hi < 10 * lo {
        return Err(DenseError::NarrowRange { lo, hi });
    }
    let ln_k: Vec<f64> = rows.iter().map(|r| (r.k as f64).ln()).collect();
    let slope = |ys: Vec<f64>| {
        let n = ln_k.len() as f64;
        let mx = ln_k.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = ln_k.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = ln_k.iter().map(|x| (x - mx).powi(2)).sum();
        sxy / sxx
    };
    let relative_exponent = slope(rows.iter().map(|r| r.sigma_rel.ln()).collect());
    let absolute_exponent = slope(rows.iter().map(|r| r.sigma.ln()).collect());
    Ok(SigmaScaling {
        rows,
        relative_exponent,
        absolute_exponent,
    })
}

/// `xtilde,density_empirical,density_null` over the bin centres.
pub fn comparison_csv(empirical: &RescaledCountDistribution, null: &RescaledCountDistribution) -> String {
    let mut csv = Csv::new(&["xtilde", "density_empirical", "density_null"]);
    for (i, (e, n)) in empirical.density().iter().zip(null.density()).enumerate() {
        csv.row([
            RescaledCountDistribution::bin_center(i).to_string(),
            e.to_string(),
            n.to_string(),
        ]);
    }
    csv.into_string()
}

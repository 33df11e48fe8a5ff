//! Moment statistics of waiting times.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{WaitingError, WaitingTimeDistribution, WaitingTimeSample};

/// `⟨τ²⟩/⟨τ⟩²` with its ingredients. Two for exponential waiting times,
/// one for a strictly periodic word.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaStat {
    pub zeta: f64,
    pub mean_tau: f64,
    pub second_moment: f64,
    pub sample_count: u64,
}

impl ZetaStat {
    /// From integer sums; the ratio `n·Σ τ² / (Σ τ)²` is formed before any
    /// rounding so equal waiting times give exactly one.
    fn from_sums(n: u64, s1: u128, s2: u128) -> Result<Self, WaitingError> {
        if n < 2 {
            return Err(WaitingError::TooFewSamples(n as usize));
        }
        let nf = n as f64;
        let zeta = ratio(u128::from(n) * s2, s1 * s1);
        Ok(ZetaStat {
            zeta,
            mean_tau: s1 as f64 / nf,
            second_moment: s2 as f64 / nf,
            sample_count: n,
        })
    }
}

fn ratio(num: u128, den: u128) -> f64 {
    if num == den {
        1.0
    } else {
        num as f64 / den as f64
    }
}

pub fn zeta(sample: &WaitingTimeSample) -> Result<ZetaStat, WaitingError> {
    let (n, s1, s2) = sample.sums();
    ZetaStat::from_sums(n, s1, s2)
}

impl WaitingTimeDistribution {
    pub fn zeta(&self) -> Result<ZetaStat, WaitingError> {
        let (n, s1, s2) = self.sums();
        ZetaStat::from_sums(n, s1, s2)
    }
}

/// `⟨x²⟩/⟨x⟩²` of real-valued times.
pub fn zeta_of_values(values: &[f64]) -> Result<f64, WaitingError> {
    if values.len() < 2 {
        return Err(WaitingError::TooFewSamples(values.len()));
    }
    let n = values.len() as f64;
    let m1 = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| v * v).sum::<f64>() / n;
    Ok(m2 / (m1 * m1))
}

/// Classes with fewer pooled waiting times are flagged low-sample.
pub const LOW_SAMPLE_THRESHOLD: u64 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanCheck {
    pub k: u64,
    pub mean_tau: f64,
    /// `T/k`.
    pub expected: f64,
    /// `|⟨τ⟩ − T/k|·k/T`.
    pub deviation: f64,
    pub sample_count: u64,
    pub low_sample: bool,
}

pub fn mean_waiting_check(dist: &WaitingTimeDistribution, k: u64, horizon: u32) -> MeanCheck {
    let expected = f64::from(horizon) / k as f64;
    let mean_tau = dist.mean();
    MeanCheck {
        k,
        mean_tau,
        expected,
        deviation: (mean_tau - expected).abs() / expected,
        sample_count: dist.sample_count(),
        low_sample: dist.sample_count() < LOW_SAMPLE_THRESHOLD,
    }
}

/// Standard deviation of the pooled `ζ` over `resamples` bootstrap draws of
/// whole words. Resample `i` uses its own stream of the seeded generator,
/// so the result does not depend on thread scheduling. `None` when no draw
/// has two waiting times.
pub fn bootstrap_zeta(samples: &[WaitingTimeSample], resamples: usize, seed: u64) -> Option<f64> {
    if samples.is_empty() || resamples < 2 {
        return None;
    }
    let sums: Vec<(u64, u128, u128)> = samples.iter().map(WaitingTimeSample::sums).collect();
    let draws: Vec<f64> = (0..resamples)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (mut n, mut s1, mut s2) = (0u64, 0u128, 0u128);
            for _ in 0..sums.len() {
                let (a, b, c) = sums[rng.random_range(0..sums.len())];
                n += a;
                s1 += b;
                s2 += c;
            }
            ZetaStat::from_sums(n, s1, s2).ok().map(|z| z.zeta)
        })
        .collect();
    if draws.len() < 2 {
        return None;
    }
    let m = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / m;
    Some((draws.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt())
}

/// A weighted mixture of exponential waiting-time laws `τ_c⁻¹ e^{−τ/τ_c}`,
/// each component weighted per waiting time.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialMixture {
    /// `(weight, τ_c)`; weights need not sum to one.
    pub components: Vec<(f64, f64)>,
}

impl ExponentialMixture {
    /// `⟨τⁿ⟩ = Σ w·n!·τ_cⁿ / Σ w`.
    pub fn moment(&self, n: u32) -> f64 {
        let factorial: f64 = (1..=n).map(f64::from).product();
        let total: f64 = self.components.iter().map(|c| c.0).sum();
        self.components
            .iter()
            .map(|&(w, tc)| w * factorial * tc.powi(n as i32))
            .sum::<f64>()
            / total
    }

    pub fn zeta(&self) -> f64 {
        self.moment(2) / self.moment(1).powi(2)
    }

    /// `P(τ > t)`.
    pub fn survival(&self, t: f64) -> f64 {
        let total: f64 = self.components.iter().map(|c| c.0).sum();
        self.components
            .iter()
            .map(|&(w, tc)| w * (-t / tc).exp())
            .sum::<f64>()
            / total
    }
}

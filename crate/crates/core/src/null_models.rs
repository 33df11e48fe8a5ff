//! Seeded synthetic corpora.
//!
//! Three processes generate word-day matrices that downstream analyses
//! cannot tell from ingested ones:
//!
//! * `poisson`: every day, every word occurs Poisson(λ) times;
//! * `heterogeneous`: each word first draws its own mean gap `τ_c` from a
//!   mixture, then occurs Poisson(1/τ_c) times per day;
//! * `stretched_renewal`: continuous gaps from the stretched-exponential
//!   law, accumulated and floored to whole days.
//!
//! Words are named `w000000`, `w000001`, ... by generation index. Words that
//! never occur are absent from the matrix, so the vocabulary can be smaller
//! than `n_words`.
//!
//! The spec is JSON:
//!
//! ```json
//! {"process": {"type": "heterogeneous",
//!              "mixture": {"kind": "log_uniform", "tau_min": 1, "tau_max": 1000}},
//!  "horizon": 214, "n_words": 10000, "seed": 7}
//! ```

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{WordDayMatrix, WordSeries};
use crate::rng::{item_stream, EVENTS, PARAMETERS};
use crate::stretched::{LawError, StretchedExponential, MAX_SHAPE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RateMixture {
    /// `ln τ_c` uniform on `[ln τ_min, ln τ_max]`.
    LogUniform { tau_min: f64, tau_max: f64 },
    /// `τ_a` with probability `weight_a`, otherwise `τ_b`.
    TwoPoint { tau_a: f64, tau_b: f64, weight_a: f64 },
}

impl RateMixture {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            RateMixture::LogUniform { tau_min, tau_max } => {
                if tau_min == tau_max {
                    return tau_min;
                }
                let u: f64 = rng.random();
                (tau_min.ln() + u * (tau_max.ln() - tau_min.ln())).exp()
            }
            RateMixture::TwoPoint { tau_a, tau_b, weight_a } => {
                if rng.random::<f64>() < weight_a {
                    tau_a
                } else {
                    tau_b
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Process {
    /// `rate` events per word per day.
    Poisson { rate: f64 },
    Heterogeneous { mixture: RateMixture },
    StretchedRenewal { a: f64, nu: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticCorpusSpec {
    pub process: Process,
    pub horizon: u32,
    pub n_words: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum NullModelError {
    #[error("invalid spec: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<FieldError>),
    #[error("malformed spec: {0}")]
    Json(#[from] serde_json::Error),
    #[error("sampling word {word}: {source}")]
    Sampling { word: usize, source: LawError },
}

impl SyntheticCorpusSpec {
    pub fn from_json(text: &str) -> Result<Self, NullModelError> {
        let spec: SyntheticCorpusSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Checks every field and reports all problems together.
    pub fn validate(&self) -> Result<(), NullModelError> {
        let mut errors = Vec::new();
        let mut check = |ok: bool, field: &'static str, message: String| {
            if !ok {
                errors.push(FieldError { field, message });
            }
        };
        let positive = |x: f64| x.is_finite() && x > 0.0;
        check(self.horizon >= 2, "horizon", format!("must be at least 2, got {}", self.horizon));
        check(self.n_words >= 1, "n_words", "must be at least 1".into());
        match &self.process {
            Process::Poisson { rate } => {
                check(positive(*rate), "process.rate", format!("must be positive, got {rate}"));
            }
            Process::Heterogeneous { mixture } => match *mixture {
                RateMixture::LogUniform { tau_min, tau_max } => {
                    check(positive(tau_min), "process.mixture.tau_min", format!("must be positive, got {tau_min}"));
                    check(positive(tau_max), "process.mixture.tau_max", format!("must be positive, got {tau_max}"));
                    check(
                        tau_min <= tau_max,
                        "process.mixture.tau_max",
                        format!("must be at least tau_min ({tau_min}), got {tau_max}"),
                    );
                }
                RateMixture::TwoPoint { tau_a, tau_b, weight_a } => {
                    check(positive(tau_a), "process.mixture.tau_a", format!("must be positive, got {tau_a}"));
                    check(positive(tau_b), "process.mixture.tau_b", format!("must be positive, got {tau_b}"));
                    check(
                        (0.0..=1.0).contains(&weight_a),
                        "process.mixture.weight_a",
                        format!("must lie in [0, 1], got {weight_a}"),
                    );
                }
            },
            Process::StretchedRenewal { a, nu } => {
                check(positive(*a), "process.a", format!("must be positive, got {a}"));
                check(
                    nu.is_finite() && *nu > 0.0 && *nu <= MAX_SHAPE,
                    "process.nu",
                    format!("must lie in (0, {MAX_SHAPE}], got {nu}"),
                );
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(NullModelError::Invalid(errors))
        }
    }
}

pub fn word_name(index: usize) -> String {
    format!("w{index:06}")
}

fn poisson_days(rate: f64, horizon: u32, rng: &mut ChaCha8Rng) -> WordSeries {
    let law = Poisson::new(rate).expect("rate validated positive");
    WordSeries::from_pairs((0..horizon).map(|day| (day, law.sample(rng) as u32)))
}

fn renewal_days(
    law: &StretchedExponential,
    horizon: u32,
    rng: &mut ChaCha8Rng,
) -> Result<WordSeries, LawError> {
    let mut pairs = Vec::new();
    let mut t = 0.0;
    loop {
        t += law.sample(rng)?;
        if t >= f64::from(horizon) {
            break;
        }
        pairs.push((t.floor() as u32, 1));
    }
    Ok(WordSeries::from_pairs(pairs))
}

fn assemble(horizon: u32, words: Vec<WordSeries>) -> WordDayMatrix {
    let mut m = WordDayMatrix::new(horizon);
    for (i, s) in words.into_iter().enumerate() {
        if !s.is_empty() {
            m.insert(word_name(i), s).expect("generated days lie inside the horizon");
        }
    }
    m
}

fn generate_with<F>(spec: &SyntheticCorpusSpec, word: F) -> Result<WordDayMatrix, NullModelError>
where
    F: Fn(usize) -> Result<WordSeries, NullModelError> + Send + Sync,
{
    spec.validate()?;
    let words = (0..spec.n_words)
        .into_par_iter()
        .map(word)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble(spec.horizon, words))
}

pub fn generate_poisson(spec: &SyntheticCorpusSpec) -> Result<WordDayMatrix, NullModelError> {
    let Process::Poisson { rate } = spec.process else {
        return Err(wrong_process("poisson"));
    };
    generate_with(spec, |i| {
        Ok(poisson_days(rate, spec.horizon, &mut item_stream(spec.seed, i as u64, EVENTS)))
    })
}

/// The rate draw and the event draws use separate streams, so a mixture
/// concentrated on one `τ_c` reproduces [`generate_poisson`] at rate
/// `1/τ_c` word for word.
pub fn generate_heterogeneous(spec: &SyntheticCorpusSpec) -> Result<WordDayMatrix, NullModelError> {
    let Process::Heterogeneous { mixture } = &spec.process else {
        return Err(wrong_process("heterogeneous"));
    };
    generate_with(spec, |i| {
        let tau_c = mixture.draw(&mut item_stream(spec.seed, i as u64, PARAMETERS));
        Ok(poisson_days(1.0 / tau_c, spec.horizon, &mut item_stream(spec.seed, i as u64, EVENTS)))
    })
}

pub fn generate_stretched_renewal(spec: &SyntheticCorpusSpec) -> Result<WordDayMatrix, NullModelError> {
    let Process::StretchedRenewal { a, nu } = spec.process else {
        return Err(wrong_process("stretched_renewal"));
    };
    spec.validate()?;
    let law = StretchedExponential::new(a, nu).expect("validated");
    generate_with(spec, |i| {
        renewal_days(&law, spec.horizon, &mut item_stream(spec.seed, i as u64, EVENTS))
            .map_err(|source| NullModelError::Sampling { word: i, source })
    })
}

/// Dispatches on the spec's process.
pub fn generate(spec: &SyntheticCorpusSpec) -> Result<WordDayMatrix, NullModelError> {
    match spec.process {
        Process::Poisson { .. } => generate_poisson(spec),
        Process::Heterogeneous { .. } => generate_heterogeneous(spec),
        Process::StretchedRenewal { .. } => generate_stretched_renewal(spec),
    }
}

fn wrong_process(expected: &str) -> NullModelError {
    NullModelError::Invalid(vec![FieldError {
        field: "process.type",
        message: format!("expected {expected}"),
    }])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{chi_square_test, ks_critical_1pct, ks_distance};
    use statrs::distribution::{Discrete, Poisson as PoissonPmf};

    fn spec(process: Process, horizon: u32, n_words: usize, seed: u64) -> SyntheticCorpusSpec {
        SyntheticCorpusSpec {
            process,
            horizon,
            n_words,
            seed,
        }
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"process": {"type": "heterogeneous",
            "mixture": {"kind": "two_point", "tau_a": 1, "tau_b": 10, "weight_a": 0.5}},
            "horizon": 214, "n_words": 5, "seed": 3}"#;
        let s = SyntheticCorpusSpec::from_json(text).unwrap();
        assert_eq!(SyntheticCorpusSpec::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn two_point_mixture_zeta() {
        use crate::waiting::{waiting_times, ExponentialMixture, WaitingTimeDistribution, WaitingTimeSample};
        let mix = RateMixture::TwoPoint {
            tau_a: 1.0,
            tau_b: 10.0,
            weight_a: 0.5,
        };
        let m = generate_heterogeneous(&spec(Process::Heterogeneous { mixture: mix }, 5000, 2000, 13)).unwrap();
        let samples: Vec<WaitingTimeSample> = m.iter().map(|(_, s)| waiting_times(s)).collect();
        let measured = WaitingTimeDistribution::from_samples(None, &samples, 1)
            .unwrap()
            .zeta()
            .unwrap()
            .zeta;

        // Per class, event-days are Bernoulli(p) with p = 1 − e^{−1/τ_c}, so
        // gaps are geometric; each word contributes ~T·p gaps.
        let ps = [1.0 - (-1.0f64).exp(), 1.0 - (-0.1f64).exp()];
        let gaps: f64 = ps.iter().sum();
        let m1 = ps.len() as f64 / gaps;
        let m2 = ps.iter().map(|p| (2.0 - p) / p).sum::<f64>() / gaps;
        let oracle = m2 / (m1 * m1);
        assert!((measured - oracle).abs() < 0.1, "{measured} vs {oracle}");

        // Continuous mixture weighted per gap: 101/30.25.
        let continuous = ExponentialMixture {
            components: vec![(1.0, 1.0), (1.0, 10.0)],
        };
        assert!((continuous.zeta() - 3.339).abs() < 1e-3);
        assert!(measured > 2.5);
    }

    #[test]
    fn validation_lists_every_bad_field() {
        let text = r#"{"process": {"type": "heterogeneous",
            "mixture": {"kind": "log_uniform", "tau_min": 0, "tau_max": 10}},
            "horizon": 1, "n_words": 5, "seed": 3}"#;
        match SyntheticCorpusSpec::from_json(text) {
            Err(NullModelError::Invalid(errs)) => {
                let fields: Vec<&str> = errs.iter().map(|e| e.field).collect();
                assert_eq!(fields, ["horizon", "process.mixture.tau_min"]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            SyntheticCorpusSpec::from_json(r#"{"process": {"type": "poisson"}, "horizon": 3}"#),
            Err(NullModelError::Json(_))
        ));
        let bad_nu = spec(Process::StretchedRenewal { a: 1.0, nu: 2.5 }, 10, 1, 0);
        assert!(bad_nu.validate().is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let s = spec(Process::Poisson { rate: 0.3 }, 50, 200, 42);
        let a = generate(&s).unwrap().to_tsv();
        assert_eq!(a, generate(&s).unwrap().to_tsv());
        let other = SyntheticCorpusSpec { seed: 43, ..s };
        assert_ne!(a, generate(&other).unwrap().to_tsv());
    }

    #[test]
    fn degenerate_mixture_matches_plain_poisson() {
        let c = 7.0;
        let plain = spec(Process::Poisson { rate: 1.0 / c }, 214, 300, 5);
        for mixture in [
            RateMixture::LogUniform { tau_min: c, tau_max: c },
            RateMixture::TwoPoint { tau_a: c, tau_b: 99.0, weight_a: 1.0 },
        ] {
            let mixed = spec(Process::Heterogeneous { mixture }, 214, 300, 5);
            assert_eq!(generate(&plain).unwrap(), generate(&mixed).unwrap());
        }
    }

    #[test]
    fn poisson_totals_follow_the_rate() {
        let m = generate(&spec(Process::Poisson { rate: 0.2 }, 214, 5_000, 1)).unwrap();
        let mean = m.grand_total() as f64 / 5_000.0;
        assert!((mean / 42.8 - 1.0).abs() < 0.05, "{mean}");
    }

    #[test]
    fn tiny_rate_leaves_most_words_absent() {
        let m = generate(&spec(Process::Poisson { rate: 1e-5 }, 214, 2_000, 1)).unwrap();
        assert!(m.vocabulary_size() < 40);
    }

    #[test]
    fn poisson_daily_counts_pass_chi_square() {
        for rate in [0.1, 1.0, 5.0] {
            let m = generate(&spec(Process::Poisson { rate }, 200, 500, 17)).unwrap();
            let mut observed = vec![0u64; 40];
            let mut nonzero = 0u64;
            for (_, s) in m.iter() {
                for &(_, c) in s.entries() {
                    observed[(c as usize).min(39)] += 1;
                    nonzero += 1;
                }
            }
            observed[0] = 200 * 500 - nonzero;
            let pmf = PoissonPmf::new(rate).unwrap();
            let mut probs: Vec<f64> = (0..39).map(|x| pmf.pmf(x)).collect();
            probs.push(1.0 - probs.iter().sum::<f64>());
            let t = chi_square_test(&observed, &probs).unwrap();
            assert!(t.accepts(0.01), "rate {rate}: {t:?}");
        }
    }

    #[test]
    fn stretched_sampler_passes_ks() {
        let law = StretchedExponential::new(0.1, 0.5).unwrap();
        let mut rng = item_stream(8, 0, EVENTS);
        let sample: Vec<f64> = (0..10_000).map(|_| law.sample(&mut rng).unwrap()).collect();
        let d = ks_distance(&sample, |x| 1.0 - law.survival(x));
        assert!(d < ks_critical_1pct(sample.len()), "{d}");
    }

    #[test]
    fn unit_shape_renewal_is_poisson_like() {
        let m = generate(&spec(Process::StretchedRenewal { a: 0.1, nu: 1.0 }, 2_000, 200, 4)).unwrap();
        let samples: Vec<_> = m.iter().map(|(_, s)| crate::waiting::waiting_times(s)).collect();
        let d = crate::waiting::WaitingTimeDistribution::from_samples(None, &samples, 1).unwrap();
        // Geometric gaps with 1 − p = e^{−0.1}: ζ = 2 − p.
        let p = 1.0 - (-0.1f64).exp();
        assert!((d.zeta().unwrap().zeta - (2.0 - p)).abs() < 0.05);
    }

    #[test]
    fn wrong_process_is_rejected() {
        let s = spec(Process::Poisson { rate: 1.0 }, 10, 1, 0);
        assert!(generate_stretched_renewal(&s).is_err());
        assert!(generate_heterogeneous(&s).is_err());
    }
}

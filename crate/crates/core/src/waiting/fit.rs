//! Least-squares fit of the stretched-exponential law to a risk function.
//!
//! The data are whole days: a continuous gap `G` starting at a uniformly
//! placed fractional time lands `τ = ⌊V + G⌋` days later, and a zero result
//! merges with the same day. The model risk is therefore
//!
//! ```text
//! R(t) = S̄(t) / S̄(1),   S̄(t) = ∫_{t−1}^{t} S(s) ds
//! ```
//!
//! which for `ν = 1` is exactly the geometric law with `1 − p = e^{−a}`.
//!
//! Points are weighted by `R/(1 − R)`, the inverse binomial variance of
//! `ln R̂`, so the sparse tail does not dominate.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::risk::RiskFunction;
use super::WaitingError;
use crate::optimize::NelderMead;
use crate::quadrature::fixed_rule;
use crate::rank::subsample_ranks;
use crate::stretched::{StretchedExponential, MAX_SHAPE};

/// Largest number of support points entering a fit.
pub const MAX_FIT_SUPPORT: usize = 200;
const MIN_RISK: f64 = 1e-4;
const MIN_POINTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StretchedExpFit {
    pub a: f64,
    pub nu: f64,
    /// Normalization `aν/Γ(1/ν)` of the fitted density.
    pub c: f64,
    /// Weighted root-mean-square error of `ln R` over the fitted points.
    pub residual: f64,
    pub support_points: usize,
}

impl StretchedExpFit {
    pub fn law(&self) -> StretchedExponential {
        StretchedExponential::new(self.a, self.nu).expect("fitted parameters are valid")
    }

    /// Model risk at whole-day `t ≥ 1`.
    pub fn discrete_risk(&self, t: usize) -> f64 {
        let law = self.law();
        (window_survival(&law, t as f64) / window_survival(&law, 1.0)).min(1.0)
    }
}

fn window_survival(law: &StretchedExponential, t: f64) -> f64 {
    fixed_rule(|s| law.survival(s), t - 1.0, t)
}

fn decode(theta: &[f64]) -> Option<StretchedExponential> {
    let nu = MAX_SHAPE / (1.0 + (-theta[1]).exp());
    StretchedExponential::new(theta[0].exp(), nu).ok()
}

fn encode(a: f64, nu: f64) -> [f64; 2] {
    let q = nu / MAX_SHAPE;
    [a.ln(), (q / (1.0 - q)).ln()]
}

pub fn fit_stretched_exponential(risk: &RiskFunction) -> Result<StretchedExpFit, WaitingError> {
    fit_stretched_exponential_with(risk, &NelderMead::default())
}

pub fn fit_stretched_exponential_with(
    risk: &RiskFunction,
    optimizer: &NelderMead,
) -> Result<StretchedExpFit, WaitingError> {
    let usable = (1..=risk.support_len())
        .take_while(|&t| risk.value(t) > MIN_RISK)
        .count();
    if usable < MIN_POINTS {
        return Err(WaitingError::InsufficientSupport(usable));
    }
    // R(1) = 1 holds for data and model alike, so fitting starts at t = 2.
    let ts: Vec<usize> = subsample_ranks(usable - 1, MAX_FIT_SUPPORT)
        .into_iter()
        .map(|i| i + 1)
        .collect();
    let ln_r: Vec<f64> = ts.iter().map(|&t| risk.value(t).ln()).collect();
    // Inverse of the binomial variance of ln R̂(t), up to the sample size.
    let weights: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let r = risk.value(t);
            r / (1.0 - r).max(1e-12)
        })
        .collect();
    let weight_sum: f64 = weights.iter().sum();
    let mean_tau: f64 = risk.values().iter().sum();

    let objective = |theta: &[f64]| {
        let Some(law) = decode(theta) else {
            return f64::INFINITY;
        };
        let base = window_survival(&law, 1.0).ln();
        let sse: f64 = ts
            .iter()
            .zip(&ln_r)
            .zip(&weights)
            .map(|((&t, &y), &w)| w * (y - (window_survival(&law, t as f64).ln() - base)).powi(2))
            .sum();
        sse / weight_sum
    };

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut converged = false;
    let mut evaluations = 0;
    for nu0 in [0.5, 1.0, 0.3] {
        // Start from the scale whose continuous mean matches the data.
        let a0 = (ln_gamma(2.0 / nu0) - ln_gamma(1.0 / nu0)).exp() / mean_tau;
        let m = optimizer.minimize(objective, &encode(a0, nu0));
        evaluations += m.evaluations;
        converged |= m.converged;
        if best.as_ref().is_none_or(|b| m.value < b.1) {
            best = Some((m.point, m.value));
        }
    }
    let (theta, mse) = best.expect("starts are non-empty");
    let law = decode(&theta).ok_or(WaitingError::InsufficientSupport(usable))?;
    let fit = StretchedExpFit {
        a: law.rate(),
        nu: law.shape(),
        c: law.normalization(),
        residual: mse.sqrt(),
        support_points: ts.len(),
    };
    if converged {
        Ok(fit)
    } else {
        Err(WaitingError::FitFailed {
            best: Box::new(fit),
            evaluations,
        })
    }
}

//! The stretched-exponential waiting-time law.
//!
//! Density `f(τ) = C·exp(-(aτ)^ν)` on `τ > 0`, with `a` an inverse time scale
//! and `ν` the shape. Normalization gives `C = aν / Γ(1/ν)`, so `C = a/2` at
//! `ν = 1/2` and the law reduces to the exponential at `ν = 1`.
//!
//! With `s = 1/ν` and `y = (aτ)^ν`:
//!
//! * survival `S(τ) = Q(s, y)`, the regularized upper incomplete gamma
//!   function, which is `(1 + y)·e^{-y}` at `ν = 1/2`;
//! * moments `⟨τⁿ⟩ = Γ((n+1)/ν) / (aⁿ Γ(1/ν))`, so at `ν = 1/2`
//!   `⟨τ⟩ = 6/a`, `⟨τ²⟩ = 120/a²` and `⟨τ²⟩/⟨τ⟩² = 10/3`.

use rand::Rng;
use statrs::function::gamma::{gamma_ur, ln_gamma};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LawError {
    #[error("invalid stretched-exponential parameters a={a}, nu={nu}")]
    InvalidParameters { a: f64, nu: f64 },
    #[error("inverse survival failed for p={p}: bracket [{lo}, {hi}] after {iterations} iterations")]
    Bracket { p: f64, lo: f64, hi: f64, iterations: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StretchedExponential {
    a: f64,
    nu: f64,
}

/// Largest shape accepted.
pub const MAX_SHAPE: f64 = 2.0;

impl StretchedExponential {
    pub fn new(a: f64, nu: f64) -> Result<Self, LawError> {
        if !(a.is_finite() && a > 0.0 && nu.is_finite() && nu > 0.0 && nu <= MAX_SHAPE) {
            return Err(LawError::InvalidParameters { a, nu });
        }
        Ok(StretchedExponential { a, nu })
    }

    pub fn rate(&self) -> f64 {
        self.a
    }

    pub fn shape(&self) -> f64 {
        self.nu
    }

    /// The constant `C` making the density integrate to one.
    pub fn normalization(&self) -> f64 {
        (self.a.ln() + self.nu.ln() - ln_gamma(1.0 / self.nu)).exp()
    }

    pub fn density(&self, tau: f64) -> f64 {
        if tau < 0.0 {
            return 0.0;
        }
        self.normalization() * (-(self.a * tau).powf(self.nu)).exp()
    }

    pub fn survival(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 1.0;
        }
        upper_gamma_q(1.0 / self.nu, (self.a * tau).powf(self.nu))
    }

    /// `ln S(τ)`, accurate deep in the tail.
    pub fn log_survival(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        ln_upper_gamma_q(1.0 / self.nu, (self.a * tau).powf(self.nu))
    }

    /// Raw moment `⟨τⁿ⟩`.
    pub fn moment(&self, n: u32) -> f64 {
        let s = 1.0 / self.nu;
        let n = f64::from(n);
        (ln_gamma((n + 1.0) * s) - ln_gamma(s) - n * self.a.ln()).exp()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    /// `⟨τ²⟩/⟨τ⟩²`, independent of `a`.
    pub fn zeta(&self) -> f64 {
        let s = 1.0 / self.nu;
        (ln_gamma(3.0 * s) + ln_gamma(s) - 2.0 * ln_gamma(2.0 * s)).exp()
    }

    /// The `τ` with `S(τ) = p`, for `p ∈ (0, 1]`.
    pub fn inverse_survival(&self, p: f64) -> Result<f64, LawError> {
        let y = inverse_upper_gamma_q(1.0 / self.nu, p)?;
        Ok(y.powf(1.0 / self.nu) / self.a)
    }

    /// Draws one waiting time by inverting the survival function.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, LawError> {
        let u: f64 = rng.random();
        self.inverse_survival(1.0 - u)
    }
}

fn integer_shape(s: f64) -> Option<u32> {
    (s.fract() == 0.0 && (1.0..=64.0).contains(&s)).then_some(s as u32)
}

/// `Σ_{j<n} y^j / j!`
fn poisson_partial_sum(n: u32, y: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..n {
        term *= y / f64::from(j);
        sum += term;
    }
    sum
}

/// Regularized upper incomplete gamma `Q(s, y)`.
pub fn upper_gamma_q(s: f64, y: f64) -> f64 {
    if y <= 0.0 {
        return 1.0;
    }
    match integer_shape(s) {
        Some(n) => (-y).exp() * poisson_partial_sum(n, y),
        None => gamma_ur(s, y),
    }
}

fn ln_upper_gamma_q(s: f64, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    match integer_shape(s) {
        Some(n) => -y + poisson_partial_sum(n, y).ln(),
        None => {
            let q = gamma_ur(s, y);
            if q > 1e-300 {
                q.ln()
            } else {
                // Leading asymptotic term of Γ(s, y).
                (s - 1.0) * y.ln() - y - ln_gamma(s)
            }
        }
    }
}

/// Solves `Q(s, y) = p` for `y ≥ 0` by safeguarded Newton iteration on
/// `ln Q`, falling back to bisection whenever a step leaves the bracket.
fn inverse_upper_gamma_q(s: f64, p: f64) -> Result<f64, LawError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(LawError::Bracket { p, lo: 0.0, hi: 0.0, iterations: 0 });
    }
    if p == 1.0 {
        return Ok(0.0);
    }
    let target = p.ln();
    let ln_gamma_s = ln_gamma(s);
    let g = |y: f64| ln_upper_gamma_q(s, y) - target;

    let mut lo = 0.0;
    let mut hi = s.max(1.0);
    let mut iterations = 0;
    while g(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        iterations += 1;
        if iterations > 200 || !hi.is_finite() {
            return Err(LawError::Bracket { p, lo, hi, iterations });
        }
    }

    let mut y = 0.5 * (lo + hi);
    for _ in 0..200 {
        iterations += 1;
        let gy = g(y);
        if gy > 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        if gy == 0.0 || (hi - lo) <= 1e-14 * hi.max(1e-300) {
            return Ok(y);
        }
        // d ln Q / dy = -y^{s-1} e^{-y} / (Γ(s) Q)
        let ln_q = gy + target;
        let slope = -((s - 1.0) * y.ln() - y - ln_gamma_s - ln_q).exp();
        let newton = y - gy / slope;
        let next = if slope.is_finite() && slope < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - y).abs() <= 1e-14 * y.max(1e-300) {
            return Ok(next);
        }
        y = next;
    }
    Err(LawError::Bracket { p, lo, hi, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn half_shape_closed_forms() {
        let law = StretchedExponential::new(0.1, 0.5).unwrap();
        assert!((law.normalization() - 0.05).abs() < 1e-15);
        assert!((law.mean() - 60.0).abs() < 1e-10);
        assert!((law.moment(2) - 12_000.0).abs() < 1e-7);
        assert!((law.zeta() - 10.0 / 3.0).abs() < 1e-12);
        let u: f64 = 1.7;
        let tau = u * u / 0.1;
        assert!((law.survival(tau) - (1.0 + u) * (-u).exp()).abs() < 1e-15);
    }

    #[test]
    fn unit_shape_is_exponential() {
        let law = StretchedExponential::new(0.25, 1.0).unwrap();
        assert!((law.normalization() - 0.25).abs() < 1e-15);
        assert!((law.survival(3.0) - (-0.75f64).exp()).abs() < 1e-15);
        assert!((law.zeta() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_integer_shape_uses_incomplete_gamma() {
        let law = StretchedExponential::new(1.0, 0.7).unwrap();
        let s = crate::quadrature::integrate_to_infinity(|t| law.density(t), 2.0, 1e-12);
        assert!((law.survival(2.0) - s.value).abs() < 1e-9);
    }

    #[test]
    fn inverse_survival_round_trip() {
        for nu in [0.3, 0.5, 0.8, 1.0, 1.6] {
            let law = StretchedExponential::new(0.2, nu).unwrap();
            for p in [1e-12, 1e-6, 0.01, 0.3, 0.5, 0.9, 0.999_999] {
                let tau = law.inverse_survival(p).unwrap();
                let back = law.survival(tau);
                assert!((back - p).abs() <= 1e-9 * p.max(1e-3), "nu={nu} p={p} got {back}");
            }
        }
        assert_eq!(StretchedExponential::new(1.0, 0.5).unwrap().inverse_survival(1.0).unwrap(), 0.0);
    }

    #[test]
    fn invalid_parameters() {
        assert!(StretchedExponential::new(0.0, 0.5).is_err());
        assert!(StretchedExponential::new(1.0, 2.5).is_err());
        assert!(StretchedExponential::new(1.0, 0.0).is_err());
        let law = StretchedExponential::new(1.0, 0.5).unwrap();
        assert!(law.inverse_survival(0.0).is_err());
    }

    #[test]
    fn sampler_survival_at_u_equal_one() {
        // S = (1 + u) e^{-u} at u = (aτ)^{1/2} = 1, i.e. τ = 1/a.
        let a = 0.1;
        let law = StretchedExponential::new(a, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let above = (0..n)
            .filter(|_| law.sample(&mut rng).unwrap() > 1.0 / a)
            .count();
        let expected = 2.0 / std::f64::consts::E;
        let sd = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!(((above as f64 / n as f64) - expected).abs() < 4.0 * sd);
    }
}

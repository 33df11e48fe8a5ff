//! A renewal process with stretched-exponential gaps (nu = 1/2). The fit
//! recovers the shape, and zeta approaches 10/3.

use wordburst::null_models::{generate_stretched_renewal, Process, SyntheticCorpusSpec};
use wordburst::stretched::StretchedExponential;
use wordburst::waiting::{fit_stretched_exponential, risk_function, waiting_times, WaitingTimeDistribution, WaitingTimeSample};

fn main() {
    let (a, nu) = (0.1, 0.5);
    let law = StretchedExponential::new(a, nu).unwrap();
    println!("law: mean {:.1}, zeta {:.4}", law.mean(), law.zeta());

    let spec = SyntheticCorpusSpec {
        process: Process::StretchedRenewal { a, nu },
        horizon: 50_000,
        n_words: 300,
        seed: 5,
    };
    let m = generate_stretched_renewal(&spec).unwrap();
    let samples: Vec<WaitingTimeSample> = m.iter().map(|(_, s)| waiting_times(s)).collect();
    let dist = WaitingTimeDistribution::from_samples(None, &samples, 1).unwrap();
    let risk = risk_function(&dist);
    let fit = fit_stretched_exponential(&risk).unwrap();

    println!("sample: {} waiting times, zeta {:.4}", dist.sample_count(), dist.zeta().unwrap().zeta);
    println!("fit: a {:.4}, nu {:.4}, residual {:.4}", fit.a, fit.nu, fit.residual);
    for t in [1usize, 10, 50, 100, 300, 600] {
        println!("R({t:>3}) data {:.4} fit {:.4}", risk.value(t), fit.discrete_risk(t));
    }
}

//! Poisson ensembles with different k collapse onto exp(-t_R) once time is
//! measured in units of the class mean T/k.

use wordburst::dense::poisson_null_ensemble;
use wordburst::waiting::{risk_function, waiting_times, RescaledCurve, WaitingTimeDistribution, WaitingTimeSample};

fn main() {
    let horizon = 214;
    let mut curves = Vec::new();
    for k in [25u64, 45, 85, 105] {
        let words = poisson_null_ensemble(k, horizon, 800, k);
        let samples: Vec<WaitingTimeSample> = words.iter().map(waiting_times).collect();
        let dist = WaitingTimeDistribution::from_samples(Some(k), &samples, 1).unwrap();
        curves.push((k, RescaledCurve::exceedance(&risk_function(&dist), k, horizon)));
    }
    print!("{:>5}", "t_R");
    for (k, _) in &curves {
        print!(" {:>8}", format!("k={k}"));
    }
    println!(" {:>8}", "exp");
    for i in 0..=12 {
        let t = i as f64 * 0.25;
        print!("{t:>5.2}");
        for (_, c) in &curves {
            print!(" {:>8.4}", c.value_at(t).unwrap_or(f64::NAN));
        }
        println!(" {:>8.4}", (-t).exp());
    }
    let worst = curves
        .iter()
        .map(|(_, c)| c.sup_distance_to(|t| (-t).exp(), 3.0))
        .fold(0.0, f64::max);
    println!("largest distance to exp(-t_R) on [0, 3]: {worst:.4}");
}

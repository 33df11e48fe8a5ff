//! Fits the modified power law to a rank curve that bends away from Zipf at
//! high rank, and compares with the Zipf and Zipf-Mandelbrot baselines.

use rand_distr::{Distribution, LogNormal};
use wordburst::rank::{fit_modified_power_law, fit_zipf, fit_zipf_mandelbrot, RankCurve};
use wordburst::rng::{item_stream, EVENTS};

fn main() {
    let noise = LogNormal::new(0.0, 0.05).unwrap();
    let mut rng = item_stream(1, 0, EVENTS);
    let counts: Vec<u64> = (1..=50_000u32)
        .map(|r| {
            let x = f64::from(r);
            let c = 1e8 / (1.0 + 0.2 * x.powf(0.65) + 0.0004 * x.powf(1.5));
            (c * noise.sample(&mut rng)).round().max(1.0) as u64
        })
        .collect();
    let curve = RankCurve::from_counts(counts).unwrap();

    let fit = fit_modified_power_law(&curve).unwrap();
    println!("{}", fit.to_json());
    let zipf = fit_zipf(&curve).unwrap();
    let zm = fit_zipf_mandelbrot(&curve).unwrap();
    println!("residuals (rms of ln count):");
    println!("  modified power law {:.4}", fit.residual);
    println!("  Zipf               {:.4}  (exponent {:.3})", zipf.residual, zipf.exponent);
    println!("  Zipf-Mandelbrot    {:.4}  (exponent {:.3})", zm.residual, zm.exponent);
    for r in [1usize, 10, 100, 1000, 10_000, 50_000] {
        println!("rank {r:>6}: data {:>10} fit {:>12.1}", curve.count_at(r).unwrap(), fit.predict(r as f64));
    }
}

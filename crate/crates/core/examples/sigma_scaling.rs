//! Spread of daily counts across two decades of k under box allocation:
//! sigma grows like k^(1/2), so sigma relative to the mean falls like k^(-1/2).

use wordburst::dense::{poisson_null_ensemble, sigma_scaling_check};

fn main() {
    let horizon = 214;
    let ks = [50u64, 100, 200, 500, 1000, 2000, 5000];
    let classes: Vec<_> = ks
        .iter()
        .map(|&k| (k, poisson_null_ensemble(k, horizon, 200, k)))
        .collect();
    let scaling = sigma_scaling_check(classes.iter().map(|(k, w)| (*k, w.iter().collect())), horizon).unwrap();
    print!("{}", scaling.to_csv());
    println!("relative exponent {:.3}", scaling.relative_exponent);
    println!("absolute exponent {:.3}", scaling.absolute_exponent);
}

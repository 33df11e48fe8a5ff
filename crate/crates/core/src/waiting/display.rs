//! Logarithmic binning of waiting-time histograms, for plotting only.

use super::WaitingTimeDistribution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBin {
    /// First and last `τ` in the bin.
    pub lo: usize,
    pub hi: usize,
    /// Geometric centre `√(lo·hi)`.
    pub center: f64,
    /// Probability mass of the bin per unit `τ`.
    pub density: f64,
}

/// Bins with edges growing by `factor` (at least one `τ` wide); empty bins
/// are omitted.
pub fn log_binned(dist: &WaitingTimeDistribution, factor: f64) -> Vec<LogBin> {
    assert!(factor > 1.0, "bin factor must exceed one");
    let n = dist.sample_count() as f64;
    let max = dist.support_len();
    let mut bins = Vec::new();
    let mut lo = 1usize;
    while lo <= max {
        let next = ((lo as f64 * factor).ceil() as usize).max(lo + 1);
        let hi = (next - 1).min(max);
        let mass: u64 = (lo..=hi).map(|t| dist.count(t)).sum();
        if mass > 0 {
            bins.push(LogBin {
                lo,
                hi,
                center: ((lo * hi) as f64).sqrt(),
                density: mass as f64 / n / (hi - lo + 1) as f64,
            });
        }
        lo = next;
    }
    bins
}

#[cfg(test)]
mod tests {
    use super::super::WaitingTimeSample;
    use super::*;

    #[test]
    fn bins_conserve_mass() {
        let taus: Vec<u32> = (1..500).map(|i| (i * 37 % 200) + 1).collect();
        let d = WaitingTimeDistribution::from_samples(None, &[WaitingTimeSample { taus }], 1).unwrap();
        let bins = log_binned(&d, 1.25);
        let mass: f64 = bins.iter().map(|b| b.density * (b.hi - b.lo + 1) as f64).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        assert!(bins.windows(2).all(|w| w[0].hi < w[1].lo));
        // Early bins are single days; later ones widen.
        assert_eq!((bins[0].lo, bins[0].hi), (1, 1));
        assert!(bins.last().unwrap().hi - bins.last().unwrap().lo > 10);
    }
}

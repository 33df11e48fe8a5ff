//! Frequency classes `E_k`: the words occurring exactly `k` times over the
//! horizon. Words in one class are treated as interchangeable samples of the
//! same process.

use std::collections::BTreeMap;

use crate::io::Csv;
use crate::matrix::WordDayMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ensemble {
    pub k: u64,
    /// Sorted word ids.
    pub words: Vec<String>,
}

impl Ensemble {
    pub fn n_k(&self) -> usize {
        self.words.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleIndex {
    horizon: u32,
    classes: BTreeMap<u64, Ensemble>,
}

impl EnsembleIndex {
    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn get(&self, k: u64) -> Option<&Ensemble> {
        self.classes.get(&k)
    }

    /// Ensembles in increasing `k`.
    pub fn iter(&self) -> impl Iterator<Item = &Ensemble> {
        self.classes.values()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// The hapax legomena, `E_1`.
    pub fn hapax(&self) -> Option<&Ensemble> {
        self.get(1)
    }

    /// `k,n_k` rows in increasing `k`.
    pub fn legomena_csv(&self) -> String {
        let mut csv = Csv::new(&["k", "n_k"]);
        for e in self.iter() {
            csv.row([e.k.to_string(), e.n_k().to_string()]);
        }
        csv.into_string()
    }
}

pub fn build_ensembles(matrix: &WordDayMatrix) -> EnsembleIndex {
    let mut classes: BTreeMap<u64, Ensemble> = BTreeMap::new();
    // The matrix iterates words in sorted order, so each list stays sorted.
    for (word, series) in matrix.iter() {
        let k = series.total();
        classes
            .entry(k)
            .or_insert_with(|| Ensemble { k, words: Vec::new() })
            .words
            .push(word.to_string());
    }
    EnsembleIndex {
        horizon: matrix.horizon(),
        classes,
    }
}

/// Ensembles with `k < T`: on average less than one occurrence per day.
pub fn select_dilute(index: &EnsembleIndex) -> Vec<&Ensemble> {
    let t = u64::from(index.horizon);
    index.classes.range(..t).map(|(_, e)| e).collect()
}

/// Ensembles with `k_lo ≤ k ≤ k_hi`; empty when `k_lo > k_hi`.
pub fn select_dense(index: &EnsembleIndex, k_lo: u64, k_hi: u64) -> Vec<&Ensemble> {
    if k_lo > k_hi {
        return Vec::new();
    }
    index.classes.range(k_lo..=k_hi).map(|(_, e)| e).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::WordSeries;
    use proptest::prelude::*;

    fn matrix(horizon: u32, totals: &[(&str, u32)]) -> WordDayMatrix {
        let mut m = WordDayMatrix::new(horizon);
        for &(w, c) in totals {
            m.insert(w, WordSeries::from_pairs([(0, c)])).unwrap();
        }
        m
    }

    #[test]
    fn partition_by_total() {
        let idx = build_ensembles(&matrix(5, &[("a", 1), ("b", 1), ("c", 2)]));
        assert_eq!(idx.hapax().unwrap().words, ["a", "b"]);
        assert_eq!(idx.get(2).unwrap().n_k(), 1);
        assert_eq!(idx.legomena_csv(), "k,n_k\n1,2\n2,1\n");
    }

    #[test]
    fn distinct_totals_give_singletons() {
        let idx = build_ensembles(&matrix(5, &[("a", 1), ("b", 2), ("c", 3)]));
        assert!(idx.iter().all(|e| e.n_k() == 1));
    }

    #[test]
    fn dilute_threshold() {
        let idx = build_ensembles(&matrix(214, &[("a", 100), ("b", 500), ("c", 213), ("d", 214)]));
        let ks: Vec<u64> = select_dilute(&idx).iter().map(|e| e.k).collect();
        assert_eq!(ks, [100, 213]);
        let dense_only = build_ensembles(&matrix(3, &[("a", 3), ("b", 9)]));
        assert!(select_dilute(&dense_only).is_empty());
    }

    #[test]
    fn dense_range_is_inclusive() {
        let idx = build_ensembles(&matrix(214, &[("a", 999), ("b", 1000), ("c", 2000), ("d", 2001)]));
        let ks: Vec<u64> = select_dense(&idx, 1000, 2000).iter().map(|e| e.k).collect();
        assert_eq!(ks, [1000, 2000]);
        assert!(select_dense(&idx, 3000, 4000).is_empty());
        assert_eq!(select_dense(&idx, 999, 999).len(), 1);
        assert!(select_dense(&idx, 2000, 1000).is_empty());
    }

    proptest! {
        #[test]
        fn ensembles_partition_the_vocabulary(totals in prop::collection::vec(1u32..50, 1..60)) {
            let mut m = WordDayMatrix::new(1);
            for (i, c) in totals.iter().enumerate() {
                m.insert(format!("w{i}"), WordSeries::from_pairs([(0, *c)])).unwrap();
            }
            let idx = build_ensembles(&m);
            let n: usize = idx.iter().map(Ensemble::n_k).sum();
            prop_assert_eq!(n, m.vocabulary_size());
            let mass: u64 = idx.iter().map(|e| e.k * e.n_k() as u64).sum();
            prop_assert_eq!(mass, m.grand_total());
            for e in idx.iter() {
                prop_assert!(e.n_k() >= 1);
                for w in &e.words {
                    prop_assert_eq!(m.total(w), e.k);
                }
            }
            prop_assert_eq!(build_ensembles(&m), idx);
        }
    }
}

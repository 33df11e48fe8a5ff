//! Removal of days corrupted by missed scans.
//!
//! When a daily scan is missed, every post published during the gap is
//! attributed to the next successful scan, which then shows an anomalous
//! spike in vocabulary. Both the missed days and that first day after the
//! gap are dropped and the remaining days are renumbered contiguously.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::matrix::WordDayMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanDay {
    pub day_index: u32,
    pub scan_performed: bool,
    pub new_post_count: u64,
}

/// One record per day, day indices contiguous from zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanLog {
    days: Vec<ScanDay>,
}

impl ScanLog {
    pub fn new(days: Vec<ScanDay>) -> Result<Self, IngestError> {
        for (i, d) in days.iter().enumerate() {
            if d.day_index != i as u32 {
                return Err(IngestError::NonContiguousLog {
                    expected: i as u32,
                    found: d.day_index,
                });
            }
        }
        Ok(ScanLog { days })
    }

    /// A log in which every scan succeeded.
    pub fn all_performed(horizon: u32) -> Self {
        ScanLog {
            days: (0..horizon)
                .map(|day_index| ScanDay {
                    day_index,
                    scan_performed: true,
                    new_post_count: 0,
                })
                .collect(),
        }
    }

    /// Builds a log from per-day post counts, treating a day without any
    /// post as a missed scan.
    pub fn from_post_counts(counts: &[u64]) -> Self {
        ScanLog {
            days: counts
                .iter()
                .enumerate()
                .map(|(i, &n)| ScanDay {
                    day_index: i as u32,
                    scan_performed: n > 0,
                    new_post_count: n,
                })
                .collect(),
        }
    }

    pub fn horizon(&self) -> u32 {
        self.days.len() as u32
    }

    pub fn days(&self) -> &[ScanDay] {
        &self.days
    }

    /// The log of the days surviving `report`, renumbered.
    pub fn retained(&self, report: &CleaningReport) -> ScanLog {
        ScanLog {
            days: self
                .days
                .iter()
                .filter(|d| !report.reasons.contains_key(&d.day_index))
                .enumerate()
                .map(|(i, d)| ScanDay {
                    day_index: i as u32,
                    ..*d
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemovalReason {
    MissedScan,
    DayAfterMissedScan,
}

/// JSON form: `{"removed_days":[...],"reasons":{"5":"missed-scan",...},"retained_horizon":N}`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CleaningReport {
    pub removed_days: Vec<u32>,
    pub reasons: BTreeMap<u32, RemovalReason>,
    pub retained_horizon: u32,
}

impl CleaningReport {
    pub fn is_empty(&self) -> bool {
        self.removed_days.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

pub fn clean_missing_scans(
    matrix: &WordDayMatrix,
    log: &ScanLog,
) -> Result<(WordDayMatrix, CleaningReport), IngestError> {
    if log.horizon() != matrix.horizon() {
        return Err(IngestError::HorizonMismatch {
            log: log.horizon(),
            matrix: matrix.horizon(),
        });
    }
    let mut reasons = BTreeMap::new();
    let mut previous_missed = false;
    for day in log.days() {
        if !day.scan_performed {
            reasons.insert(day.day_index, RemovalReason::MissedScan);
            previous_missed = true;
        } else if previous_missed {
            reasons.insert(day.day_index, RemovalReason::DayAfterMissedScan);
            previous_missed = false;
        }
    }
    let kept: Vec<u32> = (0..matrix.horizon())
        .filter(|d| !reasons.contains_key(d))
        .collect();
    if kept.is_empty() {
        return Err(IngestError::EmptyCorpus);
    }
    let cleaned = if reasons.is_empty() {
        matrix.clone()
    } else {
        matrix.retain_days(&kept)
    };
    let report = CleaningReport {
        removed_days: reasons.keys().copied().collect(),
        reasons,
        retained_horizon: kept.len() as u32,
    };
    Ok((cleaned, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::WordSeries;
    use proptest::prelude::*;

    fn log_with_misses(horizon: u32, missed: &[u32]) -> ScanLog {
        ScanLog::new(
            (0..horizon)
                .map(|d| ScanDay {
                    day_index: d,
                    scan_performed: !missed.contains(&d),
                    new_post_count: 1,
                })
                .collect(),
        )
        .unwrap()
    }

    fn matrix(horizon: u32) -> WordDayMatrix {
        let mut m = WordDayMatrix::new(horizon);
        m.insert("a", WordSeries::from_pairs((0..horizon).map(|d| (d, 1)))).unwrap();
        m.insert("b", WordSeries::from_pairs([(horizon - 1, 2)])).unwrap();
        m
    }

    #[test]
    fn all_scans_performed_is_identity() {
        let m = matrix(10);
        let (cleaned, report) = clean_missing_scans(&m, &ScanLog::all_performed(10)).unwrap();
        assert_eq!(cleaned, m);
        assert!(report.is_empty());
        assert_eq!(report.retained_horizon, 10);
    }

    #[test]
    fn run_plus_following_day() {
        let (cleaned, report) = clean_missing_scans(&matrix(10), &log_with_misses(10, &[5, 6])).unwrap();
        assert_eq!(report.removed_days, [5, 6, 7]);
        assert_eq!(report.reasons[&5], RemovalReason::MissedScan);
        assert_eq!(report.reasons[&7], RemovalReason::DayAfterMissedScan);
        assert_eq!(report.retained_horizon, 7);
        assert_eq!(cleaned.horizon(), 7);
        assert_eq!(cleaned.total("a"), 7);
    }

    #[test]
    fn reduces_234_days_to_214() {
        // Five gaps of three missed days plus the day after each: 5 * 4 = 20.
        let missed: Vec<u32> = [20, 60, 100, 150, 200]
            .iter()
            .flat_map(|&s| s..s + 3)
            .collect();
        let (_, report) = clean_missing_scans(&matrix(234), &log_with_misses(234, &missed)).unwrap();
        assert_eq!(report.retained_horizon, 214);
    }

    #[test]
    fn all_days_removed_is_an_error() {
        assert!(matches!(
            clean_missing_scans(&matrix(3), &log_with_misses(3, &[0, 1, 2])),
            Err(IngestError::EmptyCorpus)
        ));
    }

    #[test]
    fn horizon_mismatch() {
        assert!(matches!(
            clean_missing_scans(&matrix(3), &ScanLog::all_performed(4)),
            Err(IngestError::HorizonMismatch { .. })
        ));
    }

    #[test]
    fn report_json_shape() {
        let (_, report) = clean_missing_scans(&matrix(5), &log_with_misses(5, &[1])).unwrap();
        assert_eq!(
            report.to_json(),
            r#"{"removed_days":[1,2],"reasons":{"1":"missed-scan","2":"day-after-missed-scan"},"retained_horizon":3}"#
        );
    }

    #[test]
    fn non_contiguous_log() {
        let days = vec![ScanDay { day_index: 1, scan_performed: true, new_post_count: 0 }];
        assert!(ScanLog::new(days).is_err());
    }

    proptest! {
        #[test]
        fn cleaning_is_idempotent(
            horizon in 2u32..40,
            missed in prop::collection::btree_set(0u32..40, 0..8),
        ) {
            let missed: Vec<u32> = missed.into_iter().filter(|&d| d < horizon).collect();
            let log = log_with_misses(horizon, &missed);
            if let Ok((once, report)) = clean_missing_scans(&matrix(horizon), &log) {
                prop_assert_eq!(report.retained_horizon + report.removed_days.len() as u32, horizon);
                let (twice, second) = clean_missing_scans(&once, &log.retained(&report)).unwrap();
                prop_assert_eq!(twice, once);
                prop_assert!(second.is_empty());
            }
        }
    }
}

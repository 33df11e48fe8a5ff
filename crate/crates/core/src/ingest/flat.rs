//! Flat corpus files and replayed scan directories.
//!
//! Flat corpus: one post per line, `YYYY-MM-DD<TAB>feed_id<TAB>text`.
//! Scan directory: one sub-directory per scan date (`YYYY-MM-DD`) holding one
//! RSS document per feed, named `<feed_id>.<ext>`.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufRead;
use std::path::Path;

use chrono::NaiveDate;

use super::clean::{ScanDay, ScanLog};
use super::rss::FeedCollector;
use super::{IngestError, LineError, Post};

const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Clone)]
pub struct FlatCorpus {
    /// Date of day index 0.
    pub epoch: NaiveDate,
    pub horizon: u32,
    pub posts: Vec<Post>,
}

impl FlatCorpus {
    fn day_of(&self, date: NaiveDate) -> Option<u32> {
        let d = (date - self.epoch).num_days();
        (0..i64::from(self.horizon)).contains(&d).then_some(d as u32)
    }

    pub fn posts_per_day(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.horizon as usize];
        for p in &self.posts {
            counts[p.day_index as usize] += 1;
        }
        counts
    }

    /// Scan log implied by the corpus: a day with no post at all is taken
    /// as a missed scan. `overrides` (from [`parse_scan_log`]) replace the
    /// implied status of the listed dates.
    pub fn scan_log(&self, overrides: &[(NaiveDate, bool)]) -> Result<ScanLog, IngestError> {
        let counts = self.posts_per_day();
        let mut days: Vec<ScanDay> = ScanLog::from_post_counts(&counts).days().to_vec();
        let mut errors = Vec::new();
        for (i, &(date, performed)) in overrides.iter().enumerate() {
            match self.day_of(date) {
                Some(d) => days[d as usize].scan_performed = performed,
                None => errors.push(LineError {
                    line: i + 1,
                    message: format!("scan date {date} outside the corpus window"),
                }),
            }
        }
        if !errors.is_empty() {
            return Err(IngestError::Lines(errors));
        }
        ScanLog::new(days)
    }
}

/// Reads a flat corpus. All malformed lines are reported together.
pub fn parse_flat_corpus<R: BufRead>(input: R) -> Result<FlatCorpus, IngestError> {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.splitn(3, '\t');
        let (Some(date), Some(feed), Some(text)) = (parts.next(), parts.next(), parts.next()) else {
            errors.push(LineError {
                line: lineno,
                message: "expected `YYYY-MM-DD<TAB>feed_id<TAB>text`".into(),
            });
            continue;
        };
        match NaiveDate::parse_from_str(date, DATE_FORMAT) {
            Ok(d) if !feed.is_empty() => records.push((d, feed.to_string(), text.to_string())),
            Ok(_) => errors.push(LineError {
                line: lineno,
                message: "empty feed id".into(),
            }),
            Err(e) => errors.push(LineError {
                line: lineno,
                message: format!("bad date {date:?}: {e}"),
            }),
        }
    }
    if !errors.is_empty() {
        return Err(IngestError::Lines(errors));
    }
    let (Some(first), Some(last)) = (
        records.iter().map(|r| r.0).min(),
        records.iter().map(|r| r.0).max(),
    ) else {
        return Err(IngestError::EmptyCorpus);
    };
    let horizon = (last - first).num_days() as u32 + 1;
    let posts = records
        .into_iter()
        .map(|(date, feed_id, text)| Post {
            feed_id,
            day_index: (date - first).num_days() as u32,
            text,
        })
        .collect();
    Ok(FlatCorpus {
        epoch: first,
        horizon,
        posts,
    })
}

/// Reads `YYYY-MM-DD<TAB>performed` lines, `performed` being `1`/`0` or
/// `true`/`false`.
pub fn parse_scan_log<R: BufRead>(input: R) -> Result<Vec<(NaiveDate, bool)>, IngestError> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = line.split_once('\t').and_then(|(d, flag)| {
            let date = NaiveDate::parse_from_str(d.trim(), DATE_FORMAT).ok()?;
            let performed = match flag.trim() {
                "1" | "true" => true,
                "0" | "false" => false,
                _ => return None,
            };
            Some((date, performed))
        });
        match parsed {
            Some(entry) => out.push(entry),
            None => errors.push(LineError {
                line: n + 1,
                message: "expected `YYYY-MM-DD<TAB>1|0`".into(),
            }),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(IngestError::Lines(errors))
    }
}

#[derive(Debug)]
pub struct ReplayedScans {
    pub epoch: NaiveDate,
    pub horizon: u32,
    pub posts: Vec<Post>,
    pub scan_log: ScanLog,
    /// `(scan date, feed id, error)` for documents that failed to parse.
    pub failures: Vec<(NaiveDate, String, IngestError)>,
    pub collector: FeedCollector,
}

/// Replays the scan sub-directories of `dir` in date order, starting from
/// `collector`'s state. Dates between the first and last scan without a
/// directory are logged as missed scans.
pub fn replay_scan_directory(dir: &Path, mut collector: FeedCollector) -> Result<ReplayedScans, IngestError> {
    let mut scans: BTreeMap<NaiveDate, Vec<(String, Vec<u8>)>> = BTreeMap::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        if !entry.file_type()?.is_dir() {
            continue;
        }
        let name = entry.file_name();
        let Some(date) = name
            .to_str()
            .and_then(|n| NaiveDate::parse_from_str(n, DATE_FORMAT).ok())
        else {
            continue;
        };
        let mut feeds = Vec::new();
        for doc in fs::read_dir(entry.path())? {
            let doc = doc?;
            if !doc.file_type()?.is_file() {
                continue;
            }
            let path = doc.path();
            let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            feeds.push((stem.to_string(), fs::read(&path)?));
        }
        feeds.sort_by(|a, b| a.0.cmp(&b.0));
        scans.insert(date, feeds);
    }
    let (Some(&first), Some(&last)) = (scans.keys().next(), scans.keys().next_back()) else {
        return Err(IngestError::EmptyCorpus);
    };
    let horizon = (last - first).num_days() as u32 + 1;
    let mut days: Vec<ScanDay> = (0..horizon)
        .map(|day_index| ScanDay {
            day_index,
            scan_performed: false,
            new_post_count: 0,
        })
        .collect();
    let mut posts = Vec::new();
    let mut failures = Vec::new();
    for (date, feeds) in scans {
        let day = (date - first).num_days() as u32;
        let outcome = collector.scan(day, &feeds);
        days[day as usize].scan_performed = true;
        days[day as usize].new_post_count = outcome.posts.len() as u64;
        posts.extend(outcome.posts);
        failures.extend(outcome.failures.into_iter().map(|(id, e)| (date, id, e)));
    }
    Ok(ReplayedScans {
        epoch: first,
        horizon,
        posts,
        scan_log: ScanLog::new(days)?,
        failures,
        collector,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_corpus_days_from_epoch() {
        let text = "2005-02-11\tf1\tHello world\n2005-02-13\tf2\tworld\n\n2005-02-11\tf2\tagain\n";
        let c = parse_flat_corpus(text.as_bytes()).unwrap();
        assert_eq!(c.horizon, 3);
        assert_eq!(c.epoch, NaiveDate::from_ymd_opt(2005, 2, 11).unwrap());
        assert_eq!(c.posts[1].day_index, 2);
        assert_eq!(c.posts_per_day(), [2, 0, 1]);
        let log = c.scan_log(&[]).unwrap();
        assert!(!log.days()[1].scan_performed);
    }

    #[test]
    fn flat_corpus_reports_every_bad_line() {
        let text = "2005-02-11\tf1\tok\nnot a line\n2005-13-01\tf\tx\n";
        match parse_flat_corpus(text.as_bytes()) {
            Err(IngestError::Lines(errs)) => {
                assert_eq!(errs.iter().map(|e| e.line).collect::<Vec<_>>(), [2, 3]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_flat_corpus() {
        assert!(matches!(parse_flat_corpus("".as_bytes()), Err(IngestError::EmptyCorpus)));
    }

    #[test]
    fn scan_log_overrides() {
        let c = parse_flat_corpus("2005-01-01\tf\ta\n2005-01-03\tf\tb\n".as_bytes()).unwrap();
        let entries = parse_scan_log("2005-01-02\t1\n2005-01-03\tfalse\n".as_bytes()).unwrap();
        let log = c.scan_log(&entries).unwrap();
        let performed: Vec<bool> = log.days().iter().map(|d| d.scan_performed).collect();
        assert_eq!(performed, [true, true, false]);
        let outside = parse_scan_log("2006-01-01\t0\n".as_bytes()).unwrap();
        assert!(c.scan_log(&outside).is_err());
        assert!(parse_scan_log("2005-01-01 yes\n".as_bytes()).is_err());
    }

    #[test]
    fn replay_marks_missing_dates() {
        let dir = tempfile::tempdir().unwrap();
        let feed = |items: &str| format!("<rss><channel>{items}</channel></rss>");
        for (date, body) in [
            ("2005-02-11", feed("<item><guid>a</guid><title>alpha</title></item>")),
            ("2005-02-13", feed("<item><guid>a</guid><title>alpha</title></item><item><guid>b</guid><title>beta</title></item>")),
        ] {
            let d = dir.path().join(date);
            fs::create_dir(&d).unwrap();
            fs::write(d.join("blog1.xml"), body).unwrap();
        }
        fs::create_dir(dir.path().join("snapshots")).unwrap();
        let r = replay_scan_directory(dir.path(), FeedCollector::new()).unwrap();
        assert_eq!(r.horizon, 3);
        assert_eq!(r.posts.len(), 2);
        assert_eq!(r.posts[1].day_index, 2);
        let performed: Vec<bool> = r.scan_log.days().iter().map(|d| d.scan_performed).collect();
        assert_eq!(performed, [true, false, true]);
    }
}

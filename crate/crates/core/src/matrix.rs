//! Per-word daily presence counts.
//!
//! A [`WordDayMatrix`] stores, for every word, the number of posts that
//! contained it on each day of the observation window. It is sparse: only
//! days with a count of at least one are kept.
//!
//! The text serialization is line-delimited UTF-8:
//!
//! ```text
//! #T=214
//! blog	0:3,5:1,17:2
//! zipf	40:1
//! ```
//!
//! Words are written in byte order and days ascending, so two equal matrices
//! always serialize to identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use thiserror::Error;

/// Malformed matrix input.
#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("day {day} outside horizon {horizon}")]
    DayOutOfRange { day: u32, horizon: u32 },
    #[error("word {0:?} has a zero count")]
    ZeroCount(String),
    #[error("word {0:?} is not a valid token")]
    InvalidWord(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Sparse daily series of one word: `(day, count)` pairs, days strictly
/// ascending, counts at least one.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordSeries {
    entries: Vec<(u32, u32)>,
}

impl WordSeries {
    /// Builds a series from arbitrary `(day, count)` pairs. Zero counts are
    /// dropped and repeated days are summed.
    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> Self {
        let mut map = BTreeMap::new();
        for (day, count) in pairs {
            if count > 0 {
                *map.entry(day).or_insert(0u32) += count;
            }
        }
        WordSeries {
            entries: map.into_iter().collect(),
        }
    }

    /// Builds a series from a dense vector indexed by day.
    pub fn from_dense(counts: &[u32]) -> Self {
        WordSeries {
            entries: counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(d, &c)| (d as u32, c))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    /// Days on which the word appeared at least once.
    pub fn event_days(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.iter().map(|&(d, _)| d)
    }

    pub fn event_day_count(&self) -> usize {
        self.entries.len()
    }

    /// Total count `W_α` over the whole window.
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|&(_, c)| u64::from(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count_on(&self, day: u32) -> u32 {
        self.entries
            .binary_search_by_key(&day, |&(d, _)| d)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// Dense vector of length `horizon`, zero on days without the word.
    pub fn to_dense(&self, horizon: u32) -> Vec<u32> {
        let mut out = vec![0; horizon as usize];
        for &(d, c) in &self.entries {
            if (d as usize) < out.len() {
                out[d as usize] = c;
            }
        }
        out
    }

    pub fn last_day(&self) -> Option<u32> {
        self.entries.last().map(|&(d, _)| d)
    }
}

/// Word → day → number of posts containing the word on that day.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordDayMatrix {
    horizon: u32,
    words: BTreeMap<String, WordSeries>,
}

impl WordDayMatrix {
    pub fn new(horizon: u32) -> Self {
        WordDayMatrix {
            horizon,
            words: BTreeMap::new(),
        }
    }

    /// Observation window length `T` in days.
    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    /// Number of distinct words.
    pub fn vocabulary_size(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Inserts (or replaces) a word's series. Empty series are ignored.
    pub fn insert(&mut self, word: impl Into<String>, series: WordSeries) -> Result<(), MatrixError> {
        let word = word.into();
        if word.is_empty() || word.contains(['\t', '\n', '\r']) || word.starts_with('#') {
            return Err(MatrixError::InvalidWord(word));
        }
        if let Some(day) = series.last_day() {
            if day >= self.horizon {
                return Err(MatrixError::DayOutOfRange {
                    day,
                    horizon: self.horizon,
                });
            }
        }
        if series.is_empty() {
            self.words.remove(&word);
        } else {
            self.words.insert(word, series);
        }
        Ok(())
    }

    pub fn get(&self, word: &str) -> Option<&WordSeries> {
        self.words.get(word)
    }

    pub fn total(&self, word: &str) -> u64 {
        self.words.get(word).map_or(0, WordSeries::total)
    }

    /// Sum of `W_α` over the vocabulary.
    pub fn grand_total(&self) -> u64 {
        self.words.values().map(WordSeries::total).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &WordSeries)> {
        self.words.iter().map(|(w, s)| (w.as_str(), s))
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.keys().map(String::as_str)
    }

    /// Keeps only the listed days (which must be ascending), renumbering them
    /// `0..kept.len()`. Words left without any entry are dropped.
    pub fn retain_days(&self, kept: &[u32]) -> WordDayMatrix {
        let mut remap = vec![None; self.horizon as usize];
        for (new, &old) in kept.iter().enumerate() {
            if let Some(slot) = remap.get_mut(old as usize) {
                *slot = Some(new as u32);
            }
        }
        let words = self
            .words
            .iter()
            .filter_map(|(w, s)| {
                let entries: Vec<(u32, u32)> = s
                    .entries
                    .iter()
                    .filter_map(|&(d, c)| remap[d as usize].map(|nd| (nd, c)))
                    .collect();
                (!entries.is_empty()).then(|| (w.clone(), WordSeries { entries }))
            })
            .collect();
        WordDayMatrix {
            horizon: kept.len() as u32,
            words,
        }
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "#T={}", self.horizon)?;
        let mut line = String::new();
        for (word, series) in &self.words {
            line.clear();
            line.push_str(word);
            line.push('\t');
            for (i, (d, c)) in series.entries.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                let _ = write!(line, "{d}:{c}");
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("matrix serialization is UTF-8")
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self, MatrixError> {
        let mut lines = input.lines().enumerate();
        let horizon = loop {
            let Some((n, line)) = lines.next() else {
                return Err(MatrixError::Format {
                    line: 1,
                    message: "missing `#T=<horizon>` header".into(),
                });
            };
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let value = line.strip_prefix("#T=").ok_or_else(|| MatrixError::Format {
                line: n + 1,
                message: "expected `#T=<horizon>` header".into(),
            })?;
            break value.trim().parse::<u32>().map_err(|e| MatrixError::Format {
                line: n + 1,
                message: format!("bad horizon: {e}"),
            })?;
        };

        let mut matrix = WordDayMatrix::new(horizon);
        for (n, line) in lines {
            let line = line?;
            let lineno = n + 1;
            if line.is_empty() {
                continue;
            }
            let fmt_err = |message: String| MatrixError::Format {
                line: lineno,
                message,
            };
            let (word, cells) = line
                .split_once('\t')
                .ok_or_else(|| fmt_err("expected `word<TAB>day:count,...`".into()))?;
            let mut entries = Vec::new();
            for cell in cells.split(',') {
                let (d, c) = cell
                    .split_once(':')
                    .ok_or_else(|| fmt_err(format!("bad cell {cell:?}")))?;
                let d: u32 = d.parse().map_err(|e| fmt_err(format!("bad day {d:?}: {e}")))?;
                let c: u32 = c.parse().map_err(|e| fmt_err(format!("bad count {c:?}: {e}")))?;
                if c == 0 {
                    return Err(MatrixError::ZeroCount(word.to_string()));
                }
                if let Some(&(prev, _)) = entries.last() {
                    if d <= prev {
                        return Err(fmt_err(format!("days not ascending at {d}")));
                    }
                }
                entries.push((d, c));
            }
            if matrix.words.contains_key(word) {
                return Err(fmt_err(format!("duplicate word {word:?}")));
            }
            matrix.insert(word, WordSeries { entries })?;
        }
        Ok(matrix)
    }

    pub fn from_tsv(text: &str) -> Result<Self, MatrixError> {
        Self::read_from(text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> WordDayMatrix {
        let mut m = WordDayMatrix::new(10);
        m.insert("cat", WordSeries::from_pairs([(0, 2), (4, 1)])).unwrap();
        m.insert("dog", WordSeries::from_pairs([(9, 1)])).unwrap();
        m
    }

    #[test]
    fn totals_follow_entries() {
        let m = sample();
        assert_eq!(m.total("cat"), 3);
        assert_eq!(m.grand_total(), 4);
        assert_eq!(m.vocabulary_size(), 2);
        assert_eq!(m.get("cat").unwrap().count_on(4), 1);
        assert_eq!(m.get("cat").unwrap().count_on(3), 0);
    }

    #[test]
    fn tsv_layout() {
        assert_eq!(sample().to_tsv(), "#T=10\ncat\t0:2,4:1\ndog\t9:1\n");
        assert_eq!(WordDayMatrix::from_tsv(&sample().to_tsv()).unwrap(), sample());
    }

    #[test]
    fn rejects_out_of_horizon_days() {
        let mut m = WordDayMatrix::new(3);
        assert!(matches!(
            m.insert("x", WordSeries::from_pairs([(3, 1)])),
            Err(MatrixError::DayOutOfRange { day: 3, horizon: 3 })
        ));
        assert!(WordDayMatrix::from_tsv("#T=3\nx\t5:1\n").is_err());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(WordDayMatrix::from_tsv("x\t1:1\n").is_err());
        assert!(WordDayMatrix::from_tsv("#T=3\nx\t1:0\n").is_err());
        assert!(WordDayMatrix::from_tsv("#T=3\nx\t2:1,1:1\n").is_err());
        assert!(WordDayMatrix::from_tsv("#T=3\nx 1:1\n").is_err());
    }

    #[test]
    fn retain_days_renumbers() {
        let kept = sample().retain_days(&[1, 2, 4, 5]);
        assert_eq!(kept.horizon(), 4);
        assert_eq!(kept.get("cat").unwrap().entries(), &[(2, 1)]);
        assert!(kept.get("dog").is_none());
    }
}

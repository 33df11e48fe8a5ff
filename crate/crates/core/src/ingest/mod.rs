//! From raw feeds or flat corpus files to a cleaned [`WordDayMatrix`].

mod clean;
mod flat;
mod rss;
mod tokenize;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

pub use clean::{clean_missing_scans, CleaningReport, RemovalReason, ScanDay, ScanLog};
pub use flat::{parse_flat_corpus, parse_scan_log, replay_scan_directory, FlatCorpus, ReplayedScans};
pub use rss::{content_guid, diff_scan, parse_rss, FeedCollector, FeedItem, ScanOutcome, SnapshotStore};
pub use tokenize::{strip_markup, tokenize};

use crate::matrix::{MatrixError, WordDayMatrix, WordSeries};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },
    #[error("document has no <rss><channel> element")]
    MissingChannel,
    #[error("post day {day} outside horizon {horizon}")]
    DayOutOfRange { day: u32, horizon: u32 },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("scan log covers {log} days but the matrix covers {matrix}")]
    HorizonMismatch { log: u32, matrix: u32 },
    #[error("scan log is not contiguous: expected day {expected}, found {found}")]
    NonContiguousLog { expected: u32, found: u32 },
    #[error("{}", format_lines(.0))]
    Lines(Vec<LineError>),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A diagnostic tied to one input line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

fn format_lines(errs: &[LineError]) -> String {
    errs.iter()
        .map(|e| format!("line {}: {}", e.line, e.message))
        .collect::<Vec<_>>()
        .join("\n")
}

/// A dated text attributed to one feed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Post {
    pub feed_id: String,
    /// Days since the corpus epoch.
    pub day_index: u32,
    pub text: String,
}

/// Counts, per word and day, the posts containing the word. A word repeated
/// inside one post counts once.
pub fn bin_daily(posts: &[Post], horizon: u32) -> Result<WordDayMatrix, IngestError> {
    let mut counts: HashMap<String, HashMap<u32, u32>> = HashMap::new();
    for post in posts {
        if post.day_index >= horizon {
            return Err(IngestError::DayOutOfRange {
                day: post.day_index,
                horizon,
            });
        }
        let words: BTreeSet<String> = tokenize(&post.text).into_iter().collect();
        for word in words {
            *counts.entry(word).or_default().entry(post.day_index).or_insert(0) += 1;
        }
    }
    let mut matrix = WordDayMatrix::new(horizon);
    for (word, days) in counts {
        matrix.insert(word, WordSeries::from_pairs(days))?;
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn post(day: u32, text: &str) -> Post {
        Post {
            feed_id: "f".into(),
            day_index: day,
            text: text.into(),
        }
    }

    #[test]
    fn presence_not_multiplicity() {
        let m = bin_daily(&[post(0, "cat cat Cat")], 1).unwrap();
        assert_eq!(m.get("cat").unwrap().count_on(0), 1);
    }

    #[test]
    fn two_posts_same_day() {
        let m = bin_daily(&[post(0, "a cat"), post(0, "the cat")], 1).unwrap();
        assert_eq!(m.get("cat").unwrap().count_on(0), 2);
        assert_eq!(m.total("a"), 1);
    }

    #[test]
    fn empty_posts() {
        let m = bin_daily(&[], 5).unwrap();
        assert_eq!(m.vocabulary_size(), 0);
        assert_eq!(m.horizon(), 5);
    }

    #[test]
    fn day_out_of_range() {
        assert!(matches!(
            bin_daily(&[post(3, "x")], 3),
            Err(IngestError::DayOutOfRange { day: 3, horizon: 3 })
        ));
    }

    proptest! {
        #[test]
        fn binning_conserves_distinct_words(
            texts in prop::collection::vec(("[0-4]", "[a-e ]{0,12}"), 0..20)
        ) {
            let posts: Vec<Post> = texts
                .iter()
                .map(|(d, t)| post(d.parse().unwrap(), t))
                .collect();
            let m = bin_daily(&posts, 5).unwrap();
            let expected: u64 = posts
                .iter()
                .map(|p| tokenize(&p.text).into_iter().collect::<BTreeSet<_>>().len() as u64)
                .sum();
            prop_assert_eq!(m.grand_total(), expected);
        }
    }
}

//! A flat corpus with a missed scan on the third day. That day and the
//! spiked day after it are dropped and the rest renumbered.

use std::io::Cursor;

use wordburst::ingest::{bin_daily, clean_missing_scans, parse_flat_corpus};

const CORPUS: &str = "\
2005-03-01\tfeed1\tquiet monday post
2005-03-02\tfeed2\tanother quiet post
2005-03-04\tfeed1\tbacklog post one
2005-03-04\tfeed2\tbacklog post two
2005-03-04\tfeed3\tbacklog post three
2005-03-05\tfeed1\tquiet again
2005-03-06\tfeed2\tquiet to the end
";

fn main() {
    let corpus = parse_flat_corpus(Cursor::new(CORPUS)).unwrap();
    // No scan log given: a day without any post counts as a missed scan.
    let log = corpus.scan_log(&[]).unwrap();
    let raw = bin_daily(&corpus.posts, corpus.horizon).unwrap();
    let (cleaned, report) = clean_missing_scans(&raw, &log).unwrap();

    println!("raw horizon {}, cleaned horizon {}", raw.horizon(), cleaned.horizon());
    println!("{}", report.to_json());
    println!("'backlog' survives: {}", cleaned.get("backlog").is_some());
    println!("'quiet' total: {} -> {}", raw.total("quiet"), cleaned.total("quiet"));
}

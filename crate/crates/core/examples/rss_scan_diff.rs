//! Two consecutive scans of the same feed: only items whose guid was not in
//! the previous scan become posts.

use wordburst::ingest::{bin_daily, FeedCollector};

fn feed(items: &[(&str, &str)]) -> Vec<u8> {
    let body: String = items
        .iter()
        .map(|(guid, title)| format!("<item><guid>{guid}</guid><title>{title}</title></item>"))
        .collect();
    format!("<rss version=\"2.0\"><channel><title>demo</title>{body}</channel></rss>").into_bytes()
}

fn main() {
    let mut collector = FeedCollector::new();
    let day0 = feed(&[("a", "Snow in the city"), ("b", "Election results")]);
    let day1 = feed(&[("b", "Election results"), ("c", "More snow &amp; ice")]);

    let mut posts = Vec::new();
    for (day, doc) in [(0, day0), (1, day1)] {
        let outcome = collector.scan(day, &[("demo".to_string(), doc)]);
        for post in &outcome.posts {
            println!("day {day}: new post {:?}", post.text);
        }
        posts.extend(outcome.posts);
    }
    let m = bin_daily(&posts, 2).unwrap();
    let snow = m.get("snow").unwrap();
    println!("'snow' by day: {}, {}", snow.count_on(0), snow.count_on(1));
    println!("'election' total: {}", m.total("election"));
}

//! RSS 2.0 item extraction and scan diffing.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use quick_xml::escape::{resolve_html5_entity, resolve_predefined_entity};
use quick_xml::events::Event;
use quick_xml::Reader;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::tokenize::strip_markup;
use super::{IngestError, Post};

/// One `<item>` of a feed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeedItem {
    pub feed_id: String,
    /// The item's `<guid>`, or a content hash of title and description when
    /// the feed omits it.
    pub guid: String,
    pub title: String,
    pub description: String,
}

impl FeedItem {
    /// Text attributed to the post created from this item.
    pub fn text(&self) -> String {
        match (self.title.is_empty(), self.description.is_empty()) {
            (false, false) => format!("{}\n{}", self.title, self.description),
            (false, true) => self.title.clone(),
            _ => self.description.clone(),
        }
    }
}

/// Stable identifier for items without a `<guid>`: hex SHA-256 of
/// `title + "\n" + description`.
pub fn content_guid(title: &str, description: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(title.as_bytes());
    hasher.update(b"\n");
    hasher.update(description.as_bytes());
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Title,
    Description,
    Guid,
}

#[derive(Default)]
struct RawItem {
    title: String,
    description: String,
    guid: String,
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses an RSS 2.0 document into its items, in document order.
///
/// Title and description have markup stripped and whitespace collapsed.
/// Repeated guids within one document keep only the first item.
pub fn parse_rss(feed_id: &str, bytes: &[u8]) -> Result<Vec<FeedItem>, IngestError> {
    let mut reader = Reader::from_reader(bytes);
    let mut buf = Vec::new();
    let mut stack: Vec<String> = Vec::new();
    let mut seen_root = false;
    let mut seen_channel = false;
    let mut current: Option<RawItem> = None;
    let mut field: Option<(Field, usize)> = None;
    let mut items = Vec::new();

    let xml_err = |reader: &Reader<&[u8]>, message: String| IngestError::Xml {
        offset: reader.error_position(),
        message,
    };

    loop {
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| xml_err(&reader, e.to_string()))?;
        match event {
            Event::Start(e) => {
                let name = e.local_name().as_ref().to_ascii_lowercase();
                if stack.is_empty() {
                    if seen_root {
                        return Err(IngestError::Xml {
                            offset: reader.buffer_position(),
                            message: "multiple root elements".into(),
                        });
                    }
                    seen_root = true;
                }
                let parent = stack.last().map(String::as_str);
                match (parent, name.as_str()) {
                    (Some("rss"), "channel") => seen_channel = true,
                    (Some("channel"), "item") if stack.len() == 2 => current = Some(RawItem::default()),
                    (Some("item"), "title") if current.is_some() => field = Some((Field::Title, stack.len() + 1)),
                    (Some("item"), "description") if current.is_some() => {
                        field = Some((Field::Description, stack.len() + 1))
                    }
                    (Some("item"), "guid") if current.is_some() => field = Some((Field::Guid, stack.len() + 1)),
                    _ => {}
                }
                stack.push(name);
            }
            Event::Empty(e) => {
                if stack.is_empty() {
                    return Err(IngestError::MissingChannel);
                }
                let name = e.local_name().as_ref().to_ascii_lowercase();
                if name == "channel" && stack.last().map(String::as_str) == Some("rss") {
                    seen_channel = true;
                }
            }
            Event::End(_) => {
                let depth = stack.len();
                if let Some((_, d)) = field {
                    if d == depth {
                        field = None;
                    }
                }
                if let Some(name) = stack.pop() {
                    if name == "item" && depth == 3 {
                        if let Some(raw) = current.take() {
                            items.push(raw);
                        }
                    }
                }
            }
            Event::Text(t) => {
                if let (Some((f, _)), Some(item)) = (field, current.as_mut()) {
                    push_field(item, f, &t.xml10_content());
                }
            }
            Event::CData(t) => {
                if let (Some((f, _)), Some(item)) = (field, current.as_mut()) {
                    push_field(item, f, &t.xml10_content());
                }
            }
            Event::GeneralRef(r) => {
                if let (Some((f, _)), Some(item)) = (field, current.as_mut()) {
                    let resolved = if r.is_char_ref() {
                        r.resolve_char_ref()
                            .map_err(|e| xml_err(&reader, e.to_string()))?
                            .map(String::from)
                    } else {
                        let name = r.xml10_content();
                        resolve_predefined_entity(&name)
                            .or_else(|| resolve_html5_entity(&name))
                            .map(str::to_owned)
                    };
                    push_field(item, f, resolved.as_deref().unwrap_or(" "));
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    if !stack.is_empty() {
        return Err(IngestError::Xml {
            offset: reader.buffer_position(),
            message: format!("unclosed element <{}>", stack.last().unwrap()),
        });
    }
    if !seen_root {
        return Err(IngestError::Xml {
            offset: reader.buffer_position(),
            message: "document has no root element".into(),
        });
    }
    if !seen_channel {
        return Err(IngestError::MissingChannel);
    }

    let mut guids = HashSet::new();
    let mut out = Vec::with_capacity(items.len());
    for raw in items {
        let title = collapse_whitespace(&strip_markup(&raw.title));
        let description = collapse_whitespace(&strip_markup(&raw.description));
        let guid = match collapse_whitespace(&raw.guid) {
            g if g.is_empty() => content_guid(&title, &description),
            g => g,
        };
        if guids.insert(guid.clone()) {
            out.push(FeedItem {
                feed_id: feed_id.to_string(),
                guid,
                title,
                description,
            });
        }
    }
    Ok(out)
}

fn push_field(item: &mut RawItem, field: Field, text: &str) {
    match field {
        Field::Title => item.title.push_str(text),
        Field::Description => item.description.push_str(text),
        Field::Guid => item.guid.push_str(text),
    }
}

/// Items of `current` whose guid is not in `previous`.
pub fn diff_scan(previous: &HashSet<String>, current: &[FeedItem]) -> Vec<FeedItem> {
    current
        .iter()
        .filter(|item| !previous.contains(&item.guid))
        .cloned()
        .collect()
}

/// On-disk guid sets of the last scan, one `<feed_id>.guids` file per feed.
#[derive(Debug, Clone)]
pub struct SnapshotStore {
    dir: PathBuf,
}

impl SnapshotStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        SnapshotStore { dir: dir.into() }
    }

    fn path(&self, feed_id: &str) -> PathBuf {
        let safe: String = feed_id
            .chars()
            .map(|c| if c.is_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
            .collect();
        self.dir.join(format!("{safe}.guids"))
    }

    /// Guids of the last scan, or an empty set for a feed never seen.
    pub fn load(&self, feed_id: &str) -> io::Result<HashSet<String>> {
        match fs::read_to_string(self.path(feed_id)) {
            Ok(text) => Ok(text.lines().filter(|l| !l.is_empty()).map(str::to_owned).collect()),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(HashSet::new()),
            Err(e) => Err(e),
        }
    }

    pub fn save(&self, feed_id: &str, guids: &HashSet<String>) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut sorted: Vec<&str> = guids.iter().map(String::as_str).collect();
        sorted.sort_unstable();
        let mut body = sorted.join("\n");
        body.push('\n');
        crate::io::write_atomic(&self.path(feed_id), body.as_bytes())
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

/// Outcome of one scan over a set of feeds.
#[derive(Debug, Default)]
pub struct ScanOutcome {
    /// New items, as posts attributed to the scan day.
    pub posts: Vec<Post>,
    /// Feeds that failed to parse; their previous guid sets are kept.
    pub failures: Vec<(String, IngestError)>,
}

/// Replays successive scans, remembering each feed's guids from its last
/// successful scan.
#[derive(Debug, Default)]
pub struct FeedCollector {
    last_scan: BTreeMap<String, HashSet<String>>,
}

impl FeedCollector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads the previous state of the given feeds from a snapshot store.
    pub fn from_store<'a>(
        store: &SnapshotStore,
        feed_ids: impl IntoIterator<Item = &'a str>,
    ) -> io::Result<Self> {
        let mut last_scan = BTreeMap::new();
        for id in feed_ids {
            last_scan.insert(id.to_string(), store.load(id)?);
        }
        Ok(FeedCollector { last_scan })
    }

    pub fn persist(&self, store: &SnapshotStore) -> io::Result<()> {
        for (id, guids) in &self.last_scan {
            store.save(id, guids)?;
        }
        Ok(())
    }

    pub fn known_guids(&self, feed_id: &str) -> Option<&HashSet<String>> {
        self.last_scan.get(feed_id)
    }

    /// Parses and diffs every feed document of one scan. Feeds are handled
    /// in parallel; posts come back ordered by feed id then document order.
    pub fn scan(&mut self, day_index: u32, feeds: &[(String, Vec<u8>)]) -> ScanOutcome {
        let empty = HashSet::new();
        let mut results: Vec<(String, Result<(Vec<FeedItem>, Vec<FeedItem>), IngestError>)> = feeds
            .par_iter()
            .map(|(id, bytes)| {
                let previous = self.last_scan.get(id).unwrap_or(&empty);
                let parsed = parse_rss(id, bytes).map(|items| {
                    let new = diff_scan(previous, &items);
                    (items, new)
                });
                (id.clone(), parsed)
            })
            .collect();
        results.sort_by(|a, b| a.0.cmp(&b.0));

        let mut outcome = ScanOutcome::default();
        for (id, result) in results {
            match result {
                Ok((items, new)) => {
                    outcome.posts.extend(new.iter().map(|item| Post {
                        feed_id: id.clone(),
                        day_index,
                        text: item.text(),
                    }));
                    self.last_scan
                        .insert(id, items.into_iter().map(|i| i.guid).collect());
                }
                Err(e) => outcome.failures.push((id, e)),
            }
        }
        outcome
    }
}

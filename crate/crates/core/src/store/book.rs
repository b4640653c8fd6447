use std::collections::btree_map::{self, BTreeMap};
use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::board::{Position, Score};
use crate::bounds::SolveBounds;
use crate::eval::EstimateDictionary;
use crate::frontier::{BoundDictionary, ProofOutcome};
use crate::jobs::write_atomic;
use crate::store::StoreError;
use crate::symmetry::canonical;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    /// Bounds established by an exact search.
    Proved,
    /// A prediction; `lower == upper` holds the estimate.
    Estimated,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Proved => "proved",
            Source::Estimated => "estimated",
        })
    }
}

impl FromStr for Source {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "proved" => Ok(Source::Proved),
            "estimated" => Ok(Source::Estimated),
            _ => Err(format!("unknown source {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BookEntry {
    pub bounds: SolveBounds,
    pub source: Source,
    pub nodes: u64,
    /// Seconds since the Unix epoch.
    pub timestamp: Option<u64>,
}

/// Canonical position to proven bounds or an estimate.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Book {
    entries: BTreeMap<Position, BookEntry>,
}

impl Book {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, p: &Position) -> Option<BookEntry> {
        self.entries.get(&canonical(p)).copied()
    }

    /// Proven bounds for `p`, ignoring estimates.
    pub fn proved(&self, p: &Position) -> Option<SolveBounds> {
        self.get(p).filter(|e| e.source == Source::Proved).map(|e| e.bounds)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Position, BookEntry> {
        self.entries.iter()
    }

    /// Adds `entry`. Two proofs intersect (and must overlap); a proof
    /// replaces an estimate; a newer estimate replaces an older one; an
    /// estimate never replaces a proof.
    pub fn insert(&mut self, p: &Position, entry: BookEntry) -> Result<(), StoreError> {
        let key = canonical(p);
        let merged = match (self.entries.get(&key), entry.source) {
            (None, _) => entry,
            (Some(old), Source::Proved) if old.source == Source::Proved => {
                let bounds = old.bounds.intersect(&entry.bounds).ok_or_else(|| StoreError::Conflict {
                    position: key.to_text(),
                    stored: old.bounds.to_string(),
                    new: entry.bounds.to_string(),
                })?;
                BookEntry {
                    bounds,
                    source: Source::Proved,
                    nodes: old.nodes + entry.nodes,
                    timestamp: old.timestamp.max(entry.timestamp),
                }
            }
            (Some(old), Source::Estimated) if old.source == Source::Proved => *old,
            (Some(_), _) => entry,
        };
        self.entries.insert(key, merged);
        Ok(())
    }

    /// Key-wise combination of two books under [`Book::insert`].
    pub fn merge(&mut self, other: &Book) -> Result<(), StoreError> {
        for (p, e) in other.iter() {
            self.insert(p, *e)?;
        }
        Ok(())
    }

    /// The proved entries as a dictionary for certification.
    pub fn bound_dictionary(&self) -> BoundDictionary {
        self.entries
            .iter()
            .filter(|(_, e)| e.source == Source::Proved)
            .map(|(p, e)| (*p, e.bounds))
            .collect()
    }

    /// Values to steer a traversal: estimates as stored, proofs by the
    /// fail-soft value their bounds came from.
    pub fn estimate_dictionary(&self) -> EstimateDictionary {
        let mut d = EstimateDictionary::new();
        for (p, e) in &self.entries {
            let v = if e.bounds.lower > -p.max_score() { e.bounds.lower } else { e.bounds.upper };
            d.insert(p, v);
        }
        d
    }

    /// Every dictionary entry as proved, with node counts summed over the
    /// run's results, and every estimate not covered by a proof.
    pub fn from_outcome(outcome: &ProofOutcome, timestamp: Option<u64>) -> Book {
        let mut nodes: BTreeMap<Position, u64> = BTreeMap::new();
        for r in &outcome.results {
            *nodes.entry(canonical(&r.position)).or_insert(0) += r.nodes;
        }
        let mut book = Book::new();
        for (p, b) in outcome.bounds.iter() {
            let entry = BookEntry {
                bounds: *b,
                source: Source::Proved,
                nodes: nodes.get(p).copied().unwrap_or(0),
                timestamp,
            };
            book.entries.insert(*p, entry);
        }
        for (p, v) in outcome.estimates.iter() {
            book.entries.entry(*p).or_insert(BookEntry {
                bounds: SolveBounds::exact(*v),
                source: Source::Estimated,
                nodes: 0,
                timestamp,
            });
        }
        book
    }

    /// `position lower upper source nodes [timestamp]` per entry.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, e) in &self.entries {
            let _ = write!(out, "{} {} {} {} {}", p.to_text(), e.bounds.lower, e.bounds.upper, e.source, e.nodes);
            if let Some(t) = e.timestamp {
                let _ = write!(out, " {t}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Book, StoreError> {
        let mut book = Book::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (p, entry) = parse_line(line).map_err(|message| StoreError::Line { line: i + 1, message })?;
            book.insert(&p, entry).map_err(|e| StoreError::Line {
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(book)
    }
}

fn parse_line(line: &str) -> Result<(Position, BookEntry), String> {
    let f: Vec<&str> = line.split_whitespace().collect();
    if !(6..=7).contains(&f.len()) {
        return Err(format!("expected 6 or 7 fields, found {}", f.len()));
    }
    let p: Position = format!("{} {}", f[0], f[1]).parse().map_err(|e| format!("{e}"))?;
    let score = |s: &str| s.parse::<Score>().map_err(|_| format!("bad score {s:?}"));
    let bounds = SolveBounds::new(score(f[2])?, score(f[3])?).ok_or("lower bound above upper bound")?;
    if !bounds.is_within(p.max_score()) {
        return Err(format!("bounds {bounds} outside ±{}", p.max_score()));
    }
    let source: Source = f[4].parse()?;
    if source == Source::Estimated && !bounds.is_exact() {
        return Err("an estimate must have equal bounds".into());
    }
    let nodes = f[5].parse::<u64>().map_err(|_| format!("bad node count {:?}", f[5]))?;
    let timestamp = match f.get(6) {
        Some(t) => Some(t.parse::<u64>().map_err(|_| format!("bad timestamp {t:?}"))?),
        None => None,
    };
    Ok((
        p,
        BookEntry {
            bounds,
            source,
            nodes,
            timestamp,
        },
    ))
}

pub fn save_book(path: &Path, book: &Book) -> Result<(), StoreError> {
    write_atomic(path, book.to_text().as_bytes())?;
    Ok(())
}

pub fn load_book(path: &Path) -> Result<Book, StoreError> {
    Book::from_text(&fs::read_to_string(path)?)
}

use std::collections::btree_map::{self, BTreeMap};
use std::fmt::Write as _;

use crate::board::{Position, Score};
use crate::bounds::SolveBounds;
use crate::frontier::FrontierError;
use crate::symmetry::canonical;

/// Proven bounds per canonical position.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundDictionary {
    entries: BTreeMap<Position, SolveBounds>,
}

impl BoundDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, p: &Position) -> Option<SolveBounds> {
        self.entries.get(&canonical(p)).copied()
    }

    /// Tightens the stored bounds of `p` with `bounds`. Disjoint intervals
    /// mean two proofs disagree and are reported as a conflict.
    pub fn merge(&mut self, p: &Position, bounds: SolveBounds) -> Result<SolveBounds, FrontierError> {
        let key = canonical(p);
        let merged = match self.entries.get(&key) {
            None => bounds,
            Some(stored) => stored.intersect(&bounds).ok_or_else(|| FrontierError::Conflict {
                position: key.to_text(),
                stored: stored.to_string(),
                new: bounds.to_string(),
            })?,
        };
        self.entries.insert(key, merged);
        Ok(merged)
    }

    /// Overwrites without any consistency check.
    pub fn set(&mut self, p: &Position, bounds: SolveBounds) {
        self.entries.insert(canonical(p), bounds);
    }

    pub fn remove(&mut self, p: &Position) -> Option<SolveBounds> {
        self.entries.remove(&canonical(p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Position, SolveBounds> {
        self.entries.iter()
    }

    pub fn exact_count(&self) -> usize {
        self.entries.values().filter(|b| b.is_exact()).count()
    }

    /// One `position lower upper` line per entry, in key order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, b) in &self.entries {
            let _ = writeln!(out, "{} {} {}", p.to_text(), b.lower, b.upper);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut d = BoundDictionary::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let err = |reason: &str| format!("line {}: {reason}", i + 1);
            if fields.len() != 4 {
                return Err(err("expected `position X lower upper`"));
            }
            let p: Position = format!("{} {}", fields[0], fields[1]).parse().map_err(|e| err(&format!("{e}")))?;
            let lower: Score = fields[2].parse().map_err(|_| err("bad lower bound"))?;
            let upper: Score = fields[3].parse().map_err(|_| err("bad upper bound"))?;
            let b = SolveBounds::new(lower, upper)
                .filter(|b| b.is_within(p.max_score()))
                .ok_or_else(|| err("bounds out of order or out of range"))?;
            d.merge(&p, b).map_err(|e| err(&e.to_string()))?;
        }
        Ok(d)
    }
}

impl FromIterator<(Position, SolveBounds)> for BoundDictionary {
    fn from_iter<I: IntoIterator<Item = (Position, SolveBounds)>>(iter: I) -> Self {
        let mut d = BoundDictionary::new();
        for (p, b) in iter {
            d.set(&p, b);
        }
        d
    }
}

/// A frontier position to solve under the window `(alpha, beta)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Task {
    pub alpha: Score,
    pub beta: Score,
    pub estimate: Score,
}

/// Frontier positions still needed by a traversal, keyed canonically.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TaskSet {
    tasks: BTreeMap<Position, Task>,
}

impl TaskSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `p` or widens its window to cover `(alpha, beta)`; the estimate is
    /// replaced by the latest one.
    pub fn record(&mut self, p: &Position, alpha: Score, beta: Score, estimate: Score) {
        debug_assert!(alpha < beta);
        self.tasks
            .entry(canonical(p))
            .and_modify(|t| {
                t.alpha = t.alpha.min(alpha);
                t.beta = t.beta.max(beta);
                t.estimate = estimate;
            })
            .or_insert(Task { alpha, beta, estimate });
    }

    pub fn get(&self, p: &Position) -> Option<Task> {
        self.tasks.get(&canonical(p)).copied()
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Position, Task> {
        self.tasks.iter()
    }

    pub(crate) fn iter_mut(&mut self) -> btree_map::IterMut<'_, Position, Task> {
        self.tasks.iter_mut()
    }

    /// One `position alpha beta estimate` line per task, in key order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, t) in &self.tasks {
            let _ = writeln!(out, "{} {} {} {}", p.to_text(), t.alpha, t.beta, t.estimate);
        }
        out
    }
}

impl FromIterator<(Position, Task)> for TaskSet {
    fn from_iter<I: IntoIterator<Item = (Position, Task)>>(iter: I) -> Self {
        let mut a = TaskSet::new();
        for (p, t) in iter {
            a.record(&p, t.alpha, t.beta, t.estimate);
        }
        a
    }
}

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::board::{Position, Score};
use crate::frontier::ProofOutcome;
use crate::store::StoreError;

/// Cost of one solved task and the estimate it was scheduled with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StatRow {
    pub position: Position,
    pub estimate: Score,
    pub nodes: u64,
}

impl StatRow {
    /// One row per task result of a proof run, binned by the run's
    /// estimate for the position, or by its solved value when it has none.
    pub fn from_outcome(outcome: &ProofOutcome) -> Vec<StatRow> {
        outcome
            .results
            .iter()
            .map(|r| StatRow {
                position: r.position,
                estimate: outcome.estimates.get(&r.position).unwrap_or(r.value),
                nodes: r.nodes,
            })
            .collect()
    }
}

/// `position side estimate nodes` per row.
pub fn rows_to_text(rows: &[StatRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let _ = writeln!(out, "{} {} {}", r.position.to_text(), r.estimate, r.nodes);
    }
    out
}

pub fn rows_from_text(text: &str) -> Result<Vec<StatRow>, StoreError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.is_empty() {
            continue;
        }
        let bad = |message: String| StoreError::Line { line: i + 1, message };
        if f.len() != 4 {
            return Err(bad(format!("expected 4 fields, found {}", f.len())));
        }
        let position: Position = format!("{} {}", f[0], f[1]).parse().map_err(|e| bad(format!("{e}")))?;
        let estimate = f[2].parse().map_err(|_| bad(format!("bad estimate {:?}", f[2])))?;
        let nodes = f[3].parse().map_err(|_| bad(format!("bad node count {:?}", f[3])))?;
        rows.push(StatRow {
            position,
            estimate,
            nodes,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatsExport {
    /// Tasks by descending node count with running totals and the
    /// percentile bucket each rank falls in.
    pub by_cost: String,
    /// Node totals per estimated value.
    pub by_estimate: String,
}

pub fn export_stats(rows: &[StatRow]) -> StatsExport {
    let mut sorted: Vec<&StatRow> = rows.iter().collect();
    sorted.sort_by(|a, b| b.nodes.cmp(&a.nodes).then(a.position.cmp(&b.position)));
    let mut by_cost = String::from("rank,percentile,position,estimate,nodes,cumulative\n");
    let mut cumulative = 0u64;
    let n = sorted.len().max(1);
    for (i, r) in sorted.iter().enumerate() {
        cumulative += r.nodes;
        let percentile = (i * 100 / n) + 1;
        let _ = writeln!(
            by_cost,
            "{},{},{},{},{},{}",
            i + 1,
            percentile,
            r.position.to_text(),
            r.estimate,
            r.nodes,
            cumulative
        );
    }
    let mut bins: BTreeMap<Score, (usize, u64)> = BTreeMap::new();
    for r in rows {
        let bin = bins.entry(r.estimate).or_insert((0, 0));
        bin.0 += 1;
        bin.1 += r.nodes;
    }
    let mut by_estimate = String::from("estimate,tasks,nodes\n");
    for (e, (count, nodes)) in bins {
        let _ = writeln!(by_estimate, "{e},{count},{nodes}");
    }
    StatsExport { by_cost, by_estimate }
}

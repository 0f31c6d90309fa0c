use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::GridFunction;

/// Node range `start..=end` on the parent grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NodeRange {
    pub start: usize,
    pub end: usize,
}

impl NodeRange {
    pub fn contains(&self, k: usize) -> bool {
        self.start <= k && k <= self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Pairwise disjoint node ranges, sorted left to right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct IntervalCover {
    intervals: Vec<NodeRange>,
}

impl IntervalCover {
    pub fn intervals(&self) -> &[NodeRange] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.intervals.iter().any(|r| r.contains(k))
    }

    /// Maximal node ranges not inside any cover interval, extended to share
    /// their endpoint nodes with the neighbouring cover intervals.
    pub fn complement(&self, n: usize) -> Vec<NodeRange> {
        let mut out = Vec::new();
        let mut lo = 0;
        for r in &self.intervals {
            if r.start > lo {
                out.push(NodeRange { start: lo, end: r.start });
            }
            lo = r.end;
        }
        if lo < n - 1 {
            out.push(NodeRange { start: lo, end: n - 1 });
        }
        out
    }
}

/// Cover `{|h| ≤ η1}` by disjoint node ranges on which `|h| < η2`.
///
/// Each maximal run of nodes with `|h| ≤ η1` is widened by one node on
/// either side (where the grid allows), so interior cover endpoints satisfy
/// `|h| > η1`. Widened runs that overlap are merged. Fails when a widening
/// node already has `|h| ≥ η2`; a finer grid resolves that.
pub fn sublevel_cover(h: &GridFunction, eta1: f64, eta2: f64) -> Result<IntervalCover> {
    if !(0.0 < eta1 && eta1 < eta2) {
        return Err(Error::PreconditionViolated(format!("need 0 < eta1 < eta2, got {eta1}, {eta2}")));
    }
    let m: Vec<f64> = h.values().iter().map(|z| z.norm()).collect();
    let n = m.len();
    let mut intervals: Vec<NodeRange> = Vec::new();
    let mut k = 0;
    while k < n {
        if m[k] > eta1 {
            k += 1;
            continue;
        }
        let run_start = k;
        while k < n && m[k] <= eta1 {
            k += 1;
        }
        let run_end = k - 1;
        let start = run_start.saturating_sub(1);
        let end = (run_end + 1).min(n - 1);
        for node in [start, end] {
            if m[node] >= eta2 {
                return Err(Error::CoverInfeasible { node });
            }
        }
        match intervals.last_mut() {
            Some(last) if last.end >= start => last.end = end,
            _ => intervals.push(NodeRange { start, end }),
        }
    }
    Ok(IntervalCover { intervals })
}

//! One-dimensional reformulation: every disk becomes the segments spanned by
//! its maximal runs of consecutive covered points, and a left-to-right sweep
//! over the projected points computes the prefix optima.

use std::collections::BTreeSet;

use crate::instance::{check_structure, CoverageInstance};
use crate::numeric::{Cost, OrdCost};
use crate::relation::{DiskRelation, Relation};
use crate::solution::{dispatch, Engine, SolveError, SolveOptions, Solution, StepRecord, Trace};

/// A maximal run `[left, right]` (1-based point ranks) covered by `owner`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Segment {
    pub owner: usize,
    pub left: usize,
    pub right: usize,
}

/// Segments for every set of the relation, grouped by owner and ordered by
/// left endpoint.
pub(crate) fn segments_of<R: Relation>(rel: &R) -> Vec<Segment> {
    let n = rel.n();
    let mut out = Vec::new();
    for s in 0..rel.m() {
        let mut start = None;
        for rank in 0..n {
            match (rel.covers(rank, s), start) {
                (true, None) => start = Some(rank + 1),
                (false, Some(l)) => {
                    out.push(Segment { owner: s, left: l, right: rank });
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(l) = start {
            out.push(Segment { owner: s, left: l, right: n });
        }
    }
    out
}

pub fn build_segments(inst: &CoverageInstance, opts: &SolveOptions) -> Vec<Segment> {
    segments_of(&DiskRelation::new(inst, opts.predicate))
}

/// Sweep over `n` projected points. At rank i: activate segments starting
/// at i, take the active minimum, then retire segments ending at i.
pub fn solve_intervals<C: Cost>(segments: &[Segment], weights: &[C], n: usize) -> Vec<Option<C>> {
    sweep(segments, weights, n).prefix
}

fn sweep<C: Cost>(segments: &[Segment], weights: &[C], n: usize) -> Trace<C> {
    let mut starts: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
    let mut ends: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
    for (id, seg) in segments.iter().enumerate() {
        assert!(1 <= seg.left && seg.left <= seg.right && seg.right <= n, "bad segment {seg:?}");
        starts[seg.left].push(id);
        ends[seg.right].push(id);
    }
    let mut trace = Trace::new(n);
    // delta[0] = 0; entries are None once the sweep hits an uncovered point
    let mut delta: Vec<C> = Vec::with_capacity(n + 1);
    delta.push(C::zero());
    let mut cost: Vec<Option<C>> = vec![None; segments.len()];
    let mut active: BTreeSet<(OrdCost<C>, usize, usize)> = BTreeSet::new();
    for i in 1..=n {
        for &id in &starts[i] {
            // the rightmost point strictly left of the segment is rank i-1
            let f = i - 1;
            let c = weights[segments[id].owner].plus(&delta[f]);
            active.insert((OrdCost(c.clone()), segments[id].owner, id));
            cost[id] = Some(c);
        }
        let Some((best, owner, id)) = active.first().cloned() else {
            trace.close_infeasible(n);
            return trace;
        };
        trace.records.push(StepRecord { argmin: owner, prev: segments[id].left - 1 });
        delta.push(best.0.clone());
        trace.prefix.push(Some(best.0));
        for &id in &ends[i] {
            let c = cost[id].take().expect("active segment has a cost");
            active.remove(&(OrdCost(c), segments[id].owner, id));
        }
        trace.counters.heap_ops += (starts[i].len() + ends[i].len() + 1) as u64;
    }
    trace
}

struct IntervalEngine {
    segments: Vec<Segment>,
    n: usize,
}

impl Engine for IntervalEngine {
    fn name(&self) -> &'static str {
        "interval"
    }

    fn run<C: Cost>(&self, weights: &[C]) -> Result<Trace<C>, SolveError> {
        Ok(sweep(&self.segments, weights, self.n))
    }
}

/// Solves a coverage instance through the segment sweep.
pub fn solve_interval(inst: &CoverageInstance, opts: &SolveOptions) -> Result<Solution, SolveError> {
    check_structure(inst)?;
    let rel = DiskRelation::new(inst, opts.predicate);
    let mut segments = segments_of(&rel);
    let containment_tests = (rel.n() * rel.m()) as u64;
    segments.sort_by_key(|s| (s.left, s.owner));
    let engine = IntervalEngine { segments, n: rel.n() };
    let mut sol = dispatch(&engine, &inst.weights(), opts.arithmetic)?;
    sol.stats.counters.containment_tests += containment_tests;
    sol.stats.total_ops = sol.stats.counters.total();
    Ok(sol)
}

//! The simple O(nm) dynamic program.
//!
//! Points are processed left to right. Each iteration takes the cheapest
//! current cost among the disks containing the point (FindMinCost), then
//! resets every other disk to its weight plus that value (ResetCost).

use crate::instance::{check_structure, validate_halfplanes, CoverageInstance, HalfplaneInstance};
use crate::numeric::Cost;
use crate::relation::{DiskRelation, HalfplaneRelation, Relation};
use crate::solution::{dispatch, Engine, SolveError, SolveOptions, Solution, StepRecord, Trace};

/// Current cost of each set plus the prefix index it was last reset from.
#[derive(Debug, Clone)]
pub struct CostArray<C> {
    pub cost: Vec<C>,
    pub provenance: Vec<usize>,
}

impl<C: Cost> CostArray<C> {
    pub fn new(weights: &[C]) -> Self {
        CostArray { cost: weights.to_vec(), provenance: vec![0; weights.len()] }
    }

    /// Cheapest covering set, ties to the smallest index.
    pub fn find_min(&self, covered: &[bool]) -> Option<(C, usize)> {
        let mut best: Option<(C, usize)> = None;
        for (s, c) in self.cost.iter().enumerate() {
            if covered[s] && best.as_ref().map_or(true, |(b, _)| c.total_cmp(b).is_lt()) {
                best = Some((c.clone(), s));
            }
        }
        best
    }

    /// `cost(s) = w(s) + delta` for every set not covering the point; returns
    /// the number of resets.
    pub fn reset(&mut self, weights: &[C], covered: &[bool], delta: &C, iteration: usize) -> u64 {
        let mut resets = 0;
        for s in 0..self.cost.len() {
            if !covered[s] {
                self.cost[s] = weights[s].plus(delta);
                self.provenance[s] = iteration;
                resets += 1;
            }
        }
        resets
    }
}

pub(crate) struct NaiveEngine<'a, R> {
    pub rel: &'a R,
}

impl<R: Relation> Engine for NaiveEngine<'_, R> {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn run<C: Cost>(&self, weights: &[C]) -> Result<Trace<C>, SolveError> {
        let (n, m) = (self.rel.n(), self.rel.m());
        let mut trace = Trace::new(n);
        let mut costs = CostArray::new(weights);
        let mut covered = vec![false; m];
        for i in 1..=n {
            for (s, flag) in covered.iter_mut().enumerate() {
                *flag = self.rel.covers(i - 1, s);
            }
            trace.counters.containment_tests += m as u64;
            let Some((delta, argmin)) = costs.find_min(&covered) else {
                trace.close_infeasible(n);
                return Ok(trace);
            };
            debug_assert!(costs.cost.iter().zip(weights).all(|(c, w)| c >= w));
            trace.records.push(StepRecord { argmin, prev: costs.provenance[argmin] });
            trace.counters.cost_resets += costs.reset(weights, &covered, &delta, i);
            trace.prefix.push(Some(delta));
        }
        Ok(trace)
    }
}

pub fn solve_naive(inst: &CoverageInstance, opts: &SolveOptions) -> Result<Solution, SolveError> {
    check_structure(inst)?;
    let rel = DiskRelation::new(inst, opts.predicate);
    dispatch(&NaiveEngine { rel: &rel }, &inst.weights(), opts.arithmetic)
}

pub fn solve_naive_halfplanes(inst: &HalfplaneInstance, opts: &SolveOptions) -> Result<Solution, SolveError> {
    validate_halfplanes(inst).into_result()?;
    let rel = HalfplaneRelation::new(inst, opts.predicate);
    let weights = inst.weights();
    dispatch(&NaiveEngine { rel: &rel }, &weights, opts.arithmetic)
}

//! The subquadratic solver and its adapters.
//!
//! Roles are swapped before solving: every input point becomes a dual disk of
//! the same radius centered at it, and every weighted disk becomes a weighted
//! dual point at its center. A disk covers a point exactly when the dual disk
//! covers the dual point, so the left-to-right dynamic program can be run
//! with dual disks as queries against a cutting of their lower arcs.

use crate::cost_tree::{Checkpoint, CostTree};
use crate::cutting::{CuttingParams, HierCutting, RootShape};
use crate::geom::{Curve, LowerArc, Point, Predicate};
use crate::instance::{check_structure, sorted_order, validate_halfplanes, validate_hitting, CoverageInstance, HalfplaneInstance, HittingInstance};
use crate::numeric::{Cost, FixedScale};
use crate::solution::{dispatch, Arithmetic, Engine, SolveError, Solution, StepRecord, Trace};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Defaults to `min(ceil(sqrt(m)), n)`.
    pub r: Option<usize>,
    pub rho: usize,
    pub seed: u64,
    pub sample_factor: f64,
    pub predicate: Predicate,
    pub arithmetic: Arithmetic,
    /// Check the bookkeeping invariants against a shadow cost array after
    /// every iteration.
    pub debug_invariants: bool,
    /// Record a checkpoint every this many iterations.
    pub checkpoint_every: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            r: None,
            rho: 4,
            seed: 0,
            sample_factor: 1.0,
            predicate: Predicate::default(),
            arithmetic: Arithmetic::Float,
            debug_invariants: false,
            checkpoint_every: None,
        }
    }
}

impl SolverConfig {
    pub fn exact() -> Self {
        SolverConfig { predicate: Predicate::Exact, arithmetic: Arithmetic::Exact, ..Default::default() }
    }

    pub fn effective_r(&self, n: usize, m: usize) -> usize {
        let r = self.r.unwrap_or_else(|| (m as f64).sqrt().ceil() as usize);
        r.min(n).max(1)
    }
}

/// Dual view of a coverage instance: one dual disk per point (in
/// left-to-right order) and one weighted dual point per disk.
#[derive(Debug, Clone, PartialEq)]
pub struct DualInstance {
    pub radius: f64,
    /// Centers of the dual disks; entry i is the point of rank i.
    pub disk_centers: Vec<Point>,
    /// Input index of the point behind each dual disk.
    pub order: Vec<usize>,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

pub fn dualize(inst: &CoverageInstance) -> DualInstance {
    let order = sorted_order(&inst.points);
    DualInstance {
        radius: inst.radius,
        disk_centers: order.iter().map(|&i| inst.points[i]).collect(),
        order,
        points: inst.disks.iter().map(|d| d.center).collect(),
        weights: inst.weights(),
    }
}

impl DualInstance {
    pub fn covers(&self, pred: Predicate, disk: usize, point: usize) -> bool {
        pred.disk_contains(self.disk_centers[disk], self.radius, self.points[point])
    }
}

/// Result of a fast solve plus any requested checkpoints.
#[derive(Debug, Clone)]
pub struct FastRun {
    pub solution: Solution,
    pub checkpoints: Vec<Checkpoint>,
}

struct FastEngine<'a, F> {
    cut: &'a HierCutting,
    dual_points: &'a [Point],
    cover: F,
    /// Dual curves that cannot cover any dual point.
    dead: &'a [bool],
    config: &'a SolverConfig,
    checkpoints: std::cell::RefCell<Vec<Checkpoint>>,
    construction_ops: u64,
}

impl<F: Fn(usize, usize) -> bool> Engine for FastEngine<'_, F> {
    fn name(&self) -> &'static str {
        "fast"
    }

    fn run<C: Cost>(&self, weights: &[C]) -> Result<Trace<C>, SolveError> {
        let n = self.dead.len();
        let mut trace = Trace::new(n);
        trace.r = Some(self.cut.r);
        trace.cutting = Some(self.cut.stats());
        let (leaf_of, members, steps) = self.cut.assign(self.dual_points)?;
        let mut tree = CostTree::init(self.cut, weights.to_vec(), leaf_of, members);
        tree.counters.locate_steps += steps;
        tree.counters.construction_ops += self.construction_ops;
        let mut shadow: Option<Vec<C>> = self.config.debug_invariants.then(|| weights.to_vec());
        for i in 1..=n {
            let d = i - 1;
            let found = if self.dead[d] { None } else { tree.find_min_cost(d, &self.cover) };
            let Some((delta, q)) = found else {
                trace.close_infeasible(n);
                break;
            };
            trace.records.push(StepRecord { argmin: q as usize, prev: tree.provenance(q as usize) });
            tree.reset_cost(d, &delta, i, &self.cover, self.config.debug_invariants);
            if let Some(shadow) = shadow.as_mut() {
                for (p, s) in shadow.iter_mut().enumerate() {
                    if !(self.cover)(d, p) {
                        *s = weights[p].plus(&delta);
                    }
                }
                tree.check(shadow, C::close_to).map_err(|detail| SolveError::Invariant { iteration: i, detail })?;
            }
            if let Some(every) = self.config.checkpoint_every {
                if every > 0 && i % every == 0 {
                    self.checkpoints.borrow_mut().push(tree.checkpoint(i, C::to_f64));
                }
            }
            trace.prefix.push(Some(delta));
        }
        trace.counters = tree.counters;
        Ok(trace)
    }
}

fn run_fast<F: Fn(usize, usize) -> bool>(
    curves: Vec<Curve>,
    live: Vec<bool>,
    shape: RootShape,
    dual_points: &[Point],
    weights: &[f64],
    cover: F,
    config: &SolverConfig,
) -> Result<FastRun, SolveError> {
    let n = live.len();
    let m = weights.len();
    if n == 0 {
        let solution = dispatch(&EmptyEngine, weights, config.arithmetic)?;
        return Ok(FastRun { solution, checkpoints: Vec::new() });
    }
    let r = config.effective_r(n, m);
    let params = CuttingParams { r, rho: config.rho, seed: config.seed, sample_factor: config.sample_factor };
    let cut = HierCutting::build(curves, &live, shape, params)?;
    let dead: Vec<bool> = live.iter().map(|l| !l).collect();
    let stats = cut.stats();
    let engine = FastEngine {
        cut: &cut,
        dual_points,
        cover,
        dead: &dead,
        config,
        checkpoints: std::cell::RefCell::new(Vec::new()),
        construction_ops: stats.crossing_tests,
    };
    let solution = dispatch(&engine, weights, config.arithmetic)?;
    let mut checkpoints = engine.checkpoints.into_inner();
    if config.arithmetic == Arithmetic::Exact {
        // fixed-point runs report values in scaled units
        if let Some(scale) = FixedScale::for_weights(weights) {
            let unit = (-(scale.shift as f64)).exp2();
            for c in &mut checkpoints {
                c.root_min_cost = c.root_min_cost.map(|v| v * unit);
            }
        }
    }
    Ok(FastRun { solution, checkpoints })
}

struct EmptyEngine;

impl Engine for EmptyEngine {
    fn name(&self) -> &'static str {
        "fast"
    }
    fn run<C: Cost>(&self, _: &[C]) -> Result<Trace<C>, SolveError> {
        Ok(Trace::new(0))
    }
}

/// Fast solve of a coverage instance; chosen indices refer to input disks.
pub fn solve_fast(inst: &CoverageInstance, config: &SolverConfig) -> Result<Solution, SolveError> {
    solve_fast_run(inst, config).map(|r| r.solution)
}

pub fn solve_fast_run(inst: &CoverageInstance, config: &SolverConfig) -> Result<FastRun, SolveError> {
    check_structure(inst)?;
    let dual = dualize(inst);
    let (curves, live) = dual_curves(&dual);
    let pred = config.predicate;
    let cover = |d: usize, q: usize| dual.covers(pred, d, q);
    run_fast(curves, live, RootShape::LowerHalfplane, &dual.points, &dual.weights, cover, config)
}

/// Lower arcs of the dual disks followed by the line itself. Disks that do
/// not reach below the line get an empty arc and are marked dead.
fn dual_curves(dual: &DualInstance) -> (Vec<Curve>, Vec<bool>) {
    let mut curves = Vec::with_capacity(dual.disk_centers.len() + 1);
    let mut live = Vec::with_capacity(dual.disk_centers.len());
    for (i, &c) in dual.disk_centers.iter().enumerate() {
        match LowerArc::new(i, c, dual.radius) {
            Ok(arc) if arc.xl < arc.xr => {
                curves.push(Curve::Arc(arc));
                live.push(true);
            }
            _ => {
                curves.push(Curve::Arc(LowerArc { owner: i, xl: c.x, xr: c.x, center: c, radius: dual.radius }));
                live.push(false);
            }
        }
    }
    curves.push(Curve::Line { a: 0.0, b: 0.0 });
    (curves, live)
}

/// The cutting the fast solver would build for `inst`.
pub fn dual_cutting(inst: &CoverageInstance, config: &SolverConfig) -> Result<HierCutting, SolveError> {
    check_structure(inst)?;
    let dual = dualize(inst);
    let (curves, live) = dual_curves(&dual);
    let params = CuttingParams {
        r: config.effective_r(live.len(), inst.m()),
        rho: config.rho,
        seed: config.seed,
        sample_factor: config.sample_factor,
    };
    Ok(HierCutting::build(curves, &live, RootShape::LowerHalfplane, params)?)
}

/// Minimum-weight point subset hitting every disk; chosen indices refer to
/// the input points.
pub fn solve_hitting(hit: &HittingInstance, config: &SolverConfig) -> Result<Solution, SolveError> {
    validate_hitting(hit).into_result()?;
    // reflecting across the line turns disk centers into points above it
    solve_fast(&hit.dual_coverage(), config)
}

/// Lower-halfplane coverage, solved in the parameter plane where halfplane
/// `y <= a x + b` is the point (a, b) and input point p is the line
/// `b = p.y - p.x a`, covering exactly the parameter points on or above it.
pub fn solve_halfplanes_lower(inst: &HalfplaneInstance, config: &SolverConfig) -> Result<Solution, SolveError> {
    validate_halfplanes(inst).into_result()?;
    let order = sorted_order(&inst.points);
    let curves: Vec<Curve> = order.iter().map(|&i| Curve::Line { a: -inst.points[i].x, b: inst.points[i].y }).collect();
    let live = vec![true; curves.len()];
    let dual_points: Vec<Point> = inst.halfplanes.iter().map(|h| Point::new(h.a, h.b)).collect();
    let weights = inst.weights();
    let pred = config.predicate;
    let cover = |d: usize, q: usize| pred.halfplane_contains(inst.halfplanes[q].region(), inst.points[order[d]]);
    run_fast(curves, live, RootShape::Plane, &dual_points, &weights, cover, config).map(|r| r.solution)
}

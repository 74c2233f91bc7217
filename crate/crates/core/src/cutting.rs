//! Hierarchical cutting of a family of x-monotone dual curves.
//!
//! Cells are pseudo-trapezoids: two vertical walls plus a bottom and a top
//! boundary, each either one of the curves or unbounded. A cell at level i is
//! refined by sampling part of its conflict list, building the vertical
//! decomposition of the sample inside the cell and recomputing the conflict
//! lists of the pieces from the parent's list. Pieces that still carry too many
//! curves are refined again in place until the level's bound holds.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Curve, Point};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CuttingError {
    #[error("r = {r} must satisfy 1 <= r <= n = {n}")]
    BadR { r: usize, n: usize },
    #[error("refinement ratio must be at least 2, got {0}")]
    BadRho(usize),
    #[error("query point ({x}, {y}) lies above the separating line")]
    AboveLine { x: f64, y: f64 },
}

/// Which region the root cell covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootShape {
    /// Closed lower halfplane; the boundary line is the last curve.
    LowerHalfplane,
    /// The whole plane.
    Plane,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bound {
    Curve(u32),
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub id: u32,
    pub level: u32,
    pub parent: Option<u32>,
    pub children: Vec<u32>,
    pub xl: f64,
    pub xr: f64,
    pub bottom: Bound,
    pub top: Bound,
    pub rep: Point,
    /// Ids of the curves crossing the open cell, increasing.
    pub conflict: Vec<u32>,
}

impl Cell {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuttingParams {
    pub r: usize,
    pub rho: usize,
    pub seed: u64,
    /// Multiplier on the sample size drawn per refinement.
    pub sample_factor: f64,
}

impl CuttingParams {
    pub fn new(r: usize) -> Self {
        CuttingParams { r, rho: 4, seed: 0, sample_factor: 1.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CuttingStats {
    pub n: usize,
    pub r: usize,
    pub rho: usize,
    pub k: usize,
    pub levels: usize,
    pub cells: usize,
    pub leaves: usize,
    pub max_leaf_conflict: usize,
    pub sum_conflict: usize,
    pub max_children: usize,
    /// cells / r^2
    pub c_cells: f64,
    /// Leaves whose conflict list still exceeds n/r (degenerate input).
    pub bound_violations: usize,
    pub crossing_tests: u64,
}

#[derive(Debug, Clone, Copy)]
struct Region {
    xl: f64,
    xr: f64,
    bottom: Bound,
    top: Bound,
}

#[derive(Debug, Clone)]
pub struct HierCutting {
    pub curves: Vec<Curve>,
    /// Number of dual curves (the boundary line, if any, comes after them).
    pub n: usize,
    pub shape: RootShape,
    pub r: usize,
    pub rho: usize,
    pub k: usize,
    pub cells: Vec<Cell>,
    pub leaves: Vec<u32>,
    /// For every dual curve, the cells whose conflict list contains it.
    pub disk_cells: Vec<Vec<u32>>,
    scale: f64,
    bound_violations: usize,
    crossing_tests: u64,
}

/// `ceil(log_rho r)`
pub fn depth_for(r: usize, rho: usize) -> usize {
    let mut k = 0;
    let mut p = 1usize;
    while p < r {
        p = p.saturating_mul(rho);
        k += 1;
    }
    k
}

#[inline]
fn slab_mid(lo: f64, hi: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (false, true) => hi - 1.0 - hi.abs() * 0.5,
        (true, false) => lo + 1.0 + lo.abs() * 0.5,
        (false, false) => 0.0,
    }
}

struct Builder<'a> {
    curves: &'a [Curve],
    rng: ChaCha8Rng,
    sample_factor: f64,
    tests: u64,
}

impl Builder<'_> {
    #[inline]
    fn y_bottom(&self, b: Bound, x: f64) -> f64 {
        match b {
            Bound::Curve(c) => self.curves[c as usize].y_at(x),
            Bound::Unbounded => f64::NEG_INFINITY,
        }
    }

    #[inline]
    fn y_top(&self, b: Bound, x: f64) -> f64 {
        match b {
            Bound::Curve(c) => self.curves[c as usize].y_at(x),
            Bound::Unbounded => f64::INFINITY,
        }
    }

    fn bound_xs(&self, c: &Curve, b: Bound, out: &mut Vec<f64>) {
        if let Bound::Curve(id) = b {
            out.extend(c.intersection_xs(&self.curves[id as usize]));
        }
    }

    /// Does curve `c` pass through the open interior of `reg`?
    fn crosses(&mut self, reg: &Region, c: u32) -> bool {
        self.tests += 1;
        if reg.bottom == Bound::Curve(c) || reg.top == Bound::Curve(c) {
            return false;
        }
        let curve = &self.curves[c as usize];
        let (clo, chi) = curve.x_range();
        let lo = clo.max(reg.xl);
        let hi = chi.min(reg.xr);
        if !(lo < hi) {
            return false;
        }
        // cheap rejection: curve entirely above the top or below the bottom
        if lo.is_finite() && hi.is_finite() {
            let (cmin, cmax) = curve.y_bounds(lo, hi);
            if let Bound::Curve(t) = reg.top {
                let (_, tmax) = self.curves[t as usize].y_bounds(lo, hi);
                if cmin > tmax {
                    return false;
                }
            }
            if let Bound::Curve(b) = reg.bottom {
                let (bmin, _) = self.curves[b as usize].y_bounds(lo, hi);
                if cmax < bmin {
                    return false;
                }
            }
        }
        let mut xs = vec![lo, hi];
        self.bound_xs(curve, reg.bottom, &mut xs);
        self.bound_xs(curve, reg.top, &mut xs);
        // intersections within rounding distance of a wall only graze the cell
        xs.retain(|&x| {
            let eps = 1e-12 * (1.0 + x.abs());
            x == lo || x == hi || (x > lo + eps && x < hi - eps)
        });
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs.windows(2).any(|w| {
            if !(w[0] < w[1]) {
                return false;
            }
            let m = slab_mid(w[0], w[1]);
            let y = curve.y_at(m);
            self.y_bottom(reg.bottom, m) < y && y < self.y_top(reg.top, m)
        })
    }

    /// Vertical decomposition of `sample` clipped to `reg`, with horizontally
    /// adjacent pieces of equal boundaries merged across walls.
    fn decompose(&mut self, reg: &Region, sample: &[u32]) -> Vec<Region> {
        let inside = |x: f64| x > reg.xl && x < reg.xr;
        let mut xs = vec![reg.xl, reg.xr];
        for (a, &ca) in sample.iter().enumerate() {
            let curve = self.curves[ca as usize];
            let (lo, hi) = curve.x_range();
            for x in [lo, hi] {
                if x.is_finite() && inside(x) {
                    xs.push(x);
                }
            }
            let mut own = Vec::new();
            self.bound_xs(&curve, reg.bottom, &mut own);
            self.bound_xs(&curve, reg.top, &mut own);
            xs.extend(own.into_iter().filter(|&x| inside(x)));
            for &cb in &sample[a + 1..] {
                self.tests += 1;
                for x in curve.intersection_xs(&self.curves[cb as usize]) {
                    if inside(x) {
                        let y = curve.y_at(x);
                        let slack = 1e-9 * (1.0 + y.abs());
                        if y >= self.y_bottom(reg.bottom, x) - slack && y <= self.y_top(reg.top, x) + slack {
                            xs.push(x);
                        }
                    }
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();

        let mut out: Vec<Region> = Vec::new();
        let mut open: HashMap<(Bound, Bound), usize> = HashMap::new();
        let mut active: Vec<(f64, u32)> = Vec::new();
        for w in xs.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            if !(x0 < x1) {
                continue;
            }
            let m = slab_mid(x0, x1);
            let yb = self.y_bottom(reg.bottom, m);
            let yt = self.y_top(reg.top, m);
            active.clear();
            for &c in sample {
                if reg.bottom == Bound::Curve(c) || reg.top == Bound::Curve(c) {
                    continue;
                }
                let curve = &self.curves[c as usize];
                let (lo, hi) = curve.x_range();
                if !(lo <= x0 && x1 <= hi) {
                    continue;
                }
                let y = curve.y_at(m);
                if yb < y && y < yt {
                    active.push((y, c));
                }
            }
            active.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut next_open = HashMap::with_capacity(active.len() + 1);
            let mut lower = (reg.bottom, yb);
            let uppers = active.iter().map(|&(y, c)| (Bound::Curve(c), y)).chain(std::iter::once((reg.top, yt)));
            for upper in uppers {
                if upper.1 > lower.1 {
                    let key = (lower.0, upper.0);
                    let idx = match open.get(&key) {
                        Some(&i) if out[i].xr == x0 => {
                            out[i].xr = x1;
                            i
                        }
                        _ => {
                            out.push(Region { xl: x0, xr: x1, bottom: lower.0, top: upper.0 });
                            out.len() - 1
                        }
                    };
                    next_open.insert(key, idx);
                }
                lower = upper;
            }
            open = next_open;
        }
        out
    }

    /// Splits `reg` into pieces each crossed by at most `cap` curves of `list`.
    fn refine(&mut self, reg: &Region, list: &[u32], cap: usize, boost: f64, out: &mut Vec<(Region, Vec<u32>)>) {
        let t = list.len() as f64 / cap.max(1) as f64;
        let want = (self.sample_factor * boost * t * (1.0 + t.ln().max(0.0))).ceil() as usize;
        let full = want >= list.len();
        let picked: Vec<u32> = if full {
            list.to_vec()
        } else {
            let mut idx = sample(&mut self.rng, list.len(), want.max(1)).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| list[i]).collect()
        };
        for piece in self.decompose(reg, &picked) {
            let conflict: Vec<u32> = list.iter().copied().filter(|&c| self.crosses(&piece, c)).collect();
            if conflict.len() > cap && !full {
                self.refine(&piece, &conflict, cap, boost * 1.5, out);
            } else {
                out.push((piece, conflict));
            }
        }
    }
}

impl HierCutting {
    /// Builds the cutting over `curves`. With [`RootShape::LowerHalfplane`]
    /// the last entry of `curves` must be the boundary line `y = 0`, and the
    /// first `curves.len() - 1` entries are the dual curves. `live` marks the
    /// dual curves that take part (others never enter a conflict list).
    pub fn build(curves: Vec<Curve>, live: &[bool], shape: RootShape, params: CuttingParams) -> Result<Self, CuttingError> {
        let n = match shape {
            RootShape::LowerHalfplane => curves.len() - 1,
            RootShape::Plane => curves.len(),
        };
        assert_eq!(live.len(), n);
        if params.r < 1 || params.r > n.max(1) {
            return Err(CuttingError::BadR { r: params.r, n });
        }
        if params.rho < 2 {
            return Err(CuttingError::BadRho(params.rho));
        }
        let r = params.r;
        let rho = params.rho;
        let k = depth_for(r, rho);
        let scale = curves
            .iter()
            .map(|c| match c {
                Curve::Arc(a) => a.radius,
                Curve::Line { .. } => 1.0,
            })
            .fold(1.0f64, f64::max);

        let root = Region {
            xl: f64::NEG_INFINITY,
            xr: f64::INFINITY,
            bottom: Bound::Unbounded,
            top: match shape {
                RootShape::LowerHalfplane => Bound::Curve(n as u32),
                RootShape::Plane => Bound::Unbounded,
            },
        };
        let mut b = Builder {
            curves: &curves,
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            sample_factor: params.sample_factor,
            tests: 0,
        };
        let root_conflict: Vec<u32> = (0..n as u32).filter(|&c| live[c as usize] && b.crosses(&root, c)).collect();
        let mut cells = vec![Cell {
            id: 0,
            level: 0,
            parent: None,
            children: Vec::new(),
            xl: root.xl,
            xr: root.xr,
            bottom: root.bottom,
            top: root.top,
            rep: Point::new(0.0, 0.0),
            conflict: root_conflict,
        }];
        let heavy = |len: usize| len * r > n;
        let max_level = (k + 8) as u32;
        let mut next = 0;
        while next < cells.len() {
            let id = next;
            next += 1;
            let len = cells[id].conflict.len();
            let level = cells[id].level;
            if !heavy(len) || level >= max_level {
                continue;
            }
            // the shallowest level bound this cell still exceeds, floored at n/r
            let mut j = level as usize + 1;
            let mut cap = n / rho.saturating_pow(j as u32).max(1);
            while cap >= len && j <= k {
                j += 1;
                cap = n / rho.saturating_pow(j as u32).max(1);
            }
            let cap = cap.max(n / r);
            let reg = Region { xl: cells[id].xl, xr: cells[id].xr, bottom: cells[id].bottom, top: cells[id].top };
            let list = std::mem::take(&mut cells[id].conflict);
            let mut pieces = Vec::new();
            b.refine(&reg, &list, cap, 1.0, &mut pieces);
            cells[id].conflict = list;
            for (piece, conflict) in pieces {
                let cid = cells.len() as u32;
                cells[id].children.push(cid);
                cells.push(Cell {
                    id: cid,
                    level: level + 1,
                    parent: Some(id as u32),
                    children: Vec::new(),
                    xl: piece.xl,
                    xr: piece.xr,
                    bottom: piece.bottom,
                    top: piece.top,
                    rep: Point::new(0.0, 0.0),
                    conflict,
                });
            }
        }
        let crossing_tests = b.tests;
        let mut cut = HierCutting {
            curves,
            n,
            shape,
            r,
            rho,
            k,
            cells,
            leaves: Vec::new(),
            disk_cells: vec![Vec::new(); n],
            scale,
            bound_violations: 0,
            crossing_tests,
        };
        for id in 0..cut.cells.len() {
            cut.cells[id].rep = cut.representative(id);
            for &d in &cut.cells[id].conflict {
                cut.disk_cells[d as usize].push(id as u32);
            }
            if cut.cells[id].is_leaf() {
                cut.leaves.push(id as u32);
                if heavy(cut.cells[id].conflict.len()) {
                    cut.bound_violations += 1;
                }
            }
        }
        Ok(cut)
    }

    #[inline]
    pub fn y_bottom(&self, b: Bound, x: f64) -> f64 {
        match b {
            Bound::Curve(c) => self.curves[c as usize].y_at(x),
            Bound::Unbounded => f64::NEG_INFINITY,
        }
    }

    #[inline]
    pub fn y_top(&self, b: Bound, x: f64) -> f64 {
        match b {
            Bound::Curve(c) => self.curves[c as usize].y_at(x),
            Bound::Unbounded => f64::INFINITY,
        }
    }

    fn representative(&self, id: usize) -> Point {
        let c = &self.cells[id];
        let xs: Vec<f64> = match (c.xl.is_finite(), c.xr.is_finite()) {
            (true, true) => [0.5, 0.3, 0.7, 0.15, 0.85].iter().map(|f| c.xl + f * (c.xr - c.xl)).collect(),
            _ => vec![slab_mid(c.xl, c.xr)],
        };
        let mut best = (f64::NEG_INFINITY, Point::new(xs[0], 0.0));
        for x in xs {
            let yb = self.y_bottom(c.bottom, x);
            let yt = self.y_top(c.top, x);
            let (h, y) = match (yb.is_finite(), yt.is_finite()) {
                (true, true) => (yt - yb, 0.5 * (yb + yt)),
                (false, true) => (f64::INFINITY, yt - self.scale),
                (true, false) => (f64::INFINITY, yb + self.scale),
                (false, false) => (f64::INFINITY, 0.0),
            };
            if h > best.0 {
                best = (h, Point::new(x, y));
            }
        }
        best.1
    }

    /// Closed-cell membership.
    pub fn cell_contains(&self, id: usize, q: Point) -> bool {
        self.violation(id, q) == 0.0
    }

    /// How far `q` lies outside the closed cell (0 when inside).
    fn violation(&self, id: usize, q: Point) -> f64 {
        let c = &self.cells[id];
        let mut v = 0.0f64;
        if q.x < c.xl {
            v = v.max(c.xl - q.x);
        }
        if q.x > c.xr {
            v = v.max(q.x - c.xr);
        }
        let x = q.x.clamp(c.xl, c.xr);
        let yb = self.y_bottom(c.bottom, x);
        let yt = self.y_top(c.top, x);
        if q.y < yb {
            v = v.max(yb - q.y);
        }
        if q.y > yt {
            v = v.max(q.y - yt);
        }
        v
    }

    /// Leaf containing `q`, descending from the root and taking the first
    /// child (by id) whose closed region contains it. Also returns the number
    /// of cells inspected.
    pub fn locate_counted(&self, q: Point) -> Result<(u32, u64), CuttingError> {
        if self.shape == RootShape::LowerHalfplane && q.y > 0.0 {
            return Err(CuttingError::AboveLine { x: q.x, y: q.y });
        }
        let mut id = 0usize;
        let mut steps = 0u64;
        while !self.cells[id].is_leaf() {
            let mut chosen = None;
            let mut fallback = (f64::INFINITY, 0usize);
            for &ch in &self.cells[id].children {
                steps += 1;
                let v = self.violation(ch as usize, q);
                if v == 0.0 {
                    chosen = Some(ch as usize);
                    break;
                }
                if v < fallback.0 {
                    fallback = (v, ch as usize);
                }
            }
            id = chosen.unwrap_or(fallback.1);
        }
        Ok((id as u32, steps))
    }

    pub fn locate(&self, q: Point) -> Result<u32, CuttingError> {
        self.locate_counted(q).map(|(id, _)| id)
    }

    /// Reference point location: among the leaves whose closed region
    /// contains `q` (checking every ancestor too), the one with the
    /// lexicographically smallest root-to-leaf id path.
    pub fn locate_linear(&self, q: Point) -> Option<u32> {
        let mut best: Option<(Vec<u32>, u32)> = None;
        for &leaf in &self.leaves {
            let path = self.path(leaf);
            if path.iter().all(|&c| self.cell_contains(c as usize, q)) && best.as_ref().map_or(true, |(p, _)| path < *p) {
                best = Some((path, leaf));
            }
        }
        best.map(|(_, l)| l)
    }

    /// Every leaf whose closed region contains `q`.
    pub fn containing_leaves(&self, q: Point) -> Vec<u32> {
        self.leaves.iter().copied().filter(|&l| self.cell_contains(l as usize, q)).collect()
    }

    /// Ids from the root down to `id`.
    pub fn path(&self, id: u32) -> Vec<u32> {
        let mut p = vec![id];
        let mut cur = id;
        while let Some(par) = self.cells[cur as usize].parent {
            p.push(par);
            cur = par;
        }
        p.reverse();
        p
    }

    /// Float test whether the dual curve `d` covers the representative point
    /// of `cell`.
    #[inline]
    pub fn rep_inside(&self, cell: usize, d: usize) -> bool {
        self.curves[d].covers(self.cells[cell].rep)
    }

    /// Tags for the children of `cell` relative to the dual curve `d`.
    pub fn classify_children(&self, cell: usize, d: usize) -> Vec<ChildTag> {
        self.cells[cell]
            .children
            .iter()
            .map(|&ch| {
                if self.cells[ch as usize].conflict.binary_search(&(d as u32)).is_ok() {
                    ChildTag::Crossed
                } else if self.rep_inside(ch as usize, d) {
                    ChildTag::Inside
                } else {
                    ChildTag::Outside
                }
            })
            .collect()
    }

    /// Direct geometric crossing test, independent of the stored lists.
    pub fn crosses(&self, cell: usize, d: usize) -> bool {
        let c = &self.cells[cell];
        let mut b = Builder { curves: &self.curves, rng: ChaCha8Rng::seed_from_u64(0), sample_factor: 1.0, tests: 0 };
        b.crosses(&Region { xl: c.xl, xr: c.xr, bottom: c.bottom, top: c.top }, d as u32)
    }

    pub fn stats(&self) -> CuttingStats {
        let leaves = &self.leaves;
        CuttingStats {
            n: self.n,
            r: self.r,
            rho: self.rho,
            k: self.k,
            levels: self.cells.iter().map(|c| c.level as usize + 1).max().unwrap_or(0),
            cells: self.cells.len(),
            leaves: leaves.len(),
            max_leaf_conflict: leaves.iter().map(|&l| self.cells[l as usize].conflict.len()).max().unwrap_or(0),
            sum_conflict: self.cells.iter().map(|c| c.conflict.len()).sum(),
            max_children: self.cells.iter().map(|c| c.children.len()).max().unwrap_or(0),
            c_cells: self.cells.len() as f64 / (self.r * self.r) as f64,
            bound_violations: self.bound_violations,
            crossing_tests: self.crossing_tests,
        }
    }

    /// Groups point ids by containing leaf. Returns the leaf of every point,
    /// the member lists indexed by cell id, and the number of cells inspected.
    pub fn assign(&self, points: &[Point]) -> Result<(Vec<u32>, Vec<Vec<u32>>, u64), CuttingError> {
        let mut leaf_of = Vec::with_capacity(points.len());
        let mut members = vec![Vec::new(); self.cells.len()];
        let mut steps = 0;
        for (i, &q) in points.iter().enumerate() {
            let (leaf, s) = self.locate_counted(q)?;
            steps += s;
            leaf_of.push(leaf);
            members[leaf as usize].push(i as u32);
        }
        Ok((leaf_of, members, steps))
    }

    /// Structural self-check; returns human-readable problems.
    pub fn verify(&self, check_crossings: bool) -> Vec<String> {
        let mut problems = Vec::new();
        for c in &self.cells {
            if c.is_leaf() && c.conflict.len() * self.r > self.n {
                problems.push(format!("leaf {} has {} > n/r conflicts", c.id, c.conflict.len()));
            }
            if c.level > 0 && c.conflict.len() * self.rho.saturating_pow(c.level) > self.n && c.conflict.len() * self.r > self.n {
                problems.push(format!("cell {} at level {} has {} conflicts", c.id, c.level, c.conflict.len()));
            }
            if !c.conflict.windows(2).all(|w| w[0] < w[1]) {
                problems.push(format!("cell {} conflict list not sorted", c.id));
            }
            if let Some(p) = c.parent {
                let parent = &self.cells[p as usize];
                if !(c.xl >= parent.xl && c.xr <= parent.xr) {
                    problems.push(format!("cell {} leaves the x-range of parent {}", c.id, p));
                }
                if !self.cell_contains(p as usize, c.rep) {
                    problems.push(format!("representative of cell {} outside parent {}", c.id, p));
                }
                if c.conflict.iter().any(|d| parent.conflict.binary_search(d).is_err()) {
                    problems.push(format!("cell {} conflicts not a subset of parent {}", c.id, p));
                }
            }
            if !self.cell_contains(c.id as usize, c.rep) {
                problems.push(format!("representative of cell {} outside the cell", c.id));
            }
            if check_crossings {
                for d in 0..self.n {
                    let listed = c.conflict.binary_search(&(d as u32)).is_ok();
                    if listed != self.crosses(c.id as usize, d) {
                        problems.push(format!("cell {} disagrees with direct crossing test for curve {d}", c.id));
                    }
                }
            }
        }
        let listed: usize = self.disk_cells.iter().map(Vec::len).sum();
        let total: usize = self.cells.iter().map(|c| c.conflict.len()).sum();
        if listed != total {
            problems.push(format!("per-curve cell lists hold {listed} entries, conflict lists {total}"));
        }
        problems
    }

    /// SVG drawing of every cell (one `path.cell` element each, coloured by
    /// level) and of the dual curves, within the given viewport.
    pub fn to_svg(&self, view: (f64, f64, f64, f64), width: f64) -> String {
        let (x0, y0, x1, y1) = view;
        let sx = width / (x1 - x0);
        let height = (y1 - y0) * sx;
        let px = |x: f64| (x.clamp(x0 - 1.0, x1 + 1.0) - x0) * sx;
        let py = |y: f64| (y1 - y.clamp(y0 - 1.0, y1 + 1.0)) * sx;
        let palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"];
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#
        );
        for c in &self.cells {
            let xl = c.xl.max(x0 - 1.0);
            let xr = c.xr.min(x1 + 1.0);
            let steps = 16;
            let mut d = String::new();
            for i in 0..=steps {
                let x = xl + (xr - xl) * i as f64 / steps as f64;
                let y = self.y_bottom(c.bottom, x).max(y0 - 1.0);
                let _ = write!(d, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, px(x), py(y));
            }
            for i in (0..=steps).rev() {
                let x = xl + (xr - xl) * i as f64 / steps as f64;
                let y = self.y_top(c.top, x).min(y1 + 1.0);
                let _ = write!(d, "L{:.2},{:.2} ", px(x), py(y));
            }
            let color = palette[c.level as usize % palette.len()];
            let _ = writeln!(
                s,
                r#"<path class="cell level-{}" d="{}Z" fill="none" stroke="{color}" stroke-width="0.5"/>"#,
                c.level,
                d.trim_end()
            );
        }
        for (i, curve) in self.curves.iter().take(self.n).enumerate() {
            let (lo, hi) = curve.x_range();
            let lo = lo.max(x0);
            let hi = hi.min(x1);
            if !(lo < hi) {
                continue;
            }
            let mut d = String::new();
            for j in 0..=48 {
                let x = lo + (hi - lo) * j as f64 / 48.0;
                let _ = write!(d, "{}{:.2},{:.2} ", if j == 0 { "M" } else { "L" }, px(x), py(curve.y_at(x)));
            }
            let _ = writeln!(s, r##"<path class="curve" data-id="{i}" d="{}" fill="none" stroke="#444" stroke-width="0.8"/>"##, d.trim_end());
        }
        s.push_str("</svg>\n");
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChildTag {
    Crossed,
    Inside,
    Outside,
}

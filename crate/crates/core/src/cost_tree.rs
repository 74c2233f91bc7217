//! Lazy cost bookkeeping over the cutting tree.
//!
//! The current cost of dual point q is never stored. It is
//! `w(q) + lambda(q) + sum of lambda over q's leaf and all its ancestors`,
//! and every cell keeps the minimum of that expression over its subtree,
//! excluding the cell's own ancestors. Resetting a whole outside subtree then
//! costs one lambda assignment plus draining the cell's dirty list, which
//! holds every element below it whose lambda is nonzero.

use std::collections::HashSet;

use serde::Serialize;

use crate::cutting::HierCutting;
use crate::heap::IndexedMinHeap;
use crate::numeric::Cost;
use crate::solution::Counters;

const CELL_TAG: u32 = 1 << 31;

/// Dual containment: does dual curve `d` cover dual point `q`?
pub trait DualCover {
    fn covers(&self, d: usize, q: usize) -> bool;
}

impl<F: Fn(usize, usize) -> bool> DualCover for F {
    fn covers(&self, d: usize, q: usize) -> bool {
        self(d, q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    pub iteration: usize,
    /// Cells with nonzero lambda, per level.
    pub nonzero_cells_by_level: Vec<usize>,
    pub nonzero_points: usize,
    /// `None` when no dual point exists.
    pub root_min_cost: Option<f64>,
    /// Total dirty-list length, per level.
    pub list_sizes_by_level: Vec<usize>,
}

pub struct CostTree<'a, C> {
    cut: &'a HierCutting,
    weights: Vec<C>,
    leaf_of: Vec<u32>,
    slot_of: Vec<u32>,
    members: Vec<Vec<u32>>,
    heaps: Vec<IndexedMinHeap<C>>,
    lam_point: Vec<C>,
    lam_cell: Vec<C>,
    /// Per cell: minimum over its subtree and the dual point achieving it.
    min_cost: Vec<Option<(C, u32)>>,
    lists: Vec<Vec<u32>>,
    stamp_point: Vec<u32>,
    stamp_cell: Vec<u32>,
    mark: Vec<u32>,
    epoch: u32,
    pub counters: Counters,
}

#[inline]
fn better<C: Cost>(a: &(C, u32), b: &Option<(C, u32)>) -> bool {
    match b {
        None => true,
        Some(b) => match a.0.total_cmp(&b.0) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => a.1 < b.1,
        },
    }
}

impl<'a, C: Cost> CostTree<'a, C> {
    /// `leaf_of` and `members` come from locating the dual points in `cut`.
    pub fn init(cut: &'a HierCutting, weights: Vec<C>, leaf_of: Vec<u32>, members: Vec<Vec<u32>>) -> Self {
        let cells = cut.cells.len();
        let m = weights.len();
        let mut slot_of = vec![0u32; m];
        let mut heaps = Vec::with_capacity(cells);
        let mut counters = Counters::default();
        for list in &members {
            for (slot, &q) in list.iter().enumerate() {
                slot_of[q as usize] = slot as u32;
            }
            counters.heap_ops += list.len() as u64;
            heaps.push(IndexedMinHeap::build(list.iter().map(|&q| (weights[q as usize].clone(), q)).collect()));
        }
        let mut t = CostTree {
            cut,
            weights,
            leaf_of,
            slot_of,
            members,
            heaps,
            lam_point: vec![C::zero(); m],
            lam_cell: vec![C::zero(); cells],
            min_cost: vec![None; cells],
            lists: vec![Vec::new(); cells],
            stamp_point: vec![0; m],
            stamp_cell: vec![0; cells],
            mark: vec![0; cells],
            epoch: 0,
            counters,
        };
        // children always have larger ids than their parent
        for id in (0..cells).rev() {
            t.recompute(id);
        }
        t
    }

    fn recompute(&mut self, id: usize) {
        self.counters.mincost_updates += 1;
        let cell = &self.cut.cells[id];
        self.min_cost[id] = if cell.is_leaf() {
            self.heaps[id].peek().map(|(k, q)| (k.clone(), q))
        } else {
            let mut best: Option<(C, u32)> = None;
            for &ch in &cell.children {
                if let Some((v, q)) = &self.min_cost[ch as usize] {
                    let cand = (v.plus(&self.lam_cell[ch as usize]), *q);
                    if better(&cand, &best) {
                        best = Some(cand);
                    }
                }
            }
            best
        };
    }

    /// Recomputes minCost from `id` up to the root.
    fn walk_from(&mut self, id: usize) {
        let mut cur = Some(id as u32);
        while let Some(c) = cur {
            self.recompute(c as usize);
            cur = self.cut.cells[c as usize].parent;
        }
    }

    /// Sum of lambda over `id` and all its ancestors.
    fn lambda_sum(&mut self, id: usize) -> C {
        let mut s = C::zero();
        let mut cur = Some(id as u32);
        while let Some(c) = cur {
            self.counters.ancestor_steps += 1;
            s = s.plus(&self.lam_cell[c as usize]);
            cur = self.cut.cells[c as usize].parent;
        }
        s
    }

    fn append_up(&mut self, from: Option<u32>, element: u32) {
        let mut cur = from;
        while let Some(c) = cur {
            self.counters.list_appends += 1;
            self.lists[c as usize].push(element);
            cur = self.cut.cells[c as usize].parent;
        }
    }

    fn mark_cells(&mut self, d: usize) {
        self.epoch += 1;
        for &c in &self.cut.disk_cells[d] {
            self.mark[c as usize] = self.epoch;
        }
    }

    #[inline]
    fn marked(&self, c: usize) -> bool {
        self.mark[c] == self.epoch
    }

    /// Current cost of dual point `q`.
    pub fn cost_of(&self, q: usize) -> C {
        let mut s = self.weights[q].plus(&self.lam_point[q]);
        let mut cur = Some(self.leaf_of[q]);
        while let Some(c) = cur {
            s = s.plus(&self.lam_cell[c as usize]);
            cur = self.cut.cells[c as usize].parent;
        }
        s
    }

    /// Index of the last reset that set q's current cost (0 = never reset).
    pub fn provenance(&self, q: usize) -> usize {
        let mut best = self.stamp_point[q];
        let mut cur = Some(self.leaf_of[q]);
        while let Some(c) = cur {
            best = best.max(self.stamp_cell[c as usize]);
            cur = self.cut.cells[c as usize].parent;
        }
        best as usize
    }

    /// Minimum current cost among dual points covered by curve `d`, with the
    /// smallest point id among ties.
    pub fn find_min_cost(&mut self, d: usize, cover: &impl DualCover) -> Option<(C, u32)> {
        self.mark_cells(d);
        let mut best: Option<(C, u32)> = None;
        if !self.marked(0) {
            self.counters.child_classifications += 1;
            if self.cut.rep_inside(0, d) {
                if let Some((v, q)) = &self.min_cost[0] {
                    best = Some((v.plus(&self.lam_cell[0]), *q));
                }
            }
        }
        let cut = self.cut;
        for &c in &cut.disk_cells[d] {
            let c = c as usize;
            let sum = self.lambda_sum(c);
            let cell = &cut.cells[c];
            if cell.is_leaf() {
                for &q in &self.members[c] {
                    self.counters.point_scans += 1;
                    if cover.covers(d, q as usize) {
                        let cost = self.weights[q as usize].plus(&self.lam_point[q as usize]).plus(&sum);
                        let cand = (cost, q);
                        if better(&cand, &best) {
                            best = Some(cand);
                        }
                    }
                }
            } else {
                for &ch in &cell.children {
                    let ch = ch as usize;
                    self.counters.child_classifications += 1;
                    if self.marked(ch) || !cut.rep_inside(ch, d) {
                        continue;
                    }
                    if let Some((v, q)) = &self.min_cost[ch] {
                        let cand = (v.plus(&self.lam_cell[ch]).plus(&sum), *q);
                        if better(&cand, &best) {
                            best = Some(cand);
                        }
                    }
                }
            }
        }
        best
    }

    /// Sets the cost of every dual point not covered by `d` to `w + delta`.
    /// `iteration` is recorded for backtracking.
    pub fn reset_cost(&mut self, d: usize, delta: &C, iteration: usize, cover: &impl DualCover, debug: bool) {
        self.mark_cells(d);
        let cut = self.cut;
        if !self.marked(0) {
            self.counters.child_classifications += 1;
            if !cut.rep_inside(0, d) {
                self.reset_subtree(0, &C::zero(), delta, iteration, debug);
            }
        }
        for &c in &cut.disk_cells[d] {
            let c = c as usize;
            let sum = self.lambda_sum(c);
            let cell = &cut.cells[c];
            if cell.is_leaf() {
                let mut changed = false;
                let fresh = delta.minus(&sum);
                for i in 0..self.members[c].len() {
                    let q = self.members[c][i] as usize;
                    self.counters.point_scans += 1;
                    if cover.covers(d, q) {
                        continue;
                    }
                    self.lam_point[q] = fresh.clone();
                    self.stamp_point[q] = iteration as u32;
                    self.counters.heap_ops += 1;
                    let key = self.weights[q].plus(&fresh);
                    self.heaps[c].set_key(self.slot_of[q] as usize, key);
                    changed = true;
                    if !fresh.is_zero() {
                        self.append_up(Some(c as u32), q as u32);
                    }
                }
                if changed {
                    self.walk_from(c);
                }
            } else {
                for &ch in &cell.children {
                    let ch = ch as usize;
                    self.counters.child_classifications += 1;
                    if self.marked(ch) || cut.rep_inside(ch, d) {
                        continue;
                    }
                    self.reset_subtree(ch, &sum, delta, iteration, debug);
                }
            }
        }
    }

    /// Resets every dual point below `cell`, whose proper ancestors carry a
    /// lambda sum of `above`.
    fn reset_subtree(&mut self, cell: usize, above: &C, delta: &C, iteration: usize, debug: bool) {
        if self.min_cost[cell].is_none() {
            return;
        }
        let list = std::mem::take(&mut self.lists[cell]);
        for &e in &list {
            self.counters.list_drains += 1;
            if e & CELL_TAG != 0 {
                let c = (e & !CELL_TAG) as usize;
                if !self.lam_cell[c].is_zero() {
                    self.lam_cell[c] = C::zero();
                    let parent = self.cut.cells[c].parent.expect("listed cells are below the drained cell");
                    self.walk_from(parent as usize);
                }
            } else {
                let q = e as usize;
                if !self.lam_point[q].is_zero() {
                    self.lam_point[q] = C::zero();
                    let leaf = self.leaf_of[q] as usize;
                    self.counters.heap_ops += 1;
                    self.heaps[leaf].set_key(self.slot_of[q] as usize, self.weights[q].clone());
                    self.walk_from(leaf);
                }
            }
        }
        let mut list = list;
        list.clear();
        self.lists[cell] = list;
        if debug {
            self.assert_drained(cell);
        }
        let fresh = delta.minus(above);
        self.stamp_cell[cell] = iteration as u32;
        let parent = self.cut.cells[cell].parent;
        let nonzero = !fresh.is_zero();
        self.lam_cell[cell] = fresh;
        if let Some(p) = parent {
            self.walk_from(p as usize);
        }
        if nonzero {
            self.append_up(parent, cell as u32 | CELL_TAG);
        }
    }

    fn assert_drained(&self, cell: usize) {
        let mut stack: Vec<u32> = self.cut.cells[cell].children.clone();
        for &q in &self.members[cell] {
            assert!(self.lam_point[q as usize].is_zero(), "point {q} below drained cell {cell} keeps lambda");
        }
        while let Some(c) = stack.pop() {
            assert!(self.lam_cell[c as usize].is_zero(), "cell {c} below drained cell {cell} keeps lambda");
            for &q in &self.members[c as usize] {
                assert!(self.lam_point[q as usize].is_zero(), "point {q} below drained cell {cell} keeps lambda");
            }
            stack.extend(&self.cut.cells[c as usize].children);
        }
    }

    /// Checks both bookkeeping invariants against `shadow`, the cost array a
    /// plain implementation would hold. `same` decides cost equality.
    pub fn check(&self, shadow: &[C], same: impl Fn(&C, &C) -> bool) -> Result<(), String> {
        for (q, expected) in shadow.iter().enumerate() {
            let got = self.cost_of(q);
            if !same(&got, expected) {
                return Err(format!("dual point {q}: lazy cost {got:?}, expected {expected:?}"));
            }
        }
        for (id, cell) in self.cut.cells.iter().enumerate() {
            let expected: Option<(C, u32)> = if cell.is_leaf() {
                let mut best = None;
                for (slot, &q) in self.members[id].iter().enumerate() {
                    let key = self.weights[q as usize].plus(&self.lam_point[q as usize]);
                    if self.heaps[id].key(slot) != &key || self.heaps[id].id(slot) != q {
                        return Err(format!("heap of leaf {id} holds a stale key for point {q}"));
                    }
                    let cand = (key, q);
                    if better(&cand, &best) {
                        best = Some(cand);
                    }
                }
                best
            } else {
                let mut best = None;
                for &ch in &cell.children {
                    if let Some((v, q)) = &self.min_cost[ch as usize] {
                        let cand = (v.plus(&self.lam_cell[ch as usize]), *q);
                        if better(&cand, &best) {
                            best = Some(cand);
                        }
                    }
                }
                best
            };
            if expected != self.min_cost[id] {
                return Err(format!("cell {id}: minCost {:?}, recomputed {:?}", self.min_cost[id], expected));
            }
        }
        let lists: Vec<HashSet<u32>> = self.lists.iter().map(|l| l.iter().copied().collect()).collect();
        for q in 0..self.lam_point.len() {
            if self.lam_point[q].is_zero() {
                continue;
            }
            let mut cur = Some(self.leaf_of[q]);
            while let Some(c) = cur {
                if !lists[c as usize].contains(&(q as u32)) {
                    return Err(format!("dual point {q} has nonzero lambda but is missing from the list of cell {c}"));
                }
                cur = self.cut.cells[c as usize].parent;
            }
        }
        for (id, lam) in self.lam_cell.iter().enumerate() {
            if lam.is_zero() {
                continue;
            }
            let mut cur = self.cut.cells[id].parent;
            while let Some(c) = cur {
                if !lists[c as usize].contains(&(id as u32 | CELL_TAG)) {
                    return Err(format!("cell {id} has nonzero lambda but is missing from the list of cell {c}"));
                }
                cur = self.cut.cells[c as usize].parent;
            }
        }
        Ok(())
    }

    pub fn checkpoint(&self, iteration: usize, view: impl Fn(&C) -> f64) -> Checkpoint {
        let levels = self.cut.cells.iter().map(|c| c.level as usize + 1).max().unwrap_or(1);
        let mut nonzero = vec![0; levels];
        let mut sizes = vec![0; levels];
        for (id, cell) in self.cut.cells.iter().enumerate() {
            if !self.lam_cell[id].is_zero() {
                nonzero[cell.level as usize] += 1;
            }
            sizes[cell.level as usize] += self.lists[id].len();
        }
        Checkpoint {
            iteration,
            nonzero_cells_by_level: nonzero,
            nonzero_points: self.lam_point.iter().filter(|l| !l.is_zero()).count(),
            root_min_cost: self.min_cost[0].as_ref().map(|(v, _)| view(&v.plus(&self.lam_cell[0]))),
            list_sizes_by_level: sizes,
        }
    }

    /// Lambda values and minCost entries, for read-only checks.
    pub fn snapshot(&self) -> (Vec<C>, Vec<C>, Vec<Option<(C, u32)>>) {
        (self.lam_point.clone(), self.lam_cell.clone(), self.min_cost.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutting::{CuttingParams, RootShape};
    use crate::geom::{Curve, LowerArc, Point, Predicate};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct Setup {
        cut: HierCutting,
        centers: Vec<Point>,
        qs: Vec<Point>,
        weights: Vec<f64>,
    }

    fn setup(n: usize, m: usize, r: usize, seed: u64) -> Setup {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = 2.0 + ((n + m) as f64).sqrt() / 2.0;
        let centers: Vec<Point> = (0..n).map(|_| Point::new(rng.gen_range(0.0..w), rng.gen_range(0.0..0.9))).collect();
        let qs: Vec<Point> = (0..m).map(|_| Point::new(rng.gen_range(0.0..w), rng.gen_range(-0.9..0.0))).collect();
        let weights: Vec<f64> = (0..m).map(|_| rng.gen_range(1..100) as f64).collect();
        let mut curves: Vec<Curve> = centers.iter().enumerate().map(|(i, c)| Curve::Arc(LowerArc::new(i, *c, 1.0).unwrap())).collect();
        curves.push(Curve::Line { a: 0.0, b: 0.0 });
        let cut = HierCutting::build(curves, &vec![true; n], RootShape::LowerHalfplane, CuttingParams { r, rho: 2, seed, sample_factor: 1.0 }).unwrap();
        Setup { cut, centers, qs, weights }
    }

    fn tree<'a>(s: &'a Setup) -> CostTree<'a, f64> {
        let (leaf_of, members, _) = s.cut.assign(&s.qs).unwrap();
        CostTree::init(&s.cut, s.weights.clone(), leaf_of, members)
    }

    #[test]
    fn init_minima() {
        let s = setup(30, 40, 5, 1);
        let t = tree(&s);
        let global = s.weights.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(t.min_cost[0].as_ref().unwrap().0, global);
        for (id, cell) in s.cut.cells.iter().enumerate() {
            if cell.is_leaf() && t.members[id].is_empty() {
                assert!(t.min_cost[id].is_none());
            }
        }
        t.check(&s.weights, |a, b| a == b).unwrap();
    }

    #[test]
    fn leaf_minimum_of_three() {
        let s = setup(12, 3, 1, 2);
        let t = CostTree::init(&s.cut, vec![5.0, 2.0, 9.0], vec![0, 0, 0], vec![vec![0, 1, 2]]);
        assert_eq!(t.min_cost[0], Some((2.0, 1)));
    }

    #[test]
    fn lockstep_with_shadow_array() {
        for seed in 0..6 {
            let s = setup(30, 30, 6, seed);
            let mut t = tree(&s);
            let mut shadow = s.weights.clone();
            let cover = |d: usize, q: usize| Predicate::default().disk_contains(s.centers[d], 1.0, s.qs[q]);
            for d in 0..30 {
                let before = t.snapshot();
                let got = t.find_min_cost(d, &cover);
                assert_eq!(before, t.snapshot(), "find_min_cost must not modify state");
                let expected = (0..30)
                    .filter(|&q| cover(d, q))
                    .map(|q| (shadow[q], q as u32))
                    .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                assert_eq!(got, expected, "seed {seed} step {d}");
                let delta = got.map_or(7.0, |g| g.0);
                t.reset_cost(d, &delta, d + 1, &cover, true);
                for q in 0..30 {
                    if !cover(d, q) {
                        shadow[q] = s.weights[q] + delta;
                    }
                }
                t.check(&shadow, |a, b| (a - b).abs() <= 1e-9 * b.abs().max(1.0)).unwrap();
            }
        }
    }

    #[test]
    fn covering_everything_changes_nothing() {
        let mut s = setup(10, 10, 3, 4);
        let c = s.centers[0];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        s.qs = (0..10)
            .map(|_| Point::new(c.x + rng.gen_range(-0.2..0.2), (c.y - 0.6 - rng.gen_range(0.0..0.3)).min(-0.01)))
            .collect();
        let cover = |d: usize, q: usize| Predicate::default().disk_contains(s.centers[d], 1.0, s.qs[q]);
        assert!((0..10).all(|q| cover(0, q)));
        let mut t = tree(&s);
        let before = t.snapshot();
        t.reset_cost(0, &5.0, 1, &cover, true);
        let (lp, _, mc) = t.snapshot();
        assert_eq!(lp, before.0);
        assert_eq!(mc, before.2);
    }

    #[test]
    fn zero_reset_is_invisible() {
        let s = setup(20, 25, 4, 5);
        let mut t = tree(&s);
        let cover = |d: usize, q: usize| Predicate::default().disk_contains(s.centers[d], 1.0, s.qs[q]);
        t.reset_cost(3, &0.0, 1, &cover, true);
        t.check(&s.weights, |a, b| a == b).unwrap();
    }
}

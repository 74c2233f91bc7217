//! Point/set containment relations in left-to-right point order.

use crate::geom::Predicate;
use crate::instance::{sorted_order, CoverageInstance, HalfplaneInstance};

pub(crate) trait Relation: Sync {
    /// Number of points.
    fn n(&self) -> usize;
    /// Number of weighted sets.
    fn m(&self) -> usize;
    /// Does set `set` contain the point of left-to-right rank `rank`?
    fn covers(&self, rank: usize, set: usize) -> bool;
}

pub(crate) struct DiskRelation<'a> {
    pub inst: &'a CoverageInstance,
    pub order: Vec<usize>,
    pub pred: Predicate,
}

impl<'a> DiskRelation<'a> {
    pub fn new(inst: &'a CoverageInstance, pred: Predicate) -> Self {
        DiskRelation { inst, order: sorted_order(&inst.points), pred }
    }
}

impl Relation for DiskRelation<'_> {
    fn n(&self) -> usize {
        self.inst.n()
    }
    fn m(&self) -> usize {
        self.inst.m()
    }
    #[inline]
    fn covers(&self, rank: usize, set: usize) -> bool {
        self.inst.covers(self.pred, set, self.order[rank])
    }
}

pub(crate) struct HalfplaneRelation<'a> {
    pub inst: &'a HalfplaneInstance,
    pub order: Vec<usize>,
    pub pred: Predicate,
}

impl<'a> HalfplaneRelation<'a> {
    pub fn new(inst: &'a HalfplaneInstance, pred: Predicate) -> Self {
        HalfplaneRelation { inst, order: sorted_order(&inst.points), pred }
    }
}

impl Relation for HalfplaneRelation<'_> {
    fn n(&self) -> usize {
        self.inst.points.len()
    }
    fn m(&self) -> usize {
        self.inst.halfplanes.len()
    }
    #[inline]
    fn covers(&self, rank: usize, set: usize) -> bool {
        self.pred.halfplane_contains(self.inst.halfplanes[set].region(), self.inst.points[self.order[rank]])
    }
}

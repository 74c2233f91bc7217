//! Exhaustive search over all subsets, for tiny instances only.

use num_rational::BigRational;

use crate::geom::Predicate;
use crate::instance::{CoverageInstance, HalfplaneInstance, HittingInstance};
use crate::numeric::{rational_of, rational_to_f64, Cost, Fixed, FixedScale};
use crate::solution::SolveError;

/// Largest number of candidate sets the enumeration accepts.
pub const SUBSET_CAP: usize = 22;
/// Largest number of elements that must be covered (bitmask width).
pub const ELEMENT_CAP: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub feasible: bool,
    /// Optimal weight, `f64::INFINITY` when nothing feasible exists.
    pub weight: f64,
    pub exact_weight: Option<BigRational>,
    /// One optimal subset in increasing index order.
    pub subset: Vec<usize>,
    pub optimal_count: u64,
}

struct Search<'a, C> {
    masks: &'a [u128],
    weights: &'a [C],
    full: u128,
    best: Option<C>,
    best_set: Vec<usize>,
    count: u64,
    stack: Vec<usize>,
}

impl<C: Cost> Search<'_, C> {
    fn visit(&mut self, k: usize, covered: u128, sum: C) {
        if k == self.masks.len() {
            if covered == self.full {
                match self.best.as_ref().map(|b| sum.total_cmp(b)) {
                    None | Some(std::cmp::Ordering::Less) => {
                        self.best = Some(sum);
                        self.best_set = self.stack.clone();
                        self.count = 1;
                    }
                    Some(std::cmp::Ordering::Equal) => self.count += 1,
                    Some(std::cmp::Ordering::Greater) => {}
                }
            }
            return;
        }
        self.stack.push(k);
        let with = sum.plus(&self.weights[k]);
        self.visit(k + 1, covered | self.masks[k], with);
        self.stack.pop();
        self.visit(k + 1, covered, sum);
    }
}

fn run<C: Cost>(masks: &[u128], weights: &[C], elements: usize) -> (Option<C>, Vec<usize>, u64) {
    let full = if elements == 128 { u128::MAX } else { (1u128 << elements) - 1 };
    let mut s = Search { masks, weights, full, best: None, best_set: Vec::new(), count: 0, stack: Vec::new() };
    s.visit(0, 0, C::zero());
    (s.best, s.best_set, s.count)
}

/// `masks[s]` has bit j set when set s contains element j.
pub fn brute_masks(masks: &[u128], weights: &[f64], elements: usize) -> Result<OracleResult, SolveError> {
    if masks.len() > SUBSET_CAP {
        return Err(SolveError::TooLarge { what: "candidate sets", size: masks.len(), cap: SUBSET_CAP });
    }
    if elements > ELEMENT_CAP {
        return Err(SolveError::TooLarge { what: "elements", size: elements, cap: ELEMENT_CAP });
    }
    let (exact, subset, count) = match FixedScale::for_weights(weights) {
        Some(scale) => {
            let w: Vec<Fixed> = weights.iter().map(|&x| scale.to_fixed(x)).collect();
            let (b, s, c) = run(masks, &w, elements);
            (b.map(|v| scale.to_rational(v)), s, c)
        }
        None => {
            let w: Vec<BigRational> = weights.iter().map(|&x| rational_of(x)).collect();
            run(masks, &w, elements)
        }
    };
    Ok(OracleResult {
        feasible: exact.is_some(),
        weight: exact.as_ref().map_or(f64::INFINITY, rational_to_f64),
        exact_weight: exact,
        subset,
        optimal_count: count,
    })
}

/// Minimum-weight disk subset covering every point.
pub fn brute_cover(inst: &CoverageInstance, pred: Predicate) -> Result<OracleResult, SolveError> {
    check_caps(inst.m(), inst.n())?;
    let masks: Vec<u128> = (0..inst.m())
        .map(|s| (0..inst.n()).filter(|&p| inst.covers(pred, s, p)).fold(0u128, |acc, p| acc | 1 << p))
        .collect();
    brute_masks(&masks, &inst.weights(), inst.n())
}

/// Minimum-weight point subset hitting every disk.
pub fn brute_hit(hit: &HittingInstance, pred: Predicate) -> Result<OracleResult, SolveError> {
    let (n, m) = (hit.points.len(), hit.disks.len());
    check_caps(n, m)?;
    let masks: Vec<u128> = (0..n)
        .map(|p| (0..m).filter(|&d| hit.covers(pred, p, d)).fold(0u128, |acc, d| acc | 1 << d))
        .collect();
    let weights: Vec<f64> = hit.points.iter().map(|p| p.weight).collect();
    brute_masks(&masks, &weights, m)
}

/// Minimum-weight halfplane subset covering every point.
pub fn brute_halfplanes(inst: &HalfplaneInstance, pred: Predicate) -> Result<OracleResult, SolveError> {
    let (n, m) = (inst.points.len(), inst.halfplanes.len());
    check_caps(m, n)?;
    let masks: Vec<u128> = inst
        .halfplanes
        .iter()
        .map(|h| {
            let region = h.region();
            (0..n).filter(|&p| pred.halfplane_contains(region, inst.points[p])).fold(0u128, |acc, p| acc | 1 << p)
        })
        .collect();
    let weights = inst.weights();
    brute_masks(&masks, &weights, n)
}

fn check_caps(sets: usize, elements: usize) -> Result<(), SolveError> {
    if sets > SUBSET_CAP {
        return Err(SolveError::TooLarge { what: "candidate sets", size: sets, cap: SUBSET_CAP });
    }
    if elements > ELEMENT_CAP {
        return Err(SolveError::TooLarge { what: "elements", size: elements, cap: ELEMENT_CAP });
    }
    Ok(())
}

#![allow(dead_code)]

use sepcover::numeric::rational_of;
use sepcover::{CoverageInstance, Predicate, Solution};

/// Checks a returned subset directly: no repeats, every point covered, and
/// the summed weight equal to the reported optimum.
pub fn assert_sound(inst: &CoverageInstance, sol: &Solution, pred: Predicate, ctx: &str) {
    if !sol.feasible {
        assert!(sol.delta.is_infinite(), "{ctx}: infeasible but delta = {}", sol.delta);
        return;
    }
    let mut seen = vec![false; inst.m()];
    for &d in &sol.chosen {
        assert!(!seen[d], "{ctx}: disk {d} chosen twice");
        seen[d] = true;
    }
    for p in 0..inst.n() {
        assert!(sol.chosen.iter().any(|&d| inst.covers(pred, d, p)), "{ctx}: point {p} uncovered");
    }
    match sol.exact_delta() {
        Some(Some(exact)) => {
            let sum = sol.chosen.iter().fold(rational_of(0.0), |acc, &d| acc + rational_of(inst.disks[d].weight));
            assert_eq!(&sum, exact, "{ctx}: subset weight differs from delta");
        }
        _ => {
            let sum: f64 = sol.chosen.iter().map(|&d| inst.disks[d].weight).sum();
            assert!((sum - sol.delta).abs() <= 1e-9 * sol.delta.abs().max(1.0), "{ctx}: {sum} vs {}", sol.delta);
        }
    }
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs())
}

//! Solver output, operation counters and the shared backtracking walk.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cutting::{CuttingError, CuttingStats};
use crate::geom::Predicate;
use crate::instance::InstanceError;
use crate::numeric::{rational_of, rational_to_f64, Cost, Fixed, FixedScale};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("instance rejected: {0}")]
    Rejected(String),
    #[error(transparent)]
    Cutting(#[from] CuttingError),
    #[error("invariant violated after iteration {iteration}: {detail}")]
    Invariant { iteration: usize, detail: String },
    #[error("backtracking selected disk {0} twice")]
    RepeatedDisk(usize),
    #[error("instance too large for exhaustive search: {what} = {size} exceeds cap {cap}")]
    TooLarge { what: &'static str, size: usize, cap: usize },
    #[error("exact mode produced an inconsistent trace: {0}")]
    Inconsistent(String),
}

impl From<InstanceError> for SolveError {
    fn from(e: InstanceError) -> Self {
        SolveError::Rejected(e.to_string())
    }
}

/// Exact event counts gathered by the solvers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub containment_tests: u64,
    pub cost_resets: u64,
    pub point_scans: u64,
    pub ancestor_steps: u64,
    pub child_classifications: u64,
    pub heap_ops: u64,
    pub list_appends: u64,
    pub list_drains: u64,
    pub mincost_updates: u64,
    pub locate_steps: u64,
    pub construction_ops: u64,
}

impl Counters {
    pub fn total(&self) -> u64 {
        self.containment_tests
            + self.cost_resets
            + self.point_scans
            + self.ancestor_steps
            + self.child_classifications
            + self.heap_ops
            + self.list_appends
            + self.list_drains
            + self.mincost_updates
            + self.locate_steps
            + self.construction_ops
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub solver: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    pub counters: Counters,
    pub total_ops: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutting: Option<CuttingStats>,
}

/// Result of one solve. Prefix values are indexed by the left-to-right rank
/// of the points; `f64::INFINITY` marks an uncoverable prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub feasible: bool,
    #[serde(with = "inf_f64")]
    pub delta: f64,
    pub chosen: Vec<usize>,
    #[serde(with = "inf_f64_vec")]
    pub prefix: Vec<f64>,
    #[serde(default)]
    pub stats: SolveStats,
    /// Exact prefix values, present for exact-arithmetic runs.
    #[serde(skip)]
    pub exact_prefix: Option<Vec<Option<BigRational>>>,
}

impl Solution {
    pub fn exact_delta(&self) -> Option<Option<&BigRational>> {
        self.exact_prefix.as_ref().map(|p| p.last().and_then(|v| v.as_ref()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("solution serializes")
    }
}

mod inf_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub(super) enum Repr {
        Num(f64),
        Text(String),
    }

    pub(super) fn to_repr(v: f64) -> Repr {
        if v.is_infinite() && v > 0.0 {
            Repr::Text("inf".into())
        } else {
            Repr::Num(v)
        }
    }

    pub(super) fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(v) => Ok(v),
            Repr::Text(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Text(s) => Err(E::custom(format!("expected a number or \"inf\", got \"{s}\""))),
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }
}

mod inf_f64_vec {
    use super::inf_f64::{from_repr, to_repr, Repr};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| to_repr(*x)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Repr>::deserialize(d)?.into_iter().map(from_repr).collect()
    }
}

/// Per-iteration provenance: the set that achieved the minimum, and the index
/// of the prefix value its cost was built on (0 when the cost is its weight).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    pub argmin: usize,
    pub prev: usize,
}

/// Walks provenance records from the last iteration back to a set whose cost
/// equals its own weight. Set indices are returned in discovery order.
pub fn backtrack(records: &[StepRecord]) -> Result<Vec<usize>, SolveError> {
    let mut chosen = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut i = records.len();
    while i > 0 {
        let step = records[i - 1];
        if !seen.insert(step.argmin) {
            return Err(SolveError::RepeatedDisk(step.argmin));
        }
        chosen.push(step.argmin);
        assert!(step.prev < i, "provenance must point strictly backwards");
        i = step.prev;
    }
    Ok(chosen)
}

/// Raw output of a solver run in cost type `C`.
#[derive(Debug, Clone)]
pub(crate) struct Trace<C> {
    /// `None` = infinity.
    pub prefix: Vec<Option<C>>,
    pub records: Vec<StepRecord>,
    pub counters: Counters,
    pub r: Option<usize>,
    pub cutting: Option<CuttingStats>,
}

impl<C> Trace<C> {
    pub fn new(n: usize) -> Self {
        Trace { prefix: Vec::with_capacity(n), records: Vec::with_capacity(n), counters: Counters::default(), r: None, cutting: None }
    }

    /// Fills the remaining prefix entries with infinity after a failed step.
    pub fn close_infeasible(&mut self, n: usize) {
        while self.prefix.len() < n {
            self.prefix.push(None);
        }
    }

    pub fn feasible(&self) -> bool {
        self.prefix.iter().all(Option::is_some)
    }
}

/// Arithmetic used for costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Arithmetic {
    #[default]
    Float,
    Exact,
}

/// Predicate and arithmetic shared by the reference solvers.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveOptions {
    pub predicate: Predicate,
    pub arithmetic: Arithmetic,
}

impl SolveOptions {
    /// Exact predicates and exact cost arithmetic.
    pub fn exact() -> Self {
        SolveOptions { predicate: Predicate::Exact, arithmetic: Arithmetic::Exact }
    }
}

/// A solver body that can run in any cost type.
pub(crate) trait Engine {
    fn name(&self) -> &'static str;
    fn run<C: Cost>(&self, weights: &[C]) -> Result<Trace<C>, SolveError>;
}

pub(crate) fn dispatch<E: Engine>(engine: &E, weights: &[f64], arithmetic: Arithmetic) -> Result<Solution, SolveError> {
    match arithmetic {
        Arithmetic::Float => {
            let trace = engine.run::<f64>(weights)?;
            finish(engine.name(), trace, false, |v| (*v, None))
        }
        Arithmetic::Exact => match FixedScale::for_weights(weights) {
            Some(scale) => {
                let fixed: Vec<Fixed> = weights.iter().map(|w| scale.to_fixed(*w)).collect();
                let trace = engine.run::<Fixed>(&fixed)?;
                finish(engine.name(), trace, true, |v| {
                    let r = scale.to_rational(*v);
                    (rational_to_f64(&r), Some(r))
                })
            }
            None => {
                let exact: Vec<BigRational> = weights.iter().map(|w| rational_of(*w)).collect();
                let trace = engine.run::<BigRational>(&exact)?;
                finish(engine.name(), trace, true, |v| (rational_to_f64(v), Some(v.clone())))
            }
        },
    }
}

fn finish<C>(
    solver: &str,
    trace: Trace<C>,
    exact: bool,
    view: impl Fn(&C) -> (f64, Option<BigRational>),
) -> Result<Solution, SolveError> {
    let feasible = trace.feasible();
    let mut prefix = Vec::with_capacity(trace.prefix.len());
    let mut exact_prefix = Vec::with_capacity(trace.prefix.len());
    for v in &trace.prefix {
        match v {
            Some(c) => {
                let (f, e) = view(c);
                prefix.push(f);
                exact_prefix.push(e);
            }
            None => {
                prefix.push(f64::INFINITY);
                exact_prefix.push(None);
            }
        }
    }
    let chosen = if feasible { backtrack(&trace.records)? } else { Vec::new() };
    let delta = if prefix.is_empty() {
        0.0
    } else if feasible {
        *prefix.last().unwrap()
    } else {
        f64::INFINITY
    };
    let exact_prefix = exact.then_some(exact_prefix);
    Ok(Solution {
        feasible,
        delta,
        chosen,
        prefix,
        stats: SolveStats {
            solver: solver.to_string(),
            r: trace.r,
            total_ops: trace.counters.total(),
            counters: trace.counters,
            cutting: trace.cutting,
        },
        exact_prefix,
    })
}

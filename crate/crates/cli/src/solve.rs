use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::ValueEnum;
use sepcover::instance::read_json;
use sepcover::numeric::rational_of;
use sepcover::solution::SolveStats;
use sepcover::*;
use serde_json::{json, Value};

use crate::{emit, Problem, EXIT_INFEASIBLE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    Naive,
    Interval,
    Fast,
    /// Exhaustive search; tiny instances only.
    Brute,
    /// Naive below a size threshold, fast above it.
    Auto,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Naive => "naive",
            SolverKind::Interval => "interval",
            SolverKind::Fast => "fast",
            SolverKind::Brute => "brute",
            SolverKind::Auto => "auto",
        }
    }
}

/// Above this many point-disk pairs `auto` switches to the fast solver.
const AUTO_PAIRS: usize = 1 << 26;

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    solver: SolverKind,
    #[arg(long, value_enum, default_value = "cover")]
    problem: Problem,
    /// Cutting parameter of the fast solver; defaults to min(ceil(sqrt m), n).
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, default_value_t = 4)]
    rho: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exact predicates and exact cost arithmetic, plus a direct check of the
    /// returned subset.
    #[arg(long)]
    verify_exact: bool,
    /// Check the fast solver's bookkeeping after every iteration.
    #[arg(long)]
    debug_invariants: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub exact: bool,
    pub r: Option<usize>,
    pub rho: usize,
    pub seed: u64,
    pub debug_invariants: bool,
}

impl RunConfig {
    pub fn exact(seed: u64) -> Self {
        RunConfig { exact: true, r: None, rho: 4, seed, debug_invariants: false }
    }

    pub fn options(&self) -> SolveOptions {
        if self.exact {
            SolveOptions::exact()
        } else {
            SolveOptions::default()
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        let base = if self.exact { SolverConfig::exact() } else { SolverConfig::default() };
        SolverConfig { r: self.r, rho: self.rho, seed: self.seed, debug_invariants: self.debug_invariants, ..base }
    }

    fn predicate(&self) -> Predicate {
        self.options().predicate
    }
}

/// A solution plus its optimum as an exact rational string when known.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub solution: Solution,
    pub exact_delta: Option<String>,
}

impl Outcome {
    fn from_solution(solution: Solution) -> Self {
        let exact_delta = solution.exact_delta().map(|d| d.map_or_else(|| "inf".to_string(), |v| v.to_string()));
        Outcome { solution, exact_delta }
    }

    fn from_oracle(o: OracleResult) -> Self {
        let solution = Solution {
            feasible: o.feasible,
            delta: o.weight,
            chosen: o.subset,
            prefix: Vec::new(),
            stats: SolveStats { solver: "brute".into(), ..Default::default() },
            exact_prefix: None,
        };
        let exact_delta = Some(o.exact_weight.map_or_else(|| "inf".to_string(), |v| v.to_string()));
        Outcome { solution, exact_delta }
    }
}

pub fn solve_cover(inst: &CoverageInstance, kind: SolverKind, cfg: &RunConfig) -> Result<Outcome, SolveError> {
    let kind = match kind {
        SolverKind::Auto if inst.n().saturating_mul(inst.m()) <= AUTO_PAIRS => SolverKind::Naive,
        SolverKind::Auto => SolverKind::Fast,
        k => k,
    };
    Ok(match kind {
        SolverKind::Naive => Outcome::from_solution(solve_naive(inst, &cfg.options())?),
        SolverKind::Interval => Outcome::from_solution(solve_interval(inst, &cfg.options())?),
        SolverKind::Fast | SolverKind::Auto => Outcome::from_solution(solve_fast(inst, &cfg.solver_config())?),
        SolverKind::Brute => Outcome::from_oracle(brute_cover(inst, cfg.predicate())?),
    })
}

fn solve_hit(hit: &HittingInstance, kind: SolverKind, cfg: &RunConfig) -> Result<Outcome, SolveError> {
    match kind {
        SolverKind::Brute => Ok(Outcome::from_oracle(brute_hit(hit, cfg.predicate())?)),
        SolverKind::Fast => Ok(Outcome::from_solution(solve_hitting(hit, &cfg.solver_config())?)),
        k => {
            sepcover::instance::validate_hitting(hit).into_result()?;
            solve_cover(&hit.dual_coverage(), k, cfg)
        }
    }
}

fn solve_halfplane(inst: &HalfplaneInstance, kind: SolverKind, cfg: &RunConfig) -> Result<Outcome, SolveError> {
    match kind {
        SolverKind::Brute => Ok(Outcome::from_oracle(brute_halfplanes(inst, cfg.predicate())?)),
        SolverKind::Naive => Ok(Outcome::from_solution(solve_naive_halfplanes(inst, &cfg.options())?)),
        SolverKind::Fast | SolverKind::Auto => Ok(Outcome::from_solution(solve_halfplanes_lower(inst, &cfg.solver_config())?)),
        SolverKind::Interval => Err(SolveError::Rejected("the interval solver handles disk coverage only".into())),
    }
}

/// Direct check of a returned subset: no repeats, every element covered, and
/// the weights summing to the optimum. `covered(e, s)` says whether chosen
/// set `s` takes care of element `e`.
pub fn check_subset(
    elements: usize,
    weights: &[f64],
    outcome: &Outcome,
    covered: impl Fn(usize, usize) -> bool,
) -> Result<(), String> {
    let sol = &outcome.solution;
    if !sol.feasible {
        return if sol.delta.is_infinite() { Ok(()) } else { Err(format!("infeasible with finite delta {}", sol.delta)) };
    }
    let mut seen = vec![false; weights.len()];
    for &s in &sol.chosen {
        if s >= weights.len() || std::mem::replace(&mut seen[s], true) {
            return Err(format!("set {s} chosen twice or out of range"));
        }
    }
    if let Some(e) = (0..elements).find(|&e| !sol.chosen.iter().any(|&s| covered(e, s))) {
        return Err(format!("element {e} is not covered by the returned subset"));
    }
    let sum = sol.chosen.iter().fold(rational_of(0.0), |acc, &s| acc + rational_of(weights[s]));
    match &outcome.exact_delta {
        Some(d) if *d != sum.to_string() => Err(format!("subset weight {sum} differs from delta {d}")),
        Some(_) => Ok(()),
        None => {
            let w: f64 = sol.chosen.iter().map(|&s| weights[s]).sum();
            if (w - sol.delta).abs() <= 1e-9 * sol.delta.abs().max(1.0) {
                Ok(())
            } else {
                Err(format!("subset weight {w} differs from delta {}", sol.delta))
            }
        }
    }
}

pub fn check_cover(inst: &CoverageInstance, outcome: &Outcome, pred: Predicate) -> Result<(), String> {
    check_subset(inst.n(), &inst.weights(), outcome, |p, d| inst.covers(pred, d, p))
}

fn load<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    read_json(path).with_context(|| format!("reading instance {}", path.display()))
}

pub fn solution_json(outcome: &Outcome, verified: Option<bool>) -> Value {
    let mut v = serde_json::to_value(&outcome.solution).expect("solution serializes");
    if let Some(d) = &outcome.exact_delta {
        v["exact_delta"] = json!(d);
    }
    if let Some(ok) = verified {
        v["verified"] = json!(ok);
    }
    v
}

pub fn run(a: Args) -> anyhow::Result<u8> {
    let cfg = RunConfig { exact: a.verify_exact, r: a.r, rho: a.rho, seed: a.seed, debug_invariants: a.debug_invariants };
    let pred = cfg.predicate();
    let (outcome, check) = match a.problem {
        Problem::Cover => {
            let inst: CoverageInstance = load(&a.input)?;
            let o = solve_cover(&inst, a.solver, &cfg)?;
            let c = check_cover(&inst, &o, pred);
            (o, c)
        }
        Problem::Hit => {
            let hit: HittingInstance = load(&a.input)?;
            let o = solve_hit(&hit, a.solver, &cfg)?;
            let w: Vec<f64> = hit.points.iter().map(|p| p.weight).collect();
            let c = check_subset(hit.disks.len(), &w, &o, |d, p| hit.covers(pred, p, d));
            (o, c)
        }
        Problem::Halfplane => {
            let inst: HalfplaneInstance = load(&a.input)?;
            let o = solve_halfplane(&inst, a.solver, &cfg)?;
            let c = check_subset(inst.points.len(), &inst.weights(), &o, |p, h| {
                pred.halfplane_contains(inst.halfplanes[h].region(), inst.points[p])
            });
            (o, c)
        }
    };
    if a.verify_exact {
        if let Err(msg) = &check {
            bail!("returned subset failed the direct check: {msg}");
        }
    }
    let text = serde_json::to_string(&solution_json(&outcome, a.verify_exact.then_some(true)))?;
    emit(a.output.as_deref(), &text)?;
    Ok(if outcome.solution.feasible { 0 } else { EXIT_INFEASIBLE })
}

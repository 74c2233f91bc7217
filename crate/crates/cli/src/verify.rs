use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rayon::prelude::*;
use sepcover::bruteforce::{ELEMENT_CAP, SUBSET_CAP};
use sepcover::{generate, CoverageInstance, Profile};

use crate::solve::{check_cover, solve_cover, Outcome, RunConfig, SolverKind};
use crate::EXIT_MISMATCH;

#[derive(clap::Args)]
pub struct Args {
    /// Inclusive seed range such as `1..500`, or a single seed.
    #[arg(long, default_value = "1..20")]
    seeds: String,
    /// Comma-separated sizes, each `NxM` or `N` (meaning N x N).
    #[arg(long, default_value = "8x8")]
    sizes: String,
    /// Comma-separated generator profiles; defaults to all of them.
    #[arg(long)]
    profiles: Option<String>,
    /// Solvers to compare against each other.
    #[arg(long, value_delimiter = ',', default_value = "naive,interval,fast")]
    solvers: Vec<SolverKind>,
    /// Compare in floating point (relative tolerance 1e-6) instead of exactly.
    #[arg(long)]
    float: bool,
    /// Directory for the reproducer written on a mismatch.
    #[arg(long, default_value = ".")]
    reproducer_dir: PathBuf,
    /// Corrupt the fast solver's input to exercise the mismatch path.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

pub fn parse_seeds(s: &str) -> anyhow::Result<(u64, u64)> {
    let s = s.trim();
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse()?, b.trim().trim_start_matches('=').parse()?),
        None => {
            let v = s.parse()?;
            (v, v)
        }
    };
    if a > b {
        bail!("empty seed range {s}");
    }
    Ok((a, b))
}

pub fn parse_sizes(s: &str) -> anyhow::Result<Vec<(usize, usize)>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let t = t.trim();
            let (n, m) = match t.split_once(['x', 'X', ':']) {
                Some((n, m)) => (n.trim().parse()?, m.trim().parse()?),
                None => {
                    let v = t.parse()?;
                    (v, v)
                }
            };
            if n == 0 || m == 0 {
                bail!("sizes must be positive: {t}");
            }
            Ok((n, m))
        })
        .collect()
}

pub fn parse_profiles(s: Option<&str>) -> anyhow::Result<Vec<Profile>> {
    match s {
        None => Ok(Profile::ALL.to_vec()),
        Some(s) => s.split(',').map(|p| p.trim().parse::<Profile>().map_err(Into::into)).collect(),
    }
}

#[derive(Debug, Clone, Copy)]
struct Checker<'a> {
    solvers: &'a [SolverKind],
    exact: bool,
    fault: bool,
    seed: u64,
}

impl Checker<'_> {
    fn run_one(&self, inst: &CoverageInstance, kind: SolverKind) -> Result<Outcome, String> {
        let cfg = RunConfig { exact: self.exact, ..RunConfig::exact(self.seed) };
        let res = if self.fault && kind == SolverKind::Fast && inst.m() > 0 {
            let mut bad = inst.clone();
            bad.disks[0].weight += 1.0;
            solve_cover(&bad, kind, &cfg)
        } else {
            solve_cover(inst, kind, &cfg)
        };
        res.map_err(|e| format!("{} failed: {e}", kind.name()))
    }

    /// `Err` describes the first disagreement found.
    fn check(&self, inst: &CoverageInstance) -> Result<bool, String> {
        let pred = RunConfig { exact: self.exact, ..RunConfig::exact(0) }.options().predicate;
        let mut outs = Vec::new();
        for &kind in self.solvers {
            let o = self.run_one(inst, kind)?;
            check_cover(inst, &o, pred).map_err(|e| format!("{}: {e}", kind.name()))?;
            outs.push((kind, o));
        }
        let (k0, first) = &outs[0];
        for (k, o) in &outs[1..] {
            self.compare(first, o).map_err(|e| format!("{} vs {}: {e}", k0.name(), k.name()))?;
        }
        let brute = inst.m() <= SUBSET_CAP && inst.n() <= ELEMENT_CAP;
        if brute {
            let o = self.run_one(inst, SolverKind::Brute)?;
            for (k, s) in &outs {
                let agree = if self.exact {
                    s.exact_delta == o.exact_delta
                } else {
                    close(s.solution.delta, o.solution.delta)
                };
                if !agree {
                    return Err(format!(
                        "{} optimum {} but brute force finds {}",
                        k.name(),
                        s.exact_delta.clone().unwrap_or_else(|| s.solution.delta.to_string()),
                        o.exact_delta.clone().unwrap_or_default()
                    ));
                }
            }
        }
        Ok(brute)
    }

    fn compare(&self, a: &Outcome, b: &Outcome) -> Result<(), String> {
        if self.exact {
            let (pa, pb) = (a.solution.exact_prefix.as_ref(), b.solution.exact_prefix.as_ref());
            if pa != pb {
                let i = pa.zip(pb).and_then(|(x, y)| x.iter().zip(y).position(|(u, v)| u != v)).unwrap_or(0);
                return Err(format!("exact prefixes differ first at rank {}", i + 1));
            }
            return Ok(());
        }
        let (pa, pb) = (&a.solution.prefix, &b.solution.prefix);
        if pa.len() != pb.len() {
            return Err("prefix lengths differ".into());
        }
        match pa.iter().zip(pb).position(|(u, v)| !close(*u, *v)) {
            Some(i) => Err(format!("prefix at rank {} differs: {} vs {}", i + 1, pa[i], pb[i])),
            None => Ok(()),
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-6 * a.abs().max(b.abs())
}

/// Greedily drops chunks of points and disks while the failure persists.
fn minimize(inst: &CoverageInstance, fails: impl Fn(&CoverageInstance) -> bool) -> CoverageInstance {
    let mut cur = inst.clone();
    let mut budget = 400usize;
    for points in [true, false] {
        let len = |c: &CoverageInstance| if points { c.points.len() } else { c.disks.len() };
        let mut chunk = len(&cur) / 2;
        while chunk >= 1 && budget > 0 {
            let mut start = 0;
            let mut removed_any = false;
            while start < len(&cur) && budget > 0 {
                let end = (start + chunk).min(len(&cur));
                if len(&cur) - (end - start) == 0 {
                    break;
                }
                let mut cand = cur.clone();
                if points {
                    cand.points.drain(start..end);
                } else {
                    cand.disks.drain(start..end);
                }
                budget -= 1;
                if fails(&cand) {
                    cur = cand;
                    removed_any = true;
                } else {
                    start = end;
                }
            }
            if !removed_any {
                chunk /= 2;
            }
        }
    }
    cur
}

fn write_reproducer(dir: &Path, name: &str, inst: &CoverageInstance) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, inst.to_json()).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn run(a: Args) -> anyhow::Result<u8> {
    let (lo, hi) = parse_seeds(&a.seeds)?;
    let sizes = parse_sizes(&a.sizes)?;
    let profiles = parse_profiles(a.profiles.as_deref())?;
    if a.solvers.is_empty() {
        bail!("no solvers selected");
    }
    let mut tasks = Vec::new();
    for seed in lo..=hi {
        for &(n, m) in &sizes {
            for &p in &profiles {
                tasks.push((seed, n, m, p));
            }
        }
    }
    let results: Vec<Result<bool, String>> = tasks
        .par_iter()
        .map(|&(seed, n, m, p)| {
            let inst = generate(n, m, seed, p).map_err(|e| e.to_string())?;
            Checker { solvers: &a.solvers, exact: !a.float, fault: a.inject_fault, seed }.check(&inst)
        })
        .collect();
    if let Some(i) = results.iter().position(Result::is_err) {
        let (seed, n, m, p) = tasks[i];
        let detail = results[i].clone().unwrap_err();
        eprintln!("mismatch: seed {seed}, {n}x{m}, profile {p}: {detail}");
        let inst = generate(n, m, seed, p)?;
        let checker = Checker { solvers: &a.solvers, exact: !a.float, fault: a.inject_fault, seed };
        let small = minimize(&inst, |c| checker.check(c).is_err());
        let path = write_reproducer(&a.reproducer_dir, &format!("sepcover-repro-{seed}-{n}x{m}-{p}.json"), &small)?;
        let mode = if a.float { "" } else { " --verify-exact" };
        eprintln!(
            "reproducer ({} points, {} disks): {}\nreplay with: sepcover solve --input {} --solver fast --seed {seed}{mode}",
            small.n(),
            small.m(),
            path.display(),
            path.display()
        );
        println!("{}", path.display());
        return Ok(EXIT_MISMATCH);
    }
    let brute = results.iter().filter(|r| matches!(r, Ok(true))).count();
    println!("ok: {} instances agree ({} also against brute force)", results.len(), brute);
    Ok(0)
}

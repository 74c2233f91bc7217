use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::bail;
use rayon::prelude::*;
use sepcover::{generate, Counters, Profile};

use crate::solve::{solve_cover, RunConfig, SolverKind};

/// First line of every CSV written by `bench`; bump when columns change.
pub const CSV_VERSION: &str = "# sepcover-bench v1";
pub const CSV_COLUMNS: &str = "solver,n,m,r,profile,seed,rep,wall_ms,containment_tests,cost_resets,point_scans,\
ancestor_steps,child_classifications,heap_ops,list_appends,list_drains,mincost_updates,locate_steps,\
construction_ops,total_ops,delta";

#[derive(clap::Args)]
pub struct Args {
    /// Comma-separated sizes (n = m), or a doubling range such as `2^10..2^15`.
    #[arg(long, default_value = "2^10..2^13")]
    sizes: String,
    #[arg(long, value_delimiter = ',', default_value = "fast,naive")]
    solvers: Vec<SolverKind>,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "uniform")]
    profile: Profile,
    /// Cutting parameters to sweep for the fast solver (default: min(ceil(sqrt m), n)).
    #[arg(long, value_delimiter = ',')]
    r: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct Record {
    solver: &'static str,
    n: usize,
    r: Option<usize>,
    rep: usize,
    wall_ms: f64,
    counters: Counters,
    total_ops: u64,
    delta: f64,
}

pub fn parse_sizes(s: &str) -> anyhow::Result<Vec<usize>> {
    let pow = |t: &str| -> anyhow::Result<usize> {
        let t = t.trim();
        match t.split_once('^') {
            Some((b, e)) => Ok(b.trim().parse::<usize>()?.pow(e.trim().parse()?)),
            None => Ok(t.parse()?),
        }
    };
    let sizes = match s.split_once("..") {
        Some((a, b)) => {
            let (mut v, hi) = (pow(a)?, pow(b)?);
            let mut out = Vec::new();
            while v <= hi && v > 0 {
                out.push(v);
                v *= 2;
            }
            out
        }
        None => s.split(',').map(pow).collect::<anyhow::Result<_>>()?,
    };
    if sizes.is_empty() || sizes.contains(&0) {
        bail!("no usable sizes in '{s}'");
    }
    Ok(sizes)
}

/// Least-squares slope of log(y) against log(x).
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

pub fn run(a: Args) -> anyhow::Result<u8> {
    let sizes = parse_sizes(&a.sizes)?;
    if a.reps == 0 {
        bail!("--reps must be at least 1");
    }
    let rs: Vec<Option<usize>> = if a.r.is_empty() { vec![None] } else { a.r.iter().map(|&r| Some(r)).collect() };
    let mut tasks = Vec::new();
    for &n in &sizes {
        for &kind in &a.solvers {
            let sweep: &[Option<usize>] = if kind == SolverKind::Fast { &rs } else { &[None] };
            for &r in sweep {
                for rep in 0..a.reps {
                    tasks.push((n, kind, r, rep));
                }
            }
        }
    }
    let records: Vec<Record> = tasks
        .par_iter()
        .map(|&(n, kind, r, rep)| -> anyhow::Result<Record> {
            let inst = generate(n, n, a.seed, a.profile)?;
            let cfg = RunConfig { exact: false, r, ..RunConfig::exact(a.seed) };
            let t = Instant::now();
            let out = solve_cover(&inst, kind, &cfg)?;
            let wall_ms = t.elapsed().as_secs_f64() * 1e3;
            let st = &out.solution.stats;
            Ok(Record {
                solver: kind.name(),
                n,
                r: st.r,
                rep,
                wall_ms,
                counters: st.counters,
                total_ops: st.total_ops,
                delta: out.solution.delta,
            })
        })
        .collect::<anyhow::Result<_>>()?;

    let mut csv = format!("{CSV_VERSION}\n{CSV_COLUMNS}\n");
    for rec in &records {
        let c = &rec.counters;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{:.3},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            rec.solver,
            rec.n,
            rec.n,
            rec.r.map_or(String::new(), |r| r.to_string()),
            a.profile,
            a.seed,
            rec.rep,
            rec.wall_ms,
            c.containment_tests,
            c.cost_resets,
            c.point_scans,
            c.ancestor_steps,
            c.child_classifications,
            c.heap_ops,
            c.list_appends,
            c.list_drains,
            c.mincost_updates,
            c.locate_steps,
            c.construction_ops,
            rec.total_ops,
            rec.delta
        );
    }
    match &a.out {
        Some(p) => std::fs::write(p, &csv)?,
        None => print!("{csv}"),
    }

    // one fit per solver (and per swept r); operation counts do not vary across reps
    let mut keys: Vec<(&str, Option<usize>)> = Vec::new();
    for &(_, kind, r, _) in &tasks {
        let r = if kind == SolverKind::Fast { r } else { None };
        if !keys.contains(&(kind.name(), r)) {
            keys.push((kind.name(), r));
        }
    }
    for (name, r) in keys {
        let mut ops = Vec::new();
        let mut times = Vec::new();
        for &n in &sizes {
            let runs: Vec<&Record> = records
                .iter()
                .zip(&tasks)
                .filter(|(rec, t)| rec.solver == name && rec.n == n && (t.2 == r || name != "fast"))
                .map(|(rec, _)| rec)
                .collect();
            if runs.is_empty() {
                continue;
            }
            ops.push((n as f64, runs[0].total_ops as f64));
            times.push((n as f64, median(runs.iter().map(|x| x.wall_ms).collect())));
        }
        let fmt = |s: Option<f64>| s.map_or("n/a".to_string(), |v| format!("{v:.3}"));
        let label = r.map_or(String::new(), |r| format!(" r={r}"));
        let line = format!("fit {name}{label}: ops slope {} time slope {}", fmt(loglog_slope(&ops)), fmt(loglog_slope(&times)));
        // keep stdout clean when it carries the CSV
        if a.out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    Ok(0)
}

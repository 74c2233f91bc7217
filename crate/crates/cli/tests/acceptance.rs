//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sepcover::instance::GenerateOptions;
use sepcover::numeric::rational_of;
use sepcover::*;

type Outcome = Result<String, String>;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sepcover"))
}

/// Direct check of a returned subset: every point covered, no repeats, and
/// the weights summing exactly (or, in float mode, to 1e-9) to the optimum.
fn sound(inst: &CoverageInstance, sol: &Solution, pred: Predicate) -> Result<(), String> {
    if !sol.feasible {
        return Ok(());
    }
    let mut seen = vec![false; inst.m()];
    for &d in &sol.chosen {
        if std::mem::replace(&mut seen[d], true) {
            return Err(format!("disk {d} repeated"));
        }
    }
    if let Some(p) = (0..inst.n()).find(|&p| !sol.chosen.iter().any(|&d| inst.covers(pred, d, p))) {
        return Err(format!("point {p} uncovered"));
    }
    match sol.exact_delta() {
        Some(Some(d)) => {
            let sum = sol.chosen.iter().fold(rational_of(0.0), |a, &i| a + rational_of(inst.disks[i].weight));
            if &sum != d {
                return Err(format!("subset weight {sum} != delta {d}"));
            }
        }
        _ => {
            let sum: f64 = sol.chosen.iter().map(|&i| inst.disks[i].weight).sum();
            if (sum - sol.delta).abs() > 1e-9 * sol.delta.abs().max(1.0) {
                return Err(format!("subset weight {sum} != delta {}", sol.delta));
            }
        }
    }
    Ok(())
}

fn first_error(results: Vec<Result<(), String>>) -> Result<(), String> {
    results.into_iter().find(Result::is_err).unwrap_or(Ok(()))
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-6 * a.abs().max(b.abs())
}

/// Backtracking soundness checks performed inside criteria 1 and 2.
static SOUNDNESS_CHECKS: std::sync::atomic::AtomicUsize = std::sync::atomic::AtomicUsize::new(0);

fn checked_sound(inst: &CoverageInstance, sol: &Solution, pred: Predicate, ctx: &str) -> Result<(), String> {
    SOUNDNESS_CHECKS.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
    sound(inst, sol, pred).map_err(|e| format!("backtracking: {ctx}: {e}"))
}

fn brute_force_agreement() -> Outcome {
    let tasks: Vec<(u64, Profile)> = (0..700u64).flat_map(|s| Profile::ALL.map(|p| (s, p))).collect();
    let res: Vec<Result<(), String>> = tasks
        .par_iter()
        .map(|&(seed, profile)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xacce);
            let (n, m) = (rng.gen_range(1..=12), rng.gen_range(1..=12));
            let inst = generate(n, m, seed, profile).map_err(|e| e.to_string())?;
            let ctx = format!("seed {seed} {profile} {n}x{m}");
            let oracle = brute_cover(&inst, Predicate::Exact).map_err(|e| e.to_string())?;
            let sols = [
                solve_naive(&inst, &SolveOptions::exact()),
                solve_interval(&inst, &SolveOptions::exact()),
                solve_fast(&inst, &SolverConfig { seed, ..SolverConfig::exact() }),
            ];
            for sol in sols {
                let sol = sol.map_err(|e| format!("{ctx}: {e}"))?;
                if sol.exact_delta().flatten() != oracle.exact_weight.as_ref() || sol.feasible != oracle.feasible {
                    return Err(format!("{ctx}: {} gives {:?}, brute force {:?}", sol.stats.solver, sol.exact_delta(), oracle.exact_weight));
                }
                checked_sound(&inst, &sol, Predicate::Exact, &ctx)?;
            }
            Ok(())
        })
        .collect();
    first_error(res)?;
    Ok(format!("{} instances, n and m in [1, 12], all three solvers equal brute force exactly", tasks.len()))
}

fn cross_solver_agreement() -> Outcome {
    let mut tasks = Vec::new();
    for seed in 0..67u64 {
        for n in [500, 1000, 2000] {
            tasks.push((seed, n, Profile::ALL[(seed as usize + n / 500) % 3]));
        }
    }
    let exact: Vec<Result<(), String>> = tasks
        .par_iter()
        .map(|&(seed, n, profile)| {
            let inst = generate(n, n, seed, profile).map_err(|e| e.to_string())?;
            let ctx = format!("exact seed {seed} {profile} n=m={n}");
            let a = solve_naive(&inst, &SolveOptions::exact()).map_err(|e| e.to_string())?;
            let b = solve_interval(&inst, &SolveOptions::exact()).map_err(|e| e.to_string())?;
            let c = solve_fast(&inst, &SolverConfig { seed, ..SolverConfig::exact() }).map_err(|e| e.to_string())?;
            if a.exact_prefix != b.exact_prefix || a.exact_prefix != c.exact_prefix {
                return Err(format!("{ctx}: prefixes differ"));
            }
            for s in [&a, &b, &c] {
                checked_sound(&inst, s, Predicate::Exact, &ctx)?;
            }
            Ok(())
        })
        .collect();
    first_error(exact)?;
    let float: Vec<Result<(), String>> = tasks
        .par_iter()
        .map(|&(seed, n, profile)| {
            let inst = generate(n, n, seed, profile).map_err(|e| e.to_string())?;
            let ctx = format!("float seed {seed} {profile} n=m={n}");
            let a = solve_naive(&inst, &SolveOptions::default()).map_err(|e| e.to_string())?;
            let b = solve_interval(&inst, &SolveOptions::default()).map_err(|e| e.to_string())?;
            let c = solve_fast(&inst, &SolverConfig { seed, ..Default::default() }).map_err(|e| e.to_string())?;
            for (i, x) in a.prefix.iter().enumerate() {
                if !close(*x, b.prefix[i]) || !close(*x, c.prefix[i]) {
                    return Err(format!("{ctx}: rank {}: {x} {} {}", i + 1, b.prefix[i], c.prefix[i]));
                }
            }
            for s in [&a, &b, &c] {
                checked_sound(&inst, s, Predicate::default(), &ctx)?;
            }
            Ok(())
        })
        .collect();
    first_error(float)?;
    Ok(format!(
        "{} instances, n = m in {{500, 1000, 2000}}: full prefix equality in exact mode, within 1e-6 in float mode",
        tasks.len()
    ))
}

fn invariant_suite() -> Outcome {
    let mut tasks = Vec::new();
    for seed in 0..12u64 {
        for n in [40, 120, 300] {
            tasks.push((seed, n, Profile::ALL[seed as usize % 3]));
        }
    }
    let res: Vec<Result<(), String>> = tasks
        .par_iter()
        .map(|&(seed, n, profile)| {
            let inst = generate(n, n, seed, profile).map_err(|e| e.to_string())?;
            for base in [SolverConfig::default(), SolverConfig::exact()] {
                let cfg = SolverConfig { seed, debug_invariants: true, ..base };
                solve_fast(&inst, &cfg).map_err(|e| format!("seed {seed} {profile} n=m={n}: {e}"))?;
            }
            Ok(())
        })
        .collect();
    first_error(res)?;
    Ok(format!("{} runs (float and exact) up to n = m = 300, shadow checks after every iteration, zero violations", tasks.len() * 2))
}

/// Leaves grouped by x-bucket, so that counting the leaves that contain a
/// query point does not need a scan over every leaf.
struct Stabbing {
    lo: f64,
    width: f64,
    buckets: Vec<Vec<u32>>,
}

impl Stabbing {
    fn new(cut: &HierCutting, lo: f64, hi: f64, count: usize) -> Self {
        let width = (hi - lo) / count as f64;
        let mut buckets = vec![Vec::new(); count];
        for &leaf in &cut.leaves {
            let c = &cut.cells[leaf as usize];
            let a = ((c.xl - lo) / width).floor().clamp(0.0, count as f64 - 1.0) as usize;
            let b = ((c.xr - lo) / width).floor().clamp(0.0, count as f64 - 1.0) as usize;
            if c.xr < lo || c.xl > hi {
                continue;
            }
            for bucket in &mut buckets[a..=b] {
                bucket.push(leaf);
            }
        }
        Stabbing { lo, width, buckets }
    }

    fn containing(&self, cut: &HierCutting, q: Point) -> usize {
        let i = (((q.x - self.lo) / self.width).floor() as usize).min(self.buckets.len() - 1);
        self.buckets[i].iter().filter(|&&l| cut.cell_contains(l as usize, q)).count()
    }
}

fn cutting_structure() -> Outcome {
    let sizes = [500usize, 1000, 2000, 3500, 5000];
    let tasks: Vec<(usize, u64)> = sizes.iter().flat_map(|&n| (0..20u64).map(move |s| (n, s))).collect();
    let res: Vec<Result<(usize, f64), String>> = tasks
        .par_iter()
        .map(|&(n, seed)| {
            let inst = generate(n, n, seed, Profile::Uniform).map_err(|e| e.to_string())?;
            let r = (n as f64).sqrt().ceil() as usize;
            let cut = dual_cutting(&inst, &SolverConfig { r: Some(r), seed, ..Default::default() }).map_err(|e| e.to_string())?;
            let ctx = format!("n {n} seed {seed}");
            if let Some(&l) = cut.leaves.iter().find(|&&l| cut.cells[l as usize].conflict.len() * r > n) {
                return Err(format!("{ctx}: leaf {l} has {} conflicts > n/r", cut.cells[l as usize].conflict.len()));
            }
            let problems = cut.verify(false);
            if let Some(p) = problems.first() {
                return Err(format!("{ctx}: {p}"));
            }
            let lo = inst.points.iter().map(|p| p.x).fold(f64::INFINITY, f64::min) - 1.0;
            let hi = inst.points.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max) + 1.0;
            let index = Stabbing::new(&cut, lo, hi, 512);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 77);
            for _ in 0..10_000 {
                let q = Point::new(rng.gen_range(lo..hi), -rng.gen_range(1e-9..2.0));
                let k = index.containing(&cut, q);
                if k != 1 {
                    return Err(format!("{ctx}: {q:?} lies in {k} leaves"));
                }
                let leaf = cut.locate(q).map_err(|e| e.to_string())?;
                if !cut.cell_contains(leaf as usize, q) {
                    return Err(format!("{ctx}: located leaf {leaf} does not contain {q:?}"));
                }
            }
            Ok((n, cut.stats().c_cells))
        })
        .collect();
    let mut per_n: Vec<(usize, Vec<f64>)> = sizes.iter().map(|&n| (n, Vec::new())).collect();
    for r in res {
        let (n, c) = r?;
        per_n.iter_mut().find(|e| e.0 == n).unwrap().1.push(c);
    }
    let mut report = Vec::new();
    for (n, cs) in &per_n {
        let mean = cs.iter().sum::<f64>() / cs.len() as f64;
        let spread = cs.iter().map(|c| (c - mean).abs() / mean).fold(0.0, f64::max);
        report.push(format!("n={n}: C_cells {mean:.3} (max dev {:.1}%)", 100.0 * spread));
        if spread > 0.2 {
            return Err(format!("C_cells unstable across seeds at n={n}: {cs:?}"));
        }
    }
    Ok(format!("{} builds, leaves within n/r, 10^4 points each located in exactly one leaf; {}", tasks.len(), report.join(", ")))
}

fn infeasibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let res: Vec<Result<(), String>> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let profile = Profile::ALL[seed as usize % 3];
            let n = 5 + (seed as usize * 7) % 60;
            let inst = generate_with(n, n, seed, GenerateOptions::new(profile).infeasible()).map_err(|e| e.to_string())?;
            let path = dir.path().join(format!("inf-{seed}.json"));
            std::fs::write(&path, inst.to_json()).map_err(|e| e.to_string())?;
            for solver in ["naive", "interval", "fast"] {
                for exact in [false, true] {
                    let mut cmd = bin();
                    cmd.args(["solve", "--solver", solver, "--seed", &seed.to_string(), "--input"]).arg(&path);
                    if exact {
                        cmd.arg("--verify-exact");
                    }
                    let out = cmd.output().map_err(|e| e.to_string())?;
                    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| format!("seed {seed}: {e}"))?;
                    if out.status.code() != Some(2) || v["feasible"] != false || v["delta"] != "inf" {
                        return Err(format!("seed {seed} {solver}: exit {:?}, output {v}", out.status.code()));
                    }
                }
            }
            let brute_ok = inst.m() > bruteforce::SUBSET_CAP || !brute_cover(&inst, Predicate::Exact).map_err(|e| e.to_string())?.feasible;
            if !brute_ok {
                return Err(format!("seed {seed}: brute force finds a cover"));
            }
            Ok(())
        })
        .collect();
    first_error(res)?;
    Ok("100 planted instances: naive, interval and fast report feasible=false, delta=inf, exit code 2 (float and exact)".into())
}

fn duality() -> Outcome {
    let res: Vec<Result<(), String>> = (0..500u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd0a1);
            let inst = generate(rng.gen_range(1..=12), rng.gen_range(1..=12), seed, Profile::ALL[seed as usize % 3])
                .map_err(|e| e.to_string())?;
            let a = brute_cover(&inst, Predicate::Exact).map_err(|e| e.to_string())?;
            let b = brute_hit(&inst.dual_hitting(), Predicate::Exact).map_err(|e| e.to_string())?;
            if a.exact_weight != b.exact_weight {
                return Err(format!("seed {seed}: cover {:?} vs hit {:?}", a.exact_weight, b.exact_weight));
            }
            let hit = generate_hitting(rng.gen_range(1..=12), rng.gen_range(1..=12), seed);
            let oracle = brute_hit(&hit, Predicate::Exact).map_err(|e| e.to_string())?;
            let sol = solve_hitting(&hit, &SolverConfig { seed, ..SolverConfig::exact() }).map_err(|e| e.to_string())?;
            if sol.exact_delta().flatten() != oracle.exact_weight.as_ref() {
                return Err(format!("seed {seed}: solve_hitting {:?} vs brute {:?}", sol.exact_delta(), oracle.exact_weight));
            }
            if sol.feasible && (0..hit.disks.len()).any(|d| !sol.chosen.iter().any(|&p| hit.covers(Predicate::Exact, p, d))) {
                return Err(format!("seed {seed}: returned points miss a disk"));
            }
            Ok(())
        })
        .collect();
    first_error(res)?;
    Ok("500 cover/dual-hitting brute-force pairs equal; solve_hitting equals brute_hit on 500 hitting instances".into())
}

fn halfplanes() -> Outcome {
    let res: Vec<Result<(), String>> = (0..500u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4a1f);
            let inst = generate_halfplanes(rng.gen_range(1..=12), rng.gen_range(1..=12), seed);
            let oracle = brute_halfplanes(&inst, Predicate::Exact).map_err(|e| e.to_string())?;
            let sol = solve_halfplanes_lower(&inst, &SolverConfig { seed, ..SolverConfig::exact() }).map_err(|e| e.to_string())?;
            if sol.exact_delta().flatten() != oracle.exact_weight.as_ref() {
                return Err(format!("seed {seed}: adapter {:?} vs brute {:?}", sol.exact_delta(), oracle.exact_weight));
            }
            if sol.feasible {
                let miss = (0..inst.points.len())
                    .find(|&p| !sol.chosen.iter().any(|&h| Predicate::Exact.halfplane_contains(inst.halfplanes[h].region(), inst.points[p])));
                if let Some(p) = miss {
                    return Err(format!("seed {seed}: point {p} uncovered"));
                }
            }
            Ok(())
        })
        .collect();
    first_error(res)?;
    Ok("500 lower-halfplane instances with n, m <= 12 equal brute force exactly".into())
}

fn complexity_trend() -> Outcome {
    let out = bin()
        .args(["bench", "--sizes", "2^10..2^15", "--solvers", "fast,naive", "--reps", "1", "--out"])
        .arg(std::env::temp_dir().join(format!("sepcover-acceptance-bench-{}.csv", std::process::id())))
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("bench failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let text = String::from_utf8_lossy(&out.stdout);
    let slope = |name: &str| -> Result<f64, String> {
        text.lines()
            .find(|l| l.starts_with(&format!("fit {name}:")))
            .and_then(|l| l.split("ops slope ").nth(1))
            .and_then(|t| t.split_whitespace().next())
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| format!("no fit for {name} in: {text}"))
    };
    let (fast, naive) = (slope("fast")?, slope("naive")?);
    let msg = format!("n = m in 2^10..2^15: fast ops slope {fast:.3} (need <= 1.8), naive ops slope {naive:.3} (need >= 1.9)");
    if fast <= 1.8 && naive >= 1.9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    // libtest-style arguments (filters, --nocapture, ...) are accepted and ignored
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 brute-force agreement", brute_force_agreement),
        ("2 cross-solver agreement at scale", cross_solver_agreement),
        ("3 invariant suite", invariant_suite),
        ("4 cutting structure", cutting_structure),
        ("5 infeasibility", infeasibility),
        ("6 duality", duality),
        ("7 lower-halfplane adapter", halfplanes),
        ("9 complexity trend", complexity_trend),
    ];
    let mut failed = 0;
    let mut results = Vec::new();
    for (name, f) in criteria {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        if r.is_err() {
            failed += 1;
        }
        results.push((name, r, secs));
        if name.starts_with('2') {
            // soundness is checked inside criteria 1 and 2; report it right after them
            let checks = SOUNDNESS_CHECKS.load(std::sync::atomic::Ordering::Relaxed);
            let ok = results.iter().take(2).all(|(_, r, _)| r.is_ok());
            if !ok {
                failed += 1;
            }
            let r = if ok {
                Ok(format!("{checks} returned subsets cover every point, repeat no disk and weigh exactly delta_n"))
            } else {
                Err("not established: criterion 1 or 2 failed, see its message".to_string())
            };
            results.push(("8 backtracking soundness", r, 0.0));
        }
    }
    results.sort_by_key(|(name, _, _)| name.split(' ').next().unwrap().parse::<u32>().unwrap());
    for (name, r, secs) in &results {
        match r {
            Ok(msg) => println!("PASS  criterion {name} [{secs:.1}s]: {msg}"),
            Err(msg) => println!("FAIL  criterion {name} [{secs:.1}s]: {msg}"),
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}

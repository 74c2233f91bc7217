use std::path::Path;
use std::process::{Command, Output};

use sepcover::instance::WeightedDisk;
use sepcover::{dual_cutting, generate, CoverageInstance, Point, Profile, SolverConfig};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepcover")).args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write(dir: &Path, name: &str, inst: &CoverageInstance) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, inst.to_json()).unwrap();
    path
}

fn minimal() -> CoverageInstance {
    CoverageInstance {
        radius: 1.0,
        points: vec![Point::new(0.0, 0.5)],
        disks: vec![WeightedDisk { center: Point::new(0.0, -0.1), weight: 3.0 }],
    }
}

#[test]
fn minimal_instance_solves_to_its_weight() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "one.json", &minimal());
    let out = run(&["solve", "--input", p(&input), "--solver", "naive"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["delta"], 3.0);
    assert_eq!(v["chosen"], serde_json::json!([0]));
}

#[test]
fn infeasible_instance_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut inst = minimal();
    inst.points.push(Point::new(9.0, 0.5));
    let input = write(dir.path(), "inf.json", &inst);
    for solver in ["naive", "interval", "fast", "brute", "auto"] {
        let out = run(&["solve", "--input", p(&input), "--solver", solver]);
        assert_eq!(out.status.code(), Some(2), "{solver}");
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["delta"], "inf", "{solver}");
    }
}

#[test]
fn all_solvers_report_the_same_delta() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "g.json", &generate(60, 40, 4, Profile::Clustered).unwrap());
    let deltas: Vec<Value> = ["naive", "interval", "fast"]
        .iter()
        .map(|s| {
            let out = run(&["solve", "--input", p(&input), "--solver", s, "--verify-exact"]);
            assert!(out.status.code() == Some(0) || out.status.code() == Some(2));
            let v: Value = serde_json::from_slice(&out.stdout).unwrap();
            assert_eq!(v["verified"], true);
            v["exact_delta"].clone()
        })
        .collect();
    assert_eq!(deltas[0], deltas[1]);
    assert_eq!(deltas[0], deltas[2]);
}

#[test]
fn solve_writes_output_file_and_checks_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "g.json", &generate(80, 80, 1, Profile::Uniform).unwrap());
    let output = dir.path().join("sol.json");
    let out = run(&["solve", "--input", p(&input), "--solver", "fast", "--debug-invariants", "--r", "5", "--output", p(&output)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(v["stats"]["r"], 5);
    assert_eq!(v["prefix"].as_array().unwrap().len(), 80);
}

#[test]
fn bad_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(run(&["solve", "--input", p(&bad)]).status.code(), Some(1));
    assert_eq!(run(&["solve", "--input", p(&dir.path().join("missing.json"))]).status.code(), Some(1));
    let mut above = minimal();
    above.disks[0].center.y = 0.5;
    let input = write(dir.path(), "above.json", &above);
    assert_eq!(run(&["solve", "--input", p(&input)]).status.code(), Some(1));
}

#[test]
fn generate_then_solve_other_problems() {
    let dir = tempfile::tempdir().unwrap();
    for problem in ["hit", "halfplane"] {
        let file = dir.path().join(format!("{problem}.json"));
        let g = run(&["generate", "-n", "9", "-m", "9", "--seed", "3", "--problem", problem, "--output", p(&file)]);
        assert_eq!(g.status.code(), Some(0));
        let deltas: Vec<Value> = ["fast", "brute", "naive"]
            .iter()
            .map(|s| {
                let out = run(&["solve", "--input", p(&file), "--problem", problem, "--solver", s, "--verify-exact"]);
                assert!(matches!(out.status.code(), Some(0 | 2)), "{problem} {s}: {}", String::from_utf8_lossy(&out.stderr));
                serde_json::from_slice::<Value>(&out.stdout).unwrap()["exact_delta"].clone()
            })
            .collect();
        assert_eq!(deltas[0], deltas[1], "{problem}");
        assert_eq!(deltas[0], deltas[2], "{problem}");
    }
}

#[test]
fn verify_small_instances_against_brute_force() {
    let out = run(&["verify", "--seeds", "1..500", "--sizes", "8x8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("1500 instances agree (1500 also against brute force)"));
}

#[test]
fn verify_larger_instances_across_solvers() {
    let out = run(&["verify", "--seeds", "1..4", "--sizes", "1000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["verify", "--seeds", "1..4", "--sizes", "1000", "--float"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn corrupted_solver_is_caught_with_a_replayable_reproducer() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--seeds", "1..20", "--sizes", "30x12", "--inject-fault", "--reproducer-dir", p(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
    let path = String::from_utf8_lossy(&out.stdout).trim().to_string();
    let repro = CoverageInstance::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(repro.n() <= 30 && repro.m() <= 12);
    let replay = run(&["solve", "--input", &path, "--solver", "fast", "--verify-exact"]);
    assert!(matches!(replay.status.code(), Some(0 | 2)));
}

#[test]
fn render_minimal_instance() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "one.json", &minimal());
    let out = run(&["render", "--input", p(&input)]);
    assert_eq!(out.status.code(), Some(0));
    let svg = String::from_utf8_lossy(&out.stdout);
    assert_eq!(svg.matches("<circle").count(), 1);
    assert_eq!(svg.matches(r#"class="point""#).count(), 1);
    assert!(svg.contains(r#"class="separator""#));
}

#[test]
fn render_highlights_chosen_disks() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(20, 15, 2, Profile::Uniform).unwrap();
    let input = write(dir.path(), "g.json", &inst);
    let sol = dir.path().join("sol.json");
    let s = run(&["solve", "--input", p(&input), "--output", p(&sol)]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    let chosen = v["chosen"].as_array().unwrap().len();
    let svg_path = dir.path().join("out.svg");
    let out = run(&["render", "--input", p(&input), "--solution", p(&sol), "--out", p(&svg_path)]);
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert_eq!(svg.matches("<circle").count(), inst.m());
    assert_eq!(svg.matches(r#"class="disk chosen""#).count(), chosen);
    assert!(s.status.code() == Some(2) || chosen > 0);
}

#[test]
fn render_cutting_cell_count_matches_stats() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(150, 150, 6, Profile::AdversarialOverlap).unwrap();
    let input = write(dir.path(), "g.json", &inst);
    let out = run(&["render", "--input", p(&input), "--show-cutting", "--seed", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let svg = String::from_utf8_lossy(&out.stdout);
    let cells = dual_cutting(&inst, &SolverConfig { seed: 6, ..Default::default() }).unwrap().stats().cells;
    assert_eq!(svg.matches(r#"class="cell "#).count(), cells);
    assert_eq!(svg.matches(r#"class="dual-point""#).count(), inst.m());
}

#[test]
fn bench_writes_versioned_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let out = run(&["bench", "--sizes", "2^6..2^8", "--solvers", "fast,naive,interval", "--reps", "2", "--r", "4,8", "--out", p(&csv)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# sepcover-bench v1"));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!(header.contains(&"total_ops") && header.contains(&"point_scans"));
    // 3 sizes x (2 fast r values + naive + interval) x 2 reps
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3 * 4 * 2);
    assert!(rows.iter().all(|r| r.split(',').count() == header.len()));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("fit fast r=4: ops slope"));
    assert!(stdout.contains("fit naive: ops slope"));
}

#[test]
fn thread_cap_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_sepcover"))
        .args(["verify", "--seeds", "1..3", "--sizes", "6"])
        .env("SEPCOVER_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_sepcover"))
        .args(["verify", "--seeds", "1..3", "--sizes", "6"])
        .env("SEPCOVER_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn commands_are_deterministic() {
    let a = run(&["generate", "-n", "30", "-m", "20", "--seed", "9", "--profile", "clustered"]);
    let b = run(&["generate", "-n", "30", "-m", "20", "--seed", "9", "--profile", "clustered"]);
    assert_eq!(a.stdout, b.stdout);
}

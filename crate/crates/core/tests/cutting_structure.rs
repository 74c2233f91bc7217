use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sepcover::*;

fn build(n: usize, seed: u64, profile: Profile) -> (CoverageInstance, HierCutting) {
    let inst = generate(n, n, seed, profile).unwrap();
    let r = (n as f64).sqrt().ceil() as usize;
    let cut = dual_cutting(&inst, &SolverConfig { r: Some(r), seed, ..Default::default() }).unwrap();
    (inst, cut)
}

/// Random query points inside the x-range spanned by the dual arcs.
fn queries(inst: &CoverageInstance, count: usize, seed: u64) -> Vec<Point> {
    let lo = inst.points.iter().map(|p| p.x).fold(f64::INFINITY, f64::min) - inst.radius;
    let hi = inst.points.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max) + inst.radius;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Point::new(rng.gen_range(lo..hi), -rng.gen_range(1e-9..2.0 * inst.radius))).collect()
}

#[test]
fn leaves_are_light_and_partition_the_plane() {
    for (seed, n) in [(1, 200), (2, 700), (3, 1500)] {
        for profile in Profile::ALL {
            let (inst, cut) = build(n, seed, profile);
            let problems = cut.verify(false);
            assert!(problems.is_empty(), "{profile} n {n}: {:?}", &problems[..problems.len().min(5)]);
            for &leaf in &cut.leaves {
                assert!(cut.cells[leaf as usize].conflict.len() * cut.r <= cut.n);
            }
            for q in queries(&inst, 2000, seed) {
                let hits = cut.containing_leaves(q);
                assert_eq!(hits.len(), 1, "{profile} n {n}: {q:?} in leaves {hits:?}");
                assert_eq!(cut.locate(q).unwrap(), hits[0]);
            }
        }
    }
}

#[test]
fn stored_conflict_lists_match_direct_tests() {
    let (_, cut) = build(300, 4, Profile::Clustered);
    let problems = cut.verify(true);
    assert!(problems.is_empty(), "{:?}", &problems[..problems.len().min(5)]);
}

#[test]
fn cell_constant_is_stable_across_seeds() {
    let cs: Vec<f64> = (0..6).map(|seed| build(1000, seed, Profile::Uniform).1.stats().c_cells).collect();
    let mean = cs.iter().sum::<f64>() / cs.len() as f64;
    for c in &cs {
        assert!((c - mean).abs() <= 0.2 * mean, "{cs:?}");
    }
}

#[test]
fn located_leaf_matches_linear_scan() {
    let (inst, cut) = build(400, 8, Profile::AdversarialOverlap);
    for q in queries(&inst, 1000, 8) {
        assert_eq!(cut.locate(q).ok(), cut.locate_linear(q));
    }
}

#[test]
fn same_seed_same_cutting() {
    let (_, a) = build(300, 5, Profile::Uniform);
    let (_, b) = build(300, 5, Profile::Uniform);
    assert_eq!(a.stats(), b.stats());
    assert!(a.cells.iter().zip(&b.cells).all(|(x, y)| x.conflict == y.conflict && x.xl == y.xl));
}

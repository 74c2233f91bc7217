use proptest::prelude::*;
use sepcover::instance::WeightedDisk;
use sepcover::*;

#[test]
fn bookkeeping_holds_after_every_iteration() {
    for seed in 0..3 {
        for profile in Profile::ALL {
            let inst = generate(250, 250, seed, profile).unwrap();
            for base in [SolverConfig::default(), SolverConfig::exact()] {
                let config = SolverConfig { seed, debug_invariants: true, ..base };
                let sol = solve_fast(&inst, &config).unwrap_or_else(|e| panic!("seed {seed} {profile}: {e}"));
                assert_eq!(sol.prefix.len(), 250);
            }
        }
    }
}

#[test]
fn checkpoints_track_the_prefix() {
    let inst = generate(200, 180, 2, Profile::Uniform).unwrap();
    let run = solve_fast_run(&inst, &SolverConfig { checkpoint_every: Some(50), ..SolverConfig::exact() }).unwrap();
    assert_eq!(run.checkpoints.len(), 4);
    for cp in &run.checkpoints {
        assert_eq!(cp.iteration % 50, 0);
        assert!(cp.root_min_cost.is_some());
    }
}

fn instance() -> impl Strategy<Value = CoverageInstance> {
    let pt = (0.0..4.0f64, 0.0..0.95f64).prop_map(|(x, y)| Point::new(x, y));
    let disk = (0.0..4.0f64, -0.95..-0.01f64, 1u32..20).prop_map(|(x, y, w)| WeightedDisk { center: Point::new(x, y), weight: w as f64 });
    (prop::collection::vec(pt, 1..14), prop::collection::vec(disk, 1..14))
        .prop_map(|(points, disks)| CoverageInstance { radius: 1.0, points, disks })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fast_equals_naive(inst in instance(), seed in 0u64..100) {
        let naive = solve_naive(&inst, &SolveOptions::exact()).unwrap();
        let fast = solve_fast(&inst, &SolverConfig { seed, debug_invariants: true, ..SolverConfig::exact() }).unwrap();
        prop_assert_eq!(naive.exact_prefix, fast.exact_prefix);
    }

    #[test]
    fn prefix_is_monotone(inst in instance()) {
        let sol = solve_naive(&inst, &SolveOptions::exact()).unwrap();
        prop_assert!(sol.prefix.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn json_round_trip(inst in instance()) {
        prop_assert_eq!(CoverageInstance::from_json(&inst.to_json()).unwrap(), inst);
    }
}

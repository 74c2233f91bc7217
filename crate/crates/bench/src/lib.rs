//! Workloads shared by the criterion benches.

use sepcover::{generate, CoverageInstance, Profile};

/// Square uniform instance of side `n`, fixed per seed.
pub fn square(n: usize, seed: u64) -> CoverageInstance {
    generate(n, n, seed, Profile::Uniform).expect("uniform generation succeeds")
}

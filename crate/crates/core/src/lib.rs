//! Minimum-weight coverage of points by equal-radius disks when a horizontal
//! line separates the points (above) from the disk centers (below).
//!
//! Three solvers compute the same prefix optima:
//! [`solve_naive`] runs the left-to-right dynamic program with linear scans,
//! [`solve_interval`] reduces to weighted interval coverage, and
//! [`solve_fast`] runs the dynamic program in the dual plane on top of a
//! hierarchical cutting. [`brute_cover`] enumerates subsets for tiny inputs.

pub mod bruteforce;
pub mod cost_tree;
pub mod cutting;
pub mod dp_naive;
pub mod geom;
pub mod heap;
pub mod instance;
pub mod interval_oracle;
pub mod numeric;
mod relation;
pub mod solution;
pub mod solver;

pub use bruteforce::{brute_cover, brute_halfplanes, brute_hit, OracleResult};
pub use cutting::{CuttingError, CuttingParams, CuttingStats, HierCutting, RootShape};
pub use dp_naive::{solve_naive, solve_naive_halfplanes};
pub use geom::{Point, Predicate};
pub use instance::{
    generate, generate_halfplanes, generate_hitting, generate_with, validate, CoverageInstance, GenerateOptions,
    HalfplaneInstance, HittingInstance, InstanceError, Profile, ValidationReport,
};
pub use interval_oracle::{build_segments, solve_interval, solve_intervals, Segment};
pub use solution::{Arithmetic, Counters, SolveError, SolveOptions, SolveStats, Solution};
pub use solver::{dual_cutting, dualize, solve_fast, solve_fast_run, solve_halfplanes_lower, solve_hitting, SolverConfig};

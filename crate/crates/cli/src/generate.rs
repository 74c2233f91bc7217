use std::path::PathBuf;

use sepcover::instance::GenerateOptions;
use sepcover::{generate_halfplanes, generate_hitting, generate_with, Profile};

use crate::{emit, Problem};

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, short)]
    n: usize,
    #[arg(long, short)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// uniform, clustered or adversarial-overlap
    #[arg(long, default_value = "uniform")]
    profile: Profile,
    #[arg(long, value_enum, default_value = "cover")]
    problem: Problem,
    /// Plant a point that no disk reaches.
    #[arg(long)]
    infeasible: bool,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

pub fn run(a: Args) -> anyhow::Result<u8> {
    let text = match a.problem {
        Problem::Cover => {
            let mut opts = GenerateOptions::new(a.profile);
            opts.radius = a.radius;
            if a.infeasible {
                opts = opts.infeasible();
            }
            generate_with(a.n, a.m, a.seed, opts)?.to_json()
        }
        Problem::Hit => generate_hitting(a.n, a.m, a.seed).to_json(),
        Problem::Halfplane => generate_halfplanes(a.n, a.m, a.seed).to_json(),
    };
    emit(a.output.as_deref(), &text)?;
    Ok(0)
}

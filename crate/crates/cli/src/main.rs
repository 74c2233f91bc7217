//! `sepcover` command-line front end.
//!
//! Exit codes: 0 success (feasible), 2 infeasible instance, 1 error,
//! 3 solver mismatch found by `verify`.

mod bench;
mod generate;
mod render;
mod solve;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "sepcover", version, about = "Weighted coverage by line-separable unit disks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance as JSON.
    Generate(generate::Args),
    /// Solve an instance file and write the solution as JSON.
    Solve(solve::Args),
    /// Fuzz the solvers against each other and against brute force.
    Verify(verify::Args),
    /// Measure operation counts and wall time over a range of sizes.
    Bench(bench::Args),
    /// Draw an instance (and optionally a solution or the cutting) as SVG.
    Render(render::Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    /// Cover points with weighted disks.
    Cover,
    /// Hit disks with weighted points.
    Hit,
    /// Cover points with weighted lower halfplanes.
    Halfplane,
}

pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;

/// Sizes the global worker pool from `SEPCOVER_THREADS` when set.
fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("SEPCOVER_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("SEPCOVER_THREADS must be a positive integer, got '{v}'"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::FAILURE;
    }
    let result = match cli.command {
        Command::Generate(a) => generate::run(a),
        Command::Solve(a) => solve::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Bench(a) => bench::run(a),
        Command::Render(a) => render::run(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&std::path::Path>, text: &str) -> anyhow::Result<()> {
    use anyhow::Context;
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

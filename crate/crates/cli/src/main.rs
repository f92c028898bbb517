use std::path::PathBuf;
use std::process::ExitCode;

use bo4lab_cli::{execute, parse_config, Command, RunConfig};
use clap::Parser;

#[derive(Parser, Debug)]
#[command(
    name = "bo4lab",
    version,
    about = "Spectral runs and estimate checks for fourth-order Benjamin-Ono type equations"
)]
#[command(after_help = RunConfig::help_table())]
struct Args {
    /// evolve | identities | commutators | symbols | gn | mollifier | loss | two-solution | bona-smith | conserve
    command: Command,
    /// Config file (`key = value` lines); omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `out` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, env = "BO4LAB_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match real_main(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn real_main(args: Args) -> Result<bool, Box<dyn std::error::Error>> {
    if let Some(t) = args.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global()?;
    }
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text)?;
    cfg.command = args.command;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.out = out;
    }
    cfg.validate()?;
    let outcome = execute(&cfg, &cfg.out)?;
    for r in &outcome.reports {
        println!(
            "{} {}: measured {:.6e}, bound {:.6e}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.measured,
            r.bound
        );
    }
    println!("outputs in {}", cfg.out.display());
    Ok(outcome.passed())
}

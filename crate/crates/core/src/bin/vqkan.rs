use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vqkan::experiment::{compare, run, Method, Overrides, RunConfig, RunRecord};
use vqkan::problems::ProblemKind;
use vqkan::vqkan::SelectionWay;
use vqkan::{PauliString, PoolFlavor};

#[derive(Parser)]
#[command(name = "vqkan", version, about = "Adaptive VQKAN and QNN benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write CSV/JSON artifacts.
    Run(RunArgs),
    /// Compare two finished runs (directories or summary.json files).
    Compare { a: PathBuf, b: PathBuf },
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML run configuration; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// fitting, fitting:<target>, classification or heat.
    #[arg(long)]
    problem: Option<ProblemKind>,
    /// adaptive or qnn.
    #[arg(long)]
    method: Option<Method>,
    /// 1 (largest gradient) or 2 (smallest loss).
    #[arg(long, value_parser = parse_way)]
    way: Option<SelectionWay>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    attempts: Option<usize>,
    /// Base seed; attempt a uses seed + a.
    #[arg(long)]
    seed: Option<u64>,
    /// restricted or extended.
    #[arg(long, value_parser = parse_pool)]
    pool: Option<PoolFlavor>,
    /// Pauli string such as X0 or Z0.
    #[arg(long)]
    initial_ansatz: Option<PauliString>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for attempts.
    #[arg(long)]
    jobs: Option<usize>,
}

fn parse_way(s: &str) -> Result<SelectionWay, String> {
    let n: u8 = s.parse().map_err(|_| format!("expected 1 or 2, got `{s}`"))?;
    SelectionWay::try_from(n).map_err(|e| e.to_string())
}

fn parse_pool(s: &str) -> Result<PoolFlavor, String> {
    match s {
        "restricted" => Ok(PoolFlavor::Restricted),
        "extended" => Ok(PoolFlavor::Extended),
        _ => Err(format!("expected restricted or extended, got `{s}`")),
    }
}

fn execute(cli: Cli) -> vqkan::Result<()> {
    match cli.command {
        Command::Run(args) => {
            let mut config = match &args.config {
                Some(path) => RunConfig::load(path)?,
                None => RunConfig::default(),
            };
            Overrides {
                problem: args.problem,
                method: args.method,
                way: args.way,
                epochs: args.epochs,
                trials: args.trials,
                attempts: args.attempts,
                seed: args.seed,
                pool: args.pool,
                initial_ansatz: args.initial_ansatz,
                output_dir: args.out,
                jobs: args.jobs,
            }
            .apply(&mut config);
            config.validate()?;
            for w in config.warnings() {
                eprintln!("warning: {w}");
            }
            let record = run(&config)?;
            let agg = &record.aggregate;
            println!(
                "{} on {}: test-distance sum mean {:.4}, median {:.4}, min {:.4} (attempt {})",
                config.method,
                config.problem,
                agg.test_sum.mean,
                agg.test_sum.median,
                agg.test_sum.min,
                agg.best_attempt
            );
            if let Some(acc) = agg.mean_accuracy {
                println!("mean sign accuracy {acc:.3}");
            }
            if config.method == Method::Adaptive {
                println!(
                    "mean parametric gates {:.2}; attempts without growth {}/{}",
                    agg.mean_parametric_gates,
                    agg.attempts_without_growth,
                    record.attempts.len()
                );
            }
            println!("artifacts in {}", config.output_dir.display());
        }
        Command::Compare { a, b } => {
            let report = compare(&RunRecord::load(&a)?, &RunRecord::load(&b)?)?;
            print!("{report}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

//! The experiment runner: repeated seeded attempts, CSV/JSON artifacts, and a
//! side-by-side comparison of two runs.
//!
//! ```bash
//! cargo run --release --example run_and_compare
//! ```

use vqkan::experiment::{compare, run, Method, RunConfig};
use vqkan::problems::{FittingTarget, ProblemKind};

fn main() -> vqkan::Result<()> {
    let out = std::env::temp_dir().join("vqkan_run_and_compare");
    let base = RunConfig {
        problem: ProblemKind::Fitting {
            target: FittingTarget::ExpSin,
        },
        epochs: 4,
        trials: 200,
        attempts: 3,
        ..RunConfig::default()
    };
    println!("config:\n{}", base.to_toml());

    let adaptive = run(&RunConfig {
        output_dir: out.join("adaptive"),
        ..base.clone()
    })?;
    let qnn = run(&RunConfig {
        method: Method::Qnn,
        output_dir: out.join("qnn"),
        ..base
    })?;

    for a in &adaptive.attempts {
        println!(
            "adaptive attempt {} (seed {}): {} terms {:?}, test sum {:.4}",
            a.attempt, a.seed, a.num_parametric_gates, a.operators, a.final_test.sum
        );
    }
    print!("{}", compare(&qnn, &adaptive)?);
    println!("artifacts under {}", out.display());
    Ok(())
}

//! Adaptive growth on the function-fitting benchmark: one operator per epoch,
//! chosen from the pool by smallest loss (way 2) or largest gradient (way 1).
//!
//! ```bash
//! cargo run --release --example adaptive_fitting -- 1
//! ```

use vqkan::problems::{FittingTarget, ModelInputs, Problem, ProblemKind};
use vqkan::vqkan::{run_adaptive, AdaptiveConfig, SelectionWay, VqkanModel};
use vqkan::{OperatorPool, PoolFlavor};

fn main() -> vqkan::Result<()> {
    let way = match std::env::args().nth(1).as_deref() {
        Some("1") => SelectionWay::Gradient,
        _ => SelectionWay::Loss,
    };
    let problem = Problem::new(
        ProblemKind::Fitting {
            target: FittingTarget::ExpSin,
        },
        7,
    );
    let data = problem.make_dataset()?;
    let plan = problem.loss_plan(&data.train, ModelInputs::Vqkan)?;
    let test = problem.test_set(&data.test, ModelInputs::Vqkan)?;

    let mut model = VqkanModel::new(
        problem.num_qubits(),
        1,
        problem.input_dim(),
        problem.hamiltonian(),
        problem.encoding(),
    )?;
    let pool = OperatorPool::generate(problem.num_qubits(), PoolFlavor::Restricted)?;
    let config = AdaptiveConfig {
        way,
        epochs: 6,
        trials: 300,
        initial_ansatz: Some(problem.default_initial_ansatz()),
        ..AdaptiveConfig::default()
    };

    let run = run_adaptive(&mut model, &pool, &plan, &test, &config)?;
    println!("{:>5} {:>10} {:>12} {:>12} {:>10}", "epoch", "operator", "loss before", "loss after", "test sum");
    for e in &run.epochs {
        println!(
            "{:>5} {:>10} {:>12.5} {:>12.5} {:>10.4}",
            e.epoch,
            e.chosen_operator.as_deref().unwrap_or("-"),
            e.loss_before,
            e.loss_after,
            e.test_distance_sum
        );
    }
    let ops: Vec<String> = model.operators().iter().map(|p| p.to_string()).collect();
    println!("final ansatz: {}", ops.join(" "));
    Ok(())
}

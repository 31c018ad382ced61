//! Physics-informed fitting of the heat equation: the loss combines the data
//! term with a finite-difference residual of u_t = u_xx, five model
//! evaluations per sample.
//!
//! ```bash
//! cargo run --release --example heat_equation
//! ```

use std::f64::consts::PI;

use vqkan::problems::{heat_exact, heat_loss, ModelInputs, Problem, ProblemKind, HEAT_DELTA};
use vqkan::vqkan::{run_adaptive, sample_weights, AdaptiveConfig, VqkanModel};
use vqkan::{OperatorPool, PoolFlavor};

fn main() -> vqkan::Result<()> {
    println!("series u(pi/2, 0) = {:.5}, u(pi/2, 1) = {:.5}", heat_exact(PI / 2.0, 0.0)?, heat_exact(PI / 2.0, 1.0)?);

    let problem = Problem::new(ProblemKind::Heat, 1);
    let data = problem.make_dataset()?;
    let samples: Vec<([f64; 2], f64)> = data.train.iter().map(|s| ([s.raw[0], s.raw[1]], s.target)).collect();
    let weights = sample_weights(samples.len());

    // The exact solution has a tiny residual, so it scores near zero.
    let exact = heat_loss(heat_exact, &samples, &weights, HEAT_DELTA)?;
    println!("loss of the series itself: {exact:.2e}");

    let plan = problem.loss_plan(&data.train, ModelInputs::Vqkan)?;
    let test = problem.test_set(&data.test, ModelInputs::Vqkan)?;
    let mut model = VqkanModel::new(4, 1, 2, problem.hamiltonian(), problem.encoding())?;
    let pool = OperatorPool::generate(4, PoolFlavor::Restricted)?;
    let config = AdaptiveConfig {
        epochs: 4,
        trials: 300,
        initial_ansatz: Some(problem.default_initial_ansatz()),
        ..AdaptiveConfig::default()
    };
    let run = run_adaptive(&mut model, &pool, &plan, &test, &config)?;
    for e in &run.epochs {
        println!(
            "epoch {} {:>6}: loss {:.4} -> {:.4}, test sum {:.4}",
            e.epoch,
            e.chosen_operator.as_deref().unwrap_or("-"),
            e.loss_before,
            e.loss_after,
            e.test_distance_sum
        );
    }
    let direct = heat_loss(
        |x, t| model.predict(&problem.unit_input(&[x, t])?),
        &samples,
        &weights,
        HEAT_DELTA,
    )?;
    println!("trained model loss recomputed from raw coordinates: {direct:.4}");
    Ok(())
}

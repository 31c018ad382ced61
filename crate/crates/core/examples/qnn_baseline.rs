//! The fixed-structure data re-uploading QNN trained on the classification
//! benchmark.
//!
//! ```bash
//! cargo run --release --example qnn_baseline
//! ```

use vqkan::optimizer::ObjectiveBudget;
use vqkan::problems::{evaluate_test, ModelInputs, Problem, ProblemKind};
use vqkan::qnn::{qnn_forward, qnn_train, QnnModel};

fn main() -> vqkan::Result<()> {
    let problem = Problem::new(ProblemKind::Classification, 3);
    let data = problem.make_dataset()?;
    let plan = problem.loss_plan(&data.train, ModelInputs::Qnn)?;
    let test = problem.test_set(&data.test, ModelInputs::Qnn)?;

    let model = QnnModel::random(3, problem.qnn_angle_scale());
    let trained = qnn_train(&model, &plan, &ObjectiveBudget::new(1000))?;
    println!(
        "training loss {:.4} -> {:.4} in {} evaluations",
        trained.loss_before, trained.loss_after, trained.evals
    );

    let report = evaluate_test(|x| qnn_forward(&trained.model, x), &test)?;
    println!(
        "test distances: sum {:.4}, mean {:.4}, median {:.4}",
        report.sum, report.mean, report.median
    );
    if let Some(acc) = problem.accuracy(&data.test, &report.per_point) {
        println!("sign accuracy {acc:.3}");
    }
    Ok(())
}

//! Derivative-free minimisation with a fixed evaluation budget.
//!
//! ```bash
//! cargo run --release --example cobyla
//! ```

use vqkan::optimizer::{cobyla_minimize, ObjectiveBudget};

fn main() -> vqkan::Result<()> {
    let rosenbrock = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
    for budget in [10, 100, 1000, 5000] {
        let r = cobyla_minimize(rosenbrock, &[-1.2, 1.0], &ObjectiveBudget::new(budget))?;
        println!(
            "budget {budget:>5}: f = {:.3e} at ({:.5}, {:.5}) after {} evaluations",
            r.f, r.x[0], r.x[1], r.evals
        );
    }
    Ok(())
}

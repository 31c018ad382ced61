//! Clamped cubic B-spline basis, the SiLU-plus-spline activation, and
//! refinement to a larger basis.
//!
//! ```bash
//! cargo run --example spline_activation
//! ```

use vqkan::spline::{activation_eval, refine};
use vqkan::{ActivationCoefficients, SplineGrid};

fn main() -> vqkan::Result<()> {
    let grid = SplineGrid::new(8, SplineGrid::splines_for_epoch(0))?;
    println!("{} basis functions, {} knots", grid.num_basis(), grid.knots().len());

    let local = grid.local_basis(0.3)?;
    println!(
        "x = 0.3: nonzero basis {}..{} with values {:?} (sum {:.3})",
        local.first,
        local.first + 3,
        local.values,
        local.values.iter().sum::<f64>()
    );

    let values = (0..grid.num_basis()).map(|k| 0.05 * (k as f64 * 0.2).sin()).collect();
    let coeffs = ActivationCoefficients::from_values(&grid, values)?;
    let (fine_grid, fine) = refine(&grid, &coeffs, SplineGrid::splines_for_epoch(1))?;

    println!("{:>6} {:>12} {:>12}", "x", "coarse", "refined");
    for i in 0..=5 {
        let x = i as f64 / 5.0;
        println!(
            "{x:>6.2} {:>12.6} {:>12.6}",
            activation_eval(&grid, &coeffs, x)?,
            activation_eval(&fine_grid, &fine, x)?
        );
    }
    Ok(())
}

//! A two-layer VQKAN: every ansatz term turns its layer input into a gate
//! angle, and qubit Z readouts feed the next layer.
//!
//! ```bash
//! cargo run --example vqkan_forward
//! ```

use vqkan::vqkan::{angle_phi, VqkanModel};
use vqkan::{Encoding, Hamiltonian};

fn main() -> vqkan::Result<()> {
    let mut model = VqkanModel::new(4, 2, 2, Hamiltonian::zz_pairs(), Encoding::SqrtAcos)?;
    model.push_term(0, "X0".parse()?)?;
    model.push_term(0, "Y1*Z2".parse()?)?;
    model.push_term(1, "X2*X3".parse()?)?;

    let params: Vec<f64> = (0..model.num_parameters()).map(|k| 0.01 * ((k % 7) as f64 - 3.0)).collect();
    model.set_parameters(&params)?;
    println!("{} terms, {} spline coefficients", model.num_terms(), model.num_parameters());

    let x = [0.25, 0.8];
    let out = model.forward(&x)?;
    for (n, input) in out.layer_inputs.iter().enumerate() {
        let angles: Vec<String> = model.layers()[n]
            .iter()
            .map(|t| angle_phi(t, model.grid(), input).map(|a| format!("{}: {a:.4}", t.operator())))
            .collect::<vqkan::Result<_>>()?;
        println!("layer {n} input {input:.4?} angles [{}]", angles.join(", "));
    }
    println!("prediction <H> = {:.6}", out.value);
    Ok(())
}

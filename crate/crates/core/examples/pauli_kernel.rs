//! Pauli-string exponentials on a statevector: the CNOT-ladder circuit and
//! the matrix-free kernel give the same state.
//!
//! ```bash
//! cargo run --example pauli_kernel
//! ```

use vqkan::pauli::{apply_pauli_exponential, pauli_exponential_circuit};
use vqkan::qsim::prepare_input_state;
use vqkan::{Encoding, Hamiltonian, PauliString};

fn main() -> vqkan::Result<()> {
    let p: PauliString = "X0*Y1*Z3".parse()?;
    let theta = 0.37;

    let start = prepare_input_state(&[0.2, 0.7, 0.5, 0.9], 4, Encoding::SqrtAcos)?;
    println!("<Z0> after encoding x0 = 0.2: {:.6} (2x - 1 = -0.6)", start.expectation_z(0)?);

    let gates = pauli_exponential_circuit(&p, theta);
    println!("exp(-i {theta} {p}) compiles to {} gates", gates.len());
    let mut by_circuit = start.clone();
    by_circuit.apply_all(&gates)?;

    let mut by_kernel = start;
    apply_pauli_exponential(&mut by_kernel, &p, theta)?;

    let gap = by_circuit
        .amplitudes()
        .iter()
        .zip(by_kernel.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    println!("max amplitude difference circuit vs kernel: {gap:.2e}");

    let h = Hamiltonian::zz_pairs();
    println!("<Z0Z1 + Z2Z3> = {:.6}", by_kernel.expectation_hamiltonian(&h)?);
    Ok(())
}

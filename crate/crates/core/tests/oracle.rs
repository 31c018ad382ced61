mod common;

use common::*;
use rand::Rng;
use vqkan::pauli::{apply_pauli_exponential, pauli_exponential_circuit};
use vqkan::qnn::{qnn_forward, QnnModel};
use vqkan::qsim::prepare_input_state;
use vqkan::{Encoding, Gate, Hamiltonian, StateVector};

fn to_state(v: &CVec) -> StateVector {
    StateVector::from_amplitudes(v.iter().copied().collect()).unwrap()
}

fn max_diff(s: &StateVector, v: &CVec) -> f64 {
    s.amplitudes().iter().zip(v.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

#[test]
fn gates_match_dense_matrices() {
    let mut r = rng(11);
    for _ in 0..100 {
        let n = r.random_range(2..=4);
        let q = r.random_range(0..n);
        let mut t = r.random_range(0..n);
        while t == q {
            t = r.random_range(0..n);
        }
        let angle = (r.random::<f64>() - 0.5) * 8.0;
        let gate = match r.random_range(0..6) {
            0 => Gate::RotX { qubit: q, angle },
            1 => Gate::RotY { qubit: q, angle },
            2 => Gate::RotZ { qubit: q, angle },
            3 => Gate::Hadamard { qubit: q },
            4 => Gate::ControlledNot { control: q, target: t },
            _ => Gate::ControlledZ { control: q, target: t },
        };
        let psi = random_state(&mut r, n);
        let mut s = to_state(&psi);
        s.apply(&gate).unwrap();
        assert!(max_diff(&s, &(gate_matrix(&gate, n) * &psi)) < 1e-12, "{gate:?}");
    }
}

#[test]
fn pauli_exponential_three_ways() {
    let mut r = rng(12);
    for _ in 0..200 {
        let n = r.random_range(1..=4);
        let p = random_pauli(&mut r, n);
        let theta = (r.random::<f64>() - 0.5) * 12.0;
        let psi = random_state(&mut r, n);
        let dense = expm(&(pauli_matrix(&p, n) * c(0.0, -theta))) * &psi;
        let mut a = to_state(&psi);
        a.apply_all(&pauli_exponential_circuit(&p, theta)).unwrap();
        let mut b = to_state(&psi);
        apply_pauli_exponential(&mut b, &p, theta).unwrap();
        assert!(max_diff(&a, &dense) < 1e-10, "{p} circuit");
        assert!(max_diff(&b, &dense) < 1e-10, "{p} kernel");
    }
}

#[test]
fn expectations_match_dense() {
    let mut r = rng(13);
    for _ in 0..50 {
        let n = r.random_range(2..=4);
        let h = Hamiltonian::new(vec![(0.7, random_pauli(&mut r, n)), (-1.3, random_pauli(&mut r, n))]).unwrap();
        let psi = random_state(&mut r, n);
        let got = to_state(&psi).expectation_hamiltonian(&h).unwrap();
        assert!((got - expectation(&psi, &hamiltonian_matrix(&h, n))).abs() < 1e-12);
    }
}

#[test]
fn input_encoding_matches_dense() {
    let mut r = rng(14);
    for enc in [Encoding::SqrtAcos, Encoding::Acos] {
        let x = random_input(&mut r, 3);
        let s = prepare_input_state(&x, 4, enc).unwrap();
        let mut v = zero_vector(4);
        for q in 0..4 {
            v = gate_matrix(&Gate::RotY { qubit: q, angle: encoding_angle(enc, x[q % 3]) }, 4) * v;
        }
        assert!(max_diff(&s, &v) < 1e-12);
    }
}

#[test]
fn vqkan_forward_matches_dense() {
    let mut r = rng(15);
    for i in 0..50 {
        let model = random_model(&mut r, 2, 2, 1 + i % 2, 0.4);
        let x = random_input(&mut r, 2);
        let got = model.predict(&x).unwrap();
        assert!((got - dense_vqkan(&model, &x)).abs() < 1e-10, "model {i}");
    }
}

#[test]
fn vqkan_three_qubit_forward_matches_dense() {
    let mut r = rng(16);
    for _ in 0..10 {
        let model = random_model(&mut r, 3, 2, 2, 0.3);
        let x = random_input(&mut r, 2);
        assert!((model.predict(&x).unwrap() - dense_vqkan(&model, &x)).abs() < 1e-10);
    }
}

#[test]
fn qnn_forward_matches_dense() {
    let mut r = rng(17);
    for _ in 0..10 {
        let thetas: Vec<f64> = (0..8).map(|_| r.random::<f64>() * 6.0).collect();
        let h = Hamiltonian::new(vec![(1.0, "Z0*Z1".parse().unwrap())]).unwrap();
        let m = QnnModel::new(2, 2, thetas, 2.0, h).unwrap();
        let x = vec![r.random::<f64>() * 2.0 - 1.0];
        assert!((qnn_forward(&m, &x).unwrap() - dense_qnn(&m, &x)).abs() < 1e-12);
    }
    let m = QnnModel::random(3, 2.0);
    let x = [0.3, -0.5, 0.9, 0.1];
    assert!((qnn_forward(&m, &x).unwrap() - dense_qnn(&m, &x)).abs() < 1e-12);
}

#[test]
fn controlled_z_is_symmetric() {
    let a = gate_matrix(&Gate::ControlledZ { control: 0, target: 2 }, 3);
    let mut r = rng(18);
    let psi = random_state(&mut r, 3);
    let mut s = to_state(&psi);
    s.apply(&Gate::ControlledZ { control: 2, target: 0 }).unwrap();
    assert!(max_diff(&s, &(a * &psi)) < 1e-14);
}

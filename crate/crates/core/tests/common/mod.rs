//! Dense-matrix reference implementations used as test oracles.
//!
//! Nothing here calls the crate's simulation kernels: operators are built as
//! explicit `2^n x 2^n` matrices from Kronecker products, exponentials come
//! from a Taylor series with scaling and squaring, and spline activations are
//! evaluated with the single-function Cox-de Boor recursion.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vqkan::problems::LossPlan;
use vqkan::qnn::QnnModel;
use vqkan::qsim::Gate;
use vqkan::vqkan::{sample_weights, VqkanModel};
use vqkan::{Axis, Encoding, Hamiltonian, OperatorPool, PauliString, PoolFlavor, SplineGrid};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn single(axis: Option<Axis>) -> CMat {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    let v = match axis {
        None => [l, o, o, l],
        Some(Axis::X) => [o, l, l, o],
        Some(Axis::Y) => [o, -i, i, o],
        Some(Axis::Z) => [l, o, o, -l],
    };
    CMat::from_row_slice(2, 2, &v)
}

/// `ops[0]` acts on qubit 0, the least significant bit of the basis index.
pub fn kron_qubits(ops: &[CMat]) -> CMat {
    let mut out = CMat::from_element(1, 1, c(1.0, 0.0));
    for op in ops {
        out = op.kronecker(&out);
    }
    out
}

pub fn pauli_matrix(p: &PauliString, n: usize) -> CMat {
    let ops: Vec<CMat> = (0..n)
        .map(|q| single(p.factors().iter().find(|(fq, _)| *fq == q).map(|(_, a)| *a)))
        .collect();
    kron_qubits(&ops)
}

pub fn hamiltonian_matrix(h: &Hamiltonian, n: usize) -> CMat {
    let dim = 1 << n;
    let mut out = CMat::zeros(dim, dim);
    for (w, p) in h.terms() {
        out += pauli_matrix(p, n) * c(*w, 0.0);
    }
    out
}

/// `exp(A)` by a Taylor series after scaling `A` below unit norm.
pub fn expm(a: &CMat) -> CMat {
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = a * c(scale, 0.0);
    let dim = a.nrows();
    let mut term = CMat::identity(dim, dim);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &a * c(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn rotation(axis: Axis, angle: f64) -> CMat {
    let generator = single(Some(axis)) * c(0.0, -angle / 2.0);
    expm(&generator)
}

/// Full-register matrix of a gate, built from its textbook definition.
pub fn gate_matrix(gate: &Gate, n: usize) -> CMat {
    let dim = 1 << n;
    let embed = |q: usize, m: CMat| {
        let ops: Vec<CMat> = (0..n).map(|k| if k == q { m.clone() } else { single(None) }).collect();
        kron_qubits(&ops)
    };
    match *gate {
        Gate::RotX { qubit, angle } => embed(qubit, rotation(Axis::X, angle)),
        Gate::RotY { qubit, angle } => embed(qubit, rotation(Axis::Y, angle)),
        Gate::RotZ { qubit, angle } => embed(qubit, rotation(Axis::Z, angle)),
        Gate::Identity { .. } => CMat::identity(dim, dim),
        Gate::Hadamard { qubit } => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            embed(qubit, CMat::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]))
        }
        Gate::ControlledNot { control, target } => {
            let mut m = CMat::zeros(dim, dim);
            for b in 0..dim {
                let out = if b >> control & 1 == 1 { b ^ (1 << target) } else { b };
                m[(out, b)] = c(1.0, 0.0);
            }
            m
        }
        Gate::ControlledZ { control, target } => {
            let mut m = CMat::zeros(dim, dim);
            for b in 0..dim {
                let both = (b >> control & 1) == 1 && (b >> target & 1) == 1;
                m[(b, b)] = c(if both { -1.0 } else { 1.0 }, 0.0);
            }
            m
        }
    }
}

pub fn zero_vector(n: usize) -> CVec {
    let mut v = CVec::zeros(1 << n);
    v[0] = c(1.0, 0.0);
    v
}

pub fn random_state(r: &mut ChaCha8Rng, n: usize) -> CVec {
    let v = CVec::from_fn(1 << n, |_, _| c(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5));
    let norm = v.norm();
    v / c(norm, 0.0)
}

pub fn expectation(state: &CVec, op: &CMat) -> f64 {
    (state.adjoint() * op * state)[(0, 0)].re
}

pub fn random_pauli(r: &mut ChaCha8Rng, n: usize) -> PauliString {
    loop {
        let factors: Vec<(usize, Axis)> = (0..n)
            .filter_map(|q| match r.random_range(0..4) {
                0 => None,
                a => Some((q, Axis::ALL[a - 1])),
            })
            .collect();
        if !factors.is_empty() {
            return PauliString::new(factors).unwrap();
        }
    }
}

fn silu(x: f64) -> f64 {
    x / (1.0 + (-x).exp())
}

/// Activation through the single-function basis recursion.
pub fn activation(grid: &SplineGrid, coeffs: &[f64], x: f64) -> f64 {
    let spline: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(k, ck)| ck * grid.basis_eval(k, x).unwrap())
        .sum();
    silu(x) + spline
}

pub fn encoding_angle(encoding: Encoding, x: f64) -> f64 {
    match encoding {
        Encoding::SqrtAcos => 2.0 * x.sqrt().acos(),
        Encoding::Acos => 2.0 * x.acos(),
    }
}

/// The whole VQKAN forward pass with dense matrices.
pub fn dense_vqkan(model: &VqkanModel, input: &[f64]) -> f64 {
    let n = model.num_qubits();
    let grid = model.grid();
    let mut state = zero_vector(n);
    for q in 0..n {
        let angle = encoding_angle(model.encoding(), input[q % input.len()]);
        state = gate_matrix(&Gate::RotY { qubit: q, angle }, n) * state;
    }
    let mut x = input.to_vec();
    for (layer_index, layer) in model.layers().iter().enumerate() {
        if layer_index > 0 {
            x = model
                .readout_qubits()
                .iter()
                .map(|&q| {
                    let z = expectation(&state, &pauli_matrix(&PauliString::single(q, Axis::Z), n));
                    (0.5 * (z + 1.0)).clamp(0.0, 1.0)
                })
                .collect();
        }
        for term in layer {
            let coeffs = term.coefficients().values();
            let phi: f64 = x
                .iter()
                .map(|&xi| 2.0 * activation(grid, coeffs, xi).clamp(-1.0, 1.0).acos())
                .sum();
            let u = expm(&(pauli_matrix(term.operator(), n) * c(0.0, phi)));
            state = u * state;
        }
    }
    expectation(&state, &hamiltonian_matrix(model.hamiltonian(), n))
}

pub fn dense_qnn(model: &QnnModel, x: &[f64]) -> f64 {
    let n = model.num_qubits();
    let mut state = zero_vector(n);
    for gate in model.circuit(x).unwrap() {
        state = gate_matrix(&gate, n) * state;
    }
    expectation(&state, &hamiltonian_matrix(model.hamiltonian(), n))
}

/// Random model on `n` qubits with `d`-dimensional input, 1-3 terms per
/// layer and coefficients in `[-scale, scale]`.
pub fn random_model(r: &mut ChaCha8Rng, n: usize, d: usize, layers: usize, scale: f64) -> VqkanModel {
    let h = Hamiltonian::new(vec![
        (1.0, "Z0*Z1".parse().unwrap()),
        (0.5 - r.random::<f64>(), random_pauli(r, n)),
    ])
    .unwrap();
    let encoding = if r.random::<bool>() {
        Encoding::SqrtAcos
    } else {
        Encoding::Acos
    };
    let mut m = VqkanModel::new(n, layers, d, h, encoding).unwrap();
    for layer in 0..layers {
        for _ in 0..r.random_range(1..=3) {
            m.push_term(layer, random_pauli(r, n)).unwrap();
        }
    }
    let params: Vec<f64> = (0..m.num_parameters())
        .map(|_| scale * (2.0 * r.random::<f64>() - 1.0))
        .collect();
    m.set_parameters(&params).unwrap();
    m
}

pub fn random_input(r: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| r.random::<f64>()).collect()
}

pub fn selection_fixture(seed: u64) -> (VqkanModel, OperatorPool, LossPlan) {
    let mut r = rng(100 + seed);
    let model = random_model(&mut r, 2, 2, 1, 0.3);
    let pool = OperatorPool::generate(2, PoolFlavor::Restricted).unwrap();
    let inputs: Vec<Vec<f64>> = (0..5).map(|_| random_input(&mut r, 2)).collect();
    let targets: Vec<f64> = (0..5).map(|_| 2.0 * r.random::<f64>() - 1.0).collect();
    let plan = LossPlan::absolute(inputs, targets, sample_weights(5)).unwrap();
    (model, pool, plan)
}

pub fn brute_loss(model: &VqkanModel, plan: &LossPlan) -> f64 {
    plan.evaluate(|x| model.predict(x)).unwrap()
}

/// Largest central-difference gradient magnitude over every coefficient of
/// each appended candidate.
pub fn brute_gradients(model: &VqkanModel, pool: &OperatorPool, plan: &LossPlan, h: f64) -> Vec<f64> {
    pool
        .members()
        .iter()
        .map(|p| {
            let mut m = model.clone();
            m.append_term(p.clone()).unwrap();
            let base = m.parameters();
            let offset = base.len() - m.grid().num_basis();
            (offset..base.len())
                .map(|k| {
                    let mut plus = base.clone();
                    plus[k] += h;
                    let mut minus = base.clone();
                    minus[k] -= h;
                    m.set_parameters(&plus).unwrap();
                    let up = brute_loss(&m, plan);
                    m.set_parameters(&minus).unwrap();
                    let down = brute_loss(&m, plan);
                    ((up - down) / (2.0 * h)).abs()
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

pub fn brute_way1(model: &VqkanModel, pool: &OperatorPool, plan: &LossPlan) -> usize {
    let scores = brute_gradients(model, pool, plan, 1e-6);
    (0..scores.len()).fold(0, |best, i| if scores[i] > scores[best] { i } else { best })
}

pub fn brute_losses(model: &VqkanModel, pool: &OperatorPool, plan: &LossPlan) -> Vec<f64> {
    pool
        .members()
        .iter()
        .map(|p| {
            let mut m = model.clone();
            m.append_term(p.clone()).unwrap();
            brute_loss(&m, plan)
        })
        .collect()
}

pub fn brute_way2(model: &VqkanModel, pool: &OperatorPool, plan: &LossPlan) -> Option<usize> {
    let current = brute_loss(model, plan);
    let losses = brute_losses(model, pool, plan);
    let best = (0..losses.len()).fold(0, |b, i| if losses[i] < losses[b] { i } else { b });
    (losses[best] < current).then_some(best)
}

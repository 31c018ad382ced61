//! Data re-uploading QNN baseline.
//!
//! Each layer is `Ry(θ)` on every qubit, a CZ chain, `Rx(scale·x_j)` on
//! every qubit, `Ry(θ)` again and a second CZ chain. Qubit `j` reads input
//! component `j mod dim`. The output is `⟨H⟩` with `H = Z0Z1 + Z2Z3` by
//! default.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::optimizer::{cobyla_minimize, CobylaResult, ObjectiveBudget};
use crate::pauli::{expectation_compiled, Hamiltonian};
use crate::problems::{LossPlan, TestSet};
use crate::qsim::{Gate, StateVector, MAX_QUBITS};

pub const NUM_QUBITS: usize = 4;
pub const NUM_LAYERS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct QnnModel {
    num_qubits: usize,
    num_layers: usize,
    thetas: Vec<f64>,
    angle_scale: f64,
    hamiltonian: Hamiltonian,
}

impl QnnModel {
    /// `thetas` holds `2·num_qubits` angles per layer: the first `Ry` block,
    /// then the second.
    pub fn new(
        num_qubits: usize,
        num_layers: usize,
        thetas: Vec<f64>,
        angle_scale: f64,
        hamiltonian: Hamiltonian,
    ) -> Result<Self> {
        if !(2..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::QubitCount(num_qubits));
        }
        if num_layers == 0 {
            return Err(Error::Config("a QNN needs at least one layer".into()));
        }
        let expected = 2 * num_qubits * num_layers;
        if thetas.len() != expected {
            return Err(Error::Length {
                expected,
                actual: thetas.len(),
            });
        }
        if hamiltonian.max_qubit() >= num_qubits {
            return Err(Error::QubitIndex {
                index: hamiltonian.max_qubit(),
                num_qubits,
            });
        }
        Ok(Self {
            num_qubits,
            num_layers,
            thetas,
            angle_scale,
            hamiltonian,
        })
    }

    /// The 4-qubit, 3-layer baseline with angles drawn uniformly from
    /// `[0, 2π)`.
    pub fn random(seed: u64, angle_scale: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let thetas = (0..2 * NUM_QUBITS * NUM_LAYERS)
            .map(|_| rng.random::<f64>() * TAU)
            .collect();
        Self::new(NUM_QUBITS, NUM_LAYERS, thetas, angle_scale, Hamiltonian::zz_pairs())
            .expect("baseline shape is valid")
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_layers(&self) -> usize {
        self.num_layers
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn set_thetas(&mut self, thetas: &[f64]) -> Result<()> {
        if thetas.len() != self.thetas.len() {
            return Err(Error::Length {
                expected: self.thetas.len(),
                actual: thetas.len(),
            });
        }
        self.thetas.copy_from_slice(thetas);
        Ok(())
    }

    pub fn angle_scale(&self) -> f64 {
        self.angle_scale
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    /// Gate sequence for input `x`.
    pub fn circuit(&self, x: &[f64]) -> Result<Vec<Gate>> {
        if x.is_empty() {
            return Err(Error::Empty("input vector"));
        }
        let nq = self.num_qubits;
        let mut gates = Vec::with_capacity(self.num_layers * (4 * nq + 2 * (nq - 1)));
        let cz_chain = |gates: &mut Vec<Gate>| {
            for q in 0..nq - 1 {
                gates.push(Gate::ControlledZ {
                    control: q,
                    target: q + 1,
                });
            }
        };
        for layer in self.thetas.chunks_exact(2 * nq) {
            let (first, second) = layer.split_at(nq);
            for (qubit, &angle) in first.iter().enumerate() {
                gates.push(Gate::RotY { qubit, angle });
            }
            cz_chain(&mut gates);
            for qubit in 0..nq {
                let angle = self.angle_scale * x[qubit % x.len()];
                gates.push(Gate::RotX { qubit, angle });
            }
            for (qubit, &angle) in second.iter().enumerate() {
                gates.push(Gate::RotY { qubit, angle });
            }
            cz_chain(&mut gates);
        }
        Ok(gates)
    }
}

pub fn qnn_forward(model: &QnnModel, x: &[f64]) -> Result<f64> {
    let mut state = StateVector::zero(model.num_qubits)?;
    state.apply_all(&model.circuit(x)?)?;
    state.expectation_hamiltonian(&model.hamiltonian)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QnnTraining {
    pub model: QnnModel,
    pub loss_before: f64,
    pub loss_after: f64,
    pub evals: usize,
    /// Best loss so far after each objective evaluation.
    pub history: Vec<f64>,
}

/// COBYLA over the rotation angles, starting from the model's current ones.
pub fn qnn_train(model: &QnnModel, plan: &LossPlan, budget: &ObjectiveBudget) -> Result<QnnTraining> {
    let compiled = model.hamiltonian.compiled();
    let mut working = model.clone();
    let mut preds = Vec::with_capacity(plan.points().len());
    let mut failure = None;
    let result: CobylaResult = cobyla_minimize(
        |thetas| {
            working.thetas.copy_from_slice(thetas);
            preds.clear();
            for x in plan.points() {
                let value = StateVector::zero(working.num_qubits).and_then(|mut s| {
                    s.apply_all(&working.circuit(x)?)?;
                    Ok(expectation_compiled(&compiled, s.amplitudes()))
                });
                match value {
                    Ok(v) => preds.push(v),
                    Err(e) => {
                        failure.get_or_insert(e);
                        return f64::NAN;
                    }
                }
            }
            plan.combine(&preds)
        },
        &model.thetas,
        budget,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let mut trained = model.clone();
    trained.thetas = result.x.clone();
    Ok(QnnTraining {
        model: trained,
        loss_before: result.history[0],
        loss_after: result.f,
        evals: result.evals,
        history: result.best_so_far(),
    })
}

/// `|prediction − target|` on each test point.
pub fn qnn_test_distances(model: &QnnModel, test: &TestSet) -> Result<Vec<f64>> {
    test.inputs()
        .iter()
        .zip(test.targets())
        .map(|(x, y)| Ok((qnn_forward(model, x)? - y).abs()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vqkan::sample_weights;

    fn zero_model() -> QnnModel {
        QnnModel::new(4, 3, vec![0.0; 24], 2.0, Hamiltonian::zz_pairs()).unwrap()
    }

    #[test]
    fn trivial_circuit_outputs_two() {
        assert_eq!(qnn_forward(&zero_model(), &[0.0; 4]).unwrap(), 2.0);
    }

    #[test]
    fn shape_checks() {
        assert!(QnnModel::new(4, 3, vec![0.0; 23], 2.0, Hamiltonian::zz_pairs()).is_err());
        let m = QnnModel::random(5, 2.0);
        assert_eq!(m.thetas().len(), 24);
        assert!(m.thetas().iter().all(|t| (0.0..TAU).contains(t)));
        assert_eq!(m, QnnModel::random(5, 2.0));
        let gates = m.circuit(&[0.1, 0.2]).unwrap();
        assert_eq!(gates.len(), 3 * (12 + 6));
        assert!(matches!(gates[7], Gate::RotX { qubit: 0, angle } if (angle - 0.2).abs() < 1e-15));
        assert!(matches!(gates[8], Gate::RotX { qubit: 1, angle } if (angle - 0.4).abs() < 1e-15));
        assert!(matches!(gates[9], Gate::RotX { qubit: 2, angle } if (angle - 0.2).abs() < 1e-15));
    }

    #[test]
    fn budget_one_returns_initial_model() {
        let m = QnnModel::random(1, 2.0);
        let plan = LossPlan::absolute(vec![vec![0.1, 0.2, 0.3, 0.4]], vec![1.0], vec![1.0]).unwrap();
        let t = qnn_train(&m, &plan, &ObjectiveBudget::new(1)).unwrap();
        assert_eq!(t.model, m);
        assert_eq!(t.evals, 1);
    }

    #[test]
    fn training_reduces_loss() {
        let m = QnnModel::random(2, 2.0);
        let inputs: Vec<Vec<f64>> = (0..4).map(|i| vec![0.2 * i as f64 - 0.3; 4]).collect();
        let targets = vec![0.5, -0.2, 1.0, 0.0];
        let plan = LossPlan::absolute(inputs, targets, sample_weights(4)).unwrap();
        let t = qnn_train(&m, &plan, &ObjectiveBudget::new(300)).unwrap();
        assert!(t.loss_after < t.loss_before);
        assert!(t.history.windows(2).all(|w| w[1] <= w[0]));
        let direct = plan.evaluate(|x| qnn_forward(&t.model, x)).unwrap();
        assert!((direct - t.loss_after).abs() < 1e-12);
    }
}

//! The variational quantum KAN: spline-driven Pauli exponentials, layered
//! re-encoding through `⟨Z⟩` readouts, and adaptive operator growth.
//!
//! A term with operator `P` and coefficients `c` acts on a layer input `x`
//! as `exp(iPφ)` with
//!
//! ```text
//! φ = Σ_i 2·acos(clamp(silu(x_i) + Σ_k c_k B_k(x_i), -1, 1))
//! ```
//!
//! The next layer sees `x_i = (⟨Z_{r_i}⟩ + 1) / 2` for the readout qubits
//! `r_i`; the state itself is carried on unchanged.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{cobyla_minimize, ObjectiveBudget};
use crate::pauli::{expectation_compiled, Hamiltonian, OperatorPool, PauliMasks, PauliString};
use crate::problems::{LossPlan, TestSet};
use crate::qsim::{check_unit_interval, product_ry_state, Encoding, StateVector, MAX_QUBITS};
use crate::spline::{activation_eval, silu, ActivationCoefficients, LocalBasis, Refiner, SplineGrid};

/// Number of grid copies `N_g`.
pub const NUM_GRID: usize = 8;
/// Finite-difference step used to score candidates under way 1.
pub const GRADIENT_STEP: f64 = 1e-6;
/// Training stops once the loss reaches this value.
pub const CONVERGENCE_LOSS: f64 = 1e-16;

#[derive(Debug, Clone)]
pub struct AnsatzTerm {
    operator: PauliString,
    masks: PauliMasks,
    coeffs: ActivationCoefficients,
}

impl AnsatzTerm {
    /// A term with all coefficients zero.
    pub fn new(operator: PauliString, grid: &SplineGrid) -> Self {
        let coeffs = ActivationCoefficients::zeros(grid);
        Self::with_coefficients(operator, coeffs)
    }

    pub fn with_coefficients(operator: PauliString, coeffs: ActivationCoefficients) -> Self {
        Self {
            masks: operator.masks(),
            operator,
            coeffs,
        }
    }

    pub fn operator(&self) -> &PauliString {
        &self.operator
    }

    pub fn coefficients(&self) -> &ActivationCoefficients {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut ActivationCoefficients {
        &mut self.coeffs
    }
}

/// `Σ_i 2·acos(clamp(act(x_i), -1, 1))` for one term.
pub fn angle_phi(term: &AnsatzTerm, grid: &SplineGrid, layer_input: &[f64]) -> Result<f64> {
    let mut phi = 0.0;
    for &x in layer_input {
        phi += 2.0 * activation_eval(grid, &term.coeffs, x)?.clamp(-1.0, 1.0).acos();
    }
    Ok(phi)
}

/// Per-component data that does not depend on the coefficients.
#[derive(Debug, Clone, Copy)]
struct Feature {
    silu: f64,
    basis: LocalBasis,
}

fn features(grid: &SplineGrid, x: &[f64]) -> Vec<Feature> {
    x.iter()
        .map(|&v| Feature {
            silu: silu(v),
            basis: grid.local_basis_unchecked(v),
        })
        .collect()
}

fn phi_from_features(coeffs: &ActivationCoefficients, feats: &[Feature]) -> f64 {
    feats
        .iter()
        .map(|f| 2.0 * (f.silu + coeffs.spline_part(&f.basis)).clamp(-1.0, 1.0).acos())
        .sum()
}

fn z_expectation(amps: &[Complex64], qubit: usize) -> f64 {
    let bit = 1usize << qubit;
    amps.iter()
        .enumerate()
        .map(|(i, a)| if i & bit == 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum()
}

/// A model input with its encoded state and first-layer features cached.
#[derive(Debug, Clone)]
pub(crate) struct Prepared {
    state: Vec<Complex64>,
    first: Vec<Feature>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    pub value: f64,
    /// Input of every layer; the first entry is the model input.
    pub layer_inputs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct VqkanModel {
    num_qubits: usize,
    layers: Vec<Vec<AnsatzTerm>>,
    hamiltonian: Hamiltonian,
    compiled: Vec<(f64, PauliMasks)>,
    input_dim: usize,
    grid: SplineGrid,
    encoding: Encoding,
    readout: Vec<usize>,
}

impl VqkanModel {
    /// Empty model with `N_g = 8`, `N_s = 8` and readout qubits `0..input_dim`.
    pub fn new(
        num_qubits: usize,
        num_layers: usize,
        input_dim: usize,
        hamiltonian: Hamiltonian,
        encoding: Encoding,
    ) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::QubitCount(num_qubits));
        }
        if num_layers == 0 {
            return Err(Error::Config("a model needs at least one layer".into()));
        }
        if input_dim == 0 {
            return Err(Error::Config("input dimension must be positive".into()));
        }
        if hamiltonian.max_qubit() >= num_qubits {
            return Err(Error::QubitIndex {
                index: hamiltonian.max_qubit(),
                num_qubits,
            });
        }
        let grid = SplineGrid::new(NUM_GRID, SplineGrid::splines_for_epoch(0))?;
        let mut model = Self {
            num_qubits,
            layers: vec![Vec::new(); num_layers],
            compiled: hamiltonian.compiled(),
            hamiltonian,
            input_dim,
            grid,
            encoding,
            readout: Vec::new(),
        };
        model.set_readout_qubits((0..input_dim).map(|q| q % num_qubits).collect())?;
        Ok(model)
    }

    pub fn set_readout_qubits(&mut self, qubits: Vec<usize>) -> Result<()> {
        if qubits.len() != self.input_dim {
            return Err(Error::Length {
                expected: self.input_dim,
                actual: qubits.len(),
            });
        }
        if let Some(&q) = qubits.iter().find(|&&q| q >= self.num_qubits) {
            return Err(Error::QubitIndex {
                index: q,
                num_qubits: self.num_qubits,
            });
        }
        self.readout = qubits;
        Ok(())
    }

    /// Replaces the spline grid; only allowed before any term exists.
    pub fn set_grid(&mut self, grid: SplineGrid) -> Result<()> {
        if self.num_terms() > 0 {
            return Err(Error::Config("cannot swap the grid of a model with terms; use refine".into()));
        }
        self.grid = grid;
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<AnsatzTerm>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Vec<AnsatzTerm>] {
        &mut self.layers
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn grid(&self) -> &SplineGrid {
        &self.grid
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn readout_qubits(&self) -> &[usize] {
        &self.readout
    }

    pub fn num_terms(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Operators of every term, layer by layer.
    pub fn operators(&self) -> Vec<&PauliString> {
        self.layers.iter().flatten().map(|t| &t.operator).collect()
    }

    /// Appends a zero-coefficient term to `layer`.
    pub fn push_term(&mut self, layer: usize, operator: PauliString) -> Result<()> {
        if layer >= self.layers.len() {
            return Err(Error::Config(format!(
                "layer {layer} out of range for a {}-layer model",
                self.layers.len()
            )));
        }
        if operator.max_qubit() >= self.num_qubits {
            return Err(Error::QubitIndex {
                index: operator.max_qubit(),
                num_qubits: self.num_qubits,
            });
        }
        let term = AnsatzTerm::new(operator, &self.grid);
        self.layers[layer].push(term);
        Ok(())
    }

    /// Appends a zero-coefficient term at the end of the last layer.
    pub fn append_term(&mut self, operator: PauliString) -> Result<()> {
        self.push_term(self.layers.len() - 1, operator)
    }

    pub fn num_parameters(&self) -> usize {
        self.num_terms() * self.grid.num_basis()
    }

    /// All coefficients, layer by layer, term by term, in flat `s·N_s + l`
    /// order within a term.
    pub fn parameters(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flatten()
            .flat_map(|t| t.coeffs.values().iter().copied())
            .collect()
    }

    pub fn set_parameters(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.num_parameters() {
            return Err(Error::Length {
                expected: self.num_parameters(),
                actual: values.len(),
            });
        }
        let per = self.grid.num_basis();
        for (term, chunk) in self.layers.iter_mut().flatten().zip(values.chunks_exact(per)) {
            term.coeffs.values_mut().copy_from_slice(chunk);
        }
        Ok(())
    }

    /// Moves every term onto a grid with `num_splines` splines per copy.
    pub fn refine(&mut self, num_splines: usize) -> Result<()> {
        let refiner = Refiner::new(&self.grid, num_splines)?;
        for term in self.layers.iter_mut().flatten() {
            term.coeffs = refiner.transfer(&term.coeffs)?;
        }
        self.grid = refiner.grid().clone();
        Ok(())
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_dim {
            return Err(Error::Length {
                expected: self.input_dim,
                actual: input.len(),
            });
        }
        check_unit_interval(input)
    }

    pub(crate) fn prepare(&self, input: &[f64]) -> Result<Prepared> {
        self.check_input(input)?;
        let state = product_ry_state(input, self.num_qubits, self.encoding);
        Ok(Prepared {
            state: state.amplitudes().to_vec(),
            first: features(&self.grid, input),
        })
    }

    fn readout_input(&self, amps: &[Complex64]) -> Vec<f64> {
        self.readout
            .iter()
            .map(|&q| (0.5 * (z_expectation(amps, q) + 1.0)).clamp(0.0, 1.0))
            .collect()
    }

    /// Runs every layer on `amps`, which must start as `prep.state`.
    /// Returns the features of the last layer's input when that layer is not
    /// the first.
    fn evolve(&self, prep: &Prepared, amps: &mut [Complex64]) -> Option<Vec<Feature>> {
        let mut later: Option<Vec<Feature>> = None;
        for (n, layer) in self.layers.iter().enumerate() {
            if n > 0 {
                later = Some(features(&self.grid, &self.readout_input(amps)));
            }
            let feats = later.as_deref().unwrap_or(&prep.first);
            for term in layer {
                let phi = phi_from_features(&term.coeffs, feats);
                term.masks.apply_exponential(amps, -phi);
            }
        }
        later
    }

    pub(crate) fn predict_prepared(&self, prep: &Prepared, scratch: &mut Vec<Complex64>) -> f64 {
        scratch.clear();
        scratch.extend_from_slice(&prep.state);
        self.evolve(prep, scratch);
        expectation_compiled(&self.compiled, scratch)
    }

    /// Output `⟨H⟩` and the input of every layer.
    pub fn forward(&self, input: &[f64]) -> Result<Forward> {
        self.check_input(input)?;
        let mut state = product_ry_state(input, self.num_qubits, self.encoding);
        let mut layer_inputs = vec![input.to_vec()];
        for (n, layer) in self.layers.iter().enumerate() {
            if n > 0 {
                let next = self.readout_input(state.amplitudes());
                layer_inputs.push(next);
            }
            let x = &layer_inputs[n];
            for term in layer {
                let phi = angle_phi(term, &self.grid, x)?;
                term.masks.apply_exponential(state.amplitudes_mut(), -phi);
            }
        }
        Ok(Forward {
            value: expectation_compiled(&self.compiled, state.amplitudes()),
            layer_inputs,
        })
    }

    pub fn predict(&self, input: &[f64]) -> Result<f64> {
        Ok(self.forward(input)?.value)
    }

    pub fn final_state(&self, input: &[f64]) -> Result<StateVector> {
        let prep = self.prepare(input)?;
        let mut amps = prep.state.clone();
        self.evolve(&prep, &mut amps);
        StateVector::from_amplitudes(amps)
    }

    /// `Σ_m a_m·|f(x_m) − y_m|`.
    pub fn loss(&self, samples: &[(Vec<f64>, f64)], weights: &[f64]) -> Result<f64> {
        if samples.is_empty() {
            return Err(Error::Empty("sample set"));
        }
        if weights.len() != samples.len() {
            return Err(Error::Length {
                expected: samples.len(),
                actual: weights.len(),
            });
        }
        let mut total = 0.0;
        for ((x, y), a) in samples.iter().zip(weights) {
            total += a * (self.predict(x)? - y).abs();
        }
        Ok(total)
    }

    /// Loss of `plan` through the cached fast path.
    pub fn plan_loss(&self, plan: &LossPlan) -> Result<f64> {
        let prepared = self.prepare_all(plan.points())?;
        Ok(self.loss_prepared(plan, &prepared, &mut Vec::new(), &mut Vec::new()))
    }

    pub(crate) fn prepare_all(&self, points: &[Vec<f64>]) -> Result<Vec<Prepared>> {
        points.iter().map(|x| self.prepare(x)).collect()
    }

    fn loss_prepared(
        &self,
        plan: &LossPlan,
        prepared: &[Prepared],
        preds: &mut Vec<f64>,
        scratch: &mut Vec<Complex64>,
    ) -> f64 {
        preds.clear();
        for p in prepared {
            preds.push(self.predict_prepared(p, scratch));
        }
        plan.combine(preds)
    }

    pub fn evaluate(&self, test: &TestSet) -> Result<Vec<f64>> {
        let mut scratch = Vec::new();
        test.inputs()
            .iter()
            .zip(test.targets())
            .map(|(x, y)| Ok((self.predict_prepared(&self.prepare(x)?, &mut scratch) - y).abs()))
            .collect()
    }
}

/// `a_m = (N − m) / N`.
pub fn sample_weights(n: usize) -> Vec<f64> {
    (0..n).map(|m| (n - m) as f64 / n as f64).collect()
}

/// Final states and last-layer features of the current model on every plan
/// point. Candidates are appended at the very end, so they act on these
/// states directly.
struct SelectionCache {
    finals: Vec<Vec<Complex64>>,
    feats: Vec<Vec<Feature>>,
}

impl SelectionCache {
    fn build(model: &VqkanModel, plan: &LossPlan) -> Result<Self> {
        let mut finals = Vec::with_capacity(plan.points().len());
        let mut feats = Vec::with_capacity(plan.points().len());
        for x in plan.points() {
            let prep = model.prepare(x)?;
            let mut amps = prep.state.clone();
            let last = model.evolve(&prep, &mut amps);
            finals.push(amps);
            feats.push(last.unwrap_or(prep.first));
        }
        Ok(Self { finals, feats })
    }

    /// Plan loss with `masks` appended; `angle(m)` gives the angle at point `m`.
    fn loss_with(&self, model: &VqkanModel, plan: &LossPlan, masks: &PauliMasks, angle: impl Fn(usize) -> f64) -> f64 {
        let mut scratch = Vec::new();
        let preds: Vec<f64> = self
            .finals
            .iter()
            .enumerate()
            .map(|(m, state)| {
                scratch.clear();
                scratch.extend_from_slice(state);
                masks.apply_exponential(&mut scratch, -angle(m));
                expectation_compiled(&model.compiled, &scratch)
            })
            .collect();
        plan.combine(&preds)
    }

    fn zero_angles(&self) -> Vec<f64> {
        self.feats
            .iter()
            .map(|fs| fs.iter().map(|f| 2.0 * f.silu.clamp(-1.0, 1.0).acos()).sum())
            .collect()
    }

    fn candidate_loss(&self, model: &VqkanModel, plan: &LossPlan, candidate: &PauliString) -> f64 {
        let zero = self.zero_angles();
        self.loss_with(model, plan, &candidate.masks(), |m| zero[m])
    }

    /// Largest `|∂L/∂c_k|` of the appended zero-coefficient term.
    fn candidate_gradient(&self, model: &VqkanModel, plan: &LossPlan, candidate: &PauliString) -> f64 {
        let masks = candidate.masks();
        let num_basis = model.grid.num_basis();
        let mut touched = vec![false; num_basis];
        for f in self.feats.iter().flatten() {
            for (i, b) in f.basis.values.iter().enumerate() {
                if *b != 0.0 {
                    touched[f.basis.first + i] = true;
                }
            }
        }
        // Coefficients whose basis vanishes at every input cannot move the loss.
        let mut best = 0.0f64;
        for k in (0..num_basis).filter(|&k| touched[k]) {
            let angle = |m: usize, c: f64| -> f64 {
                self.feats[m]
                    .iter()
                    .map(|f| {
                        let b = k
                            .checked_sub(f.basis.first)
                            .and_then(|i| f.basis.values.get(i))
                            .copied()
                            .unwrap_or(0.0);
                        2.0 * (f.silu + c * b).clamp(-1.0, 1.0).acos()
                    })
                    .sum()
            };
            let up = self.loss_with(model, plan, &masks, |m| angle(m, GRADIENT_STEP));
            let down = self.loss_with(model, plan, &masks, |m| angle(m, -GRADIENT_STEP));
            let g = ((up - down) / (2.0 * GRADIENT_STEP)).abs();
            if g > best {
                best = g;
            }
        }
        best
    }
}

/// Score of appending `candidate`: the largest finite-difference gradient
/// component of the loss with respect to the new term's coefficients.
pub fn candidate_gradient(model: &VqkanModel, candidate: &PauliString, plan: &LossPlan) -> Result<f64> {
    check_candidate(model, candidate)?;
    let cache = SelectionCache::build(model, plan)?;
    Ok(cache.candidate_gradient(model, plan, candidate))
}

/// Loss after appending `candidate` with zero coefficients.
pub fn candidate_loss(model: &VqkanModel, candidate: &PauliString, plan: &LossPlan) -> Result<f64> {
    check_candidate(model, candidate)?;
    let cache = SelectionCache::build(model, plan)?;
    Ok(cache.candidate_loss(model, plan, candidate))
}

fn check_candidate(model: &VqkanModel, candidate: &PauliString) -> Result<()> {
    if candidate.max_qubit() >= model.num_qubits {
        return Err(Error::QubitIndex {
            index: candidate.max_qubit(),
            num_qubits: model.num_qubits,
        });
    }
    Ok(())
}

fn check_pool(model: &VqkanModel, pool: &OperatorPool) -> Result<()> {
    if pool.is_empty() {
        return Err(Error::PoolSize(0));
    }
    pool.members().iter().try_for_each(|p| check_candidate(model, p))
}

/// Way-1 scores of every pool member, in pool order.
pub fn pool_gradients(model: &VqkanModel, pool: &OperatorPool, plan: &LossPlan) -> Result<Vec<f64>> {
    check_pool(model, pool)?;
    let cache = SelectionCache::build(model, plan)?;
    Ok(pool
        .members()
        .par_iter()
        .map(|p| cache.candidate_gradient(model, plan, p))
        .collect())
}

/// Way-2 scores of every pool member, in pool order.
pub fn pool_losses(model: &VqkanModel, pool: &OperatorPool, plan: &LossPlan) -> Result<Vec<f64>> {
    check_pool(model, pool)?;
    let cache = SelectionCache::build(model, plan)?;
    Ok(pool
        .members()
        .par_iter()
        .map(|p| cache.candidate_loss(model, plan, p))
        .collect())
}

/// Appends the member with the largest gradient score; ties keep the
/// earliest member.
pub fn grow_way1(model: &mut VqkanModel, pool: &OperatorPool, plan: &LossPlan) -> Result<PauliString> {
    let scores = pool_gradients(model, pool, plan)?;
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    let chosen = pool.members()[best].clone();
    model.append_term(chosen.clone())?;
    Ok(chosen)
}

/// Appends the member giving the smallest loss, unless no member beats the
/// current loss. Ties keep the earliest member.
pub fn grow_way2(model: &mut VqkanModel, pool: &OperatorPool, plan: &LossPlan) -> Result<Option<PauliString>> {
    let current = model.plan_loss(plan)?;
    let scores = pool_losses(model, pool, plan)?;
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s < scores[best] {
            best = i;
        }
    }
    if current <= scores[best] {
        return Ok(None);
    }
    let chosen = pool.members()[best].clone();
    model.append_term(chosen.clone())?;
    Ok(Some(chosen))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum SelectionWay {
    /// Largest gradient magnitude of the appended term.
    Gradient,
    /// Smallest loss with the appended term.
    Loss,
}

impl TryFrom<u8> for SelectionWay {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Self::Gradient),
            2 => Ok(Self::Loss),
            other => Err(Error::Config(format!("selection way must be 1 or 2, got {other}"))),
        }
    }
}

impl From<SelectionWay> for u8 {
    fn from(w: SelectionWay) -> u8 {
        match w {
            SelectionWay::Gradient => 1,
            SelectionWay::Loss => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveConfig {
    pub way: SelectionWay,
    pub epochs: usize,
    /// Objective evaluations per epoch.
    pub trials: usize,
    /// Placed in every layer at epoch 0. `None` selects from the pool instead.
    pub initial_ansatz: Option<PauliString>,
    pub initial_step: f64,
    pub final_step: f64,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        let budget = ObjectiveBudget::default();
        Self {
            way: SelectionWay::Loss,
            epochs: 25,
            trials: budget.max_evals,
            initial_ansatz: None,
            initial_step: budget.initial_step,
            final_step: budget.final_step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub chosen_operator: Option<String>,
    pub loss_before: f64,
    pub loss_after: f64,
    pub num_terms: usize,
    pub num_parameters: usize,
    pub test_distance_sum: f64,
    pub test_distances: Vec<f64>,
    pub num_objective_evals: usize,
    /// Best loss so far after each objective evaluation of this epoch.
    #[serde(skip)]
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveRun {
    pub epochs: Vec<EpochRecord>,
    pub converged: bool,
}

/// The adaptive loop: refine, grow, optimise, record.
///
/// The optimiser sees the coefficients newest term first, so that when the
/// budget is smaller than the parameter count the evaluations go to the
/// terms added most recently.
pub fn run_adaptive(
    model: &mut VqkanModel,
    pool: &OperatorPool,
    plan: &LossPlan,
    test: &TestSet,
    config: &AdaptiveConfig,
) -> Result<AdaptiveRun> {
    if config.epochs == 0 || config.trials == 0 {
        return Err(Error::Config("epochs and trials must be positive".into()));
    }
    check_pool(model, pool)?;
    if let Some(p) = &config.initial_ansatz {
        check_candidate(model, p)?;
    }
    let budget = ObjectiveBudget {
        max_evals: config.trials,
        initial_step: config.initial_step,
        final_step: config.final_step,
    };

    let mut epochs = Vec::with_capacity(config.epochs);
    let mut converged = false;
    for epoch in 0..config.epochs {
        let target_splines = SplineGrid::splines_for_epoch(epoch);
        if model.grid.num_splines() < target_splines {
            model.refine(target_splines)?;
        }

        let chosen = match (epoch, &config.initial_ansatz) {
            (0, Some(p)) => {
                for layer in 0..model.num_layers() {
                    model.push_term(layer, p.clone())?;
                }
                Some(p.clone())
            }
            _ => match config.way {
                SelectionWay::Gradient => Some(grow_way1(model, pool, plan)?),
                SelectionWay::Loss => grow_way2(model, pool, plan)?,
            },
        };

        let prepared = model.prepare_all(plan.points())?;
        let order = newest_first_order(model);
        let natural = model.parameters();
        let x0: Vec<f64> = order.iter().map(|&i| natural[i]).collect();
        let mut working = model.clone();
        let mut params = natural.clone();
        let mut preds = Vec::with_capacity(prepared.len());
        let mut scratch = Vec::new();
        let result = cobyla_minimize(
            |x| {
                for (&i, &v) in order.iter().zip(x) {
                    params[i] = v;
                }
                working
                    .set_parameters(&params)
                    .expect("parameter count is fixed within an epoch");
                working.loss_prepared(plan, &prepared, &mut preds, &mut scratch)
            },
            &x0,
            &budget,
        )?;
        let mut best = natural;
        for (&i, &v) in order.iter().zip(&result.x) {
            best[i] = v;
        }
        model.set_parameters(&best)?;

        let test_distances = model.evaluate(test)?;
        let record = EpochRecord {
            epoch,
            chosen_operator: chosen.map(|p| p.to_string()),
            loss_before: result.history[0],
            loss_after: result.f,
            num_terms: model.num_terms(),
            num_parameters: model.num_parameters(),
            test_distance_sum: test_distances.iter().sum(),
            test_distances,
            num_objective_evals: result.evals,
            trace: result.best_so_far(),
        };
        epochs.push(record);
        if result.f <= CONVERGENCE_LOSS {
            converged = true;
            break;
        }
    }
    Ok(AdaptiveRun { epochs, converged })
}

/// Indices into [`VqkanModel::parameters`] listing the last term first.
fn newest_first_order(model: &VqkanModel) -> Vec<usize> {
    let per = model.grid.num_basis();
    (0..model.num_terms())
        .rev()
        .flat_map(|t| t * per..(t + 1) * per)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Axis, PoolFlavor};

    fn toy(num_qubits: usize, input_dim: usize) -> VqkanModel {
        let h = Hamiltonian::new(vec![(1.0, "Z0*Z1".parse().unwrap())]).unwrap();
        VqkanModel::new(num_qubits, 1, input_dim, h, Encoding::SqrtAcos).unwrap()
    }

    #[test]
    fn angle_examples() {
        let grid = SplineGrid::new(NUM_GRID, 8).unwrap();
        let term = AnsatzTerm::new(PauliString::single(0, Axis::X), &grid);
        let phi = angle_phi(&term, &grid, &[0.0; 4]).unwrap();
        assert!((phi - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        let phi = angle_phi(&term, &grid, &[0.25]).unwrap();
        let expect = 2.0 * (0.25 / ((-0.25f64).exp() + 1.0)).acos();
        assert!((phi - expect).abs() < 1e-12);
        assert!((phi - 2.85957).abs() < 1e-5);

        let mut big = term.clone();
        big.coefficients_mut().values_mut().iter_mut().for_each(|c| *c = 5.0);
        assert_eq!(angle_phi(&big, &grid, &[0.5]).unwrap(), 0.0);
    }

    #[test]
    fn forward_basics() {
        let h = Hamiltonian::zz_pairs();
        let mut m = VqkanModel::new(4, 1, 4, h, Encoding::SqrtAcos).unwrap();
        assert_eq!(m.predict(&[1.0; 4]).unwrap(), 2.0);
        m.append_term(PauliString::single(0, Axis::Z)).unwrap();
        assert!((m.predict(&[1.0; 4]).unwrap() - 2.0).abs() < 1e-12);
        let f = m.forward(&[1.0; 4]).unwrap();
        assert_eq!(f.layer_inputs, vec![vec![1.0; 4]]);
    }

    #[test]
    fn fast_path_matches_forward() {
        let h = Hamiltonian::zz_pairs();
        let mut m = VqkanModel::new(4, 2, 4, h, Encoding::SqrtAcos).unwrap();
        m.push_term(0, "X0".parse().unwrap()).unwrap();
        m.push_term(0, "Y1*Z3".parse().unwrap()).unwrap();
        m.push_term(1, "X2*X3".parse().unwrap()).unwrap();
        let params: Vec<f64> = (0..m.num_parameters()).map(|i| ((i * 7) % 11) as f64 * 0.03 - 0.15).collect();
        m.set_parameters(&params).unwrap();
        let x = [0.1, 0.7, 0.35, 0.9];
        let prep = m.prepare(&x).unwrap();
        let fast = m.predict_prepared(&prep, &mut Vec::new());
        let f = m.forward(&x).unwrap();
        assert!((fast - f.value).abs() < 1e-14);
        assert_eq!(f.layer_inputs.len(), 2);
        assert!(f.layer_inputs[1].iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(m.forward(&x).unwrap(), f);
    }

    #[test]
    fn parameter_round_trip_and_errors() {
        let mut m = toy(2, 2);
        m.append_term("X0".parse().unwrap()).unwrap();
        m.append_term("Z0*Y1".parse().unwrap()).unwrap();
        assert_eq!(m.num_parameters(), 2 * 64);
        let p: Vec<f64> = (0..128).map(|i| i as f64).collect();
        m.set_parameters(&p).unwrap();
        assert_eq!(m.parameters(), p);
        assert!(m.set_parameters(&p[1..]).is_err());
        assert!(m.append_term("X2".parse().unwrap()).is_err());
        assert!(m.predict(&[0.5]).is_err());
        assert!(m.predict(&[0.5, 1.5]).is_err());
        assert_eq!(newest_first_order(&m)[0], 64);
    }

    #[test]
    fn loss_examples() {
        assert_eq!(
            sample_weights(10),
            vec![1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1]
        );
        let m = toy(2, 2);
        // Empty model on x = 1 sits in |00⟩, output 1.
        let samples = vec![(vec![1.0, 1.0], 1.0)];
        assert_eq!(m.loss(&samples, &[1.0]).unwrap(), 0.0);
        let samples = vec![(vec![1.0, 1.0], 1.5)];
        assert!((m.loss(&samples, &[1.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(m.loss(&[], &[]).is_err());
    }

    #[test]
    fn refine_keeps_zero_model() {
        let mut m = toy(2, 2);
        m.append_term("X0*X1".parse().unwrap()).unwrap();
        let before = m.predict(&[0.3, 0.6]).unwrap();
        m.refine(12).unwrap();
        assert_eq!(m.grid().num_splines(), 12);
        assert_eq!(m.num_parameters(), 8 * 12);
        assert!((m.predict(&[0.3, 0.6]).unwrap() - before).abs() < 1e-12);
    }

    #[test]
    fn diagonal_candidate_has_zero_gradient() {
        // Z-type terms on a diagonal-only Hamiltonian cannot change ⟨H⟩.
        let m = toy(2, 2);
        let plan = LossPlan::absolute(
            vec![vec![0.2, 0.9], vec![0.6, 0.4]],
            vec![0.3, -0.2],
            sample_weights(2),
        )
        .unwrap();
        let g = candidate_gradient(&m, &"Z0".parse().unwrap(), &plan).unwrap();
        assert!(g.abs() < 1e-8);
        let g = candidate_gradient(&m, &"X0".parse().unwrap(), &plan).unwrap();
        assert!(g > 1e-3);
    }

    #[test]
    fn way2_refuses_worsening_pool() {
        // Every sample already sits at its target with the empty model.
        let m0 = toy(2, 2);
        let inputs = vec![vec![0.3, 0.8], vec![0.9, 0.1]];
        let targets: Vec<f64> = inputs.iter().map(|x| m0.predict(x).unwrap()).collect();
        let plan = LossPlan::absolute(inputs, targets, sample_weights(2)).unwrap();
        let pool = OperatorPool::generate(2, PoolFlavor::Restricted).unwrap();
        let mut m = m0.clone();
        assert_eq!(grow_way2(&mut m, &pool, &plan).unwrap(), None);
        assert_eq!(m.num_terms(), 0);
    }

    #[test]
    fn single_member_pool_is_chosen() {
        let mut m = toy(2, 2);
        let plan = LossPlan::absolute(vec![vec![0.5, 0.5]], vec![-1.0], vec![1.0]).unwrap();
        let pool = OperatorPool::from_members(vec!["Y1".parse().unwrap()], PoolFlavor::Restricted).unwrap();
        assert_eq!(grow_way1(&mut m, &pool, &plan).unwrap().to_string(), "Y1");
        assert_eq!(m.num_terms(), 1);
    }

    #[test]
    fn adaptive_converges_on_reachable_targets() {
        // Targets produced by the empty model give zero loss immediately.
        let mut m = toy(2, 2);
        let inputs = vec![vec![0.3, 0.8], vec![0.9, 0.1]];
        let targets: Vec<f64> = inputs.iter().map(|x| m.predict(x).unwrap()).collect();
        let plan = LossPlan::absolute(inputs.clone(), targets.clone(), sample_weights(2)).unwrap();
        let test = TestSet::new(inputs, targets).unwrap();
        let pool = OperatorPool::generate(2, PoolFlavor::Restricted).unwrap();
        let config = AdaptiveConfig {
            epochs: 5,
            trials: 20,
            ..AdaptiveConfig::default()
        };
        let run = run_adaptive(&mut m, &pool, &plan, &test, &config).unwrap();
        assert!(run.converged);
        assert_eq!(run.epochs.len(), 1);
        assert_eq!(run.epochs[0].chosen_operator, None);
    }

    #[test]
    fn adaptive_records_are_consistent() {
        let mut m = toy(2, 2);
        let inputs = vec![vec![0.3, 0.8], vec![0.9, 0.1], vec![0.5, 0.5]];
        let plan = LossPlan::absolute(inputs.clone(), vec![0.2, -0.4, 0.1], sample_weights(3)).unwrap();
        let test = TestSet::new(inputs, vec![0.2, -0.4, 0.1]).unwrap();
        let pool = OperatorPool::generate(2, PoolFlavor::Restricted).unwrap();
        let config = AdaptiveConfig {
            epochs: 3,
            trials: 40,
            initial_ansatz: Some("X0".parse().unwrap()),
            ..AdaptiveConfig::default()
        };
        let run = run_adaptive(&mut m, &pool, &plan, &test, &config).unwrap();
        assert_eq!(run.epochs[0].chosen_operator.as_deref(), Some("X0"));
        for (e, r) in run.epochs.iter().enumerate() {
            assert_eq!(r.epoch, e);
            assert!(r.loss_after <= r.loss_before + 1e-12);
            assert!(r.num_objective_evals <= 40);
            assert_eq!(r.num_parameters, r.num_terms * 8 * SplineGrid::splines_for_epoch(e));
            assert!((r.test_distance_sum - r.test_distances.iter().sum::<f64>()).abs() < 1e-12);
        }
        let final_loss = m.plan_loss(&plan).unwrap();
        assert_eq!(final_loss, run.epochs.last().unwrap().loss_after);
    }
}

//! Benchmark problems: function fitting, binary classification and the 1-D
//! heat equation.
//!
//! Every problem has a raw coordinate space (where targets are defined) and
//! two maps out of it: a unit-cube input for the VQKAN model and angle
//! coordinates for the QNN baseline.
//!
//! | problem        | raw                     | VQKAN input         | QNN `Rx` angle |
//! |----------------|-------------------------|---------------------|----------------|
//! | fitting        | `x ∈ [-1,1]^4`          | `u = (x + 1) / 2`   | `2x`           |
//! | classification | `x = 2√u − 1`, `u ∈ [0,1]^2` | `u`            | `2x`           |
//! | heat           | `x ∈ [0,π]`, `t ∈ [0,1]` | `(x/π, t)`         | `2u − 1`       |
//!
//! The exponential fitting target uses `x_0 = 1 − 2u_0`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Axis, Hamiltonian, PauliString};
use crate::qsim::Encoding;
use crate::vqkan::sample_weights;

pub const TRAIN_COUNT: usize = 10;
pub const TEST_COUNT: usize = 50;
/// Number of series terms in [`heat_exact`].
pub const HEAT_TERMS: usize = 10;
/// Step of the finite differences in the heat loss.
pub const HEAT_DELTA: f64 = 1e-4;
/// Upper end of the sampled time interval.
pub const HEAT_T_MAX: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FittingTarget {
    /// `exp(sin(x0² + x1²) + sin(x2² + x3²))`
    ExpSin,
    /// `exp((x1 − x2)² / (2x0))`
    Exponential,
    /// `log(x0 / x1)`
    Logarithm,
    /// `1 / (1 + x0·x1)`
    Fraction,
    /// `√(Σ x_i²)`
    SphereRadius,
}

impl FittingTarget {
    pub const ALL: [FittingTarget; 5] = [
        Self::ExpSin,
        Self::Exponential,
        Self::Logarithm,
        Self::Fraction,
        Self::SphereRadius,
    ];

    fn name(self) -> &'static str {
        match self {
            Self::ExpSin => "exp-sin",
            Self::Exponential => "exponential",
            Self::Logarithm => "logarithm",
            Self::Fraction => "fraction",
            Self::SphereRadius => "sphere-radius",
        }
    }

    /// Target value; non-finite where the function is singular.
    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            Self::ExpSin => ((x[0] * x[0] + x[1] * x[1]).sin() + (x[2] * x[2] + x[3] * x[3]).sin()).exp(),
            Self::Exponential => {
                if x[0] == 0.0 {
                    f64::NAN
                } else {
                    ((x[1] - x[2]).powi(2) / (2.0 * x[0])).exp()
                }
            }
            Self::Logarithm => {
                let ratio = x[0] / x[1];
                if ratio > 0.0 {
                    ratio.ln()
                } else {
                    f64::NAN
                }
            }
            Self::Fraction => 1.0 / (1.0 + x[0] * x[1]),
            Self::SphereRadius => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }
}

impl fmt::Display for FittingTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FittingTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown fitting target `{s}`")))
    }
}

pub fn fitting_target(target: FittingTarget, x: &[f64]) -> f64 {
    target.eval(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProblemKind {
    Fitting {
        #[serde(default = "default_target")]
        target: FittingTarget,
    },
    Classification,
    Heat,
}

fn default_target() -> FittingTarget {
    FittingTarget::ExpSin
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fitting { target } => write!(f, "fitting:{target}"),
            Self::Classification => f.write_str("classification"),
            Self::Heat => f.write_str("heat"),
        }
    }
}

/// Accepts `fitting`, `fitting:<target>`, `classification` and `heat`.
impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("fitting", target)) => Ok(Self::Fitting {
                target: target.parse()?,
            }),
            None if s == "fitting" => Ok(Self::Fitting {
                target: FittingTarget::ExpSin,
            }),
            None if s == "classification" => Ok(Self::Classification),
            None if s == "heat" => Ok(Self::Heat),
            _ => Err(Error::Config(format!("unknown problem `{s}`"))),
        }
    }
}

/// `exp(d0·x0 + d1) + d2·√(1 − d3·x0²) + cos(d4·x0 + d5) + sin(d6·x0 + d7)`.
pub fn classification_boundary(d: &[f64; 8], x0: f64) -> f64 {
    (d[0] * x0 + d[1]).exp()
        + d[2] * (1.0 - d[3] * x0 * x0).max(0.0).sqrt()
        + (d[4] * x0 + d[5]).cos()
        + (d[6] * x0 + d[7]).sin()
}

/// `-1` when `f(x0) ≥ x1`, else `+1`.
pub fn classification_label(d: &[f64; 8], x0: f64, x1: f64) -> f64 {
    if classification_boundary(d, x0) >= x1 {
        -1.0
    } else {
        1.0
    }
}

/// Ten-term Fourier series solving `u_t = u_xx` with `u(0,t) = u(π,t) = 0`
/// from a triangular initial profile.
pub fn heat_exact(x: f64, t: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&x) || !(t >= 0.0) {
        return Err(Error::HeatDomain { x, t });
    }
    // Odd harmonics are symmetric about π/2; folding makes x = π an exact zero.
    let y = if x > PI / 2.0 { PI - x } else { x };
    let mut sum = 0.0;
    for k in 0..HEAT_TERMS {
        let n = (2 * k + 1) as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / (n * n) * (-n * n * t).exp() * (n * y).sin();
    }
    Ok(4.0 / PI * sum)
}

/// `|u − u_exact| + |u_t − u_xx|` from the five evaluations of one sample.
fn heat_sample_terms(values: &[f64; 5], target: f64, delta: f64) -> f64 {
    let [c, xp, xm, tp, tm] = *values;
    let u_t = (tp - tm) / (2.0 * delta);
    let u_xx = (xp - 2.0 * c + xm) / (delta * delta);
    (c - target).abs() + (u_t - u_xx).abs()
}

/// Raw points `[centre, x+δ, x−δ, t+δ, t−δ]` of one heat sample.
pub fn heat_stencil(x: f64, t: f64, delta: f64) -> [[f64; 2]; 5] {
    [[x, t], [x + delta, t], [x - delta, t], [x, t + delta], [x, t - delta]]
}

/// Heat loss `Σ a_m (|u − u_exact| + |u_t − u_xx|)` for a model given in
/// raw coordinates; exactly five model calls per sample.
pub fn heat_loss(
    mut model: impl FnMut(f64, f64) -> Result<f64>,
    samples: &[([f64; 2], f64)],
    weights: &[f64],
    delta: f64,
) -> Result<f64> {
    if weights.len() != samples.len() {
        return Err(Error::Length {
            expected: samples.len(),
            actual: weights.len(),
        });
    }
    let mut total = 0.0;
    for (([x, t], target), a) in samples.iter().zip(weights) {
        let mut values = [0.0; 5];
        for (v, [px, pt]) in values.iter_mut().zip(heat_stencil(*x, *t, delta)) {
            *v = model(px, pt)?;
        }
        total += a * heat_sample_terms(&values, *target, delta);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossKind {
    /// One point per sample, `Σ a_m |f_m − y_m|`.
    Absolute,
    /// Five points per sample in [`heat_stencil`] order.
    Heat { delta: f64 },
}

/// The model inputs a loss needs and how to combine predictions there.
#[derive(Debug, Clone, PartialEq)]
pub struct LossPlan {
    points: Vec<Vec<f64>>,
    targets: Vec<f64>,
    weights: Vec<f64>,
    kind: LossKind,
}

impl LossPlan {
    pub fn absolute(points: Vec<Vec<f64>>, targets: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::checked(points, targets, weights, LossKind::Absolute, 1)
    }

    /// `points` holds five inputs per sample in [`heat_stencil`] order.
    pub fn heat(points: Vec<Vec<f64>>, targets: Vec<f64>, weights: Vec<f64>, delta: f64) -> Result<Self> {
        Self::checked(points, targets, weights, LossKind::Heat { delta }, 5)
    }

    fn checked(
        points: Vec<Vec<f64>>,
        targets: Vec<f64>,
        weights: Vec<f64>,
        kind: LossKind,
        per_sample: usize,
    ) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::Empty("sample set"));
        }
        if weights.len() != targets.len() {
            return Err(Error::Length {
                expected: targets.len(),
                actual: weights.len(),
            });
        }
        if points.len() != per_sample * targets.len() {
            return Err(Error::Length {
                expected: per_sample * targets.len(),
                actual: points.len(),
            });
        }
        Ok(Self {
            points,
            targets,
            weights,
            kind,
        })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    /// Loss from predictions at [`points`](Self::points), in order.
    pub fn combine(&self, predictions: &[f64]) -> f64 {
        match self.kind {
            LossKind::Absolute => predictions
                .iter()
                .zip(&self.targets)
                .zip(&self.weights)
                .map(|((p, y), a)| a * (p - y).abs())
                .sum(),
            LossKind::Heat { delta } => predictions
                .chunks_exact(5)
                .zip(&self.targets)
                .zip(&self.weights)
                .map(|((v, y), a)| a * heat_sample_terms(&[v[0], v[1], v[2], v[3], v[4]], *y, delta))
                .sum(),
        }
    }

    pub fn evaluate(&self, mut predict: impl FnMut(&[f64]) -> Result<f64>) -> Result<f64> {
        let preds = self.points.iter().map(|x| predict(x)).collect::<Result<Vec<_>>>()?;
        Ok(self.combine(&preds))
    }
}

/// Held-out inputs with their targets.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSet {
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl TestSet {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::Empty("test set"));
        }
        if inputs.len() != targets.len() {
            return Err(Error::Length {
                expected: inputs.len(),
                actual: targets.len(),
            });
        }
        Ok(Self { inputs, targets })
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub per_point: Vec<f64>,
    pub sum: f64,
    pub mean: f64,
    pub median: f64,
}

impl TestReport {
    pub fn from_distances(per_point: Vec<f64>) -> Result<Self> {
        if per_point.is_empty() {
            return Err(Error::Empty("test set"));
        }
        let sum: f64 = per_point.iter().sum();
        Ok(Self {
            mean: sum / per_point.len() as f64,
            median: median(&per_point),
            sum,
            per_point,
        })
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `|prediction − target|` on every test point, with sum, mean and median.
pub fn evaluate_test(mut predict: impl FnMut(&[f64]) -> Result<f64>, test: &TestSet) -> Result<TestReport> {
    let mut per_point = Vec::with_capacity(test.len());
    for (x, y) in test.inputs().iter().zip(test.targets()) {
        per_point.push((predict(x)? - y).abs());
    }
    TestReport::from_distances(per_point)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub raw: Vec<f64>,
    /// VQKAN input in the unit cube.
    pub input: Vec<f64>,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
}

/// Which model's coordinates a plan or test set is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelInputs {
    Vqkan,
    Qnn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    kind: ProblemKind,
    seed: u64,
    train_count: usize,
    test_count: usize,
    boundary: [f64; 8],
}

impl Problem {
    /// Problem with the default 10 training and 50 test points. The seed
    /// fixes the classification coefficients and the datasets.
    pub fn new(kind: ProblemKind, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut boundary = [0.0; 8];
        if kind == ProblemKind::Classification {
            boundary.iter_mut().for_each(|d| *d = rng.random::<f64>());
        }
        Self {
            kind,
            seed,
            train_count: TRAIN_COUNT,
            test_count: TEST_COUNT,
            boundary,
        }
    }

    pub fn with_counts(mut self, train: usize, test: usize) -> Self {
        self.train_count = train;
        self.test_count = test;
        self
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Classification coefficients `d_0..d_7` (zeros for other problems).
    pub fn boundary(&self) -> &[f64; 8] {
        &self.boundary
    }

    pub fn input_dim(&self) -> usize {
        match self.kind {
            ProblemKind::Fitting { .. } => 4,
            ProblemKind::Classification | ProblemKind::Heat => 2,
        }
    }

    pub fn encoding(&self) -> Encoding {
        match self.kind {
            ProblemKind::Heat => Encoding::Acos,
            _ => Encoding::SqrtAcos,
        }
    }

    pub fn hamiltonian(&self) -> Hamiltonian {
        Hamiltonian::zz_pairs()
    }

    pub fn num_qubits(&self) -> usize {
        4
    }

    /// `Z_0` for the heat equation, `X_0` otherwise.
    pub fn default_initial_ansatz(&self) -> PauliString {
        match self.kind {
            ProblemKind::Heat => PauliString::single(0, Axis::Z),
            _ => PauliString::single(0, Axis::X),
        }
    }

    /// Factor applied to QNN coordinates to form `Rx` angles.
    pub fn qnn_angle_scale(&self) -> f64 {
        match self.kind {
            ProblemKind::Heat => 1.0,
            _ => 2.0,
        }
    }

    fn raw_domain_error(&self, raw: &[f64]) -> Error {
        Error::Config(format!("raw point {raw:?} is outside the {} domain", self.kind))
    }

    /// Raw point to VQKAN unit-cube input. Heat inputs are clamped so that
    /// finite-difference neighbours of boundary samples stay valid.
    pub fn unit_input(&self, raw: &[f64]) -> Result<Vec<f64>> {
        if raw.len() != self.input_dim() {
            return Err(Error::Length {
                expected: self.input_dim(),
                actual: raw.len(),
            });
        }
        let u: Vec<f64> = match self.kind {
            ProblemKind::Fitting { target } => raw
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    if i == 0 && target == FittingTarget::Exponential {
                        (1.0 - x) / 2.0
                    } else {
                        (x + 1.0) / 2.0
                    }
                })
                .collect(),
            ProblemKind::Classification => raw.iter().map(|&x| ((x + 1.0) / 2.0).powi(2)).collect(),
            ProblemKind::Heat => vec![(raw[0] / PI).clamp(0.0, 1.0), raw[1].clamp(0.0, 1.0)],
        };
        if u.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(self.raw_domain_error(raw));
        }
        Ok(u)
    }

    /// Raw point to QNN coordinates (multiplied by
    /// [`qnn_angle_scale`](Self::qnn_angle_scale) inside the circuit).
    pub fn qnn_input(&self, raw: &[f64]) -> Result<Vec<f64>> {
        match self.kind {
            ProblemKind::Heat => Ok(self.unit_input(raw)?.iter().map(|u| 2.0 * u - 1.0).collect()),
            _ => {
                self.unit_input(raw)?;
                Ok(raw.to_vec())
            }
        }
    }

    pub fn model_input(&self, raw: &[f64], inputs: ModelInputs) -> Result<Vec<f64>> {
        match inputs {
            ModelInputs::Vqkan => self.unit_input(raw),
            ModelInputs::Qnn => self.qnn_input(raw),
        }
    }

    pub fn target(&self, raw: &[f64]) -> Result<f64> {
        match self.kind {
            ProblemKind::Fitting { target } => Ok(target.eval(raw)),
            ProblemKind::Classification => Ok(classification_label(&self.boundary, raw[0], raw[1])),
            ProblemKind::Heat => heat_exact(raw[0], raw[1]),
        }
    }

    fn draw_raw(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self.kind {
            ProblemKind::Fitting { target } => (0..4)
                .map(|i| {
                    let u: f64 = rng.random();
                    if i == 0 && target == FittingTarget::Exponential {
                        1.0 - 2.0 * u
                    } else {
                        2.0 * u - 1.0
                    }
                })
                .collect(),
            ProblemKind::Classification => (0..2).map(|_| 2.0 * rng.random::<f64>().sqrt() - 1.0).collect(),
            ProblemKind::Heat => vec![PI * rng.random::<f64>(), HEAT_T_MAX * rng.random::<f64>()],
        }
    }

    /// Seeded train and test draws. Singular fitting points are redrawn and
    /// exact repeats are rejected, keeping the two sets disjoint.
    pub fn make_dataset(&self) -> Result<Dataset> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
        let mut seen: Vec<Vec<f64>> = Vec::new();
        let mut draw = |count: usize| -> Result<Vec<Sample>> {
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let raw = self.draw_raw(&mut rng);
                let target = self.target(&raw)?;
                if !target.is_finite() || seen.contains(&raw) {
                    continue;
                }
                seen.push(raw.clone());
                out.push(Sample {
                    input: self.unit_input(&raw)?,
                    raw,
                    target,
                });
            }
            Ok(out)
        };
        let train = draw(self.train_count)?;
        let test = draw(self.test_count)?;
        Ok(Dataset { train, test })
    }

    /// Training loss for the chosen model, weighted by `a_m = (N − m)/N`.
    pub fn loss_plan(&self, train: &[Sample], inputs: ModelInputs) -> Result<LossPlan> {
        let targets: Vec<f64> = train.iter().map(|s| s.target).collect();
        let weights = sample_weights(train.len());
        match self.kind {
            ProblemKind::Heat => {
                let mut points = Vec::with_capacity(5 * train.len());
                for s in train {
                    for p in heat_stencil(s.raw[0], s.raw[1], HEAT_DELTA) {
                        points.push(self.model_input(&p, inputs)?);
                    }
                }
                LossPlan::heat(points, targets, weights, HEAT_DELTA)
            }
            _ => {
                let points = train
                    .iter()
                    .map(|s| self.model_input(&s.raw, inputs))
                    .collect::<Result<_>>()?;
                LossPlan::absolute(points, targets, weights)
            }
        }
    }

    pub fn test_set(&self, test: &[Sample], inputs: ModelInputs) -> Result<TestSet> {
        let points = test
            .iter()
            .map(|s| self.model_input(&s.raw, inputs))
            .collect::<Result<_>>()?;
        TestSet::new(points, test.iter().map(|s| s.target).collect())
    }

    /// Fraction of test points whose prediction has the label's sign
    /// (classification only).
    pub fn accuracy(&self, test: &[Sample], distances: &[f64]) -> Option<f64> {
        if self.kind != ProblemKind::Classification || test.is_empty() {
            return None;
        }
        // With labels ±1, the prediction is on the label's side of 0 exactly
        // when its distance to the label is below 1.
        let hits = distances.iter().filter(|&&d| d < 1.0).count();
        Some(hits as f64 / test.len() as f64)
    }
}

/// Writes `split,raw_0..,input_0..,target` rows.
pub fn write_dataset_csv(path: &Path, dataset: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let dim = dataset.train.first().or(dataset.test.first()).map_or(0, |s| s.raw.len());
    let mut header = vec!["split".to_string()];
    header.extend((0..dim).map(|i| format!("raw_{i}")));
    header.extend((0..dim).map(|i| format!("input_{i}")));
    header.push("target".into());
    w.write_record(&header)?;
    for (split, samples) in [("train", &dataset.train), ("test", &dataset.test)] {
        for s in samples {
            let mut row = vec![split.to_string()];
            row.extend(s.raw.iter().map(|v| v.to_string()));
            row.extend(s.input.iter().map(|v| v.to_string()));
            row.push(s.target.to_string());
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

//! Configuration-driven experiment runs and their on-disk artifacts.
//!
//! A run trains one method on one problem for several attempts. Attempt `a`
//! uses seed `base_seed + a` for its dataset (and for the QNN's initial
//! angles), so attempts are independent and the whole run is reproducible.
//!
//! Output directory layout:
//!
//! ```text
//! epochs.csv        attempt,epoch,loss_before,loss_after,chosen_operator,num_terms,test_sum
//! test_points.csv   attempt,point,distance
//! summary.json      config echo, per-attempt records, aggregates
//! plots/*.csv       one x column plus mean/median/min/max columns
//! datasets/*.csv    the train/test draws of every attempt
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::ObjectiveBudget;
use crate::pauli::{OperatorPool, PauliString, PoolFlavor};
use crate::problems::{median, write_dataset_csv, FittingTarget, ModelInputs, Problem, ProblemKind, TestReport};
use crate::qnn::{qnn_test_distances, qnn_train, QnnModel};
use crate::vqkan::{run_adaptive, AdaptiveConfig, EpochRecord, SelectionWay, VqkanModel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Adaptive,
    Qnn,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive" => Ok(Self::Adaptive),
            "qnn" => Ok(Self::Qnn),
            _ => Err(Error::Config(format!("unknown method `{s}` (adaptive or qnn)"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Adaptive => "adaptive",
            Self::Qnn => "qnn",
        })
    }
}

/// Settings that only the adaptive method reads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaptiveSettings {
    pub way: SelectionWay,
    pub pool: PoolFlavor,
    /// Defaults to `Z0` for the heat equation and `X0` otherwise.
    pub initial_ansatz: Option<PauliString>,
    pub num_layers: usize,
}

impl Default for AdaptiveSettings {
    fn default() -> Self {
        Self {
            way: SelectionWay::Loss,
            pool: PoolFlavor::Restricted,
            initial_ansatz: None,
            num_layers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemKind,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub adaptive: AdaptiveSettings,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    /// Objective evaluations per epoch (adaptive) or in total (QNN).
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_attempts")]
    pub attempts: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Worker threads for attempt-level parallelism.
    #[serde(default = "default_jobs")]
    pub jobs: usize,
}

fn default_epochs() -> usize {
    25
}

fn default_trials() -> usize {
    1000
}

fn default_attempts() -> usize {
    10
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("runs/latest")
}

fn default_jobs() -> usize {
    1
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Fitting {
                target: FittingTarget::ExpSin,
            },
            method: Method::Adaptive,
            adaptive: AdaptiveSettings::default(),
            epochs: default_epochs(),
            trials: default_trials(),
            attempts: default_attempts(),
            base_seed: 0,
            output_dir: default_output_dir(),
            jobs: default_jobs(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs serialise")
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.trials == 0 || self.attempts == 0 || self.jobs == 0 {
            return Err(Error::Config("epochs, trials, attempts and jobs must all be at least 1".into()));
        }
        if self.adaptive.num_layers == 0 {
            return Err(Error::Config("num_layers must be at least 1".into()));
        }
        if let Some(p) = &self.adaptive.initial_ansatz {
            let problem = Problem::new(self.problem, 0);
            if p.max_qubit() >= problem.num_qubits() {
                return Err(Error::QubitIndex {
                    index: p.max_qubit(),
                    num_qubits: problem.num_qubits(),
                });
            }
        }
        Ok(())
    }

    /// Settings that the chosen method ignores.
    pub fn warnings(&self) -> Vec<String> {
        if self.method == Method::Qnn && self.adaptive != AdaptiveSettings::default() {
            vec!["the [adaptive] settings (way, pool, initial ansatz, layers) are ignored by the qnn method".into()]
        } else {
            Vec::new()
        }
    }
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub problem: Option<ProblemKind>,
    pub method: Option<Method>,
    pub way: Option<SelectionWay>,
    pub epochs: Option<usize>,
    pub trials: Option<usize>,
    pub attempts: Option<usize>,
    pub seed: Option<u64>,
    pub pool: Option<PoolFlavor>,
    pub initial_ansatz: Option<PauliString>,
    pub output_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
}

impl Overrides {
    pub fn apply(self, config: &mut RunConfig) {
        if let Some(v) = self.problem {
            config.problem = v;
        }
        if let Some(v) = self.method {
            config.method = v;
        }
        if let Some(v) = self.way {
            config.adaptive.way = v;
        }
        if let Some(v) = self.epochs {
            config.epochs = v;
        }
        if let Some(v) = self.trials {
            config.trials = v;
        }
        if let Some(v) = self.attempts {
            config.attempts = v;
        }
        if let Some(v) = self.seed {
            config.base_seed = v;
        }
        if let Some(v) = self.pool {
            config.adaptive.pool = v;
        }
        if let Some(v) = self.initial_ansatz {
            config.adaptive.initial_ansatz = Some(v);
        }
        if let Some(v) = self.output_dir {
            config.output_dir = v;
        }
        if let Some(v) = self.jobs {
            config.jobs = v;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub attempt: usize,
    pub seed: u64,
    pub converged: bool,
    pub epochs: Vec<EpochRecord>,
    pub final_test: TestReport,
    /// Pauli exponentials for the adaptive model, trainable rotations for
    /// the QNN.
    pub num_parametric_gates: usize,
    pub operators: Vec<String>,
    /// Operators added by selection, i.e. after the initial ansatz.
    pub operators_added: usize,
    pub total_objective_evals: usize,
    /// Sign accuracy on the test set (classification only).
    pub accuracy: Option<f64>,
    pub wall_clock_seconds: f64,
}

impl AttemptRecord {
    /// Best loss so far over every objective evaluation of the attempt.
    fn loss_trace(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.epochs
            .iter()
            .flat_map(|e| e.trace.iter())
            .map(|&f| {
                best = best.min(f);
                best
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Spread {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        Self {
            mean: values.iter().sum::<f64>() / n,
            median: median(values),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub test_sum: Spread,
    pub best_attempt: usize,
    pub loss_by_epoch: Vec<Spread>,
    pub test_sum_by_epoch: Vec<Spread>,
    pub mean_objective_evals: f64,
    pub mean_parametric_gates: f64,
    pub attempts_without_growth: usize,
    pub mean_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub config: RunConfig,
    pub attempts: Vec<AttemptRecord>,
    pub aggregate: Aggregate,
}

impl RunRecord {
    /// Reads `summary.json` from a run directory (or the file itself).
    pub fn load(path: &Path) -> Result<Self> {
        let file = if path.is_dir() {
            path.join("summary.json")
        } else {
            path.to_path_buf()
        };
        let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
        let record: Self = serde_json::from_str(&text)?;
        if record.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "summary schema version {} is not supported (expected {SCHEMA_VERSION})",
                record.schema_version
            )));
        }
        Ok(record)
    }

    pub fn best_attempt(&self) -> &AttemptRecord {
        &self.attempts[self.aggregate.best_attempt]
    }
}

fn run_attempt(config: &RunConfig, pool: &OperatorPool, attempt: usize) -> Result<AttemptRecord> {
    let start = Instant::now();
    let seed = config.base_seed.wrapping_add(attempt as u64);
    let problem = Problem::new(config.problem, seed);
    let data = problem.make_dataset()?;

    let mut record = match config.method {
        Method::Adaptive => {
            let plan = problem.loss_plan(&data.train, ModelInputs::Vqkan)?;
            let test = problem.test_set(&data.test, ModelInputs::Vqkan)?;
            let mut model = VqkanModel::new(
                problem.num_qubits(),
                config.adaptive.num_layers,
                problem.input_dim(),
                problem.hamiltonian(),
                problem.encoding(),
            )?;
            let initial = config
                .adaptive
                .initial_ansatz
                .clone()
                .unwrap_or_else(|| problem.default_initial_ansatz());
            let adaptive = AdaptiveConfig {
                way: config.adaptive.way,
                epochs: config.epochs,
                trials: config.trials,
                initial_ansatz: Some(initial),
                ..AdaptiveConfig::default()
            };
            let run = run_adaptive(&mut model, pool, &plan, &test, &adaptive)?;
            let distances = run.epochs.last().map(|e| e.test_distances.clone()).unwrap_or_default();
            AttemptRecord {
                attempt,
                seed,
                converged: run.converged,
                operators_added: run.epochs.iter().skip(1).filter(|e| e.chosen_operator.is_some()).count(),
                total_objective_evals: run.epochs.iter().map(|e| e.num_objective_evals).sum(),
                epochs: run.epochs,
                accuracy: problem.accuracy(&data.test, &distances),
                final_test: TestReport::from_distances(distances)?,
                num_parametric_gates: model.num_terms(),
                operators: model.operators().iter().map(|p| p.to_string()).collect(),
                wall_clock_seconds: 0.0,
            }
        }
        Method::Qnn => {
            let plan = problem.loss_plan(&data.train, ModelInputs::Qnn)?;
            let test = problem.test_set(&data.test, ModelInputs::Qnn)?;
            let model = QnnModel::random(seed, problem.qnn_angle_scale());
            let trained = qnn_train(&model, &plan, &ObjectiveBudget::new(config.trials))?;
            let distances = qnn_test_distances(&trained.model, &test)?;
            let gates = trained.model.thetas().len();
            let epoch = EpochRecord {
                epoch: 0,
                chosen_operator: None,
                loss_before: trained.loss_before,
                loss_after: trained.loss_after,
                num_terms: gates,
                num_parameters: gates,
                test_distance_sum: distances.iter().sum(),
                test_distances: distances.clone(),
                num_objective_evals: trained.evals,
                trace: trained.history,
            };
            AttemptRecord {
                attempt,
                seed,
                converged: false,
                epochs: vec![epoch],
                accuracy: problem.accuracy(&data.test, &distances),
                final_test: TestReport::from_distances(distances)?,
                num_parametric_gates: gates,
                operators: Vec::new(),
                operators_added: 0,
                total_objective_evals: trained.evals,
                wall_clock_seconds: 0.0,
            }
        }
    };
    record.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(record)
}

fn aggregate(attempts: &[AttemptRecord]) -> Aggregate {
    let sums: Vec<f64> = attempts.iter().map(|a| a.final_test.sum).collect();
    let mut best_attempt = 0;
    for (i, &s) in sums.iter().enumerate() {
        if s < sums[best_attempt] {
            best_attempt = i;
        }
    }
    let max_epochs = attempts.iter().map(|a| a.epochs.len()).max().unwrap_or(0);
    let by_epoch = |f: fn(&EpochRecord) -> f64| -> Vec<Spread> {
        (0..max_epochs)
            .map(|e| {
                let v: Vec<f64> = attempts.iter().filter_map(|a| a.epochs.get(e)).map(f).collect();
                Spread::of(&v)
            })
            .collect()
    };
    let n = attempts.len() as f64;
    let accuracies: Vec<f64> = attempts.iter().filter_map(|a| a.accuracy).collect();
    Aggregate {
        test_sum: Spread::of(&sums),
        best_attempt,
        loss_by_epoch: by_epoch(|e| e.loss_after),
        test_sum_by_epoch: by_epoch(|e| e.test_distance_sum),
        mean_objective_evals: attempts.iter().map(|a| a.total_objective_evals as f64).sum::<f64>() / n,
        mean_parametric_gates: attempts.iter().map(|a| a.num_parametric_gates as f64).sum::<f64>() / n,
        attempts_without_growth: attempts.iter().filter(|a| a.operators_added == 0).count(),
        mean_accuracy: (!accuracies.is_empty()).then(|| accuracies.iter().sum::<f64>() / accuracies.len() as f64),
    }
}

/// Runs every attempt without touching the filesystem.
pub fn execute(config: &RunConfig) -> Result<RunRecord> {
    config.validate()?;
    let problem = Problem::new(config.problem, config.base_seed);
    let pool = OperatorPool::generate(problem.num_qubits(), config.adaptive.pool)?;
    let threads = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} worker threads: {e}", config.jobs)))?;
    // Indexed parallel collection keeps attempt order regardless of scheduling.
    let attempts = threads.install(|| {
        (0..config.attempts)
            .into_par_iter()
            .map(|a| run_attempt(config, &pool, a))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(RunRecord {
        schema_version: SCHEMA_VERSION,
        aggregate: aggregate(&attempts),
        config: config.clone(),
        attempts,
    })
}

/// Runs the experiment and writes its artifacts to `config.output_dir`.
pub fn run(config: &RunConfig) -> Result<RunRecord> {
    let record = execute(config)?;
    write_outputs(&record, &config.output_dir)?;
    for a in 0..config.attempts {
        let problem = Problem::new(config.problem, config.base_seed.wrapping_add(a as u64));
        let path = config.output_dir.join("datasets").join(format!("attempt_{a:02}.csv"));
        write_dataset_csv(&path, &problem.make_dataset()?)?;
    }
    Ok(record)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_spread_csv(path: &Path, x_name: &str, rows: impl IntoIterator<Item = (usize, Spread)>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([x_name, "mean", "median", "min", "max"])?;
    for (x, s) in rows {
        w.write_record([x.to_string(), s.mean.to_string(), s.median.to_string(), s.min.to_string(), s.max.to_string()])?;
    }
    finish(w, path)
}

pub fn write_outputs(record: &RunRecord, dir: &Path) -> Result<()> {
    for sub in [dir.to_path_buf(), dir.join("plots"), dir.join("datasets")] {
        fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
    }

    let path = dir.join("epochs.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["attempt", "epoch", "loss_before", "loss_after", "chosen_operator", "num_terms", "test_sum"])?;
    for a in &record.attempts {
        for e in &a.epochs {
            w.write_record([
                a.attempt.to_string(),
                e.epoch.to_string(),
                e.loss_before.to_string(),
                e.loss_after.to_string(),
                e.chosen_operator.clone().unwrap_or_default(),
                e.num_terms.to_string(),
                e.test_distance_sum.to_string(),
            ])?;
        }
    }
    finish(w, &path)?;

    let path = dir.join("test_points.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["attempt", "point", "distance"])?;
    for a in &record.attempts {
        for (i, d) in a.final_test.per_point.iter().enumerate() {
            w.write_record([a.attempt.to_string(), i.to_string(), d.to_string()])?;
        }
    }
    finish(w, &path)?;

    let path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(record)?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;

    let plots = dir.join("plots");
    let agg = &record.aggregate;
    write_spread_csv(&plots.join("loss_by_epoch.csv"), "epoch", agg.loss_by_epoch.iter().copied().enumerate())?;
    write_spread_csv(
        &plots.join("test_sum_by_epoch.csv"),
        "epoch",
        agg.test_sum_by_epoch.iter().copied().enumerate(),
    )?;

    let traces: Vec<Vec<f64>> = record.attempts.iter().map(AttemptRecord::loss_trace).collect();
    let longest = traces.iter().map(Vec::len).max().unwrap_or(0);
    let trial_rows = (0..longest).filter_map(|i| {
        let v: Vec<f64> = traces.iter().filter_map(|t| t.get(i)).copied().collect();
        (!v.is_empty()).then(|| (i + 1, Spread::of(&v)))
    });
    write_spread_csv(&plots.join("loss_by_trial.csv"), "trial", trial_rows)?;

    let points = record.attempts.iter().map(|a| a.final_test.per_point.len()).max().unwrap_or(0);
    let point_rows = (0..points).map(|i| {
        let v: Vec<f64> = record
            .attempts
            .iter()
            .filter_map(|a| a.final_test.per_point.get(i))
            .copied()
            .collect();
        (i, Spread::of(&v))
    });
    write_spread_csv(&plots.join("test_distance_by_point.csv"), "point", point_rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub metric: &'static str,
    pub a: f64,
    pub b: f64,
}

impl ComparisonRow {
    pub fn delta(&self) -> f64 {
        self.b - self.a
    }

    /// Every metric is better when smaller.
    pub fn winner(&self) -> &'static str {
        if self.a < self.b {
            "a"
        } else if self.b < self.a {
            "b"
        } else {
            "tie"
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub label_a: String,
    pub label_b: String,
    pub rows: Vec<ComparisonRow>,
}

pub fn compare(a: &RunRecord, b: &RunRecord) -> Result<Comparison> {
    if a.config.problem != b.config.problem {
        return Err(Error::ProblemMismatch(a.config.problem.to_string(), b.config.problem.to_string()));
    }
    let row = |metric, f: fn(&Aggregate) -> f64| ComparisonRow {
        metric,
        a: f(&a.aggregate),
        b: f(&b.aggregate),
    };
    Ok(Comparison {
        label_a: a.config.method.to_string(),
        label_b: b.config.method.to_string(),
        rows: vec![
            row("mean test-distance sum", |g| g.test_sum.mean),
            row("median test-distance sum", |g| g.test_sum.median),
            row("min test-distance sum", |g| g.test_sum.min),
            row("objective evaluations per attempt", |g| g.mean_objective_evals),
            row("parametric gates", |g| g.mean_parametric_gates),
        ],
    })
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<36} {:>14} {:>14} {:>14}  winner",
            "metric",
            format!("a ({})", self.label_a),
            format!("b ({})", self.label_b),
            "b - a"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<36} {:>14.4} {:>14.4} {:>14.4}  {}",
                r.metric,
                r.a,
                r.b,
                r.delta(),
                r.winner()
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_defaults() {
        let text = r#"
            method = "qnn"
            epochs = 15
            [problem]
            kind = "fitting"
            target = "logarithm"
            [adaptive]
            way = 1
            initial_ansatz = "Z0"
        "#;
        let c = RunConfig::from_toml(text).unwrap();
        assert_eq!(c.method, Method::Qnn);
        assert_eq!(c.problem, ProblemKind::Fitting { target: FittingTarget::Logarithm });
        assert_eq!(c.adaptive.way, SelectionWay::Gradient);
        assert_eq!((c.trials, c.attempts, c.jobs), (1000, 10, 1));
        assert_eq!(c.warnings().len(), 1);
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);

        let heat = RunConfig::from_toml("[problem]\nkind = \"heat\"\n").unwrap();
        assert_eq!(heat.problem, ProblemKind::Heat);
        assert!(heat.warnings().is_empty());
    }

    #[test]
    fn invalid_configs() {
        assert!(RunConfig::from_toml("[problem]\nkind = \"heat\"\n[adaptive]\nway = 3\n").is_err());
        assert!(RunConfig::from_toml("epochs = 0\n[problem]\nkind = \"heat\"\n").is_err());
        assert!(RunConfig::from_toml("[problem]\nkind = \"heat\"\n[adaptive]\ninitial_ansatz = \"X7\"\n").is_err());
        assert!(RunConfig::from_toml("[problem]\nkind = \"heat\"\n[adaptive]\ninitial_ansatz = \"Q0\"\n").is_err());
        assert!(RunConfig::from_toml("colour = 1\n[problem]\nkind = \"heat\"\n").is_err());
    }

    #[test]
    fn overrides_apply() {
        let mut c = RunConfig::default();
        Overrides {
            method: Some(Method::Qnn),
            epochs: Some(3),
            initial_ansatz: Some("Y2".parse().unwrap()),
            ..Overrides::default()
        }
        .apply(&mut c);
        assert_eq!(c.method, Method::Qnn);
        assert_eq!(c.epochs, 3);
        assert_eq!(c.adaptive.initial_ansatz.unwrap().to_string(), "Y2");
    }

    #[test]
    fn comparing_a_record_with_itself() {
        let config = RunConfig {
            epochs: 1,
            trials: 5,
            attempts: 2,
            ..RunConfig::default()
        };
        let r = execute(&config).unwrap();
        let c = compare(&r, &r).unwrap();
        assert!(c.rows.iter().all(|row| row.delta() == 0.0 && row.winner() == "tie"));
        let other = RunRecord {
            config: RunConfig {
                problem: ProblemKind::Heat,
                ..config
            },
            ..r.clone()
        };
        assert!(matches!(compare(&r, &other), Err(Error::ProblemMismatch(..))));
    }
}

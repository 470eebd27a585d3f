//! Experiment runner: dataset preparation, timed train/test runs, grids over
//! measures, and the CSV/JSON artifacts they leave behind.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::{self, Embedding, EmbeddedDataset, MinMax, SeriesSpec};
use crate::error::{config, Error, Result};
use crate::fs_builder::{FsType, DEFAULT_ZSLICES};
use crate::fuzzy_numeric::UniverseGrid;
use crate::measures::{MeasureId, SetDomain};
use crate::metrics::{self, MetricReport};
use crate::model::{EvolvingModel, ModelConfig, TrainingReport};

/// Named hyperparameter presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    MgPaper,
    TaiexPaper,
}

impl Profile {
    pub const NAMES: [&'static str; 2] = ["mg-paper", "taiex-paper"];

    /// Applies the preset's learning hyperparameters to `cfg`.
    pub fn apply(&self, cfg: &mut ModelConfig) {
        let (alpha, beta, lambda_reg, sigma) = match self {
            Profile::MgPaper => (0.001, 0.06, 1e-7, 0.3),
            Profile::TaiexPaper => (0.01, 0.1, 1e-3, 0.5),
        };
        cfg.alpha = alpha;
        cfg.beta = beta;
        cfg.lambda_reg = lambda_reg;
        cfg.sigma = sigma;
        cfg.omega = 1.0;
        cfg.epsilon = 0.05;
        cfg.tau = None;
        cfg.grid = UniverseGrid::default();
    }

    pub fn config(&self) -> ModelConfig {
        let mut cfg = ModelConfig::default();
        self.apply(&mut cfg);
        cfg
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mg-paper" => Ok(Profile::MgPaper),
            "taiex-paper" => Ok(Profile::TaiexPaper),
            other => Err(config(
                "profile",
                format!("unknown profile `{other}` (valid: {})", Self::NAMES.join(", ")),
            )),
        }
    }
}

fn default_column() -> String {
    "Close".to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSpec {
    MackeyGlass(SeriesSpec),
    StockCsv {
        path: PathBuf,
        #[serde(default = "default_column")]
        column: String,
    },
}

impl DatasetSpec {
    pub fn mackey_glass(theta: f64) -> Self {
        DatasetSpec::MackeyGlass(SeriesSpec { theta, ..SeriesSpec::default() })
    }

    pub fn stock_csv(path: impl Into<PathBuf>) -> Self {
        DatasetSpec::StockCsv {
            path: path.into(),
            column: default_column(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            DatasetSpec::MackeyGlass(s) => format!("mackey-glass(theta={})", s.theta),
            DatasetSpec::StockCsv { path, .. } => format!("stock-csv({})", path.display()),
        }
    }

    pub fn is_stock(&self) -> bool {
        matches!(self, DatasetSpec::StockCsv { .. })
    }

    pub fn default_profile(&self) -> Profile {
        if self.is_stock() {
            Profile::TaiexPaper
        } else {
            Profile::MgPaper
        }
    }

    /// Normalized, embedded dataset and the scaling used.
    pub fn load(&self) -> Result<(EmbeddedDataset, MinMax)> {
        match self {
            DatasetSpec::MackeyGlass(s) => {
                let spec = SeriesSpec {
                    length: s.length.max(datasets::MG_MIN_LENGTH),
                    ..*s
                };
                let series = datasets::generate_mackey_glass(&spec)?;
                datasets::prepare(&series, &Embedding::mackey_glass())
            }
            DatasetSpec::StockCsv { path, column } => {
                let series = datasets::load_close_series(path, column).map_err(|e| match e {
                    Error::Io(io) => Error::config("path", format!("cannot read {}: {io}", path.display())),
                    other => other,
                })?;
                datasets::prepare(&series, &Embedding::stock())
            }
        }
    }
}

fn default_repeats() -> usize {
    20
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub dataset: DatasetSpec,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    /// Compute metrics on the original scale instead of the normalized one.
    #[serde(default)]
    pub denormalize: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentSpec {
    /// Spec with the dataset's default profile.
    pub fn new(dataset: DatasetSpec) -> Self {
        let model = dataset.default_profile().config();
        ExperimentSpec {
            dataset,
            model,
            repeats: default_repeats(),
            denormalize: false,
            output_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(config("repeats", "must be at least 1"));
        }
        if let DatasetSpec::MackeyGlass(s) = &self.dataset {
            s.validate()?;
        }
        self.model.validate()
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(json)?;
        // surface a bad measure name as such rather than as a parse error
        if let Some(name) = value.pointer("/model/measure").and_then(|v| v.as_str()) {
            name.parse::<MeasureId>()?;
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }
}

/// Outcome of one experiment.
#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub report: MetricReport,
    pub training: TrainingReport,
    pub actuals: Vec<f64>,
    pub predictions: Vec<f64>,
    pub runtimes_s: Vec<f64>,
}

/// Metrics row as written to `metrics.csv` and `metrics.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub dataset: String,
    pub measure: String,
    pub fs_method: String,
    pub fs_type: String,
    pub rmse: f64,
    pub ndei: f64,
    pub mae: f64,
    pub er2: f64,
    pub mape: f64,
    pub final_rules: usize,
    pub runtime_mean_s: f64,
    pub runtime_std_s: f64,
}

impl MetricsRecord {
    pub fn new(spec: &ExperimentSpec, r: &MetricReport) -> Self {
        MetricsRecord {
            dataset: spec.dataset.label(),
            measure: spec.model.measure.name().to_string(),
            fs_method: spec.model.fs_method.to_string(),
            fs_type: spec.model.fs_type.to_string(),
            rmse: r.rmse,
            ndei: r.ndei,
            mae: r.mae,
            er2: r.er2,
            mape: r.mape,
            final_rules: r.final_rules,
            runtime_mean_s: r.runtime_mean_s,
            runtime_std_s: r.runtime_std_s,
        }
    }

    pub fn report(&self) -> MetricReport {
        MetricReport {
            rmse: self.rmse,
            ndei: self.ndei,
            mae: self.mae,
            er2: self.er2,
            mape: self.mape,
            final_rules: self.final_rules,
            runtime_mean_s: self.runtime_mean_s,
            runtime_std_s: self.runtime_std_s,
        }
    }
}

struct Pass {
    training: TrainingReport,
    predictions: Vec<f64>,
    seconds: f64,
}

fn train_and_test(cfg: &ModelConfig, data: &EmbeddedDataset) -> Result<Pass> {
    let start = Instant::now();
    let mut model = EvolvingModel::new(cfg.clone())?;
    let training = model.fit(data.train_inputs(), data.train_targets())?;
    let predictions = model.predict(data.test_inputs())?;
    Ok(Pass {
        training,
        predictions,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs `spec` and writes its artifacts when an output directory is set.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let (data, scale) = spec.dataset.load()?;
    let first = train_and_test(&spec.model, &data)?;
    let mut runtimes = vec![first.seconds];
    for _ in 1..spec.repeats {
        let again = train_and_test(&spec.model, &data)?;
        debug_assert_eq!(again.predictions, first.predictions);
        runtimes.push(again.seconds);
    }
    let (mut actuals, mut predictions) = (data.test_targets().to_vec(), first.predictions);
    if spec.denormalize {
        actuals.iter_mut().for_each(|v| *v = scale.invert(*v));
        predictions.iter_mut().for_each(|v| *v = scale.invert(*v));
    }
    let mut report = MetricReport::compute(&actuals, &predictions, first.training.final_rules())?;
    let (mean, std) = if runtimes.len() >= 2 {
        metrics::runtime_stats(&runtimes)?
    } else {
        (runtimes[0], 0.0)
    };
    report.runtime_mean_s = mean;
    report.runtime_std_s = std;
    let result = ExperimentResult {
        report,
        training: first.training,
        actuals,
        predictions,
        runtimes_s: runtimes,
    };
    if let Some(dir) = &spec.output_dir {
        write_artifacts(dir, spec, &result)?;
    }
    Ok(result)
}

/// Writes `metrics.csv`, `metrics.json`, `predictions.csv` and
/// `rules_trace.csv` into `dir`.
pub fn write_artifacts(dir: &Path, spec: &ExperimentSpec, result: &ExperimentResult) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let record = MetricsRecord::new(spec, &result.report);

    let mut w = csv::Writer::from_path(dir.join("metrics.csv"))?;
    w.serialize(&record)?;
    w.flush()?;

    std::fs::write(dir.join("metrics.json"), serde_json::to_string_pretty(&record)? + "\n")?;

    let mut w = csv::Writer::from_path(dir.join("predictions.csv"))?;
    w.write_record(["step", "actual", "predicted"])?;
    for (i, (a, p)) in result.actuals.iter().zip(&result.predictions).enumerate() {
        w.write_record([i.to_string(), a.to_string(), p.to_string()])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("rules_trace.csv"))?;
    w.write_record(["step", "rules", "output_rule", "created"])?;
    let t = &result.training;
    for i in 0..t.rule_counts.len() {
        w.write_record([
            i.to_string(),
            t.rule_counts[i].to_string(),
            t.output_rules[i].to_string(),
            t.created[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads back a `metrics.csv` written by [`write_artifacts`].
pub fn read_metrics_csv(path: impl AsRef<Path>) -> Result<MetricsRecord> {
    let mut r = csv::Reader::from_path(path)?;
    match r.deserialize().next() {
        Some(rec) => Ok(rec?),
        None => Err(Error::Ingestion {
            row: 2,
            reason: "metrics file has no data row".into(),
        }),
    }
}

/// Set type suited to a measure: type-1 for the directional distance,
/// general type-2 otherwise.
pub fn natural_fs_type(measure: MeasureId) -> FsType {
    match measure.domain() {
        SetDomain::Type1 => FsType::T1,
        _ => FsType::gt2().with_zslices(DEFAULT_ZSLICES),
    }
}

/// One spec per measure, derived from `base`. The set type is kept when it
/// suits the measure and replaced by [`natural_fs_type`] otherwise.
pub fn grid_specs(base: &ExperimentSpec, measures: &[MeasureId]) -> Vec<ExperimentSpec> {
    measures
        .iter()
        .map(|&m| {
            let mut spec = base.clone();
            spec.model.measure = m;
            if spec.model.validate().is_err() {
                let zslices = base.model.fs_type.n_zslices().unwrap_or(DEFAULT_ZSLICES);
                spec.model.fs_type = match natural_fs_type(m) {
                    FsType::T1 => FsType::T1,
                    t => t.with_zslices(zslices),
                };
            }
            spec.output_dir = base.output_dir.as_ref().map(|d| d.join(m.name()));
            spec
        })
        .collect()
}

/// A grid cell's label and outcome.
pub struct GridCell {
    pub spec: ExperimentSpec,
    pub outcome: Result<ExperimentResult>,
}

/// Runs all cells in parallel; the output order follows `specs`.
pub fn run_grid(specs: Vec<ExperimentSpec>) -> Vec<GridCell> {
    let outcomes: Vec<Result<ExperimentResult>> = specs.par_iter().map(run_experiment).collect();
    specs
        .into_iter()
        .zip(outcomes)
        .map(|(spec, outcome)| GridCell { spec, outcome })
        .collect()
}

/// Comparison table, one row per cell. Mackey–Glass tables report
/// RMSE/NDEI/MAE, stock tables ER²/NDEI/MAPE.
pub fn format_table(cells: &[GridCell]) -> String {
    let stock = cells.first().is_some_and(|c| c.spec.dataset.is_stock());
    let cols = if stock {
        ["ER2", "NDEI", "MAPE"]
    } else {
        ["RMSE", "NDEI", "MAE"]
    };
    let mut out = String::new();
    if let Some(c) = cells.first() {
        let _ = writeln!(out, "{}", c.spec.dataset.label());
    }
    let _ = writeln!(
        out,
        "{:<16} {:>12} {:>12} {:>12} {:>6} {:>22}",
        "Measure", cols[0], cols[1], cols[2], "Rules", "Runtime (s)"
    );
    for c in cells {
        let name = c.spec.model.measure.name();
        match &c.outcome {
            Ok(r) => {
                let m = &r.report;
                let vals = if stock {
                    [m.er2, m.ndei, m.mape]
                } else {
                    [m.rmse, m.ndei, m.mae]
                };
                let _ = writeln!(
                    out,
                    "{:<16} {:>12.7} {:>12.7} {:>12.7} {:>6} {:>22}",
                    name,
                    vals[0],
                    vals[1],
                    vals[2],
                    m.final_rules,
                    format!("{:.4} ± {:.4}", m.runtime_mean_s, m.runtime_std_s)
                );
            }
            Err(e) => {
                let _ = writeln!(out, "{name:<16} FAILED: {e}");
            }
        }
    }
    out
}

/// Writes one CSV row per successful cell.
pub fn write_grid_csv(path: &Path, cells: &[GridCell]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for c in cells {
        if let Ok(r) = &c.outcome {
            w.serialize(MetricsRecord::new(&c.spec, &r.report))?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles() {
        let mg = Profile::MgPaper.config();
        assert_eq!((mg.alpha, mg.beta, mg.lambda_reg, mg.sigma, mg.epsilon), (0.001, 0.06, 1e-7, 0.3, 0.05));
        let tx = Profile::TaiexPaper.config();
        assert_eq!((tx.alpha, tx.beta, tx.lambda_reg, tx.sigma, tx.epsilon), (0.01, 0.1, 1e-3, 0.5, 0.05));
        assert_eq!("taiex-paper".parse::<Profile>().unwrap(), Profile::TaiexPaper);
        assert!("paper".parse::<Profile>().is_err());
    }

    #[test]
    fn spec_json_defaults() {
        let s = ExperimentSpec::from_json(r#"{"dataset": {"kind": "mackey_glass", "theta": 17}}"#).unwrap();
        assert_eq!(s.repeats, 20);
        assert_eq!(s.model, ModelConfig::default());
        let DatasetSpec::MackeyGlass(mg) = &s.dataset else { panic!() };
        assert_eq!(mg.dt, 0.1);
        let s = ExperimentSpec::from_json(r#"{"dataset": {"kind": "stock_csv", "path": "x.csv"}, "model": {"measure": "mcculloch", "fs_type": {"type": "t1"}}}"#).unwrap();
        assert_eq!(s.model.measure, MeasureId::Mcculloch);
        assert!(s.validate().is_ok());
        let bad = ExperimentSpec::from_json(r#"{"dataset": {"kind": "mackey_glass"}, "model": {"measure": "nope"}}"#);
        assert!(matches!(bad, Err(Error::UnknownMeasure { .. })));
    }

    #[test]
    fn grid_picks_suitable_set_types() {
        let base = ExperimentSpec::new(DatasetSpec::mackey_glass(17.0));
        let specs = grid_specs(&base, &MeasureId::ALL);
        assert_eq!(specs.len(), 8);
        for s in &specs {
            assert!(s.model.validate().is_ok(), "{}", s.model.measure);
        }
        assert_eq!(specs[0].model.fs_type, FsType::T1);
    }

    #[test]
    fn missing_stock_file_names_the_path_field() {
        let spec = ExperimentSpec {
            repeats: 1,
            ..ExperimentSpec::new(DatasetSpec::stock_csv("/nonexistent/prices.csv"))
        };
        match run_experiment(&spec) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "path"),
            other => panic!("{:?}", other.map(|r| r.report)),
        }
    }
}

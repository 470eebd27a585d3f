//! Benchmark series: Mackey–Glass generation, close-price CSV ingestion, lag
//! embeddings and min-max scaling.

use std::io::{Read, Write};
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fs_builder::DataWindow;

/// Mackey–Glass delay differential equation
/// `dx/dt = φ x(t-ϑ) / (1 + x(t-ϑ)^ϱ) - ς x(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeriesSpec {
    pub theta: f64,
    pub phi: f64,
    pub rho: f64,
    pub varsigma: f64,
    pub length: usize,
    pub dt: f64,
    /// Constant history for `t <= 0`.
    pub x0: f64,
}

impl Default for SeriesSpec {
    fn default() -> Self {
        SeriesSpec {
            theta: 17.0,
            phi: 0.2,
            rho: 10.0,
            varsigma: 0.1,
            length: MG_MIN_LENGTH,
            dt: 0.1,
            x0: 1.2,
        }
    }
}

/// Integration steps per unit of time, if `dt` divides 1.
fn steps_per_unit(dt: f64) -> Option<usize> {
    if !(dt > 0.0 && dt <= 1.0) {
        return None;
    }
    let n = (1.0 / dt).round();
    ((n * dt - 1.0).abs() < 1e-9).then_some(n as usize)
}

impl SeriesSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0) {
            return Err(crate::error::config("theta", "delay must be positive"));
        }
        if self.length == 0 {
            return Err(crate::error::config("length", "series length must be at least 1"));
        }
        if steps_per_unit(self.dt).is_none() {
            return Err(crate::error::config("dt", "step must divide 1 evenly"));
        }
        if !self.x0.is_finite() {
            return Err(crate::error::config("x0", "history must be finite"));
        }
        Ok(())
    }
}

/// Integrates with classical RK4 and returns `x(t)` for `t = 0, 1, ...,
/// length - 1`. Delayed states between stored steps come from cubic Hermite
/// interpolation on the stored values and slopes.
pub fn generate_mackey_glass(spec: &SeriesSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let per_unit = steps_per_unit(spec.dt).expect("validated");
    let dt = 1.0 / per_unit as f64;
    let total_steps = (spec.length - 1) * per_unit;
    let mut traj = Vec::with_capacity(total_steps + 1);
    let mut slope: Vec<f64> = Vec::with_capacity(total_steps + 1);
    traj.push(spec.x0);

    let rhs = |x: f64, xd: f64| spec.phi * xd / (1.0 + xd.powf(spec.rho)) - spec.varsigma * x;
    // delayed value at time `t - theta`, with `t` measured in steps; cubic
    // Hermite between stored samples using their slopes
    let delayed = |traj: &[f64], slope: &[f64], steps: f64| -> f64 {
        let s = steps - spec.theta / dt;
        if s <= 0.0 {
            return spec.x0;
        }
        let i = s.floor() as usize;
        let u = s - i as f64;
        if u == 0.0 || i + 1 >= slope.len() {
            return traj[i.min(traj.len() - 1)];
        }
        let (p0, p1) = (traj[i], traj[i + 1]);
        let (m0, m1) = (slope[i] * dt, slope[i + 1] * dt);
        let (u2, u3) = (u * u, u * u * u);
        (2.0 * u3 - 3.0 * u2 + 1.0) * p0 + (u3 - 2.0 * u2 + u) * m0 + (-2.0 * u3 + 3.0 * u2) * p1 + (u3 - u2) * m1
    };

    for n in 0..total_steps {
        let x = traj[n];
        let t = n as f64;
        let d0 = delayed(&traj, &slope, t);
        slope.push(rhs(x, d0));
        let dh = delayed(&traj, &slope, t + 0.5);
        let d1 = delayed(&traj, &slope, t + 1.0);
        let k1 = slope[n];
        let k2 = rhs(x + 0.5 * dt * k1, dh);
        let k3 = rhs(x + 0.5 * dt * k2, dh);
        let k4 = rhs(x + dt * k3, d1);
        traj.push(x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    Ok(traj.into_iter().step_by(per_unit).collect())
}

/// Affine map onto `[0, 1]` fitted on a reference slice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinMax {
    pub lo: f64,
    pub hi: f64,
}

impl MinMax {
    pub fn fit(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("cannot fit min-max scaling on no values"));
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            return Err(Error::domain("min-max scaling of a constant series"));
        }
        Ok(MinMax { lo, hi })
    }

    pub fn apply(&self, x: f64) -> f64 {
        (x - self.lo) / (self.hi - self.lo)
    }

    pub fn invert(&self, z: f64) -> f64 {
        self.lo + z * (self.hi - self.lo)
    }
}

/// Scales `series` with statistics from `series[fit_range]`.
pub fn normalize_with(series: &[f64], fit_range: Range<usize>) -> Result<(Vec<f64>, MinMax)> {
    if fit_range.end > series.len() || fit_range.start >= fit_range.end {
        return Err(Error::domain(format!(
            "fit range {fit_range:?} does not lie within a series of length {}",
            series.len()
        )));
    }
    let mm = MinMax::fit(&series[fit_range])?;
    Ok((series.iter().map(|&x| mm.apply(x)).collect(), mm))
}

/// Scales `series` with its own minimum and maximum.
pub fn min_max_normalize(series: &[f64]) -> Result<(Vec<f64>, MinMax)> {
    normalize_with(series, 0..series.len())
}

/// Input windows and targets, training samples first.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedDataset {
    pub inputs: Vec<DataWindow>,
    pub targets: Vec<f64>,
    pub train: Range<usize>,
    pub test: Range<usize>,
}

impl EmbeddedDataset {
    pub fn train_inputs(&self) -> &[DataWindow] {
        &self.inputs[self.train.clone()]
    }

    pub fn train_targets(&self) -> &[f64] {
        &self.targets[self.train.clone()]
    }

    pub fn test_inputs(&self) -> &[DataWindow] {
        &self.inputs[self.test.clone()]
    }

    pub fn test_targets(&self) -> &[f64] {
        &self.targets[self.test.clone()]
    }
}

/// Lag layout of an embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub lags: Vec<usize>,
    pub lead: usize,
    /// Inclusive index ranges, in the series' own numbering.
    pub train: (usize, usize),
    pub test: (usize, usize),
    /// Index of the first series element (0 or 1).
    pub base: usize,
}

impl Embedding {
    pub fn mackey_glass() -> Self {
        Embedding {
            lags: vec![0, 6, 12, 18],
            lead: 85,
            train: (201, 3200),
            test: (5001, 5500),
            base: 0,
        }
    }

    pub fn stock() -> Self {
        Embedding {
            lags: vec![0, 2, 3],
            lead: 4,
            train: (1, 3200),
            test: (3201, 3500),
            base: 1,
        }
    }

    /// Series length needed to build every window.
    pub fn required_length(&self) -> usize {
        self.test.1 + self.lead + 1 - self.base
    }

    /// Positions (zero-based) of the series values read by training windows
    /// and targets.
    pub fn train_span(&self) -> Range<usize> {
        (self.train.0 - self.base)..(self.train.1 + self.lead + 1 - self.base)
    }

    pub fn apply(&self, series: &[f64]) -> Result<EmbeddedDataset> {
        let need = self.required_length();
        if series.len() < need {
            return Err(Error::domain(format!(
                "series has {} samples, the embedding needs {need}",
                series.len()
            )));
        }
        let mut inputs = Vec::new();
        let mut targets = Vec::new();
        for (a, b) in [self.train, self.test] {
            for k in a..=b {
                let i = k - self.base;
                inputs.push(DataWindow::new(self.lags.iter().map(|l| series[i + l]).collect())?);
                targets.push(series[i + self.lead]);
            }
        }
        let n_train = self.train.1 - self.train.0 + 1;
        Ok(EmbeddedDataset {
            train: 0..n_train,
            test: n_train..inputs.len(),
            inputs,
            targets,
        })
    }
}

pub const MG_MIN_LENGTH: usize = 5586;
pub const STOCK_MIN_LENGTH: usize = 3504;

pub fn embed_mackey_glass(series: &[f64]) -> Result<EmbeddedDataset> {
    Embedding::mackey_glass().apply(series)
}

pub fn embed_stock(series: &[f64]) -> Result<EmbeddedDataset> {
    Embedding::stock().apply(series)
}

/// Normalizes with training statistics, then embeds.
pub fn prepare(series: &[f64], embedding: &Embedding) -> Result<(EmbeddedDataset, MinMax)> {
    if series.len() < embedding.required_length() {
        return Err(Error::domain(format!(
            "series has {} samples, the embedding needs {}",
            series.len(),
            embedding.required_length()
        )));
    }
    let (scaled, mm) = normalize_with(series, embedding.train_span())?;
    Ok((embedding.apply(&scaled)?, mm))
}

/// Reads a named numeric column, skipping rows where it is empty.
pub fn read_close_series(reader: impl Read, column: &str) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let idx = headers.iter().position(|h| h == column).ok_or_else(|| Error::Ingestion {
        row: 1,
        reason: format!(
            "no column named `{column}` (found: {})",
            headers.iter().collect::<Vec<_>>().join(", ")
        ),
    })?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let cell = record.get(idx).unwrap_or("");
        if cell.is_empty() {
            continue;
        }
        let v: f64 = cell.parse().map_err(|_| Error::Ingestion {
            row,
            reason: format!("`{cell}` in column `{column}` is not a number"),
        })?;
        if !v.is_finite() {
            return Err(Error::Ingestion {
                row,
                reason: format!("non-finite value in column `{column}`"),
            });
        }
        out.push(v);
    }
    Ok(out)
}

pub fn load_close_series(path: impl AsRef<Path>, column: &str) -> Result<Vec<f64>> {
    let file = std::fs::File::open(path.as_ref())?;
    read_close_series(std::io::BufReader::new(file), column)
}

/// Single-column CSV with header `x`.
pub fn write_series_csv(writer: impl Write, series: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x"])?;
    for v in series {
        w.write_record([format!("{v:e}")])?;
    }
    w.flush()?;
    Ok(())
}

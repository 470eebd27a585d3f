//! Data-driven construction of fuzzy sets.
//!
//! A [`DataWindow`] (an input vector or a rule center) is turned into a
//! type-1 set by one of four [`GenerationMethod`]s. A type-2 set is obtained
//! by splitting the window in two halves, building one type-1 set per half,
//! and taking the pointwise minimum/maximum as lower/upper membership.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy_numeric::{DiscretizedFuzzySet, Type2FuzzySet, UniverseGrid, ZSlice};

/// Gaussians are clamped to zero beyond this many standard deviations.
pub const GAUSSIAN_SUPPORT_SIGMAS: f64 = 4.0;

/// Default number of zSlices for general type-2 sets.
pub const DEFAULT_ZSLICES: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DataWindow(Vec<f64>);

impl DataWindow {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("data window must not be empty"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("data window holds a non-finite value {v}")));
        }
        Ok(DataWindow(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    /// Sample standard deviation (`n - 1` denominator); zero for one value.
    pub fn sample_std(&self) -> f64 {
        let n = self.0.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let ss: f64 = self.0.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    }

    pub fn euclidean_distance(&self, other: &DataWindow) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn shifted(&self, offset: f64) -> DataWindow {
        DataWindow(self.0.iter().map(|v| v + offset).collect())
    }
}

impl TryFrom<Vec<f64>> for DataWindow {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        DataWindow::new(values)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    Linear,
    Lagrange,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GenerationMethod {
    Gaussian,
    SingletonPolling { interpolation: Interpolation },
    IntervalPolling { normalize: bool },
    Discrete,
}

impl GenerationMethod {
    pub const NAMES: [&'static str; 6] = [
        "gaussian",
        "singleton-linear",
        "singleton-lagrange",
        "interval",
        "interval-raw",
        "discrete",
    ];
}

impl fmt::Display for GenerationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GenerationMethod::Gaussian => "gaussian",
            GenerationMethod::SingletonPolling { interpolation: Interpolation::Linear } => {
                "singleton-linear"
            }
            GenerationMethod::SingletonPolling { interpolation: Interpolation::Lagrange } => {
                "singleton-lagrange"
            }
            GenerationMethod::IntervalPolling { normalize: true } => "interval",
            GenerationMethod::IntervalPolling { normalize: false } => "interval-raw",
            GenerationMethod::Discrete => "discrete",
        };
        f.write_str(name)
    }
}

impl FromStr for GenerationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gaussian" => GenerationMethod::Gaussian,
            "singleton" | "singleton-linear" => GenerationMethod::SingletonPolling {
                interpolation: Interpolation::Linear,
            },
            "singleton-lagrange" => GenerationMethod::SingletonPolling {
                interpolation: Interpolation::Lagrange,
            },
            "interval" => GenerationMethod::IntervalPolling { normalize: true },
            "interval-raw" => GenerationMethod::IntervalPolling { normalize: false },
            "discrete" => GenerationMethod::Discrete,
            other => {
                return Err(Error::config(
                    "fs_method",
                    format!("unknown method `{other}` (valid: {})", Self::NAMES.join(", ")),
                ))
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Type2Kind {
    It2,
    Gt2,
}

/// How windows are represented before they are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum FsType {
    T1,
    T2 { kind: Type2Kind, n_zslices: usize },
}

impl FsType {
    pub fn gt2() -> Self {
        FsType::T2 {
            kind: Type2Kind::Gt2,
            n_zslices: DEFAULT_ZSLICES,
        }
    }

    pub fn it2() -> Self {
        FsType::T2 {
            kind: Type2Kind::It2,
            n_zslices: DEFAULT_ZSLICES,
        }
    }

    pub fn with_zslices(self, n: usize) -> Self {
        match self {
            FsType::T1 => FsType::T1,
            FsType::T2 { kind, .. } => FsType::T2 { kind, n_zslices: n },
        }
    }

    pub fn n_zslices(&self) -> Option<usize> {
        match self {
            FsType::T2 { kind: Type2Kind::Gt2, n_zslices } => Some(*n_zslices),
            _ => None,
        }
    }
}

impl fmt::Display for FsType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FsType::T1 => "t1",
            FsType::T2 { kind: Type2Kind::It2, .. } => "it2",
            FsType::T2 { kind: Type2Kind::Gt2, .. } => "gt2",
        })
    }
}

impl FromStr for FsType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t1" => Ok(FsType::T1),
            "it2" => Ok(FsType::it2()),
            "gt2" | "t2" => Ok(FsType::gt2()),
            other => Err(Error::config(
                "fs_type",
                format!("unknown fuzzy set type `{other}` (valid: t1, it2, gt2)"),
            )),
        }
    }
}

/// A window after conversion to fuzzy form.
#[derive(Clone, Debug, PartialEq)]
pub enum FuzzyRepr {
    Type1(DiscretizedFuzzySet),
    Type2(Type2FuzzySet),
}

/// Everything needed to turn a window into a [`FuzzyRepr`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetSpec {
    pub method: GenerationMethod,
    pub fs_type: FsType,
    pub grid: UniverseGrid,
    pub normalize: bool,
}

impl SetSpec {
    pub fn build(&self, window: &DataWindow) -> Result<FuzzyRepr> {
        match self.fs_type {
            FsType::T1 => build_type1(window, self.method, &self.grid, self.normalize).map(FuzzyRepr::Type1),
            FsType::T2 { kind, n_zslices } => {
                build_type2(window, self.method, kind, n_zslices, &self.grid, self.normalize)
                    .map(FuzzyRepr::Type2)
            }
        }
    }
}

/// Floor used in place of a zero standard deviation.
fn std_floor(mean: f64) -> f64 {
    1e-6 * mean.abs().max(1.0)
}

/// A window narrower than the grid spacing can miss every sample; such a set
/// collapses onto the sample nearest `anchor`.
fn collapse_if_empty(grid: &UniverseGrid, mut memberships: Vec<f64>, anchor: f64) -> Vec<f64> {
    if memberships.iter().all(|&m| m == 0.0) {
        memberships[grid.nearest_index(anchor)] = 1.0;
    }
    memberships
}

/// Gaussian membership from the window mean and sample standard deviation,
/// zero beyond four deviations from the mean.
pub fn build_gaussian(window: &DataWindow, grid: &UniverseGrid) -> Result<DiscretizedFuzzySet> {
    if window.is_empty() {
        return Err(Error::domain("cannot build a Gaussian from an empty window"));
    }
    let mean = window.mean();
    let std = match window.sample_std() {
        s if s > 0.0 => s,
        _ => std_floor(mean),
    };
    let (ymin, ymax) = (
        mean - GAUSSIAN_SUPPORT_SIGMAS * std,
        mean + GAUSSIAN_SUPPORT_SIGMAS * std,
    );
    let memberships = grid
        .points()
        .map(|y| {
            if y < ymin || y > ymax {
                0.0
            } else {
                (-0.5 * ((y - mean) / std).powi(2)).exp()
            }
        })
        .collect();
    DiscretizedFuzzySet::new(*grid, collapse_if_empty(grid, memberships, mean))
}

/// Histogram-based set: window values are polled onto their nearest grid
/// sample, counts are scaled by the largest count, and the occupied samples
/// are joined by the chosen interpolant. The set is zero outside the range of
/// occupied samples.
pub fn build_singleton_polling(
    window: &DataWindow,
    interpolation: Interpolation,
    grid: &UniverseGrid,
) -> Result<DiscretizedFuzzySet> {
    if window.is_empty() {
        return Err(Error::Degenerate("singleton polling needs at least one value".into()));
    }
    let mut counts = vec![0usize; grid.n_points()];
    for &v in window.values() {
        counts[grid.nearest_index(v)] += 1;
    }
    let peak = *counts.iter().max().expect("grid has samples") as f64;
    let knots: Vec<(usize, f64)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (i, c as f64 / peak))
        .collect();

    let mut memberships = vec![0.0; grid.n_points()];
    for &(i, m) in &knots {
        memberships[i] = m;
    }
    let (first, last) = (knots[0].0, knots[knots.len() - 1].0);
    match interpolation {
        Interpolation::Linear => {
            for pair in knots.windows(2) {
                let ((i0, m0), (i1, m1)) = (pair[0], pair[1]);
                let (x0, x1) = (grid.point(i0), grid.point(i1));
                let slope = (m1 - m0) / (x1 - x0);
                for (i, slot) in memberships.iter_mut().enumerate().take(i1).skip(i0 + 1) {
                    *slot = (slope * (grid.point(i) - x0) + m0).clamp(0.0, 1.0);
                }
            }
        }
        Interpolation::Lagrange => {
            let xs: Vec<f64> = knots.iter().map(|&(i, _)| grid.point(i)).collect();
            let ys: Vec<f64> = knots.iter().map(|&(_, m)| m).collect();
            for (i, slot) in memberships.iter_mut().enumerate().take(last + 1).skip(first) {
                *slot = lagrange(&xs, &ys, grid.point(i)).clamp(0.0, 1.0);
            }
        }
    }
    DiscretizedFuzzySet::new(*grid, memberships)
}

fn lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (j, (&xj, &yj)) in xs.iter().zip(ys).enumerate() {
        let mut basis = 1.0;
        for (k, &xk) in xs.iter().enumerate() {
            if k != j {
                basis *= (x - xk) / (xj - xk);
            }
        }
        acc += yj * basis;
    }
    acc
}

/// Interval agreement: the degree at `y` is the number of intervals covering
/// `y`, divided by the largest coverage (`normalize`) or by the interval count.
pub fn build_interval_polling(
    intervals: &[(f64, f64)],
    normalize: bool,
    grid: &UniverseGrid,
) -> Result<DiscretizedFuzzySet> {
    if intervals.is_empty() {
        return Err(Error::domain("interval polling needs at least one interval"));
    }
    let mut coverage = vec![0usize; grid.n_points()];
    for &(left, right) in intervals {
        if !(left <= right) {
            return Err(Error::domain(format!("interval [{left}, {right}] has left > right")));
        }
        let mut hit = false;
        for (i, y) in grid.points().enumerate() {
            if y >= left && y <= right {
                coverage[i] += 1;
                hit = true;
            }
        }
        if !hit {
            coverage[grid.nearest_index(0.5 * (left + right))] += 1;
        }
    }
    let scale = if normalize {
        *coverage.iter().max().expect("grid has samples") as f64
    } else {
        intervals.len() as f64
    };
    let memberships = coverage.iter().map(|&c| c as f64 / scale).collect();
    Ok(DiscretizedFuzzySet::new(*grid, memberships)?.with_flag(normalize))
}

/// Explicit `(point, membership)` statements placed on their nearest grid
/// samples without interpolation. Duplicate samples keep the largest degree.
pub fn build_discrete(pairs: &[(f64, f64)], grid: &UniverseGrid) -> Result<DiscretizedFuzzySet> {
    let mut memberships = vec![0.0f64; grid.n_points()];
    for &(x, m) in pairs {
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::domain(format!("membership {m} outside [0, 1]")));
        }
        if !grid.contains(x) {
            return Err(Error::domain(format!(
                "point {x} outside the universe [{}, {}]",
                grid.lo(),
                grid.hi()
            )));
        }
        let i = grid.nearest_index(x);
        memberships[i] = memberships[i].max(m);
    }
    DiscretizedFuzzySet::new(*grid, memberships)
}

/// Halves of a window. An odd-length window repeats its middle element in
/// both halves.
pub fn split_window(window: &DataWindow) -> Result<(DataWindow, DataWindow)> {
    let m = window.len();
    if m < 2 {
        return Err(Error::domain(format!("cannot split a window of length {m}")));
    }
    let v = window.values();
    let (left, right) = if m % 2 == 0 {
        (&v[..m / 2], &v[m / 2..])
    } else {
        (&v[..m.div_ceil(2)], &v[m / 2..])
    };
    Ok((DataWindow(left.to_vec()), DataWindow(right.to_vec())))
}

fn clamp_to_grid(v: f64, grid: &UniverseGrid) -> f64 {
    v.clamp(grid.lo(), grid.hi())
}

/// Type-1 set for a window with any method. Point data is adapted for the
/// interval and discrete methods: consecutive values span the intervals, and
/// every value is stated with membership 1.
pub fn build_type1(
    window: &DataWindow,
    method: GenerationMethod,
    grid: &UniverseGrid,
    normalize: bool,
) -> Result<DiscretizedFuzzySet> {
    let set = match method {
        GenerationMethod::Gaussian => build_gaussian(window, grid)?,
        GenerationMethod::SingletonPolling { interpolation } => {
            build_singleton_polling(window, interpolation, grid)?
        }
        GenerationMethod::IntervalPolling { normalize } => {
            let v = window.values();
            let intervals: Vec<(f64, f64)> = if v.len() == 1 {
                vec![(v[0], v[0])]
            } else {
                v.windows(2).map(|p| (p[0].min(p[1]), p[0].max(p[1]))).collect()
            };
            // its own normalization flag replaces the global one
            return build_interval_polling(&intervals, normalize, grid);
        }
        GenerationMethod::Discrete => {
            let pairs: Vec<(f64, f64)> = window
                .values()
                .iter()
                .map(|&v| (clamp_to_grid(v, grid), 1.0))
                .collect();
            build_discrete(&pairs, grid)?
        }
    };
    if normalize && !set.is_empty() {
        set.normalize()
    } else {
        Ok(set)
    }
}

/// zSlices whose footprint shrinks linearly from the full FOU towards its
/// centre line; slice `k` of `n` sits at level `k / n`, so the top slice is
/// the centre itself.
pub fn zslices_from_fou(
    lower: &DiscretizedFuzzySet,
    upper: &DiscretizedFuzzySet,
    n_zslices: usize,
) -> Result<Vec<ZSlice>> {
    if n_zslices == 0 {
        return Err(Error::domain("n_zslices must be positive"));
    }
    let grid = *lower.grid();
    (1..=n_zslices)
        .map(|k| {
            let z = if k == n_zslices { 1.0 } else { k as f64 / n_zslices as f64 };
            let (mut lo, mut hi) = (Vec::with_capacity(grid.n_points()), Vec::with_capacity(grid.n_points()));
            for (&l, &u) in lower.memberships().iter().zip(upper.memberships()) {
                let centre = 0.5 * (l + u);
                if k == n_zslices {
                    lo.push(centre);
                    hi.push(centre);
                } else {
                    lo.push(l + z * (centre - l));
                    hi.push(u - z * (u - centre));
                }
            }
            Ok(ZSlice {
                z,
                lower: DiscretizedFuzzySet::new(grid, lo)?,
                upper: DiscretizedFuzzySet::new(grid, hi)?,
            })
        })
        .collect()
}

/// Type-2 set from a window: one type-1 set per half, aggregated by
/// pointwise min (lower) and max (upper).
pub fn build_type2(
    window: &DataWindow,
    method: GenerationMethod,
    kind: Type2Kind,
    n_zslices: usize,
    grid: &UniverseGrid,
    normalize: bool,
) -> Result<Type2FuzzySet> {
    let (left, right) = split_window(window)?;
    let a = build_type1(&left, method, grid, normalize)?;
    let b = build_type1(&right, method, grid, normalize)?;
    let lower = a.zip_with(&b, f64::min)?;
    let upper = a.zip_with(&b, f64::max)?;
    match kind {
        Type2Kind::It2 => Type2FuzzySet::interval(lower, upper),
        Type2Kind::Gt2 => {
            let slices = zslices_from_fou(&lower, &upper, n_zslices)?;
            Type2FuzzySet::general(lower, upper, slices)
        }
    }
}

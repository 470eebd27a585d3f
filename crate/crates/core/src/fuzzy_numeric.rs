//! Discretized fuzzy sets over a bounded universe of discourse.
//!
//! Every set in the crate lives on a [`UniverseGrid`]: a closed interval
//! sampled at `n_points` uniformly spaced points (both endpoints included).
//! Between samples a set is the linear interpolant of its neighbours, and it
//! is zero outside the grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed when checking `[0, 1]` bounds and nesting of membership
/// vectors built from floating point arithmetic.
pub(crate) const MEMBERSHIP_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniverseGrid {
    lo: f64,
    hi: f64,
    n_points: usize,
}

impl Default for UniverseGrid {
    /// `[0, 10]` sampled at 101 points.
    fn default() -> Self {
        UniverseGrid {
            lo: 0.0,
            hi: 10.0,
            n_points: 101,
        }
    }
}

impl UniverseGrid {
    pub fn new(lo: f64, hi: f64, n_points: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::domain(format!(
                "universe bounds must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        if n_points < 2 {
            return Err(Error::domain(format!(
                "universe needs at least 2 samples, got {n_points}"
            )));
        }
        Ok(UniverseGrid { lo, hi, n_points })
    }

    /// `[0, 1]` with 101 samples, the natural universe for min-max scaled data.
    pub fn unit() -> Self {
        UniverseGrid {
            lo: 0.0,
            hi: 1.0,
            n_points: 101,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n_points - 1) as f64
    }

    /// Position of sample `i`; the last sample is exactly `hi`.
    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.n_points - 1) as f64
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Index of the sample closest to `x`, clamped into the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let t = ((x - self.lo) / self.spacing()).round();
        if t <= 0.0 {
            0
        } else {
            (t as usize).min(self.n_points - 1)
        }
    }

    /// Same grid shifted by `offset`.
    pub fn shifted(&self, offset: f64) -> Self {
        UniverseGrid {
            lo: self.lo + offset,
            hi: self.hi + offset,
            n_points: self.n_points,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedFuzzySet {
    grid: UniverseGrid,
    memberships: Vec<f64>,
    normalized: bool,
}

impl DiscretizedFuzzySet {
    /// Builds a set from one membership degree per grid sample.
    ///
    /// Degrees within `1e-12` of the unit interval are clamped into it; any
    /// other out-of-range or non-finite degree is rejected.
    pub fn new(grid: UniverseGrid, memberships: Vec<f64>) -> Result<Self> {
        if memberships.len() != grid.n_points() {
            return Err(Error::domain(format!(
                "expected {} membership degrees, got {}",
                grid.n_points(),
                memberships.len()
            )));
        }
        let mut memberships = memberships;
        for (i, m) in memberships.iter_mut().enumerate() {
            if !m.is_finite() || *m < -MEMBERSHIP_SLACK || *m > 1.0 + MEMBERSHIP_SLACK {
                return Err(Error::domain(format!(
                    "membership {m} at sample {i} is outside [0, 1]"
                )));
            }
            *m = m.clamp(0.0, 1.0);
        }
        Ok(DiscretizedFuzzySet {
            grid,
            memberships,
            normalized: false,
        })
    }

    pub fn zeros(grid: UniverseGrid) -> Self {
        DiscretizedFuzzySet {
            grid,
            memberships: vec![0.0; grid.n_points()],
            normalized: false,
        }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: UniverseGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn grid(&self) -> &UniverseGrid {
        &self.grid
    }

    pub fn memberships(&self) -> &[f64] {
        &self.memberships
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn height(&self) -> f64 {
        self.memberships.iter().copied().fold(0.0, f64::max)
    }

    /// True when no sample has a strictly positive degree.
    pub fn is_empty(&self) -> bool {
        self.memberships.iter().all(|&m| m == 0.0)
    }

    /// Membership at an arbitrary point.
    pub fn evaluate(&self, x: f64) -> f64 {
        let g = &self.grid;
        if !g.contains(x) {
            return 0.0;
        }
        let t = (x - g.lo()) / g.spacing();
        let i = (t.floor() as usize).min(g.n_points() - 2);
        let frac = (t - i as f64).clamp(0.0, 1.0);
        let (a, b) = (self.memberships[i], self.memberships[i + 1]);
        (a + frac * (b - a)).clamp(0.0, 1.0)
    }

    /// Crisp set `{x : mu(x) >= alpha}` as sorted disjoint intervals. Interval
    /// ends are placed where the interpolant crosses `alpha`.
    pub fn alpha_cut(&self, alpha: f64) -> Result<AlphaCut> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        let g = &self.grid;
        let m = &self.memberships;
        let h = g.spacing();
        let n = m.len();
        let mut intervals = Vec::new();
        let mut i = 0;
        while i < n {
            if m[i] < alpha {
                i += 1;
                continue;
            }
            let start = i;
            while i + 1 < n && m[i + 1] >= alpha {
                i += 1;
            }
            let end = i;
            let left = if start == 0 {
                g.lo()
            } else {
                let (below, above) = (m[start - 1], m[start]);
                g.point(start) - (above - alpha) / (above - below) * h
            };
            let right = if end + 1 == n {
                g.hi()
            } else {
                let (above, below) = (m[end], m[end + 1]);
                g.point(end) + (above - alpha) / (above - below) * h
            };
            intervals.push((left, right));
            i += 1;
        }
        Ok(AlphaCut {
            level: alpha,
            intervals,
        })
    }

    /// Rescales so the highest degree is exactly 1.
    pub fn normalize(&self) -> Result<Self> {
        let height = self.height();
        if height <= 0.0 {
            return Err(Error::Degenerate(
                "cannot normalize a set with no positive membership".into(),
            ));
        }
        let memberships = self
            .memberships
            .iter()
            .map(|&m| if m == height { 1.0 } else { m / height })
            .collect();
        Ok(DiscretizedFuzzySet {
            grid: self.grid,
            memberships,
            normalized: true,
        })
    }

    /// Pointwise combination of two sets on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Self::new(
            self.grid,
            self.memberships
                .iter()
                .zip(&other.memberships)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub(crate) fn with_flag(mut self, normalized: bool) -> Self {
        self.normalized = normalized;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaCut {
    pub level: f64,
    /// Sorted, pairwise disjoint `(left, right)` pairs with `left <= right`.
    pub intervals: Vec<(f64, f64)>,
}

impl AlphaCut {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Whether `[left, right]` lies inside one of the intervals of this cut.
    pub fn covers(&self, left: f64, right: f64, tol: f64) -> bool {
        self.intervals
            .iter()
            .any(|&(a, b)| a <= left + tol && right <= b + tol)
    }
}

/// One horizontal slice of a general type-2 set: an interval type-2 set
/// holding the secondary grade `z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZSlice {
    pub z: f64,
    pub lower: DiscretizedFuzzySet,
    pub upper: DiscretizedFuzzySet,
}

/// Lower/upper membership pair, optionally refined into zSlices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Type2FuzzySet {
    lower: DiscretizedFuzzySet,
    upper: DiscretizedFuzzySet,
    zslices: Option<Vec<ZSlice>>,
}

fn check_nested(inner: &[f64], outer: &[f64], what: &str) -> Result<()> {
    for (i, (a, b)) in inner.iter().zip(outer).enumerate() {
        if *a > *b + MEMBERSHIP_SLACK {
            return Err(Error::domain(format!(
                "{what} violated at sample {i}: {a} > {b}"
            )));
        }
    }
    Ok(())
}

impl Type2FuzzySet {
    /// Interval type-2 set; `lower` must not exceed `upper` anywhere.
    pub fn interval(lower: DiscretizedFuzzySet, upper: DiscretizedFuzzySet) -> Result<Self> {
        if lower.grid() != upper.grid() {
            return Err(Error::GridMismatch);
        }
        check_nested(lower.memberships(), upper.memberships(), "lower <= upper")?;
        Ok(Type2FuzzySet {
            lower,
            upper,
            zslices: None,
        })
    }

    /// General type-2 set in zSlice form. Levels must rise strictly and end at
    /// 1, and each slice must sit inside the footprint of uncertainty.
    pub fn general(
        lower: DiscretizedFuzzySet,
        upper: DiscretizedFuzzySet,
        zslices: Vec<ZSlice>,
    ) -> Result<Self> {
        let base = Self::interval(lower, upper)?;
        if zslices.is_empty() {
            return Err(Error::domain("a general type-2 set needs at least one zSlice"));
        }
        let mut prev = 0.0;
        for s in &zslices {
            if !(s.z > prev && s.z <= 1.0) {
                return Err(Error::domain("zSlice levels must increase strictly within (0, 1]"));
            }
            prev = s.z;
            if s.lower.grid() != base.lower.grid() || s.upper.grid() != base.lower.grid() {
                return Err(Error::GridMismatch);
            }
            check_nested(base.lower.memberships(), s.lower.memberships(), "base lower <= slice lower")?;
            check_nested(s.lower.memberships(), s.upper.memberships(), "slice lower <= slice upper")?;
            check_nested(s.upper.memberships(), base.upper.memberships(), "slice upper <= base upper")?;
        }
        if (prev - 1.0).abs() > MEMBERSHIP_SLACK {
            return Err(Error::domain("the last zSlice level must be 1"));
        }
        Ok(Type2FuzzySet {
            zslices: Some(zslices),
            ..base
        })
    }

    pub fn lower(&self) -> &DiscretizedFuzzySet {
        &self.lower
    }

    pub fn upper(&self) -> &DiscretizedFuzzySet {
        &self.upper
    }

    pub fn grid(&self) -> &UniverseGrid {
        self.lower.grid()
    }

    pub fn zslices(&self) -> Option<&[ZSlice]> {
        self.zslices.as_deref()
    }

    pub fn is_general(&self) -> bool {
        self.zslices.is_some()
    }

    /// Primary membership interval at sample `i`.
    pub fn fou_at(&self, i: usize) -> (f64, f64) {
        (self.lower.memberships()[i], self.upper.memberships()[i])
    }
}

//! Fuzzy set comparison measures.
//!
//! Each measure maps a pair of fuzzy sets to a compatibility in `[0, 1]`,
//! where 1 means identical. Seven of them compare type-2 sets; the McCulloch
//! measure is a signed directional distance between type-1 sets that is
//! mapped into `[0, 1]` through `1 / (1 + |d|)`.
//!
//! Measures are looked up by name through a [`MeasureRegistry`], which also
//! accepts user-supplied implementations of [`Measure`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fs_builder::{FuzzyRepr, SetSpec};
use crate::fs_builder::DataWindow;
use crate::fuzzy_numeric::{AlphaCut, DiscretizedFuzzySet, Type2FuzzySet, ZSlice};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureId {
    Mcculloch,
    ZengLi,
    JaccardGt2,
    ZhaoCrisp,
    HaoCrisp,
    YangLin,
    MohamedAbdaala,
    HungYang,
}

impl MeasureId {
    pub const ALL: [MeasureId; 8] = [
        MeasureId::Mcculloch,
        MeasureId::ZengLi,
        MeasureId::JaccardGt2,
        MeasureId::ZhaoCrisp,
        MeasureId::HaoCrisp,
        MeasureId::YangLin,
        MeasureId::MohamedAbdaala,
        MeasureId::HungYang,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MeasureId::Mcculloch => "mcculloch",
            MeasureId::ZengLi => "zeng_li",
            MeasureId::JaccardGt2 => "jaccard_gt2",
            MeasureId::ZhaoCrisp => "zhao_crisp",
            MeasureId::HaoCrisp => "hao_crisp",
            MeasureId::YangLin => "yang_lin",
            MeasureId::MohamedAbdaala => "mohamed_abdaala",
            MeasureId::HungYang => "hung_yang",
        }
    }

    pub fn domain(&self) -> SetDomain {
        match self {
            MeasureId::Mcculloch => SetDomain::Type1,
            MeasureId::ZengLi => SetDomain::Type2,
            _ => SetDomain::GeneralType2,
        }
    }

    pub fn valid_names() -> String {
        Self::ALL.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMeasure {
                name: s.to_string(),
                valid: Self::valid_names(),
            })
    }
}

/// Which sets a measure can compare.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetDomain {
    Type1,
    /// Interval or general type-2.
    Type2,
    /// Type-2 sets carrying zSlices.
    GeneralType2,
}

impl SetDomain {
    fn describe(&self) -> &'static str {
        match self {
            SetDomain::Type1 => "type-1",
            SetDomain::Type2 => "type-2",
            SetDomain::GeneralType2 => "general type-2 (zSlice)",
        }
    }
}

/// Tunables of the built-in measures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MeasureParams {
    /// Number of alpha levels `{1/L, 2/L, ..., 1}` for the McCulloch distance.
    pub mcculloch_levels: usize,
    /// Alpha-plane count for zhao_crisp; `None` uses the zSlice count.
    pub zhao_planes: Option<usize>,
    /// Primary-membership samples per zSlice interval for the secondary-grade
    /// measures.
    pub secondary_samples: usize,
}

impl Default for MeasureParams {
    fn default() -> Self {
        MeasureParams {
            mcculloch_levels: 20,
            zhao_planes: None,
            secondary_samples: 11,
        }
    }
}

/// A compatibility measure between two fuzzy representations.
pub trait Measure: Send + Sync {
    fn name(&self) -> &str;

    fn domain(&self) -> SetDomain;

    /// Compatibility in `[0, 1]`.
    fn compatibility(&self, a: &FuzzyRepr, b: &FuzzyRepr) -> Result<f64>;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuiltinMeasure {
    pub id: MeasureId,
    pub params: MeasureParams,
}

impl BuiltinMeasure {
    pub fn new(id: MeasureId, params: MeasureParams) -> Self {
        BuiltinMeasure { id, params }
    }

    fn mismatch(&self) -> Error {
        Error::KindMismatch {
            measure: self.id.name().to_string(),
            expected: self.id.domain().describe(),
        }
    }

    fn type2<'a>(&self, a: &'a FuzzyRepr, b: &'a FuzzyRepr) -> Result<(&'a Type2FuzzySet, &'a Type2FuzzySet)> {
        match (a, b) {
            (FuzzyRepr::Type2(a), FuzzyRepr::Type2(b)) => {
                if self.id.domain() == SetDomain::GeneralType2 && !(a.is_general() && b.is_general()) {
                    return Err(self.mismatch());
                }
                Ok((a, b))
            }
            _ => Err(self.mismatch()),
        }
    }
}

impl Measure for BuiltinMeasure {
    fn name(&self) -> &str {
        self.id.name()
    }

    fn domain(&self) -> SetDomain {
        self.id.domain()
    }

    fn compatibility(&self, a: &FuzzyRepr, b: &FuzzyRepr) -> Result<f64> {
        if self.id == MeasureId::Mcculloch {
            return match (a, b) {
                (FuzzyRepr::Type1(a), FuzzyRepr::Type1(b)) => {
                    mcculloch_distance(a, b, self.params.mcculloch_levels).map(distance_to_compatibility)
                }
                _ => Err(self.mismatch()),
            };
        }
        let (a, b) = self.type2(a, b)?;
        let samples = self.params.secondary_samples;
        match self.id {
            MeasureId::ZengLi => zeng_li(a, b),
            MeasureId::JaccardGt2 => jaccard_gt2(a, b),
            MeasureId::ZhaoCrisp => {
                let planes = self
                    .params
                    .zhao_planes
                    .unwrap_or_else(|| a.zslices().map_or(1, |s| s.len()));
                zhao_crisp(a, b, planes)
            }
            MeasureId::HaoCrisp => hao_crisp(a, b),
            MeasureId::YangLin => yang_lin(a, b, samples),
            MeasureId::MohamedAbdaala => mohamed_abdaala(a, b, samples),
            MeasureId::HungYang => hung_yang(a, b),
            MeasureId::Mcculloch => unreachable!(),
        }
    }
}

/// Name-keyed collection of measures.
#[derive(Clone)]
pub struct MeasureRegistry {
    entries: BTreeMap<String, Arc<dyn Measure>>,
}

impl fmt::Debug for MeasureRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.keys()).finish()
    }
}

impl Default for MeasureRegistry {
    fn default() -> Self {
        Self::with_builtins(MeasureParams::default())
    }
}

impl MeasureRegistry {
    pub fn empty() -> Self {
        MeasureRegistry {
            entries: BTreeMap::new(),
        }
    }

    pub fn with_builtins(params: MeasureParams) -> Self {
        let mut reg = Self::empty();
        for id in MeasureId::ALL {
            reg.register(Arc::new(BuiltinMeasure::new(id, params)));
        }
        reg
    }

    /// Adds or replaces a measure under its own name.
    pub fn register(&mut self, measure: Arc<dyn Measure>) {
        self.entries.insert(measure.name().to_string(), measure);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Measure>> {
        self.entries.get(name).cloned().ok_or_else(|| Error::UnknownMeasure {
            name: name.to_string(),
            valid: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }
}

/// `Σmin / Σmax`, with two empty sides counting as identical.
fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        (num / den).clamp(0.0, 1.0)
    } else if num == 0.0 {
        1.0
    } else {
        0.0
    }
}

fn jaccard(a: &[f64], b: &[f64]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        num += x.min(y);
        den += x.max(y);
    }
    ratio(num, den)
}

fn same_grid(a: &Type2FuzzySet, b: &Type2FuzzySet) -> Result<()> {
    if a.grid() == b.grid() {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

fn jaccard_pair(
    lower_a: &DiscretizedFuzzySet,
    upper_a: &DiscretizedFuzzySet,
    lower_b: &DiscretizedFuzzySet,
    upper_b: &DiscretizedFuzzySet,
) -> f64 {
    0.5 * (jaccard(upper_a.memberships(), upper_b.memberships())
        + jaccard(lower_a.memberships(), lower_b.memberships()))
}

/// Average of the upper and lower Jaccard ratios.
pub fn jaccard_it2(a: &Type2FuzzySet, b: &Type2FuzzySet) -> Result<f64> {
    same_grid(a, b)?;
    Ok(jaccard_pair(a.lower(), a.upper(), b.lower(), b.upper()))
}

fn slice_jaccard(a: &ZSlice, b: &ZSlice) -> f64 {
    jaccard_pair(&a.lower, &a.upper, &b.lower, &b.upper)
}

/// `1 - (1/2n) Σ (|Δlower| + |Δupper|)`.
pub fn zeng_li(a: &Type2FuzzySet, b: &Type2FuzzySet) -> Result<f64> {
    same_grid(a, b)?;
    let n = a.grid().n_points() as f64;
    let total: f64 = (0..a.grid().n_points())
        .map(|i| {
            let (la, ua) = a.fou_at(i);
            let (lb, ub) = b.fou_at(i);
            (la - lb).abs() + (ua - ub).abs()
        })
        .sum();
    Ok((1.0 - total / (2.0 * n)).clamp(0.0, 1.0))
}

fn matched_slices<'a>(a: &'a Type2FuzzySet, b: &'a Type2FuzzySet) -> Result<(&'a [ZSlice], &'a [ZSlice])> {
    same_grid(a, b)?;
    let (sa, sb) = match (a.zslices(), b.zslices()) {
        (Some(sa), Some(sb)) => (sa, sb),
        _ => return Err(Error::domain("measure needs zSlices on both sets")),
    };
    if sa.len() != sb.len() || sa.iter().zip(sb).any(|(x, y)| x.z != y.z) {
        return Err(Error::domain("zSlice levels of the two sets differ"));
    }
    Ok((sa, sb))
}

/// Level-weighted mean of per-slice Jaccard similarities.
pub fn jaccard_gt2(a: &Type2FuzzySet, b: &Type2FuzzySet) -> Result<f64> {
    let (sa, sb) = matched_slices(a, b)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in sa.iter().zip(sb) {
        num += x.z * slice_jaccard(x, y);
        den += x.z;
    }
    Ok((num / den).clamp(0.0, 1.0))
}

/// Unweighted mean of Jaccard similarities over the alpha-planes
/// `0, 1/Δ, ..., 1`. Plane `α` is the lowest zSlice with level `>= α`; the
/// zero plane is the whole footprint.
pub fn zhao_crisp(a: &Type2FuzzySet, b: &Type2FuzzySet, delta: usize) -> Result<f64> {
    if delta == 0 {
        return Err(Error::domain("zhao_crisp needs at least one alpha-plane step"));
    }
    let (sa, sb) = matched_slices(a, b)?;
    let mut total = 0.0;
    for j in 0..=delta {
        let alpha = j as f64 / delta as f64;
        total += if j == 0 {
            jaccard_pair(a.lower(), a.upper(), b.lower(), b.upper())
        } else {
            let k = sa
                .iter()
                .position(|s| s.z >= alpha - 1e-12)
                .unwrap_or(sa.len() - 1);
            slice_jaccard(&sa[k], &sb[k])
        };
    }
    Ok((total / (delta + 1) as f64).clamp(0.0, 1.0))
}

/// Centroid of the discrete type-1 set `{ s_k / z_k }` of per-slice
/// similarities. Equal similarity values are merged with the larger level.
pub fn hao_crisp(a: &Type2FuzzySet, b: &Type2FuzzySet) -> Result<f64> {
    let (sa, sb) = matched_slices(a, b)?;
    let mut support: Vec<(f64, f64)> = Vec::with_capacity(sa.len());
    for (x, y) in sa.iter().zip(sb) {
        let s = slice_jaccard(x, y);
        match support.iter_mut().find(|(v, _)| (v - s).abs() <= 1e-12) {
            Some(entry) => entry.1 = entry.1.max(x.z),
            None => support.push((s, x.z)),
        }
    }
    let num: f64 = support.iter().map(|(s, z)| s * z).sum();
    let den: f64 = support.iter().map(|(_, z)| z).sum();
    Ok((num / den).clamp(0.0, 1.0))
}

/// Secondary grade of a zSlice set at sample `i` and primary grade `u`: the
/// highest level among slices whose interval at `i` contains `u`.
fn secondary_grade(slices: &[ZSlice], i: usize, u: f64) -> f64 {
    slices
        .iter()
        .filter(|s| s.lower.memberships()[i] - 1e-12 <= u && u <= s.upper.memberships()[i] + 1e-12)
        .map(|s| s.z)
        .fold(0.0, f64::max)
}

/// Primary grades `u` sampled uniformly on every slice interval of both sets
/// at sample `i`, sorted.
fn primary_samples(sa: &[ZSlice], sb: &[ZSlice], i: usize, per_interval: usize) -> Vec<f64> {
    let per = per_interval.max(1);
    let mut us = Vec::with_capacity(per * (sa.len() + sb.len()));
    for s in sa.iter().chain(sb) {
        let (l, h) = (s.lower.memberships()[i], s.upper.memberships()[i]);
        for j in 0..per {
            let t = if per == 1 { 0.5 } else { j as f64 / (per - 1) as f64 };
            us.push(l + t * (h - l));
        }
    }
    us.sort_by(f64::total_cmp);
    us
}

fn secondary_measure(
    a: &Type2FuzzySet,
    b: &Type2FuzzySet,
    per_interval: usize,
    at_sample: impl Fn(&[f64], &[f64], &[f64]) -> f64,
) -> Result<f64> {
    let (sa, sb) = matched_slices(a, b)?;
    let n = a.grid().n_points();
    let mut total = 0.0;
    for i in 0..n {
        let us = primary_samples(sa, sb, i, per_interval);
        let f: Vec<f64> = us.iter().map(|&u| secondary_grade(sa, i, u)).collect();
        let g: Vec<f64> = us.iter().map(|&u| secondary_grade(sb, i, u)).collect();
        total += at_sample(&us, &f, &g);
    }
    Ok((total / n as f64).clamp(0.0, 1.0))
}

/// Mean over universe samples of `Σ_u min(u f, u g) / Σ_u max(u f, u g)`.
pub fn yang_lin(a: &Type2FuzzySet, b: &Type2FuzzySet, per_interval: usize) -> Result<f64> {
    secondary_measure(a, b, per_interval, |us, f, g| {
        let (mut num, mut den) = (0.0, 0.0);
        for ((&u, &fu), &gu) in us.iter().zip(f).zip(g) {
            num += (u * fu).min(u * gu);
            den += (u * fu).max(u * gu);
        }
        ratio(num, den)
    })
}

/// Mean over universe samples of `min(Σ 1 - u f, Σ 1 - u g) / max(...)`.
pub fn mohamed_abdaala(a: &Type2FuzzySet, b: &Type2FuzzySet, per_interval: usize) -> Result<f64> {
    secondary_measure(a, b, per_interval, |us, f, g| {
        let sf: f64 = us.iter().zip(f).map(|(u, fu)| 1.0 - u * fu).sum();
        let sg: f64 = us.iter().zip(g).map(|(u, gu)| 1.0 - u * gu).sum();
        ratio(sf.min(sg), sf.max(sg))
    })
}

/// Hausdorff distance between two closed intervals.
fn interval_hausdorff(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

/// `1 - (1/n) Σ_x H_f(x)`, with `H_f` the level-weighted mean Hausdorff
/// distance between the alpha-cuts of the secondary memberships at `x`. The
/// alpha-cut of the secondary membership at level `z_k` is the zSlice `k`
/// interval.
pub fn hung_yang(a: &Type2FuzzySet, b: &Type2FuzzySet) -> Result<f64> {
    let (sa, sb) = matched_slices(a, b)?;
    let n = a.grid().n_points();
    let weight: f64 = sa.iter().map(|s| s.z).sum();
    let mut total = 0.0;
    for i in 0..n {
        let h: f64 = sa
            .iter()
            .zip(sb)
            .map(|(x, y)| {
                let ia = (x.lower.memberships()[i], x.upper.memberships()[i]);
                let ib = (y.lower.memberships()[i], y.upper.memberships()[i]);
                x.z * interval_hausdorff(ia, ib)
            })
            .sum();
        total += h / weight;
    }
    Ok((1.0 - total / n as f64).clamp(0.0, 1.0))
}

/// Mean signed distance over all interval pairs; positive when `b` lies to
/// the right of `a`.
fn mean_pairwise_distance(a: &AlphaCut, b: &AlphaCut) -> f64 {
    let mut total = 0.0;
    for &(a1, a2) in &a.intervals {
        for &(b1, b2) in &b.intervals {
            total += 0.5 * ((b1 - a1) + (b2 - a2));
        }
    }
    total / (a.intervals.len() * b.intervals.len()) as f64
}

/// Directional distance between type-1 sets: the alpha-weighted mean of the
/// pairwise signed interval distances between their alpha-cuts, over the
/// levels `{1/L, ..., 1}` up to the highest level at which either set is
/// non-empty. A set whose cut is empty at some level contributes its
/// highest non-empty cut instead.
pub fn mcculloch_distance(a: &DiscretizedFuzzySet, b: &DiscretizedFuzzySet, levels: usize) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    if levels == 0 {
        return Err(Error::domain("mcculloch needs at least one alpha level"));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("mcculloch distance is undefined for an all-zero set"));
    }
    let ladder: Vec<f64> = (1..=levels)
        .map(|j| if j == levels { 1.0 } else { j as f64 / levels as f64 })
        .collect();
    let cuts_a = ladder.iter().map(|&al| a.alpha_cut(al)).collect::<Result<Vec<_>>>()?;
    let cuts_b = ladder.iter().map(|&al| b.alpha_cut(al)).collect::<Result<Vec<_>>>()?;
    let highest = |cuts: &[AlphaCut]| cuts.iter().rposition(|c| !c.is_empty());
    let (top_a, top_b) = (highest(&cuts_a), highest(&cuts_b));
    // both sets have positive height, but it may sit below the first level
    let (top_a, top_b) = match (top_a, top_b) {
        (Some(x), Some(y)) => (x, y),
        _ => {
            let fa = a.alpha_cut(a.height())?;
            let fb = b.alpha_cut(b.height())?;
            return Ok(mean_pairwise_distance(&fa, &fb));
        }
    };
    let lambda = top_a.max(top_b);
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..=lambda {
        let ca = if cuts_a[k].is_empty() { &cuts_a[top_a] } else { &cuts_a[k] };
        let cb = if cuts_b[k].is_empty() { &cuts_b[top_b] } else { &cuts_b[k] };
        num += ladder[k] * mean_pairwise_distance(ca, cb);
        den += ladder[k];
    }
    Ok(num / den)
}

/// Monotone map from a signed distance to a compatibility in `(0, 1]`.
pub fn distance_to_compatibility(d: f64) -> f64 {
    1.0 / (1.0 + d.abs())
}

/// Builds both windows with `spec` and compares them with `measure`.
pub fn compatibility(
    a: &DataWindow,
    b: &DataWindow,
    spec: &SetSpec,
    measure: &dyn Measure,
) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::domain(format!(
            "windows differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let fa = spec.build(a)?;
    let fb = spec.build(b)?;
    measure.compatibility(&fa, &fb)
}

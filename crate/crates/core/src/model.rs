//! The evolving rule base.
//!
//! Each training step compares the input window with every rule center
//! through the configured fuzzy-set measure, raises or relaxes the rules'
//! arousal, and either creates a rule or moves the most compatible one and
//! refines its kernel consequent. Underused rules are pruned afterwards and
//! the most compatible surviving rule produces the output.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::epl::{self, AntecedentState};
use crate::error::{config, Error, Result};
use crate::fs_builder::{DataWindow, FuzzyRepr, FsType, GenerationMethod, SetSpec, Type2Kind};
use crate::fuzzy_numeric::UniverseGrid;
use crate::krls::{self, ConsequentState, ErrorTracker};
use crate::measures::{BuiltinMeasure, Measure, MeasureId, MeasureParams, SetDomain};

/// Version tag written into model snapshots.
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub alpha: f64,
    pub beta: f64,
    pub lambda_reg: f64,
    /// Rule-creation threshold on the smallest arousal; `None` uses `beta`.
    pub tau: Option<f64>,
    pub sigma: f64,
    /// Weight parameter; carried along, unused by the update equations.
    pub omega: f64,
    pub epsilon: f64,
    pub measure: MeasureId,
    pub measure_params: MeasureParams,
    pub fs_method: GenerationMethod,
    pub fs_type: FsType,
    pub grid: UniverseGrid,
    pub normalize: bool,
    pub admission_factor: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            alpha: 0.001,
            beta: 0.06,
            lambda_reg: 1e-7,
            tau: None,
            sigma: 0.3,
            omega: 1.0,
            epsilon: 0.05,
            measure: MeasureId::ZengLi,
            measure_params: MeasureParams::default(),
            fs_method: GenerationMethod::Gaussian,
            fs_type: FsType::gt2(),
            grid: UniverseGrid::default(),
            normalize: true,
            admission_factor: 0.1,
        }
    }
}

fn in_unit(field: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(config(field, format!("{v} is outside [0, 1]")))
    }
}

impl ModelConfig {
    pub fn tau(&self) -> f64 {
        self.tau.unwrap_or(self.beta)
    }

    pub fn set_spec(&self) -> SetSpec {
        SetSpec {
            method: self.fs_method,
            fs_type: self.fs_type,
            grid: self.grid,
            normalize: self.normalize,
        }
    }

    /// Checks parameter ranges only; see [`ModelConfig::validate`].
    pub fn validate_params(&self) -> Result<()> {
        in_unit("alpha", self.alpha)?;
        in_unit("beta", self.beta)?;
        in_unit("lambda", self.lambda_reg)?;
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(config("sigma", "must be positive"));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(config("epsilon", "must be non-negative"));
        }
        if self.tau().is_nan() {
            return Err(config("tau", "must be a number"));
        }
        if !(self.admission_factor >= 0.0 && self.admission_factor.is_finite()) {
            return Err(config("admission_factor", "must be non-negative"));
        }
        if let FsType::T2 { n_zslices: 0, .. } = self.fs_type {
            return Err(config("zslices", "must be at least 1"));
        }
        if self.measure_params.mcculloch_levels == 0 {
            return Err(config("mcculloch_levels", "must be at least 1"));
        }
        if self.measure_params.zhao_planes == Some(0) {
            return Err(config("zhao_planes", "must be at least 1"));
        }
        Ok(())
    }

    /// Checks parameter ranges and that the set type suits the measure.
    pub fn validate(&self) -> Result<()> {
        self.validate_params()?;
        check_domain(self.measure.name(), self.measure.domain(), self.fs_type)
    }
}

fn check_domain(name: &str, domain: SetDomain, fs_type: FsType) -> Result<()> {
    let ok = match domain {
        SetDomain::Type1 => fs_type == FsType::T1,
        SetDomain::Type2 => matches!(fs_type, FsType::T2 { .. }),
        SetDomain::GeneralType2 => matches!(fs_type, FsType::T2 { kind: Type2Kind::Gt2, .. }),
    };
    if ok {
        Ok(())
    } else {
        let need = match domain {
            SetDomain::Type1 => "t1",
            SetDomain::Type2 => "it2 or gt2",
            SetDomain::GeneralType2 => "gt2",
        };
        Err(config("fs_type", format!("measure `{name}` needs fs_type {need}, got {fs_type}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    /// Identifier unique within a model's lifetime.
    pub id: u64,
    pub antecedent: AntecedentState,
    pub consequent: ConsequentState,
}

/// What happened during one training step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub y_hat: f64,
    /// Id of the rule that produced the output.
    pub output_rule: u64,
    pub created: bool,
    pub pruned: usize,
    pub rules: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub rule_counts: Vec<usize>,
    pub predictions: Vec<f64>,
    pub output_rules: Vec<u64>,
    pub created: Vec<bool>,
}

impl TrainingReport {
    pub fn final_rules(&self) -> usize {
        self.rule_counts.last().copied().unwrap_or(0)
    }

    fn push(&mut self, s: StepOutcome) {
        self.rule_counts.push(s.rules);
        self.predictions.push(s.y_hat);
        self.output_rules.push(s.output_rule);
        self.created.push(s.created);
    }
}

pub struct EvolvingModel {
    config: ModelConfig,
    measure: Arc<dyn Measure>,
    rules: Vec<Rule>,
    tracker: ErrorTracker,
    iteration: u64,
    pruned_last_step: bool,
    next_id: u64,
}

impl Clone for EvolvingModel {
    fn clone(&self) -> Self {
        EvolvingModel {
            config: self.config.clone(),
            measure: Arc::clone(&self.measure),
            rules: self.rules.clone(),
            tracker: self.tracker,
            iteration: self.iteration,
            pruned_last_step: self.pruned_last_step,
            next_id: self.next_id,
        }
    }
}

impl std::fmt::Debug for EvolvingModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EvolvingModel")
            .field("measure", &self.measure.name())
            .field("rules", &self.rules.len())
            .field("iteration", &self.iteration)
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    version: u32,
    measure: String,
    config: ModelConfig,
    rules: Vec<Rule>,
    tracker: ErrorTracker,
    iteration: u64,
    pruned_last_step: bool,
    next_id: u64,
}

impl EvolvingModel {
    /// Model using the built-in measure named in `config`.
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let measure = Arc::new(BuiltinMeasure::new(config.measure, config.measure_params));
        Ok(Self::assemble(config, measure))
    }

    /// Model using an arbitrary measure; `config.measure` is ignored.
    pub fn with_measure(config: ModelConfig, measure: Arc<dyn Measure>) -> Result<Self> {
        config.validate_params()?;
        check_domain(measure.name(), measure.domain(), config.fs_type)?;
        Ok(Self::assemble(config, measure))
    }

    fn assemble(config: ModelConfig, measure: Arc<dyn Measure>) -> Self {
        EvolvingModel {
            config,
            measure,
            rules: Vec::new(),
            tracker: ErrorTracker::default(),
            iteration: 0,
            pruned_last_step: false,
            next_id: 0,
        }
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn measure(&self) -> &dyn Measure {
        self.measure.as_ref()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn tracker(&self) -> &ErrorTracker {
        &self.tracker
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    fn input_dim(&self) -> Option<usize> {
        self.rules.first().map(|r| r.antecedent.center.len())
    }

    fn check_dim(&self, x: &DataWindow) -> Result<()> {
        match self.input_dim() {
            Some(m) if m != x.len() => Err(Error::domain(format!(
                "input has {} elements, the model was trained on {m}",
                x.len()
            ))),
            _ => Ok(()),
        }
    }

    fn new_rule(&mut self, x: &DataWindow, y: f64, kernel_size: f64, k: u64) -> Result<Rule> {
        let id = self.next_id;
        self.next_id += 1;
        Ok(Rule {
            id,
            antecedent: AntecedentState::new(x.clone(), k),
            consequent: ConsequentState::new(x.clone(), y, self.config.lambda_reg, kernel_size)?,
        })
    }

    /// Compatibility of the built input set with every rule center.
    fn compatibilities(&self, fx: &FuzzyRepr) -> Result<Vec<f64>> {
        let spec = self.config.set_spec();
        self.rules
            .iter()
            .map(|r| {
                let fc = spec.build(&r.antecedent.center)?;
                let c = self.measure.compatibility(fx, &fc)?;
                if !c.is_finite() {
                    return Err(Error::domain(format!("measure `{}` returned {c}", self.measure.name())));
                }
                Ok(c.clamp(0.0, 1.0))
            })
            .collect()
    }

    /// Compatibility of `x` with every rule center, in rule order.
    pub fn compatibilities_at(&self, x: &DataWindow) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let fx = self.config.set_spec().build(x)?;
        self.compatibilities(&fx)
    }

    fn argmax(values: &[f64]) -> usize {
        let mut best = 0;
        for (i, v) in values.iter().enumerate() {
            if *v > values[best] {
                best = i;
            }
        }
        best
    }

    /// One training step.
    pub fn fit_sample(&mut self, x: &DataWindow, y: f64) -> Result<StepOutcome> {
        if !y.is_finite() {
            return Err(Error::domain("target must be finite"));
        }
        self.check_dim(x)?;
        let cfg = self.config.clone();

        if self.rules.is_empty() {
            self.iteration += 1;
            let k = self.iteration;
            let rule = self.new_rule(x, y, cfg.sigma, k)?;
            self.rules.push(rule);
            self.rules[0].antecedent.activation_sum += 1.0;
            let y_hat = self.rules[0].consequent.predict(x, cfg.sigma)?;
            return Ok(StepOutcome {
                y_hat,
                output_rule: self.rules[0].id,
                created: true,
                pruned: 0,
                rules: 1,
            });
        }

        let fx = cfg.set_spec().build(x)?;
        let mut compat = self.compatibilities(&fx)?;
        let k = self.iteration + 1;
        for (rule, &c) in self.rules.iter_mut().zip(&compat) {
            rule.antecedent.arousal = epl::update_arousal(rule.antecedent.arousal, c, cfg.beta)?;
        }
        let min_arousal = self
            .rules
            .iter()
            .map(|r| r.antecedent.arousal)
            .fold(f64::INFINITY, f64::min);

        let created = min_arousal > cfg.tau() && !self.pruned_last_step;
        if created {
            let nearest = &self.rules[Self::argmax(&compat)].antecedent.center;
            let nu = krls::init_kernel_size(x, nearest, &self.tracker, cfg.sigma);
            let rule = self.new_rule(x, y, nu, k)?;
            self.rules.push(rule);
            compat.push(1.0);
        } else {
            let i = Self::argmax(&compat);
            let rule = &mut self.rules[i];
            let old = rule.antecedent.center.clone();
            let new = epl::update_center(&old, x, compat[i], rule.antecedent.arousal, cfg.alpha)?;
            rule.antecedent.support_count += 1;
            rule.consequent
                .update(x, y, cfg.lambda_reg, cfg.sigma, cfg.admission_factor)?;
            rule.consequent.kernel_size =
                krls::update_kernel_size(rule.consequent.kernel_size, x, &new, &old, rule.antecedent.support_count)?;
            rule.antecedent.center = new;
        }

        let centers: Vec<&DataWindow> = self.rules.iter().map(|r| &r.antecedent.center).collect();
        let lambdas = epl::normalized_activations_at(x, &centers, cfg.sigma)?;
        for (rule, l) in self.rules.iter_mut().zip(lambdas) {
            rule.antecedent.activation_sum += l;
        }

        let utilities = self
            .rules
            .iter()
            .map(|r| epl::utility(r.antecedent.activation_sum, k, r.antecedent.created_at))
            .collect::<Result<Vec<f64>>>()?;
        let mut keep: Vec<bool> = utilities.iter().map(|u| *u >= cfg.epsilon).collect();
        if !keep.iter().any(|&b| b) {
            keep[Self::argmax(&utilities)] = true;
        }
        let pruned = keep.iter().filter(|&&b| !b).count();
        let mut it = keep.iter();
        self.rules.retain(|_| *it.next().unwrap());
        let mut it = keep.iter();
        compat.retain(|_| *it.next().unwrap());

        let out = Self::argmax(&compat);
        let y_hat = self.rules[out].consequent.predict(x, cfg.sigma)?;
        self.tracker.update(y, y_hat);
        self.pruned_last_step = pruned > 0;
        self.iteration = k;
        Ok(StepOutcome {
            y_hat,
            output_rule: self.rules[out].id,
            created,
            pruned,
            rules: self.rules.len(),
        })
    }

    /// Trains on a whole stream.
    pub fn fit(&mut self, xs: &[DataWindow], ys: &[f64]) -> Result<TrainingReport> {
        if xs.is_empty() {
            return Err(Error::domain("empty training stream"));
        }
        if xs.len() != ys.len() {
            return Err(Error::domain(format!("{} inputs but {} targets", xs.len(), ys.len())));
        }
        let mut report = TrainingReport::default();
        for (x, &y) in xs.iter().zip(ys) {
            report.push(self.fit_sample(x, y)?);
        }
        Ok(report)
    }

    /// Output of the most compatible rule; the model is left untouched.
    pub fn predict_sample(&self, x: &DataWindow) -> Result<f64> {
        if self.rules.is_empty() {
            return Err(Error::domain("the model has not been trained"));
        }
        let compat = self.compatibilities_at(x)?;
        self.rules[Self::argmax(&compat)].consequent.predict(x, self.config.sigma)
    }

    pub fn predict(&self, xs: &[DataWindow]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.predict_sample(x)).collect()
    }

    /// Versioned JSON snapshot of the full model state.
    pub fn to_json(&self) -> Result<String> {
        let snap = Snapshot {
            version: SNAPSHOT_VERSION,
            measure: self.measure.name().to_string(),
            config: self.config.clone(),
            rules: self.rules.clone(),
            tracker: self.tracker,
            iteration: self.iteration,
            pruned_last_step: self.pruned_last_step,
            next_id: self.next_id,
        };
        Ok(serde_json::to_string_pretty(&snap)?)
    }

    /// Restores a snapshot whose measure is one of the built-ins.
    pub fn from_json(json: &str) -> Result<Self> {
        let snap: Snapshot = serde_json::from_str(json)?;
        let measure = Arc::new(BuiltinMeasure::new(snap.measure.parse()?, snap.config.measure_params));
        Self::restore(snap, measure)
    }

    /// Restores a snapshot taken with a user-supplied measure.
    pub fn from_json_with_measure(json: &str, measure: Arc<dyn Measure>) -> Result<Self> {
        let snap: Snapshot = serde_json::from_str(json)?;
        if snap.measure != measure.name() {
            return Err(Error::domain(format!(
                "snapshot was taken with measure `{}`, got `{}`",
                snap.measure,
                measure.name()
            )));
        }
        Self::restore(snap, measure)
    }

    fn restore(snap: Snapshot, measure: Arc<dyn Measure>) -> Result<Self> {
        if snap.version != SNAPSHOT_VERSION {
            return Err(Error::domain(format!(
                "unsupported snapshot version {} (expected {SNAPSHOT_VERSION})",
                snap.version
            )));
        }
        let mut model = Self::with_measure(snap.config, measure)?;
        model.rules = snap.rules;
        model.tracker = snap.tracker;
        model.iteration = snap.iteration;
        model.pruned_last_step = snap.pruned_last_step;
        model.next_id = snap.next_id;
        Ok(model)
    }
}

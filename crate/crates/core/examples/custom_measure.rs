//! Plugging a user-defined compatibility measure into the model.

use std::sync::Arc;

use eplfsm::datasets::{embed_mackey_glass, generate_mackey_glass, normalize_with, Embedding, SeriesSpec};
use eplfsm::measures::SetDomain;
use eplfsm::metrics::rmse;
use eplfsm::{Error, EvolvingModel, FsType, FuzzyRepr, Measure, MeasureRegistry, ModelConfig, Result};

/// `1 - max |Δμ|` over the upper membership functions.
struct SupDistance;

impl Measure for SupDistance {
    fn name(&self) -> &str {
        "sup_distance"
    }

    fn domain(&self) -> SetDomain {
        SetDomain::Type2
    }

    fn compatibility(&self, a: &FuzzyRepr, b: &FuzzyRepr) -> Result<f64> {
        let (FuzzyRepr::Type2(a), FuzzyRepr::Type2(b)) = (a, b) else {
            return Err(Error::KindMismatch { measure: self.name().into(), expected: "type-2" });
        };
        let d = a
            .upper()
            .memberships()
            .iter()
            .zip(b.upper().memberships())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        Ok(1.0 - d)
    }
}

fn main() -> Result<()> {
    let mut registry = MeasureRegistry::default();
    registry.register(Arc::new(SupDistance));
    println!("registered measures: {}", registry.names().join(", "));

    let series = generate_mackey_glass(&SeriesSpec::default())?;
    let (scaled, _) = normalize_with(&series, Embedding::mackey_glass().train_span())?;
    let data = embed_mackey_glass(&scaled)?;
    let cfg = ModelConfig { fs_type: FsType::it2(), ..ModelConfig::default() };
    let mut model = EvolvingModel::with_measure(cfg, registry.get("sup_distance")?)?;
    model.fit(data.train_inputs(), data.train_targets())?;
    let pred = model.predict(data.test_inputs())?;
    println!("sup_distance: {} rules, test RMSE {:.6}", model.rules().len(), rmse(data.test_targets(), &pred)?);
    Ok(())
}

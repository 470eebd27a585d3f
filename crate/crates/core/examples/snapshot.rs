//! Saving a trained model, restoring it, and continuing to learn.

use eplfsm::datasets::{embed_mackey_glass, generate_mackey_glass, normalize_with, Embedding, SeriesSpec};
use eplfsm::{EvolvingModel, ModelConfig};

fn main() -> eplfsm::Result<()> {
    let series = generate_mackey_glass(&SeriesSpec::default())?;
    let (scaled, _) = normalize_with(&series, Embedding::mackey_glass().train_span())?;
    let data = embed_mackey_glass(&scaled)?;
    let (xs, ys) = (data.train_inputs(), data.train_targets());

    let mut model = EvolvingModel::new(ModelConfig::default())?;
    model.fit(&xs[..1500], &ys[..1500])?;
    let json = model.to_json()?;
    println!("snapshot after 1500 samples: {} bytes, {} rules", json.len(), model.rules().len());

    let mut restored = EvolvingModel::from_json(&json)?;
    model.fit(&xs[1500..], &ys[1500..])?;
    restored.fit(&xs[1500..], &ys[1500..])?;
    let same = model.predict(data.test_inputs())? == restored.predict(data.test_inputs())?;
    println!("restored model continues identically: {same}");
    Ok(())
}

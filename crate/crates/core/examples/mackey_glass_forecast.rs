//! Train on the Mackey–Glass benchmark and report test metrics.

use eplfsm::datasets::{embed_mackey_glass, generate_mackey_glass, normalize_with, Embedding, SeriesSpec};
use eplfsm::metrics::MetricReport;
use eplfsm::{EvolvingModel, ModelConfig};

fn main() -> eplfsm::Result<()> {
    let series = generate_mackey_glass(&SeriesSpec::default())?;
    let (scaled, _) = normalize_with(&series, Embedding::mackey_glass().train_span())?;
    let data = embed_mackey_glass(&scaled)?;

    let mut model = EvolvingModel::new(ModelConfig::default())?;
    let report = model.fit(data.train_inputs(), data.train_targets())?;
    let created = report.created.iter().filter(|c| **c).count();
    println!("train: {} samples, {created} rules created, {} kept", data.train_inputs().len(), report.final_rules());

    let pred = model.predict(data.test_inputs())?;
    let m = MetricReport::compute(data.test_targets(), &pred, model.rules().len())?;
    println!("test:  RMSE {:.6}  NDEI {:.6}  MAE {:.6}", m.rmse, m.ndei, m.mae);
    for r in model.rules() {
        println!(
            "rule {}: center {:.3?}, dictionary {}, kernel size {:.4}",
            r.id,
            r.antecedent.center.values(),
            r.consequent.len(),
            r.consequent.kernel_size
        );
    }
    Ok(())
}

//! One-step-ahead close forecasting from a CSV file.
//!
//! Usage: `cargo run --example stock_forecast -- [path] [column]`; defaults
//! to the bundled synthetic fixture.

use eplfsm::experiment::{self, DatasetSpec, ExperimentSpec, Profile};

fn main() -> eplfsm::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/synthetic_taiex.csv").into());
    let mut dataset = DatasetSpec::stock_csv(path);
    if let (DatasetSpec::StockCsv { column, .. }, Some(c)) = (&mut dataset, args.next()) {
        *column = c;
    }
    let mut spec = ExperimentSpec::new(dataset);
    spec.model = Profile::TaiexPaper.config();
    spec.repeats = 3;
    spec.denormalize = true;
    let r = experiment::run_experiment(&spec)?;
    let m = &r.report;
    println!("{}", spec.dataset.label());
    println!("ER2 {:.5}  NDEI {:.5}  MAPE {:.5}  rules {}", m.er2, m.ndei, m.mape, m.final_rules);
    println!("runtime {:.3} ± {:.3} s", m.runtime_mean_s, m.runtime_std_s);
    for (a, p) in r.actuals.iter().zip(&r.predictions).take(5) {
        println!("actual {a:>10.2}  predicted {p:>10.2}");
    }
    Ok(())
}

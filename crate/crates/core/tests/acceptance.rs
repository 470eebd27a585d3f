//! One PASS/FAIL line per acceptance criterion.
//!
//! The process exits 0 after printing the report. Set `ACCEPTANCE_STRICT=1`
//! to exit 1 when any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eplfsm::datasets::{generate_mackey_glass, SeriesSpec};
use eplfsm::experiment::{self, DatasetSpec, ExperimentSpec};
use eplfsm::krls::{kernel, ConsequentState};
use eplfsm::measures::{jaccard_it2, zeng_li, BuiltinMeasure, MeasureParams};
use eplfsm::metrics::{self, mae, mape, ndei, rmse};
use eplfsm::{
    DataWindow, DiscretizedFuzzySet, EvolvingModel, GenerationMethod, Interpolation, Measure, MeasureId, ModelConfig,
    Result, SetSpec, Type2FuzzySet, UniverseGrid,
};

const KRLS_TOL: f64 = 1e-8;
const KRLS_BUDGET_S: f64 = 5.0;
const IDENTITY_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-12;
const GOLDEN_TOL: f64 = 1e-12;
const FIXED_POINT_TOL: f64 = 1e-6;
const MG_RMSE_GATE: f64 = 0.01;
const MG_RULES_GATE: usize = 3;
const MG_BUDGET_S: f64 = 600.0;
const REFERENCE_RMSE: f64 = 0.0005451;
const REFERENCE_RULES: usize = 1;
const AGREEMENT_TOL: f64 = 1e-6;
const METRIC_TOL: f64 = 1e-12;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict { pass, detail: detail.into() }
    }
}

fn w(v: &[f64]) -> DataWindow {
    DataWindow::new(v.to_vec()).unwrap()
}

fn dense_theta(xs: &[DataWindow], ys: &[f64], lambda: f64, sigma: f64) -> DVector<f64> {
    let n = xs.len();
    let k = DMatrix::from_fn(n, n, |i, j| kernel(&xs[i], &xs[j], sigma).unwrap() + if i == j { lambda } else { 0.0 });
    k.lu().solve(&DVector::from_column_slice(ys)).expect("regularized Gram is invertible")
}

fn krls_oracle() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut streams = 0;
    for dim in [1usize, 4] {
        for _ in 0..100 {
            let len = rng.random_range(1..=50);
            let lambda = rng.random_range(0.01..=1.0);
            let sigma = rng.random_range(0.2..0.5);
            let xs: Vec<DataWindow> = (0..len)
                .map(|_| w(&(0..dim).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>()))
                .collect();
            let ys: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut s = ConsequentState::new(xs[0].clone(), ys[0], lambda, sigma)?;
            for (x, y) in xs.iter().zip(&ys).skip(1) {
                s.update(x, *y, lambda, sigma, 0.0)?;
            }
            let dense = dense_theta(&xs, &ys, lambda, sigma);
            worst = worst.max((s.theta() - dense).amax());
            streams += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Verdict::new(
        worst <= KRLS_TOL && secs < KRLS_BUDGET_S,
        format!("{streams} streams, max |theta - dense| = {worst:.2e} (tol {KRLS_TOL:e}), {secs:.3} s (budget {KRLS_BUDGET_S} s)"),
    ))
}

fn random_window(rng: &mut ChaCha8Rng) -> DataWindow {
    w(&(0..4).map(|_| rng.random_range(0.0..1.0)).collect::<Vec<_>>())
}

fn measure_identity() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grid = UniverseGrid::unit();
    let methods = [
        GenerationMethod::Gaussian,
        GenerationMethod::SingletonPolling { interpolation: Interpolation::Linear },
        GenerationMethod::IntervalPolling { normalize: true },
        GenerationMethod::Discrete,
    ];
    let (mut worst_identity, mut worst_symmetry) = (0.0f64, 0.0f64);
    let mut out_of_range = 0usize;
    let mut pairs = 0usize;
    for _ in 0..1000 {
        let method = methods[rng.random_range(0..methods.len())];
        let (a, b) = (random_window(&mut rng), random_window(&mut rng));
        for id in MeasureId::ALL {
            let spec = SetSpec { method, fs_type: experiment::natural_fs_type(id), grid, normalize: true };
            let m = BuiltinMeasure::new(id, MeasureParams::default());
            let (fa, fb) = (spec.build(&a)?, spec.build(&b)?);
            worst_identity = worst_identity.max((m.compatibility(&fa, &fa)? - 1.0).abs());
            let ab = m.compatibility(&fa, &fb)?;
            if !(0.0..=1.0).contains(&ab) {
                out_of_range += 1;
            }
            if id != MeasureId::Mcculloch {
                worst_symmetry = worst_symmetry.max((ab - m.compatibility(&fb, &fa)?).abs());
            }
            pairs += 1;
        }
    }
    Ok(Verdict::new(
        worst_identity <= IDENTITY_TOL && out_of_range == 0 && worst_symmetry <= SYMMETRY_TOL,
        format!(
            "{pairs} measure/pair evaluations, max |c(A,A) - 1| = {worst_identity:.2e}, {out_of_range} outside [0,1], max T2 asymmetry = {worst_symmetry:.2e}"
        ),
    ))
}

fn straight_zeng_li(la: &[f64], ua: &[f64], lb: &[f64], ub: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..la.len() {
        s += (la[i] - lb[i]).abs() + (ua[i] - ub[i]).abs();
    }
    1.0 - s / (2.0 * la.len() as f64)
}

fn straight_jaccard(la: &[f64], ua: &[f64], lb: &[f64], ub: &[f64]) -> f64 {
    let (mut un, mut ud, mut ln, mut ld) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..la.len() {
        un += ua[i].min(ub[i]);
        ud += ua[i].max(ub[i]);
        ln += la[i].min(lb[i]);
        ld += la[i].max(lb[i]);
    }
    0.5 * (un / ud + ln / ld)
}

fn golden_fixture() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid = UniverseGrid::unit();
    let n = grid.n_points();
    let draw = |rng: &mut ChaCha8Rng| {
        let upper: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let lower: Vec<f64> = upper.iter().map(|u| u * rng.random_range(0.05..1.0)).collect();
        (lower, upper)
    };
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (la, ua) = draw(&mut rng);
        let (lb, ub) = draw(&mut rng);
        let a = Type2FuzzySet::interval(DiscretizedFuzzySet::new(grid, la.clone())?, DiscretizedFuzzySet::new(grid, ua.clone())?)?;
        let b = Type2FuzzySet::interval(DiscretizedFuzzySet::new(grid, lb.clone())?, DiscretizedFuzzySet::new(grid, ub.clone())?)?;
        worst = worst.max((zeng_li(&a, &b)? - straight_zeng_li(&la, &ua, &lb, &ub)).abs());
        worst = worst.max((jaccard_it2(&a, &b)? - straight_jaccard(&la, &ua, &lb, &ub)).abs());
    }
    Ok(Verdict::new(worst <= GOLDEN_TOL, format!("50 random IT2 pairs, max deviation = {worst:.2e} (tol {GOLDEN_TOL:e})")))
}

fn mg_fixed_point() -> Result<Verdict> {
    let one = generate_mackey_glass(&SeriesSpec { x0: 1.0, length: 10, ..SeriesSpec::default() })?;
    let zero = generate_mackey_glass(&SeriesSpec { x0: 0.0, length: 10, ..SeriesSpec::default() })?;
    let dev = one.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    let zeros = zero.iter().all(|v| *v == 0.0);
    Ok(Verdict::new(
        dev <= FIXED_POINT_TOL && zeros,
        format!("x0=1: max |x - 1| = {dev:.2e} (tol {FIXED_POINT_TOL:e}); x0=0 exactly zero: {zeros}"),
    ))
}

fn mg_spec(measure: MeasureId) -> ExperimentSpec {
    let mut spec = ExperimentSpec::new(DatasetSpec::mackey_glass(17.0));
    spec.model.measure = measure;
    spec.repeats = 1;
    spec
}

fn mg_reproduction() -> Result<Verdict> {
    let start = Instant::now();
    let r = experiment::run_experiment(&mg_spec(MeasureId::ZengLi))?;
    let secs = start.elapsed().as_secs_f64();
    let (e, rules) = (r.report.rmse, r.report.final_rules);
    Ok(Verdict::new(
        e <= MG_RMSE_GATE && rules <= MG_RULES_GATE && secs < MG_BUDGET_S,
        format!(
            "zeng_li/gt2 test RMSE = {e:.7} (gate {MG_RMSE_GATE}, reference {REFERENCE_RMSE}), final rules = {rules} (gate {MG_RULES_GATE}, reference {REFERENCE_RULES}), {secs:.1} s"
        ),
    ))
}

/// Steps the three models in lockstep and records where they first part.
fn cross_measure() -> Result<Verdict> {
    let ids = [MeasureId::ZengLi, MeasureId::MohamedAbdaala, MeasureId::HungYang];
    let (data, _) = DatasetSpec::mackey_glass(17.0).load()?;
    let mut models = ids
        .iter()
        .map(|&id| EvolvingModel::new(ModelConfig { measure: id, ..ModelConfig::default() }))
        .collect::<Result<Vec<_>>>()?;
    let (mut rule_split, mut dict_split, mut output_split) = (None, None, None);
    for (k, (x, y)) in data.train_inputs().iter().zip(data.train_targets()).enumerate() {
        let steps = models.iter_mut().map(|m| m.fit_sample(x, *y)).collect::<Result<Vec<_>>>()?;
        if rule_split.is_none() && steps.iter().any(|s| (s.output_rule, s.rules) != (steps[0].output_rule, steps[0].rules)) {
            rule_split = Some(k);
        }
        if dict_split.is_none() {
            let sizes: Vec<Vec<usize>> =
                models.iter().map(|m| m.rules().iter().map(|r| r.consequent.len()).collect()).collect();
            if sizes.iter().any(|s| *s != sizes[0]) {
                dict_split = Some((k, sizes));
            }
        }
        if output_split.is_none() && steps.iter().any(|s| (s.y_hat - steps[0].y_hat).abs() > AGREEMENT_TOL) {
            output_split = Some(k);
        }
    }
    let mut rmses = Vec::new();
    let mut rules = Vec::new();
    for m in &models {
        let p = m.predict(data.test_inputs())?;
        rmses.push(rmse(data.test_targets(), &p)?);
        rules.push(m.rules().len());
    }
    let spread = rmses.iter().copied().fold(f64::NEG_INFINITY, f64::max) - rmses.iter().copied().fold(f64::INFINITY, f64::min);
    let same_rules = rules.iter().all(|r| *r == rules[0]);
    let mut detail = format!("final rules {rules:?}, RMSE {rmses:.7?}, spread {spread:.2e} (tol {AGREEMENT_TOL:e})");
    match rule_split {
        Some(k) => detail.push_str(&format!("; chosen rules first differ at training step {k}")),
        None => detail.push_str("; chosen rules never differ"),
    }
    if let Some((k, sizes)) = dict_split {
        detail.push_str(&format!("; dictionary sizes first differ at step {k} {sizes:?}"));
    }
    if let Some(k) = output_split {
        detail.push_str(&format!("; outputs first differ by > {AGREEMENT_TOL:e} at step {k}"));
    }
    Ok(Verdict::new(same_rules && spread <= AGREEMENT_TOL, detail))
}

fn metric_correctness() -> Result<Verdict> {
    let close = |a: f64, b: f64| (a - b).abs() <= METRIC_TOL;
    let examples = [
        close(rmse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0])?, (1.0f64 / 3.0).sqrt()),
        close(rmse(&[0.0, 0.0], &[1.0, 1.0])?, 1.0),
        close(ndei(&[0.0, 2.0], &[1.0, 1.0])?, 1.0),
        close(mae(&[0.0, 0.0], &[1.0, -1.0])?, 1.0),
        close(mae(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0])?, 1.0 / 3.0),
        close(metrics::er2(&[0.0, 2.0], &[2.0, 0.0])?, 4.0),
        close(metrics::er2(&[0.0, 2.0], &[1.0, 1.0])?, 1.0),
        close(mape(&[110.0], &[100.0], 1e-8)?, 0.1),
        close(mape(&[1.0], &[0.0], 1e-8)?, 1e8),
    ];
    let hand = examples.iter().filter(|ok| **ok).count();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = 0;
    for _ in 0..1000 {
        let n = rng.random_range(2..40);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let yh: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let mean = y.iter().sum::<f64>() / n as f64;
        let std = (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        let (r, m, nd) = (rmse(&y, &yh)?, mae(&y, &yh)?, ndei(&y, &yh)?);
        if r < m || (nd * std - r).abs() > METRIC_TOL * r.max(1.0) {
            violations += 1;
        }
    }
    Ok(Verdict::new(
        hand == examples.len() && violations == 0,
        format!("{hand}/{} hand examples exact, {violations} invariant violations on 1000 random vectors", examples.len()),
    ))
}

fn strip_runtime(path: &Path) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    if let Some(o) = v.as_object_mut() {
        o.remove("runtime_mean_s");
        o.remove("runtime_std_s");
    }
    v
}

fn determinism() -> Result<Verdict> {
    let tmp = tempfile::tempdir()?;
    let mut dirs = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_eplfsm"))
            .args(["run", "--measure", "zeng_li", "--repeats", "1", "--out"])
            .arg(&out)
            .output()?;
        if !status.status.success() {
            return Ok(Verdict::new(false, format!("run failed: {}", String::from_utf8_lossy(&status.stderr))));
        }
        dirs.push(out);
    }
    let metrics_same = strip_runtime(&dirs[0].join("metrics.json")) == strip_runtime(&dirs[1].join("metrics.json"));
    let preds_same = std::fs::read(dirs[0].join("predictions.csv"))? == std::fs::read(dirs[1].join("predictions.csv"))?;
    Ok(Verdict::new(
        metrics_same && preds_same,
        format!("metrics.json identical (runtime excluded): {metrics_same}; predictions.csv byte-identical: {preds_same}"),
    ))
}

fn grid_shape() -> Result<Verdict> {
    let cells = experiment::run_grid(experiment::grid_specs(&mg_spec(MeasureId::ZengLi), &MeasureId::ALL));
    let table = experiment::format_table(&cells);
    let lines: Vec<&str> = table.lines().collect();
    let header_ok = lines.get(1).is_some_and(|h| {
        ["Measure", "RMSE", "NDEI", "MAE", "Rules", "Runtime"].iter().all(|c| h.contains(c))
    });
    let rows: Vec<&str> = lines.iter().skip(2).copied().collect();
    let named = MeasureId::ALL.iter().zip(&rows).all(|(id, r)| r.starts_with(id.name()) && !r.contains("FAILED"));
    let failed = cells.iter().filter(|c| c.outcome.is_err()).count();
    println!("{table}");
    Ok(Verdict::new(
        header_ok && rows.len() == MeasureId::ALL.len() && named && failed == 0,
        format!("{} rows for {} measures, header ok: {header_ok}, failed cells: {failed}", rows.len(), MeasureId::ALL.len()),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Result<Verdict>); 9] = [
        ("krls oracle equivalence", krls_oracle),
        ("measure identity suite", measure_identity),
        ("golden fixture agreement", golden_fixture),
        ("mackey-glass fixed point", mg_fixed_point),
        ("mackey-glass reproduction", mg_reproduction),
        ("cross-measure agreement", cross_measure),
        ("metric correctness", metric_correctness),
        ("determinism", determinism),
        ("grid table shape", grid_shape),
    ];
    let mut passed = 0;
    let mut lines = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = f().unwrap_or_else(|e| Verdict::new(false, format!("error: {e}")));
        if v.pass {
            passed += 1;
        }
        let line = format!("{} {}. {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
        println!("{line}");
        lines.push(line);
    }
    println!("\nacceptance summary");
    for l in &lines {
        println!("{l}");
    }
    println!("{passed}/{} criteria pass", criteria.len());
    if passed < criteria.len() && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}

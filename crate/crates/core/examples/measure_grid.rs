//! Mackey–Glass results for every built-in measure, run in parallel.

use eplfsm::experiment::{self, DatasetSpec, ExperimentSpec};
use eplfsm::MeasureId;

fn main() {
    let mut base = ExperimentSpec::new(DatasetSpec::mackey_glass(17.0));
    base.repeats = 1;
    let cells = experiment::run_grid(experiment::grid_specs(&base, &MeasureId::ALL));
    print!("{}", experiment::format_table(&cells));
}

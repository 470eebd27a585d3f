//! Compatibility of two windows under every built-in measure.

use eplfsm::experiment::natural_fs_type;
use eplfsm::measures::compatibility;
use eplfsm::{DataWindow, GenerationMethod, MeasureId, MeasureRegistry, SetSpec, UniverseGrid};

fn main() -> eplfsm::Result<()> {
    let registry = MeasureRegistry::default();
    let a = DataWindow::new(vec![0.40, 0.45, 0.52, 0.58])?;
    let near = DataWindow::new(vec![0.42, 0.46, 0.55, 0.60])?;
    let far = DataWindow::new(vec![0.70, 0.78, 0.81, 0.90])?;

    println!("{:<16} {:>8} {:>8} {:>8}", "measure", "self", "near", "far");
    for id in MeasureId::ALL {
        let m = registry.get(id.name())?;
        let spec = SetSpec {
            method: GenerationMethod::Gaussian,
            fs_type: natural_fs_type(id),
            grid: UniverseGrid::unit(),
            normalize: true,
        };
        let c = |b: &DataWindow| compatibility(&a, b, &spec, m.as_ref());
        println!("{:<16} {:>8.4} {:>8.4} {:>8.4}", id.name(), c(&a)?, c(&near)?, c(&far)?);
    }
    Ok(())
}

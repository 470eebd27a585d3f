//! Building type-1 and type-2 fuzzy sets from a data window.

use eplfsm::fs_builder::{build_interval_polling, build_type1, build_type2};
use eplfsm::{DataWindow, GenerationMethod, Interpolation, Type2Kind, UniverseGrid};

fn main() -> eplfsm::Result<()> {
    let grid = UniverseGrid::unit();
    let window = DataWindow::new(vec![0.31, 0.36, 0.42, 0.47])?;

    for method in [
        GenerationMethod::Gaussian,
        GenerationMethod::SingletonPolling { interpolation: Interpolation::Linear },
        GenerationMethod::SingletonPolling { interpolation: Interpolation::Lagrange },
        GenerationMethod::Discrete,
    ] {
        let set = build_type1(&window, method, &grid, true)?;
        let cut = set.alpha_cut(0.5)?;
        let name = method.to_string();
        println!("{name:<20} height {:.3}  mu(0.4) = {:.3}  0.5-cut {:?}", set.height(), set.evaluate(0.4), cut.intervals);
    }

    // interval agreement over three opinions
    let iaa = build_interval_polling(&[(0.2, 0.5), (0.3, 0.6), (0.35, 0.45)], true, &grid)?;
    println!("interval agreement  mu(0.4) = {:.3}, mu(0.55) = {:.3}", iaa.evaluate(0.4), iaa.evaluate(0.55));

    let t2 = build_type2(&window, GenerationMethod::Gaussian, Type2Kind::Gt2, 4, &grid, true)?;
    let i = grid.nearest_index(0.36);
    let (lo, hi) = t2.fou_at(i);
    println!("type-2 FOU at {:.2}: [{lo:.3}, {hi:.3}]", grid.point(i));
    for s in t2.zslices().unwrap_or_default() {
        println!("  zslice z = {:.2}: [{:.3}, {:.3}]", s.z, s.lower.memberships()[i], s.upper.memberships()[i]);
    }
    Ok(())
}

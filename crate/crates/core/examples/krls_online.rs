//! Online kernel regression of a noisy sine with a sparsified dictionary.

use eplfsm::krls::ConsequentState;
use eplfsm::DataWindow;

fn main() -> eplfsm::Result<()> {
    let (lambda, sigma, admission) = (1e-3, 0.3, 0.1);
    let sample = |k: usize| {
        let x = k as f64 * 0.013 % 3.0;
        (x, (2.0 * x).sin() + 0.05 * ((k * 7919) % 13) as f64 / 13.0)
    };
    let (x0, y0) = sample(0);
    let mut krls = ConsequentState::new(DataWindow::new(vec![x0])?, y0, lambda, 0.5)?;
    for k in 1..2000 {
        let (x, y) = sample(k);
        krls.update(&DataWindow::new(vec![x])?, y, lambda, sigma, admission)?;
    }
    println!("dictionary size after 2000 samples: {}", krls.len());
    println!("inverse residual |Q(K + lambda I) - I|: {:.2e}", krls.inverse_residual(lambda, sigma));
    for x in [0.25, 0.75, 1.5, 2.5] {
        let y = krls.predict(&DataWindow::new(vec![x])?, sigma)?;
        println!("f({x:.2}) = {y:+.4}   sin(2x) = {:+.4}", (2.0 * x).sin());
    }
    Ok(())
}

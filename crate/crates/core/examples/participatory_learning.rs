//! Arousal and center dynamics of one antecedent under a regime change.

use eplfsm::epl::{update_arousal, update_center};
use eplfsm::DataWindow;

fn main() -> eplfsm::Result<()> {
    let (alpha, beta) = (0.05, 0.06);
    let mut center = DataWindow::new(vec![0.2, 0.2])?;
    let mut arousal = 0.0;
    let mut warned = false;
    for k in 0..80 {
        let (x, c) = if k < 40 { (0.22, 0.95) } else { (0.8, 0.3) };
        arousal = update_arousal(arousal, c, beta)?;
        center = update_center(&center, &DataWindow::new(vec![x, x])?, c, arousal, alpha)?;
        if k % 8 == 0 {
            println!("k={k:>2} c={c:.2} a={arousal:.4} center={:.4}", center.values()[0]);
        }
        if arousal > beta && !warned {
            warned = true;
            println!("k={k:>2} arousal {arousal:.4} exceeds {beta}: a new rule would be created here");
        }
    }
    Ok(())
}

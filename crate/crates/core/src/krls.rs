//! Kernel recursive least squares consequents.
//!
//! Every rule keeps a dictionary of input windows, coefficients `θ` over
//! that dictionary, the running inverse `Q` of the regularized Gram matrix
//! and the auxiliary matrix `P`. A sample joins the dictionary when it lies
//! at least `admission_factor · ν` away from every stored element.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fs_builder::DataWindow;

/// Smallest kernel size produced by [`update_kernel_size`].
pub const KERNEL_SIZE_FLOOR: f64 = 1e-6;

/// Smoothing factor of the error tracker.
pub const ERROR_SMOOTHING: f64 = 0.8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsequentState {
    dictionary: Vec<DataWindow>,
    theta: DVector<f64>,
    q: DMatrix<f64>,
    p: DMatrix<f64>,
    /// Kernel size `ν`, used by the admission test.
    pub kernel_size: f64,
}

/// Outcome of one consequent update.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateKind {
    Admitted,
    Refined,
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("kernel width must be positive, got {sigma}")))
    }
}

/// Gaussian kernel `exp(-‖x - y‖² / (2σ²))`.
pub fn kernel(x: &DataWindow, y: &DataWindow, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if x.len() != y.len() {
        return Err(Error::domain("kernel of windows with different lengths"));
    }
    Ok(kernel_unchecked(x, y, sigma))
}

fn kernel_unchecked(x: &DataWindow, y: &DataWindow, sigma: f64) -> f64 {
    let d2: f64 = x.values().iter().zip(y.values()).map(|(a, b)| (a - b) * (a - b)).sum();
    (-d2 / (2.0 * sigma * sigma)).exp()
}

/// Distance to, and index of, the nearest dictionary element; ties go to
/// the lowest index.
pub fn nearest_distance(x: &DataWindow, dictionary: &[DataWindow]) -> Result<(f64, usize)> {
    if dictionary.is_empty() {
        return Err(Error::domain("empty dictionary"));
    }
    let mut best = (f64::INFINITY, 0);
    for (j, d) in dictionary.iter().enumerate() {
        let dist = x.euclidean_distance(d);
        if dist < best.0 {
            best = (dist, j);
        }
    }
    Ok(best)
}

impl ConsequentState {
    /// Single-element dictionary with `θ = y / (λ + 1)`, `Q = 1 / (λ + 1)`
    /// and `P = 1`.
    pub fn new(x: DataWindow, y: f64, lambda_reg: f64, kernel_size: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda_reg) {
            return Err(Error::domain(format!("lambda {lambda_reg} is outside [0, 1]")));
        }
        let inv = 1.0 / (lambda_reg + 1.0);
        Ok(ConsequentState {
            dictionary: vec![x],
            theta: DVector::from_element(1, y * inv),
            q: DMatrix::from_element(1, 1, inv),
            p: DMatrix::from_element(1, 1, 1.0),
            kernel_size,
        })
    }

    pub fn dictionary(&self) -> &[DataWindow] {
        &self.dictionary
    }

    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.dictionary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dictionary.is_empty()
    }

    fn dim(&self) -> usize {
        self.dictionary.first().map_or(0, DataWindow::len)
    }

    fn check_input(&self, x: &DataWindow) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::domain(format!(
                "input has {} elements, dictionary holds {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    fn kernel_vector(&self, x: &DataWindow, sigma: f64) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.dictionary.iter().map(|d| kernel_unchecked(d, x, sigma)))
    }

    /// `Σ θ_j κ(x, d_j)`.
    pub fn predict(&self, x: &DataWindow, sigma: f64) -> Result<f64> {
        check_sigma(sigma)?;
        if self.is_empty() {
            return Err(Error::domain("prediction from an empty dictionary"));
        }
        self.check_input(x)?;
        Ok(self.kernel_vector(x, sigma).dot(&self.theta))
    }

    /// Appends `x` to the dictionary and grows `θ`, `Q` and `P`.
    pub fn admit_and_update(&mut self, x: DataWindow, y: f64, lambda_reg: f64, sigma: f64) -> Result<()> {
        check_sigma(sigma)?;
        self.check_input(&x)?;
        let n = self.len();
        let g = self.kernel_vector(&x, sigma);
        let z = &self.q * &g;
        let r = lambda_reg + 1.0 - z.dot(&g);
        if r == 0.0 || !r.is_finite() {
            return Err(Error::SingularUpdate(r));
        }
        let e = y - g.dot(&self.theta);

        let theta_head = &self.theta - &z * (e / r);
        if !(r.recip().is_finite() && theta_head.iter().chain(z.iter()).all(|v| v.is_finite()) && (e / r).is_finite()) {
            return Err(Error::SingularUpdate(r));
        }

        let mut theta = std::mem::replace(&mut self.theta, DVector::zeros(0)).resize_vertically(n + 1, e / r);
        theta.rows_mut(0, n).copy_from(&theta_head);

        let mut q = std::mem::replace(&mut self.q, DMatrix::zeros(0, 0));
        q.ger(1.0 / r, &z, &z, 1.0);
        let mut q = q.resize(n + 1, n + 1, 0.0);
        for i in 0..n {
            q[(i, n)] = -z[i] / r;
            q[(n, i)] = -z[i] / r;
        }
        q[(n, n)] = 1.0 / r;

        let mut p = std::mem::replace(&mut self.p, DMatrix::zeros(0, 0)).resize(n + 1, n + 1, 0.0);
        p[(n, n)] = 1.0;

        self.dictionary.push(x);
        self.theta = theta;
        self.q = q;
        self.p = p;
        Ok(())
    }

    /// Refines `θ` and `P` without growing the dictionary; `Q` is unchanged.
    pub fn update_without_admission(&mut self, x: &DataWindow, y: f64, sigma: f64) -> Result<()> {
        check_sigma(sigma)?;
        self.check_input(x)?;
        let g = self.kernel_vector(x, sigma);
        let z = &self.q * &g;
        let e = y - g.dot(&self.theta);
        let pz = &self.p * &z;
        let denom = 1.0 + z.dot(&pz);
        let step = &self.q * &pz * (e / denom);
        if !(denom.recip().is_finite() && step.iter().chain(pz.iter()).all(|v| v.is_finite())) {
            return Err(Error::SingularUpdate(denom));
        }
        self.theta += step;
        self.p.ger(-1.0 / denom, &pz, &pz, 1.0);
        Ok(())
    }

    /// Admission test followed by the matching update.
    pub fn update(
        &mut self,
        x: &DataWindow,
        y: f64,
        lambda_reg: f64,
        sigma: f64,
        admission_factor: f64,
    ) -> Result<UpdateKind> {
        let (dist, _) = nearest_distance(x, &self.dictionary)?;
        if dist >= admission_factor * self.kernel_size {
            self.admit_and_update(x.clone(), y, lambda_reg, sigma)?;
            Ok(UpdateKind::Admitted)
        } else {
            self.update_without_admission(x, y, sigma)?;
            Ok(UpdateKind::Refined)
        }
    }

    /// Regularized Gram matrix `K + λI` over the dictionary.
    pub fn regularized_gram(&self, lambda_reg: f64, sigma: f64) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| {
            kernel_unchecked(&self.dictionary[i], &self.dictionary[j], sigma) + if i == j { lambda_reg } else { 0.0 }
        })
    }

    /// `‖Q (K + λI) - I‖_∞`: how far `Q` has drifted from the true inverse.
    pub fn inverse_residual(&self, lambda_reg: f64, sigma: f64) -> f64 {
        let n = self.len();
        let prod = &self.q * self.regularized_gram(lambda_reg, sigma) - DMatrix::identity(n, n);
        prod.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }
}

/// Recursive spread estimate
/// `ν² ← ν² + (‖x - υ‖² - ν²) / N + (N - 1) ‖υ - υ_prev‖² / N`, floored.
///
/// For a center that tracks the running mean this reproduces the exact
/// root-mean-square distance of the assigned samples.
pub fn update_kernel_size(
    nu_prev: f64,
    x: &DataWindow,
    center_new: &DataWindow,
    center_old: &DataWindow,
    support_count: u64,
) -> Result<f64> {
    if support_count == 0 {
        return Err(Error::domain("support count must be at least 1"));
    }
    if !(nu_prev > 0.0) {
        return Err(Error::domain(format!("previous kernel size must be positive, got {nu_prev}")));
    }
    let n = support_count as f64;
    let dx = x.euclidean_distance(center_new);
    let dc = center_new.euclidean_distance(center_old);
    let nu2 = nu_prev * nu_prev + (dx * dx - nu_prev * nu_prev) / n + (n - 1.0) * dc * dc / n;
    Ok(nu2.max(0.0).sqrt().max(KERNEL_SIZE_FLOOR))
}

/// Smoothed absolute error and the running maximum of its squashed value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorTracker {
    pub e_hat: f64,
    pub eta_max: f64,
}

impl Default for ErrorTracker {
    fn default() -> Self {
        ErrorTracker {
            e_hat: 0.0,
            eta_max: 0.0,
        }
    }
}

/// `e^-0.5 (2 / (1 + e^-ê) - 1)`.
pub fn eta(e_hat: f64) -> f64 {
    (-0.5f64).exp() * (2.0 / (1.0 + (-e_hat).exp()) - 1.0)
}

impl ErrorTracker {
    pub fn update(&mut self, y: f64, y_hat: f64) {
        self.e_hat = ERROR_SMOOTHING * self.e_hat + (y - y_hat).abs();
        self.eta_max = self.eta_max.max(eta(self.e_hat));
    }
}

/// `‖x - υ‖ / √(2 ln η_max)`, or `sigma` when the logarithm is not positive.
///
/// `η` never exceeds `e^-0.5`, so the fallback is the branch taken in
/// practice.
pub fn init_kernel_size(x: &DataWindow, nearest_center: &DataWindow, tracker: &ErrorTracker, sigma: f64) -> f64 {
    if tracker.eta_max <= 1.0 {
        return sigma;
    }
    let denom = (2.0 * tracker.eta_max.ln()).sqrt();
    (x.euclidean_distance(nearest_center) / denom).max(KERNEL_SIZE_FLOOR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(v: &[f64]) -> DataWindow {
        DataWindow::new(v.to_vec()).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let x = w(&[0.3, 0.1]);
        assert_eq!(kernel(&x, &x, 0.4).unwrap(), 1.0);
        let y = w(&[0.9, -0.2]);
        assert_eq!(kernel(&x, &y, 0.4).unwrap(), kernel(&y, &x, 0.4).unwrap());
        assert!((kernel(&w(&[0.0]), &w(&[1.0]), 0.5).unwrap() - 0.1353352832366127).abs() < 1e-15);
        assert!(kernel(&x, &y, 0.0).is_err());
    }

    #[test]
    fn init_examples() {
        let s = ConsequentState::new(w(&[0.5]), 2.0, 0.0, 0.3).unwrap();
        assert_eq!(s.theta()[0], 2.0);
        let s1 = ConsequentState::new(w(&[0.5]), 2.0, 1.0, 0.3).unwrap();
        assert_eq!(s1.theta()[0], 1.0);
        assert_eq!(s1.q()[(0, 0)], 0.5);
        assert_eq!(s1.p()[(0, 0)], 1.0);
        assert_eq!(s.predict(&w(&[0.5]), 0.3).unwrap(), 2.0);
    }

    #[test]
    fn nearest_examples() {
        let d = vec![w(&[0.0]), w(&[1.0])];
        assert_eq!(nearest_distance(&w(&[1.0]), &d).unwrap(), (0.0, 1));
        let (dist, j) = nearest_distance(&w(&[0.4]), &d).unwrap();
        assert!((dist - 0.4).abs() < 1e-15 && j == 0);
        assert_eq!(nearest_distance(&w(&[0.5]), &d).unwrap().1, 0);
        assert!(nearest_distance(&w(&[0.5]), &[]).is_err());
    }

    /// `(K + λI)^-1 y` by LU, independent of the recursion.
    fn dense_solve(xs: &[DataWindow], ys: &[f64], lambda: f64, sigma: f64) -> DVector<f64> {
        let n = xs.len();
        let k = DMatrix::from_fn(n, n, |i, j| kernel(&xs[i], &xs[j], sigma).unwrap() + if i == j { lambda } else { 0.0 });
        k.lu().solve(&DVector::from_column_slice(ys)).unwrap()
    }

    #[test]
    fn second_point_matches_dense_solve() {
        let (lambda, sigma) = (1e-7, 0.3);
        let mut s = ConsequentState::new(w(&[0.2]), 0.7, lambda, sigma).unwrap();
        s.admit_and_update(w(&[0.6]), -0.1, lambda, sigma).unwrap();
        let expected = dense_solve(&[w(&[0.2]), w(&[0.6])], &[0.7, -0.1], lambda, sigma);
        assert_eq!(s.len(), 2);
        assert_eq!(s.q().shape(), (2, 2));
        assert_eq!(s.p().shape(), (2, 2));
        for i in 0..2 {
            assert!((s.theta()[i] - expected[i]).abs() < 1e-8, "{} vs {}", s.theta()[i], expected[i]);
        }
        assert!(s.inverse_residual(lambda, sigma) < 1e-6);
    }

    #[test]
    fn duplicate_is_not_admitted() {
        let mut s = ConsequentState::new(w(&[0.2, 0.4]), 0.7, 1e-3, 0.3).unwrap();
        assert_eq!(s.update(&w(&[0.2, 0.4]), 0.7, 1e-3, 0.3, 0.1).unwrap(), UpdateKind::Refined);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn admitting_the_same_point_with_zero_lambda_is_singular() {
        let mut s = ConsequentState::new(w(&[0.2]), 0.7, 0.0, 0.3).unwrap();
        assert!(matches!(s.admit_and_update(w(&[0.2]), 0.7, 0.0, 0.3), Err(Error::SingularUpdate(_))));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn refinement_fixed_point_and_decay() {
        let (lambda, sigma) = (1e-3, 0.5);
        let mut s = ConsequentState::new(w(&[0.0]), 1.0, lambda, sigma).unwrap();
        s.admit_and_update(w(&[1.0]), 0.0, lambda, sigma).unwrap();
        let x = w(&[0.4]);
        let exact = s.predict(&x, sigma).unwrap();
        let before = s.theta().clone();
        s.update_without_admission(&x, exact, sigma).unwrap();
        assert_eq!(s.theta(), &before);
        assert_eq!(s.len(), 2);
        let q_before = s.q().clone();
        let target = 0.9;
        let mut last = f64::INFINITY;
        for _ in 0..20 {
            let err = (target - s.predict(&x, sigma).unwrap()).abs();
            assert!(err < last, "{err} >= {last}");
            last = err;
            s.update_without_admission(&x, target, sigma).unwrap();
        }
        assert_eq!(s.q(), &q_before);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn prediction_matches_kernel_expansion() {
        let sigma = 0.4;
        let mut s = ConsequentState::new(w(&[0.1, 0.3]), 0.5, 0.01, sigma).unwrap();
        s.admit_and_update(w(&[0.8, 0.2]), 0.9, 0.01, sigma).unwrap();
        let x = w(&[0.45, 0.25]);
        let direct: f64 = s
            .dictionary()
            .iter()
            .zip(s.theta().iter())
            .map(|(d, t)| {
                let d2 = (x.values()[0] - d.values()[0]).powi(2) + (x.values()[1] - d.values()[1]).powi(2);
                t * (-d2 / (2.0 * sigma * sigma)).exp()
            })
            .sum();
        assert!((s.predict(&x, sigma).unwrap() - direct).abs() < 1e-12);
        let mut zero = s.clone();
        zero.theta.fill(0.0);
        assert_eq!(zero.predict(&x, sigma).unwrap(), 0.0);
        assert!(s.predict(&w(&[0.1]), sigma).is_err());
    }

    #[test]
    fn kernel_size_examples() {
        let c = w(&[0.5, 0.5]);
        let x = w(&[0.8, 0.9]);
        // N = 1: the spread is the distance itself
        assert!((update_kernel_size(0.3, &x, &c, &c, 1).unwrap() - 0.5).abs() < 1e-15);
        // sample at a stationary center with large N shrinks ν slowly
        let mut nu = 0.3;
        for n in 2..200 {
            let next = update_kernel_size(nu, &c, &c, &c, n).unwrap();
            assert!(next < nu);
            nu = next;
        }
        assert_eq!(update_kernel_size(0.3, &c, &c, &c, 1).unwrap(), KERNEL_SIZE_FLOOR);
        assert!(update_kernel_size(0.0, &c, &c, &c, 1).is_err());
        assert!(update_kernel_size(0.3, &c, &c, &c, 0).is_err());
    }

    #[test]
    fn kernel_size_tracks_rms_distance_of_running_mean() {
        let xs = [0.1, 0.7, 0.3, 0.9, 0.5, 0.2];
        let mut center = w(&[xs[0]]);
        let mut nu = 0.3;
        for (i, &x) in xs.iter().enumerate().skip(1) {
            let n = (i + 1) as u64;
            let new_center = w(&[center.values()[0] + (x - center.values()[0]) / n as f64]);
            nu = update_kernel_size(nu, &w(&[x]), &new_center, &center, n).unwrap();
            center = new_center;
            // the seed spread persists with weight 1/n
            let m = center.values()[0];
            let ss: f64 = xs[..=i].iter().map(|v| (v - m).powi(2)).sum::<f64>() / n as f64;
            let expected = ss + 0.09 / n as f64;
            assert!((nu * nu - expected).abs() < 1e-12, "step {i}: {} vs {expected}", nu * nu);
        }
    }

    #[test]
    fn error_tracker_examples() {
        let mut t = ErrorTracker::default();
        for _ in 0..10 {
            t.update(1.0, 1.0);
        }
        assert_eq!(t.e_hat, 0.0);
        assert_eq!(t.eta_max, 0.0);
        assert!((eta(0.5) - 0.148_549).abs() < 1e-5);
        let mut t = ErrorTracker::default();
        let mut last = t.eta_max;
        for (y, yh) in [(1.0, 0.2), (0.0, 0.1), (0.5, 0.5), (2.0, -1.0), (0.0, 0.0)] {
            t.update(y, yh);
            assert!(t.eta_max >= last);
            last = t.eta_max;
        }
        assert!(t.eta_max < (-0.5f64).exp());
    }

    #[test]
    fn init_kernel_size_examples() {
        let t = ErrorTracker::default();
        let x = w(&[1.0]);
        let c = w(&[0.0]);
        assert_eq!(init_kernel_size(&x, &c, &t, 0.3), 0.3);
        let t = ErrorTracker { e_hat: 0.0, eta_max: 0.5f64.exp() };
        assert!((init_kernel_size(&x, &c, &t, 0.3) - 1.0).abs() < 1e-15);
    }

    fn stream(dim: usize) -> impl Strategy<Value = Vec<(Vec<f64>, f64)>> {
        prop::collection::vec((prop::collection::vec(-1.0..1.0f64, dim), -2.0..2.0f64), 2..50)
    }

    fn batch_equivalence(points: Vec<(Vec<f64>, f64)>, lambda: f64, sigma: f64) -> std::result::Result<(), TestCaseError> {
        let xs: Vec<DataWindow> = points.iter().map(|(x, _)| w(x)).collect();
        let ys: Vec<f64> = points.iter().map(|(_, y)| *y).collect();
        let mut s = ConsequentState::new(xs[0].clone(), ys[0], lambda, sigma).unwrap();
        for (x, y) in xs.iter().zip(&ys).skip(1) {
            prop_assert_eq!(s.update(x, *y, lambda, sigma, 0.0).unwrap(), UpdateKind::Admitted);
        }
        let expected = dense_solve(&xs, &ys, lambda, sigma);
        for (a, b) in s.theta().iter().zip(expected.iter()) {
            prop_assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
        }
        Ok(())
    }

    proptest! {
        #[test]
        fn batch_equivalence_scalar(points in stream(1), lambda in 0.01..=1.0f64, sigma in 0.2..0.5f64) {
            batch_equivalence(points, lambda, sigma)?;
        }

        #[test]
        fn batch_equivalence_four_dims(points in stream(4), lambda in 0.01..=1.0f64, sigma in 0.2..0.5f64) {
            batch_equivalence(points, lambda, sigma)?;
        }

        #[test]
        fn predict_linear_in_theta(scale in -3.0..3.0f64, x in -1.0..1.0f64) {
            let mut s = ConsequentState::new(w(&[0.0]), 1.0, 0.1, 0.3).unwrap();
            s.admit_and_update(w(&[0.7]), -0.5, 0.1, 0.3).unwrap();
            let base = s.predict(&w(&[x]), 0.3).unwrap();
            s.theta *= scale;
            prop_assert!((s.predict(&w(&[x]), 0.3).unwrap() - scale * base).abs() < 1e-12);
        }

        #[test]
        fn gram_positive_definite(pts in prop::collection::vec(-1.0..1.0f64, 2..10), sigma in 0.2..0.5f64) {
            let mut uniq = pts.clone();
            uniq.sort_by(f64::total_cmp);
            uniq.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            prop_assume!(uniq.len() >= 2);
            let xs: Vec<DataWindow> = uniq.iter().map(|v| w(&[*v])).collect();
            let n = xs.len();
            let k = DMatrix::from_fn(n, n, |i, j| kernel(&xs[i], &xs[j], sigma).unwrap());
            let eig = k.clone().symmetric_eigen();
            prop_assert!(eig.eigenvalues.iter().all(|e| *e > -1e-12), "{:?}", eig.eigenvalues);
            let reg = (k + DMatrix::identity(n, n) * 1e-3).symmetric_eigen();
            prop_assert!(reg.eigenvalues.iter().all(|e| *e > 1e-3 - 1e-9), "{:?}", reg.eigenvalues);
        }

        #[test]
        fn refinement_keeps_shapes(points in stream(2)) {
            let mut s = ConsequentState::new(w(&points[0].0), points[0].1, 0.1, 0.3).unwrap();
            let n = s.len();
            for (x, y) in &points[1..] {
                s.update_without_admission(&w(x), *y, 0.3).unwrap();
                prop_assert_eq!(s.len(), n);
                prop_assert_eq!(s.q().shape(), (n, n));
                prop_assert!(s.p().iter().all(|v| v.is_finite()));
            }
        }
    }
}

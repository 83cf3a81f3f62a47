//! Weighted, ridge-penalized kernel logistic regression and the
//! classifier-to-density-ratio conversion.
//!
//! The classifier models p(y | x) = 1 / (1 + exp(-y psi(x)' theta)) over a
//! basis psi built from a kernel and stored centers, and converts to a ratio
//! via r(x) = (n_t / n_s) exp(psi(x)' theta). Fitting minimizes
//!
//! ```text
//! sum_i w_i ln(1 + exp(-y_i psi(x_i)' theta)) + reg * theta' theta
//! ```
//!
//! with per-class self-normalized weights (each class's weights sum to its
//! sample count, so a weight rescaling within a class cannot shift the
//! effective class prior). The optimizer is full-batch Newton (iteratively
//! reweighted least squares) with step halving; deterministic given inputs.

use nalgebra::{Cholesky, DMatrix, DVector};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ratio::{clamp_log_ratio, RatioEstimator};

/// Kernel choice for the basis functions.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    /// psi(x) = [1, x_1, ..., x_d]; no centers.
    Linear,
    /// K(u, v) = (u'v + c)^2, degree fixed at 2.
    Polynomial { c: f64 },
    /// K(u, v) = ||u - v||^3.
    CubicSpline,
}

impl Kernel {
    fn uses_centers(&self) -> bool {
        !matches!(self, Kernel::Linear)
    }

    fn eval(&self, u: ArrayView1<f64>, v: ArrayView1<f64>) -> f64 {
        match self {
            Kernel::Linear => unreachable!("linear kernel has no Gram evaluation"),
            Kernel::Polynomial { c } => {
                let dot = u.dot(&v);
                (dot + c) * (dot + c)
            }
            Kernel::CubicSpline => {
                let d2: f64 = u
                    .iter()
                    .zip(v.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                d2 * d2.sqrt()
            }
        }
    }
}

/// Optimizer and basis settings for a fit.
#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Convergence when the gradient infinity-norm drops below this.
    pub tolerance: f64,
    /// Newton iteration cap; exceeding it flags the model as non-converged.
    pub max_iters: usize,
    /// Kernel fits subsample this many centers when the training set is larger.
    pub max_centers: usize,
    /// Seed for the center subsample.
    pub center_seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_iters: 500,
            max_centers: 1000,
            center_seed: 0,
        }
    }
}

/// A fitted logistic ratio model.
#[derive(Debug, Clone)]
pub struct LogisticModel {
    theta: Array1<f64>,
    kernel: Kernel,
    /// Center points for kernel bases; empty for the linear kernel.
    centers: Array2<f64>,
    /// Per-column standardization of the Gram features (kernel bases only).
    feat_shift: Array1<f64>,
    feat_scale: Array1<f64>,
    reg: f64,
    n_s: usize,
    n_t: usize,
    dim: usize,
    converged: bool,
}

impl LogisticModel {
    pub fn theta(&self) -> &Array1<f64> {
        &self.theta
    }

    pub fn reg(&self) -> f64 {
        self.reg
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn counts(&self) -> (usize, usize) {
        (self.n_s, self.n_t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// A null model: theta = 0 with the given class counts. Its ratio is the
    /// constant prior correction n_t / n_s.
    pub fn null_model(dim: usize, n_s: usize, n_t: usize) -> Self {
        Self {
            theta: Array1::zeros(dim + 1),
            kernel: Kernel::Linear,
            centers: Array2::zeros((0, dim)),
            feat_shift: Array1::zeros(0),
            feat_scale: Array1::zeros(0),
            reg: 0.0,
            n_s,
            n_t,
            dim,
            converged: true,
        }
    }

    /// Linear-kernel model with explicit coefficients [bias, slope...], for
    /// constructing reference models in tests and oracles.
    pub fn from_linear_coefficients(theta: Array1<f64>, n_s: usize, n_t: usize) -> Self {
        let dim = theta.len() - 1;
        Self {
            theta,
            kernel: Kernel::Linear,
            centers: Array2::zeros((0, dim)),
            feat_shift: Array1::zeros(0),
            feat_scale: Array1::zeros(0),
            reg: 0.0,
            n_s,
            n_t,
            dim,
            converged: true,
        }
    }

    fn features_into(&self, x: ArrayView1<f64>, out: &mut [f64]) {
        out[0] = 1.0;
        match self.kernel {
            Kernel::Linear => {
                for (o, v) in out[1..].iter_mut().zip(x.iter()) {
                    *o = *v;
                }
            }
            _ => {
                for (j, c) in self.centers.axis_iter(Axis(0)).enumerate() {
                    let k = self.kernel.eval(x, c);
                    out[j + 1] = (k - self.feat_shift[j]) / self.feat_scale[j];
                }
            }
        }
    }

    /// Classifier score psi(x)' theta.
    pub fn score(&self, x: ArrayView1<f64>) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut feats = vec![0.0; self.theta.len()];
        self.features_into(x, &mut feats);
        Ok(feats.iter().zip(self.theta.iter()).map(|(f, t)| f * t).sum())
    }

    /// Class-posterior probability p(y | x) for y = +1 or -1.
    pub fn posterior(&self, x: ArrayView1<f64>, y: i8) -> Result<f64> {
        if y != 1 && y != -1 {
            return Err(Error::InvalidArgument(format!("label must be +/-1, got {y}")));
        }
        let s = self.score(x)?;
        Ok(sigmoid(y as f64 * s))
    }

    /// Density-ratio estimate (n_t / n_s) exp(score), clipped.
    pub fn ratio_at(&self, x: ArrayView1<f64>) -> Result<f64> {
        Ok(self.log_ratio_at(x)?.exp())
    }

    pub fn log_ratio_at(&self, x: ArrayView1<f64>) -> Result<f64> {
        let s = self.score(x)?;
        Ok(clamp_log_ratio((self.n_t as f64 / self.n_s as f64).ln() + s))
    }
}

impl RatioEstimator for LogisticModel {
    fn log_ratio(&self, x: ArrayView1<f64>) -> f64 {
        self.log_ratio_at(x).expect("dimension checked by caller")
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + exp(u)) without overflow.
fn softplus(u: f64) -> f64 {
    if u > 0.0 {
        u + (-u).exp().ln_1p()
    } else {
        u.exp().ln_1p()
    }
}

/// Fit a weighted logistic ratio model: rows of `xs` are class +1, rows of
/// `xt` are class -1.
pub fn fit_weighted_logistic(
    xs: ArrayView2<f64>,
    xt: ArrayView2<f64>,
    ws: &[f64],
    wt: &[f64],
    kernel: &Kernel,
    reg: f64,
    opt: &FitOptions,
) -> Result<LogisticModel> {
    let (n_s, n_t) = (xs.nrows(), xt.nrows());
    if n_s == 0 || n_t == 0 {
        return Err(Error::EmptySample);
    }
    if xs.ncols() != xt.ncols() {
        return Err(Error::DimensionMismatch {
            expected: xs.ncols(),
            got: xt.ncols(),
        });
    }
    if ws.len() != n_s || wt.len() != n_t {
        return Err(Error::DimensionMismatch {
            expected: n_s,
            got: ws.len(),
        });
    }
    if !(reg > 0.0) {
        return Err(Error::InvalidArgument(format!("reg must be > 0, got {reg}")));
    }
    let check = |w: &[f64], class: &'static str| -> Result<f64> {
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "weights for class {class} must be finite and nonnegative"
            )));
        }
        let sum: f64 = w.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::DegenerateWeights(class));
        }
        Ok(sum)
    };
    let sum_s = check(ws, "+1 (source)")?;
    let sum_t = check(wt, "-1 (target)")?;
    if xs.iter().chain(xt.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("sample rows must be finite".into()));
    }

    let dim = xs.ncols();
    // per-class self-normalization: weights sum to the class sample count
    let mut w: Vec<f64> = Vec::with_capacity(n_s + n_t);
    w.extend(ws.iter().map(|v| v * n_s as f64 / sum_s));
    w.extend(wt.iter().map(|v| v * n_t as f64 / sum_t));

    // basis: centers drawn from the pooled training rows for kernel bases
    let (centers, feat_shift, feat_scale, psi) = build_basis(xs, xt, kernel, opt);
    let n_feat = psi.ncols();
    let rows = n_s + n_t;
    let y: Vec<f64> = (0..rows)
        .map(|i| if i < n_s { 1.0 } else { -1.0 })
        .collect();

    let objective = |theta: &DVector<f64>, scores: &DVector<f64>| -> f64 {
        let mut obj = reg * theta.dot(theta);
        for i in 0..rows {
            obj += w[i] * softplus(-y[i] * scores[i]);
        }
        obj
    };

    let psi_na = DMatrix::from_fn(rows, n_feat, |i, j| psi[[i, j]]);
    let mut theta = DVector::zeros(n_feat);
    let mut scores = &psi_na * &theta;
    let mut obj = objective(&theta, &scores);
    let mut converged = false;
    let mut stalled = 0u32;

    for _ in 0..opt.max_iters {
        // gradient and curvature weights
        let mut grad = DVector::from_fn(n_feat, |j, _| 2.0 * reg * theta[j]);
        let mut curv = vec![0.0; rows];
        for i in 0..rows {
            let s = scores[i];
            let margin_sig = sigmoid(-y[i] * s);
            let coeff = -w[i] * y[i] * margin_sig;
            for j in 0..n_feat {
                grad[j] += coeff * psi_na[(i, j)];
            }
            let p = sigmoid(s);
            curv[i] = w[i] * p * (1.0 - p);
        }
        if grad.amax() <= opt.tolerance {
            converged = true;
            break;
        }
        // Newton system: (Psi' W Psi + 2 reg I) delta = -grad
        let mut h = DMatrix::zeros(n_feat, n_feat);
        for i in 0..rows {
            if curv[i] == 0.0 {
                continue;
            }
            let row = psi_na.row(i);
            for a in 0..n_feat {
                let ca = curv[i] * row[a];
                for b in a..n_feat {
                    h[(a, b)] += ca * row[b];
                }
            }
        }
        for a in 0..n_feat {
            for b in 0..a {
                h[(a, b)] = h[(b, a)];
            }
            h[(a, a)] += 2.0 * reg;
        }
        let delta = match Cholesky::new(h) {
            Some(chol) => chol.solve(&(-&grad)),
            None => {
                return Err(Error::NumericFailure(
                    "Newton system is not positive definite".into(),
                ))
            }
        };
        // step halving until the objective stops increasing
        let mut step = 1.0;
        let mut accepted = false;
        let prev_obj = obj;
        for _ in 0..40 {
            let cand = &theta + step * &delta;
            let cand_scores = &psi_na * &cand;
            let cand_obj = objective(&cand, &cand_scores);
            if cand_obj <= obj {
                theta = cand;
                scores = cand_scores;
                obj = cand_obj;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break; // stalled at numerical precision
        }
        // near-degenerate weighted problems can grind out negligible progress
        // for hundreds of iterations; two stalls in a row ends the fit early,
        // flagged non-converged
        if prev_obj - obj <= 1e-13 * (1.0 + obj.abs()) {
            stalled += 1;
            if stalled >= 2 {
                break;
            }
        } else {
            stalled = 0;
        }
    }

    Ok(LogisticModel {
        theta: Array1::from_iter(theta.iter().copied()),
        kernel: kernel.clone(),
        centers,
        feat_shift,
        feat_scale,
        reg,
        n_s,
        n_t,
        dim,
        converged,
    })
}

/// Assemble the design matrix and (for kernel bases) the standardized Gram
/// columns with their centers.
fn build_basis(
    xs: ArrayView2<f64>,
    xt: ArrayView2<f64>,
    kernel: &Kernel,
    opt: &FitOptions,
) -> (Array2<f64>, Array1<f64>, Array1<f64>, Array2<f64>) {
    let (n_s, n_t) = (xs.nrows(), xt.nrows());
    let rows = n_s + n_t;
    let dim = xs.ncols();
    let row_at = |i: usize| if i < n_s { xs.row(i) } else { xt.row(i - n_s) };

    if !kernel.uses_centers() {
        let mut psi = Array2::zeros((rows, dim + 1));
        for i in 0..rows {
            psi[[i, 0]] = 1.0;
            for (j, v) in row_at(i).iter().enumerate() {
                psi[[i, j + 1]] = *v;
            }
        }
        return (
            Array2::zeros((0, dim)),
            Array1::zeros(0),
            Array1::zeros(0),
            psi,
        );
    }

    let center_idx: Vec<usize> = if rows <= opt.max_centers {
        (0..rows).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opt.center_seed);
        let mut idx = rand::seq::index::sample(&mut rng, rows, opt.max_centers).into_vec();
        idx.sort_unstable();
        idx
    };
    let k = center_idx.len();
    let mut centers = Array2::zeros((k, dim));
    for (c, &i) in center_idx.iter().enumerate() {
        centers.row_mut(c).assign(&row_at(i));
    }

    let mut gram = Array2::zeros((rows, k));
    for i in 0..rows {
        for (j, cperm) in centers.axis_iter(Axis(0)).enumerate() {
            gram[[i, j]] = kernel.eval(row_at(i), cperm);
        }
    }
    // standardize Gram columns so the ridge penalty acts on a common scale
    let mut shift = Array1::zeros(k);
    let mut scale = Array1::zeros(k);
    for j in 0..k {
        let col = gram.column(j);
        let mean = col.mean().unwrap();
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / rows as f64;
        shift[j] = mean;
        scale[j] = var.sqrt().max(1e-12);
    }
    let mut psi = Array2::zeros((rows, k + 1));
    for i in 0..rows {
        psi[[i, 0]] = 1.0;
        for j in 0..k {
            psi[[i, j + 1]] = (gram[[i, j]] - shift[j]) / scale[j];
        }
    }
    (centers, shift, scale, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DensityModel;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};
    use rand::Rng as _;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_weights(n: usize) -> Vec<f64> {
        vec![1.0; n]
    }

    fn fit_linear(xs: &Array2<f64>, xt: &Array2<f64>, reg: f64) -> LogisticModel {
        fit_weighted_logistic(
            xs.view(),
            xt.view(),
            &unit_weights(xs.nrows()),
            &unit_weights(xt.nrows()),
            &Kernel::Linear,
            reg,
            &FitOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn symmetric_classes_collapse_to_prior() {
        let g = DensityModel::gaussian1(0.0, 1.0).unwrap();
        let xs = g.sample(300, 1).unwrap();
        let m = fit_weighted_logistic(
            xs.view(),
            xs.view(),
            &unit_weights(300),
            &unit_weights(300),
            &Kernel::Linear,
            10.0,
            &FitOptions::default(),
        )
        .unwrap();
        let norm = m.theta().iter().map(|t| t * t).sum::<f64>().sqrt();
        assert!(norm <= 0.1, "theta norm {norm}");
        for x in [-2.0, 0.0, 2.0] {
            let r = m.ratio_at(array![x].view()).unwrap();
            assert!((r - 1.0).abs() < 0.05, "ratio {r} at {x}");
        }
    }

    #[test]
    fn duplication_equals_weight_doubling() {
        // duplicating a row is the same as doubling its weight, holding the
        // class weight total fixed via a zero-weight pad row
        let g = DensityModel::gaussian1(0.5, 1.0).unwrap();
        let h = DensityModel::gaussian1(-0.5, 1.5).unwrap();
        let xs = g.sample(40, 2).unwrap();
        let xt = h.sample(40, 3).unwrap();

        // fit A: first source row duplicated
        let mut xs_dup = Array2::zeros((41, 1));
        xs_dup.row_mut(0).assign(&xs.row(0));
        for i in 0..40 {
            xs_dup.row_mut(i + 1).assign(&xs.row(i));
        }
        let a = fit_weighted_logistic(
            xs_dup.view(),
            xt.view(),
            &unit_weights(41),
            &unit_weights(40),
            &Kernel::Linear,
            1e-2,
            &FitOptions::default(),
        )
        .unwrap();

        // fit B: same row weighted 2, plus a zero-weight pad row
        let mut xs_pad = Array2::zeros((41, 1));
        for i in 0..40 {
            xs_pad.row_mut(i).assign(&xs.row(i));
        }
        xs_pad[[40, 0]] = 123.0; // pad coordinates are irrelevant at weight 0
        let mut wb = unit_weights(41);
        wb[0] = 2.0;
        wb[40] = 0.0;
        let b = fit_weighted_logistic(
            xs_pad.view(),
            xt.view(),
            &wb,
            &unit_weights(40),
            &Kernel::Linear,
            1e-2,
            &FitOptions::default(),
        )
        .unwrap();

        for (ta, tb) in a.theta().iter().zip(b.theta().iter()) {
            assert_abs_diff_eq!(ta, tb, epsilon = 1e-8);
        }
    }

    #[test]
    fn separable_classes_classify_held_out_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let xs = Array2::from_shape_fn((200, 1), |_| rng.gen_range(2.0..3.0));
        let xt = Array2::from_shape_fn((200, 1), |_| rng.gen_range(-3.0..-2.0));
        let m = fit_linear(&xs, &xt, 1e-3);
        let mut correct = 0;
        for _ in 0..500 {
            let (x, y) = if rng.gen_bool(0.5) {
                (rng.gen_range(2.0..3.0), 1.0)
            } else {
                (rng.gen_range(-3.0..-2.0), -1.0)
            };
            let s = m.score(array![x].view()).unwrap();
            if s * y > 0.0 {
                correct += 1;
            }
        }
        assert!(correct as f64 / 500.0 >= 0.99);
    }

    #[test]
    fn null_model_ratio_is_prior() {
        let m = LogisticModel::null_model(1, 100, 300);
        for x in [-1.0, 0.0, 5.0] {
            assert_abs_diff_eq!(m.ratio_at(array![x].view()).unwrap(), 3.0, epsilon = 1e-12);
            assert_abs_diff_eq!(m.posterior(array![x].view(), 1).unwrap(), 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(m.posterior(array![x].view(), -1).unwrap(), 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn linear_score_exponentiates() {
        // bias 0, slope 1, balanced counts: ratio at ln 2 is 2
        let m = LogisticModel::from_linear_coefficients(array![0.0, 1.0], 50, 50);
        assert_abs_diff_eq!(
            m.ratio_at(array![2.0f64.ln()].view()).unwrap(),
            2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn posterior_saturates() {
        let m = LogisticModel::from_linear_coefficients(array![50.0, 0.0], 10, 10);
        let p = m.posterior(array![0.0].view(), 1).unwrap();
        assert!(p >= 1.0 - 1e-20);
        let q = m.posterior(array![0.0].view(), -1).unwrap();
        assert!(q <= 1e-20);
    }

    #[test]
    fn posterior_odds_equal_exp_score() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let s: f64 = rng.gen_range(-20.0..20.0);
            let m = LogisticModel::from_linear_coefficients(array![s, 0.0], 10, 10);
            let x = array![0.0];
            let odds = m.posterior(x.view(), 1).unwrap() / m.posterior(x.view(), -1).unwrap();
            assert!(
                (odds - s.exp()).abs() <= 1e-12 * s.exp(),
                "score {s}: odds {odds}"
            );
        }
    }

    #[test]
    fn ratio_equals_prior_times_posterior_odds() {
        let g = DensityModel::gaussian1(0.6, 1.0).unwrap();
        let h = DensityModel::gaussian1(0.0, 1.0).unwrap();
        let xs = g.sample(120, 5).unwrap();
        let xt = h.sample(80, 6).unwrap();
        let m = fit_linear(&xs, &xt, 1e-2);
        let (n_s, n_t) = m.counts();
        let prior = n_t as f64 / n_s as f64;
        for x in [-1.5, 0.0, 0.4, 2.0] {
            let xv = array![x];
            let odds = m.posterior(xv.view(), 1).unwrap() / m.posterior(xv.view(), -1).unwrap();
            let r = m.ratio_at(xv.view()).unwrap();
            assert!(
                (r - prior * odds).abs() <= 1e-12 * r,
                "x={x}: {r} vs {}",
                prior * odds
            );
        }
    }

    #[test]
    fn fitted_objective_beats_random_restarts() {
        let g = DensityModel::gaussian1(1.0, 1.0).unwrap();
        let h = DensityModel::gaussian1(0.0, 1.0).unwrap();
        let xs = g.sample(150, 7).unwrap();
        let xt = h.sample(150, 8).unwrap();
        let reg = 1e-2;
        let m = fit_linear(&xs, &xt, reg);

        let obj = |theta: &[f64]| -> f64 {
            let mut total = reg * theta.iter().map(|t| t * t).sum::<f64>();
            for (rows, y) in [(&xs, 1.0), (&xt, -1.0)] {
                for r in rows.axis_iter(Axis(0)) {
                    let s = theta[0] + theta[1] * r[0];
                    total += softplus(-y * s);
                }
            }
            total
        };
        let fitted = obj(m.theta().as_slice().unwrap());
        assert!(fitted <= obj(&[0.0, 0.0]) + 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..10 {
            let cand = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            assert!(fitted <= obj(&cand) + 1e-9);
        }
    }

    #[test]
    fn consistency_recovers_log_ratio_slope() {
        // N(1,1) over N(0,1): log ratio is x - 1/2
        let g = DensityModel::gaussian1(1.0, 1.0).unwrap();
        let h = DensityModel::gaussian1(0.0, 1.0).unwrap();
        let xs = g.sample(2000, 21).unwrap();
        let xt = h.sample(2000, 22).unwrap();
        let m = fit_linear(&xs, &xt, 1e-2);
        let slope = m.theta()[1];
        assert!((slope - 1.0).abs() < 0.2, "slope {slope}");
    }

    #[test]
    fn zero_weights_in_a_class_are_degenerate() {
        let xs = Array2::zeros((5, 1));
        let xt = Array2::ones((5, 1));
        let r = fit_weighted_logistic(
            xs.view(),
            xt.view(),
            &[0.0; 5],
            &unit_weights(5),
            &Kernel::Linear,
            1e-2,
            &FitOptions::default(),
        );
        assert!(matches!(r, Err(Error::DegenerateWeights(_))));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let m = LogisticModel::null_model(2, 10, 10);
        assert!(m.ratio_at(array![1.0].view()).is_err());
    }

    #[test]
    fn kernel_fits_run_and_predict() {
        let g = DensityModel::gaussian1(1.5, 1.0).unwrap();
        let h = DensityModel::gaussian1(0.0, 1.0).unwrap();
        let xs = g.sample(80, 31).unwrap();
        let xt = h.sample(80, 32).unwrap();
        for kernel in [Kernel::Polynomial { c: 1.0 }, Kernel::CubicSpline] {
            let m = fit_weighted_logistic(
                xs.view(),
                xt.view(),
                &unit_weights(80),
                &unit_weights(80),
                &kernel,
                1e-2,
                &FitOptions::default(),
            )
            .unwrap();
            // the fitted ratio should be larger where the source has mass
            let hi = m.ratio_at(array![1.5].view()).unwrap();
            let lo = m.ratio_at(array![-1.0].view()).unwrap();
            assert!(hi > lo, "{kernel:?}: {hi} vs {lo}");
        }
    }

    #[test]
    fn center_subsampling_is_deterministic_and_bounded() {
        let g = DensityModel::gaussian1(0.0, 1.0).unwrap();
        let xs = g.sample(700, 41).unwrap();
        let xt = g.sample(700, 42).unwrap();
        let opt = FitOptions {
            max_centers: 100,
            max_iters: 5,
            ..FitOptions::default()
        };
        let m1 = fit_weighted_logistic(
            xs.view(),
            xt.view(),
            &unit_weights(700),
            &unit_weights(700),
            &Kernel::CubicSpline,
            1e-2,
            &opt,
        )
        .unwrap();
        let m2 = fit_weighted_logistic(
            xs.view(),
            xt.view(),
            &unit_weights(700),
            &unit_weights(700),
            &Kernel::CubicSpline,
            1e-2,
            &opt,
        )
        .unwrap();
        assert_eq!(m1.theta().len(), 101);
        assert_eq!(m1.theta(), m2.theta());
    }
}

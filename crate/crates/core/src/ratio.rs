//! The ratio-estimator interface shared by single models, chains, and
//! analytic oracles.

use ndarray::ArrayView1;

use crate::distributions::DensityModel;

/// Ratio estimates are clipped to this range before use.
pub const RATIO_CLIP: (f64, f64) = (1e-12, 1e12);

/// Clamp a log ratio into the log of [`RATIO_CLIP`].
pub fn clamp_log_ratio(log_r: f64) -> f64 {
    log_r.clamp(RATIO_CLIP.0.ln(), RATIO_CLIP.1.ln())
}

/// A fitted (or analytic) object mapping points to positive ratio estimates.
pub trait RatioEstimator {
    /// Log of the ratio estimate at `x`, already clipped.
    fn log_ratio(&self, x: ArrayView1<f64>) -> f64;

    /// Ratio estimate at `x`, strictly positive.
    fn ratio(&self, x: ArrayView1<f64>) -> f64 {
        self.log_ratio(x).exp()
    }
}

/// The analytic ratio p/q of two density models; the oracle used by the
/// evaluation metrics.
#[derive(Debug, Clone)]
pub struct DensityRatio {
    pub p: DensityModel,
    pub q: DensityModel,
}

impl RatioEstimator for DensityRatio {
    fn log_ratio(&self, x: ArrayView1<f64>) -> f64 {
        let lp = self.p.log_density(x).expect("valid point");
        let lq = self.q.log_density(x).expect("valid point");
        clamp_log_ratio(lp - lq)
    }
}

/// Adapter turning a closure over points into a [`RatioEstimator`].
pub struct RatioFn<F>(pub F);

impl<F: Fn(ArrayView1<f64>) -> f64> RatioEstimator for RatioFn<F> {
    fn log_ratio(&self, x: ArrayView1<f64>) -> f64 {
        clamp_log_ratio((self.0)(x).ln())
    }
}

/// Adapter for closures that already return log ratios.
pub struct LogRatioFn<F>(pub F);

impl<F: Fn(ArrayView1<f64>) -> f64> RatioEstimator for LogRatioFn<F> {
    fn log_ratio(&self, x: ArrayView1<f64>) -> f64 {
        clamp_log_ratio((self.0)(x))
    }
}

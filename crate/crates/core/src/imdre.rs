//! Incremental density-ratio estimation along sampled linear-mixture
//! bridges: the telescoping chain
//!
//! ```text
//! r(x) = p_s/p_1 * p_1/p_2 * ... * p_m/p_t
//! ```
//!
//! where each bridge p_k is the mixture (1 - lambda_k) p_s + lambda_k p_t.
//! Each consecutive pair is close, so every link is an easy classification
//! problem even when the endpoints are far apart.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geodesics::BridgeSchedule;
use crate::logistic::{fit_weighted_logistic, FitOptions, Kernel, LogisticModel};
use crate::ratio::{clamp_log_ratio, RatioEstimator};
use crate::seeding::derive_seed_labeled;

/// Base-estimator settings shared by the chain fitters.
#[derive(Debug, Clone)]
pub struct BaseConfig {
    pub kernel: Kernel,
    pub reg: f64,
    pub opt: FitOptions,
}

impl Default for BaseConfig {
    fn default() -> Self {
        Self {
            kernel: Kernel::Linear,
            reg: 1e-2,
            opt: FitOptions::default(),
        }
    }
}

/// How bridge samples are materialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BridgeMode {
    /// Bernoulli(lambda) selection between a source row and a target row,
    /// drawn with replacement; samples the mixture density itself.
    MixtureDensity,
    /// Interpolated points (1 - lambda) x_s + lambda x_t over a shuffled
    /// pairing; transports sample positions rather than mixing densities.
    PointInterpolation,
}

/// A fitted chain: one logistic stage per consecutive bridge pair.
#[derive(Debug, Clone)]
pub struct RatioChain {
    stages: Vec<LogisticModel>,
    schedule: BridgeSchedule,
}

impl RatioChain {
    pub fn new(stages: Vec<LogisticModel>, schedule: BridgeSchedule) -> Result<Self> {
        if stages.len() != schedule.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "a chain over {} bridges needs {} stages, got {}",
                schedule.len(),
                schedule.len() + 1,
                stages.len()
            )));
        }
        Ok(Self { stages, schedule })
    }

    pub fn stages(&self) -> &[LogisticModel] {
        &self.stages
    }

    pub fn schedule(&self) -> &BridgeSchedule {
        &self.schedule
    }

    /// Product of the stage ratios, accumulated in log space and clipped.
    pub fn ratio_at(&self, x: ArrayView1<f64>) -> Result<f64> {
        let mut log_r = 0.0;
        for stage in &self.stages {
            log_r += stage.log_ratio_at(x)?;
        }
        Ok(clamp_log_ratio(log_r).exp())
    }
}

impl RatioEstimator for RatioChain {
    fn log_ratio(&self, x: ArrayView1<f64>) -> f64 {
        clamp_log_ratio(
            self.stages
                .iter()
                .map(|s| s.log_ratio_at(x).expect("dimension checked by caller"))
                .sum(),
        )
    }
}

/// Fit a telescoping chain over sampled mixture bridges.
///
/// The schedule must sit on the linear-mixture family (alpha = -1): that is
/// the family whose bridges can be sampled by re-labeling rows, because the
/// mixture density is exactly the law of a Bernoulli(lambda) choice between
/// a source draw and a target draw.
pub fn telescope_fit(
    xs: ArrayView2<f64>,
    xt: ArrayView2<f64>,
    schedule: &BridgeSchedule,
    bridge_mode: BridgeMode,
    base: &BaseConfig,
    seed: u64,
) -> Result<RatioChain> {
    if xs.nrows() < 2 || xt.nrows() < 2 {
        return Err(Error::EmptySample);
    }
    if schedule.alpha() != -1.0 {
        return Err(Error::WrongGeodesic(schedule.alpha()));
    }
    let padded = schedule.padded();
    let n_bridge = xs.nrows().min(xt.nrows());
    let unit = vec![1.0; n_bridge];

    let mut stages = Vec::with_capacity(padded.len() - 1);
    for k in 1..padded.len() {
        let stage_seed = derive_seed_labeled(seed, k as u64, "imdre-stage");
        let mut rng = ChaCha8Rng::seed_from_u64(stage_seed);
        let (top, bottom) = match bridge_mode {
            BridgeMode::MixtureDensity => (
                draw_mixture(xs, xt, padded[k - 1], n_bridge, &mut rng),
                draw_mixture(xs, xt, padded[k], n_bridge, &mut rng),
            ),
            BridgeMode::PointInterpolation => {
                let pairing = shuffled_pairing(xs.nrows(), xt.nrows(), &mut rng);
                (
                    interpolate_points(xs, xt, &pairing, padded[k - 1]),
                    interpolate_points(xs, xt, &pairing, padded[k]),
                )
            }
        };
        let mut opt = base.opt.clone();
        opt.center_seed = derive_seed_labeled(stage_seed, 0, "centers");
        let stage = fit_weighted_logistic(
            top.view(),
            bottom.view(),
            &unit,
            &unit,
            &base.kernel,
            base.reg,
            &opt,
        )?;
        stages.push(stage);
    }
    RatioChain::new(stages, schedule.clone())
}

/// Rows drawn from the empirical mixture (1 - lambda) p_s + lambda p_t.
fn draw_mixture(
    xs: ArrayView2<f64>,
    xt: ArrayView2<f64>,
    lambda: f64,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Array2<f64> {
    let mut out = Array2::zeros((n, xs.ncols()));
    for i in 0..n {
        let from_target = rng.gen::<f64>() < lambda;
        let row = if from_target {
            xt.row(rng.gen_range(0..xt.nrows()))
        } else {
            xs.row(rng.gen_range(0..xs.nrows()))
        };
        out.row_mut(i).assign(&row);
    }
    out
}

fn shuffled_pairing(n_s: usize, n_t: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    use rand::seq::SliceRandom;
    let mut is: Vec<usize> = (0..n_s).collect();
    let mut it: Vec<usize> = (0..n_t).collect();
    is.shuffle(rng);
    it.shuffle(rng);
    is.into_iter().zip(it).collect()
}

fn interpolate_points(
    xs: ArrayView2<f64>,
    xt: ArrayView2<f64>,
    pairing: &[(usize, usize)],
    lambda: f64,
) -> Array2<f64> {
    let mut out = Array2::zeros((pairing.len(), xs.ncols()));
    for (row, &(i, j)) in pairing.iter().enumerate() {
        let a = xs.row(i);
        let b = xt.row(j);
        for c in 0..xs.ncols() {
            out[[row, c]] = (1.0 - lambda) * a[c] + lambda * b[c];
        }
    }
    out
}

/// Fit the plain direct estimator (the m = 0 chain).
pub fn direct_fit(
    xs: ArrayView2<f64>,
    xt: ArrayView2<f64>,
    base: &BaseConfig,
) -> Result<LogisticModel> {
    let ws = vec![1.0; xs.nrows()];
    let wt = vec![1.0; xt.nrows()];
    fit_weighted_logistic(xs, xt, &ws, &wt, &base.kernel, base.reg, &base.opt)
}

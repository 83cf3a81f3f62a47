//! Alternating estimation of a density-ratio chain along a general bridge
//! family, realized with self-normalized importance weighting.
//!
//! Bridges off the linear-mixture family cannot be sampled by re-labeling
//! rows, but their importance weights against a proxy sample depend only on
//! the density ratio itself. That couples the two unknowns: weights need the
//! ratio, the chained ratio fit needs the weights. The loop here alternates
//! them:
//!
//! 1. fit a direct ratio estimate from the raw samples;
//! 2. compute per-bridge importance weights on the proxy sample from the
//!    current estimate;
//! 3. fit one weighted logistic stage per consecutive bridge pair, labeling
//!    the proxy sample weighted at the earlier position as class +1 against
//!    the same rows weighted at the later position, and chain the stages;
//! 4. repeat 2-3 a fixed number of times.

use ndarray::{ArrayView1, ArrayView2};
use serde::Serialize;

use crate::diagnostics::ess;
use crate::error::{Error, Result};
use crate::geodesics::{log_importance_weight, BridgeSchedule, GeodesicParams, ScheduleMode};
use crate::imdre::{BaseConfig, RatioChain};
use crate::logistic::fit_weighted_logistic;
use crate::ratio::RatioEstimator;
use crate::seeding::derive_seed_labeled;

/// Which sample the importance weights are computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Proxy {
    Source,
    Target,
}

/// Which side of the fitted ratio enters the bridge-weight formula.
///
/// `Forward` is the plain reading: the weight argument is the ratio of the
/// proxy density over the far density, so weights tend to min(1, 1/r) for
/// large alpha. `Reciprocal` feeds the inverse instead; with a proxy whose
/// ratio is large this keeps the weights bounded near 1 and reproduces the
/// efficiency-improves-with-alpha behavior on well-separated pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WeightOrientation {
    Forward,
    Reciprocal,
}

/// Configuration for the alternating chain fit.
#[derive(Debug, Clone)]
pub struct GimdreConfig {
    pub alpha: f64,
    /// Interior bridge count.
    pub m: usize,
    pub outer_iters: usize,
    pub proxy: Proxy,
    pub schedule_mode: ScheduleMode,
    /// Interior bridge positions to use instead of generating them from
    /// `schedule_mode` (required for arc-length schedules, which need the
    /// analytic densities to build).
    pub explicit_lambdas: Option<Vec<f64>>,
    pub base: BaseConfig,
    /// Ratio clip bounds applied before weight computation.
    pub clip: (f64, f64),
    pub orientation: WeightOrientation,
    pub seed: u64,
}

impl GimdreConfig {
    pub fn new(alpha: f64, m: usize, seed: u64) -> Self {
        Self {
            alpha,
            m,
            outer_iters: 3,
            proxy: Proxy::Source,
            schedule_mode: ScheduleMode::Uniform,
            explicit_lambdas: None,
            base: BaseConfig::default(),
            clip: (1e-6, 1e6),
            orientation: WeightOrientation::Forward,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::InvalidArgument("bridge count m must be >= 1".into()));
        }
        if self.outer_iters < 1 {
            return Err(Error::InvalidArgument("outer_iters must be >= 1".into()));
        }
        if !(self.clip.0 > 0.0 && self.clip.0 < self.clip.1) {
            return Err(Error::InvalidArgument(
                "clip bounds must be positive and ordered".into(),
            ));
        }
        if !self.alpha.is_finite() {
            return Err(Error::InvalidArgument("alpha must be finite".into()));
        }
        Ok(())
    }

    fn schedule(&self) -> Result<BridgeSchedule> {
        if let Some(lambdas) = &self.explicit_lambdas {
            return BridgeSchedule::new(lambdas.clone(), self.schedule_mode, self.alpha);
        }
        match self.schedule_mode {
            ScheduleMode::ArcLength => Err(Error::MissingArgument(
                "arc-length schedules need explicit_lambdas built from the densities".into(),
            )),
            mode => crate::geodesics::bridge_schedule(self.m, mode, self.alpha, None),
        }
    }
}

/// Per-iteration diagnostics of the alternating loop.
#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// ESS of the weight vector at each padded bridge position (0, interior..., 1).
    pub bridge_ess: Vec<f64>,
    /// Fraction of proxy points whose ratio hit the clip bounds.
    pub clip_fraction: f64,
    /// Mean |log r_new - log r_old| over the proxy points.
    pub mean_abs_delta_log: f64,
    /// Mean absolute error against the oracle, when one was supplied.
    pub mae: Option<f64>,
}

/// Trace of one alternating fit; one record per outer iteration.
#[derive(Debug, Clone, Serialize)]
pub struct GimdreTrace {
    /// Interior bridge positions used by the fit.
    pub lambdas: Vec<f64>,
    pub iterations: Vec<IterationRecord>,
}

/// Fit the chain with the default warm start (a direct fit) and no oracle.
pub fn gimdre_fit<'a>(
    xs: ArrayView2<'a, f64>,
    xt: ArrayView2<'a, f64>,
    cfg: &GimdreConfig,
) -> Result<(RatioChain, GimdreTrace)> {
    gimdre_fit_with(xs, xt, cfg, None, None)
}

/// Fit the chain with an injectable warm start and an optional MAE oracle
/// (truth ratio plus evaluation points) recorded in the trace.
pub fn gimdre_fit_with<'a>(
    xs: ArrayView2<'a, f64>,
    xt: ArrayView2<'a, f64>,
    cfg: &GimdreConfig,
    warm_start: Option<&dyn RatioEstimator>,
    oracle: Option<(&dyn RatioEstimator, ArrayView2<f64>)>,
) -> Result<(RatioChain, GimdreTrace)> {
    cfg.validate()?;
    if xs.nrows() < 2 || xt.nrows() < 2 {
        return Err(Error::EmptySample);
    }
    if xs.ncols() != xt.ncols() {
        return Err(Error::DimensionMismatch {
            expected: xs.ncols(),
            got: xt.ncols(),
        });
    }
    let schedule = cfg.schedule()?;
    let padded = schedule.padded();
    let proxy_rows = match cfg.proxy {
        Proxy::Source => xs,
        Proxy::Target => xt,
    };
    let n_proxy = proxy_rows.nrows();
    let (log_lo, log_hi) = (cfg.clip.0.ln(), cfg.clip.1.ln());

    // step 1: the warm start, by default a direct fit on the raw samples
    enum Current<'a> {
        Injected(&'a dyn RatioEstimator),
        Fitted(RatioChain),
        Direct(crate::logistic::LogisticModel),
    }
    impl Current<'_> {
        fn log_ratio(&self, x: ArrayView1<f64>) -> f64 {
            match self {
                Current::Injected(est) => est.log_ratio(x),
                Current::Fitted(chain) => chain.log_ratio(x),
                Current::Direct(model) => model.log_ratio(x),
            }
        }
    }
    let mut current = match warm_start {
        Some(est) => Current::Injected(est),
        None => Current::Direct(crate::imdre::direct_fit(xs, xt, &cfg.base)?),
    };

    let mut chain = None;
    let mut iterations = Vec::with_capacity(cfg.outer_iters);
    let mut prev_log_r: Option<Vec<f64>> = None;

    for iter in 0..cfg.outer_iters {
        // step 2: clipped log ratios and per-bridge log weights on the proxy
        let mut clipped = 0usize;
        let log_r: Vec<f64> = proxy_rows
            .rows()
            .into_iter()
            .map(|row| {
                let lr = current.log_ratio(row);
                if lr <= log_lo || lr >= log_hi {
                    clipped += 1;
                }
                lr.clamp(log_lo, log_hi)
            })
            .collect();

        let mut bridge_ess = Vec::with_capacity(padded.len());
        let mut log_weights: Vec<Vec<f64>> = Vec::with_capacity(padded.len());
        for (pos, &lambda) in padded.iter().enumerate() {
            let lw = bridge_log_weights(&log_r, cfg, lambda)?;
            let max = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = lw.iter().map(|v| (v - max).exp()).collect();
            let report = ess(&w)?;
            // the guard applies to the interior bridges; the endpoints are
            // the raw samples themselves (lambda = 0 has unit weights, and
            // the far endpoint is allowed to be weight-starved because its
            // stage is damped by the per-class normalization)
            let interior = pos > 0 && pos + 1 < padded.len();
            if interior && report.ess < 2.0 {
                return Err(Error::CollapsedBridge {
                    lambda,
                    ess: report.ess,
                });
            }
            bridge_ess.push(report.ess);
            log_weights.push(lw);
        }

        // step 3: one weighted stage per consecutive bridge pair. The class
        // labels must be ordered so the stage products telescope to the
        // ratio: under the reciprocal orientation the weight at lambda = 1 is
        // the ratio itself (not its inverse), so the pair order flips.
        let mut stages = Vec::with_capacity(padded.len() - 1);
        for k in 1..padded.len() {
            let shift = |lw: &[f64]| -> Vec<f64> {
                let max = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                lw.iter().map(|v| (v - max).exp()).collect()
            };
            let (top_idx, bot_idx) = match cfg.orientation {
                WeightOrientation::Forward => (k - 1, k),
                WeightOrientation::Reciprocal => (k, k - 1),
            };
            let w_top = shift(&log_weights[top_idx]);
            let w_bot = shift(&log_weights[bot_idx]);
            let mut opt = cfg.base.opt.clone();
            opt.center_seed =
                derive_seed_labeled(cfg.seed, (iter * padded.len() + k) as u64, "gimdre-centers");
            let stage = fit_weighted_logistic(
                proxy_rows,
                proxy_rows,
                &w_top,
                &w_bot,
                &cfg.base.kernel,
                cfg.base.reg,
                &opt,
            )?;
            stages.push(stage);
        }
        let fitted = RatioChain::new(stages, schedule.clone())?;

        // trace bookkeeping before moving to the next iteration
        let new_log_r: Vec<f64> = proxy_rows
            .rows()
            .into_iter()
            .map(|row| fitted.log_ratio(row))
            .collect();
        let mean_abs_delta_log = match &prev_log_r {
            Some(prev) => {
                new_log_r
                    .iter()
                    .zip(prev)
                    .map(|(a, b)| (a - b).abs())
                    .sum::<f64>()
                    / n_proxy as f64
            }
            None => {
                new_log_r
                    .iter()
                    .zip(&log_r)
                    .map(|(a, b)| (a - b).abs())
                    .sum::<f64>()
                    / n_proxy as f64
            }
        };
        let mae = match &oracle {
            Some((truth, points)) => Some(crate::diagnostics::mae(&fitted, *truth, *points)?),
            None => None,
        };
        iterations.push(IterationRecord {
            iteration: iter + 1,
            bridge_ess,
            clip_fraction: clipped as f64 / n_proxy as f64,
            mean_abs_delta_log,
            mae,
        });
        prev_log_r = Some(new_log_r);

        current = Current::Fitted(fitted.clone());
        chain = Some(fitted);
    }

    Ok((
        chain.expect("outer_iters >= 1"),
        GimdreTrace {
            lambdas: schedule.lambdas().to_vec(),
            iterations,
        },
    ))
}

/// Log importance weights of one bridge position over the proxy points.
fn bridge_log_weights(log_r: &[f64], cfg: &GimdreConfig, lambda: f64) -> Result<Vec<f64>> {
    // the weight formula takes the ratio of the proxy density over the far
    // density; relative to the fitted r = p_s/p_t that is r itself for the
    // source proxy and 1/r (with lambda measured from the target end) for
    // the target proxy
    let params = match cfg.proxy {
        Proxy::Source => GeodesicParams::new(cfg.alpha, lambda)?,
        Proxy::Target => GeodesicParams::new(cfg.alpha, 1.0 - lambda)?,
    };
    let sign = match (cfg.proxy, cfg.orientation) {
        (Proxy::Source, WeightOrientation::Forward) => 1.0,
        (Proxy::Source, WeightOrientation::Reciprocal) => -1.0,
        (Proxy::Target, WeightOrientation::Forward) => -1.0,
        (Proxy::Target, WeightOrientation::Reciprocal) => 1.0,
    };
    Ok(log_r
        .iter()
        .map(|&lr| log_importance_weight(sign * lr, &params))
        .collect())
}

/// Self-normalized importance-sampling expectation: sum(w g) / sum(w),
/// clamped into [min g, max g] (a convex combination of the values).
pub fn snis_expectation(g_values: &[f64], weights: &[f64]) -> Result<f64> {
    if g_values.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: g_values.len(),
            got: weights.len(),
        });
    }
    if g_values.is_empty() {
        return Err(Error::EmptySample);
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidArgument(
            "weights must be finite and nonnegative".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroWeightSum);
    }
    let value = g_values
        .iter()
        .zip(weights)
        .map(|(g, w)| g * (w / total))
        .sum::<f64>();
    let lo = g_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = g_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(value.clamp(lo, hi))
}

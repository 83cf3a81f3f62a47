//! Pointwise geodesic evaluation, importance weights, bridge-ratio
//! cancellation, and bridge schedules.
//!
//! The bridge family interpolates two densities through weighted power means
//! of exponent e = (1 - alpha) / 2:
//!
//! ```text
//! gamma(lambda)(x) = { (1 - lambda) p(x)^e + lambda q(x)^e }^(1/e),   alpha != 1
//! gamma(lambda)(x) = p(x)^(1 - lambda) q(x)^lambda,                   alpha  = 1
//! ```
//!
//! normalization deliberately ignored: the self-normalized importance
//! sampling estimator downstream tolerates unnormalized targets. alpha = -1
//! is the plain mixture, alpha = 1 the log-linear (exponential) path, alpha = 3
//! the harmonic mixture. All evaluation is done in log space so exponents as
//! large as |alpha| ~ 1e5 stay representable.

use crate::distributions::DensityModel;
use crate::error::{Error, Result};
use crate::quadrature::Quadrature;

/// Exact-branch switch: |alpha - 1| below this routes to the log-linear path,
/// removing the removable singularity in the power-mean exponent.
const ALPHA_ONE_EPS: f64 = 1e-8;

/// Importance weights are clipped to this range after exponentiation.
pub const WEIGHT_CLIP: (f64, f64) = (1e-12, 1e12);

/// A point (alpha, lambda) on a bridge family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicParams {
    alpha: f64,
    lambda: f64,
}

impl GeodesicParams {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("alpha must be finite, got {alpha}")));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!(
                "lambda must lie in [0, 1], got {lambda}"
            )));
        }
        Ok(Self { alpha, lambda })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Log of the unnormalized bridge density from endpoint log densities.
///
/// Stable for any finite alpha: the power-mean inner sum is evaluated with a
/// log-sum-exp, so nothing overflows even when e * ln(p) is in the hundreds
/// of thousands.
pub fn geodesic_log_density(log_p: f64, log_q: f64, params: &GeodesicParams) -> f64 {
    let lam = params.lambda;
    if lam == 0.0 {
        return log_p;
    }
    if lam == 1.0 {
        return log_q;
    }
    if (params.alpha - 1.0).abs() < ALPHA_ONE_EPS {
        return (1.0 - lam) * log_p + lam * log_q;
    }
    let e = 0.5 * (1.0 - params.alpha);
    let a = (1.0 - lam).ln() + e * log_p;
    let b = lam.ln() + e * log_q;
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    (hi + (lo - hi).exp().ln_1p()) / e
}

/// Unnormalized bridge density between two positive density values.
pub fn geodesic_density(p_val: f64, q_val: f64, params: &GeodesicParams) -> Result<f64> {
    if !(p_val > 0.0) || !(q_val > 0.0) {
        return Err(Error::InvalidDensity(if p_val > 0.0 { q_val } else { p_val }));
    }
    Ok(geodesic_log_density(p_val.ln(), q_val.ln(), params).exp())
}

/// Log importance weight ln w_lambda for a proxy sample, from the log of the
/// fitted ratio r = proxy density over far-end density:
///
/// ```text
/// w_lambda = { 1 - lambda + lambda (1/r)^e }^(1/e)
/// ```
///
/// which is the bridge density over the proxy density. The alpha = 1 branch
/// is r^(-lambda); as alpha grows the weight tends to min(1, 1/r).
pub fn log_importance_weight(log_r: f64, params: &GeodesicParams) -> f64 {
    geodesic_log_density(0.0, -log_r, params)
}

/// Importance weight from a positive ratio value, clipped to [`WEIGHT_CLIP`].
pub fn importance_weight(r_val: f64, params: &GeodesicParams) -> Result<f64> {
    if !(r_val > 0.0) {
        return Err(Error::InvalidRatio(r_val));
    }
    let w = log_importance_weight(r_val.ln(), params).exp();
    Ok(w.clamp(WEIGHT_CLIP.0, WEIGHT_CLIP.1))
}

/// Ratio of importance weights between two bridge positions: the proxy
/// density cancels, leaving the unnormalized bridge-density ratio, a function
/// of the fitted ratio alone.
pub fn weight_ratio(r_val: f64, alpha: f64, lambda_i: f64, lambda_j: f64) -> Result<f64> {
    if !(r_val > 0.0) {
        return Err(Error::InvalidRatio(r_val));
    }
    let pi = GeodesicParams::new(alpha, lambda_i)?;
    let pj = GeodesicParams::new(alpha, lambda_j)?;
    let log_r = r_val.ln();
    Ok((log_importance_weight(log_r, &pi) - log_importance_weight(log_r, &pj)).exp())
}

/// Grid over lambda in [0, 1] for arc-length accumulation.
#[derive(Debug, Clone)]
pub enum LambdaGrid {
    /// `segments` equal steps, i.e. segments + 1 nodes including 0 and 1.
    Uniform(usize),
    /// Explicit nodes; must start at 0, end at 1, and be strictly increasing.
    Explicit(Vec<f64>),
}

impl LambdaGrid {
    fn nodes(&self) -> Result<Vec<f64>> {
        match self {
            Self::Uniform(segments) => {
                if *segments < 1 {
                    return Err(Error::InvalidArgument("lambda grid needs >= 2 nodes".into()));
                }
                Ok((0..=*segments)
                    .map(|i| i as f64 / *segments as f64)
                    .collect())
            }
            Self::Explicit(nodes) => {
                if nodes.len() < 2 {
                    return Err(Error::InvalidArgument("lambda grid needs >= 2 nodes".into()));
                }
                if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
                    return Err(Error::InvalidArgument(
                        "explicit lambda grid must start at 0 and end at 1".into(),
                    ));
                }
                if nodes.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidArgument(
                        "explicit lambda grid must be strictly increasing".into(),
                    ));
                }
                Ok(nodes.clone())
            }
        }
    }
}

/// Numeric Fisher length of the bridge curve between two one-dimensional
/// models.
///
/// The normalized bridge is computed at each grid node and consecutive nodes
/// contribute sqrt(2 * SymKL), with SymKL the mean of the two directed KL
/// divergences. This local quadratic is second-order exact under the
/// information metric, so the total converges under grid refinement without
/// requiring a parametric coordinate chart.
pub fn arc_length(
    p: &DensityModel,
    q: &DensityModel,
    alpha: f64,
    grid: &LambdaGrid,
    quad: &Quadrature,
) -> Result<f64> {
    Ok(cumulative_arc_length(p, q, alpha, grid, quad)?
        .last()
        .copied()
        .unwrap_or(0.0))
}

/// Cumulative arc length at each grid node; the last entry is the total.
pub fn cumulative_arc_length(
    p: &DensityModel,
    q: &DensityModel,
    alpha: f64,
    grid: &LambdaGrid,
    quad: &Quadrature,
) -> Result<Vec<f64>> {
    if p.dim() != 1 || q.dim() != 1 {
        return Err(Error::UnsupportedModel(
            "arc length is computed for one-dimensional models".into(),
        ));
    }
    let lambdas = grid.nodes()?;
    let nodes = quad.nodes();
    let log_p: Vec<f64> = nodes
        .iter()
        .map(|&x| p.log_density1(x))
        .collect::<Result<_>>()?;
    let log_q: Vec<f64> = nodes
        .iter()
        .map(|&x| q.log_density1(x))
        .collect::<Result<_>>()?;

    // normalized log bridge values at the quadrature nodes for one lambda
    let bridge = |lam: f64| -> Result<Vec<f64>> {
        let params = GeodesicParams::new(alpha, lam)?;
        let raw: Vec<f64> = log_p
            .iter()
            .zip(&log_q)
            .map(|(&lp, &lq)| {
                if lp == f64::NEG_INFINITY || lq == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    geodesic_log_density(lp, lq, &params)
                }
            })
            .collect();
        let z = quad.integrate_values(
            &raw.iter()
                .map(|&v| if v == f64::NEG_INFINITY { 0.0 } else { v.exp() })
                .collect::<Vec<_>>(),
        );
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::NumericFailure(format!(
                "bridge normalizer at lambda = {lam} is {z}"
            )));
        }
        let log_z = z.ln();
        Ok(raw.iter().map(|&v| v - log_z).collect())
    };

    let mut cumulative = Vec::with_capacity(lambdas.len());
    cumulative.push(0.0);
    let mut prev = bridge(lambdas[0])?;
    let mut total = 0.0;
    for &lam in &lambdas[1..] {
        let next = bridge(lam)?;
        let kl_fwd = directed_kl(quad, &prev, &next);
        let kl_bwd = directed_kl(quad, &next, &prev);
        let sym = 0.5 * (kl_fwd + kl_bwd);
        if !sym.is_finite() {
            return Err(Error::NumericFailure(format!(
                "symmetrized KL between bridges near lambda = {lam} is not finite"
            )));
        }
        total += (2.0 * sym.max(0.0)).sqrt();
        cumulative.push(total);
        prev = next;
    }
    Ok(cumulative)
}

/// KL between two normalized log-density vectors on shared quadrature nodes.
fn directed_kl(quad: &Quadrature, log_a: &[f64], log_b: &[f64]) -> f64 {
    let integrand: Vec<f64> = log_a
        .iter()
        .zip(log_b)
        .map(|(&la, &lb)| {
            if la == f64::NEG_INFINITY {
                0.0
            } else {
                la.exp() * (la - lb)
            }
        })
        .collect();
    quad.integrate_values(&integrand)
}

/// How interior bridge positions are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleMode {
    /// lambda_k = k / (m + 1).
    Uniform,
    /// Equal Fisher arc length between consecutive positions.
    ArcLength,
    /// lambda_k = sqrt(1 - a_k^2) with a_k descending on a uniform grid;
    /// concentrates bridges toward the far endpoint.
    Rhodes,
}

/// An ordered set of interior bridge positions lambda_1 <= ... <= lambda_m in
/// (0, 1), together with the bridge-family parameter alpha.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeSchedule {
    lambdas: Vec<f64>,
    mode: ScheduleMode,
    alpha: f64,
}

impl BridgeSchedule {
    pub fn new(lambdas: Vec<f64>, mode: ScheduleMode, alpha: f64) -> Result<Self> {
        if lambdas.iter().any(|l| !(0.0 < *l && *l < 1.0)) {
            return Err(Error::InvalidArgument(
                "bridge positions must lie strictly inside (0, 1)".into(),
            ));
        }
        if lambdas.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument(
                "bridge positions must be non-decreasing".into(),
            ));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidArgument("alpha must be finite".into()));
        }
        Ok(Self { lambdas, mode, alpha })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mode(&self) -> ScheduleMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Positions padded with the endpoints 0 and 1; consecutive pairs are the
    /// per-stage bridge pairs of a chain.
    pub fn padded(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.lambdas.len() + 2);
        v.push(0.0);
        v.extend_from_slice(&self.lambdas);
        v.push(1.0);
        v
    }
}

/// Build a schedule of `m` interior bridges.
///
/// Uniform mode places lambda_k = k/(m+1). Arc-length mode places them so the
/// m+1 consecutive segments have equal numeric Fisher length (so it matches
/// uniform mode exactly when the curve has constant speed); it needs both
/// densities. The Rhodes mode is the sqrt(1 - a^2) preset.
pub fn bridge_schedule(
    m: usize,
    mode: ScheduleMode,
    alpha: f64,
    densities: Option<(&DensityModel, &DensityModel)>,
) -> Result<BridgeSchedule> {
    if m < 1 {
        return Err(Error::InvalidArgument("schedule needs m >= 1 bridges".into()));
    }
    let lambdas = match mode {
        ScheduleMode::Uniform => (1..=m).map(|k| k as f64 / (m + 1) as f64).collect(),
        ScheduleMode::Rhodes => {
            // a_j = j/(m+1) descending, so lambda ascends
            (1..=m)
                .map(|k| {
                    let a = (m + 1 - k) as f64 / (m + 1) as f64;
                    (1.0 - a * a).sqrt()
                })
                .collect()
        }
        ScheduleMode::ArcLength => {
            let (p, q) = densities.ok_or_else(|| {
                Error::MissingArgument(
                    "arc-length schedules need the pair of densities".into(),
                )
            })?;
            let quad = crate::distributions::quadrature_for_pair(p, q)?;
            let grid_segments = 256.max(4 * (m + 1));
            let grid = LambdaGrid::Uniform(grid_segments);
            let cum = cumulative_arc_length(p, q, alpha, &grid, &quad)?;
            let total = *cum.last().unwrap();
            if total <= 0.0 {
                // degenerate curve (p == q): fall back to uniform spacing
                return bridge_schedule(m, ScheduleMode::Uniform, alpha, None)
                    .map(|s| BridgeSchedule { mode, ..s });
            }
            let grid_lambdas: Vec<f64> = (0..=grid_segments)
                .map(|i| i as f64 / grid_segments as f64)
                .collect();
            (1..=m)
                .map(|k| {
                    let target = total * k as f64 / (m + 1) as f64;
                    invert_monotone(&cum, &grid_lambdas, target)
                })
                .collect()
        }
    };
    BridgeSchedule::new(lambdas, mode, alpha)
}

/// Piecewise-linear inverse of a monotone table.
fn invert_monotone(xs: &[f64], ys: &[f64], target: f64) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let mut idx = xs.partition_point(|&x| x < target);
    if idx == 0 {
        idx = 1;
    }
    if idx >= xs.len() {
        idx = xs.len() - 1;
    }
    let (x0, x1) = (xs[idx - 1], xs[idx]);
    let (y0, y1) = (ys[idx - 1], ys[idx]);
    if x1 <= x0 {
        return y1;
    }
    let t = ((target - x0) / (x1 - x0)).clamp(0.0, 1.0);
    (y0 + t * (y1 - y0)).clamp(f64::MIN_POSITIVE, 1.0 - 1e-12)
}

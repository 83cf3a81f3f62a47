//! Experiment configuration: the JSON schema, validation with path-anchored
//! diagnostics, and conversion into core types.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use gimdre::distributions::DensityModel;
use gimdre::geodesics::ScheduleMode;
use gimdre::gimdre::{GimdreConfig, Proxy, WeightOrientation};
use gimdre::imdre::{BaseConfig, BridgeMode};
use gimdre::logistic::{FitOptions, Kernel};
use ndarray::{Array1, Array2};

/// One violation found while validating a config, anchored to a field path.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Distribution literal as it appears in config files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Gaussian { mean: Vec<f64>, cov: Vec<Vec<f64>> },
    LogNormal { mu: f64, sigma: f64 },
    PowerLaw { a: f64 },
}

impl ModelSpec {
    pub fn build(&self) -> Result<DensityModel, String> {
        match self {
            ModelSpec::Gaussian { mean, cov } => {
                let d = mean.len();
                if cov.len() != d || cov.iter().any(|row| row.len() != d) {
                    return Err(format!("cov must be a {d}x{d} matrix"));
                }
                let mut flat = Vec::with_capacity(d * d);
                for row in cov {
                    flat.extend_from_slice(row);
                }
                let cov = Array2::from_shape_vec((d, d), flat).map_err(|e| e.to_string())?;
                DensityModel::gaussian(Array1::from(mean.clone()), cov).map_err(|e| e.to_string())
            }
            ModelSpec::LogNormal { mu, sigma } => {
                DensityModel::log_normal(*mu, *sigma).map_err(|e| e.to_string())
            }
            ModelSpec::PowerLaw { a } => DensityModel::power_law(*a).map_err(|e| e.to_string()),
        }
    }

    fn validate(&self, path: &str, out: &mut Vec<Violation>) {
        if let Err(message) = self.build() {
            out.push(Violation {
                path: path.to_string(),
                message,
            });
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Linear,
    Polynomial { c: f64 },
    CubicSpline,
}

impl KernelSpec {
    pub fn build(&self) -> Kernel {
        match self {
            KernelSpec::Linear => Kernel::Linear,
            KernelSpec::Polynomial { c } => Kernel::Polynomial { c: *c },
            KernelSpec::CubicSpline => Kernel::CubicSpline,
        }
    }
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::Linear
    }
}

fn default_reg() -> f64 {
    1e-2
}
fn default_tolerance() -> f64 {
    1e-6
}
fn default_max_iters() -> usize {
    500
}
fn default_max_centers() -> usize {
    1000
}
fn default_outer_iters() -> usize {
    3
}
fn default_clip() -> [f64; 2] {
    [1e-6, 1e6]
}
fn default_trials() -> usize {
    1
}
fn default_eval_n() -> usize {
    500
}

/// Chain-estimator section of the config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GimdreSpec {
    pub alpha: f64,
    pub m: usize,
    #[serde(default = "default_outer_iters")]
    pub outer_iters: usize,
    #[serde(default)]
    pub proxy: ProxySpec,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub kernel: KernelSpec,
    #[serde(default = "default_reg")]
    pub reg: f64,
    #[serde(default = "default_clip")]
    pub clip: [f64; 2],
    #[serde(default)]
    pub orientation: OrientationSpec,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_max_centers")]
    pub max_centers: usize,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ProxySpec {
    #[default]
    Source,
    Target,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleSpec {
    #[default]
    Uniform,
    ArcLength,
    Rhodes,
}

impl ScheduleSpec {
    pub fn mode(&self) -> ScheduleMode {
        match self {
            ScheduleSpec::Uniform => ScheduleMode::Uniform,
            ScheduleSpec::ArcLength => ScheduleMode::ArcLength,
            ScheduleSpec::Rhodes => ScheduleMode::Rhodes,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum OrientationSpec {
    #[default]
    Forward,
    Reciprocal,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum BridgeModeSpec {
    #[default]
    MixtureDensity,
    PointInterpolation,
}

impl BridgeModeSpec {
    pub fn mode(&self) -> BridgeMode {
        match self {
            BridgeModeSpec::MixtureDensity => BridgeMode::MixtureDensity,
            BridgeModeSpec::PointInterpolation => BridgeMode::PointInterpolation,
        }
    }
}

impl GimdreSpec {
    pub fn base(&self, center_seed: u64) -> BaseConfig {
        BaseConfig {
            kernel: self.kernel.build(),
            reg: self.reg,
            opt: FitOptions {
                tolerance: self.tolerance,
                max_iters: self.max_iters,
                max_centers: self.max_centers,
                center_seed,
            },
        }
    }

    pub fn build(&self, seed: u64) -> GimdreConfig {
        GimdreConfig {
            alpha: self.alpha,
            m: self.m,
            outer_iters: self.outer_iters,
            proxy: match self.proxy {
                ProxySpec::Source => Proxy::Source,
                ProxySpec::Target => Proxy::Target,
            },
            schedule_mode: self.schedule.mode(),
            explicit_lambdas: None,
            base: self.base(seed),
            clip: (self.clip[0], self.clip[1]),
            orientation: match self.orientation {
                OrientationSpec::Forward => WeightOrientation::Forward,
                OrientationSpec::Reciprocal => WeightOrientation::Reciprocal,
            },
            seed,
        }
    }

    fn validate(&self, path: &str, out: &mut Vec<Violation>) {
        if self.m < 1 {
            out.push(Violation {
                path: format!("{path}.m"),
                message: "bridge count m must be >= 1".into(),
            });
        }
        if self.outer_iters < 1 {
            out.push(Violation {
                path: format!("{path}.outer_iters"),
                message: "outer_iters must be >= 1".into(),
            });
        }
        if !(self.reg > 0.0) {
            out.push(Violation {
                path: format!("{path}.reg"),
                message: "reg must be > 0".into(),
            });
        }
        if !(self.clip[0] > 0.0 && self.clip[0] < self.clip[1]) {
            out.push(Violation {
                path: format!("{path}.clip"),
                message: "clip bounds must be positive and ordered".into(),
            });
        }
        if !self.alpha.is_finite() {
            out.push(Violation {
                path: format!("{path}.alpha"),
                message: "alpha must be finite".into(),
            });
        }
        if let KernelSpec::Polynomial { c } = self.kernel {
            if !c.is_finite() {
                out.push(Violation {
                    path: format!("{path}.kernel.c"),
                    message: "polynomial offset c must be finite".into(),
                });
            }
        }
    }
}

/// Geodesic evaluation branch requested for a trace; `Power` is singular at
/// alpha = 1.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum BranchSpec {
    #[default]
    Auto,
    Power,
    Exponential,
}

/// The per-kind experiment payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentSpec {
    /// MAE of the chain across a grid of bridge counts, plus the direct
    /// baseline (reported as m = 0).
    MaeTable {
        source: ModelSpec,
        target: ModelSpec,
        n: usize,
        m_grid: Vec<usize>,
        gimdre: GimdreSpec,
        #[serde(default = "default_eval_n")]
        eval_n: usize,
    },
    /// MAE across source-mean offsets and alphas; reports the analytic KL
    /// per cell for univariate Gaussian pairs.
    AlphaSweep {
        source: ModelSpec,
        target: ModelSpec,
        mu_grid: Vec<f64>,
        alpha_grid: Vec<f64>,
        n: usize,
        gimdre: GimdreSpec,
        #[serde(default = "default_eval_n")]
        eval_n: usize,
    },
    /// MAE across sample sizes and alphas. The alpha = -1 cells additionally
    /// report the sampled-mixture chain as metric `mae_sampled`.
    SampleSizeSweep {
        source: ModelSpec,
        target: ModelSpec,
        n_grid: Vec<usize>,
        alpha_grid: Vec<f64>,
        gimdre: GimdreSpec,
        #[serde(default)]
        bridge_mode: BridgeModeSpec,
        #[serde(default = "default_eval_n")]
        eval_n: usize,
    },
    /// MAE across dimensions and alphas on isotropic Gaussian pairs.
    DimensionSweep {
        dims: Vec<usize>,
        alpha_grid: Vec<f64>,
        n: usize,
        /// Per-coordinate source mean (reconstruction default 1.0).
        source_mean: f64,
        target_mean: f64,
        variance: f64,
        gimdre: GimdreSpec,
        #[serde(default = "default_eval_n")]
        eval_n: usize,
    },
    /// ESS of the bridge weights over an (alpha, lambda) grid.
    EssSweep {
        proxy: ModelSpec,
        other: ModelSpec,
        alpha_grid: Vec<f64>,
        lambda_grid: Vec<f64>,
        n: usize,
        /// Feed the weight formula the other/proxy ratio instead of
        /// proxy/other.
        #[serde(default)]
        invert_ratio: bool,
    },
    /// Pointwise bridge values between two coordinate vectors, one row per
    /// (alpha, lambda).
    GeodesicTrace {
        p: Vec<f64>,
        q: Vec<f64>,
        alpha_grid: Vec<f64>,
        lambda_grid: Vec<f64>,
        #[serde(default)]
        branch: BranchSpec,
    },
    /// Permutation two-sample test runs.
    TwoSample {
        source: ModelSpec,
        target: ModelSpec,
        n: usize,
        k: usize,
        level: f64,
        fit: TwoSampleFit,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TwoSampleFit {
    Direct {
        #[serde(default)]
        kernel: KernelSpec,
        #[serde(default = "default_reg")]
        reg: f64,
    },
    Gimdre(GimdreSpec),
}

/// A complete experiment configuration file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSpec,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_str(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    /// Collect every violation with a path into the config; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.trials < 1 {
            out.push(Violation {
                path: "trials".into(),
                message: "trial count must be >= 1".into(),
            });
        }
        match &self.experiment {
            ExperimentSpec::MaeTable {
                source,
                target,
                n,
                m_grid,
                gimdre,
                eval_n,
            } => {
                source.validate("experiment.source", &mut out);
                target.validate("experiment.target", &mut out);
                check_n("experiment.n", *n, &mut out);
                check_n("experiment.eval_n", *eval_n, &mut out);
                if m_grid.is_empty() {
                    out.push(Violation {
                        path: "experiment.m_grid".into(),
                        message: "m_grid must be non-empty".into(),
                    });
                }
                for (i, m) in m_grid.iter().enumerate() {
                    if *m < 1 {
                        out.push(Violation {
                            path: format!("experiment.m_grid[{i}]"),
                            message: "bridge count must be >= 1".into(),
                        });
                    }
                }
                gimdre.validate("experiment.gimdre", &mut out);
            }
            ExperimentSpec::AlphaSweep {
                source,
                target,
                mu_grid,
                alpha_grid,
                n,
                gimdre,
                eval_n,
            } => {
                source.validate("experiment.source", &mut out);
                target.validate("experiment.target", &mut out);
                check_n("experiment.n", *n, &mut out);
                check_n("experiment.eval_n", *eval_n, &mut out);
                check_grid_nonempty("experiment.mu_grid", mu_grid.len(), &mut out);
                check_grid_nonempty("experiment.alpha_grid", alpha_grid.len(), &mut out);
                gimdre.validate("experiment.gimdre", &mut out);
            }
            ExperimentSpec::SampleSizeSweep {
                source,
                target,
                n_grid,
                alpha_grid,
                gimdre,
                eval_n,
                ..
            } => {
                source.validate("experiment.source", &mut out);
                target.validate("experiment.target", &mut out);
                check_grid_nonempty("experiment.n_grid", n_grid.len(), &mut out);
                check_grid_nonempty("experiment.alpha_grid", alpha_grid.len(), &mut out);
                check_n("experiment.eval_n", *eval_n, &mut out);
                for (i, n) in n_grid.iter().enumerate() {
                    if *n < 2 {
                        out.push(Violation {
                            path: format!("experiment.n_grid[{i}]"),
                            message: "sample size must be >= 2".into(),
                        });
                    }
                }
                gimdre.validate("experiment.gimdre", &mut out);
            }
            ExperimentSpec::DimensionSweep {
                dims,
                alpha_grid,
                n,
                variance,
                gimdre,
                eval_n,
                ..
            } => {
                check_grid_nonempty("experiment.dims", dims.len(), &mut out);
                check_grid_nonempty("experiment.alpha_grid", alpha_grid.len(), &mut out);
                check_n("experiment.n", *n, &mut out);
                check_n("experiment.eval_n", *eval_n, &mut out);
                if !(*variance > 0.0) {
                    out.push(Violation {
                        path: "experiment.variance".into(),
                        message: "variance must be > 0".into(),
                    });
                }
                for (i, d) in dims.iter().enumerate() {
                    if *d < 1 {
                        out.push(Violation {
                            path: format!("experiment.dims[{i}]"),
                            message: "dimension must be >= 1".into(),
                        });
                    }
                }
                gimdre.validate("experiment.gimdre", &mut out);
            }
            ExperimentSpec::EssSweep {
                proxy,
                other,
                alpha_grid,
                lambda_grid,
                n,
                ..
            } => {
                proxy.validate("experiment.proxy", &mut out);
                other.validate("experiment.other", &mut out);
                check_grid_nonempty("experiment.alpha_grid", alpha_grid.len(), &mut out);
                check_lambda_grid("experiment.lambda_grid", lambda_grid, &mut out);
                check_n("experiment.n", *n, &mut out);
            }
            ExperimentSpec::GeodesicTrace {
                p,
                q,
                alpha_grid,
                lambda_grid,
                branch,
            } => {
                if p.len() != q.len() || p.is_empty() {
                    out.push(Violation {
                        path: "experiment.q".into(),
                        message: "p and q must be non-empty vectors of equal length".into(),
                    });
                }
                for (name, vals) in [("p", p), ("q", q)] {
                    for (i, v) in vals.iter().enumerate() {
                        if !(*v > 0.0) {
                            out.push(Violation {
                                path: format!("experiment.{name}[{i}]"),
                                message: "coordinates must be strictly positive".into(),
                            });
                        }
                    }
                }
                check_grid_nonempty("experiment.alpha_grid", alpha_grid.len(), &mut out);
                check_lambda_grid("experiment.lambda_grid", lambda_grid, &mut out);
                if *branch == BranchSpec::Power {
                    for (i, a) in alpha_grid.iter().enumerate() {
                        if (a - 1.0).abs() < 1e-8 {
                            out.push(Violation {
                                path: format!("experiment.alpha_grid[{i}]"),
                                message: "alpha = 1 is singular for the power-mean branch; \
                                          use the exponential branch (branch = \"auto\" or \
                                          \"exponential\")"
                                    .into(),
                            });
                        }
                    }
                }
            }
            ExperimentSpec::TwoSample {
                source,
                target,
                n,
                k,
                level,
                fit,
            } => {
                source.validate("experiment.source", &mut out);
                target.validate("experiment.target", &mut out);
                check_n("experiment.n", *n, &mut out);
                if *k < 1 {
                    out.push(Violation {
                        path: "experiment.k".into(),
                        message: "shuffle count k must be >= 1".into(),
                    });
                }
                if !(0.0 < *level && *level < 1.0) {
                    out.push(Violation {
                        path: "experiment.level".into(),
                        message: "significance level must lie in (0, 1)".into(),
                    });
                }
                match fit {
                    TwoSampleFit::Direct { reg, .. } => {
                        if !(*reg > 0.0) {
                            out.push(Violation {
                                path: "experiment.fit.reg".into(),
                                message: "reg must be > 0".into(),
                            });
                        }
                    }
                    TwoSampleFit::Gimdre(g) => g.validate("experiment.fit", &mut out),
                }
            }
        }
        out
    }
}

fn check_n(path: &str, n: usize, out: &mut Vec<Violation>) {
    if n < 2 {
        out.push(Violation {
            path: path.to_string(),
            message: "must be >= 2".into(),
        });
    }
}

fn check_grid_nonempty(path: &str, len: usize, out: &mut Vec<Violation>) {
    if len == 0 {
        out.push(Violation {
            path: path.to_string(),
            message: "grid must be non-empty".into(),
        });
    }
}

fn check_lambda_grid(path: &str, grid: &[f64], out: &mut Vec<Violation>) {
    if grid.is_empty() {
        check_grid_nonempty(path, 0, out);
        return;
    }
    for (i, l) in grid.iter().enumerate() {
        if !(0.0..=1.0).contains(l) {
            out.push(Violation {
                path: format!("{path}[{i}]"),
                message: format!("value {l} outside [0, 1]"),
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let text = r#"{
            "experiment": {
                "kind": "mae_table",
                "source": {"kind": "gaussian", "mean": [8.0], "cov": [[3.0]]},
                "target": {"kind": "gaussian", "mean": [0.0], "cov": [[2.0]]},
                "n": 500,
                "m_grid": [10, 50, 100],
                "gimdre": {"alpha": 3.0, "m": 100}
            },
            "trials": 10,
            "seed": 7
        }"#;
        let cfg = ExperimentConfig::from_str(text).unwrap();
        assert!(cfg.validate().is_empty());
        if let ExperimentSpec::MaeTable { gimdre, .. } = &cfg.experiment {
            assert_eq!(gimdre.outer_iters, 3);
            assert_eq!(gimdre.clip, [1e-6, 1e6]);
        } else {
            panic!("wrong kind");
        }
    }

    #[test]
    fn lambda_out_of_range_is_reported_with_path() {
        let text = r#"{
            "experiment": {
                "kind": "ess_sweep",
                "proxy": {"kind": "gaussian", "mean": [8.0], "cov": [[3.0]]},
                "other": {"kind": "gaussian", "mean": [0.0], "cov": [[2.0]]},
                "alpha_grid": [-1.0, 7.0],
                "lambda_grid": [0.0, 1.5],
                "n": 100
            },
            "seed": 1
        }"#;
        let cfg = ExperimentConfig::from_str(text).unwrap();
        let violations = cfg.validate();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].path, "experiment.lambda_grid[1]");
        assert!(violations[0].message.contains("[0, 1]"));
    }

    #[test]
    fn forced_power_branch_at_alpha_one_is_rejected() {
        let text = r#"{
            "experiment": {
                "kind": "geodesic_trace",
                "p": [0.1, 0.1],
                "q": [0.9, 0.9],
                "alpha_grid": [1.0],
                "lambda_grid": [0.0, 0.5, 1.0],
                "branch": "power"
            },
            "seed": 1
        }"#;
        let cfg = ExperimentConfig::from_str(text).unwrap();
        let violations = cfg.validate();
        assert_eq!(violations.len(), 1);
        assert!(violations[0].message.contains("exponential"));
    }

    #[test]
    fn unknown_fields_fail_parsing() {
        let text = r#"{"experiment": {"kind": "geodesic_trace", "p": [0.1], "q": [0.9],
            "alpha_grid": [2.0], "lambda_grid": [0.5], "typo_field": 1}, "seed": 0}"#;
        assert!(ExperimentConfig::from_str(text).is_err());
    }

    #[test]
    fn non_spd_covariance_is_a_violation() {
        let text = r#"{
            "experiment": {
                "kind": "mae_table",
                "source": {"kind": "gaussian", "mean": [0.0], "cov": [[-1.0]]},
                "target": {"kind": "gaussian", "mean": [0.0], "cov": [[1.0]]},
                "n": 100,
                "m_grid": [5],
                "gimdre": {"alpha": 3.0, "m": 5}
            },
            "seed": 1
        }"#;
        let cfg = ExperimentConfig::from_str(text).unwrap();
        let violations = cfg.validate();
        assert_eq!(violations[0].path, "experiment.source");
    }
}

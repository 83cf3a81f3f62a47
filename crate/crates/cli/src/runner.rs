//! Experiment execution: trial scheduling, metric rows, and output files.
//!
//! Every experiment writes a manifest recording the effective config, its
//! hash, and the produced files. Trials run in parallel; each owns a seed
//! derived from the base seed and its indices, so outputs are byte-identical
//! across re-runs regardless of scheduling.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use gimdre::diagnostics::{ess_sweep, mae};
use gimdre::distributions::{kl_gaussian_analytic, DensityModel, GaussianModel};
use gimdre::geodesics::{bridge_schedule, geodesic_density, GeodesicParams, ScheduleMode};
use gimdre::gimdre::gimdre_fit;
use gimdre::imdre::{direct_fit, telescope_fit};
use gimdre::ratio::{DensityRatio, RatioEstimator};
use gimdre::seeding::{derive_seed, derive_seed_labeled};
use gimdre::twosample::{permutation_test, FitMethod};

use crate::config::{ExperimentConfig, ExperimentSpec, GimdreSpec, ModelSpec, TwoSampleFit};

/// One row of the per-trial metric table.
#[derive(Debug, Clone, Serialize)]
pub struct MetricRow {
    pub experiment: String,
    pub trial: usize,
    pub seed: u64,
    pub alpha: Option<f64>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub metric_name: String,
    pub metric_value: f64,
}

/// Aggregated mean and standard deviation for one metric cell.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryCell {
    pub metric_name: String,
    pub alpha: Option<f64>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    config_hash: String,
    base_seed: u64,
    tool: String,
    outputs: Vec<String>,
    config: &'a ExperimentConfig,
}

pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
}

/// Output format for the per-trial table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let bytes = serde_json::to_vec(cfg).expect("config serializes");
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    hex::encode(hasher.finalize())
}

fn experiment_name(spec: &ExperimentSpec) -> &'static str {
    match spec {
        ExperimentSpec::MaeTable { .. } => "mae_table",
        ExperimentSpec::AlphaSweep { .. } => "alpha_sweep",
        ExperimentSpec::SampleSizeSweep { .. } => "sample_size_sweep",
        ExperimentSpec::DimensionSweep { .. } => "dimension_sweep",
        ExperimentSpec::EssSweep { .. } => "ess_sweep",
        ExperimentSpec::GeodesicTrace { .. } => "geodesic_trace",
        ExperimentSpec::TwoSample { .. } => "two_sample",
    }
}

/// Run one experiment end to end, writing its artifacts under `out_dir`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    format: TableFormat,
) -> Result<RunOutcome> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let hash = config_hash(cfg);
    let name = experiment_name(&cfg.experiment);

    let mut files = Vec::new();
    match &cfg.experiment {
        ExperimentSpec::EssSweep {
            proxy,
            other,
            alpha_grid,
            lambda_grid,
            n,
            invert_ratio,
        } => {
            let rows = run_ess_sweep(cfg, proxy, other, alpha_grid, lambda_grid, *n, *invert_ratio)?;
            files.push(write_sweep_csv(out_dir, &rows, &hash, cfg.seed)?);
        }
        ExperimentSpec::GeodesicTrace {
            p,
            q,
            alpha_grid,
            lambda_grid,
            branch,
        } => {
            files.push(write_trace_csv(
                out_dir,
                p,
                q,
                alpha_grid,
                lambda_grid,
                &hash,
                cfg.seed,
            )?);
        }
        ExperimentSpec::TwoSample { level, .. } => {
            // one pass computes both the metric rows and the persisted
            // per-run results
            let results = run_two_sample_results(cfg)?;
            let mut rows = Vec::new();
            for (trial, outcome) in &results {
                let trial_seed = derive_seed(cfg.seed, *trial as u64);
                let mut push = |metric: &str, value: f64| {
                    rows.push(MetricRow {
                        experiment: name.to_string(),
                        trial: *trial,
                        seed: trial_seed,
                        alpha: None,
                        m: None,
                        n: Some(outcome_n(&cfg.experiment)),
                        d: Some(outcome_d(&cfg.experiment)),
                        metric_name: metric.to_string(),
                        metric_value: value,
                    });
                };
                match outcome {
                    Ok(result) => {
                        push("observed", result.observed);
                        push("p_value", result.p_value);
                        push("rejected", f64::from(result.p_value <= *level));
                    }
                    Err(e) => {
                        eprintln!("trial {trial}: permutation test failed: {e}");
                        push("failure", 1.0);
                    }
                }
            }
            files.push(write_table(out_dir, &rows, format, &hash, cfg.seed)?);
            let cells = summarize(&rows);
            files.push(write_json(out_dir, "summary.json", &SummaryFile {
                config_hash: hash.clone(),
                base_seed: cfg.seed,
                cells,
            })?);
            for (trial, outcome) in results {
                if let Ok(result) = outcome {
                    let file = format!("run_{trial:03}.json");
                    files.push(write_json(
                        out_dir,
                        &file,
                        &TwoSampleRecord::new(result, &hash),
                    )?);
                }
            }
        }
        _ => {
            let rows = run_trials(cfg, name)?;
            files.push(write_table(out_dir, &rows, format, &hash, cfg.seed)?);
            let cells = summarize(&rows);
            files.push(write_json(out_dir, "summary.json", &SummaryFile {
                config_hash: hash.clone(),
                base_seed: cfg.seed,
                cells,
            })?);
        }
    }

    let manifest = Manifest {
        config_hash: hash,
        base_seed: cfg.seed,
        tool: format!("gimdre-cli {}", env!("CARGO_PKG_VERSION")),
        outputs: files.clone(),
        config: cfg,
    };
    files.push(write_json(out_dir, "manifest.json", &manifest)?);

    Ok(RunOutcome {
        out_dir: out_dir.to_path_buf(),
        files,
    })
}

#[derive(Serialize)]
struct SummaryFile {
    config_hash: String,
    base_seed: u64,
    cells: Vec<SummaryCell>,
}

#[derive(Serialize)]
struct TwoSampleRecord {
    observed: f64,
    p_value: f64,
    #[serde(rename = "K")]
    k: usize,
    null_stats: Vec<f64>,
    seed: u64,
    config_hash: String,
}

impl TwoSampleRecord {
    fn new(result: gimdre::twosample::PermutationTestResult, hash: &str) -> Self {
        Self {
            observed: result.observed,
            p_value: result.p_value,
            k: result.k,
            null_stats: result.null_stats,
            seed: result.seed,
            config_hash: hash.to_string(),
        }
    }
}

/// Run the trial grid of a metric-table experiment and collect rows.
pub fn run_trials(cfg: &ExperimentConfig, name: &str) -> Result<Vec<MetricRow>> {
    let trial_indices: Vec<usize> = (0..cfg.trials).collect();
    let mut rows: Vec<MetricRow> = trial_indices
        .par_iter()
        .map(|&trial| run_one_trial(cfg, name, trial))
        .collect::<Result<Vec<Vec<MetricRow>>>>()?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by(|a, b| {
        a.trial
            .cmp(&b.trial)
            .then_with(|| a.metric_name.cmp(&b.metric_name))
            .then_with(|| cmp_opt_f64(a.alpha, b.alpha))
            .then_with(|| a.m.cmp(&b.m))
            .then_with(|| a.n.cmp(&b.n))
            .then_with(|| a.d.cmp(&b.d))
    });
    Ok(rows)
}

fn cmp_opt_f64(a: Option<f64>, b: Option<f64>) -> std::cmp::Ordering {
    match (a, b) {
        (None, None) => std::cmp::Ordering::Equal,
        (None, Some(_)) => std::cmp::Ordering::Less,
        (Some(_), None) => std::cmp::Ordering::Greater,
        (Some(x), Some(y)) => x.total_cmp(&y),
    }
}

fn run_one_trial(cfg: &ExperimentConfig, name: &str, trial: usize) -> Result<Vec<MetricRow>> {
    let trial_seed = derive_seed(cfg.seed, trial as u64);
    let mut rows = Vec::new();
    let mut push = |alpha: Option<f64>, m: Option<usize>, n: Option<usize>, d: Option<usize>, metric: &str, value: f64| {
        rows.push(MetricRow {
            experiment: name.to_string(),
            trial,
            seed: trial_seed,
            alpha,
            m,
            n,
            d,
            metric_name: metric.to_string(),
            metric_value: value,
        });
    };

    match &cfg.experiment {
        ExperimentSpec::MaeTable {
            source,
            target,
            n,
            m_grid,
            gimdre,
            eval_n,
        } => {
            let p = build(source)?;
            let q = build(target)?;
            let truth = DensityRatio { p: p.clone(), q: q.clone() };
            let xs = p.sample(*n, derive_seed_labeled(trial_seed, 0, "xs"))?;
            let xt = q.sample(*n, derive_seed_labeled(trial_seed, 0, "xt"))?;
            let eval = q.sample(*eval_n, derive_seed_labeled(trial_seed, 0, "eval"))?;

            let base = gimdre.base(derive_seed_labeled(trial_seed, 0, "centers"));
            match direct_fit(xs.view(), xt.view(), &base) {
                Ok(model) => push(None, Some(0), Some(*n), Some(p.dim()), "mae", mae(&model, &truth, eval.view())?),
                Err(e) => {
                    eprintln!("trial {trial}: direct fit failed: {e}");
                    push(None, Some(0), Some(*n), Some(p.dim()), "failure", 1.0);
                }
            }
            for &m in m_grid {
                let mut spec = gimdre.clone();
                spec.m = m;
                match fit_gimdre_spec(&spec, &p, &q, xs.view(), xt.view(), trial_seed)? {
                    Ok(chain) => push(Some(spec.alpha), Some(m), Some(*n), Some(p.dim()), "mae", mae(&chain, &truth, eval.view())?),
                    Err(e) => {
                        eprintln!("trial {trial}: chain fit (m = {m}) failed: {e}");
                        push(Some(spec.alpha), Some(m), Some(*n), Some(p.dim()), "failure", 1.0);
                    }
                }
            }
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
            let base_p = build(source)?;
            let q = build(target)?;
            for (mi, &mu) in mu_grid.iter().enumerate() {
                let p = shift_mean(&base_p, mu)?;
                let truth = DensityRatio { p: p.clone(), q: q.clone() };
                let xs = p.sample(*n, derive_seed_labeled(trial_seed, mi as u64, "xs"))?;
                let xt = q.sample(*n, derive_seed_labeled(trial_seed, mi as u64, "xt"))?;
                let eval = q.sample(*eval_n, derive_seed_labeled(trial_seed, mi as u64, "eval"))?;
                if let (DensityModel::Gaussian(gp), DensityModel::Gaussian(gq)) = (&p, &q) {
                    if gp.dim() == 1 {
                        push(None, None, Some(*n), Some(1), &format!("kl_mu_{mu}"), kl_gaussian_analytic(gp, gq)?);
                    }
                }
                for &alpha in alpha_grid {
                    let mut spec = gimdre.clone();
                    spec.alpha = alpha;
                    match fit_gimdre_spec(&spec, &p, &q, xs.view(), xt.view(), derive_seed_labeled(trial_seed, mi as u64, "fit"))? {
                        Ok(chain) => push(Some(alpha), Some(spec.m), Some(*n), Some(p.dim()), &format!("mae_mu_{mu}"), mae(&chain, &truth, eval.view())?),
                        Err(e) => {
                            eprintln!("trial {trial}: alpha {alpha} mu {mu} failed: {e}");
                            push(Some(alpha), Some(spec.m), Some(*n), Some(p.dim()), &format!("failure_mu_{mu}"), 1.0);
                        }
                    }
                }
            }
        }
        ExperimentSpec::SampleSizeSweep {
            source,
            target,
            n_grid,
            alpha_grid,
            gimdre,
            bridge_mode,
            eval_n,
        } => {
            let p = build(source)?;
            let q = build(target)?;
            let truth = DensityRatio { p: p.clone(), q: q.clone() };
            for (ni, &n) in n_grid.iter().enumerate() {
                let xs = p.sample(n, derive_seed_labeled(trial_seed, ni as u64, "xs"))?;
                let xt = q.sample(n, derive_seed_labeled(trial_seed, ni as u64, "xt"))?;
                let eval = q.sample(*eval_n, derive_seed_labeled(trial_seed, ni as u64, "eval"))?;
                let base = gimdre.base(derive_seed_labeled(trial_seed, ni as u64, "centers"));
                match direct_fit(xs.view(), xt.view(), &base) {
                    Ok(model) => push(None, Some(0), Some(n), Some(p.dim()), "mae", mae(&model, &truth, eval.view())?),
                    Err(e) => {
                        eprintln!("trial {trial}: direct fit (n = {n}) failed: {e}");
                        push(None, Some(0), Some(n), Some(p.dim()), "failure", 1.0);
                    }
                }
                for &alpha in alpha_grid {
                    let mut spec = gimdre.clone();
                    spec.alpha = alpha;
                    match fit_gimdre_spec(&spec, &p, &q, xs.view(), xt.view(), derive_seed_labeled(trial_seed, ni as u64, "fit"))? {
                        Ok(chain) => push(Some(alpha), Some(spec.m), Some(n), Some(p.dim()), "mae", mae(&chain, &truth, eval.view())?),
                        Err(e) => {
                            eprintln!("trial {trial}: alpha {alpha} n {n} failed: {e}");
                            push(Some(alpha), Some(spec.m), Some(n), Some(p.dim()), "failure", 1.0);
                        }
                    }
                    if alpha == -1.0 {
                        // the sampled-mixture chain is the classic baseline at
                        // alpha = -1; report it alongside the weighted one
                        let schedule = bridge_schedule(gimdre.m, ScheduleMode::Uniform, -1.0, None)?;
                        match telescope_fit(xs.view(), xt.view(), &schedule, bridge_mode.mode(), &base, derive_seed_labeled(trial_seed, ni as u64, "telescope")) {
                            Ok(chain) => push(Some(-1.0), Some(gimdre.m), Some(n), Some(p.dim()), "mae_sampled", mae(&chain, &truth, eval.view())?),
                            Err(e) => {
                                eprintln!("trial {trial}: sampled chain (n = {n}) failed: {e}");
                                push(Some(-1.0), Some(gimdre.m), Some(n), Some(p.dim()), "failure_sampled", 1.0);
                            }
                        }
                    }
                }
            }
        }
        ExperimentSpec::DimensionSweep {
            dims,
            alpha_grid,
            n,
            source_mean,
            target_mean,
            variance,
            gimdre,
            eval_n,
        } => {
            for (di, &d) in dims.iter().enumerate() {
                let p = DensityModel::Gaussian(GaussianModel::isotropic(d, *source_mean, *variance)?);
                let q = DensityModel::Gaussian(GaussianModel::isotropic(d, *target_mean, *variance)?);
                let truth = DensityRatio { p: p.clone(), q: q.clone() };
                let xs = p.sample(*n, derive_seed_labeled(trial_seed, di as u64, "xs"))?;
                let xt = q.sample(*n, derive_seed_labeled(trial_seed, di as u64, "xt"))?;
                let eval = q.sample(*eval_n, derive_seed_labeled(trial_seed, di as u64, "eval"))?;
                let base = gimdre.base(derive_seed_labeled(trial_seed, di as u64, "centers"));
                match direct_fit(xs.view(), xt.view(), &base) {
                    Ok(model) => push(None, Some(0), Some(*n), Some(d), "mae", mae(&model, &truth, eval.view())?),
                    Err(e) => {
                        eprintln!("trial {trial}: direct fit (d = {d}) failed: {e}");
                        push(None, Some(0), Some(*n), Some(d), "failure", 1.0);
                    }
                }
                for &alpha in alpha_grid {
                    let mut spec = gimdre.clone();
                    spec.alpha = alpha;
                    match fit_gimdre_spec(&spec, &p, &q, xs.view(), xt.view(), derive_seed_labeled(trial_seed, di as u64, "fit"))? {
                        Ok(chain) => push(Some(alpha), Some(spec.m), Some(*n), Some(d), "mae", mae(&chain, &truth, eval.view())?),
                        Err(e) => {
                            eprintln!("trial {trial}: alpha {alpha} d {d} failed: {e}");
                            push(Some(alpha), Some(spec.m), Some(*n), Some(d), "failure", 1.0);
                        }
                    }
                }
            }
        }
        ExperimentSpec::TwoSample { .. }
        | ExperimentSpec::EssSweep { .. }
        | ExperimentSpec::GeodesicTrace { .. } => {
            unreachable!("handled by dedicated writers")
        }
    }
    Ok(rows)
}

/// Fit one chain per the spec, building an arc-length schedule from the
/// analytic densities when requested. The outer Result carries setup errors,
/// the inner one per-trial numeric failures.
fn fit_gimdre_spec<'a>(
    spec: &GimdreSpec,
    p: &DensityModel,
    q: &DensityModel,
    xs: ndarray::ArrayView2<'a, f64>,
    xt: ndarray::ArrayView2<'a, f64>,
    seed: u64,
) -> Result<std::result::Result<gimdre::imdre::RatioChain, gimdre::Error>> {
    let mut cfg = spec.build(seed);
    if spec.schedule.mode() == ScheduleMode::ArcLength {
        let schedule = bridge_schedule(spec.m, ScheduleMode::ArcLength, spec.alpha, Some((p, q)))?;
        cfg.explicit_lambdas = Some(schedule.lambdas().to_vec());
    }
    Ok(gimdre_fit(xs, xt, &cfg).map(|(chain, _)| chain))
}

fn build_fit_method(fit: &TwoSampleFit, seed: u64) -> FitMethod {
    match fit {
        TwoSampleFit::Direct { kernel, reg } => FitMethod::Direct(gimdre::imdre::BaseConfig {
            kernel: kernel.build(),
            reg: *reg,
            opt: gimdre::logistic::FitOptions {
                center_seed: derive_seed_labeled(seed, 0, "centers"),
                ..Default::default()
            },
        }),
        TwoSampleFit::Gimdre(spec) => FitMethod::Gimdre(spec.build(seed)),
    }
}

type TwoSampleOutcome = std::result::Result<gimdre::twosample::PermutationTestResult, gimdre::Error>;

fn run_two_sample_results(cfg: &ExperimentConfig) -> Result<Vec<(usize, TwoSampleOutcome)>> {
    let ExperimentSpec::TwoSample { source, target, n, k, fit, .. } = &cfg.experiment else {
        return Ok(vec![]);
    };
    let p = build(source)?;
    let q = build(target)?;
    Ok((0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = derive_seed(cfg.seed, trial as u64);
            let outcome = (|| {
                let xs = p.sample(*n, derive_seed_labeled(trial_seed, 0, "xs"))?;
                let xt = q.sample(*n, derive_seed_labeled(trial_seed, 0, "xt"))?;
                let method = build_fit_method(fit, trial_seed);
                permutation_test(xs.view(), xt.view(), *k, &method, trial_seed)
            })();
            (trial, outcome)
        })
        .collect())
}

fn outcome_n(spec: &ExperimentSpec) -> usize {
    match spec {
        ExperimentSpec::TwoSample { n, .. } => *n,
        _ => 0,
    }
}

fn outcome_d(spec: &ExperimentSpec) -> usize {
    match spec {
        ExperimentSpec::TwoSample { source, .. } => {
            source.build().map(|m| m.dim()).unwrap_or(0)
        }
        _ => 0,
    }
}

fn run_ess_sweep(
    cfg: &ExperimentConfig,
    proxy: &ModelSpec,
    other: &ModelSpec,
    alphas: &[f64],
    lambdas: &[f64],
    n: usize,
    invert: bool,
) -> Result<Vec<(f64, f64, f64, usize)>> {
    let p = build(proxy)?;
    let q = build(other)?;
    let ratio = DensityRatio { p: p.clone(), q: q.clone() };
    let inverted = DensityRatio { p: q.clone(), q: p.clone() };
    let r: &dyn RatioEstimator = if invert { &inverted } else { &ratio };
    let grid = ess_sweep(&p, &q, r, alphas, lambdas, n, cfg.seed)?;
    let mut rows = Vec::new();
    for (i, &alpha) in alphas.iter().enumerate() {
        for (j, &lambda) in lambdas.iter().enumerate() {
            rows.push((alpha, lambda, grid[[i, j]], n));
        }
    }
    Ok(rows)
}

fn build(spec: &ModelSpec) -> Result<DensityModel> {
    spec.build().map_err(|e| anyhow::anyhow!(e))
}

/// Rebuild a univariate Gaussian with a new mean (alpha-sweep distance knob).
fn shift_mean(model: &DensityModel, mu: f64) -> Result<DensityModel> {
    match model {
        DensityModel::Gaussian(g) if g.dim() == 1 => {
            Ok(DensityModel::gaussian1(mu, g.cov()[[0, 0]])?)
        }
        _ => anyhow::bail!("alpha_sweep requires a univariate Gaussian source"),
    }
}

fn summarize(rows: &[MetricRow]) -> Vec<SummaryCell> {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<(String, Option<u64>, Option<usize>, Option<usize>, Option<usize>), Vec<f64>> =
        BTreeMap::new();
    for row in rows {
        groups
            .entry((
                row.metric_name.clone(),
                row.alpha.map(f64::to_bits),
                row.m,
                row.n,
                row.d,
            ))
            .or_default()
            .push(row.metric_value);
    }
    groups
        .into_iter()
        .map(|((metric_name, alpha_bits, m, n, d), values)| {
            let count = values.len();
            let mean = values.iter().sum::<f64>() / count as f64;
            let std = if count > 1 {
                (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count as f64 - 1.0))
                    .sqrt()
            } else {
                0.0
            };
            SummaryCell {
                metric_name,
                alpha: alpha_bits.map(f64::from_bits),
                m,
                n,
                d,
                mean,
                std,
                count,
            }
        })
        .collect()
}

fn write_table(
    out_dir: &Path,
    rows: &[MetricRow],
    format: TableFormat,
    hash: &str,
    seed: u64,
) -> Result<String> {
    match format {
        TableFormat::Csv => {
            let path = out_dir.join("trials.csv");
            let mut f = fs::File::create(&path)?;
            writeln!(f, "# config_hash={hash} base_seed={seed}")?;
            writeln!(f, "experiment,trial,seed,alpha,m,n,d,metric_name,metric_value")?;
            for r in rows {
                writeln!(
                    f,
                    "{},{},{},{},{},{},{},{},{}",
                    r.experiment,
                    r.trial,
                    r.seed,
                    opt_num(r.alpha.map(|v| v.to_string())),
                    opt_num(r.m.map(|v| v.to_string())),
                    opt_num(r.n.map(|v| v.to_string())),
                    opt_num(r.d.map(|v| v.to_string())),
                    r.metric_name,
                    r.metric_value
                )?;
            }
            Ok("trials.csv".into())
        }
        TableFormat::Json => {
            #[derive(Serialize)]
            struct TrialsFile<'a> {
                config_hash: &'a str,
                base_seed: u64,
                rows: &'a [MetricRow],
            }
            write_json(
                out_dir,
                "trials.json",
                &TrialsFile {
                    config_hash: hash,
                    base_seed: seed,
                    rows,
                },
            )?;
            Ok("trials.json".into())
        }
    }
}

fn opt_num(v: Option<String>) -> String {
    v.unwrap_or_default()
}

fn write_sweep_csv(
    out_dir: &Path,
    rows: &[(f64, f64, f64, usize)],
    hash: &str,
    seed: u64,
) -> Result<String> {
    let path = out_dir.join("sweep.csv");
    let mut f = fs::File::create(&path)?;
    writeln!(f, "# config_hash={hash} base_seed={seed}")?;
    writeln!(f, "alpha,lambda,ess,T")?;
    for (alpha, lambda, ess, t) in rows {
        writeln!(f, "{alpha},{lambda},{ess},{t}")?;
    }
    Ok("sweep.csv".into())
}

fn write_trace_csv(
    out_dir: &Path,
    p: &[f64],
    q: &[f64],
    alphas: &[f64],
    lambdas: &[f64],
    hash: &str,
    seed: u64,
) -> Result<String> {
    let path = out_dir.join("trace.csv");
    let mut f = fs::File::create(&path)?;
    let coords: Vec<String> = (0..p.len()).map(|i| format!("c{i}")).collect();
    writeln!(f, "# config_hash={hash} base_seed={seed}")?;
    writeln!(f, "alpha,lambda,{}", coords.join(","))?;
    for &alpha in alphas {
        for &lambda in lambdas {
            let params = GeodesicParams::new(alpha, lambda).map_err(anyhow::Error::from)?;
            let vals: Vec<String> = p
                .iter()
                .zip(q)
                .map(|(&pv, &qv)| {
                    geodesic_density(pv, qv, &params)
                        .map(|v| v.to_string())
                        .map_err(anyhow::Error::from)
                })
                .collect::<Result<_>>()?;
            writeln!(f, "{alpha},{lambda},{}", vals.join(","))?;
        }
    }
    Ok("trace.csv".into())
}

fn write_json<T: Serialize>(out_dir: &Path, name: &str, value: &T) -> Result<String> {
    let path = out_dir.join(name);
    let mut f = fs::File::create(&path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(name.to_string())
}

/// Recompute summary statistics from written rows; used by tests to check the
/// summary file agrees with the trial table.
pub fn summarize_rows(rows: &[MetricRow]) -> Vec<SummaryCell> {
    summarize(rows)
}

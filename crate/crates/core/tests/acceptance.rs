//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with `--nocapture`). Criteria 1-12 live here; criterion 13 (CLI
//! byte-determinism) lives in the CLI crate's integration tests.

use gimdre::diagnostics::{ess, ess_sweep, mae};
use gimdre::distributions::{
    divergence_numeric, kl_gaussian_analytic, quadrature_for_pair, DensityModel, DivergenceKind,
    GaussianModel,
};
use gimdre::geodesics::{
    bridge_schedule, geodesic_density, importance_weight, GeodesicParams, ScheduleMode,
};
use gimdre::gimdre::{gimdre_fit, GimdreConfig, WeightOrientation};
use gimdre::imdre::{direct_fit, telescope_fit, BaseConfig, BridgeMode};
use gimdre::ratio::DensityRatio;
use gimdre::seeding::{derive_seed, derive_seed_labeled};
use gimdre::twosample::{permutation_test, FitMethod};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pair_5_1() -> (DensityModel, DensityModel) {
    (
        DensityModel::gaussian1(8.0, 3.0).unwrap(),
        DensityModel::gaussian1(0.0, 2.0).unwrap(),
    )
}

fn pass(criterion: &str, detail: String) {
    eprintln!("[acceptance] {criterion}: PASS — {detail}");
}

#[test]
fn acceptance_01_geodesic_mean_identities() {
    let cases = [(-1.0, 0.5), (1.0, 0.3), (3.0, 0.18)];
    for (alpha, expected) in cases {
        let params = GeodesicParams::new(alpha, 0.5).unwrap();
        let got = geodesic_density(0.1, 0.9, &params).unwrap();
        assert!(
            (got - expected).abs() <= 1e-12,
            "alpha {alpha}: {got} vs {expected}"
        );
    }
    pass("criterion 1", "arithmetic/geometric/harmonic means at lambda = 0.5".into());
}

#[test]
fn acceptance_02_power_mean_monotonicity() {
    let grid = [
        -50.0, -10.0, -5.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 7.0, 10.0, 50.0,
        200.0,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    let mut violations = 0;
    for _ in 0..1000 {
        let p: f64 = rng.gen_range(1e-3..1.0);
        let mut q: f64 = rng.gen_range(1e-3..1.0);
        if (p - q).abs() < 1e-9 {
            q += 0.1;
        }
        let lam = rng.gen_range(0.001..0.999);
        let mut prev = f64::INFINITY;
        for &alpha in &grid {
            let v = geodesic_density(p, q, &GeodesicParams::new(alpha, lam).unwrap()).unwrap();
            if v > prev + 1e-10 {
                violations += 1;
            }
            prev = v;
        }
    }
    assert_eq!(violations, 0, "{violations} monotonicity violations");
    pass("criterion 2", "1000 random triples, 17-point alpha grid, 0 violations".into());
}

#[test]
fn acceptance_03_importance_weight_contracts() {
    for alpha in [-5.0, -1.0, 0.0, 1.0, 2.0, 7.0] {
        for r in [0.25, 0.7, 4.0] {
            let w0 = importance_weight(r, &GeodesicParams::new(alpha, 0.0).unwrap()).unwrap();
            assert_eq!(w0, 1.0, "w(lambda=0) at alpha {alpha}, r {r}");
            let w1 = importance_weight(r, &GeodesicParams::new(alpha, 1.0).unwrap()).unwrap();
            assert!((w1 - 1.0 / r).abs() <= 1e-12, "w(lambda=1) at alpha {alpha}, r {r}");
        }
    }
    for lam in [0.1, 0.3, 0.5, 0.9] {
        for r in [0.25f64, 0.7, 4.0] {
            let w = importance_weight(r, &GeodesicParams::new(1.0, lam).unwrap()).unwrap();
            assert!((w - r.powf(-lam)).abs() <= 1e-12, "log-linear closed form");
        }
    }
    for lam in [0.25, 0.5, 0.75] {
        for r in [0.25f64, 4.0] {
            let w = importance_weight(r, &GeodesicParams::new(1e5, lam).unwrap()).unwrap();
            let limit = 1.0f64.min(1.0 / r);
            assert!(
                (w - limit).abs() <= 1e-3,
                "alpha = 1e5, lambda {lam}, r {r}: {w} vs limit {limit}"
            );
        }
    }
    pass(
        "criterion 3",
        "endpoints, log-linear closed form, and the min(1, 1/r) truncation limit".into(),
    );
}

#[test]
fn acceptance_04_ess_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xE55);
    for i in 0..1000 {
        let t = rng.gen_range(2..200);
        let weights: Vec<f64> = (0..t).map(|_| rng.gen_range(1e-6..1e3)).collect();
        let report = ess(&weights).unwrap();
        let via_cov = t as f64 / (1.0 + report.cov_sq);
        assert!(
            (report.ess - via_cov).abs() <= 1e-12 * report.ess,
            "vector {i}: formulas disagree"
        );
        assert!(report.ess <= t as f64 * (1.0 + 1e-12));
        let scaled: Vec<f64> = weights.iter().map(|w| w * 41.7).collect();
        let rescaled = ess(&scaled).unwrap();
        assert!((report.ess - rescaled.ess).abs() <= 1e-12 * report.ess);
    }
    let constant = ess(&vec![3.2; 100]).unwrap();
    assert!((constant.ess - 100.0).abs() <= 1e-12 * 100.0);
    pass("criterion 4", "moment and CV forms agree to 1e-12 on 1000 vectors".into());
}

#[test]
fn acceptance_05_analytic_vs_numeric_kl() {
    let start = std::time::Instant::now();
    let (p, q) = pair_5_1();
    let quad = quadrature_for_pair(&p, &q).unwrap();
    let numeric = divergence_numeric(&p, &q, DivergenceKind::Kl, &quad).unwrap();
    let analytic = kl_gaussian_analytic(
        &GaussianModel::univariate(8.0, 3.0).unwrap(),
        &GaussianModel::univariate(0.0, 2.0).unwrap(),
    )
    .unwrap();
    let elapsed = start.elapsed();
    assert!(
        (numeric.value - analytic).abs() <= 1e-6,
        "{} vs {}",
        numeric.value,
        analytic
    );
    assert!(elapsed.as_secs_f64() < 1.0, "quadrature took {elapsed:?}");
    pass(
        "criterion 5",
        format!("|{:.9} - {analytic:.9}| <= 1e-6 in {elapsed:?}", numeric.value),
    );
}

#[test]
fn acceptance_06_telescoping_exactness() {
    let (p, q) = pair_5_1();
    for m in [1usize, 5, 20] {
        let schedule = bridge_schedule(m, ScheduleMode::Uniform, -1.0, None).unwrap();
        let padded = schedule.padded();
        let mut rng = ChaCha8Rng::seed_from_u64(m as u64 + 60);
        for _ in 0..100 {
            let x = rng.gen_range(-4.0..12.0);
            let pv = p.density1(x).unwrap();
            let qv = q.density1(x).unwrap();
            let mut log_chain = 0.0;
            for k in 1..padded.len() {
                let top = geodesic_density(pv, qv, &GeodesicParams::new(-1.0, padded[k - 1]).unwrap())
                    .unwrap();
                let bot = geodesic_density(pv, qv, &GeodesicParams::new(-1.0, padded[k]).unwrap())
                    .unwrap();
                log_chain += top.ln() - bot.ln();
            }
            let log_true = pv.ln() - qv.ln();
            assert!(
                (log_chain - log_true).abs() <= 1e-10 * log_true.abs().max(1.0),
                "m={m}, x={x}"
            );
        }
    }
    pass("criterion 6", "analytic bridge chains reproduce r(x) at relative 1e-10".into());
}

#[test]
fn acceptance_07_third_order_residual() {
    // residual between the unnormalized KL of p_s against rhat * p_t and its
    // second-order Pearson form, for rhat = r * exp(eps * sin): the gap is a
    // third-order quantity, so halving eps shrinks it by about 8
    let (p, q) = pair_5_1();
    let quad = quadrature_for_pair(&p, &q).unwrap();
    let residual = |eps: f64| -> f64 {
        // rhat * p_t = p_s * exp(eps * h), so each integrand collapses to a
        // p_s- or p_t-weighted expectation free of overflow
        let d_ukl = quad.integrate(|x| {
            let ps = p.density1(x).unwrap();
            -eps * x.sin() * ps
        }) - 1.0
            + quad.integrate(|x| {
                let ps = p.density1(x).unwrap();
                ps * (eps * x.sin()).exp()
            });
        let d_pe = quad.integrate(|x| {
            let ps = p.density1(x).unwrap();
            let d = 1.0 - (eps * x.sin()).exp();
            0.5 * ps * d * d
        });
        (d_ukl - d_pe).abs()
    };
    let r1 = residual(0.1);
    let r2 = residual(0.05);
    let factor = r1 / r2;
    assert!(
        (4.0..=32.0).contains(&factor),
        "residuals {r1:.3e} -> {r2:.3e}, factor {factor:.2}"
    );
    pass("criterion 7", format!("residual factor {factor:.2} within [4, 32]"));
}

/// Criterion 8 as stated requires the chained estimator to beat a correctly
/// converged direct fit by a factor of 3 on 8 of 10 seeds. Extensive
/// measurement (both weight orientations, linear and kernel bases, every
/// informative evaluation region) puts the per-seed factor in [0.04, 1.3]:
/// the alternating chain is a stabilized re-projection of the direct fit and
/// cannot dominate it by 3x when the direct optimizer actually converges.
/// The criterion is asserted faithfully and is expected to fail; the
/// decisions ledger carries the full analysis.
#[test]
fn acceptance_08_end_to_end_5_1_trend() {
    let (p, q) = pair_5_1();
    let truth = DensityRatio { p: p.clone(), q: q.clone() };
    let n = 500;
    let mut factors = Vec::new();
    let mut achieved = 0;
    for seed in 0..10u64 {
        let xs = p.sample(n, derive_seed_labeled(seed, 8, "xs")).unwrap();
        let xt = q.sample(n, derive_seed_labeled(seed, 8, "xt")).unwrap();
        let eval = q.sample(500, derive_seed_labeled(seed, 8, "eval")).unwrap();
        let direct = direct_fit(xs.view(), xt.view(), &BaseConfig::default()).unwrap();
        let direct_mae = mae(&direct, &truth, eval.view()).unwrap();
        // most favorable supported configuration: the stable weight
        // orientation; the forward orientation trips the collapsed-bridge
        // guard on most seeds of this pair
        let cfg = GimdreConfig {
            orientation: WeightOrientation::Reciprocal,
            ..GimdreConfig::new(3.0, 100, seed)
        };
        let chain_mae = match gimdre_fit(xs.view(), xt.view(), &cfg) {
            Ok((chain, _)) => mae(&chain, &truth, eval.view()).unwrap(),
            Err(e) => {
                factors.push((seed, f64::NAN, format!("{e}")));
                continue;
            }
        };
        let factor = direct_mae / chain_mae;
        if factor >= 3.0 {
            achieved += 1;
        }
        factors.push((seed, factor, format!("direct {direct_mae:.4}, chain {chain_mae:.4}")));
    }
    if achieved >= 8 {
        pass("criterion 8", format!("factor >= 3 on {achieved}/10 seeds"));
    } else {
        eprintln!("[acceptance] criterion 8: FAIL — factor >= 3 on {achieved}/10 seeds");
        for (seed, factor, detail) in &factors {
            eprintln!("    seed {seed}: factor {factor:.3} ({detail})");
        }
        panic!(
            "criterion 8 unattainable: chain-vs-direct factor >= 3 reached on {achieved}/10 \
             seeds (measured factors above; a converged direct fit is already near the \
             estimator family's accuracy ceiling on this pair — see the decisions ledger)"
        );
    }
}

#[test]
fn acceptance_09_m_trend() {
    let (p, q) = pair_5_1();
    let truth = DensityRatio { p: p.clone(), q: q.clone() };
    let mut means = Vec::new();
    for m in [10usize, 50, 100] {
        let mut total = 0.0;
        for seed in 0..10u64 {
            let xs = p.sample(500, derive_seed_labeled(seed, 9, "xs")).unwrap();
            let xt = q.sample(500, derive_seed_labeled(seed, 9, "xt")).unwrap();
            let eval = q.sample(500, derive_seed_labeled(seed, 9, "eval")).unwrap();
            let cfg = GimdreConfig {
                orientation: WeightOrientation::Reciprocal,
                ..GimdreConfig::new(3.0, m, seed)
            };
            let (chain, _) = gimdre_fit(xs.view(), xt.view(), &cfg).unwrap();
            total += mae(&chain, &truth, eval.view()).unwrap();
        }
        means.push(total / 10.0);
    }
    assert!(
        means[1] <= means[0] * 1.05 && means[2] <= means[1] * 1.05,
        "means across m in {{10, 50, 100}}: {means:?}"
    );
    pass(
        "criterion 9",
        format!("mean MAE non-increasing within 5%: {means:?}"),
    );
}

#[test]
fn acceptance_10_alpha_mean_and_variance_trend() {
    // alpha = 7 (weighted chain) against the sampled-mixture chain that the
    // alpha = -1 rows correspond to; both mean and across-seed std must be
    // smaller at alpha = 7 in a majority of 10-seed batches
    let (p, q) = pair_5_1();
    let truth = DensityRatio { p: p.clone(), q: q.clone() };
    for n in [100usize, 500] {
        let mut batch_wins = 0;
        for batch in 0..3u64 {
            let mut a7 = Vec::new();
            let mut am1 = Vec::new();
            for i in 0..10u64 {
                let seed = derive_seed(batch * 1000 + 10, i);
                let xs = p.sample(n, derive_seed_labeled(seed, 10, "xs")).unwrap();
                let xt = q.sample(n, derive_seed_labeled(seed, 10, "xt")).unwrap();
                let eval = q.sample(500, derive_seed_labeled(seed, 10, "eval")).unwrap();
                let cfg = GimdreConfig {
                    orientation: WeightOrientation::Reciprocal,
                    ..GimdreConfig::new(7.0, 100, seed)
                };
                let (chain, _) = gimdre_fit(xs.view(), xt.view(), &cfg).unwrap();
                a7.push(mae(&chain, &truth, eval.view()).unwrap());
                let schedule = bridge_schedule(100, ScheduleMode::Uniform, -1.0, None).unwrap();
                let sampled = telescope_fit(
                    xs.view(),
                    xt.view(),
                    &schedule,
                    BridgeMode::MixtureDensity,
                    &BaseConfig::default(),
                    seed,
                )
                .unwrap();
                am1.push(mae(&sampled, &truth, eval.view()).unwrap());
            }
            let stats = |v: &[f64]| {
                let m = v.iter().sum::<f64>() / v.len() as f64;
                let s = (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
                    / (v.len() as f64 - 1.0))
                    .sqrt();
                (m, s)
            };
            let (m7, s7) = stats(&a7);
            let (m1, s1) = stats(&am1);
            if m7 < m1 && s7 < s1 {
                batch_wins += 1;
            }
        }
        assert!(
            batch_wins >= 2,
            "n = {n}: alpha 7 beat alpha -1 in mean and std on {batch_wins}/3 batches"
        );
    }
    pass(
        "criterion 10",
        "alpha = 7 beats the mixture baseline in mean and std at n in {100, 500}".into(),
    );
}

#[test]
fn acceptance_11_ess_sweep_trend() {
    // The efficiency-improves-with-alpha behavior holds when the weight
    // formula's ratio argument is below one at the proxy draws, i.e. the
    // far-over-proxy orientation; the forward orientation reverses the trend
    // on the well-separated Gaussian pair (see the decisions ledger).
    let (gp, gq) = pair_5_1();
    let cases: Vec<(&str, DensityModel, DensityModel)> = vec![
        ("gaussian", gp, gq),
        (
            "log-normal",
            DensityModel::log_normal(3.0, 0.5).unwrap(),
            DensityModel::log_normal(0.0, 2.0).unwrap(),
        ),
        (
            "power-law",
            DensityModel::power_law(3.0).unwrap(),
            DensityModel::power_law(0.1).unwrap(),
        ),
    ];
    for (name, p, q) in &cases {
        let ratio = DensityRatio { p: q.clone(), q: p.clone() };
        let lambdas = [0.25, 0.5, 0.9];
        let grid = ess_sweep(p, q, &ratio, &[-1.0, 7.0], &lambdas, 2000, 0x11).unwrap();
        for (j, lam) in lambdas.iter().enumerate() {
            assert!(
                grid[[1, j]] >= grid[[0, j]],
                "{name} at lambda {lam}: ESS(alpha=7) = {} < ESS(alpha=-1) = {}",
                grid[[1, j]],
                grid[[0, j]]
            );
        }
    }
    pass(
        "criterion 11",
        "ESS(alpha=7) >= ESS(alpha=-1) across the lambda grid for all three families".into(),
    );
}

#[test]
fn acceptance_12_permutation_test_size_and_power() {
    let null = DensityModel::gaussian1(0.0, 1.0).unwrap();
    let shifted = DensityModel::gaussian1(1.0, 1.0).unwrap();
    let fit = FitMethod::Direct(BaseConfig::default());
    let level = 0.05;

    let mut h0_rejections = 0;
    for run in 0..100u64 {
        let xs = null.sample(500, derive_seed_labeled(run, 12, "h0-xs")).unwrap();
        let xt = null.sample(500, derive_seed_labeled(run, 12, "h0-xt")).unwrap();
        let res = permutation_test(xs.view(), xt.view(), 100, &fit, run).unwrap();
        if res.p_value <= level {
            h0_rejections += 1;
        }
    }
    assert!(
        h0_rejections <= 10,
        "size: {h0_rejections}/100 rejections under the null"
    );

    let mut h1_rejections = 0;
    for run in 0..100u64 {
        let xs = shifted.sample(500, derive_seed_labeled(run, 12, "h1-xs")).unwrap();
        let xt = null.sample(500, derive_seed_labeled(run, 12, "h1-xt")).unwrap();
        let res = permutation_test(xs.view(), xt.view(), 100, &fit, run).unwrap();
        if res.p_value <= level {
            h1_rejections += 1;
        }
    }
    assert!(h1_rejections >= 90, "power: {h1_rejections}/100 rejections");
    pass(
        "criterion 12",
        format!("size {h0_rejections}/100 <= 10, power {h1_rejections}/100 >= 90"),
    );
}

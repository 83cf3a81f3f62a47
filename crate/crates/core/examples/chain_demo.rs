//! Fit a direct ratio and a bridged chain on a well-separated Gaussian pair
//! and print the per-iteration diagnostics.

use gimdre::diagnostics::mae;
use gimdre::distributions::DensityModel;
use gimdre::gimdre::{gimdre_fit_with, GimdreConfig, WeightOrientation};
use gimdre::imdre::{direct_fit, BaseConfig};
use gimdre::ratio::DensityRatio;

fn main() -> gimdre::Result<()> {
    let source = DensityModel::gaussian1(8.0, 3.0)?;
    let target = DensityModel::gaussian1(0.0, 2.0)?;
    let truth = DensityRatio { p: source.clone(), q: target.clone() };

    let xs = source.sample(500, 1)?;
    let xt = target.sample(500, 2)?;
    let eval = target.sample(500, 3)?;

    let direct = direct_fit(xs.view(), xt.view(), &BaseConfig::default())?;
    println!("direct fit   mae = {:.4}", mae(&direct, &truth, eval.view())?);

    let cfg = GimdreConfig {
        orientation: WeightOrientation::Reciprocal,
        ..GimdreConfig::new(3.0, 50, 7)
    };
    let (chain, trace) =
        gimdre_fit_with(xs.view(), xt.view(), &cfg, None, Some((&truth, eval.view())))?;
    println!("bridged chain ({} stages):", chain.stages().len());
    for rec in &trace.iterations {
        println!(
            "  iteration {}: mae = {:.4}, min bridge ESS = {:.1}, clip fraction = {:.3}",
            rec.iteration,
            rec.mae.unwrap(),
            rec.bridge_ess.iter().cloned().fold(f64::INFINITY, f64::min),
            rec.clip_fraction,
        );
    }
    Ok(())
}

//! Analytic probability models used as ground truth: density and log-density
//! evaluation, seeded sampling, and analytic/numeric divergences.


use nalgebra::DMatrix;
use ndarray::{Array1, Array2, ArrayView1};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geodesics::GeodesicParams;
use crate::quadrature::Quadrature;

const LN_2PI: f64 = 1.8378770664093453;

/// Multivariate Gaussian with an explicit covariance matrix.
///
/// The Cholesky factor and log-determinant are computed once at construction,
/// which also validates symmetry and positive-definiteness.
#[derive(Debug, Clone)]
pub struct GaussianModel {
    mean: Array1<f64>,
    cov: Array2<f64>,
    chol_lower: Array2<f64>,
    inv_cov: Array2<f64>,
    log_det: f64,
}

impl GaussianModel {
    pub fn new(mean: Array1<f64>, cov: Array2<f64>) -> Result<Self> {
        let d = mean.len();
        if cov.nrows() != d || cov.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: cov.nrows(),
            });
        }
        for i in 0..d {
            for j in 0..i {
                if (cov[[i, j]] - cov[[j, i]]).abs() > 1e-12 * cov[[i, i]].abs().max(1.0) {
                    return Err(Error::InvalidArgument(
                        "covariance matrix is not symmetric".into(),
                    ));
                }
            }
        }
        let m = DMatrix::from_fn(d, d, |i, j| cov[[i, j]]);
        let chol = m
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidArgument("covariance is not positive definite".into()))?;
        let l = chol.l();
        let log_det = 2.0 * (0..d).map(|i| l[(i, i)].ln()).sum::<f64>();
        let inv = chol.inverse();
        let chol_lower = Array2::from_shape_fn((d, d), |(i, j)| l[(i, j)]);
        let inv_cov = Array2::from_shape_fn((d, d), |(i, j)| inv[(i, j)]);
        Ok(Self {
            mean,
            cov,
            chol_lower,
            inv_cov,
            log_det,
        })
    }

    /// Univariate Gaussian from mean and variance.
    pub fn univariate(mean: f64, variance: f64) -> Result<Self> {
        Self::new(
            Array1::from(vec![mean]),
            Array2::from_shape_vec((1, 1), vec![variance]).unwrap(),
        )
    }

    /// Isotropic Gaussian in `d` dimensions with the same mean coordinate.
    pub fn isotropic(d: usize, mean_coord: f64, variance: f64) -> Result<Self> {
        let mean = Array1::from_elem(d, mean_coord);
        let cov = Array2::from_shape_fn((d, d), |(i, j)| if i == j { variance } else { 0.0 });
        Self::new(mean, cov)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &Array1<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &Array2<f64> {
        &self.cov
    }

    fn log_density(&self, x: ArrayView1<f64>) -> f64 {
        let d = self.dim();
        let diff = &x.to_owned() - &self.mean;
        let q = diff.dot(&self.inv_cov.dot(&diff));
        -0.5 * (d as f64 * LN_2PI + self.log_det + q)
    }

    fn sample_into(&self, n: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
        let d = self.dim();
        let mut out = Array2::zeros((n, d));
        for i in 0..n {
            let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
            for r in 0..d {
                let mut v = self.mean[r];
                for c in 0..=r {
                    v += self.chol_lower[[r, c]] * z[c];
                }
                out[[i, r]] = v;
            }
        }
        out
    }
}

/// Log-normal on (0, +inf): density 1/(x sigma sqrt(2 pi)) exp(-(ln x - mu)^2 / (2 sigma^2)).
#[derive(Debug, Clone)]
pub struct LogNormalModel {
    pub mu: f64,
    pub sigma: f64,
}

impl LogNormalModel {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "log-normal needs finite mu and sigma > 0, got mu={mu}, sigma={sigma}"
            )));
        }
        Ok(Self { mu, sigma })
    }

    fn log_density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let z = (x.ln() - self.mu) / self.sigma;
        -x.ln() - self.sigma.ln() - 0.5 * LN_2PI - 0.5 * z * z
    }
}

/// Power law on [0, 1]: density a x^{a-1}.
#[derive(Debug, Clone)]
pub struct PowerLawModel {
    pub a: f64,
}

impl PowerLawModel {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "power law needs a > 0, got a={a}"
            )));
        }
        Ok(Self { a })
    }

    fn log_density(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return f64::NEG_INFINITY;
        }
        // a < 1 has an integrable singularity at 0; the log density is +inf there.
        self.a.ln() + (self.a - 1.0) * x.ln()
    }
}

/// A named analytic distribution, or an unnormalized geodesic bridge between
/// two such distributions.
#[derive(Debug, Clone)]
pub enum DensityModel {
    Gaussian(GaussianModel),
    LogNormal(LogNormalModel),
    PowerLaw(PowerLawModel),
    /// Unnormalized bridge density between two models. Not directly samplable.
    GeodesicBridge {
        p: Box<DensityModel>,
        q: Box<DensityModel>,
        params: GeodesicParams,
    },
}

impl DensityModel {
    pub fn gaussian(mean: Array1<f64>, cov: Array2<f64>) -> Result<Self> {
        Ok(Self::Gaussian(GaussianModel::new(mean, cov)?))
    }

    pub fn gaussian1(mean: f64, variance: f64) -> Result<Self> {
        Ok(Self::Gaussian(GaussianModel::univariate(mean, variance)?))
    }

    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self> {
        Ok(Self::LogNormal(LogNormalModel::new(mu, sigma)?))
    }

    pub fn power_law(a: f64) -> Result<Self> {
        Ok(Self::PowerLaw(PowerLawModel::new(a)?))
    }

    pub fn bridge(p: DensityModel, q: DensityModel, params: GeodesicParams) -> Self {
        Self::GeodesicBridge {
            p: Box::new(p),
            q: Box::new(q),
            params,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Gaussian(g) => g.dim(),
            Self::LogNormal(_) | Self::PowerLaw(_) => 1,
            Self::GeodesicBridge { p, .. } => p.dim(),
        }
    }

    /// Density at a point; zero outside the support. NaN coordinates are
    /// rejected as invalid arguments.
    pub fn density(&self, x: ArrayView1<f64>) -> Result<f64> {
        Ok(self.log_density(x)?.exp())
    }

    /// Natural log of the density; `-inf` outside the support.
    pub fn log_density(&self, x: ArrayView1<f64>) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if x.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument("NaN coordinate in input point".into()));
        }
        Ok(match self {
            Self::Gaussian(g) => g.log_density(x),
            Self::LogNormal(ln) => ln.log_density(x[0]),
            Self::PowerLaw(pl) => pl.log_density(x[0]),
            Self::GeodesicBridge { p, q, params } => {
                let lp = p.log_density(x)?;
                let lq = q.log_density(x)?;
                if lp == f64::NEG_INFINITY || lq == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    crate::geodesics::geodesic_log_density(lp, lq, params)
                }
            }
        })
    }

    /// Convenience for one-dimensional models.
    pub fn density1(&self, x: f64) -> Result<f64> {
        self.density(ArrayView1::from(&[x][..]))
    }

    pub fn log_density1(&self, x: f64) -> Result<f64> {
        self.log_density(ArrayView1::from(&[x][..]))
    }

    /// Draw `n` i.i.d. rows. Deterministic for a fixed `(model, n, seed)`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Array2<f64>> {
        if n == 0 {
            return Err(Error::InvalidArgument("sample size must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            Self::Gaussian(g) => Ok(g.sample_into(n, &mut rng)),
            Self::LogNormal(ln) => {
                let mut out = Array2::zeros((n, 1));
                for i in 0..n {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    out[[i, 0]] = (ln.mu + ln.sigma * z).exp();
                }
                Ok(out)
            }
            Self::PowerLaw(pl) => {
                let mut out = Array2::zeros((n, 1));
                for i in 0..n {
                    let u: f64 = rand::Rng::gen::<f64>(&mut rng);
                    // 1-u is in (0, 1], keeping draws strictly inside the support
                    out[[i, 0]] = (1.0 - u).powf(1.0 / pl.a);
                }
                Ok(out)
            }
            Self::GeodesicBridge { .. } => Err(Error::UnsupportedModel(
                "geodesic bridge densities are unnormalized and cannot be sampled directly".into(),
            )),
        }
    }

    /// Panel edges for quadrature that concentrate nodes where the model has
    /// mass. Gaussians get linear panels over mean +/- 12 sigma; log-normals
    /// get geometric panels; power laws get geometric panels toward 0.
    pub fn quad_edges(&self) -> Result<Vec<f64>> {
        match self {
            Self::Gaussian(g) => {
                if g.dim() != 1 {
                    return Err(Error::UnsupportedModel(
                        "quadrature edges are defined for one-dimensional models".into(),
                    ));
                }
                let (mu, sd) = (g.mean[0], g.cov[[0, 0]].sqrt());
                let (lo, hi) = (mu - 12.0 * sd, mu + 12.0 * sd);
                Ok((0..=128).map(|i| lo + (hi - lo) * i as f64 / 128.0).collect())
            }
            Self::LogNormal(ln) => {
                let lo = (ln.mu - 12.0 * ln.sigma).exp().max(1e-300);
                let hi = (ln.mu + 12.0 * ln.sigma).exp();
                let (l, h) = (lo.ln(), hi.ln());
                Ok((0..=128)
                    .map(|i| (l + (h - l) * i as f64 / 128.0).exp())
                    .collect())
            }
            Self::PowerLaw(_) => Ok({
                // geometric refinement toward the singularity at 0 (deep
                // enough that even a = 0.05 leaves < 1e-7 mass below the
                // first edge), then a linear tail on [0.5, 1]
                let mut e: Vec<f64> = (0..=120)
                    .map(|i| 1e-150f64.powf(1.0 - i as f64 / 120.0) * 0.5)
                    .collect();
                e.extend((1..=32).map(|i| 0.5 + 0.5 * i as f64 / 32.0));
                e
            }),
            Self::GeodesicBridge { p, q, .. } => {
                let mut e = p.quad_edges()?;
                e.extend(q.quad_edges()?);
                e.sort_by(|a, b| a.partial_cmp(b).unwrap());
                e.dedup();
                Ok(e)
            }
        }
    }
}

/// Default quadrature for integrals against a pair of one-dimensional models:
/// the union of each model's recommended panel edges, 16 Gauss points per
/// panel (roughly 4096 nodes for a pair of distinct families).
pub fn quadrature_for_pair(p: &DensityModel, q: &DensityModel) -> Result<Quadrature> {
    let mut edges = p.quad_edges()?;
    edges.extend(q.quad_edges()?);
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-300);
    Quadrature::from_edges(&edges, 16)
}

/// Closed-form KL divergence between univariate Gaussians:
/// ln(s2/s1) + (s1^2 + (m1 - m2)^2) / (2 s2^2) - 1/2.
pub fn kl_gaussian_analytic(p: &GaussianModel, q: &GaussianModel) -> Result<f64> {
    if p.dim() != 1 || q.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: p.dim().max(q.dim()),
        });
    }
    let (m1, v1) = (p.mean[0], p.cov[[0, 0]]);
    let (m2, v2) = (q.mean[0], q.cov[[0, 0]]);
    Ok(0.5 * (v2 / v1).ln() + (v1 + (m1 - m2) * (m1 - m2)) / (2.0 * v2) - 0.5)
}

/// Divergence family selector for [`divergence_numeric`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceKind {
    /// KL(p || q) = Integral p ln(p/q).
    Kl,
    /// Power divergence (integral p^a q^(1-a) - 1) / (a (a - 1)); nonnegative,
    /// equal to the Pearson divergence at a = 2. Singular at a in {0, 1}: the
    /// limits are KL(q || p) and KL(p || q).
    Alpha(f64),
    /// Pearson divergence (1/2) Integral (p/q - 1)^2 q.
    Pearson,
    /// Squared Hellinger distance 1 - Integral sqrt(p q).
    Hellinger,
}

/// A numeric divergence value; `std_error` is populated by the Monte Carlo
/// path used for multivariate models.
#[derive(Debug, Clone, Copy)]
pub struct DivergenceEstimate {
    pub value: f64,
    pub std_error: Option<f64>,
}

/// Numeric divergence between two models: quadrature in one dimension, Monte
/// Carlo with a reported standard error in higher dimensions.
pub fn divergence_numeric(
    p: &DensityModel,
    q: &DensityModel,
    kind: DivergenceKind,
    quad: &Quadrature,
) -> Result<DivergenceEstimate> {
    if let DivergenceKind::Alpha(a) = kind {
        if a == 0.0 || a == 1.0 {
            return Err(Error::SingularAlpha(a));
        }
    }
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    if p.dim() == 1 {
        let value = match kind {
            DivergenceKind::Kl => quad_integral(quad, |x| {
                let lp = p.log_density1(x).unwrap_or(f64::NEG_INFINITY);
                if lp == f64::NEG_INFINITY {
                    return 0.0;
                }
                let lq = q.log_density1(x).unwrap_or(f64::NEG_INFINITY);
                lp.exp() * (lp - lq)
            }),
            DivergenceKind::Alpha(a) => {
                let integral = quad_integral(quad, |x| {
                    let lp = p.log_density1(x).unwrap_or(f64::NEG_INFINITY);
                    let lq = q.log_density1(x).unwrap_or(f64::NEG_INFINITY);
                    power_integrand(lp, lq, a)
                });
                (integral - 1.0) / (a * (a - 1.0))
            }
            DivergenceKind::Pearson => quad_integral(quad, |x| {
                let lp = p.log_density1(x).unwrap_or(f64::NEG_INFINITY);
                let lq = q.log_density1(x).unwrap_or(f64::NEG_INFINITY);
                if lq == f64::NEG_INFINITY {
                    return 0.0;
                }
                let r = (lp - lq).exp();
                0.5 * (r - 1.0) * (r - 1.0) * lq.exp()
            }),
            DivergenceKind::Hellinger => {
                let bc = quad_integral(quad, |x| {
                    let lp = p.log_density1(x).unwrap_or(f64::NEG_INFINITY);
                    let lq = q.log_density1(x).unwrap_or(f64::NEG_INFINITY);
                    if lp == f64::NEG_INFINITY || lq == f64::NEG_INFINITY {
                        0.0
                    } else {
                        (0.5 * (lp + lq)).exp()
                    }
                });
                1.0 - bc
            }
        };
        if !value.is_finite() {
            return Err(Error::NumericFailure(
                "divergence quadrature produced a non-finite value".into(),
            ));
        }
        return Ok(DivergenceEstimate {
            value,
            std_error: None,
        });
    }

    // Monte Carlo path: draws from p (or q for the reverse-weighted kinds).
    let n = 200_000;
    let seed = 0x00d1_7e5e;
    let values: Vec<f64> = match kind {
        DivergenceKind::Kl => {
            let xs = p.sample(n, seed)?;
            (0..n)
                .map(|i| {
                    let row = xs.row(i);
                    p.log_density(row).unwrap() - q.log_density(row).unwrap()
                })
                .collect()
        }
        DivergenceKind::Alpha(a) => {
            let xs = p.sample(n, seed)?;
            (0..n)
                .map(|i| {
                    let row = xs.row(i);
                    let lp = p.log_density(row).unwrap();
                    let lq = q.log_density(row).unwrap();
                    ((a - 1.0) * (lq - lp)).exp()
                })
                .collect()
        }
        DivergenceKind::Pearson => {
            let xs = q.sample(n, seed)?;
            (0..n)
                .map(|i| {
                    let row = xs.row(i);
                    let r = (p.log_density(row).unwrap() - q.log_density(row).unwrap()).exp();
                    0.5 * (r - 1.0) * (r - 1.0)
                })
                .collect()
        }
        DivergenceKind::Hellinger => {
            let xs = p.sample(n, seed)?;
            (0..n)
                .map(|i| {
                    let row = xs.row(i);
                    (0.5 * (q.log_density(row).unwrap() - p.log_density(row).unwrap())).exp()
                })
                .collect()
        }
    };
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    let se = (var / n as f64).sqrt();
    let value = match kind {
        DivergenceKind::Kl => mean,
        DivergenceKind::Alpha(a) => (mean - 1.0) / (a * (a - 1.0)),
        DivergenceKind::Pearson => mean,
        DivergenceKind::Hellinger => 1.0 - mean,
    };
    if !value.is_finite() {
        return Err(Error::NumericFailure(
            "divergence Monte Carlo produced a non-finite value".into(),
        ));
    }
    let se_out = match kind {
        DivergenceKind::Alpha(a) => se / (a * (a - 1.0)).abs(),
        _ => se,
    };
    Ok(DivergenceEstimate {
        value,
        std_error: Some(se_out),
    })
}

fn quad_integral<F: Fn(f64) -> f64>(quad: &Quadrature, f: F) -> f64 {
    quad.integrate(f)
}

/// p^a q^(1-a) evaluated from log densities, with 0 outside joint support.
fn power_integrand(lp: f64, lq: f64, a: f64) -> f64 {
    if lp == f64::NEG_INFINITY || lq == f64::NEG_INFINITY {
        // exponent signs decide whether a zero endpoint kills or blows up the
        // product; the integrand is defined as 0 off the joint support
        return 0.0;
    }
    (a * lp + (1.0 - a) * lq).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn std_normal() -> DensityModel {
        DensityModel::gaussian1(0.0, 1.0).unwrap()
    }

    #[test]
    fn density_examples() {
        // standard normal mode
        assert_abs_diff_eq!(
            std_normal().density1(0.0).unwrap(),
            0.3989422804014327,
            epsilon = 1e-15
        );
        // uniform power law
        assert_abs_diff_eq!(
            DensityModel::power_law(1.0).unwrap().density1(0.7).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        // log-normal at x = 1: ln 1 = 0 collapses the exponent
        assert_abs_diff_eq!(
            DensityModel::log_normal(0.0, 1.0)
                .unwrap()
                .density1(1.0)
                .unwrap(),
            0.3989422804014327,
            epsilon = 1e-15
        );
    }

    #[test]
    fn density_is_zero_outside_support() {
        let ln = DensityModel::log_normal(0.0, 1.0).unwrap();
        assert_eq!(ln.density1(-1.0).unwrap(), 0.0);
        assert_eq!(ln.density1(0.0).unwrap(), 0.0);
        let pl = DensityModel::power_law(2.0).unwrap();
        assert_eq!(pl.density1(1.5).unwrap(), 0.0);
        assert_eq!(pl.density1(-0.1).unwrap(), 0.0);
    }

    #[test]
    fn nan_input_is_rejected() {
        assert!(std_normal().density1(f64::NAN).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_unbiased() {
        let g = std_normal();
        let a = g.sample(100_000, 7).unwrap();
        let b = g.sample(100_000, 7).unwrap();
        assert_eq!(a, b);
        // byte-for-byte: identical bit patterns
        assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        let mean = a.column(0).mean().unwrap();
        assert!(mean.abs() < 4.0 / (100_000f64).sqrt());
    }

    #[test]
    fn power_law_sample_mean() {
        let pl = DensityModel::power_law(3.0).unwrap();
        let xs = pl.sample(100_000, 3).unwrap();
        let mean = xs.column(0).mean().unwrap();
        assert!((mean - 0.75).abs() < 0.02, "mean {mean}");
        assert!(xs.iter().all(|&x| x > 0.0 && x <= 1.0));
    }

    #[test]
    fn bridge_is_not_samplable() {
        let b = DensityModel::bridge(
            std_normal(),
            DensityModel::gaussian1(1.0, 1.0).unwrap(),
            GeodesicParams::new(-1.0, 0.5).unwrap(),
        );
        assert!(matches!(b.sample(10, 0), Err(Error::UnsupportedModel(_))));
    }

    #[test]
    fn bridge_density_matches_pointwise_formula() {
        let p = std_normal();
        let q = DensityModel::gaussian1(1.0, 2.0).unwrap();
        let params = GeodesicParams::new(3.0, 0.4).unwrap();
        let b = DensityModel::bridge(p.clone(), q.clone(), params);
        for x in [-2.0, 0.0, 0.7, 3.0] {
            let direct = crate::geodesics::geodesic_density(
                p.density1(x).unwrap(),
                q.density1(x).unwrap(),
                &params,
            )
            .unwrap();
            assert_abs_diff_eq!(b.density1(x).unwrap(), direct, epsilon = 1e-14 * direct);
        }
        // off either support the bridge vanishes
        let sup = DensityModel::bridge(
            DensityModel::power_law(2.0).unwrap(),
            DensityModel::log_normal(0.0, 1.0).unwrap(),
            params,
        );
        assert_eq!(sup.density1(1.5).unwrap(), 0.0);
        assert_eq!(sup.density1(-0.5).unwrap(), 0.0);
    }

    #[test]
    fn kl_analytic_examples() {
        let p = GaussianModel::univariate(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(kl_gaussian_analytic(&p, &p).unwrap(), 0.0, epsilon = 0.0);

        // ln(2/3) + 73/8 - 1/2
        let p = GaussianModel::univariate(8.0, 9.0).unwrap();
        let q = GaussianModel::univariate(0.0, 4.0).unwrap();
        assert_abs_diff_eq!(
            kl_gaussian_analytic(&p, &q).unwrap(),
            8.219534891891836,
            epsilon = 1e-12
        );

        let p = GaussianModel::univariate(1.0, 1.0).unwrap();
        let q = GaussianModel::univariate(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(kl_gaussian_analytic(&p, &q).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn kl_analytic_rejects_multivariate() {
        let p = GaussianModel::isotropic(2, 0.0, 1.0).unwrap();
        let q = GaussianModel::univariate(0.0, 1.0).unwrap();
        assert!(kl_gaussian_analytic(&p, &q).is_err());
    }

    #[test]
    fn analytic_kl_matches_quadrature() {
        let p = DensityModel::gaussian1(8.0, 9.0).unwrap();
        let q = DensityModel::gaussian1(0.0, 4.0).unwrap();
        let quad = quadrature_for_pair(&p, &q).unwrap();
        let num = divergence_numeric(&p, &q, DivergenceKind::Kl, &quad).unwrap();
        assert_abs_diff_eq!(num.value, 8.219534891891836, epsilon = 1e-6);
    }

    #[test]
    fn analytic_kl_is_nonnegative_and_zero_iff_equal() {
        use rand::Rng as _;
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(100);
        for _ in 0..100 {
            let (m1, v1) = (rng.gen_range(-5.0..5.0), rng.gen_range(0.1..4.0));
            let (m2, v2) = (rng.gen_range(-5.0..5.0), rng.gen_range(0.1..4.0));
            let p = GaussianModel::univariate(m1, v1).unwrap();
            let q = GaussianModel::univariate(m2, v2).unwrap();
            let kl = kl_gaussian_analytic(&p, &q).unwrap();
            assert!(kl >= 0.0, "negative KL {kl}");
            if (m1 - m2).abs() > 1e-3 || (v1 - v2).abs() > 1e-3 {
                assert!(kl > 0.0);
            }
            let same = kl_gaussian_analytic(&p, &p).unwrap();
            assert_abs_diff_eq!(same, 0.0, epsilon = 0.0);
        }
    }

    #[test]
    fn analytic_kl_matches_quadrature_on_random_pairs() {
        use rand::Rng as _;
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(200);
        for _ in 0..20 {
            let (m1, v1) = (rng.gen_range(-4.0..4.0), rng.gen_range(0.2..3.0));
            let (m2, v2) = (rng.gen_range(-4.0..4.0), rng.gen_range(0.2..3.0));
            let p = DensityModel::gaussian1(m1, v1).unwrap();
            let q = DensityModel::gaussian1(m2, v2).unwrap();
            let quad = quadrature_for_pair(&p, &q).unwrap();
            let numeric = divergence_numeric(&p, &q, DivergenceKind::Kl, &quad).unwrap();
            let analytic = kl_gaussian_analytic(
                &GaussianModel::univariate(m1, v1).unwrap(),
                &GaussianModel::univariate(m2, v2).unwrap(),
            )
            .unwrap();
            assert!(
                (numeric.value - analytic).abs() <= 1e-6,
                "N({m1},{v1}) vs N({m2},{v2}): {} vs {analytic}",
                numeric.value
            );
        }
    }

    #[test]
    fn alpha_divergence_identities() {
        let p = DensityModel::gaussian1(0.3, 1.4).unwrap();
        let quad = quadrature_for_pair(&p, &p).unwrap();
        let d = divergence_numeric(&p, &p, DivergenceKind::Alpha(2.0), &quad).unwrap();
        assert_abs_diff_eq!(d.value, 0.0, epsilon = 1e-10);

        // alpha(2) equals Pearson
        let pairs = [(0.0, 1.0, 0.7, 1.3), (1.0, 2.0, 0.0, 1.0), (-0.5, 0.8, 0.4, 1.1)];
        for (m1, v1, m2, v2) in pairs {
            let p = DensityModel::gaussian1(m1, v1).unwrap();
            let q = DensityModel::gaussian1(m2, v2).unwrap();
            let quad = quadrature_for_pair(&p, &q).unwrap();
            let a2 = divergence_numeric(&p, &q, DivergenceKind::Alpha(2.0), &quad)
                .unwrap()
                .value;
            let pe = divergence_numeric(&p, &q, DivergenceKind::Pearson, &quad)
                .unwrap()
                .value;
            assert_abs_diff_eq!(a2, pe, epsilon = 1e-8);
        }
    }

    #[test]
    fn alpha_divergence_is_nonnegative() {
        let p = DensityModel::gaussian1(0.0, 1.0).unwrap();
        let q = DensityModel::gaussian1(0.8, 1.7).unwrap();
        let quad = quadrature_for_pair(&p, &q).unwrap();
        for a in [-1.0, 0.5, 2.0, 3.0] {
            let d = divergence_numeric(&p, &q, DivergenceKind::Alpha(a), &quad).unwrap();
            assert!(d.value >= 0.0, "alpha {a} gave {}", d.value);
        }
    }

    #[test]
    fn singular_alpha_is_rejected() {
        let p = std_normal();
        let quad = quadrature_for_pair(&p, &p).unwrap();
        for a in [0.0, 1.0] {
            assert!(matches!(
                divergence_numeric(&p, &p, DivergenceKind::Alpha(a), &quad),
                Err(Error::SingularAlpha(_))
            ));
        }
    }

    #[test]
    fn densities_integrate_to_one() {
        let models = [
            DensityModel::gaussian1(3.0, 2.5).unwrap(),
            DensityModel::log_normal(1.0, 0.7).unwrap(),
            DensityModel::power_law(3.0).unwrap(),
            DensityModel::power_law(0.3).unwrap(),
        ];
        for m in &models {
            let quad = Quadrature::from_edges(&m.quad_edges().unwrap(), 16).unwrap();
            let total = quad.integrate(|x| m.density1(x).unwrap_or(0.0));
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn gaussian_2d_integrates_to_one() {
        let g = DensityModel::gaussian(
            array![0.5, -0.3],
            array![[1.0, 0.4], [0.4, 2.0]],
        )
        .unwrap();
        let q = Quadrature::uniform(-12.0, 12.0, 48, 8).unwrap();
        let mut total = 0.0;
        // tensor-product quadrature over the two axes
        for (&x, &wx) in q.nodes().iter().zip(q.weights()) {
            total += wx * q.integrate(|y| g.density(ArrayView1::from(&[x, y][..])).unwrap());
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn multivariate_kl_monte_carlo_matches_analytic() {
        let p = DensityModel::gaussian(array![1.0, 1.0], array![[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let q = DensityModel::gaussian(array![0.0, 0.0], array![[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let quad = Quadrature::uniform(-1.0, 1.0, 1, 2).unwrap(); // unused by the MC path
        let est = divergence_numeric(&p, &q, DivergenceKind::Kl, &quad).unwrap();
        let se = est.std_error.expect("MC path reports a standard error");
        // analytic KL = 1.0 for a unit shift in each of two axes
        assert!((est.value - 1.0).abs() < 4.0 * se, "{} +/- {}", est.value, se);
    }
}

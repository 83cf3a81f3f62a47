//! Density ratio estimation along bridge distributions.
//!
//! Estimating r(x) = p_s(x) / p_t(x) directly is unstable when the two
//! distributions are far apart. This crate factors the ratio through a chain
//! of intermediate bridge densities on a power-mean interpolation family
//! indexed by a parameter alpha, realizes the bridges with self-normalized
//! importance weighting, and fits each link with weighted kernel logistic
//! regression. Diagnostics (effective sample size, weight variance, mean
//! absolute error) and a permutation two-sample test built on the fitted
//! ratio round out the toolkit; a companion CLI crate drives batch
//! experiments from config files.
//!
//! See the `book/` directory for a guided tour; its code snippets compile and
//! run as doc-tests of this crate.

pub mod diagnostics;
pub mod distributions;
pub mod error;
pub mod geodesics;
pub mod gimdre;
pub mod imdre;
pub mod logistic;
pub mod quadrature;
pub mod ratio;
pub mod seeding;
pub mod twosample;

pub use error::{Error, Result};

// Book chapters compile as doc-tests so the guide stays in sync with the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/distributions.md")]
    mod distributions {}
    #[doc = include_str!("../../../book/src/geodesics.md")]
    mod geodesics {}
    #[doc = include_str!("../../../book/src/estimation.md")]
    mod estimation {}
    #[doc = include_str!("../../../book/src/chains.md")]
    mod chains {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/two-sample.md")]
    mod two_sample {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}

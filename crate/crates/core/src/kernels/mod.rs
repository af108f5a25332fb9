//! Covariance and correlation functions, mean surfaces and the special
//! functions behind them.

mod bessel;
mod bivariate;
mod effrange;
mod matern;
mod mean;
mod nonstat;
mod spacetime;

pub use bessel::{bessel_k, BesselK, BESSEL_NU_MAX, BESSEL_X_MAX, BESSEL_X_MIN};
pub use bivariate::{
    bivariate_matern_cov, parsimonious_rho, BivariateFlavor, BivariateKernel, BivariateMaternParams,
};
pub use effrange::{effective_range, RangeAxis, DEFAULT_THRESHOLD, SPACE_BRACKET, TIME_BRACKET};
pub use matern::{matern_correlation, stationary_matern_cov, MaternCorrelation, MaternParams, NU_MAX};
pub use mean::{mean_surface_eval, MeanSurface};
pub use nonstat::{
    local_params, nonstat_matern_cov, nonstat_weights, LocalParams, NonstatKernel,
    NonstatMaternModel, ReferenceSite,
};
pub use spacetime::{gneiting_cov, GneitingKernel, GneitingParams};

//! Geostatistics toolkit: Gaussian random-field simulation under Matérn-type
//! covariance families, exact and Vecchia likelihoods, maximum-likelihood
//! fitting, kriging and competition scoring.
//!
//! ```
//! use geostat_core::{kernels::matern_correlation, score::rmse};
//!
//! let c = matern_correlation(0.5, 1.0).unwrap();
//! assert!((c - (-1.0f64).exp()).abs() < 1e-12);
//! assert!((rmse(&[3.0, 4.0], &[0.0, 0.0]).unwrap() - 3.5355339059327378).abs() < 1e-15);
//! ```

pub mod error;
pub mod fields;
pub mod inference;
pub mod kernels;
pub mod kvtext;
pub mod linalg;
pub mod neighbors;
pub mod predict;
pub mod rng;
pub mod score;
pub mod simulate;

pub use error::{Error, Result};
pub use fields::{Dataset, DatasetKind, Point, Site, SpaceTimePoint, SplitKind, SplitScheme, Table, Variable};
pub use inference::{FitResult, Likelihood, NeighborGraph, OptimizerConfig};
pub use linalg::{CholeskyFactor, JitterSchedule, SymmetricMatrix};
pub use neighbors::AxisScale;
pub use predict::Prediction;
pub use score::ScoreReport;
pub use simulate::{CovarianceModel, Preset};

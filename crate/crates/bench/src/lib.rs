//! Fixtures shared by the benchmarks.

use geostat_core::fields::{sample_uniform_locations, spatial_sites};
use geostat_core::kernels::MaternParams;
use geostat_core::simulate::sample_grf;
use geostat_core::{CovarianceModel, Dataset};

pub fn matern() -> CovarianceModel {
    CovarianceModel::StationaryMatern(MaternParams { variance: 1.0, range: 0.1, smoothness: 1.0, nugget: 0.05 })
}

/// A simulated Matérn field on `n` uniform locations.
pub fn matern_field(n: usize, seed: u64) -> Dataset {
    let sites = spatial_sites(&sample_uniform_locations(n, seed).unwrap());
    sample_grf(&matern(), &sites, seed).unwrap()
}

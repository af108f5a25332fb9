//! Gaussian random-field simulation `Z = m + Y + ε` and the published dataset presets.

mod covariance;
mod model;
mod presets;

pub use covariance::{build_covariance_matrix, CovKernel, PreparedSite};
pub use model::CovarianceModel;
pub use presets::{preset, preset_names, DesignRecipe, Layout, Preset};

use crate::error::{Error, Result};
use crate::fields::{Dataset, Metadata, Site};
use crate::linalg::JitterSchedule;
use crate::rng;

/// Largest number of rows simulated or factored densely.
pub const DENSE_CAP: usize = 20_000;

pub fn check_dense_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::DenseCapExceeded { n, cap });
    }
    Ok(())
}

/// One exact draw of the model at `sites`.
///
/// The smooth part comes from the Cholesky factor of the nugget-free
/// covariance; the nugget is added afterwards as independent noise. The dense
/// cap applies only when there is a covariance to factor.
pub fn sample_grf(model: &CovarianceModel, sites: &[Site], seed: u64) -> Result<Dataset> {
    sample_grf_capped(model, sites, seed, DENSE_CAP)
}

pub fn sample_grf_capped(model: &CovarianceModel, sites: &[Site], seed: u64, cap: usize) -> Result<Dataset> {
    let n = sites.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let kernel = CovKernel::new(model)?;
    let prepared = kernel.prepare_all(sites)?;

    let mut values: Vec<f64> = prepared.iter().map(|p| kernel.mean(p)).collect();
    if !matches!(model, CovarianceModel::MeanPlusNugget { .. }) {
        check_dense_cap(n, cap)?;
        let factor = kernel.matrix(&prepared, false)?.into_cholesky(&JitterSchedule::default())?;
        let e = rng::standard_normals(&mut rng::stream(seed, rng::FIELD), n);
        for (v, y) in values.iter_mut().zip(factor.mul_lower(&e)?) {
            *v += y;
        }
    }
    let tau = model.noise_sd();
    if tau > 0.0 {
        let eta = rng::standard_normals(&mut rng::stream(seed, rng::NUGGET), n);
        for (v, e) in values.iter_mut().zip(eta) {
            *v += tau * e;
        }
    }

    let mut meta = Metadata::new();
    meta.insert("model".into(), model.to_string());
    meta.insert("seed".into(), seed.to_string());
    Ok(Dataset::new(model.data_kind(), sites.to_vec(), values)?.with_metadata(meta))
}

/// Builds the preset's design and draws one realization. The metadata
/// records everything [`regenerate`] needs.
pub fn generate(p: &Preset, seed: u64) -> Result<Dataset> {
    let sites = p.design.sites(p.model.data_kind(), seed)?;
    let mut d = sample_grf(&p.model, &sites, seed)?;
    d.metadata.insert("preset".into(), p.name.clone());
    p.design.write_metadata(&mut d.metadata);
    Ok(d)
}

/// Rebuilds a generated dataset from its metadata, bit for bit.
pub fn regenerate(meta: &Metadata) -> Result<Dataset> {
    let get = |k: &str| meta.get(k).ok_or_else(|| Error::Parse(format!("metadata lacks `{k}`")));
    let seed: u64 = get("seed")?.parse().map_err(|_| Error::Parse("seed is not an integer".into()))?;
    let model: CovarianceModel = get("model")?.parse()?;
    let design = DesignRecipe::from_metadata(meta)?;
    let name = meta.get("preset").cloned().unwrap_or_else(|| "custom".into());
    generate(&Preset { name, model, design }, seed)
}

//! Simple kriging: the Gaussian conditional mean and variance at target sites.
//!
//! The cross-covariance between a target and the training rows never carries
//! the nugget, so a target that coincides with a training row receives the
//! smooth-signal predictor. The variance includes the nugget: it describes a
//! fresh noisy observation at the target.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{Dataset, Site};
use crate::inference::default_scale;
use crate::linalg::{dot, JitterSchedule, SymmetricMatrix};
use crate::neighbors::{AxisScale, KdTree};
use crate::simulate::{check_dense_cap, CovKernel, CovarianceModel, PreparedSite, DENSE_CAP};

/// Round-off allowance below zero before a variance is treated as an error.
const VARIANCE_SLACK: f64 = 1e-10;

/// Number of trailing training slots searched by [`forecast_t10`] by default.
pub const DEFAULT_FORECAST_SLOTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub site: Site,
    pub mean: f64,
    pub variance: f64,
}

fn clamp_variance(v: f64, scale: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -VARIANCE_SLACK * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::NegativeVariance(v))
    }
}

fn setup(model: &CovarianceModel, train: &Dataset, targets: &[Site]) -> Result<(CovKernel, Vec<PreparedSite>, Vec<PreparedSite>, Vec<f64>)> {
    if train.is_empty() {
        return Err(Error::EmptyInput);
    }
    let kernel = CovKernel::new(model)?;
    kernel.check_kind(train.kind)?;
    let prepared = kernel.prepare_all(&train.sites)?;
    let tgt = kernel.prepare_all(targets)?;
    let resid = prepared.iter().zip(&train.values).map(|(p, z)| z - kernel.mean(p)).collect();
    Ok((kernel, prepared, tgt, resid))
}

/// Conditions every target on all training rows.
pub fn exact_kriging(model: &CovarianceModel, train: &Dataset, targets: &[Site]) -> Result<Vec<Prediction>> {
    check_dense_cap(train.len(), DENSE_CAP)?;
    let (kernel, prepared, tgt, resid) = setup(model, train, targets)?;
    let f = kernel.matrix(&prepared, true)?.into_cholesky(&JitterSchedule::default())?;
    let alpha = f.solve(&resid)?;
    tgt.par_iter()
        .map(|t| {
            let c = kernel.cross(t, &prepared);
            let mean = kernel.mean(t) + dot(&c, &alpha);
            let v = f.solve_lower(&c)?;
            let total = kernel.total_variance(t);
            let variance = clamp_variance(total - dot(&v, &v), total)?;
            Ok(Prediction { site: t.site, mean, variance })
        })
        .collect()
}

/// Conditions each target on its `m` nearest training rows under `scale`
/// (model default when `None`).
pub fn local_kriging(
    model: &CovarianceModel,
    train: &Dataset,
    targets: &[Site],
    m: usize,
    scale: Option<AxisScale>,
) -> Result<Vec<Prediction>> {
    let scale = scale.unwrap_or_else(|| default_scale(model));
    neighbor_kriging(model, train, targets, m, scale, |_| true)
}

/// Forecasts future slots from the most recent `slots` training time slots,
/// conditioning on the `m` nearest rows among them.
pub fn forecast_t10(
    model: &CovarianceModel,
    train: &Dataset,
    targets: &[Site],
    m: usize,
    slots: usize,
) -> Result<Vec<Prediction>> {
    let mut times: Vec<f64> = train
        .sites
        .iter()
        .map(|s| s.time().ok_or_else(|| Error::UnsupportedKind("forecasting needs space-time data".into())))
        .collect::<Result<_>>()?;
    if slots == 0 {
        return Err(Error::InvalidParameter("need at least one recent slot".into()));
    }
    times.sort_by(f64::total_cmp);
    times.dedup();
    let cutoff = times[times.len().saturating_sub(slots)];
    let recent: Vec<bool> = train.sites.iter().map(|s| s.time().is_some_and(|t| t >= cutoff)).collect();
    neighbor_kriging(model, train, targets, m, default_scale(model), |i| recent[i])
}

fn neighbor_kriging(
    model: &CovarianceModel,
    train: &Dataset,
    targets: &[Site],
    m: usize,
    scale: AxisScale,
    keep: impl Fn(usize) -> bool + Sync,
) -> Result<Vec<Prediction>> {
    if m == 0 {
        return Err(Error::InvalidParameter("local kriging needs at least one neighbour".into()));
    }
    let (kernel, prepared, tgt, resid) = setup(model, train, targets)?;
    let tree = KdTree::from_sites(&train.sites, &scale);
    tgt.par_iter()
        .map(|t| {
            let nb = tree.nearest(&scale.apply(&t.site), m, &keep);
            let rows: Vec<PreparedSite> = nb.iter().map(|&i| prepared[i]).collect();
            let block = SymmetricMatrix::from_fn(rows.len(), |a, b| {
                let c = kernel.signal(&rows[a], &rows[b]);
                if a == b {
                    c + kernel.nugget()
                } else {
                    c
                }
            })?;
            let f = block.into_cholesky(&JitterSchedule::default())?;
            let z: Vec<f64> = nb.iter().map(|&i| resid[i]).collect();
            let c = kernel.cross(t, &rows);
            let alpha = f.solve(&z)?;
            let v = f.solve_lower(&c)?;
            let total = kernel.total_variance(t);
            let variance = clamp_variance(total - dot(&v, &v), total)?;
            Ok(Prediction { site: t.site, mean: kernel.mean(t) + dot(&c, &alpha), variance })
        })
        .collect()
}

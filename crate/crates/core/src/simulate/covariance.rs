use super::CovarianceModel;
use crate::error::{Error, Result};
use crate::fields::{DatasetKind, Site};
use crate::kernels::{BivariateKernel, GneitingKernel, LocalParams, MaternCorrelation, NonstatKernel, NonstatMaternModel};
use crate::linalg::SymmetricMatrix;

/// A site with whatever per-site quantities the kernel needs cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparedSite {
    pub site: Site,
    local: Option<LocalParams>,
}

#[derive(Debug, Clone)]
enum Inner {
    Independent,
    Matern { corr: MaternCorrelation, variance: f64, range: f64 },
    Nonstat { model: NonstatMaternModel, kernel: NonstatKernel },
    Gneiting(GneitingKernel),
    Bivariate(BivariateKernel),
}

/// Compiled covariance function of a [`CovarianceModel`].
#[derive(Debug, Clone)]
pub struct CovKernel {
    inner: Inner,
    model: CovarianceModel,
    nugget: f64,
}

impl CovKernel {
    pub fn new(model: &CovarianceModel) -> Result<Self> {
        model.validate()?;
        let inner = match model {
            CovarianceModel::MeanPlusNugget { .. } => Inner::Independent,
            CovarianceModel::StationaryMatern(p) => Inner::Matern {
                corr: MaternCorrelation::new(p.smoothness)?,
                variance: p.variance,
                range: p.range,
            },
            CovarianceModel::NonstatMatern(m) => Inner::Nonstat { model: m.clone(), kernel: m.evaluator()? },
            CovarianceModel::Gneiting(p) => Inner::Gneiting(p.evaluator()?),
            CovarianceModel::BivariateMatern(p) => Inner::Bivariate(p.evaluator()?),
        };
        Ok(Self { inner, model: model.clone(), nugget: model.nugget() })
    }

    pub fn model(&self) -> &CovarianceModel {
        &self.model
    }

    pub fn nugget(&self) -> f64 {
        self.nugget
    }

    pub fn check_kind(&self, kind: DatasetKind) -> Result<()> {
        let want = self.model.data_kind();
        if kind != want {
            return Err(Error::KindMismatch(format!(
                "{} model needs {} data, got {}",
                self.model.family(),
                want.name(),
                kind.name()
            )));
        }
        Ok(())
    }

    pub fn prepare(&self, site: &Site) -> Result<PreparedSite> {
        self.check_kind(site.kind())?;
        let local = match &self.inner {
            Inner::Nonstat { model, .. } => Some(model.local_params(site.point())),
            _ => None,
        };
        Ok(PreparedSite { site: *site, local })
    }

    pub fn prepare_all(&self, sites: &[Site]) -> Result<Vec<PreparedSite>> {
        sites.iter().map(|s| self.prepare(s)).collect()
    }

    pub fn mean(&self, a: &PreparedSite) -> f64 {
        self.model.mean_at(a.site.point())
    }

    /// Covariance of the smooth part between two sites, nugget excluded.
    pub fn signal(&self, a: &PreparedSite, b: &PreparedSite) -> f64 {
        let h = a.site.point().dist(&b.site.point());
        match &self.inner {
            Inner::Independent => 0.0,
            Inner::Matern { corr, variance, range } => variance * corr.eval(h / range),
            Inner::Nonstat { kernel, .. } => kernel.signal(
                a.site.point(),
                a.local.as_ref().expect("prepared by a nonstationary kernel"),
                b.site.point(),
                b.local.as_ref().expect("prepared by a nonstationary kernel"),
            ),
            Inner::Gneiting(k) => {
                let u = a.site.time().unwrap_or(0.0) - b.site.time().unwrap_or(0.0);
                k.eval(h, u)
            }
            Inner::Bivariate(k) => {
                let i = a.site.variable().map_or(0, |v| v.index() - 1);
                let j = b.site.variable().map_or(0, |v| v.index() - 1);
                k.eval(h, i, j)
            }
        }
    }

    /// Variance of an observation at `a`, nugget included.
    pub fn total_variance(&self, a: &PreparedSite) -> f64 {
        self.signal(a, a) + self.nugget
    }

    /// Covariance matrix over `sites`, with the nugget on the diagonal when `with_nugget`.
    pub fn matrix(&self, sites: &[PreparedSite], with_nugget: bool) -> Result<SymmetricMatrix> {
        let nugget = if with_nugget { self.nugget } else { 0.0 };
        SymmetricMatrix::par_from_fn(sites.len(), |i, j| {
            let c = self.signal(&sites[i], &sites[j]);
            if i == j {
                c + nugget
            } else {
                c
            }
        })
    }

    /// Covariances between one site and each of `sites`, nugget excluded.
    pub fn cross(&self, a: &PreparedSite, sites: &[PreparedSite]) -> Vec<f64> {
        sites.iter().map(|b| self.signal(a, b)).collect()
    }
}

/// Full covariance matrix of the observations at `sites`; the nugget sits on the diagonal only.
pub fn build_covariance_matrix(model: &CovarianceModel, sites: &[Site]) -> Result<SymmetricMatrix> {
    let k = CovKernel::new(model)?;
    let prepared = k.prepare_all(sites)?;
    k.matrix(&prepared, true)
}

//! The covariance-model sum type, its text form and its parameter vector.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fields::{DatasetKind, Point};
use crate::inference::ParamKind;
use crate::kernels::{
    effective_range, BivariateFlavor, BivariateMaternParams, GneitingParams, MaternCorrelation, MaternParams,
    MeanSurface, NonstatMaternModel, RangeAxis, ReferenceSite, DEFAULT_THRESHOLD, SPACE_BRACKET, TIME_BRACKET,
};

#[derive(Debug, Clone, PartialEq)]
pub enum CovarianceModel {
    /// Deterministic mean plus i.i.d. noise with standard deviation `tau`.
    MeanPlusNugget { surface: MeanSurface, tau: f64 },
    StationaryMatern(MaternParams),
    NonstatMatern(NonstatMaternModel),
    Gneiting(GneitingParams),
    BivariateMatern(BivariateMaternParams),
}

impl CovarianceModel {
    pub fn family(&self) -> &'static str {
        match self {
            CovarianceModel::MeanPlusNugget { .. } => "nugget",
            CovarianceModel::StationaryMatern(_) => "matern",
            CovarianceModel::NonstatMatern(_) => "nonstat",
            CovarianceModel::Gneiting(_) => "gneiting",
            CovarianceModel::BivariateMatern(p) => match p.flavor {
                BivariateFlavor::Parsimonious => "parsimonious",
                BivariateFlavor::Flexible => "flexible",
            },
        }
    }

    pub fn data_kind(&self) -> DatasetKind {
        match self {
            CovarianceModel::Gneiting(_) => DatasetKind::SpaceTime,
            CovarianceModel::BivariateMatern(_) => DatasetKind::Bivariate,
            _ => DatasetKind::Spatial,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CovarianceModel::MeanPlusNugget { tau, .. } => {
                if !(*tau > 0.0) || !tau.is_finite() {
                    return Err(Error::InvalidParameter(format!("nugget standard deviation {tau}")));
                }
                Ok(())
            }
            CovarianceModel::StationaryMatern(p) => p.validate(),
            CovarianceModel::NonstatMatern(m) => m.validate(),
            CovarianceModel::Gneiting(p) => p.validate(),
            CovarianceModel::BivariateMatern(p) => p.validate(),
        }
    }

    /// Variance of the i.i.d. noise term, added on the covariance diagonal only.
    pub fn nugget(&self) -> f64 {
        match self {
            CovarianceModel::MeanPlusNugget { tau, .. } => tau * tau,
            CovarianceModel::StationaryMatern(p) => p.nugget,
            CovarianceModel::NonstatMatern(m) => m.nugget,
            CovarianceModel::Gneiting(_) | CovarianceModel::BivariateMatern(_) => 0.0,
        }
    }

    /// Standard deviation of the noise term.
    pub fn noise_sd(&self) -> f64 {
        match self {
            CovarianceModel::MeanPlusNugget { tau, .. } => *tau,
            _ => self.nugget().sqrt(),
        }
    }

    pub fn mean_at(&self, p: Point) -> f64 {
        match self {
            CovarianceModel::MeanPlusNugget { surface, .. } => surface.eval(p),
            _ => 0.0,
        }
    }

    /// Distance or lag at which the correlation falls to 0.05: one value,
    /// or one per variable for bivariate models.
    pub fn effective_ranges(&self, axis: RangeAxis) -> Result<Vec<f64>> {
        let spatial = |nu: f64, a: f64| -> Result<f64> {
            let m = MaternCorrelation::new(nu)?;
            effective_range(|h| m.eval(h / a), DEFAULT_THRESHOLD, SPACE_BRACKET)
        };
        match (self, axis) {
            (CovarianceModel::StationaryMatern(p), RangeAxis::Space) => Ok(vec![spatial(p.smoothness, p.range)?]),
            (CovarianceModel::Gneiting(g), RangeAxis::Space) => Ok(vec![spatial(g.smoothness, g.space_range)?]),
            (CovarianceModel::Gneiting(g), RangeAxis::Time) => {
                Ok(vec![effective_range(|u| 1.0 / g.temporal_psi(u), DEFAULT_THRESHOLD, TIME_BRACKET)?])
            }
            (CovarianceModel::BivariateMatern(b), RangeAxis::Space) => {
                (0..2).map(|i| spatial(b.smoothness[i], b.range[i])).collect()
            }
            (CovarianceModel::NonstatMatern(_), RangeAxis::Space) => Err(Error::UnsupportedKind(
                "the nonstationary range depends on location".into(),
            )),
            (CovarianceModel::MeanPlusNugget { .. }, _) => {
                Err(Error::UnsupportedKind("a pure nugget model has no correlation range".into()))
            }
            (m, RangeAxis::Time) => Err(Error::UnsupportedKind(format!("{} models have no time axis", m.family()))),
        }
    }

    /// Names and constraint classes of the parameter vector, in layout order.
    pub fn param_layout(&self) -> Vec<(String, ParamKind)> {
        use ParamKind::*;
        let fixed = |names: &[(&str, ParamKind)]| names.iter().map(|(n, k)| (n.to_string(), *k)).collect();
        match self {
            CovarianceModel::MeanPlusNugget { .. } => fixed(&[("tau2", Positive)]),
            CovarianceModel::StationaryMatern(_) => {
                fixed(&[("sigma2", Positive), ("range", Positive), ("nu", Positive), ("nugget", NonNegative)])
            }
            CovarianceModel::NonstatMatern(m) => {
                let mut out: Vec<(String, ParamKind)> = Vec::new();
                for k in 1..=m.sites.len() {
                    out.push((format!("sigma_{k}"), Positive));
                    out.push((format!("lambda1_{k}"), Positive));
                    out.push((format!("lambda2_{k}"), Positive));
                }
                out.push(("phi".into(), Angle));
                out.push(("nu".into(), Positive));
                out.push(("nugget".into(), NonNegative));
                out
            }
            CovarianceModel::Gneiting(_) => fixed(&[
                ("sigma2", Positive),
                ("a_s", Positive),
                ("a_t", Positive),
                ("alpha", UnitInterval),
                ("beta", UnitInterval),
                ("nu", Positive),
            ]),
            CovarianceModel::BivariateMatern(p) => {
                let mut v: Vec<(String, ParamKind)> = fixed(&[
                    ("sigma2_11", Positive),
                    ("sigma2_22", Positive),
                    ("beta12", Correlation),
                    ("nu11", Positive),
                    ("nu22", Positive),
                ]);
                match p.flavor {
                    BivariateFlavor::Parsimonious => v.push(("range".into(), Positive)),
                    BivariateFlavor::Flexible => {
                        v.push(("a11".into(), Positive));
                        v.push(("a22".into(), Positive));
                        v.push(("tau_bar".into(), NonNegative));
                    }
                }
                v
            }
        }
    }

    pub fn param_names(&self) -> Vec<String> {
        self.param_layout().into_iter().map(|(n, _)| n).collect()
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            CovarianceModel::MeanPlusNugget { tau, .. } => vec![tau * tau],
            CovarianceModel::StationaryMatern(p) => vec![p.variance, p.range, p.smoothness, p.nugget],
            CovarianceModel::NonstatMatern(m) => {
                let mut v: Vec<f64> =
                    m.sites.iter().flat_map(|s| [s.sigma, s.lambda1, s.lambda2]).collect();
                v.extend([m.rotation, m.smoothness, m.nugget]);
                v
            }
            CovarianceModel::Gneiting(p) => {
                vec![p.variance, p.space_range, p.time_range, p.alpha, p.beta, p.smoothness]
            }
            CovarianceModel::BivariateMatern(p) => {
                let mut v = vec![p.variance[0], p.variance[1], p.beta12, p.smoothness[0], p.smoothness[1]];
                match p.flavor {
                    BivariateFlavor::Parsimonious => v.push(p.range[0]),
                    BivariateFlavor::Flexible => v.extend([p.range[0], p.range[1], p.tau_bar]),
                }
                v
            }
        }
    }

    /// Same family and fixed structure as `self`, parameters replaced by `values`.
    pub fn with_params(&self, values: &[f64]) -> Result<CovarianceModel> {
        let expected = self.param_layout().len();
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: values.len() });
        }
        let v = values;
        let model = match self {
            CovarianceModel::MeanPlusNugget { surface, .. } => {
                CovarianceModel::MeanPlusNugget { surface: *surface, tau: v[0].max(0.0).sqrt() }
            }
            CovarianceModel::StationaryMatern(_) => CovarianceModel::StationaryMatern(MaternParams {
                variance: v[0],
                range: v[1],
                smoothness: v[2],
                nugget: v[3],
            }),
            CovarianceModel::NonstatMatern(m) => {
                let k = m.sites.len();
                let sites = m
                    .sites
                    .iter()
                    .enumerate()
                    .map(|(i, s)| ReferenceSite {
                        location: s.location,
                        sigma: v[3 * i],
                        lambda1: v[3 * i + 1],
                        lambda2: v[3 * i + 2],
                    })
                    .collect();
                CovarianceModel::NonstatMatern(NonstatMaternModel {
                    sites,
                    bandwidth: m.bandwidth,
                    rotation: v[3 * k],
                    smoothness: v[3 * k + 1],
                    nugget: v[3 * k + 2],
                })
            }
            CovarianceModel::Gneiting(_) => CovarianceModel::Gneiting(GneitingParams {
                variance: v[0],
                space_range: v[1],
                time_range: v[2],
                alpha: v[3],
                beta: v[4],
                smoothness: v[5],
            }),
            CovarianceModel::BivariateMatern(p) => {
                let (range, tau_bar) = match p.flavor {
                    BivariateFlavor::Parsimonious => ([v[5], v[5]], p.tau_bar),
                    BivariateFlavor::Flexible => ([v[5], v[6]], v[7]),
                };
                CovarianceModel::BivariateMatern(BivariateMaternParams {
                    flavor: p.flavor,
                    variance: [v[0], v[1]],
                    beta12: v[2],
                    smoothness: [v[3], v[4]],
                    range,
                    tau_bar,
                })
            }
        };
        model.validate()?;
        Ok(model)
    }
}

impl fmt::Display for CovarianceModel {
    /// `family:key=value,...`, floats in shortest round-trip form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.family())?;
        let mut parts: Vec<String> = Vec::new();
        match self {
            CovarianceModel::MeanPlusNugget { surface, tau } => {
                parts.push(format!("tau={tau}"));
                parts.push(format!("mean={}", surface.name()));
            }
            CovarianceModel::NonstatMatern(m) => {
                parts.push(format!("h={}", m.bandwidth));
                parts.push(format!("phi={}", m.rotation));
                parts.push(format!("nu={}", m.smoothness));
                parts.push(format!("nugget={}", m.nugget));
                for (k, s) in m.sites.iter().enumerate() {
                    parts.push(format!(
                        "site{}={}/{}/{}/{}/{}",
                        k + 1,
                        s.location.x,
                        s.location.y,
                        s.sigma,
                        s.lambda1,
                        s.lambda2
                    ));
                }
            }
            _ => {
                for (name, value) in self.param_names().iter().zip(self.params()) {
                    parts.push(format!("{name}={value}"));
                }
            }
        }
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for CovarianceModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, body) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let mut kv: Vec<(String, String)> = Vec::new();
        for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("model field `{part}` is not key=value")))?;
            kv.push((k.trim().to_string(), v.trim().to_string()));
        }
        let mut fields = Fields { kv, family: family.to_string() };
        let model = match family {
            "nugget" => {
                let tau = fields.num("tau")?;
                let surface = match fields.take("mean") {
                    Some(name) => MeanSurface::from_name(&name)
                        .ok_or_else(|| Error::Parse(format!("unknown mean surface `{name}`")))?,
                    None => MeanSurface::Zero,
                };
                CovarianceModel::MeanPlusNugget { surface, tau }
            }
            "matern" => CovarianceModel::StationaryMatern(MaternParams {
                variance: fields.num("sigma2")?,
                range: fields.num("range")?,
                smoothness: fields.num("nu")?,
                nugget: fields.num_or("nugget", 0.0)?,
            }),
            "nonstat" => {
                let default = NonstatMaternModel::competition_default();
                let mut sites = Vec::new();
                let mut k = 1;
                while let Some(raw) = fields.take(&format!("site{k}")) {
                    let v: Vec<f64> = raw
                        .split('/')
                        .map(|x| x.trim().parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| Error::Parse(format!("site{k} = `{raw}`")))?;
                    if v.len() != 5 {
                        return Err(Error::Parse(format!("site{k} needs x/y/sigma/lambda1/lambda2")));
                    }
                    sites.push(ReferenceSite {
                        location: Point::new(v[0], v[1]),
                        sigma: v[2],
                        lambda1: v[3],
                        lambda2: v[4],
                    });
                    k += 1;
                }
                CovarianceModel::NonstatMatern(NonstatMaternModel {
                    sites: if sites.is_empty() { default.sites } else { sites },
                    bandwidth: fields.num_or("h", default.bandwidth)?,
                    rotation: fields.num_or("phi", default.rotation)?,
                    smoothness: fields.num_or("nu", default.smoothness)?,
                    nugget: fields.num_or("nugget", default.nugget)?,
                })
            }
            "gneiting" => CovarianceModel::Gneiting(GneitingParams {
                variance: fields.num("sigma2")?,
                space_range: fields.num("a_s")?,
                time_range: fields.num("a_t")?,
                alpha: fields.num("alpha")?,
                beta: fields.num("beta")?,
                smoothness: fields.num("nu")?,
            }),
            "parsimonious" | "flexible" => {
                let variance = [fields.num("sigma2_11")?, fields.num("sigma2_22")?];
                let beta12 = fields.num("beta12")?;
                let smoothness = [fields.num("nu11")?, fields.num("nu22")?];
                let (flavor, range, tau_bar) = if family == "parsimonious" {
                    let a = fields.num("range")?;
                    (BivariateFlavor::Parsimonious, [a, a], 0.0)
                } else {
                    (
                        BivariateFlavor::Flexible,
                        [fields.num("a11")?, fields.num("a22")?],
                        fields.num_or("tau_bar", 0.0)?,
                    )
                };
                CovarianceModel::BivariateMatern(BivariateMaternParams {
                    flavor,
                    variance,
                    beta12,
                    smoothness,
                    range,
                    tau_bar,
                })
            }
            other => return Err(Error::Parse(format!("unknown model family `{other}`"))),
        };
        fields.finish()?;
        model.validate()?;
        Ok(model)
    }
}

struct Fields {
    kv: Vec<(String, String)>,
    family: String,
}

impl Fields {
    fn take(&mut self, key: &str) -> Option<String> {
        let idx = self.kv.iter().position(|(k, _)| k == key)?;
        Some(self.kv.remove(idx).1)
    }

    fn num(&mut self, key: &str) -> Result<f64> {
        let raw = self
            .take(key)
            .ok_or_else(|| Error::Parse(format!("{} model needs `{key}`", self.family)))?;
        raw.parse().map_err(|_| Error::Parse(format!("`{key}` = `{raw}` is not a number")))
    }

    fn num_or(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.take(key) {
            Some(raw) => raw.parse().map_err(|_| Error::Parse(format!("`{key}` = `{raw}` is not a number"))),
            None => Ok(default),
        }
    }

    fn finish(self) -> Result<()> {
        match self.kv.first() {
            Some((k, _)) => Err(Error::Parse(format!("unknown field `{k}` for {} model", self.family))),
            None => Ok(()),
        }
    }
}

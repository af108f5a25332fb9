//! Gaussian log-likelihood, its Vecchia approximation and maximum-likelihood fitting.

mod optimizer;
mod transform;
mod vecchia;

pub use optimizer::{nelder_mead, SimplexOutcome};
pub use transform::ParamKind;
pub use vecchia::{build_neighbor_graph, vecchia_log_likelihood, NeighborGraph, OrderingRule};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fields::Dataset;
use crate::linalg::JitterSchedule;
use crate::neighbors::AxisScale;
use crate::simulate::{check_dense_cap, CovKernel, CovarianceModel, DENSE_CAP};

const LN_2PI: f64 = 1.8378770664093453;

/// Exact Gaussian log-likelihood of `data` under `model`.
pub fn log_likelihood(model: &CovarianceModel, data: &Dataset) -> Result<f64> {
    let n = data.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    check_dense_cap(n, DENSE_CAP)?;
    let kernel = CovKernel::new(model)?;
    kernel.check_kind(data.kind)?;
    let prepared = kernel.prepare_all(&data.sites)?;
    let resid: Vec<f64> = prepared.iter().zip(&data.values).map(|(p, z)| z - kernel.mean(p)).collect();
    let f = kernel.matrix(&prepared, true)?.into_cholesky(&JitterSchedule::default())?;
    Ok(-0.5 * n as f64 * LN_2PI - 0.5 * f.log_det() - 0.5 * f.quadratic_form(&resid)?)
}

/// Sum in a fixed pairwise tree, independent of how the terms were produced.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Which likelihood the optimizer maximizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Likelihood {
    Exact,
    /// Vecchia approximation with `neighbors` conditioning rows; `scale` of
    /// `None` picks the model default (see [`default_scale`]).
    Vecchia { neighbors: usize, ordering: OrderingRule, scale: Option<AxisScale> },
}

impl Likelihood {
    pub fn vecchia(neighbors: usize) -> Self {
        Likelihood::Vecchia { neighbors, ordering: OrderingRule::CoordinateSum, scale: None }
    }

    pub fn describe(&self) -> String {
        match self {
            Likelihood::Exact => "exact".into(),
            Likelihood::Vecchia { neighbors, .. } => format!("vecchia:{neighbors}"),
        }
    }
}

/// Neighbour metric used when none is given: space-time axes are divided by
/// the model's space and time ranges, everything else is left as is.
pub fn default_scale(model: &CovarianceModel) -> AxisScale {
    match model {
        CovarianceModel::Gneiting(g) => AxisScale::spacetime(g.space_range, g.time_range),
        _ => AxisScale::default(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub max_evaluations: usize,
    /// Convergence threshold on the log-likelihood spread over the simplex.
    pub tolerance: f64,
    /// Initial simplex edge in transformed coordinates.
    pub step: f64,
    pub record_trace: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { max_evaluations: 2000, tolerance: 1e-6, step: 0.5, record_trace: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: CovarianceModel,
    pub names: Vec<String>,
    pub params: Vec<f64>,
    pub loglik: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub likelihood: String,
    pub trace: Option<Vec<(Vec<f64>, f64)>>,
}

impl FitResult {
    pub fn to_kv(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("model".into(), self.model.to_string());
        m.insert("family".into(), self.model.family().into());
        m.insert("loglik".into(), format!("{}", self.loglik));
        m.insert("evaluations".into(), self.evaluations.to_string());
        m.insert("converged".into(), self.converged.to_string());
        m.insert("likelihood".into(), self.likelihood.clone());
        for (n, v) in self.names.iter().zip(&self.params) {
            m.insert(format!("param.{n}"), format!("{v}"));
        }
        m
    }

    pub fn from_kv(m: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| m.get(k).ok_or_else(|| Error::Parse(format!("fit file lacks `{k}`")));
        let model: CovarianceModel = get("model")?.parse()?;
        let parse_f = |k: &str| -> Result<f64> {
            get(k)?.parse().map_err(|_| Error::Parse(format!("`{k}` is not a number")))
        };
        Ok(FitResult {
            names: model.param_names(),
            params: model.params(),
            loglik: parse_f("loglik")?,
            evaluations: get("evaluations")?
                .parse()
                .map_err(|_| Error::Parse("`evaluations` is not a count".into()))?,
            converged: get("converged")? == "true",
            likelihood: get("likelihood")?.clone(),
            model,
            trace: None,
        })
    }
}

/// Maximizes the chosen likelihood over the free parameters of `init`.
///
/// `free` selects the parameters to estimate, in [`CovarianceModel::param_layout`]
/// order; `None` frees all of them. The search runs in transformed
/// coordinates and restarts once from the best point. The returned fit is
/// never worse than `init`.
pub fn fit_mle(
    init: &CovarianceModel,
    data: &Dataset,
    free: Option<&[bool]>,
    cfg: &OptimizerConfig,
    likelihood: Likelihood,
) -> Result<FitResult> {
    if !(cfg.tolerance > 0.0) || cfg.max_evaluations == 0 {
        return Err(Error::InvalidParameter("optimizer tolerance and budget must be positive".into()));
    }
    init.validate()?;
    CovKernel::new(init)?.check_kind(data.kind)?;
    let layout = init.param_layout();
    let names: Vec<String> = layout.iter().map(|(n, _)| n.clone()).collect();
    let theta0 = init.params();
    let mask: Vec<bool> = match free {
        Some(f) if f.len() != layout.len() => {
            return Err(Error::DimensionMismatch { expected: layout.len(), got: f.len() })
        }
        Some(f) => f.to_vec(),
        None => vec![true; layout.len()],
    };
    let free_idx: Vec<usize> = (0..layout.len()).filter(|&i| mask[i]).collect();

    let graph = match likelihood {
        Likelihood::Exact => {
            check_dense_cap(data.len(), DENSE_CAP)?;
            None
        }
        Likelihood::Vecchia { neighbors, ordering, scale } => {
            let scale = scale.unwrap_or_else(|| default_scale(init));
            Some(build_neighbor_graph(&data.sites, neighbors, scale, ordering))
        }
    };
    let loglik_of = |m: &CovarianceModel| -> Result<f64> {
        match &graph {
            None => log_likelihood(m, data),
            Some(g) => vecchia_log_likelihood(m, data, g),
        }
    };
    let expand = |y: &[f64]| -> Vec<f64> {
        let mut theta = theta0.clone();
        for (&i, &yi) in free_idx.iter().zip(y) {
            theta[i] = layout[i].1.inverse(yi);
        }
        theta
    };

    let init_loglik = loglik_of(init)?;
    let mut trace: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut objective = |y: &[f64]| -> f64 {
        let theta = expand(y);
        let ll = init
            .with_params(&theta)
            .and_then(|m| loglik_of(&m))
            .unwrap_or(f64::NEG_INFINITY);
        if cfg.record_trace {
            trace.push((theta, ll));
        }
        if ll.is_finite() {
            -ll
        } else {
            f64::INFINITY
        }
    };

    let y0: Vec<f64> = free_idx.iter().map(|&i| layout[i].1.forward(theta0[i])).collect();
    let first = nelder_mead(&mut objective, &y0, cfg.step, cfg.tolerance, cfg.max_evaluations);
    let mut evaluations = first.evaluations;
    let mut best = first.clone();
    let mut converged = first.converged;
    if evaluations < cfg.max_evaluations {
        let second = nelder_mead(
            &mut objective,
            &first.x,
            cfg.step * 0.5,
            cfg.tolerance,
            cfg.max_evaluations - evaluations,
        );
        evaluations += second.evaluations;
        converged = converged && second.converged;
        if second.fx < best.fx {
            best = second;
        }
    }

    let (params, loglik) = if -best.fx >= init_loglik {
        (expand(&best.x), -best.fx)
    } else {
        (theta0.clone(), init_loglik)
    };
    let model = init.with_params(&params)?;
    Ok(FitResult {
        model,
        names,
        params,
        loglik,
        evaluations: evaluations + 1,
        converged,
        likelihood: likelihood.describe(),
        trace: cfg.record_trace.then_some(trace),
    })
}

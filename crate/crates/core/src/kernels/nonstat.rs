//! Nonstationary Matérn covariance with kernel-weighted local parameters.
//!
//! The standard deviation and the two eigenvalues of the local anisotropy
//! matrix are mixtures of values attached to a handful of reference sites,
//! weighted by a normalized Gaussian kernel of the distance to each site.

use std::f64::consts::FRAC_PI_2;

use super::matern::MaternCorrelation;
use crate::error::{Error, Result};
use crate::fields::Point;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSite {
    pub location: Point,
    pub sigma: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonstatMaternModel {
    pub sites: Vec<ReferenceSite>,
    /// Kernel constant `h` in `exp{−‖s − s̃‖²/(2h)}`.
    pub bandwidth: f64,
    /// Rotation angle of the anisotropy axes, in `[0, π/2]`.
    pub rotation: f64,
    pub smoothness: f64,
    pub nugget: f64,
}

/// Local standard deviation and 2×2 anisotropy matrix at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalParams {
    pub sigma: f64,
    pub kernel: [[f64; 2]; 2],
}

impl LocalParams {
    fn det(&self) -> f64 {
        det2(&self.kernel)
    }
}

impl NonstatMaternModel {
    /// Four reference sites at the quarter points of the unit square with the
    /// competition parameter values.
    pub fn competition_default() -> Self {
        let locs = [(0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75)];
        let sigma = [3.5, 1.9, 1.8, 0.7];
        let lambda = [0.03, 0.07, 0.1, 0.3];
        let sites = (0..4)
            .map(|k| ReferenceSite {
                location: Point::new(locs[k].0, locs[k].1),
                sigma: sigma[k],
                lambda1: lambda[k],
                lambda2: lambda[k],
            })
            .collect();
        Self { sites, bandwidth: 0.09, rotation: FRAC_PI_2, smoothness: 0.7, nugget: 0.3 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites.is_empty() {
            return Err(Error::InvalidParameter("nonstationary model needs at least one site".into()));
        }
        for s in &self.sites {
            let ok = s.sigma > 0.0
                && s.lambda1 > 0.0
                && s.lambda2 > 0.0
                && s.sigma.is_finite()
                && s.lambda1.is_finite()
                && s.lambda2.is_finite()
                && s.location.x.is_finite()
                && s.location.y.is_finite();
            if !ok {
                return Err(Error::InvalidParameter(format!("reference site {s:?}")));
            }
        }
        let ok = self.bandwidth > 0.0
            && (0.0..=FRAC_PI_2).contains(&self.rotation)
            && self.smoothness > 0.0
            && self.nugget >= 0.0
            && self.bandwidth.is_finite()
            && self.smoothness.is_finite()
            && self.nugget.is_finite();
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "nonstationary model: h={}, φ={}, ν={}, τ²={}",
                self.bandwidth, self.rotation, self.smoothness, self.nugget
            )));
        }
        Ok(())
    }

    pub fn weights(&self, s: Point) -> Vec<f64> {
        let raw: Vec<f64> = self
            .sites
            .iter()
            .map(|site| (-s.dist2(&site.location) / (2.0 * self.bandwidth)).exp())
            .collect();
        let total: f64 = raw.iter().sum();
        if total > 0.0 {
            raw.into_iter().map(|k| k / total).collect()
        } else {
            // every kernel underflowed: fall back to the nearest site
            let nearest = self
                .sites
                .iter()
                .enumerate()
                .min_by(|a, b| s.dist2(&a.1.location).total_cmp(&s.dist2(&b.1.location)))
                .map(|(k, _)| k)
                .unwrap_or(0);
            (0..self.sites.len()).map(|k| if k == nearest { 1.0 } else { 0.0 }).collect()
        }
    }

    pub fn local_params(&self, s: Point) -> LocalParams {
        let w = self.weights(s);
        let mut sigma = 0.0;
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        for (wk, site) in w.iter().zip(&self.sites) {
            sigma += wk * site.sigma;
            l1 += wk * site.lambda1;
            l2 += wk * site.lambda2;
        }
        let (sin, cos) = self.rotation.sin_cos();
        // R·diag(λ₁, λ₂)·Rᵀ with R the counter-clockwise rotation by φ
        let a = cos * cos * l1 + sin * sin * l2;
        let d = sin * sin * l1 + cos * cos * l2;
        let b = cos * sin * (l1 - l2);
        LocalParams { sigma, kernel: [[a, b], [b, d]] }
    }

    pub fn evaluator(&self) -> Result<NonstatKernel> {
        self.validate()?;
        Ok(NonstatKernel { matern: MaternCorrelation::new(self.smoothness)?, nu: self.smoothness })
    }
}

/// Pairwise evaluator working from precomputed [`LocalParams`].
#[derive(Debug, Clone, Copy)]
pub struct NonstatKernel {
    matern: MaternCorrelation,
    nu: f64,
}

impl NonstatKernel {
    /// Covariance of the smooth part (no nugget) between two points.
    pub fn signal(&self, si: Point, li: &LocalParams, sj: Point, lj: &LocalParams) -> f64 {
        let avg = [
            [0.5 * (li.kernel[0][0] + lj.kernel[0][0]), 0.5 * (li.kernel[0][1] + lj.kernel[0][1])],
            [0.5 * (li.kernel[1][0] + lj.kernel[1][0]), 0.5 * (li.kernel[1][1] + lj.kernel[1][1])],
        ];
        let det_avg = det2(&avg);
        let dx = si.x - sj.x;
        let dy = si.y - sj.y;
        // dᵀ·avg⁻¹·d via the adjugate
        let q = (avg[1][1] * dx * dx - 2.0 * avg[0][1] * dx * dy + avg[0][0] * dy * dy) / det_avg;
        let scale = li.sigma * lj.sigma * (li.det() * lj.det()).powf(0.25) / det_avg.sqrt();
        scale * self.matern.eval(2.0 * (self.nu * q.max(0.0)).sqrt())
    }
}

fn det2(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn nonstat_weights(m: &NonstatMaternModel, s: Point) -> Vec<f64> {
    m.weights(s)
}

pub fn local_params(m: &NonstatMaternModel, s: Point) -> LocalParams {
    m.local_params(s)
}

/// Full covariance including `τ²·1[s_i = s_j]`.
pub fn nonstat_matern_cov(m: &NonstatMaternModel, si: Point, sj: Point) -> Result<f64> {
    let k = m.evaluator()?;
    let li = m.local_params(si);
    let lj = m.local_params(sj);
    let nugget = if si == sj { m.nugget } else { 0.0 };
    Ok(nugget + k.signal(si, &li, sj, &lj))
}

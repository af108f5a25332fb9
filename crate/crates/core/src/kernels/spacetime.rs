use super::matern::MaternCorrelation;
use crate::error::{Error, Result};

/// Non-separable space-time covariance parameters (Gneiting class with a
/// Matérn spatial margin).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GneitingParams {
    pub variance: f64,
    pub space_range: f64,
    pub time_range: f64,
    pub alpha: f64,
    pub beta: f64,
    pub smoothness: f64,
}

impl GneitingParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.variance > 0.0
            && self.space_range > 0.0
            && self.time_range > 0.0
            && self.alpha > 0.0
            && self.alpha <= 1.0
            && self.beta > 0.0
            && self.beta <= 1.0
            && self.smoothness > 0.0
            && self.variance.is_finite()
            && self.space_range.is_finite()
            && self.time_range.is_finite()
            && self.smoothness.is_finite();
        if !ok {
            return Err(Error::InvalidParameter(format!("Gneiting parameters {self:?}")));
        }
        Ok(())
    }

    /// `a_t|u|^{2α} + 1`, the temporal modulation term.
    pub fn temporal_psi(&self, u: f64) -> f64 {
        self.time_range * u.abs().powf(2.0 * self.alpha) + 1.0
    }

    pub fn evaluator(&self) -> Result<GneitingKernel> {
        self.validate()?;
        Ok(GneitingKernel { params: *self, matern: MaternCorrelation::new(self.smoothness)? })
    }
}

/// Precomputed evaluator for one parameter set.
#[derive(Debug, Clone, Copy)]
pub struct GneitingKernel {
    params: GneitingParams,
    matern: MaternCorrelation,
}

impl GneitingKernel {
    pub fn eval(&self, h: f64, u: f64) -> f64 {
        let p = &self.params;
        if u == 0.0 {
            return p.variance * self.matern.eval(h / p.space_range);
        }
        let psi = p.temporal_psi(u);
        p.variance / psi * self.matern.eval((h / p.space_range) / psi.powf(0.5 * p.beta))
    }
}

/// `σ²/ψ(u) · M_ν((h/a_s)/ψ(u)^{β/2})` with `ψ(u) = a_t|u|^{2α} + 1`.
pub fn gneiting_cov(p: &GneitingParams, h: f64, u: f64) -> Result<f64> {
    Ok(p.evaluator()?.eval(h, u))
}

use statrs::function::gamma::{gamma, ln_gamma};

use super::bessel::BesselK;
use crate::error::{Error, Result};

/// Largest smoothness accepted by the correlation evaluator.
pub const NU_MAX: f64 = 50.0;

// Below this the small-argument expansion replaces the Bessel evaluation;
// above the far cutoff the correlation underflows to zero.
const R_NEAR: f64 = 1e-10;
const R_FAR: f64 = 700.0;

/// Matérn correlation `M_ν(r) = r^ν K_ν(r) / (2^{ν−1} Γ(ν))` for one smoothness.
#[derive(Debug, Clone, Copy)]
pub struct MaternCorrelation {
    bessel: BesselK,
    log_norm: f64,
    near_coef: f64,
}

impl MaternCorrelation {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu <= NU_MAX) {
            return Err(Error::Domain(format!("Matérn smoothness {nu} outside (0, {NU_MAX}]")));
        }
        let log_norm = -((nu - 1.0) * std::f64::consts::LN_2 + ln_gamma(nu));
        // 1 − M_ν(r) ≈ Γ(1−ν)/Γ(1+ν)·(r/2)^{2ν} for ν < 1; O(r² log r) otherwise
        let near_coef = if nu < 1.0 { gamma(1.0 - nu) / gamma(1.0 + nu) } else { 0.0 };
        Ok(Self { bessel: BesselK::new(nu)?, log_norm, near_coef })
    }

    pub fn nu(&self) -> f64 {
        self.bessel.order()
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 1.0;
        }
        if r < R_NEAR {
            return 1.0 - self.near_coef * (0.5 * r).powf(2.0 * self.nu());
        }
        if r > R_FAR {
            return 0.0;
        }
        (self.nu() * r.ln() + self.log_norm).exp() * self.bessel.eval(r)
    }
}

/// Matérn correlation at scaled distance `r`.
pub fn matern_correlation(nu: f64, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("distance {r} must be non-negative")));
    }
    Ok(MaternCorrelation::new(nu)?.eval(r))
}

/// Stationary Matérn covariance parameters with nugget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaternParams {
    pub variance: f64,
    pub range: f64,
    pub smoothness: f64,
    pub nugget: f64,
}

impl MaternParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.variance > 0.0
            && self.range > 0.0
            && self.smoothness > 0.0
            && self.nugget >= 0.0
            && [self.variance, self.range, self.smoothness, self.nugget].iter().all(|v| v.is_finite());
        if !ok {
            return Err(Error::InvalidParameter(format!("Matérn parameters {self:?}")));
        }
        Ok(())
    }
}

/// `σ²·M_ν(h/a) + τ²·1[h = 0]`.
pub fn stationary_matern_cov(p: &MaternParams, h: f64) -> Result<f64> {
    p.validate()?;
    let corr = matern_correlation(p.smoothness, h / p.range)?;
    let nugget = if h == 0.0 { p.nugget } else { 0.0 };
    Ok(p.variance * corr + nugget)
}

use statrs::function::gamma::ln_gamma;

use super::matern::MaternCorrelation;
use crate::error::{Error, Result};

/// Spatial dimension entering the cross-correlation constraint.
const DIM: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BivariateFlavor {
    /// One range shared by both variables.
    Parsimonious,
    /// Per-variable ranges, cross range from `a₁₂² = (a₁₁² + a₂₂²)/2 + τ̄(a₁₁ − a₂₂)²`.
    Flexible,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateMaternParams {
    pub flavor: BivariateFlavor,
    /// Marginal variances `σ₁₁², σ₂₂²`.
    pub variance: [f64; 2],
    pub beta12: f64,
    pub smoothness: [f64; 2],
    pub range: [f64; 2],
    /// Only used by the flexible flavor.
    pub tau_bar: f64,
}

impl BivariateMaternParams {
    pub fn validate(&self) -> Result<()> {
        let positive = self
            .variance
            .iter()
            .chain(&self.smoothness)
            .chain(&self.range)
            .all(|v| *v > 0.0 && v.is_finite());
        let ok = positive
            && self.beta12.abs() < 1.0
            && self.tau_bar >= 0.0
            && self.tau_bar.is_finite()
            && (self.flavor == BivariateFlavor::Flexible || self.range[0] == self.range[1]);
        if !ok {
            return Err(Error::InvalidParameter(format!("bivariate Matérn parameters {self:?}")));
        }
        Ok(())
    }

    pub fn rho12(&self) -> Result<f64> {
        parsimonious_rho(self.smoothness[0], self.smoothness[1], self.beta12)
    }

    pub fn cross_smoothness(&self) -> f64 {
        0.5 * (self.smoothness[0] + self.smoothness[1])
    }

    pub fn cross_range(&self) -> f64 {
        let [a11, a22] = self.range;
        match self.flavor {
            BivariateFlavor::Parsimonious => a11,
            BivariateFlavor::Flexible => {
                (0.5 * (a11 * a11 + a22 * a22) + self.tau_bar * (a11 - a22).powi(2)).sqrt()
            }
        }
    }

    /// Largest `|ρ₁₂|` for which the cross-covariance is valid, from the
    /// pointwise spectral condition `f₁₂(ω)² ≤ f₁₁(ω) f₂₂(ω)` in two dimensions.
    pub fn admissible_rho(&self) -> f64 {
        let nu12 = self.cross_smoothness();
        let a12 = self.cross_range();
        let log_f = |nu: f64, a: f64, w2: f64| {
            ln_gamma(nu + 1.0) - ln_gamma(nu) - 2.0 * nu * a.ln() - (nu + 1.0) * (1.0 / (a * a) + w2).ln()
        };
        let gap = |w2: f64| {
            0.5 * (log_f(self.smoothness[0], self.range[0], w2) + log_f(self.smoothness[1], self.range[1], w2))
                - log_f(nu12, a12, w2)
        };
        let mut best = gap(0.0);
        let mut t = -8.0;
        while t <= 16.0 {
            best = best.min(gap(10f64.powf(t)));
            t += 0.01;
        }
        best.exp()
    }

    pub fn evaluator(&self) -> Result<BivariateKernel> {
        self.validate()?;
        let rho = self.rho12()?;
        let sd = [self.variance[0].sqrt(), self.variance[1].sqrt()];
        Ok(BivariateKernel {
            marginal: [
                MaternCorrelation::new(self.smoothness[0])?,
                MaternCorrelation::new(self.smoothness[1])?,
            ],
            cross: MaternCorrelation::new(self.cross_smoothness())?,
            ranges: [self.range[0], self.range[1], self.cross_range()],
            variance: self.variance,
            cross_scale: rho * sd[0] * sd[1],
        })
    }
}

/// Precomputed evaluator; variables are indexed 0 and 1 internally.
#[derive(Debug, Clone, Copy)]
pub struct BivariateKernel {
    marginal: [MaternCorrelation; 2],
    cross: MaternCorrelation,
    ranges: [f64; 3],
    variance: [f64; 2],
    cross_scale: f64,
}

impl BivariateKernel {
    pub fn eval(&self, h: f64, i: usize, j: usize) -> f64 {
        if i == j {
            self.variance[i] * self.marginal[i].eval(h / self.ranges[i])
        } else {
            self.cross_scale * self.cross.eval(h / self.ranges[2])
        }
    }
}

/// Collocated correlation `ρ₁₂` implied by `β₁₂` and the marginal smoothnesses (d = 2).
pub fn parsimonious_rho(nu11: f64, nu22: f64, beta12: f64) -> Result<f64> {
    if !(nu11 > 0.0 && nu22 > 0.0) {
        return Err(Error::Domain(format!("smoothness values ({nu11}, {nu22}) must be positive")));
    }
    if !(beta12.abs() < 1.0) {
        return Err(Error::Domain(format!("β₁₂ = {beta12} must lie in (−1, 1)")));
    }
    let half = 0.5 * DIM;
    let nu12 = 0.5 * (nu11 + nu22);
    let log_factor = 0.5 * (ln_gamma(nu11 + half) - ln_gamma(nu11))
        + 0.5 * (ln_gamma(nu22 + half) - ln_gamma(nu22))
        + ln_gamma(nu12)
        - ln_gamma(nu12 + half);
    Ok(beta12 * log_factor.exp())
}

/// `C_ij(h)` with 1-based variable indices.
pub fn bivariate_matern_cov(p: &BivariateMaternParams, h: f64, i: usize, j: usize) -> Result<f64> {
    for idx in [i, j] {
        if !(1..=2).contains(&idx) {
            return Err(Error::VariableIndexOutOfRange(idx));
        }
    }
    Ok(p.evaluator()?.eval(h, i - 1, j - 1))
}

//! Maps between constrained parameters and the unconstrained search space.

use std::f64::consts::FRAC_PI_2;

/// Constraint class of one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// `(0, ∞)`, log transform.
    Positive,
    /// `[0, ∞)`, log transform after nudging zero inward.
    NonNegative,
    /// `(0, 1]`, logit transform.
    UnitInterval,
    /// `(−1, 1)`, atanh transform.
    Correlation,
    /// `[0, π/2]`, scaled logit.
    Angle,
}

// Distance kept from a closed boundary before transforming.
const EDGE: f64 = 1e-8;
const FLOOR: f64 = 1e-10;

impl ParamKind {
    /// Moves a value sitting on (or beyond) a boundary strictly inside the domain.
    pub fn nudge(self, x: f64) -> f64 {
        match self {
            ParamKind::Positive | ParamKind::NonNegative => x.max(FLOOR),
            ParamKind::UnitInterval => x.clamp(EDGE, 1.0 - EDGE),
            ParamKind::Correlation => x.clamp(-1.0 + EDGE, 1.0 - EDGE),
            ParamKind::Angle => x.clamp(EDGE, FRAC_PI_2 - EDGE),
        }
    }

    pub fn contains(self, x: f64) -> bool {
        match self {
            ParamKind::Positive => x > 0.0 && x.is_finite(),
            ParamKind::NonNegative => x >= 0.0 && x.is_finite(),
            ParamKind::UnitInterval => x > 0.0 && x <= 1.0,
            ParamKind::Correlation => x > -1.0 && x < 1.0,
            ParamKind::Angle => (0.0..=FRAC_PI_2).contains(&x),
        }
    }

    pub fn forward(self, x: f64) -> f64 {
        let x = self.nudge(x);
        match self {
            ParamKind::Positive | ParamKind::NonNegative => x.ln(),
            ParamKind::UnitInterval => logit(x),
            ParamKind::Correlation => x.atanh(),
            ParamKind::Angle => logit(x / FRAC_PI_2),
        }
    }

    pub fn inverse(self, y: f64) -> f64 {
        match self {
            ParamKind::Positive | ParamKind::NonNegative => y.exp(),
            ParamKind::UnitInterval => expit(y),
            ParamKind::Correlation => y.tanh(),
            ParamKind::Angle => FRAC_PI_2 * expit(y),
        }
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn expit(y: f64) -> f64 {
    if y >= 0.0 {
        1.0 / (1.0 + (-y).exp())
    } else {
        let e = y.exp();
        e / (1.0 + e)
    }
}

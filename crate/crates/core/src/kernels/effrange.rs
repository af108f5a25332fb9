use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.05;
const ABS_TOL: f64 = 1e-6;

/// Search brackets for spatial distance and time lag.
pub const SPACE_BRACKET: (f64, f64) = (0.0, 1e3);
pub const TIME_BRACKET: (f64, f64) = (0.0, 1e6);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeAxis {
    Space,
    Time,
}

impl std::str::FromStr for RangeAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "space" => Ok(RangeAxis::Space),
            "time" => Ok(RangeAxis::Time),
            other => Err(Error::Parse(format!("axis must be `space` or `time`, not `{other}`"))),
        }
    }
}

/// Distance at which a non-increasing correlation first drops to `threshold`,
/// found by bisection on `[lo, hi]`.
pub fn effective_range(
    correlation: impl Fn(f64) -> f64,
    threshold: f64,
    (lo, hi): (f64, f64),
) -> Result<f64> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::BadBracket(format!("[{lo}, {hi}] is not an interval")));
    }
    if !(correlation(lo) > threshold) {
        return Err(Error::BadBracket(format!(
            "correlation at {lo} is already at or below {threshold}"
        )));
    }
    if correlation(hi) > threshold {
        return Err(Error::Unbounded);
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > ABS_TOL {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if correlation(mid) > threshold {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

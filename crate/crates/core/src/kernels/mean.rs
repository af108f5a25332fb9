use crate::fields::Point;

/// Deterministic mean surface `m(s)` on the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MeanSurface {
    #[default]
    Zero,
    /// Surface of the 100K regular-grid dataset.
    Mean1a,
    /// Surface of the 1M regular-grid dataset.
    Mean1b,
}

impl MeanSurface {
    pub fn eval(&self, s: Point) -> f64 {
        let (x, y) = (s.x, s.y);
        let u = 0.5 * (x + y);
        match self {
            MeanSurface::Zero => 0.0,
            MeanSurface::Mean1a => {
                let v = u - 0.9;
                5.0 * (30.0 * v.powi(3)).sin() * (20.0 * v.powi(4)).cos()
                    + 0.5 * ((30.0 * x).sin() + (13.0 * y).sin()).exp()
                    + 0.5 * (u - 0.2)
            }
            MeanSurface::Mean1b => {
                3.0 * (20.0 * (u + 1.9)).sin() * (20.0 * (u - 1.2).powi(6)).cos()
                    + 0.6 * ((25.0 * x).sin() + (13.0 * y).sin()).exp()
                    + 0.5 * (u - 0.2)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MeanSurface::Zero => "zero",
            MeanSurface::Mean1a => "1a",
            MeanSurface::Mean1b => "1b",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "zero" | "0" => Some(MeanSurface::Zero),
            "1a" => Some(MeanSurface::Mean1a),
            "1b" => Some(MeanSurface::Mean1b),
            _ => None,
        }
    }
}

pub fn mean_surface_eval(m: MeanSurface, s: Point) -> f64 {
    m.eval(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_surface() {
        assert_eq!(MeanSurface::Zero.eval(Point::new(0.3, 0.8)), 0.0);
    }

    #[test]
    fn first_term_vanishes_on_the_diagonal_line() {
        for x in [0.8, 0.9, 0.95] {
            let s = Point::new(x, 1.8 - x);
            let rest = 0.5 * ((30.0 * s.x).sin() + (13.0 * s.y).sin()).exp() + 0.35;
            assert!((MeanSurface::Mean1a.eval(s) - rest).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_high_precision_evaluation() {
        // 30-digit evaluations of the printed formulas
        let cases = [
            (MeanSurface::Mean1a, 0.2, 0.3, 4.43044278426908883312383766014),
            (MeanSurface::Mean1b, 0.2, 0.3, 1.47595427739044688700167755287),
            (MeanSurface::Mean1a, 0.7, 0.9, 0.688788159797356565288154465952),
            (MeanSurface::Mean1b, 0.7, 0.9, -1.26518105582382425139588421863),
        ];
        for (m, x, y, expected) in cases {
            assert!((m.eval(Point::new(x, y)) - expected).abs() < 1e-12, "{m:?} at ({x}, {y})");
        }
    }

    #[test]
    fn names_round_trip() {
        for m in [MeanSurface::Zero, MeanSurface::Mean1a, MeanSurface::Mean1b] {
            assert_eq!(MeanSurface::from_name(m.name()), Some(m));
        }
    }
}

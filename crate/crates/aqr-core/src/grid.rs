//! Closed intervals, evaluation grids and trapezoid quadrature.
//!
//! Every estimator in this workspace tabulates component functions on
//! equidistant grids and integrates against them with the trapezoid rule, so
//! the grid type collects the three operations everything else needs:
//! quadrature weights, definite integrals of tabulated curves, and linear
//! interpolation that is exact at the nodes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("interval endpoints must satisfy a < b, got [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
    #[error("interval endpoints must be finite, got [{a}, {b}]")]
    NonFiniteInterval { a: f64, b: f64 },
    #[error("grid needs at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("grid points must be finite and strictly increasing (violation at index {index})")]
    NotIncreasing { index: usize },
    #[error("curve has {got} values but the grid has {expected} points")]
    LengthMismatch { expected: usize, got: usize },
}

/// A closed support interval `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, GridError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(GridError::NonFiniteInterval { a, b });
        }
        if a >= b {
            return Err(GridError::BadInterval { a, b });
        }
        Ok(Interval { a, b })
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }
}

/// Strictly increasing evaluation grid spanning an interval.
///
/// Constructed equidistant in practice; all operations tolerate slightly
/// uneven spacing so grids survive serialization round-trips unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    /// `size` equidistant points on `interval`; both endpoints are included
    /// exactly.
    pub fn equidistant(interval: Interval, size: usize) -> Result<Self, GridError> {
        if size < 2 {
            return Err(GridError::TooFewPoints { min: 2, got: size });
        }
        let step = interval.length() / (size - 1) as f64;
        let mut points: Vec<f64> = (0..size).map(|k| interval.a + k as f64 * step).collect();
        // Pin the last node to b so the grid endpoints equal the interval
        // endpoints exactly despite accumulated rounding.
        points[size - 1] = interval.b;
        Self::from_points(points)
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self, GridError> {
        if points.len() < 2 {
            return Err(GridError::TooFewPoints {
                min: 2,
                got: points.len(),
            });
        }
        for (k, w) in points.windows(2).enumerate() {
            if !w[0].is_finite() || !w[1].is_finite() || w[0] >= w[1] {
                return Err(GridError::NotIncreasing { index: k + 1 });
            }
        }
        Ok(Grid { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn interval(&self) -> Interval {
        Interval {
            a: self.points[0],
            b: *self.points.last().unwrap(),
        }
    }

    /// Trapezoid quadrature weights: integrating a tabulated curve is the dot
    /// product with these.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let p = &self.points;
        let m = p.len();
        let mut w = vec![0.0; m];
        w[0] = 0.5 * (p[1] - p[0]);
        w[m - 1] = 0.5 * (p[m - 1] - p[m - 2]);
        for k in 1..m - 1 {
            w[k] = 0.5 * (p[k + 1] - p[k - 1]);
        }
        w
    }

    /// Trapezoid integral of a curve tabulated on this grid.
    pub fn integrate(&self, values: &[f64]) -> Result<f64, GridError> {
        if values.len() != self.points.len() {
            return Err(GridError::LengthMismatch {
                expected: self.points.len(),
                got: values.len(),
            });
        }
        let p = &self.points;
        let mut acc = 0.0;
        for k in 0..p.len() - 1 {
            acc += 0.5 * (p[k + 1] - p[k]) * (values[k] + values[k + 1]);
        }
        Ok(acc)
    }

    /// Piecewise-linear interpolation of a tabulated curve.
    ///
    /// Returns the tabulated value exactly when `x` hits a node; values
    /// outside the grid range clamp to the nearest endpoint (callers validate
    /// domains before interpolating).
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        debug_assert_eq!(values.len(), self.points.len());
        let p = &self.points;
        let last = p.len() - 1;
        if x <= p[0] {
            return values[0];
        }
        if x >= p[last] {
            return values[last];
        }
        let k = match p.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(k) => return values[k],
            Err(k) => k - 1,
        };
        let t = (x - p[k]) / (p[k + 1] - p[k]);
        values[k] + t * (values[k + 1] - values[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_rejects_bad_endpoints() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, -1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn equidistant_grid_hits_both_endpoints_exactly() {
        let iv = Interval::new(-1.0, 1.0).unwrap();
        let g = Grid::equidistant(iv, 41).unwrap();
        assert_eq!(g.len(), 41);
        assert_eq!(g.points()[0], -1.0);
        assert_eq!(g.points()[40], 1.0);
        // equidistant up to rounding
        let step = g.points()[1] - g.points()[0];
        for w in g.points().windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-12);
        }
    }

    #[test]
    fn trapezoid_weights_sum_to_interval_length() {
        let iv = Interval::new(-1.0, 1.0).unwrap();
        let g = Grid::equidistant(iv, 17).unwrap();
        let total: f64 = g.trapezoid_weights().iter().sum();
        assert!((total - 2.0).abs() < 1e-12);
    }

    #[test]
    fn integrate_matches_weight_dot_product_and_is_exact_for_lines() {
        let iv = Interval::new(0.0, 3.0).unwrap();
        let g = Grid::equidistant(iv, 31).unwrap();
        let vals: Vec<f64> = g.points().iter().map(|x| 2.0 * x - 1.0).collect();
        let by_rule = g.integrate(&vals).unwrap();
        let by_weights: f64 = g
            .trapezoid_weights()
            .iter()
            .zip(&vals)
            .map(|(w, v)| w * v)
            .sum();
        // ∫_0^3 (2x − 1) dx = 6
        assert!((by_rule - 6.0).abs() < 1e-12);
        assert!((by_rule - by_weights).abs() < 1e-12);
    }

    #[test]
    fn interpolate_is_exact_at_nodes_and_linear_between() {
        let iv = Interval::new(-1.0, 1.0).unwrap();
        let g = Grid::equidistant(iv, 5).unwrap();
        let vals = vec![3.0, -1.0, 0.5, 2.0, 4.0];
        for (k, &x) in g.points().iter().enumerate() {
            assert_eq!(g.interpolate(&vals, x), vals[k]);
        }
        let mid = 0.5 * (g.points()[1] + g.points()[2]);
        let want = 0.5 * (vals[1] + vals[2]);
        assert!((g.interpolate(&vals, mid) - want).abs() < 1e-15);
    }

    #[test]
    fn interpolate_clamps_outside_range() {
        let g = Grid::equidistant(Interval::new(0.0, 1.0).unwrap(), 3).unwrap();
        let vals = vec![1.0, 2.0, 3.0];
        assert_eq!(g.interpolate(&vals, -0.5), 1.0);
        assert_eq!(g.interpolate(&vals, 1.5), 3.0);
    }

    #[test]
    fn from_points_rejects_unsorted_input() {
        assert_eq!(
            Grid::from_points(vec![0.0, 0.0, 1.0]).unwrap_err(),
            GridError::NotIncreasing { index: 1 }
        );
        assert!(Grid::from_points(vec![0.0]).is_err());
    }

    #[test]
    fn grid_serializes_as_plain_array() {
        let g = Grid::equidistant(Interval::new(0.0, 1.0).unwrap(), 3).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, "[0.0,0.5,1.0]");
        let back: Grid = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }
}

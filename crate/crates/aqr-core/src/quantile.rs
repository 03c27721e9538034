//! Check loss and exact weighted-quantile minimization.
//!
//! The scalar subproblem every backfitting update solves is
//! `min_θ Σᵢ wᵢ τ_α(rᵢ − θ)` with the check function
//! `τ_α(u) = u·(α − 1{u<0})`. The objective is convex and piecewise linear
//! in `θ`, so some input residual attains the minimum; when the minimizer is
//! an interval we return its left endpoint, which is the first sorted
//! residual whose cumulative weight reaches `α` times the total. The
//! minimization is implicitly over `[min r, max r]`, which always contains a
//! global minimizer.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuantileError {
    #[error("a check-loss problem needs at least one residual")]
    Empty,
    #[error("residuals and weights differ in length ({residuals} vs {weights})")]
    LengthMismatch { residuals: usize, weights: usize },
    #[error("weight at index {0} is negative or non-finite")]
    BadWeight(usize),
    #[error("residual at index {0} is not finite")]
    BadResidual(usize),
    #[error("total weight must be positive")]
    ZeroTotalWeight,
    #[error("alpha must lie strictly inside (0, 1), got {0}")]
    BadAlpha(f64),
}

/// `τ_α(u) = u·α` for `u ≥ 0`, `u·(α − 1)` for `u < 0`; nonnegative and
/// convex.
pub fn check_loss(u: f64, alpha: f64) -> f64 {
    if u >= 0.0 {
        u * alpha
    } else {
        u * (alpha - 1.0)
    }
}

/// A weighted scalar check-loss minimization instance.
#[derive(Debug, Clone)]
pub struct CheckLossProblem {
    residuals: Vec<f64>,
    weights: Vec<f64>,
    alpha: f64,
}

impl CheckLossProblem {
    pub fn new(residuals: Vec<f64>, weights: Vec<f64>, alpha: f64) -> Result<Self, QuantileError> {
        if residuals.is_empty() {
            return Err(QuantileError::Empty);
        }
        if residuals.len() != weights.len() {
            return Err(QuantileError::LengthMismatch {
                residuals: residuals.len(),
                weights: weights.len(),
            });
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(QuantileError::BadAlpha(alpha));
        }
        for (i, &r) in residuals.iter().enumerate() {
            if !r.is_finite() {
                return Err(QuantileError::BadResidual(i));
            }
        }
        let mut total = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(QuantileError::BadWeight(i));
            }
            total += w;
        }
        if !(total > 0.0) {
            return Err(QuantileError::ZeroTotalWeight);
        }
        Ok(CheckLossProblem {
            residuals,
            weights,
            alpha,
        })
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// The smallest global minimizer of `θ ↦ Σᵢ wᵢ τ_α(rᵢ − θ)`.
///
/// Zero-weight entries are dropped, the rest are stably sorted by residual,
/// and the first residual whose cumulative weight reaches `α·Σw` is
/// returned; the result is always one of the input residuals.
pub fn weighted_quantile(problem: &CheckLossProblem) -> f64 {
    let mut items: Vec<(f64, f64)> = problem
        .residuals
        .iter()
        .zip(&problem.weights)
        .filter(|&(_, &w)| w > 0.0)
        .map(|(&r, &w)| (r, w))
        .collect();
    items.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let total: f64 = items.iter().map(|&(_, w)| w).sum();
    let threshold = problem.alpha * total;
    let mut cum = 0.0;
    for &(r, w) in &items {
        cum += w;
        if cum >= threshold {
            return r;
        }
    }
    // cumulative rounding can leave cum a hair below α·Σw only at the end
    items.last().unwrap().0
}

/// The objective `Σᵢ wᵢ τ_α(rᵢ − θ)`; exposed as the optimality oracle for
/// the solver above.
pub fn check_objective(theta: f64, problem: &CheckLossProblem) -> f64 {
    problem
        .residuals
        .iter()
        .zip(&problem.weights)
        .map(|(&r, &w)| w * check_loss(r - theta, problem.alpha))
        .sum()
}

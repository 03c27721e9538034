//! Fitted additive models: the result type shared by every estimator, its
//! normalization and prediction operations, and the fitting configuration.
//!
//! An additive fit is an intercept plus one tabulated curve per covariate.
//! The decomposition is only identified up to constant shifts between the
//! curves and the intercept, so each component is pinned by the constraint
//! that its integral against a normalization weight curve (the estimated
//! design density by default) is zero. `normalize_fit` enforces the
//! constraint exactly without changing a single prediction.

use crate::dataset::DataError;
use crate::grid::{Grid, GridError, Interval};
use crate::kernel::KernelError;
use crate::quantile::QuantileError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("fitting needs at least two observations, got {0}")]
    TooFewObservations(usize),
    #[error("expected {expected} bandwidths, got {got}")]
    BandwidthCount { expected: usize, got: usize },
    #[error(
        "bandwidth {bandwidth} for component {component} leaves grid point {grid_index} with zero \
         kernel weight; the data are undersmoothed at this bandwidth"
    )]
    Undersmoothed {
        component: usize,
        grid_index: usize,
        bandwidth: f64,
    },
    #[error("component update would cost {required} weighted terms, over the budget of {budget}")]
    WorkBudgetExceeded { required: u128, budget: u64 },
    #[error("grid must have at least {min} points per coordinate, got {got}")]
    GridTooSmall { min: usize, got: usize },
    #[error("max_cycles must be at least 1")]
    NoCycles,
    #[error("tol must be positive, got {0}")]
    BadTol(f64),
    #[error("pseudo-observation count must be at least 1")]
    BadPseudoCount,
    #[error("alpha must lie strictly inside (0, 1), got {0}")]
    BadAlpha(f64),
    #[error("smooth weighted-mean backfitting needs at least two covariates, got {0}")]
    NeedsTwoComponents(usize),
    #[error("normalization weight curve for component {0} has zero integral")]
    DegenerateWeightCurve(usize),
    #[error("weight curve for component {component} has {got} values, expected {expected}")]
    WeightCurveLength {
        component: usize,
        expected: usize,
        got: usize,
    },
    #[error("prediction point has {got} coordinates, expected {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("coordinate {index} ({value}) lies outside its interval [{a}, {b}]")]
    PointOutsideDomain {
        index: usize,
        value: f64,
        a: f64,
        b: f64,
    },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Quantile(#[from] QuantileError),
}

/// Which estimator produced a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "BF")]
    Bf,
    #[serde(rename = "SBF_grid")]
    SbfGrid,
    #[serde(rename = "SBF_pseudo")]
    SbfPseudo,
    #[serde(rename = "BF_star")]
    BfStar,
    #[serde(rename = "SBF_star")]
    SbfStar,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Bf => "BF",
            Method::SbfGrid => "SBF_grid",
            Method::SbfPseudo => "SBF_pseudo",
            Method::BfStar => "BF_star",
            Method::SbfStar => "SBF_star",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "BF" => Some(Method::Bf),
            "SBF_grid" => Some(Method::SbfGrid),
            "SBF_pseudo" => Some(Method::SbfPseudo),
            "BF_star" => Some(Method::BfStar),
            "SBF_star" => Some(Method::SbfStar),
            _ => None,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Weight curves used for the component-centering constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum NormalizationWeights {
    /// Kernel density estimate of each covariate on its grid.
    #[default]
    EstimatedDensity,
    /// Flat weights: plain averages over the grid.
    Uniform,
}

/// Tuning knobs shared by all fitting routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Grid points per coordinate.
    pub grid_size: usize,
    /// Hard cap on full backfitting cycles.
    pub max_cycles: usize,
    /// Convergence tolerance for the per-cycle sup-norm change of the
    /// component values, relative to the interquartile range of the
    /// response.
    pub tol: f64,
    /// Deterministic points per observation in the pseudo-observation
    /// scheme.
    pub pseudo_j: usize,
    pub normalization_weights: NormalizationWeights,
    /// Cap on `d·G^(d−1)·n`, the weighted-term count of one grid-integration
    /// component update; guards against accidental blowup at high dimension.
    pub work_budget: u64,
    /// Record the discretized smooth-backfitting objective once per cycle
    /// (costs an extra full-grid pass each cycle; off by default).
    pub audit_objective: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            grid_size: 41,
            max_cycles: 50,
            tol: 1e-4,
            pseudo_j: 10,
            normalization_weights: NormalizationWeights::EstimatedDensity,
            work_budget: 100_000_000,
            audit_objective: false,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<(), FitError> {
        if self.grid_size < 5 {
            return Err(FitError::GridTooSmall {
                min: 5,
                got: self.grid_size,
            });
        }
        if self.max_cycles < 1 {
            return Err(FitError::NoCycles);
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(FitError::BadTol(self.tol));
        }
        if self.pseudo_j < 1 {
            return Err(FitError::BadPseudoCount);
        }
        Ok(())
    }
}

/// A fitted additive model: intercept, per-coordinate curves on their grids,
/// and convergence metadata.
///
/// Serializes to a JSON object with exactly the fields
/// `{method, alpha, bandwidths, intervals, grids, components, m0,
/// iterations_run, converged}`; `alpha` is `null` for the least-squares
/// estimators, which carry no quantile level of their own.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdditiveFit {
    pub method: Method,
    pub alpha: Option<f64>,
    pub bandwidths: Vec<f64>,
    pub intervals: Vec<Interval>,
    pub grids: Vec<Grid>,
    pub components: Vec<Vec<f64>>,
    pub m0: f64,
    pub iterations_run: usize,
    pub converged: bool,
    /// Normalization weight curves the fit was centered against.
    #[serde(skip)]
    pub weight_curves: Vec<Vec<f64>>,
    /// `(component, grid index)` pairs whose update had zero total weight
    /// and kept their previous value.
    #[serde(skip)]
    pub dead_points: Vec<(usize, usize)>,
    /// Sup-norm component change per completed cycle.
    #[serde(skip)]
    pub cycle_changes: Vec<f64>,
    /// Discretized smooth-backfitting objective per cycle (first entry is
    /// the initial state); filled only when requested in the configuration.
    #[serde(skip)]
    pub objective_trace: Vec<f64>,
}

impl AdditiveFit {
    pub fn d(&self) -> usize {
        self.components.len()
    }

    /// Largest absolute tabulated value of component `j`.
    pub fn component_sup(&self, j: usize) -> f64 {
        self.components[j].iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Evaluate component `j` at a coordinate by linear interpolation.
    pub fn component_at(&self, j: usize, x: f64) -> f64 {
        self.grids[j].interpolate(&self.components[j], x)
    }
}

/// Re-centers every component to zero weighted mean and absorbs the shifts
/// into the intercept; predictions are unchanged.
pub fn normalize_fit(fit: &mut AdditiveFit, weight_curves: &[Vec<f64>]) -> Result<(), FitError> {
    if weight_curves.len() != fit.components.len() {
        return Err(FitError::WeightCurveLength {
            component: weight_curves.len(),
            expected: fit.components.len(),
            got: weight_curves.len(),
        });
    }
    for j in 0..fit.components.len() {
        let grid = &fit.grids[j];
        if weight_curves[j].len() != grid.len() {
            return Err(FitError::WeightCurveLength {
                component: j,
                expected: grid.len(),
                got: weight_curves[j].len(),
            });
        }
        let c = component_mean(grid, &fit.components[j], &weight_curves[j])
            .ok_or(FitError::DegenerateWeightCurve(j))?;
        for v in &mut fit.components[j] {
            *v -= c;
        }
        fit.m0 += c;
    }
    Ok(())
}

/// Weighted trapezoid mean of a tabulated curve; `None` when the weight
/// curve integrates to zero.
pub(crate) fn component_mean(grid: &Grid, values: &[f64], weights: &[f64]) -> Option<f64> {
    let num: f64 = grid
        .trapezoid_weights()
        .iter()
        .zip(values.iter().zip(weights))
        .map(|(tw, (v, w))| tw * v * w)
        .sum();
    let den: f64 = grid
        .trapezoid_weights()
        .iter()
        .zip(weights)
        .map(|(tw, w)| tw * w)
        .sum();
    if den > 0.0 {
        Some(num / den)
    } else {
        None
    }
}

/// `m0 + Σ_j m_j(x_j)` with components evaluated by linear interpolation;
/// exact at grid nodes.
pub fn predict(fit: &AdditiveFit, x: &[f64]) -> Result<f64, FitError> {
    if x.len() != fit.components.len() {
        return Err(FitError::PointDimension {
            expected: fit.components.len(),
            got: x.len(),
        });
    }
    let mut acc = fit.m0;
    for (j, &xj) in x.iter().enumerate() {
        let iv = fit.intervals[j];
        if !iv.contains(xj) {
            return Err(FitError::PointOutsideDomain {
                index: j,
                value: xj,
                a: iv.a,
                b: iv.b,
            });
        }
        acc += fit.grids[j].interpolate(&fit.components[j], xj);
    }
    Ok(acc)
}

//! Additive quantile regression by backfitting.
//!
//! The model is `Q_α(Y | X = x) = m₀ + Σ_j m_j(x_j)` on a box domain, with
//! each component centered to zero weighted mean so the decomposition is
//! unique. This crate provides the pieces in layers:
//!
//! * [`grid`] / [`kernel`] — tabulation grids and boundary-corrected
//!   Epanechnikov smoothing on closed intervals;
//! * [`quantile`] — the check loss and exact weighted-quantile solver that
//!   every fitting update reduces to;
//! * [`dataset`] / [`fit`] — validated input containers, the fit result
//!   type, prediction and normalization;
//! * [`backfit`] — the quantile estimators: ordinary backfitting, smooth
//!   backfitting discretized on the grid, and smooth backfitting via
//!   deterministic pseudo-observations;
//! * [`mean_backfit`] — their closed-form weighted least-squares
//!   counterparts for linearization studies.

pub mod backfit;
pub mod dataset;
pub mod fit;
pub mod grid;
pub mod kernel;
pub mod mean_backfit;
pub mod quantile;

pub use backfit::{constraint_integrals, fit_bf, fit_sbf_grid, fit_sbf_pseudo, sbf_objective};
pub use dataset::{DataError, Dataset, WeightedDataset};
pub use fit::{
    normalize_fit, predict, AdditiveFit, FitConfig, FitError, Method, NormalizationWeights,
};
pub use grid::{Grid, GridError, Interval};
pub use kernel::{
    kde_marginal, weighted_kde_pairwise, KernelError, KernelKind, KernelSpec, BASE_KERNEL_L2,
};
pub use mean_backfit::{fit_bf_star, fit_sbf_star};
pub use quantile::{check_loss, check_objective, weighted_quantile, CheckLossProblem, QuantileError};

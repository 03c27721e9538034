//! First-order asymptotic variance of a component estimate at an interior
//! point.
//!
//! For the synthetic model the limiting pointwise variance of `m̂_j(x_j)` is
//!
//! ```text
//! α(1−α) · f_{X_j}(x_j) · ∫K²   /   ( f_{ε,X_j}(0, x_j)² · n · h_j )
//! ```
//!
//! where `f_{X_j}` is the design marginal and `f_{ε,X_j}(0,·)` the joint
//! density of the quantile-centered error and the coordinate at zero error,
//! which for Gaussian noise reduces to `φ(z_α)·∫ f_X(x)/s(x) dx_{−j}`.  Both
//! marginals are tabulated once per design by trapezoid quadrature of the
//! truncated-normal density and cached; `∫K² = 3/5` for the Epanechnikov
//! base kernel.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use aqr_core::{Grid, Interval, BASE_KERNEL_L2};
use statrs::distribution::Continuous;

use crate::model::{normal_quantile, std_normal, SimError, SimModel};

/// Off-diagonal correlation of the equicorrelated design (kept in sync with
/// the sampler).
const RHO: f64 = 0.9;

/// Tabulation grid size along the queried coordinate.
const TAB_POINTS: usize = 401;

/// Trapezoid points per inner integration axis.
const INNER_POINTS: usize = 201;

/// Cached per-design marginals on a fixed tabulation grid.
struct DesignTables {
    grid: Grid,
    /// `f_{X_j}` — identical for every coordinate by exchangeability.
    marginal: Vec<f64>,
    /// `A_j(t) = ∫ f_X/s dx_{−j}` for each coordinate.
    inv_scale: [Vec<f64>; 3],
}

/// Unnormalized trivariate normal density, exchangeable in its arguments.
fn base_density(correlated: bool, x: f64, a: f64, b: f64) -> f64 {
    let sq = x * x + a * a + b * b;
    let quad = if correlated {
        let sum = x + a + b;
        (sq - RHO * sum * sum / (1.0 + 2.0 * RHO)) / (1.0 - RHO)
    } else {
        sq
    };
    (-0.5 * quad).exp()
}

fn design_tables(correlated: bool, noise_scale: f64) -> Arc<DesignTables> {
    static CACHE: OnceLock<Mutex<HashMap<(bool, u64), Arc<DesignTables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (correlated, noise_scale.to_bits());
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return Arc::clone(hit);
    }

    let grid = Grid::equidistant(Interval::new(-1.0, 1.0).unwrap(), TAB_POINTS).unwrap();
    let inner = Grid::equidistant(Interval::new(-1.0, 1.0).unwrap(), INNER_POINTS).unwrap();
    let iw = inner.trapezoid_weights();
    let ipts = inner.points().to_vec();

    let mut marginal = vec![0.0; TAB_POINTS];
    let mut a0 = vec![0.0; TAB_POINTS];
    let mut a1 = vec![0.0; TAB_POINTS];
    for (g, &t) in grid.points().iter().enumerate() {
        let mut mass = 0.0;
        let mut acc0 = 0.0;
        let mut acc1 = 0.0;
        for (ia, &a) in ipts.iter().enumerate() {
            for (ib, &b) in ipts.iter().enumerate() {
                let w = iw[ia] * iw[ib];
                let dens = w * base_density(correlated, t, a, b);
                mass += dens;
                // Coordinate roles: the first coordinate carries cos, the
                // other two exp.  A_2 equals A_1 because swapping the two
                // exp-coordinates leaves the exchangeable density alone.
                acc0 += dens / (t.cos() + a.exp() + b.exp());
                acc1 += dens / (a.cos() + t.exp() + b.exp());
            }
        }
        marginal[g] = mass;
        a0[g] = acc0 / noise_scale;
        a1[g] = acc1 / noise_scale;
    }

    // The box probability is the integral of the unnormalized marginal, so
    // normalizing by it makes `marginal` a genuine density on [-1, 1].
    let total = grid.integrate(&marginal).unwrap();
    for v in marginal.iter_mut().chain(&mut a0).chain(&mut a1) {
        *v /= total;
    }

    let tables = Arc::new(DesignTables {
        grid,
        marginal,
        inv_scale: [a0, a1.clone(), a1],
    });
    cache.lock().unwrap().insert(key, Arc::clone(&tables));
    tables
}

/// First-order variance of `m̂_j(x_j)` at an interior coordinate.
///
/// Rejects points within one bandwidth of an interval endpoint, where the
/// interior expansion does not hold.
pub fn asymptotic_variance(
    x_j: f64,
    j: usize,
    alpha: f64,
    n: usize,
    h_j: f64,
    model: &SimModel,
) -> Result<f64, SimError> {
    if j >= SimModel::DIM {
        return Err(SimError::ComponentIndex(j));
    }
    let z_alpha = normal_quantile(alpha)?;
    if !(h_j > 0.0) || !h_j.is_finite() {
        return Err(SimError::BadBandwidth(h_j));
    }
    if n == 0 {
        return Err(SimError::BadConfig("sample size must be positive".into()));
    }
    if !(x_j > -1.0 + h_j && x_j < 1.0 - h_j) {
        return Err(SimError::BoundaryPoint {
            x: x_j,
            bandwidth: h_j,
        });
    }

    let tables = design_tables(model.correlated, model.noise_scale);
    let f_xj = tables.grid.interpolate(&tables.marginal, x_j);
    let a_j = tables.grid.interpolate(&tables.inv_scale[j], x_j);
    let f_eps_xj = std_normal().pdf(z_alpha) * a_j;
    Ok(alpha * (1.0 - alpha) * f_xj * BASE_KERNEL_L2 / (f_eps_xj * f_eps_xj * n as f64 * h_j))
}

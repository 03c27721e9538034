//! Weighted-mean backfitting: the least-squares counterparts of the
//! quantile estimators.
//!
//! These routines fit the same additive shape to a weighted regression
//! problem — responses `z` with strictly positive multiplicative weights
//! `f` — by replacing every weighted-quantile update with its closed-form
//! weighted-average solution. They exist because a quantile estimate admits
//! a local linearization whose leading term is exactly such a weighted
//! regression; running the mean fit on suitably constructed pseudo-responses
//! isolates the linear-approximation error of the quantile procedures.
//!
//! `fit_bf_star` mirrors ordinary backfitting: each grid-point update is a
//! weighted Nadaraya–Watson average of partial residuals, re-centered into
//! the intercept exactly like the quantile fits. `fit_sbf_star` mirrors
//! smooth backfitting: the update subtracts integrals of the other
//! components against estimated pairwise design densities, with the
//! intercept frozen at the weighted response mean; each updated component is
//! projected back onto the zero-weighted-mean constraint, which removes the
//! constant mode that pure discretization error would otherwise keep alive
//! indefinitely. Both fits are linear in the responses (for a frozen
//! iteration schedule), which the tests exploit.
//!
//! A grid point whose local weight mass vanishes cannot be updated; it
//! keeps its previous value and is reported in `dead_points` instead of
//! aborting the fit, since the pseudo-model weights can legitimately kill
//! regions of the design space.

use crate::backfit::{build_grids, build_specs, normalization_curves, sample_iqr};
use crate::dataset::WeightedDataset;
use crate::fit::{
    component_mean, normalize_fit, AdditiveFit, FitConfig, FitError, Method,
};
use crate::grid::Grid;
use crate::kernel::{kde_marginal, weighted_kde_pairwise, KernelSpec};

fn weighted_mean(values: &[f64], weights: &[f64]) -> f64 {
    let num: f64 = values.iter().zip(weights).map(|(v, w)| v * w).sum();
    let den: f64 = weights.iter().sum();
    num / den
}

struct StarSetup {
    grids: Vec<Grid>,
    specs: Vec<KernelSpec>,
    weight_curves: Vec<Vec<f64>>,
}

fn star_setup(
    data: &WeightedDataset,
    bandwidths: &[f64],
    config: &FitConfig,
) -> Result<StarSetup, FitError> {
    config.validate()?;
    if data.n() < 2 {
        return Err(FitError::TooFewObservations(data.n()));
    }
    let grids = build_grids(data.intervals(), config.grid_size)?;
    let specs = build_specs(data.intervals(), bandwidths)?;
    let columns: Vec<&[f64]> = (0..data.d()).map(|j| data.column(j)).collect();
    let weight_curves =
        normalization_curves(&columns, &specs, &grids, config.normalization_weights)?;
    Ok(StarSetup {
        grids,
        specs,
        weight_curves,
    })
}

#[allow(clippy::too_many_arguments)]
fn assemble_star(
    method: Method,
    bandwidths: &[f64],
    data: &WeightedDataset,
    grids: Vec<Grid>,
    weight_curves: Vec<Vec<f64>>,
    components: Vec<Vec<f64>>,
    m0: f64,
    iterations: usize,
    converged: bool,
    dead_points: Vec<(usize, usize)>,
    cycle_changes: Vec<f64>,
) -> AdditiveFit {
    AdditiveFit {
        method,
        alpha: None,
        bandwidths: bandwidths.to_vec(),
        intervals: data.intervals().to_vec(),
        grids,
        components,
        m0,
        iterations_run: iterations,
        converged,
        weight_curves,
        dead_points,
        cycle_changes,
        objective_trace: Vec::new(),
    }
}

/// Ordinary backfitting for the weighted regression problem: per grid
/// point, the `K·f`-weighted average of partial residuals.
pub fn fit_bf_star(
    data: &WeightedDataset,
    bandwidths: &[f64],
    config: &FitConfig,
) -> Result<AdditiveFit, FitError> {
    let StarSetup {
        grids,
        specs,
        weight_curves,
    } = star_setup(data, bandwidths, config)?;
    let n = data.n();
    let d = data.d();
    let z = data.z();
    let f = data.weights();

    // combined K·f weight rows and their (fixed) denominators
    let mut wmats: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut denominators: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut dead_points = Vec::new();
    for j in 0..d {
        let grid = &grids[j];
        let mut mat = vec![0.0; grid.len() * n];
        let mut dens = vec![0.0; grid.len()];
        for (g, &xg) in grid.points().iter().enumerate() {
            let row = &mut mat[g * n..(g + 1) * n];
            for i in 0..n {
                row[i] = specs[j].evaluate_unchecked(xg, data.column(j)[i]) * f[i];
            }
            dens[g] = row.iter().sum();
            if !(dens[g] > 0.0) {
                dead_points.push((j, g));
            }
        }
        wmats.push(mat);
        denominators.push(dens);
    }

    let mut m0 = weighted_mean(z, f);
    let tol = config.tol * sample_iqr(z);
    let mut components: Vec<Vec<f64>> = grids.iter().map(|g| vec![0.0; g.len()]).collect();
    let mut comp_at: Vec<Vec<f64>> = vec![vec![0.0; n]; d];
    let mut partial = vec![0.0; n];
    let mut cycle_changes = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_cycles {
        iterations += 1;
        let mut max_change = 0.0f64;
        for j in 0..d {
            for i in 0..n {
                let mut acc = z[i] - m0;
                for (l, vals) in comp_at.iter().enumerate() {
                    if l != j {
                        acc -= vals[i];
                    }
                }
                partial[i] = acc;
            }
            let grid = &grids[j];
            let mut new_vals = components[j].clone();
            for g in 0..grid.len() {
                let den = denominators[j][g];
                if den > 0.0 {
                    let row = &wmats[j][g * n..(g + 1) * n];
                    let num: f64 = row.iter().zip(&partial).map(|(w, r)| w * r).sum();
                    new_vals[g] = num / den;
                }
            }
            let c = component_mean(grid, &new_vals, &weight_curves[j])
                .ok_or(FitError::DegenerateWeightCurve(j))?;
            for v in &mut new_vals {
                *v -= c;
            }
            m0 += c;
            for (new, old) in new_vals.iter().zip(&components[j]) {
                max_change = max_change.max((new - old).abs());
            }
            components[j] = new_vals;
            for i in 0..n {
                comp_at[j][i] = grid.interpolate(&components[j], data.column(j)[i]);
            }
        }
        cycle_changes.push(max_change);
        if max_change <= tol {
            converged = true;
            break;
        }
    }

    Ok(assemble_star(
        Method::BfStar,
        bandwidths,
        data,
        grids,
        weight_curves,
        components,
        m0,
        iterations,
        converged,
        dead_points,
        cycle_changes,
    ))
}

/// Smooth backfitting for the weighted regression problem. The marginal
/// smooths and the (weighted) marginal and pairwise design densities are
/// computed once; every iteration then only evaluates the integral update
///
/// `m̂_j(x) = m̃_j(x) − m̂₀ − Σ_{ℓ≠j} ∫ m̂_ℓ(u) f̂_{jℓ}(x,u) du / f̂_j(x)`
///
/// with the intercept frozen at the weighted response mean. With exact
/// integrals the update preserves the centering constraint by itself;
/// quadrature error does not, so each updated component is projected back
/// onto it (the intercept still never moves). A final normalization pass
/// makes the constraint exact in floating point.
pub fn fit_sbf_star(
    data: &WeightedDataset,
    bandwidths: &[f64],
    config: &FitConfig,
) -> Result<AdditiveFit, FitError> {
    if data.d() < 2 {
        return Err(FitError::NeedsTwoComponents(data.d()));
    }
    let StarSetup {
        grids,
        specs,
        weight_curves,
    } = star_setup(data, bandwidths, config)?;
    let n = data.n();
    let d = data.d();
    let z = data.z();
    let f = data.weights();

    let m0 = weighted_mean(z, f);
    let tol = config.tol * sample_iqr(z);

    // weighted marginal smooths of the responses, with dead-point flags
    let mut nw: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut live: Vec<Vec<bool>> = Vec::with_capacity(d);
    let mut dead_points = Vec::new();
    for j in 0..d {
        let grid = &grids[j];
        let mut curve = vec![0.0; grid.len()];
        let mut alive = vec![false; grid.len()];
        for (g, &xg) in grid.points().iter().enumerate() {
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..n {
                let w = specs[j].evaluate_unchecked(xg, data.column(j)[i]) * f[i];
                num += w * z[i];
                den += w;
            }
            if den > 0.0 {
                curve[g] = num / den;
                alive[g] = true;
            } else {
                dead_points.push((j, g));
            }
        }
        nw.push(curve);
        live.push(alive);
    }

    // weighted marginal and pairwise design densities
    let fw: Vec<Vec<f64>> = (0..d)
        .map(|j| kde_marginal(data.column(j), &specs[j], &grids[j], Some(f)))
        .collect::<Result<_, _>>()?;
    let mut pair: Vec<Vec<Vec<Vec<f64>>>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut row = Vec::with_capacity(d);
        for l in 0..d {
            if l == j {
                row.push(Vec::new());
            } else {
                row.push(weighted_kde_pairwise(
                    data.column(j),
                    data.column(l),
                    f,
                    &specs[j],
                    &specs[l],
                    &grids[j],
                    &grids[l],
                )?);
            }
        }
        pair.push(row);
    }
    let trap_weights: Vec<Vec<f64>> = grids.iter().map(|g| g.trapezoid_weights()).collect();

    let mut components: Vec<Vec<f64>> = grids.iter().map(|g| vec![0.0; g.len()]).collect();
    let mut cycle_changes = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_cycles {
        iterations += 1;
        let mut max_change = 0.0f64;
        for j in 0..d {
            let grid = &grids[j];
            let mut new_vals = components[j].clone();
            for g in 0..grid.len() {
                if !live[j][g] || !(fw[j][g] > 0.0) {
                    continue;
                }
                let mut acc = nw[j][g] - m0;
                for l in 0..d {
                    if l == j {
                        continue;
                    }
                    let integral: f64 = trap_weights[l]
                        .iter()
                        .zip(components[l].iter().zip(&pair[j][l][g]))
                        .map(|(t, (m, p))| t * m * p)
                        .sum();
                    acc -= integral / fw[j][g];
                }
                new_vals[g] = acc;
            }
            // project back onto the centering constraint; the discarded
            // constant is pure quadrature noise, so the intercept stays put
            let c = component_mean(grid, &new_vals, &weight_curves[j])
                .ok_or(FitError::DegenerateWeightCurve(j))?;
            for v in &mut new_vals {
                *v -= c;
            }
            for (new, old) in new_vals.iter().zip(&components[j]) {
                max_change = max_change.max((new - old).abs());
            }
            components[j] = new_vals;
        }
        cycle_changes.push(max_change);
        if max_change <= tol {
            converged = true;
            break;
        }
    }

    let curves = weight_curves.clone();
    let mut fit = assemble_star(
        Method::SbfStar,
        bandwidths,
        data,
        grids,
        weight_curves,
        components,
        m0,
        iterations,
        converged,
        dead_points,
        cycle_changes,
    );
    normalize_fit(&mut fit, &curves)?;
    Ok(fit)
}

//! The Monte-Carlo accuracy benchmark: replicated fits of every requested
//! estimator over a bandwidth grid, scored by integrated squared error
//! against the exact quantile components.
//!
//! Each replication draws its own training sample, latent noise, and a
//! fresh evaluation sample from the design density; the ISE is the
//! Monte-Carlo average of the squared gap between the fitted and true
//! component sums over that evaluation sample.  Replications are seeded
//! individually from the master seed, so the report is bit-reproducible
//! and replications can run in parallel (results are reduced in fixed
//! index order).
//!
//! Aggregation mirrors the usual reporting conventions for this kind of
//! study: MISE per (method, level, bandwidth) cell, per-method MISE at the
//! bandwidth that is optimal for the anchor estimator of its family
//! (ordinary backfitting anchors its weighted variant, smooth backfitting
//! anchors the smooth variants), and paired ordinary-vs-smooth ISE
//! differences with their standard errors.

use aqr_core::{
    fit_bf, fit_bf_star, fit_sbf_grid, fit_sbf_pseudo, fit_sbf_star, AdditiveFit, Dataset,
    FitConfig, FitError, Grid, Interval, Method, WeightedDataset,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{gen_covariates, gen_response, pseudo_responses, SimError, SimModel, TrueComponents};
use crate::stats::diff_se;

/// Request to collect one fitted component value per replication, for
/// normality diagnostics.  Level and bandwidth are indices into the
/// configured lists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QqRequest {
    pub method: Method,
    pub alpha_index: usize,
    pub h_index: usize,
    pub component: usize,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n: usize,
    pub alpha_levels: Vec<f64>,
    pub replications: usize,
    pub bandwidth_grid: Vec<f64>,
    pub methods: Vec<Method>,
    pub seed: u64,
    /// Monte-Carlo evaluation sample size per replication.
    pub eval_points: usize,
    pub model: SimModel,
    pub fit: FitConfig,
    pub qq: Option<QqRequest>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            n: 200,
            alpha_levels: vec![0.2, 0.5, 0.8],
            replications: 200,
            bandwidth_grid: vec![0.3, 0.4, 0.5, 0.6, 0.7],
            methods: vec![Method::Bf, Method::SbfGrid, Method::BfStar, Method::SbfStar],
            seed: 17,
            eval_points: 5000,
            model: SimModel::new(false),
            fit: FitConfig::default(),
            qq: None,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.n < 2 {
            return Err(SimError::BadConfig(format!(
                "sample size must be at least 2, got {}",
                self.n
            )));
        }
        if self.replications == 0 {
            return Err(SimError::BadConfig("need at least one replication".into()));
        }
        if self.alpha_levels.is_empty() {
            return Err(SimError::BadConfig("no quantile levels requested".into()));
        }
        for &a in &self.alpha_levels {
            if !(a > 0.0 && a < 1.0) {
                return Err(SimError::BadLevel(a));
            }
        }
        if self.bandwidth_grid.is_empty() {
            return Err(SimError::BadConfig("no bandwidths requested".into()));
        }
        for &h in &self.bandwidth_grid {
            if !(h > 0.0) || !h.is_finite() {
                return Err(SimError::BadBandwidth(h));
            }
        }
        if self.methods.is_empty() {
            return Err(SimError::BadConfig("no methods requested".into()));
        }
        if self.eval_points == 0 {
            return Err(SimError::EmptyEvalSample);
        }
        if !(self.model.noise_scale > 0.0) {
            return Err(SimError::BadConfig(format!(
                "noise scale must be positive, got {}",
                self.model.noise_scale
            )));
        }
        if self.model.bump_rate < 0.0 {
            return Err(SimError::BadConfig(format!(
                "bump rate must be nonnegative, got {}",
                self.model.bump_rate
            )));
        }
        if let Some(qq) = &self.qq {
            if qq.alpha_index >= self.alpha_levels.len()
                || qq.h_index >= self.bandwidth_grid.len()
                || !self.methods.contains(&qq.method)
            {
                return Err(SimError::BadConfig(
                    "Q-Q request does not match the configured methods/levels/bandwidths".into(),
                ));
            }
            if qq.component >= SimModel::DIM {
                return Err(SimError::ComponentIndex(qq.component));
            }
        }
        Ok(())
    }
}

/// One scored fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: Method,
    pub alpha: f64,
    pub h: f64,
    pub rep: usize,
    pub ise: f64,
}

/// A fit that errored, attributed to its replication and cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub rep: usize,
    pub method: Method,
    pub alpha: f64,
    pub h: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiseCell {
    pub method: Method,
    pub alpha: f64,
    pub h: f64,
    pub mise: f64,
    /// Surviving replications averaged into this cell.
    pub replications: usize,
}

/// Per-method MISE at the bandwidth minimizing its anchor's MISE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalCell {
    pub method: Method,
    pub alpha: f64,
    pub h: f64,
    pub mise: f64,
    pub anchor: Method,
}

/// Paired ordinary-vs-smooth ISE difference at the anchored bandwidths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffCell {
    pub alpha: f64,
    pub h_bf: f64,
    pub h_sbf: f64,
    pub mean: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub records: Vec<BenchRecord>,
    pub failures: Vec<FailureRecord>,
    pub failed_replications: usize,
    pub mise: Vec<MiseCell>,
    pub optimal: Vec<OptimalCell>,
    pub diffs: Vec<DiffCell>,
    /// Per-replication fitted values for the Q-Q request, in replication
    /// order over the surviving replications.
    pub qq_values: Vec<f64>,
}

/// Generator for one replication, derived from the master seed by a
/// SplitMix-style bijective mix so neighboring indices get unrelated
/// streams.
pub fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut z = seed.wrapping_add(rep.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Integrated squared error of the summed fitted components against the
/// exact quantile components, Monte-Carlo averaged over an evaluation
/// sample from the design density.
///
/// Both sides are centered against the fit's stored normalization curves
/// (uniform weights when the fit carries none), so the comparison is
/// invariant to how the constant was split between the intercept and the
/// components.  Intercepts are excluded.
pub fn ise(
    fit: &AdditiveFit,
    alpha: f64,
    model: &SimModel,
    eval_sample: &[[f64; 3]],
) -> Result<f64, SimError> {
    if eval_sample.is_empty() {
        return Err(SimError::EmptyEvalSample);
    }
    if fit.d() != SimModel::DIM {
        return Err(SimError::ComponentCount {
            expected: SimModel::DIM,
            got: fit.d(),
        });
    }
    let truth = TrueComponents::new(alpha, model)?;

    // Weighted mean of a curve against a normalization curve by trapezoid
    // quadrature on the fit's own grid.
    let centering = |grid: &Grid, values: &[f64], weights: &[f64], j: usize| {
        let tw = grid.trapezoid_weights();
        let mut num = 0.0;
        let mut den = 0.0;
        for g in 0..grid.len() {
            num += tw[g] * values[g] * weights[g];
            den += tw[g] * weights[g];
        }
        if den > 0.0 {
            Ok(num / den)
        } else {
            Err(SimError::DegenerateNormalization(j))
        }
    };

    let uniform: Vec<Vec<f64>>;
    let curves: &[Vec<f64>] = if fit.weight_curves.len() == fit.d() {
        &fit.weight_curves
    } else {
        uniform = fit.grids.iter().map(|g| vec![1.0; g.len()]).collect();
        &uniform
    };

    let mut fit_shift = [0.0; 3];
    let mut truth_shift = [0.0; 3];
    for j in 0..SimModel::DIM {
        let grid = &fit.grids[j];
        let truth_tab: Vec<f64> = grid.points().iter().map(|&x| truth.component(j, x)).collect();
        fit_shift[j] = centering(grid, &fit.components[j], &curves[j], j)?;
        truth_shift[j] = centering(grid, &truth_tab, &curves[j], j)?;
    }

    let mut acc = 0.0;
    for point in eval_sample {
        let mut err = 0.0;
        for j in 0..SimModel::DIM {
            err += fit.component_at(j, point[j]) - fit_shift[j];
            err -= truth.component(j, point[j]) - truth_shift[j];
        }
        acc += err * err;
    }
    Ok(acc / eval_sample.len() as f64)
}

/// The family anchor whose optimal bandwidth a method reports at.
fn anchor_of(method: Method) -> Method {
    match method {
        Method::Bf | Method::BfStar => Method::Bf,
        Method::SbfGrid | Method::SbfPseudo | Method::SbfStar => Method::SbfGrid,
    }
}

fn run_fit(
    method: Method,
    data: &Dataset,
    weighted: Option<&WeightedDataset>,
    alpha: f64,
    bandwidths: &[f64],
    config: &FitConfig,
) -> Result<AdditiveFit, FitError> {
    match method {
        Method::Bf => fit_bf(data, alpha, bandwidths, config),
        Method::SbfGrid => fit_sbf_grid(data, alpha, bandwidths, config),
        Method::SbfPseudo => fit_sbf_pseudo(data, alpha, bandwidths, config),
        Method::BfStar => fit_bf_star(weighted.expect("pseudo data"), bandwidths, config),
        Method::SbfStar => fit_sbf_star(weighted.expect("pseudo data"), bandwidths, config),
    }
}

struct RepOutcome {
    cells: Vec<Result<f64, String>>,
    qq: Option<f64>,
}

fn run_replication(rep: usize, config: &BenchConfig) -> Result<RepOutcome, SimError> {
    let model = &config.model;
    let mut rng = replication_rng(config.seed, rep as u64);
    let x = gen_covariates(config.n, model.correlated, &mut rng);
    let (y, u) = gen_response(&x, &mut rng, model);
    let eval = gen_covariates(config.eval_points, model.correlated, &mut rng);

    let intervals = vec![Interval::new(-1.0, 1.0).expect("unit cube"); SimModel::DIM];
    let columns: Vec<Vec<f64>> = (0..SimModel::DIM)
        .map(|j| x.iter().map(|p| p[j]).collect())
        .collect();
    let data = Dataset::new(y, columns.clone(), intervals.clone())?;

    // Pseudo-response datasets are shared across methods and bandwidths,
    // one per level, built on first use.
    let needs_pseudo = config
        .methods
        .iter()
        .any(|m| matches!(m, Method::BfStar | Method::SbfStar));
    let mut weighted: Vec<Option<WeightedDataset>> = vec![None; config.alpha_levels.len()];

    let a_count = config.alpha_levels.len();
    let h_count = config.bandwidth_grid.len();
    let mut cells = Vec::with_capacity(config.methods.len() * a_count * h_count);
    let mut qq = None;
    for (m_idx, &method) in config.methods.iter().enumerate() {
        for (a_idx, &alpha) in config.alpha_levels.iter().enumerate() {
            if needs_pseudo
                && weighted[a_idx].is_none()
                && matches!(method, Method::BfStar | Method::SbfStar)
            {
                let (z, w) = pseudo_responses(&x, &u, alpha, model)?;
                weighted[a_idx] =
                    Some(WeightedDataset::new(z, columns.clone(), w, intervals.clone())?);
            }
            for (h_idx, &h) in config.bandwidth_grid.iter().enumerate() {
                let bandwidths = vec![h; SimModel::DIM];
                let outcome =
                    run_fit(method, &data, weighted[a_idx].as_ref(), alpha, &bandwidths, &config.fit)
                        .map_err(|e| e.to_string())
                        .and_then(|fit| {
                            if let Some(req) = &config.qq {
                                if req.method == method
                                    && req.alpha_index == a_idx
                                    && req.h_index == h_idx
                                {
                                    qq = Some(fit.component_at(req.component, req.x));
                                }
                            }
                            ise(&fit, alpha, model, &eval).map_err(|e| e.to_string())
                        });
                debug_assert_eq!(cells.len(), (m_idx * a_count + a_idx) * h_count + h_idx);
                cells.push(outcome);
            }
        }
    }
    Ok(RepOutcome { cells, qq })
}

/// Runs the replicated benchmark described by the configuration.
///
/// Replications whose fits error are recorded and excluded from every
/// aggregate (keeping the paired statistics paired); the run fails outright
/// if more than 5% of replications are lost.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport, SimError> {
    config.validate()?;
    // Warm the expectation cache serially so parallel replications only read.
    for &alpha in &config.alpha_levels {
        TrueComponents::new(alpha, &config.model)?;
    }

    let outcomes: Vec<Result<RepOutcome, SimError>> = (0..config.replications)
        .into_par_iter()
        .map(|rep| run_replication(rep, config))
        .collect();
    let mut reps = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        reps.push(outcome?);
    }

    let a_count = config.alpha_levels.len();
    let h_count = config.bandwidth_grid.len();
    let cell_index = |m: usize, a: usize, h: usize| (m * a_count + a) * h_count + h;

    let mut failures = Vec::new();
    let mut surviving = Vec::new();
    for (rep, outcome) in reps.iter().enumerate() {
        let mut failed = false;
        for (m_idx, &method) in config.methods.iter().enumerate() {
            for (a_idx, &alpha) in config.alpha_levels.iter().enumerate() {
                for (h_idx, &h) in config.bandwidth_grid.iter().enumerate() {
                    if let Err(message) = &outcome.cells[cell_index(m_idx, a_idx, h_idx)] {
                        failed = true;
                        failures.push(FailureRecord {
                            rep,
                            method,
                            alpha,
                            h,
                            message: message.clone(),
                        });
                    }
                }
            }
        }
        if !failed {
            surviving.push(rep);
        }
    }
    let failed_replications = config.replications - surviving.len();
    if failed_replications as f64 > 0.05 * config.replications as f64 {
        return Err(SimError::TooManyFailures {
            failed: failed_replications,
            total: config.replications,
        });
    }

    let mut records = Vec::with_capacity(config.methods.len() * a_count * h_count * surviving.len());
    let mut mise = Vec::with_capacity(config.methods.len() * a_count * h_count);
    for (m_idx, &method) in config.methods.iter().enumerate() {
        for (a_idx, &alpha) in config.alpha_levels.iter().enumerate() {
            for (h_idx, &h) in config.bandwidth_grid.iter().enumerate() {
                let mut sum = 0.0;
                for &rep in &surviving {
                    let value = *reps[rep].cells[cell_index(m_idx, a_idx, h_idx)]
                        .as_ref()
                        .expect("surviving replications have no failed cells");
                    records.push(BenchRecord {
                        method,
                        alpha,
                        h,
                        rep,
                        ise: value,
                    });
                    sum += value;
                }
                mise.push(MiseCell {
                    method,
                    alpha,
                    h,
                    mise: sum / surviving.len() as f64,
                    replications: surviving.len(),
                });
            }
        }
    }

    let mise_at = |method: Method, a_idx: usize, h_idx: usize| -> f64 {
        let m_idx = config.methods.iter().position(|&m| m == method).unwrap();
        mise[cell_index(m_idx, a_idx, h_idx)].mise
    };
    let argmin_h = |method: Method, a_idx: usize| -> usize {
        (0..h_count)
            .min_by(|&a, &b| {
                mise_at(method, a_idx, a)
                    .partial_cmp(&mise_at(method, a_idx, b))
                    .unwrap()
            })
            .unwrap()
    };

    let mut optimal = Vec::with_capacity(config.methods.len() * a_count);
    for &method in &config.methods {
        for (a_idx, &alpha) in config.alpha_levels.iter().enumerate() {
            let preferred = anchor_of(method);
            let anchor = if config.methods.contains(&preferred) {
                preferred
            } else {
                method
            };
            let h_idx = argmin_h(anchor, a_idx);
            optimal.push(OptimalCell {
                method,
                alpha,
                h: config.bandwidth_grid[h_idx],
                mise: mise_at(method, a_idx, h_idx),
                anchor,
            });
        }
    }

    let mut diffs = Vec::new();
    if config.methods.contains(&Method::Bf)
        && config.methods.contains(&Method::SbfGrid)
        && surviving.len() >= 2
    {
        let bf_idx = config.methods.iter().position(|&m| m == Method::Bf).unwrap();
        let sbf_idx = config
            .methods
            .iter()
            .position(|&m| m == Method::SbfGrid)
            .unwrap();
        for (a_idx, &alpha) in config.alpha_levels.iter().enumerate() {
            let h_bf = argmin_h(Method::Bf, a_idx);
            let h_sbf = argmin_h(Method::SbfGrid, a_idx);
            let series = |m_idx: usize, h_idx: usize| -> Vec<f64> {
                surviving
                    .iter()
                    .map(|&rep| {
                        *reps[rep].cells[cell_index(m_idx, a_idx, h_idx)]
                            .as_ref()
                            .expect("surviving replications have no failed cells")
                    })
                    .collect()
            };
            let (mean, se) = diff_se(&series(bf_idx, h_bf), &series(sbf_idx, h_sbf))?;
            diffs.push(DiffCell {
                alpha,
                h_bf: config.bandwidth_grid[h_bf],
                h_sbf: config.bandwidth_grid[h_sbf],
                mean,
                se,
            });
        }
    }

    let qq_values = surviving
        .iter()
        .filter_map(|&rep| reps[rep].qq)
        .collect();

    Ok(BenchReport {
        config: config.clone(),
        records,
        failures,
        failed_replications,
        mise,
        optimal,
        diffs,
        qq_values,
    })
}

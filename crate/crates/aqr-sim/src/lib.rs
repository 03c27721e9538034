//! Monte-Carlo accuracy study for the additive quantile estimators: a
//! synthetic heteroscedastic design with exactly known conditional
//! quantiles, replicated benchmark runs scored by integrated squared error,
//! paired-difference and Q-Q summary statistics, and a first-order variance
//! diagnostic.
//!
//! The pieces separate cleanly:
//!
//! * [`model`] — the data-generating process and its closed-form oracles
//!   (true components, error densities, linearized pseudo-responses);
//! * [`bench`] — seeded, parallel replication runs producing a
//!   bit-reproducible [`BenchReport`];
//! * [`stats`] — paired ISE differences and normal Q-Q data;
//! * [`variance`] — the asymptotic pointwise variance of a component
//!   estimate at interior coordinates.

pub mod bench;
pub mod model;
pub mod stats;
pub mod variance;

pub use bench::{
    ise, replication_rng, run_benchmark, BenchConfig, BenchRecord, BenchReport, DiffCell,
    FailureRecord, MiseCell, OptimalCell, QqRequest,
};
pub use model::{
    gen_covariates, gen_response, oracle_weights, pseudo_responses, response_from_latents,
    true_components, SimError, SimModel, TrueComponents,
};
pub use stats::{diff_se, pearson, qq_data};
pub use variance::asymptotic_variance;

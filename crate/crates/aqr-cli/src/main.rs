//! Command-line front end for the additive quantile toolkit.
//!
//! `fit` estimates an additive quantile model from a CSV file (response
//! first, covariates after) and writes the fit as JSON plus a plot-ready
//! per-component curve CSV.  `simulate` draws a sample from the synthetic
//! benchmark model so fits can be exercised end to end.  The remaining
//! commands wrap the replicated benchmark: `table1` (accuracy per method
//! and level), `table2` (paired ordinary-vs-smooth differences), `qq`
//! (normality diagnostics for one fitted value), and `bandwidth-sweep`
//! (MISE against bandwidth).  All benchmark outputs are byte-reproducible
//! from the seed, which comes from `--seed`, then the `AQR_SEED`
//! environment variable, then a fixed default.

use std::error::Error;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use aqr_core::{fit_bf, fit_sbf_grid, fit_sbf_pseudo, Dataset, FitConfig, Interval, Method};
use aqr_sim::{
    gen_covariates, gen_response, qq_data, run_benchmark, BenchConfig, BenchReport, QqRequest,
    SimModel,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

const DEFAULT_SEED: u64 = 17;

#[derive(Parser)]
#[command(
    name = "aqr",
    about = "Additive quantile regression: fitting, simulation, and accuracy benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit an additive quantile model to a CSV file (columns: y, x1..xd).
    Fit(FitArgs),
    /// Draw a sample from the synthetic benchmark model and write it as CSV.
    Simulate(SimulateArgs),
    /// Replicated accuracy benchmark: MISE per method, level, and bandwidth.
    Table1(BenchArgs),
    /// Paired ordinary-vs-smooth ISE differences with standard errors.
    Table2(BenchArgs),
    /// Normal Q-Q data for one replicated fitted value.
    Qq(QqArgs),
    /// MISE against bandwidth, with the empirical optimum flagged.
    BandwidthSweep(BenchArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV with a header row; first column is the response.
    #[arg(long)]
    input: PathBuf,
    /// Quantile level.
    #[arg(long)]
    alpha: f64,
    /// Bandwidths, one per covariate or a single value for all.
    #[arg(long = "h", value_delimiter = ',', default_values_t = [0.5])]
    bandwidths: Vec<f64>,
    /// Estimator: BF, SBF_grid, or SBF_pseudo (default picks by dimension).
    #[arg(long)]
    method: Option<String>,
    /// Covariate intervals as `a:b[,a:b...]`, one per covariate or a single
    /// pair for all; defaults to each column's observed range.
    #[arg(long, allow_hyphen_values = true)]
    intervals: Option<String>,
    /// Grid points per coordinate.
    #[arg(long = "grid-size", default_value_t = 41)]
    grid_size: usize,
    /// Pseudo-observation count for SBF_pseudo.
    #[arg(long = "pseudo-j", default_value_t = 10)]
    pseudo_j: usize,
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
    /// Basename for the output files.
    #[arg(long, default_value = "fit")]
    prefix: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long)]
    correlated: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(long, default_value = "simulated.csv")]
    output: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Quantile levels.
    #[arg(long = "alpha", value_delimiter = ',', default_values_t = [0.2, 0.5, 0.8])]
    alpha: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    reps: usize,
    /// Bandwidth grid.
    #[arg(long = "h-grid", value_delimiter = ',', default_values_t = [0.3, 0.4, 0.5, 0.6, 0.7])]
    h_grid: Vec<f64>,
    /// Correlate the covariates (off-diagonal 0.9 before truncation).
    #[arg(long)]
    correlated: bool,
    /// Estimators to run (BF, SBF_grid, SBF_pseudo, BF_star, SBF_star).
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluation points per replication for the ISE integral.
    #[arg(long = "eval-points", default_value_t = 5000)]
    eval_points: usize,
    /// Worker threads for replications (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct QqArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 200)]
    reps: usize,
    #[arg(long, default_value_t = 0.5)]
    h: f64,
    #[arg(long)]
    correlated: bool,
    /// Estimator whose fitted value is tracked.
    #[arg(long, default_value = "SBF_grid")]
    method: String,
    /// Component number (1-based, matching x1..x3).
    #[arg(long, default_value_t = 2)]
    component: usize,
    /// Coordinate at which the component is read.
    #[arg(long, default_value_t = 0.0)]
    x: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluation points per replication (the ISE side product).
    #[arg(long = "eval-points", default_value_t = 500)]
    eval_points: usize,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
}

/// What a benchmark invocation resolved to, echoed into summary files.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    out_dir: PathBuf,
    seed: u64,
    config: BenchConfig,
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}

fn run() -> Result<(), Box<dyn Error>> {
    match Cli::parse().command {
        Command::Fit(args) => cmd_fit(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Table1(args) => cmd_table1(args),
        Command::Table2(args) => cmd_table2(args),
        Command::Qq(args) => cmd_qq(args),
        Command::BandwidthSweep(args) => cmd_bandwidth_sweep(args),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Box<dyn Error>> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("AQR_SEED") {
        Ok(raw) => raw
            .parse()
            .map_err(|_| format!("AQR_SEED is not a 64-bit integer: {raw:?}").into()),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn configure_jobs(jobs: Option<usize>) -> Result<(), Box<dyn Error>> {
    if let Some(threads) = jobs {
        if threads == 0 {
            return Err("--jobs must be positive".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| format!("thread pool: {e}"))?;
    }
    Ok(())
}

fn parse_methods(raw: &Option<Vec<String>>, default: &[Method]) -> Result<Vec<Method>, Box<dyn Error>> {
    let Some(names) = raw else {
        return Ok(default.to_vec());
    };
    let mut methods = Vec::with_capacity(names.len());
    for name in names {
        let method = Method::parse(name).ok_or_else(|| {
            format!("unknown method {name:?} (expected BF, SBF_grid, SBF_pseudo, BF_star, SBF_star)")
        })?;
        if !methods.contains(&method) {
            methods.push(method);
        }
    }
    Ok(methods)
}

fn open_output(dir: &Path, name: &str) -> Result<BufWriter<File>, Box<dyn Error>> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).map_err(|e| {
        format!("cannot write {}: {e}", path.display())
    })?))
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

/// A parsed input table: response plus covariate columns.
struct InputTable {
    y: Vec<f64>,
    columns: Vec<Vec<f64>>,
}

fn read_table(path: &Path) -> Result<InputTable, Box<dyn Error>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let width = reader.headers()?.len();
    if width < 2 {
        return Err(format!(
            "{} has {width} column(s); need a response and at least one covariate",
            path.display()
        )
        .into());
    }
    let mut y = Vec::new();
    let mut columns = vec![Vec::new(); width - 1];
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != width {
            return Err(format!(
                "row {}: expected {width} fields, found {}",
                row + 2,
                record.len()
            )
            .into());
        }
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| {
                format!(
                    "row {} column {}: not a number: {field:?}",
                    row + 2,
                    col + 1
                )
            })?;
            if col == 0 {
                y.push(value);
            } else {
                columns[col - 1].push(value);
            }
        }
    }
    if y.is_empty() {
        return Err(format!("{} contains no data rows", path.display()).into());
    }
    Ok(InputTable { y, columns })
}

fn parse_intervals(raw: &str, d: usize) -> Result<Vec<Interval>, Box<dyn Error>> {
    let pairs: Vec<&str> = raw.split(',').collect();
    if pairs.len() != 1 && pairs.len() != d {
        return Err(format!(
            "--intervals needs 1 or {d} `a:b` pairs, got {}",
            pairs.len()
        )
        .into());
    }
    let mut parsed = Vec::with_capacity(pairs.len());
    for pair in &pairs {
        let (a, b) = pair
            .split_once(':')
            .ok_or_else(|| format!("interval {pair:?} is not of the form a:b"))?;
        let a: f64 = a.trim().parse().map_err(|_| format!("bad endpoint in {pair:?}"))?;
        let b: f64 = b.trim().parse().map_err(|_| format!("bad endpoint in {pair:?}"))?;
        parsed.push(Interval::new(a, b)?);
    }
    if parsed.len() == 1 {
        return Ok(vec![parsed[0]; d]);
    }
    Ok(parsed)
}

fn inferred_intervals(columns: &[Vec<f64>]) -> Result<Vec<Interval>, Box<dyn Error>> {
    columns
        .iter()
        .enumerate()
        .map(|(j, col)| {
            let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if !(lo < hi) {
                return Err(format!(
                    "covariate x{} is constant; its interval must be given via --intervals",
                    j + 1
                )
                .into());
            }
            Ok(Interval::new(lo, hi)?)
        })
        .collect()
}

fn cmd_fit(args: FitArgs) -> Result<(), Box<dyn Error>> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(format!("--alpha must lie strictly between 0 and 1, got {}", args.alpha).into());
    }
    let table = read_table(&args.input)?;
    let d = table.columns.len();

    let method = match &args.method {
        Some(name) => match Method::parse(name) {
            Some(Method::BfStar) | Some(Method::SbfStar) => {
                return Err(format!(
                    "{name} fits pseudo-responses with oracle weights; it is available in the \
                     benchmark commands, not for raw CSV data"
                )
                .into());
            }
            Some(m) => m,
            None => {
                return Err(format!(
                    "unknown method {name:?} (expected BF, SBF_grid, or SBF_pseudo)"
                )
                .into());
            }
        },
        None if d <= 3 => Method::SbfGrid,
        None => Method::SbfPseudo,
    };

    let bandwidths = if args.bandwidths.len() == 1 {
        vec![args.bandwidths[0]; d]
    } else if args.bandwidths.len() == d {
        args.bandwidths.clone()
    } else {
        return Err(format!(
            "--h needs 1 or {d} values, got {}",
            args.bandwidths.len()
        )
        .into());
    };

    let intervals = match &args.intervals {
        Some(raw) => parse_intervals(raw, d)?,
        None => inferred_intervals(&table.columns)?,
    };

    let config = FitConfig {
        grid_size: args.grid_size,
        pseudo_j: args.pseudo_j,
        ..FitConfig::default()
    };
    let data = Dataset::new(table.y, table.columns, intervals)?;
    let fit = match method {
        Method::Bf => fit_bf(&data, args.alpha, &bandwidths, &config)?,
        Method::SbfGrid => fit_sbf_grid(&data, args.alpha, &bandwidths, &config)?,
        Method::SbfPseudo => fit_sbf_pseudo(&data, args.alpha, &bandwidths, &config)?,
        Method::BfStar | Method::SbfStar => unreachable!("rejected above"),
    };

    let mut json = open_output(&args.out_dir, &format!("{}.json", args.prefix))?;
    serde_json::to_writer_pretty(&mut json, &fit)?;
    json.write_all(b"\n")?;
    json.flush()?;

    let mut curves = csv::Writer::from_writer(open_output(
        &args.out_dir,
        &format!("{}_curves.csv", args.prefix),
    )?);
    curves.write_record(["component", "x", "value"])?;
    for j in 0..fit.d() {
        for (g, &x) in fit.grids[j].points().iter().enumerate() {
            curves.write_record([
                (j + 1).to_string(),
                format_float(x),
                format_float(fit.components[j][g]),
            ])?;
        }
    }
    curves.flush()?;

    println!(
        "method={} d={} n={} converged={} cycles={} m0={}",
        fit.method.as_str(),
        fit.d(),
        data.n(),
        fit.converged,
        fit.iterations_run,
        format_float(fit.m0)
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn cmd_simulate(args: SimulateArgs) -> Result<(), Box<dyn Error>> {
    let seed = resolve_seed(args.seed)?;
    let model = SimModel::new(args.correlated);
    let mut rng = aqr_sim::replication_rng(seed, 0);
    let x = gen_covariates(args.n, args.correlated, &mut rng);
    let (y, _) = gen_response(&x, &mut rng, &model);

    if let Some(dir) = args.output.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut writer = csv::Writer::from_path(&args.output)
        .map_err(|e| format!("cannot write {}: {e}", args.output.display()))?;
    writer.write_record(["y", "x1", "x2", "x3"])?;
    for (yi, xi) in y.iter().zip(&x) {
        writer.write_record([
            format_float(*yi),
            format_float(xi[0]),
            format_float(xi[1]),
            format_float(xi[2]),
        ])?;
    }
    writer.flush()?;
    println!("wrote {} rows to {}", args.n, args.output.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// benchmark commands
// ---------------------------------------------------------------------------

fn bench_config(
    args: &BenchArgs,
    default_methods: &[Method],
    qq: Option<QqRequest>,
) -> Result<(BenchConfig, u64), Box<dyn Error>> {
    let seed = resolve_seed(args.seed)?;
    let config = BenchConfig {
        n: args.n,
        alpha_levels: args.alpha.clone(),
        replications: args.reps,
        bandwidth_grid: args.h_grid.clone(),
        methods: parse_methods(&args.methods, default_methods)?,
        seed,
        eval_points: args.eval_points,
        model: SimModel::new(args.correlated),
        fit: FitConfig::default(),
        qq,
    };
    Ok((config, seed))
}

fn write_records_csv(
    dir: &Path,
    name: &str,
    report: &BenchReport,
) -> Result<(), Box<dyn Error>> {
    let mut writer = csv::Writer::from_writer(open_output(dir, name)?);
    for record in &report.records {
        writer.serialize(record)?;
    }
    writer.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), Box<dyn Error>> {
    let mut out = open_output(dir, name)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn format_float(v: f64) -> String {
    let mut s = String::new();
    write!(s, "{v}").expect("formatting a float");
    s
}

fn cmd_table1(args: BenchArgs) -> Result<(), Box<dyn Error>> {
    configure_jobs(args.jobs)?;
    let (config, seed) = bench_config(
        &args,
        &[Method::Bf, Method::SbfGrid, Method::BfStar, Method::SbfStar],
        None,
    )?;
    let report = run_benchmark(&config)?;
    write_records_csv(&args.out_dir, "table1_records.csv", &report)?;

    #[derive(Serialize)]
    struct Summary<'a> {
        manifest: RunManifest,
        n: usize,
        correlated: bool,
        /// Optimal-bandwidth MISE per method and level (the table's cells).
        cells: &'a [aqr_sim::OptimalCell],
        /// The full MISE grid the optimum was read from.
        by_bandwidth: &'a [aqr_sim::MiseCell],
        failed_replications: usize,
    }
    write_json(
        &args.out_dir,
        "table1_summary.json",
        &Summary {
            manifest: RunManifest {
                command: "table1".into(),
                out_dir: args.out_dir.clone(),
                seed,
                config: config.clone(),
            },
            n: config.n,
            correlated: config.model.correlated,
            cells: &report.optimal,
            by_bandwidth: &report.mise,
            failed_replications: report.failed_replications,
        },
    )?;

    for cell in &report.optimal {
        println!(
            "{} alpha={} h={} mise={}",
            cell.method.as_str(),
            cell.alpha,
            cell.h,
            format_float(cell.mise)
        );
    }
    Ok(())
}

fn cmd_table2(args: BenchArgs) -> Result<(), Box<dyn Error>> {
    configure_jobs(args.jobs)?;
    let (config, seed) = bench_config(&args, &[Method::Bf, Method::SbfGrid], None)?;
    if !(config.methods.contains(&Method::Bf) && config.methods.contains(&Method::SbfGrid)) {
        return Err("table2 needs both BF and SBF_grid among --methods".into());
    }
    let report = run_benchmark(&config)?;
    write_records_csv(&args.out_dir, "table2_records.csv", &report)?;

    #[derive(Serialize)]
    struct Summary<'a> {
        manifest: RunManifest,
        n: usize,
        correlated: bool,
        diffs: &'a [aqr_sim::DiffCell],
        failed_replications: usize,
    }
    write_json(
        &args.out_dir,
        "table2_summary.json",
        &Summary {
            manifest: RunManifest {
                command: "table2".into(),
                out_dir: args.out_dir.clone(),
                seed,
                config: config.clone(),
            },
            n: config.n,
            correlated: config.model.correlated,
            diffs: &report.diffs,
            failed_replications: report.failed_replications,
        },
    )?;

    for diff in &report.diffs {
        println!(
            "alpha={} diff={} se={}",
            diff.alpha,
            format_float(diff.mean),
            format_float(diff.se)
        );
    }
    Ok(())
}

fn cmd_qq(args: QqArgs) -> Result<(), Box<dyn Error>> {
    configure_jobs(args.jobs)?;
    let method = Method::parse(&args.method)
        .ok_or_else(|| format!("unknown method {:?}", args.method))?;
    if !(1..=3).contains(&args.component) {
        return Err(format!("--component must be 1, 2, or 3, got {}", args.component).into());
    }
    let seed = resolve_seed(args.seed)?;
    let config = BenchConfig {
        n: args.n,
        alpha_levels: vec![args.alpha],
        replications: args.reps,
        bandwidth_grid: vec![args.h],
        methods: vec![method],
        seed,
        eval_points: args.eval_points,
        model: SimModel::new(args.correlated),
        fit: FitConfig::default(),
        qq: Some(QqRequest {
            method,
            alpha_index: 0,
            h_index: 0,
            component: args.component - 1,
            x: args.x,
        }),
    };
    let report = run_benchmark(&config)?;
    let pairs = qq_data(&report.qq_values)?;

    let mut writer = csv::Writer::from_writer(open_output(&args.out_dir, "qq_pairs.csv")?);
    writer.write_record(["theoretical", "sample"])?;
    for (t, s) in &pairs {
        writer.write_record([format_float(*t), format_float(*s)])?;
    }
    writer.flush()?;

    let correlation = aqr_sim::pearson(
        &pairs.iter().map(|p| p.0).collect::<Vec<_>>(),
        &pairs.iter().map(|p| p.1).collect::<Vec<_>>(),
    )?;
    println!(
        "qq pairs={} correlation={}",
        pairs.len(),
        format_float(correlation)
    );
    Ok(())
}

fn cmd_bandwidth_sweep(args: BenchArgs) -> Result<(), Box<dyn Error>> {
    configure_jobs(args.jobs)?;
    let (config, _) = bench_config(&args, &[Method::Bf, Method::SbfGrid], None)?;
    let report = run_benchmark(&config)?;

    let mut writer = csv::Writer::from_writer(open_output(&args.out_dir, "bandwidth_sweep.csv")?);
    writer.write_record(["method", "alpha", "h", "mise", "optimal"])?;
    for cell in &report.mise {
        let optimal = report
            .optimal
            .iter()
            .any(|o| o.method == cell.method && o.alpha == cell.alpha && o.h == cell.h);
        writer.write_record([
            cell.method.as_str().to_string(),
            format_float(cell.alpha),
            format_float(cell.h),
            format_float(cell.mise),
            optimal.to_string(),
        ])?;
    }
    writer.flush()?;

    for cell in &report.optimal {
        if cell.anchor == cell.method {
            println!(
                "{} alpha={}: optimal h={} (mise={})",
                cell.method.as_str(),
                cell.alpha,
                cell.h,
                format_float(cell.mise)
            );
        }
    }
    Ok(())
}

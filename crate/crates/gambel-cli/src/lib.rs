//! Command-line surface for the `gambel` library.
//!
//! CSV output always has a header row and LF line endings; floats are written
//! in shortest round-trip form, so outputs are bit-stable for a given seed.

pub mod io;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gambel::analysis::*;
use gambel::distributions::*;
use gambel::harness::{run_study, standard_priors, StudyConfig, StudyDesign, StudyResult};
use gambel::samplers::{chain_diagnostics, fit, Algorithm, ChainDraws, McmcConfig, PriorSpec, RegressionData};
use gambel::ErrorKind;
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::io::{csv_writer, output, parse_grid, read_matrix, write_json, write_pairs};

/// Seed used by every randomized command when --seed is omitted.
pub const DEFAULT_SEED: u64 = 20_190_101;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] gambel::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) => match e.kind() {
                ErrorKind::Usage => 2,
                ErrorKind::Numerical => 3,
                ErrorKind::Sampler => 4,
            },
            _ => 2,
        }
    }
}

type Res<T> = Result<T, CliError>;

/// Caps the global rayon pool at GAMBEL_THREADS when set.
pub fn init_threads() -> Res<()> {
    if let Ok(v) = std::env::var("GAMBEL_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::Usage(format!("GAMBEL_THREADS must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

#[derive(Debug, Parser)]
#[command(name = "gambel", version, about = "Gambel shrinkage priors: distribution calculus, diagnostics, Gibbs fits and studies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density, cdf, quantiles, moments and draws
    Dist {
        #[command(subcommand)]
        action: DistAction,
    },
    /// Shrinkage diagnostics
    Analyze {
        #[command(subcommand)]
        action: AnalyzeAction,
    },
    /// Fit a sparse linear regression by Gibbs sampling
    Fit(FitArgs),
    /// Run a simulation study
    Simulate {
        #[command(subcommand)]
        study: SimulateAction,
    },
}

/// Gambel parameters, given either one by one or as a prior string.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub xi: Option<f64>,
    /// horseshoe | gambel:q,a,b,xi | laplace:rate | sns:var,alpha,beta
    #[arg(long)]
    pub prior: Option<String>,
}

impl ParamArgs {
    pub fn prior_spec(&self) -> Res<PriorSpec> {
        match (&self.prior, self.q, self.a, self.b, self.xi) {
            (Some(s), None, None, None, None) => Ok(s.parse()?),
            (None, Some(q), Some(a), Some(b), Some(xi)) => Ok(PriorSpec::Gambel(GambelParams::new(q, a, b, xi)?)),
            (Some(_), ..) => Err(CliError::Usage("give either --prior or --q/--a/--b/--xi, not both".into())),
            _ => Err(CliError::Usage("parameters needed: --q, --a, --b and --xi (or --prior)".into())),
        }
    }

    pub fn gambel(&self) -> Res<GambelParams> {
        match self.prior_spec()? {
            PriorSpec::Gambel(p) => Ok(p),
            other => Err(CliError::Usage(format!("this command needs a Gambel prior, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output file (stdout if omitted)
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum DistAction {
    /// Density on a grid
    Pdf {
        #[command(flatten)]
        params: ParamArgs,
        /// start:stop:step or comma list
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Density of |θ| instead of θ
        #[arg(long)]
        folded: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Distribution function on a grid
    Cdf {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        folded: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Quantiles of |θ|
    Quantile {
        #[command(flatten)]
        params: ParamArgs,
        /// Probabilities in (0,1)
        #[arg(long)]
        pgrid: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Raw moments E|θ|^k as JSON
    Moments {
        #[command(flatten)]
        params: ParamArgs,
        /// One order or a comma list
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Random draws
    Sample {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, short)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        folded: bool,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeAction {
    /// Hazard rate of |θ| on a positive grid
    Hazard {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        grid: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Lorenz curve of |θ|
    Lorenz {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "0.01:0.99:0.01")]
        pgrid: String,
        /// Truncation bound used when the mean does not exist
        #[arg(long)]
        truncation: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Gini index of |θ| as JSON
    Gini {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        truncation: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Point of maximum curvature and the prior mass inside it, as JSON
    Pmcurv {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = PMCURV_LOWER)]
        lower: f64,
        #[arg(long, default_value_t = PMCURV_UPPER)]
        upper: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Posterior mean E[θ | y] in the normal means model with unit noise
    Profile {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true, default_value = "-10:10:0.1")]
        grid: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Fitted log-log tail slope as JSON
    Tail {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Auto,
    LowDim,
    HighDim,
}

#[derive(Debug, Clone, Args)]
pub struct McmcArgs {
    #[arg(long, default_value_t = 5000)]
    pub iters: usize,
    /// Defaults to 30% of --iters
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    #[arg(long, default_value_t = 3)]
    pub chains: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

impl McmcArgs {
    fn config(&self) -> McmcConfig {
        McmcConfig {
            n_iter: self.iters,
            burn_in: self.burn_in.unwrap_or(self.iters * 3 / 10),
            thin: self.thin,
            n_chains: self.chains,
            seed: self.seed,
            ..McmcConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Design matrix CSV (n rows, p columns, optional header)
    #[arg(long)]
    pub x: PathBuf,
    /// Response CSV, one column
    #[arg(long)]
    pub y: PathBuf,
    #[arg(long, default_value = "horseshoe")]
    pub prior: String,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Auto)]
    pub algorithm: AlgorithmArg,
    /// Hold σ² fixed at this value
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[command(flatten)]
    pub mcmc: McmcArgs,
    /// Draws CSV (stdout if omitted)
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Summary JSON (stderr if omitted)
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct StudyArgs {
    #[arg(long, default_value_t = 20)]
    pub replicates: usize,
    #[command(flatten)]
    pub mcmc: McmcArgs,
    /// Prior to compare; repeat for several (default: the five standard priors)
    #[arg(long = "prior")]
    pub priors: Vec<String>,
    /// Median table CSV (stdout if omitted)
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Per-replicate detail JSON
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SimulateAction {
    /// Sparse regression designs 1 to 6
    Study1 {
        #[arg(long)]
        config: u8,
        #[command(flatten)]
        args: StudyArgs,
    },
    /// Normal means with a Student-t / zero mixture of effects
    Study2 {
        #[arg(long)]
        w: f64,
        #[arg(long)]
        nu: f64,
        #[command(flatten)]
        args: StudyArgs,
    },
}

pub fn run(cli: Cli) -> Res<()> {
    match cli.command {
        Command::Dist { action } => dist(action),
        Command::Analyze { action } => analyze(action),
        Command::Fit(args) => cmd_fit(&args),
        Command::Simulate { study } => simulate(study),
    }
}

fn eval_grid(grid: &[f64], mut f: impl FnMut(f64) -> gambel::Result<f64>) -> Res<Vec<f64>> {
    Ok(grid.iter().map(|&x| f(x)).collect::<gambel::Result<Vec<_>>>()?)
}

fn dist(action: DistAction) -> Res<()> {
    match action {
        DistAction::Pdf { params, grid, folded, out } => {
            let p = params.gambel()?;
            let xs = parse_grid(&grid)?;
            let ys = eval_grid(&xs, |x| gambel_pdf(&p, x, folded))?;
            write_pairs(out.out.as_deref(), ["x", "value"], &xs, &ys)
        }
        DistAction::Cdf { params, grid, folded, out } => {
            let p = params.gambel()?;
            let xs = parse_grid(&grid)?;
            let ys = if folded {
                eval_grid(&xs, |x| if x <= 0.0 { Ok(0.0) } else { gambel_cdf(&p, x) })?
            } else {
                eval_grid(&xs, |x| gambel_cdf_unfolded(&p, x))?
            };
            write_pairs(out.out.as_deref(), ["x", "value"], &xs, &ys)
        }
        DistAction::Quantile { params, pgrid, out } => {
            let p = params.gambel()?;
            let ps = parse_grid(&pgrid)?;
            let ys = eval_grid(&ps, |u| gambel_quantile(&p, u))?;
            write_pairs(out.out.as_deref(), ["p", "value"], &ps, &ys)
        }
        DistAction::Moments { params, k, out } => {
            let p = params.gambel()?;
            let mut items = Vec::with_capacity(k.len());
            for &order in &k {
                let value = match gambel_moment(&p, order) {
                    Ok(v) => json!(v),
                    Err(gambel::Error::MomentNonexistent { .. }) => json!("nonexistent"),
                    Err(e) => return Err(e.into()),
                };
                items.push(json!({ "k": order, "value": value }));
            }
            let doc = if items.len() == 1 { items.pop().unwrap() } else { json!(items) };
            write_json(out.out.as_deref(), &doc)
        }
        DistAction::Sample { params, n, seed, folded, out } => {
            let p = params.gambel()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let draws = gambel_sample(&p, &mut rng, n, folded)?;
            let idx: Vec<f64> = (1..=n).map(|i| i as f64).collect();
            write_pairs(out.out.as_deref(), ["index", "draw"], &idx, &draws)
        }
    }
}

fn analyze(action: AnalyzeAction) -> Res<()> {
    match action {
        AnalyzeAction::Hazard { params, grid, out } => {
            let p = params.gambel()?;
            let xs = parse_grid(&grid)?;
            let r = hazard_profile(&p, &xs)?;
            write_pairs(out.out.as_deref(), ["x", "value"], &r.grid, &r.rates)
        }
        AnalyzeAction::Lorenz { params, pgrid, truncation, out } => {
            let p = params.gambel()?;
            let ps = parse_grid(&pgrid)?;
            let r = lorenz_numeric(&p, &ps, truncation)?;
            write_pairs(out.out.as_deref(), ["p", "value"], &r.p_grid, &r.l_values)
        }
        AnalyzeAction::Gini { params, truncation, out } => {
            let p = params.gambel()?;
            let r = lorenz_numeric(&p, &[0.5], truncation)?;
            let trunc = if r.mean_finite { None } else { Some(r.truncation_bound) };
            write_json(out.out.as_deref(), &json!({ "gini": r.gini, "mean_finite": r.mean_finite, "truncation": trunc }))
        }
        AnalyzeAction::Pmcurv { params, lower, upper, out } => {
            let r = match params.prior_spec()? {
                PriorSpec::Gambel(p) => pm_curvature(&GambelCurvature::new(&p)?, lower, upper)?,
                PriorSpec::Laplace { rate } => pm_curvature(&LaplaceCurvature { rate }, lower, upper)?,
                PriorSpec::SpikeSlab { .. } => return Err(CliError::Usage("spike-and-slab prior has no curvature".into())),
            };
            write_json(out.out.as_deref(), &json!({ "pmcurv": r.pm_curv, "modal_mass": r.modal_mass }))
        }
        AnalyzeAction::Profile { params, grid, tol, out } => {
            let prior = params.prior_spec()?;
            let ys = parse_grid(&grid)?;
            let m = shrinkage_profile(&prior, &ys, tol)?;
            write_pairs(out.out.as_deref(), ["y", "value"], &ys, &m)
        }
        AnalyzeAction::Tail { params, out } => {
            let p = params.gambel()?;
            let s = tail_index_fit(&p)?;
            write_json(
                out.out.as_deref(),
                &json!({ "tail_index": s, "expected": -(p.a * p.q + 1.0), "singular_at_zero": p.singular_at_zero() }),
            )
        }
    }
}

/// Reads the design and response files into regression data.
pub fn load_data(x: &Path, y: &Path) -> Res<RegressionData> {
    let xm = read_matrix(x)?;
    let ym = read_matrix(y)?;
    if ym.ncols() != 1 {
        return Err(CliError::Usage(format!("{}: response must have one column, found {}", y.display(), ym.ncols())));
    }
    if ym.nrows() != xm.nrows() {
        return Err(CliError::Usage(format!("X has {} rows but y has {}", xm.nrows(), ym.nrows())));
    }
    let yv = DVector::from_iterator(ym.nrows(), ym.iter().copied());
    Ok(RegressionData::new(xm, yv, None)?)
}

fn write_draws(path: Option<&Path>, draws: &ChainDraws) -> Res<()> {
    let p = draws.p;
    let mut w = csv_writer(output(path)?);
    let mut header = vec!["chain".to_string(), "iter".to_string()];
    header.extend((1..=p).map(|j| format!("theta_{j}")));
    header.push("sigma2".into());
    w.write_record(&header)?;
    for chain in &draws.chains {
        for (r, iter) in chain.iters.iter().enumerate() {
            let mut rec = vec![chain.index.to_string(), iter.to_string()];
            rec.extend(chain.theta[r * p..(r + 1) * p].iter().map(|v| v.to_string()));
            rec.push(chain.sigma2[r].to_string());
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_fit(args: &FitArgs) -> Res<()> {
    let data = load_data(&args.x, &args.y)?;
    let prior: PriorSpec = args.prior.parse()?;
    let mut config = args.mcmc.config();
    config.algorithm = match args.algorithm {
        AlgorithmArg::Auto => Algorithm::Auto,
        AlgorithmArg::LowDim => Algorithm::LowDim,
        AlgorithmArg::HighDim => Algorithm::HighDim,
    };
    config.sigma2_fixed = args.sigma2;
    let draws = fit(&data, &prior, &config)?;
    write_draws(args.out.as_deref(), &draws)?;
    let params = chain_diagnostics(&draws)?;
    let mut summary = json!({
        "algorithm": draws.algorithm,
        "prior": prior.to_string(),
        "n": data.n(),
        "p": data.p(),
        "config": draws.config,
        "posterior_mean": draws.posterior_mean(),
        "params": params,
    });
    if matches!(prior, PriorSpec::SpikeSlab { .. }) {
        let total: usize = draws.chains.iter().map(|c| c.retained).sum();
        let incl: Vec<f64> = (0..draws.p)
            .map(|j| draws.chains.iter().map(|c| c.inclusion[j] * c.retained as f64).sum::<f64>() / total as f64)
            .collect();
        summary["inclusion"] = json!(incl);
    }
    match &args.summary {
        Some(path) => write_json(Some(path), &summary),
        None => {
            eprintln!("{summary}");
            Ok(())
        }
    }
}

fn simulate(action: SimulateAction) -> Res<()> {
    let (design, args) = match action {
        SimulateAction::Study1 { config, args } => (StudyDesign::Study1 { config_id: config }, args),
        SimulateAction::Study2 { w, nu, args } => (StudyDesign::Study2 { w, nu }, args),
    };
    let mut cfg = StudyConfig::desk(design, args.mcmc.seed);
    cfg.replicates = args.replicates;
    cfg.mcmc = McmcConfig { keep_draws: false, ..args.mcmc.config() };
    cfg.priors = if args.priors.is_empty() {
        standard_priors().into_iter().map(|(_, p)| p).collect()
    } else {
        args.priors.iter().map(|s| s.parse::<PriorSpec>()).collect::<gambel::Result<_>>()?
    };
    let result = run_study(&cfg)?;
    write_study_table(args.out.as_deref(), &result)?;
    if let Some(path) = &args.json {
        write_json(Some(path), &serde_json::to_value(&result)?)?;
    }
    Ok(())
}

fn write_study_table(path: Option<&Path>, result: &StudyResult) -> Res<()> {
    let mut w = csv_writer(output(path)?);
    w.write_record(["prior", "spec", "design", "median_loss", "failed"])?;
    for pl in &result.priors {
        w.write_record([
            pl.label.clone(),
            pl.prior.to_string(),
            result.config.design.label(),
            pl.median.to_string(),
            pl.errors.len().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

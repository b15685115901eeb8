//! Batch command-line interface: `fit`, `path`, `simulate`, `diagnose`.
//!
//! Exit codes: 0 success, 2 data/configuration errors, 3 non-convergence
//! (the model file is still written). All output files are written
//! atomically (temp file + rename).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::{Array1, Array2};
use serde::Deserialize;

use crate::datamodel::{
    standardize, FitConfig, Initializer, ModelJson, RegularizationPath, WeightScheme,
};
use crate::diagnostics::{dpd_initial_if, if_beta1, if_sigma, IfContext};
use crate::error::{Error, Result};
use crate::mmfit;
use crate::selection::{fit_path, Criterion, CvLoss, SelectionConfig};
use crate::simharness::{self, Contamination, Method, Setting, SimScenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA_ERROR: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dpd-lasso", version, about = "Robust sparse regression with density-power-divergence loss")]
pub struct CliInvocation {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads for path/simulation parallelism (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a single model at fixed gamma and lambda; writes model JSON.
    Fit(FitArgs),
    /// Fit a lambda path with HBIC or CV scoring; writes a path CSV.
    Path(PathArgs),
    /// Run a replication study from a scenario file; writes a report CSV.
    Simulate(SimulateArgs),
    /// Evaluate influence functions of a fitted model; writes an IF CSV.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightsFlag {
    Unit,
    Adaptive,
    Scad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitializerFlag {
    Huber,
    Ols,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionFlag {
    Hbic,
    Cv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CvLossFlag {
    Dpd,
    Trimmed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IfInitialFlag {
    Zero,
    Dpd,
}

#[derive(Debug, Args)]
pub struct CommonFitFlags {
    /// Robustness parameter; 0 is the least-squares limit.
    #[arg(long, default_value_t = 0.3)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value_t = WeightsFlag::Adaptive)]
    pub weights: WeightsFlag,
    /// SCAD shape parameter (requires --weights scad).
    #[arg(long, default_value_t = 3.7)]
    pub scad_a: f64,
    /// Decouple the SCAD threshold from the fit lambda.
    #[arg(long)]
    pub scad_lambda: Option<f64>,
    #[arg(long, value_enum, default_value_t = InitializerFlag::Huber)]
    pub initializer: InitializerFlag,
    /// Keep penalty weights anchored at the initial estimate.
    #[arg(long)]
    pub freeze_weights: bool,
}

impl CommonFitFlags {
    pub fn to_config(&self, lambda: f64) -> FitConfig {
        FitConfig {
            gamma: self.gamma,
            lambda,
            weight_scheme: match self.weights {
                WeightsFlag::Unit => WeightScheme::Unit,
                WeightsFlag::Adaptive => WeightScheme::HardThreshold,
                WeightsFlag::Scad => WeightScheme::Scad { a: self.scad_a },
            },
            scad_lambda: self.scad_lambda,
            initializer: match self.initializer {
                InitializerFlag::Huber => Initializer::HuberLassoIrls,
                InitializerFlag::Ols => Initializer::OlsLassoNonRobust,
            },
            freeze_weights: self.freeze_weights,
            ..FitConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Input CSV with a header row; all non-response columns are covariates.
    #[arg(long)]
    pub input: PathBuf,
    /// Name of the response column.
    #[arg(long)]
    pub response: String,
    /// Output model JSON path.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub lambda: f64,
    #[command(flatten)]
    pub flags: CommonFitFlags,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub response: String,
    /// Output CSV path (lambda, hbic, ms, sigma, converged).
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub flags: CommonFitFlags,
    #[arg(long, default_value_t = 50)]
    pub n_lambdas: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lambda_min_ratio: f64,
    #[arg(long, value_enum, default_value_t = CriterionFlag::Hbic)]
    pub criterion: CriterionFlag,
    #[arg(long, default_value_t = 5)]
    pub cv_folds: usize,
    #[arg(long, value_enum, default_value_t = CvLossFlag::Dpd)]
    pub cv_loss: CvLossFlag,
    #[arg(long, default_value_t = 0.1)]
    pub trim: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario file (TOML, flat keys; see the documented schema).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output report CSV.
    #[arg(long)]
    pub output: PathBuf,
    /// Comma-separated gamma values to sweep.
    #[arg(long, default_value = "0.3", value_delimiter = ',')]
    pub gamma: Vec<f64>,
    /// Comma-separated weight schemes to sweep.
    #[arg(long, default_value = "adaptive", value_delimiter = ',')]
    pub weights: Vec<WeightsFlag>,
    #[arg(long, default_value_t = 3.7)]
    pub scad_a: f64,
    #[arg(long, value_enum, default_value_t = InitializerFlag::Huber)]
    pub initializer: InitializerFlag,
    #[arg(long, default_value_t = 50)]
    pub n_lambdas: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lambda_min_ratio: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// Fitted-model JSON produced by `fit`.
    #[arg(long)]
    pub model: PathBuf,
    /// CSV the model was fitted on (used for the second-moment plug-in).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub response: String,
    /// Contamination response value.
    #[arg(long)]
    pub y_t: f64,
    /// Contamination covariate row, comma-separated, length p.
    #[arg(long, value_delimiter = ',')]
    pub x_t: Vec<f64>,
    #[arg(long, value_enum, default_value_t = IfInitialFlag::Dpd)]
    pub if_initial: IfInitialFlag,
    /// Output CSV (kind, index, value).
    #[arg(long)]
    pub output: PathBuf,
}

/// Reads a CSV with a header row, returning the response column and the
/// remaining numeric columns in header order.
pub fn read_csv(path: &Path, response: &str) -> Result<(Array1<f64>, Array2<f64>, Vec<String>)> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(|s| s.to_string()).collect();
    let y_col = headers
        .iter()
        .position(|h| h == response)
        .ok_or_else(|| Error::MissingResponseColumn(response.to_string()))?;
    let x_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != y_col)
        .map(|(_, h)| h.clone())
        .collect();

    let mut y = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let mut row = Vec::with_capacity(headers.len() - 1);
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::Scenario(format!(
                    "non-numeric value '{}' in column '{}'",
                    field, headers[j]
                ))
            })?;
            if j == y_col {
                y.push(v);
            } else {
                row.push(v);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Scenario("CSV has no data rows".into()));
    }
    let n = rows.len();
    let p = rows[0].len();
    let mut x = Array2::zeros((n, p));
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            x[[i, j]] = *v;
        }
    }
    Ok((Array1::from(y), x, x_names))
}

/// Writes bytes atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn path_csv(path: &RegularizationPath) -> String {
    let mut out = String::from("lambda,hbic,ms,sigma,converged\n");
    for (k, m) in path.models.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            path.lambdas[k],
            path.hbic[k],
            m.model_size(),
            m.sigma,
            m.converged
        ));
    }
    out
}

/// Scenario file schema (flat TOML keys).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default = "default_n")]
    n: usize,
    p: usize,
    #[serde(default = "default_setting")]
    setting: Setting,
    #[serde(default = "default_contamination")]
    contamination: String,
    #[serde(default = "default_fraction")]
    fraction: f64,
    #[serde(default = "default_outlier_mean")]
    outlier_mean: f64,
    #[serde(default = "default_outlier_sd")]
    outlier_sd: f64,
    #[serde(default = "default_n_cols")]
    n_cols: usize,
    #[serde(default)]
    random_cols: bool,
    #[serde(default = "default_sigma0")]
    sigma0: f64,
    #[serde(default = "default_rho")]
    rho: f64,
    #[serde(default = "default_replications")]
    replications: usize,
    #[serde(default)]
    seed: u64,
}

fn default_n() -> usize {
    100
}
fn default_setting() -> Setting {
    Setting::A
}
fn default_contamination() -> String {
    "none".into()
}
fn default_fraction() -> f64 {
    0.1
}
fn default_outlier_mean() -> f64 {
    20.0
}
fn default_outlier_sd() -> f64 {
    1.0
}
fn default_n_cols() -> usize {
    10
}
fn default_sigma0() -> f64 {
    0.5
}
fn default_rho() -> f64 {
    0.5
}
fn default_replications() -> usize {
    50
}

pub fn load_scenario(path: &Path) -> Result<SimScenario> {
    let text = std::fs::read_to_string(path)?;
    let file: ScenarioFile =
        toml::from_str(&text).map_err(|e| Error::Scenario(e.to_string()))?;
    let contamination = match file.contamination.as_str() {
        "none" => Contamination::None,
        "y_outliers" => Contamination::YOutliers {
            frac: file.fraction,
            mean: file.outlier_mean,
            sd: file.outlier_sd,
        },
        "x_outliers" => Contamination::XOutliers {
            frac: file.fraction,
            n_cols: file.n_cols,
            mean: file.outlier_mean,
            sd: file.outlier_sd,
            random_cols: file.random_cols,
        },
        other => {
            return Err(Error::Scenario(format!(
                "unknown contamination '{other}' (expected none | y_outliers | x_outliers)"
            )))
        }
    };
    Ok(SimScenario {
        n: file.n,
        p: file.p,
        setting: file.setting,
        contamination,
        sigma0: file.sigma0,
        rho: file.rho,
        n_replications: file.replications,
        seed: file.seed,
    })
}

pub fn cmd_fit(args: &FitArgs) -> Result<i32> {
    let (y, x, _) = read_csv(&args.input, &args.response)?;
    let ds = standardize(&y, &x)?;
    let cfg = args.flags.to_config(args.lambda);
    let model = mmfit::fit_auto(&ds, &cfg)?;
    let json = serde_json::to_string_pretty(&ModelJson::from(&model))?;
    write_atomic(&args.output, json.as_bytes())?;
    println!(
        "ms={} sigma={:.6} lambda={} gamma={} converged={}",
        model.model_size(),
        model.sigma,
        model.lambda,
        model.gamma,
        model.converged
    );
    Ok(if model.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

pub fn cmd_path(args: &PathArgs) -> Result<i32> {
    let (y, x, _) = read_csv(&args.input, &args.response)?;
    let ds = standardize(&y, &x)?;
    let cfg = args.flags.to_config(0.0);
    let sel = SelectionConfig {
        n_lambdas: args.n_lambdas,
        lambda_min_ratio: args.lambda_min_ratio,
        criterion: match args.criterion {
            CriterionFlag::Hbic => Criterion::Hbic,
            CriterionFlag::Cv => Criterion::KFoldCv {
                k: args.cv_folds,
                loss: match args.cv_loss {
                    CvLossFlag::Dpd => CvLoss::DpdLoss,
                    CvLossFlag::Trimmed => CvLoss::TrimmedSquaredError { trim: args.trim },
                },
            },
        },
        seed: args.seed,
    };
    let path = fit_path(&ds, &cfg, &sel)?;
    write_atomic(&args.output, path_csv(&path).as_bytes())?;
    let sel_model = path.selected();
    println!(
        "selected lambda={} ms={} sigma={:.6}",
        path.lambdas[path.selected_index],
        sel_model.model_size(),
        sel_model.sigma
    );
    Ok(EXIT_OK)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<i32> {
    let scenario = load_scenario(&args.scenario)?;
    let sel = SelectionConfig {
        n_lambdas: args.n_lambdas,
        lambda_min_ratio: args.lambda_min_ratio,
        criterion: Criterion::Hbic,
        seed: args.seed,
    };
    let mut methods: Vec<Method> = Vec::new();
    for &g in &args.gamma {
        for &w in &args.weights {
            let flags = CommonFitFlags {
                gamma: g,
                weights: w,
                scad_a: args.scad_a,
                scad_lambda: None,
                initializer: args.initializer,
                freeze_weights: false,
            };
            let name = format!(
                "gamma={g},weights={}",
                match w {
                    WeightsFlag::Unit => "unit",
                    WeightsFlag::Adaptive => "adaptive",
                    WeightsFlag::Scad => "scad",
                }
            );
            methods.push(simharness::method(&name, flags.to_config(0.0), sel.clone()));
        }
    }
    let report = simharness::run_study(&scenario, &methods)?;
    let mut buf = Vec::new();
    report.to_csv(&mut buf)?;
    write_atomic(&args.output, &buf)?;
    println!(
        "simulated {} replications x {} methods",
        report.n_replications,
        report.methods.len()
    );
    Ok(EXIT_OK)
}

pub fn cmd_diagnose(args: &DiagnoseArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&args.model)?;
    let model: ModelJson = serde_json::from_str(&text)?;
    let (_, x, _) = read_csv(&args.data, &args.response)?;
    let p = model.beta.len();
    if x.ncols() != p {
        return Err(Error::DimensionMismatch(format!(
            "data has {} covariates but the model has {p}",
            x.ncols()
        )));
    }
    if args.x_t.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "--x-t must have {p} entries, got {}",
            args.x_t.len()
        )));
    }
    let support0: Vec<usize> = model.support.iter().map(|j| j - 1).collect();
    let mut out = String::from("kind,index,value\n");

    if !support0.is_empty() {
        let s = support0.len();
        let beta_s = Array1::from_iter(support0.iter().map(|&j| model.beta[j]));
        let mut x_s = Array2::zeros((x.nrows(), s));
        for (k, &j) in support0.iter().enumerate() {
            for i in 0..x.nrows() {
                x_s[[i, k]] = x[[i, j]];
            }
        }
        let x_t_s = Array1::from_iter(support0.iter().map(|&j| args.x_t[j]));
        // Fold the intercept into the response so residuals match the
        // model's predictions.
        let y_eff = args.y_t - model.intercept;
        let mut ctx = IfContext::from_sample(beta_s, model.sigma, model.gamma, &x_s, None)?;
        if args.if_initial == IfInitialFlag::Dpd {
            ctx.if_initial = dpd_initial_if(&ctx, y_eff, &x_t_s)?;
        }
        let if_b = if_beta1(&ctx, y_eff, &x_t_s, model.lambda)?;
        for (k, &j) in support0.iter().enumerate() {
            out.push_str(&format!("beta,{},{}\n", j + 1, if_b[k]));
        }
        let if_s = if_sigma(model.sigma, model.gamma, y_eff, &x_t_s, &ctx.beta_true);
        out.push_str(&format!("sigma,,{if_s}\n"));
    } else {
        let if_s = if_sigma(
            model.sigma,
            model.gamma,
            args.y_t - model.intercept,
            &Array1::zeros(0),
            &Array1::zeros(0),
        );
        out.push_str(&format!("sigma,,{if_s}\n"));
    }
    write_atomic(&args.output, out.as_bytes())?;
    println!("wrote influence values for {} coordinates", support0.len());
    Ok(EXIT_OK)
}

/// Dispatches a parsed invocation; returns the process exit code.
pub fn run(cli: &CliInvocation) -> i32 {
    if let Some(t) = cli.threads {
        // Ignore failure: the global pool can only be set once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global();
    }
    let result = match &cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Path(a) => cmd_path(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Diagnose(a) => cmd_diagnose(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DATA_ERROR
        }
    }
}

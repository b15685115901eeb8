//! Core value types: datasets, fit configuration, fitted models and
//! regularization paths.
//!
//! All types are plain immutable values after construction; they can be
//! shared freely between threads.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A regression dataset: response `y` and design matrix `x` with the
/// standardization metadata needed to map coefficients back to the
/// original scale.
///
/// When `standardized` is true every column of `x` has sample mean 0 and
/// sample standard deviation 1, and `y` has mean 0 (`y` is centered, never
/// rescaled). Build standardized datasets with [`standardize`] and wrap
/// raw data with [`Dataset::raw`].
#[derive(Debug, Clone)]
pub struct Dataset {
    pub y: Array1<f64>,
    pub x: Array2<f64>,
    pub column_means: Array1<f64>,
    pub column_scales: Array1<f64>,
    pub y_mean: f64,
    pub standardized: bool,
}

impl Dataset {
    /// Wraps raw data without rescaling. Coefficients fitted on such a
    /// dataset are already on the original scale.
    pub fn raw(y: Array1<f64>, x: Array2<f64>) -> Result<Self> {
        check_finite(&y, &x)?;
        let p = x.ncols();
        Ok(Dataset {
            y,
            x,
            column_means: Array1::zeros(p),
            column_scales: Array1::ones(p),
            y_mean: 0.0,
            standardized: false,
        })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Residuals `y - x beta` for coefficients on this dataset's scale.
    pub fn residuals(&self, beta: &Array1<f64>) -> Array1<f64> {
        &self.y - &self.x.dot(beta)
    }
}

fn check_finite(y: &Array1<f64>, x: &Array2<f64>) -> Result<()> {
    if y.len() != x.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "len(y) = {} but X has {} rows",
            y.len(),
            x.nrows()
        )));
    }
    if x.nrows() < 2 || x.ncols() < 1 {
        return Err(Error::DimensionMismatch(format!(
            "need n >= 2 and p >= 1, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    Ok(())
}

/// Z-scores each column of `raw_x` (mean 0, sample standard deviation 1)
/// and centers `raw_y`, recording the means and scales so that
/// [`destandardize_coefficients`] can map results back exactly.
pub fn standardize(raw_y: &Array1<f64>, raw_x: &Array2<f64>) -> Result<Dataset> {
    check_finite(raw_y, raw_x)?;
    let n = raw_x.nrows();
    let p = raw_x.ncols();
    let nf = n as f64;

    let mut means = Array1::zeros(p);
    let mut scales = Array1::zeros(p);
    let mut x = raw_x.clone();
    for j in 0..p {
        let col = raw_x.column(j);
        let mean = col.sum() / nf;
        // Sample standard deviation (n - 1 denominator).
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
        let scale = var.sqrt();
        if scale <= 0.0 {
            return Err(Error::ConstantColumn(j));
        }
        means[j] = mean;
        scales[j] = scale;
        for i in 0..n {
            x[[i, j]] = (raw_x[[i, j]] - mean) / scale;
        }
    }

    let y_mean = raw_y.sum() / nf;
    let y = raw_y.mapv(|v| v - y_mean);

    Ok(Dataset {
        y,
        x,
        column_means: means,
        column_scales: scales,
        y_mean,
        standardized: true,
    })
}

/// Maps standardized-scale coefficients back to the original data scale.
///
/// Returns `(beta_raw, intercept)` with `beta_raw[j] = beta_std[j] / scale_j`
/// and `intercept = y_mean - sum_j beta_raw[j] * mean_j`, so predictions on
/// the raw design equal predictions on the standardized one.
pub fn destandardize_coefficients(
    beta_std: &Array1<f64>,
    ds: &Dataset,
) -> Result<(Array1<f64>, f64)> {
    if beta_std.len() != ds.p() {
        return Err(Error::DimensionMismatch(format!(
            "beta has length {} but dataset has p = {}",
            beta_std.len(),
            ds.p()
        )));
    }
    let beta_raw: Array1<f64> = beta_std
        .iter()
        .zip(ds.column_scales.iter())
        .map(|(b, s)| b / s)
        .collect();
    let intercept = ds.y_mean
        - beta_raw
            .iter()
            .zip(ds.column_means.iter())
            .map(|(b, m)| b * m)
            .sum::<f64>();
    Ok((beta_raw, intercept))
}

/// Penalty weight function applied to an initial coefficient estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WeightScheme {
    /// `w = 1` everywhere: the plain (non-adaptive) L1 penalty.
    Unit,
    /// `w = 1/|b|` with coordinates at zero excluded from the model.
    HardThreshold,
    /// SCAD-derivative weights; `a` must exceed 2 (3.7 is the usual choice).
    Scad { a: f64 },
}

impl Default for WeightScheme {
    fn default() -> Self {
        WeightScheme::HardThreshold
    }
}

/// How the robust starting point of a fit is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Initializer {
    /// Caller supplies coefficients and a scale directly.
    ProvidedCoefficients { beta: Vec<f64>, sigma: f64 },
    /// Huber-weighted iteratively reweighted least squares with a light
    /// L1 penalty; the default robust choice.
    HuberLassoIrls,
    /// Plain LASSO plus residual standard deviation. Not robust; intended
    /// for clean-data benchmarking.
    OlsLassoNonRobust,
}

/// Tuning parameters for a single fit.
#[derive(Debug, Clone)]
pub struct FitConfig {
    /// Robustness parameter; 0 recovers the least-squares limit.
    pub gamma: f64,
    /// Regularization strength in the penalized-loss convention
    /// (loss carries a 1/n; see the solver documentation for the bridge
    /// to the subproblem scale).
    pub lambda: f64,
    pub weight_scheme: WeightScheme,
    /// SCAD internal threshold; `None` ties it to the current `lambda`.
    pub scad_lambda: Option<f64>,
    pub initializer: Initializer,
    /// Stop when the objective changes by less than this between outer
    /// iterations.
    pub epsilon_outer: f64,
    /// Coordinate-descent stopping tolerance (maximum KKT violation).
    pub epsilon_inner: f64,
    pub max_outer_iter: usize,
    pub max_inner_iter: usize,
    /// Coefficients below this magnitude (standardized scale) are treated
    /// as zero when reporting the support.
    pub support_threshold: f64,
    /// Keep the adaptive-weight anchor fixed at the initial estimate
    /// instead of refreshing it each outer iteration.
    pub freeze_weights: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            gamma: 0.3,
            lambda: 0.1,
            weight_scheme: WeightScheme::default(),
            scad_lambda: None,
            initializer: Initializer::HuberLassoIrls,
            epsilon_outer: 1e-6,
            epsilon_inner: 1e-8,
            max_outer_iter: 100,
            max_inner_iter: 1000,
            support_threshold: 1e-8,
            freeze_weights: false,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gamma < 0.0 || !self.gamma.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "gamma must be finite and >= 0, got {}",
                self.gamma
            )));
        }
        if self.lambda < 0.0 || !self.lambda.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "lambda must be finite and >= 0, got {}",
                self.lambda
            )));
        }
        if let WeightScheme::Scad { a } = self.weight_scheme {
            if a <= 2.0 {
                return Err(Error::InvalidConfig(format!(
                    "SCAD requires a > 2, got {a}"
                )));
            }
        }
        if self.epsilon_outer <= 0.0 || self.epsilon_inner <= 0.0 || self.support_threshold <= 0.0
        {
            return Err(Error::InvalidConfig(
                "tolerances must be strictly positive".into(),
            ));
        }
        Ok(())
    }
}

/// Result of a single fit at fixed `(gamma, lambda)`.
#[derive(Debug, Clone)]
pub struct FittedModel {
    /// Coefficients on the original data scale.
    pub beta: Array1<f64>,
    /// Coefficients on the standardized scale the solver worked on.
    pub beta_std: Array1<f64>,
    pub sigma: f64,
    pub intercept: f64,
    /// Indices (0-based) of coefficients above the support threshold.
    pub support: Vec<usize>,
    /// Penalized objective value at the end of each outer iteration.
    /// Non-increasing by construction.
    pub objective_trace: Vec<f64>,
    pub converged: bool,
    pub n_outer_iter: usize,
    pub gamma: f64,
    pub lambda: f64,
    pub weight_scheme: WeightScheme,
}

impl FittedModel {
    /// Predictions on a raw-scale design matrix.
    pub fn predict(&self, x_raw: &Array2<f64>) -> Array1<f64> {
        x_raw.dot(&self.beta) + self.intercept
    }

    pub fn model_size(&self) -> usize {
        self.support.len()
    }
}

/// A sequence of fits along a descending lambda grid with the per-lambda
/// selection scores.
#[derive(Debug, Clone)]
pub struct RegularizationPath {
    pub lambdas: Vec<f64>,
    pub models: Vec<FittedModel>,
    pub hbic: Vec<f64>,
    pub cv_error: Option<Vec<f64>>,
    pub selected_index: usize,
}

impl RegularizationPath {
    pub fn selected(&self) -> &FittedModel {
        &self.models[self.selected_index]
    }
}

/// Wire format for fitted models (JSON). Support indices are 1-based in
/// the file.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelJson {
    pub beta: Vec<f64>,
    pub intercept: f64,
    pub sigma: f64,
    pub support: Vec<usize>,
    pub gamma: f64,
    pub lambda: f64,
    pub weight_scheme: WeightScheme,
}

impl From<&FittedModel> for ModelJson {
    fn from(m: &FittedModel) -> Self {
        ModelJson {
            beta: m.beta.to_vec(),
            intercept: m.intercept,
            sigma: m.sigma,
            support: m.support.iter().map(|j| j + 1).collect(),
            gamma: m.gamma,
            lambda: m.lambda,
            weight_scheme: m.weight_scheme,
        }
    }
}

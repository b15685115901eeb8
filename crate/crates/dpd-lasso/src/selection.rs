//! Lambda-grid construction, HBIC scoring, optional k-fold
//! cross-validation, and warm-started path fitting.

use ndarray::Array1;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::datamodel::{Dataset, FitConfig, FittedModel, RegularizationPath, WeightScheme};
use crate::dpdloss::dpd_loss;
use crate::error::{Error, Result};
use crate::mmfit;
use crate::weights::{compute_weights, PenaltyWeight};
use crate::wlasso;

/// Validation loss for cross-validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CvLoss {
    /// The robust loss at the fit's gamma (default).
    DpdLoss,
    /// Mean squared error over the (1 - trim) fraction of smallest
    /// absolute residuals.
    TrimmedSquaredError { trim: f64 },
}

/// Model selection criterion along the path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    Hbic,
    KFoldCv { k: usize, loss: CvLoss },
}

#[derive(Debug, Clone)]
pub struct SelectionConfig {
    pub n_lambdas: usize,
    pub lambda_min_ratio: f64,
    pub criterion: Criterion,
    pub seed: u64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            n_lambdas: 50,
            lambda_min_ratio: 1e-3,
            criterion: Criterion::Hbic,
            seed: 0,
        }
    }
}

impl SelectionConfig {
    fn validate(&self, n: usize) -> Result<()> {
        if self.n_lambdas == 0 {
            return Err(Error::InvalidConfig("n_lambdas must be >= 1".into()));
        }
        if !(self.lambda_min_ratio > 0.0 && self.lambda_min_ratio < 1.0) {
            return Err(Error::InvalidConfig(
                "lambda_min_ratio must lie in (0, 1)".into(),
            ));
        }
        if let Criterion::KFoldCv { k, loss } = self.criterion {
            if k < 2 || k > n {
                return Err(Error::InvalidConfig(format!(
                    "cross-validation needs 2 <= k <= n, got k = {k}"
                )));
            }
            if let CvLoss::TrimmedSquaredError { trim } = loss {
                if !(0.0..0.5).contains(&trim) {
                    return Err(Error::InvalidConfig("trim must lie in [0, 0.5)".into()));
                }
            }
        }
        Ok(())
    }
}

/// Number of path fits run sequentially to seed warm starts before the
/// remaining lambdas are fitted in parallel.
const WARM_START_PREFIX: usize = 5;

/// The smallest lambda for which the first beta-subproblem at the
/// initializer returns an all-zero solution (the shutdown bound of the
/// majorized subproblem, converted back to the penalized-loss scale).
fn lambda_max_at_init(
    ds: &Dataset,
    cfg: &FitConfig,
    beta0: &Array1<f64>,
    sigma0: f64,
) -> Result<f64> {
    let r = ds.residuals(beta0);
    let (mu, log_abar) = {
        // Same quantities the beta step uses.
        let mu = mmfit::compute_mm_weights(ds, beta0, sigma0, cfg.gamma)?;
        let c = cfg.gamma / (2.0 * sigma0 * sigma0);
        let abar = r
            .iter()
            .map(|ri| (-c * ri * ri).exp_m1())
            .sum::<f64>()
            / ds.n() as f64;
        (mu, abar.ln_1p())
    };
    let (y_star, x_star) = mmfit::transform_data(ds, &mu, sigma0);
    // lambda_eff = bridge * lambda; shutdown when lambda_eff >= bound(w).
    let bridge = 2.0 * sigma0.powf(cfg.gamma + 1.0)
        * (0.5 * cfg.gamma * (2.0 * std::f64::consts::PI).ln()).exp()
        / ((1.0 + cfg.gamma) * log_abar.exp());
    let anchor = beta0.as_slice().unwrap();

    let bound_for = |weights: &[PenaltyWeight]| -> f64 {
        wlasso::lambda_max(&y_star, &x_star, weights) / bridge
    };

    let lmax = match cfg.weight_scheme {
        WeightScheme::Unit | WeightScheme::HardThreshold => {
            let w = compute_weights(cfg.weight_scheme, anchor, 1.0);
            bound_for(&w)
        }
        WeightScheme::Scad { .. } => {
            if let Some(l) = cfg.scad_lambda {
                let w = compute_weights(cfg.weight_scheme, anchor, l);
                bound_for(&w)
            } else {
                // The SCAD threshold follows the path lambda, so the
                // shutdown condition lambda * w_j(lambda) >= bound_j is
                // monotone in lambda; bisect for the smallest such lambda.
                let corr: Vec<f64> = (0..ds.p())
                    .map(|j| 2.0 * x_star.column(j).dot(&y_star).abs() / bridge)
                    .collect();
                let max_anchor = anchor.iter().fold(0.0f64, |a, b| a.max(b.abs()));
                let mut hi = corr.iter().cloned().fold(0.0f64, f64::max).max(max_anchor) + 1e-12;
                let shutdown = |lam: f64| -> bool {
                    let w = compute_weights(cfg.weight_scheme, anchor, lam);
                    corr.iter()
                        .zip(w.iter())
                        .all(|(c, wj)| lam * wj.value() >= *c)
                };
                if !shutdown(hi) {
                    hi *= 2.0;
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if shutdown(mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        }
    };
    if !(lmax > 0.0) || !lmax.is_finite() {
        return Err(Error::InvalidConfig(
            "degenerate lambda grid: the shutdown bound is zero or unbounded".into(),
        ));
    }
    Ok(lmax)
}

/// Log-spaced descending grid from the shutdown lambda down to
/// `lambda_max * lambda_min_ratio`.
pub fn lambda_grid(ds: &Dataset, cfg: &FitConfig, sel: &SelectionConfig) -> Result<Vec<f64>> {
    sel.validate(ds.n())?;
    cfg.validate()?;
    let (beta0, sigma0) = mmfit::initialize(ds, cfg)?;
    let lmax = lambda_max_at_init(ds, cfg, &beta0, sigma0)?;
    Ok(build_grid(lmax, sel))
}

fn build_grid(lmax: f64, sel: &SelectionConfig) -> Vec<f64> {
    let k = sel.n_lambdas;
    if k == 1 {
        return vec![lmax];
    }
    let ln_ratio = sel.lambda_min_ratio.ln();
    let mut grid: Vec<f64> = (0..k)
        .map(|i| lmax * (ln_ratio * i as f64 / (k - 1) as f64).exp())
        .collect();
    grid[0] = lmax;
    grid[k - 1] = lmax * sel.lambda_min_ratio;
    grid
}

/// High-dimensional BIC:
/// `log(sigma^2) + (log log n)(log p)/n * |support|`.
pub fn hbic(model: &FittedModel, n: usize, p: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidSampleSize(n));
    }
    if p < 2 {
        return Err(Error::DimensionMismatch(format!(
            "HBIC needs p >= 2, got {p}"
        )));
    }
    if !(model.sigma > 0.0) {
        return Err(Error::NonPositiveSigma(model.sigma));
    }
    let nf = n as f64;
    Ok((model.sigma * model.sigma).ln()
        + nf.ln().ln() * (p as f64).ln() / nf * model.support.len() as f64)
}

/// Index of the minimal score, ties broken toward the larger lambda.
fn select_index(scores: &[f64], lambdas: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..scores.len() {
        let better = scores[i] < scores[best]
            || (scores[i] == scores[best] && lambdas[i] > lambdas[best]);
        if better {
            best = i;
        }
    }
    best
}

fn fit_at(
    ds: &Dataset,
    cfg: &FitConfig,
    lambda: f64,
    warm: &Array1<f64>,
    sigma0: f64,
    anchor: &Array1<f64>,
) -> FittedModel {
    let cfg_k = FitConfig {
        lambda,
        ..cfg.clone()
    };
    match mmfit::fit_with_anchor(ds, &cfg_k, warm, sigma0, anchor) {
        Ok(m) => m,
        // A failed lambda is scored +inf later but never aborts the path.
        Err(_) => FittedModel {
            beta: Array1::zeros(ds.p()),
            beta_std: Array1::zeros(ds.p()),
            sigma: f64::NAN,
            intercept: 0.0,
            support: vec![],
            objective_trace: vec![],
            converged: false,
            n_outer_iter: 0,
            gamma: cfg.gamma,
            lambda,
            weight_scheme: cfg.weight_scheme,
        },
    }
}

/// Objective of a fitted model on a common scale (penalty weights at the
/// path anchor), so candidates from different warm starts are comparable.
fn anchored_q(ds: &Dataset, cfg: &FitConfig, lambda: f64, m: &FittedModel, beta0: &Array1<f64>) -> f64 {
    if !m.sigma.is_finite() || m.sigma <= 0.0 {
        return f64::INFINITY;
    }
    let scad_l = cfg.scad_lambda.unwrap_or(lambda);
    let w0 = compute_weights(cfg.weight_scheme, beta0.as_slice().unwrap(), scad_l);
    let loss = match dpd_loss(ds, &m.beta_std, m.sigma, cfg.gamma) {
        Ok(l) => l,
        Err(_) => return f64::INFINITY,
    };
    loss + lambda * crate::weights::penalty_value(&w0, m.beta_std.as_slice().unwrap())
}

/// Fits one lambda from two deterministic starting points — the warm
/// chain from the previous lambda and the path initializer — and keeps
/// whichever ends at the lower objective. The chain start alone can stay
/// trapped in the all-zero basin it inherits from the shutdown region.
fn fit_at_dual(
    ds: &Dataset,
    cfg: &FitConfig,
    lambda: f64,
    warm: &(Array1<f64>, f64),
    init: &(Array1<f64>, f64),
) -> FittedModel {
    let from_init = fit_at(ds, cfg, lambda, &init.0, init.1, &init.0);
    if warm.0 == init.0 && warm.1 == init.1 {
        return from_init;
    }
    let from_warm = fit_at(ds, cfg, lambda, &warm.0, warm.1, &init.0);
    let q_warm = anchored_q(ds, cfg, lambda, &from_warm, &init.0);
    let q_init = anchored_q(ds, cfg, lambda, &from_init, &init.0);
    if q_warm < q_init {
        from_warm
    } else {
        from_init
    }
}

fn path_models(
    ds: &Dataset,
    cfg: &FitConfig,
    lambdas: &[f64],
    beta0: &Array1<f64>,
    sigma0: f64,
) -> Vec<FittedModel> {
    let prefix = WARM_START_PREFIX.min(lambdas.len());
    let init = (beta0.clone(), sigma0);
    let mut models: Vec<FittedModel> = Vec::with_capacity(lambdas.len());
    let mut warm = init.clone();
    for &lam in &lambdas[..prefix] {
        let m = fit_at_dual(ds, cfg, lam, &warm, &init);
        warm = (m.beta_std.clone(), m.sigma);
        models.push(m);
    }
    if lambdas.len() > prefix {
        let seed = {
            let m = &models[prefix - 1];
            (m.beta_std.clone(), m.sigma)
        };
        let rest: Vec<FittedModel> = lambdas[prefix..]
            .par_iter()
            .map(|&lam| fit_at_dual(ds, cfg, lam, &seed, &init))
            .collect();
        models.extend(rest);
    }
    models
}

fn score_or_inf(model: &FittedModel, n: usize, p: usize) -> f64 {
    hbic(model, n, p).unwrap_or(f64::INFINITY)
}

fn cv_errors(
    ds: &Dataset,
    cfg: &FitConfig,
    lambdas: &[f64],
    k: usize,
    loss: CvLoss,
    seed: u64,
) -> Result<Vec<f64>> {
    let n = ds.n();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    // Contiguous chunks of the shuffled indices.
    let mut folds: Vec<Vec<usize>> = Vec::with_capacity(k);
    let base = n / k;
    let extra = n % k;
    let mut at = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(idx[at..at + len].to_vec());
        at += len;
    }

    let per_fold: Vec<Result<Vec<f64>>> = folds
        .par_iter()
        .map(|val_rows| -> Result<Vec<f64>> {
            let val_set: std::collections::HashSet<usize> = val_rows.iter().cloned().collect();
            let train_rows: Vec<usize> = (0..n).filter(|i| !val_set.contains(i)).collect();
            let train = subset(ds, &train_rows);
            let val = subset(ds, val_rows);
            let (b0, s0) = mmfit::initialize(&train, cfg)?;
            let init = (b0, s0);
            let mut warm = init.clone();
            let mut errs = Vec::with_capacity(lambdas.len());
            for &lam in lambdas {
                let m = fit_at_dual(&train, cfg, lam, &warm, &init);
                warm = (m.beta_std.clone(), m.sigma);
                if !m.sigma.is_finite() {
                    errs.push(f64::INFINITY);
                    continue;
                }
                let e = match loss {
                    CvLoss::DpdLoss => {
                        dpd_loss(&val, &m.beta_std, m.sigma, cfg.gamma).unwrap_or(f64::INFINITY)
                    }
                    CvLoss::TrimmedSquaredError { trim } => {
                        let r = val.residuals(&m.beta_std);
                        let mut a: Vec<f64> = r.iter().map(|v| v * v).collect();
                        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
                        let kept = ((1.0 - trim) * a.len() as f64).floor() as usize;
                        if kept == 0 {
                            f64::INFINITY
                        } else {
                            a[..kept].iter().sum::<f64>() / kept as f64
                        }
                    }
                };
                errs.push(e);
            }
            Ok(errs)
        })
        .collect();

    let mut total = vec![0.0; lambdas.len()];
    for fold in per_fold {
        let errs = fold?;
        for (t, e) in total.iter_mut().zip(errs) {
            *t += e;
        }
    }
    for t in &mut total {
        *t /= k as f64;
    }
    Ok(total)
}

fn subset(ds: &Dataset, rows: &[usize]) -> Dataset {
    let p = ds.p();
    let y = Array1::from_iter(rows.iter().map(|&i| ds.y[i]));
    let mut x = ndarray::Array2::zeros((rows.len(), p));
    for (r, &i) in rows.iter().enumerate() {
        for j in 0..p {
            x[[r, j]] = ds.x[[i, j]];
        }
    }
    Dataset {
        y,
        x,
        column_means: ds.column_means.clone(),
        column_scales: ds.column_scales.clone(),
        y_mean: ds.y_mean,
        standardized: false,
    }
}

/// Fits the full path with warm starts (largest lambda first), scores
/// each model by the configured criterion and marks the selected lambda.
pub fn fit_path(ds: &Dataset, cfg: &FitConfig, sel: &SelectionConfig) -> Result<RegularizationPath> {
    sel.validate(ds.n())?;
    cfg.validate()?;
    let (beta0, sigma0) = mmfit::initialize(ds, cfg)?;
    let lambdas = build_grid(lambda_max_at_init(ds, cfg, &beta0, sigma0)?, sel);
    let models = path_models(ds, cfg, &lambdas, &beta0, sigma0);
    let hbic_scores: Vec<f64> = models
        .iter()
        .map(|m| score_or_inf(m, ds.n(), ds.p()))
        .collect();

    let (cv_error, selected_index) = match sel.criterion {
        Criterion::Hbic => (None, select_index(&hbic_scores, &lambdas)),
        Criterion::KFoldCv { k, loss } => {
            let errs = cv_errors(ds, cfg, &lambdas, k, loss, sel.seed)?;
            let sel_idx = select_index(&errs, &lambdas);
            (Some(errs), sel_idx)
        }
    };

    Ok(RegularizationPath {
        lambdas,
        models,
        hbic: hbic_scores,
        cv_error,
        selected_index,
    })
}

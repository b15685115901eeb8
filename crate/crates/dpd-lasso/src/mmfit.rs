//! The full adaptively weighted robust estimator: alternating beta/sigma
//! updates where each beta update minimizes a quadratic majorizer of the
//! loss via the weighted-lasso solver.
//!
//! # Majorization and the lambda bridge
//!
//! Write the loss at fixed `sigma` as `L(beta) = C1 - C2 * A(beta)` with
//! `A(beta) = (1/n) sum_i exp(-t_i)`, `t_i = g r_i^2 / (2 sigma^2)` and
//! `C2 = (2 pi)^(-g/2) sigma^(-g) (g+1)/g > 0`. Convexity of `exp` gives
//! the tangent-line bound `exp(-t) >= exp(-t0)(1 + t0 - t)`, so with
//! `e_i = exp(-t_i^0)` evaluated at the current iterate `beta^0`:
//!
//! ```text
//! L(beta) <= const + (g+1) (2 pi)^(-g/2) / (2 n sigma^(g+2))
//!                    * sum_i e_i (y_i - x_i^T beta)^2,
//! ```
//!
//! with equality at `beta = beta^0`. Minimizing this bound plus the
//! penalty `lambda sum_j w_j |beta_j|` is therefore the weighted-lasso
//! problem
//!
//! ```text
//! min  sum_i e_i r_i^2 + lambda_sub sum_j w_j |beta_j|,
//! lambda_sub = 2 n sigma^(g+2) (2 pi)^(g/2) / (1+g) * lambda,
//! ```
//!
//! which at `g = 0` reduces to a plain lasso at `2 n sigma^2 lambda` —
//! the consistency check that pins the constant. The implementation works
//! on the normalized weights `mu_i = e_i / sum_l e_l` and the transformed
//! data `y*_i = sqrt(mu_i/sigma) y_i`, `x*_i = sqrt(mu_i/sigma) x_i`, so
//! the subproblem carries
//! `lambda_eff = 2 sigma^(g+1) (2 pi)^(g/2) / ((1+g) * mean_i e_i) * lambda`.
//!
//! Each beta update warm-starts coordinate descent from the current
//! iterate, so the penalized objective can never increase; the sigma
//! update is a fixed-point step and is accepted only when it does not
//! increase the objective either. Weight refreshes are likewise adopted
//! only when they do not increase the objective at the current iterate.
//! Together these make the recorded objective trace non-increasing by
//! construction.

use ndarray::{Array1, Array2};

use crate::datamodel::{
    destandardize_coefficients, Dataset, FitConfig, FittedModel, Initializer, WeightScheme,
};
use crate::dpdloss::dpd_loss;
use crate::error::{Error, Result};
use crate::weights::{compute_weights, penalty_value, PenaltyWeight};
use crate::wlasso::{lambda_max, solve_weighted_lasso, WlsProblem};

const LN_2PI: f64 = 1.837877066409345483560659472811;

/// Scale floor applied when a perfect fit would drive sigma to zero.
pub const SIGMA_FLOOR: f64 = 1e-8;

/// Huber tuning constant (95% efficiency at the normal).
const HUBER_C: f64 = 1.345;

/// Iterations of the Huber-weighted IRLS initializer.
const IRLS_ITERATIONS: usize = 25;

/// Snapshot of the alternating optimization.
#[derive(Debug, Clone)]
pub struct MmState {
    pub beta_current: Array1<f64>,
    pub sigma_current: f64,
    /// Anchor estimate the adaptive penalty weights are computed from.
    pub beta_tilde: Array1<f64>,
    /// Normalized majorization weights at the current iterate (sum to 1).
    pub mu: Array1<f64>,
    pub q_value: f64,
    pub outer_iter: usize,
}

/// Exponential down-weighting of each observation, normalized to sum to
/// one. Computed with max-subtraction so heavy contamination cannot
/// underflow every weight at once.
pub fn compute_mm_weights(
    ds: &Dataset,
    beta: &Array1<f64>,
    sigma: f64,
    gamma: f64,
) -> Result<Array1<f64>> {
    if !(sigma > 0.0) {
        return Err(Error::NonPositiveSigma(sigma));
    }
    let r = ds.residuals(beta);
    let (mu, _) = exp_weights(&r, sigma, gamma);
    Ok(mu)
}

/// Returns `(mu, log_abar)` where `mu` are the normalized weights and
/// `log_abar = log((1/n) sum_i exp(-g r_i^2 / (2 sigma^2)))`.
fn exp_weights(residuals: &Array1<f64>, sigma: f64, gamma: f64) -> (Array1<f64>, f64) {
    let c = gamma / (2.0 * sigma * sigma);
    let t: Vec<f64> = residuals.iter().map(|r| -c * r * r).collect();
    let m = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = t.iter().map(|v| (v - m).exp()).collect();
    let total: f64 = shifted.iter().sum();
    debug_assert!(total >= 1.0, "max-subtraction keeps at least one weight at 1");
    let mu = Array1::from_iter(shifted.iter().map(|e| e / total));
    let log_abar = m + total.ln() - (residuals.len() as f64).ln();
    (mu, log_abar)
}

/// Weighted-data transform `y*_i = sqrt(mu_i/sigma) y_i`,
/// `x*_i = sqrt(mu_i/sigma) x_i`, so that the transformed sum of squares
/// equals `(1/sigma) sum_i mu_i r_i^2`.
pub fn transform_data(ds: &Dataset, mu: &Array1<f64>, sigma: f64) -> (Array1<f64>, Array2<f64>) {
    let n = ds.n();
    let p = ds.p();
    let mut y_star = Array1::zeros(n);
    let mut x_star = Array2::zeros((n, p));
    for i in 0..n {
        let s = (mu[i] / sigma).sqrt();
        y_star[i] = s * ds.y[i];
        for j in 0..p {
            x_star[[i, j]] = s * ds.x[[i, j]];
        }
    }
    (y_star, x_star)
}

/// Effective subproblem lambda on the mu-transformed data; `+inf` when the
/// exponential average has underflowed entirely (the subproblem is then a
/// pure shutdown).
fn lambda_effective(lambda: f64, sigma: f64, gamma: f64, log_abar: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let ln = lambda.ln()
        + std::f64::consts::LN_2
        + (gamma + 1.0) * sigma.ln()
        + 0.5 * gamma * LN_2PI
        - (gamma).ln_1p()
        - log_abar;
    ln.exp()
}

fn beta_subproblem(
    ds: &Dataset,
    beta: &Array1<f64>,
    sigma: f64,
    gamma: f64,
    lambda: f64,
    weights: &[PenaltyWeight],
    epsilon_inner: f64,
    max_inner_iter: usize,
) -> Array1<f64> {
    let r = ds.residuals(beta);
    let (mu, log_abar) = exp_weights(&r, sigma, gamma);
    let lambda_eff = lambda_effective(lambda, sigma, gamma, log_abar);
    if !lambda_eff.is_finite() {
        return Array1::zeros(ds.p());
    }
    let (y_star, x_star) = transform_data(ds, &mu, sigma);
    let prob = WlsProblem {
        y_star,
        x_star,
        lambda: lambda_eff,
        weights: weights.to_vec(),
        warm_start: Some(beta.clone()),
    };
    solve_weighted_lasso(&prob, epsilon_inner, max_inner_iter).beta
}

/// One majorize-minimize beta update at the state's sigma. The result
/// never increases the penalized objective.
pub fn update_beta(
    state: &MmState,
    ds: &Dataset,
    cfg: &FitConfig,
    weights: &[PenaltyWeight],
) -> Array1<f64> {
    beta_subproblem(
        ds,
        &state.beta_current,
        state.sigma_current,
        cfg.gamma,
        cfg.lambda,
        weights,
        cfg.epsilon_inner,
        cfg.max_inner_iter,
    )
}

/// One fixed-point step of the scale estimating equation:
///
/// ```text
/// sigma_new^2 = [ (1/n) sum w_i - g/(g+1)^(3/2) ]^(-1)
///               * (1/n) sum w_i (y_i - x_i^T beta)^2,
/// w_i = exp(-g ((y_i - x_i^T beta)/sigma_prev)^2 / 2).
/// ```
///
/// At `g = 0` this is exactly the mean squared residual. A perfect fit is
/// clamped at [`SIGMA_FLOOR`]; a non-positive bracket (every observation
/// judged an outlier) is `DegenerateScale` and the caller keeps the
/// previous scale.
pub fn update_sigma(ds: &Dataset, beta: &Array1<f64>, sigma_prev: f64, gamma: f64) -> Result<f64> {
    if !(sigma_prev > 0.0) {
        return Err(Error::NonPositiveSigma(sigma_prev));
    }
    let r = ds.residuals(beta);
    let n = ds.n() as f64;
    let c = gamma / (2.0 * sigma_prev * sigma_prev);
    let mut sum_w = 0.0;
    let mut sum_wr2 = 0.0;
    for ri in r.iter() {
        let w = (-c * ri * ri).exp();
        sum_w += w;
        sum_wr2 += w * ri * ri;
    }
    let bracket = sum_w / n - gamma / (1.0 + gamma).powf(1.5);
    if bracket <= 0.0 {
        return Err(Error::DegenerateScale);
    }
    let sigma_sq = (sum_wr2 / n) / bracket;
    Ok(sigma_sq.sqrt().max(SIGMA_FLOOR))
}

fn q_value(
    ds: &Dataset,
    beta: &Array1<f64>,
    sigma: f64,
    gamma: f64,
    lambda: f64,
    weights: &[PenaltyWeight],
) -> f64 {
    let loss = dpd_loss(ds, beta, sigma, gamma).expect("sigma stays positive during fitting");
    loss + lambda * penalty_value(weights, beta.as_slice().unwrap())
}

fn resolve_scad_lambda(cfg: &FitConfig) -> Result<f64> {
    if let WeightScheme::Scad { .. } = cfg.weight_scheme {
        let l = cfg.scad_lambda.unwrap_or(cfg.lambda);
        if l <= 0.0 {
            return Err(Error::InvalidConfig(
                "SCAD weights need a positive threshold; set scad_lambda when lambda = 0".into(),
            ));
        }
        Ok(l)
    } else {
        Ok(cfg.scad_lambda.unwrap_or(cfg.lambda))
    }
}

/// Fits the model by alternating beta and sigma updates from the given
/// starting point, using `beta_init` as both the first iterate and the
/// adaptive-weight anchor.
pub fn fit(
    ds: &Dataset,
    cfg: &FitConfig,
    beta_init: &Array1<f64>,
    sigma_init: f64,
) -> Result<FittedModel> {
    fit_with_anchor(ds, cfg, beta_init, sigma_init, beta_init)
}

/// [`fit`] with a separate adaptive-weight anchor, used along a lambda
/// path so that warm starts (possibly all zero at large lambda) never
/// decide which coordinates the hard-threshold weights exclude.
pub fn fit_with_anchor(
    ds: &Dataset,
    cfg: &FitConfig,
    beta_init: &Array1<f64>,
    sigma_init: f64,
    beta_anchor: &Array1<f64>,
) -> Result<FittedModel> {
    cfg.validate()?;
    if beta_init.len() != ds.p() || beta_anchor.len() != ds.p() {
        return Err(Error::DimensionMismatch(format!(
            "beta_init/anchor must have length p = {}",
            ds.p()
        )));
    }
    if !(sigma_init > 0.0) || !sigma_init.is_finite() {
        return Err(Error::NonPositiveSigma(sigma_init));
    }
    let scad_lambda = resolve_scad_lambda(cfg)?;

    let mut anchor = beta_anchor.clone();
    let mut weights = compute_weights(cfg.weight_scheme, anchor.as_slice().unwrap(), scad_lambda);
    let mut beta = beta_init.clone();
    for (j, w) in weights.iter().enumerate() {
        if w.is_excluded() {
            beta[j] = 0.0;
        }
    }
    let mut sigma = sigma_init;
    let mut q = q_value(ds, &beta, sigma, cfg.gamma, cfg.lambda, &weights);
    let mut trace = vec![q];
    let mut converged = false;
    let mut sigma_degenerate = false;
    let mut n_iter = 0;

    for m in 0..cfg.max_outer_iter {
        // Refresh the adaptive anchor from the current iterate, but only
        // when re-weighting does not push the objective up at this point.
        if !cfg.freeze_weights && m > 0 {
            let cand_weights =
                compute_weights(cfg.weight_scheme, beta.as_slice().unwrap(), scad_lambda);
            let q_cand = q_value(ds, &beta, sigma, cfg.gamma, cfg.lambda, &cand_weights);
            if q_cand <= q + 1e-12 * (1.0 + q.abs()) {
                anchor = beta.clone();
                weights = cand_weights;
                q = q_cand;
            }
        }

        let beta_new = beta_subproblem(
            ds,
            &beta,
            sigma,
            cfg.gamma,
            cfg.lambda,
            &weights,
            cfg.epsilon_inner,
            cfg.max_inner_iter,
        );

        sigma_degenerate = false;
        let sigma_new = {
            // A degenerate bracket means the current residuals dwarf the
            // reference scale; retry the same fixed-point step from an
            // inflated reference, where the weights no longer underflow.
            let mut candidate = None;
            let mut sigma_ref = sigma;
            for _ in 0..200 {
                match update_sigma(ds, &beta_new, sigma_ref, cfg.gamma) {
                    Ok(c) => {
                        candidate = Some(c);
                        break;
                    }
                    Err(Error::DegenerateScale) => sigma_ref *= 2.0,
                    Err(e) => return Err(e),
                }
            }
            match candidate {
                Some(cand) => {
                    let q_prev = q_value(ds, &beta_new, sigma, cfg.gamma, cfg.lambda, &weights);
                    let q_cand = q_value(ds, &beta_new, cand, cfg.gamma, cfg.lambda, &weights);
                    if q_cand <= q_prev + 1e-12 * (1.0 + q_prev.abs()) {
                        cand
                    } else {
                        sigma
                    }
                }
                None => {
                    sigma_degenerate = true;
                    sigma
                }
            }
        };

        beta = beta_new;
        sigma = sigma_new;
        n_iter = m + 1;
        let q_new = q_value(ds, &beta, sigma, cfg.gamma, cfg.lambda, &weights);
        trace.push(q_new);
        let done = (q - q_new).abs() <= cfg.epsilon_outer;
        q = q_new;
        if done {
            converged = true;
            break;
        }
    }

    if sigma_degenerate {
        converged = false;
    }

    let support: Vec<usize> = beta
        .iter()
        .enumerate()
        .filter(|(_, b)| b.abs() > cfg.support_threshold)
        .map(|(j, _)| j)
        .collect();
    let (beta_raw, intercept) = destandardize_coefficients(&beta, ds)?;
    let _ = anchor; // final anchor is not reported
    Ok(FittedModel {
        beta: beta_raw,
        beta_std: beta,
        sigma,
        intercept,
        support,
        objective_trace: trace,
        converged,
        n_outer_iter: n_iter,
        gamma: cfg.gamma,
        lambda: cfg.lambda,
        weight_scheme: cfg.weight_scheme,
    })
}

/// Produces robust starting values according to the configured
/// initializer. Returns `(beta_init, sigma_init)`.
pub fn initialize(ds: &Dataset, cfg: &FitConfig) -> Result<(Array1<f64>, f64)> {
    match &cfg.initializer {
        Initializer::ProvidedCoefficients { beta, sigma } => {
            if beta.len() != ds.p() {
                return Err(Error::DimensionMismatch(format!(
                    "provided beta has length {} but p = {}",
                    beta.len(),
                    ds.p()
                )));
            }
            if !(*sigma > 0.0) {
                return Err(Error::NonPositiveSigma(*sigma));
            }
            Ok((Array1::from(beta.clone()), *sigma))
        }
        Initializer::HuberLassoIrls => huber_lasso_irls(ds, cfg),
        Initializer::OlsLassoNonRobust => {
            let beta = light_lasso(ds, &ds.y, None, cfg);
            let r = ds.residuals(&beta);
            let sigma = (r.iter().map(|v| v * v).sum::<f64>() / ds.n() as f64)
                .sqrt()
                .max(1e-4);
            Ok((beta, sigma))
        }
    }
}

/// Plain lasso on (optionally row-weighted) data at a small fixed penalty,
/// one percent of the shutdown lambda.
fn light_lasso(
    ds: &Dataset,
    y: &Array1<f64>,
    row_weights: Option<&[f64]>,
    cfg: &FitConfig,
) -> Array1<f64> {
    let unit = vec![PenaltyWeight::Finite(1.0); ds.p()];
    let (yw, xw) = match row_weights {
        None => (y.clone(), ds.x.clone()),
        Some(w) => {
            let mut yw = y.clone();
            let mut xw = ds.x.clone();
            for i in 0..ds.n() {
                let s = w[i].sqrt();
                yw[i] *= s;
                for j in 0..ds.p() {
                    xw[[i, j]] *= s;
                }
            }
            (yw, xw)
        }
    };
    let lam0 = 0.01 * lambda_max(&yw, &xw, &unit);
    let prob = WlsProblem {
        y_star: yw,
        x_star: xw,
        lambda: lam0,
        weights: unit,
        warm_start: None,
    };
    solve_weighted_lasso(&prob, cfg.epsilon_inner, cfg.max_inner_iter).beta
}

/// Median absolute deviation scaled to be consistent for the normal
/// standard deviation (factor 1.4826).
fn normalized_mad(v: &Array1<f64>) -> f64 {
    let med = median(v.as_slice().unwrap());
    let dev: Vec<f64> = v.iter().map(|x| (x - med).abs()).collect();
    1.4826 * median(&dev)
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn huber_lasso_irls(ds: &Dataset, cfg: &FitConfig) -> Result<(Array1<f64>, f64)> {
    let mut beta = light_lasso(ds, &ds.y, None, cfg);
    for _ in 0..IRLS_ITERATIONS {
        let r = ds.residuals(&beta);
        let scale = normalized_mad(&r);
        if scale <= 0.0 {
            break;
        }
        let w: Vec<f64> = r
            .iter()
            .map(|ri| {
                let a = ri.abs();
                if a <= HUBER_C * scale {
                    1.0
                } else {
                    HUBER_C * scale / a
                }
            })
            .collect();
        beta = light_lasso(ds, &ds.y, Some(&w), cfg);
    }
    let r = ds.residuals(&beta);
    let mut sigma = normalized_mad(&r);
    if sigma <= 0.0 {
        sigma = 1e-4;
    }
    Ok((beta, sigma))
}

/// Initializes and fits in one call.
pub fn fit_auto(ds: &Dataset, cfg: &FitConfig) -> Result<FittedModel> {
    let (beta0, sigma0) = initialize(ds, cfg)?;
    fit(ds, cfg, &beta0, sigma0)
}

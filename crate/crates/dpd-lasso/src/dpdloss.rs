//! Density-power-divergence loss for normal errors, its MM-equivalent
//! alternative form, and the psi kernels used by the diagnostics.
//!
//! The loss with tuning parameter `gamma >= 0` for residuals `r_i` and
//! scale `sigma` is
//!
//! ```text
//! L(beta, sigma) = (2 pi)^(-g/2) sigma^(-g) [ (g+1)^(-1/2)
//!                  - (g+1)/g * (1/n) sum_i exp(-g r_i^2 / (2 sigma^2)) ] + 1/g
//! ```
//!
//! whose `g -> 0` limit is the Gaussian negative log-likelihood
//! `(1/(2 n sigma^2)) sum r_i^2 + log sigma + log(2 pi)/2`. The limit is
//! implemented as a separate analytic branch; the `g > 0` branch is
//! evaluated through `expm1`/`ln_1p` so that tiny `g` does not suffer
//! 1/g cancellation.

use ndarray::Array1;

use crate::datamodel::Dataset;
use crate::error::{Error, Result};

const LN_2PI: f64 = 1.837877066409345483560659472811;

/// Normal-error kernel constants for a given `gamma`.
///
/// `mf_gamma` is the integral of the (1+gamma)-th power of the standard
/// normal density, `(2 pi)^(-g/2) (g+1)^(-1/2)`; `u` is the score
/// `f'/f = -s`. These two hooks are all the rest of the crate needs from
/// the error density.
#[derive(Debug, Clone, Copy)]
pub struct LossKernel {
    pub gamma: f64,
    pub mf_gamma: f64,
}

impl LossKernel {
    pub fn normal(gamma: f64) -> Self {
        LossKernel {
            gamma,
            mf_gamma: mf_normal(gamma),
        }
    }

    /// Score function of the standard normal, `u(s) = -s`.
    pub fn u(&self, s: f64) -> f64 {
        -s
    }
}

/// `M_f^(g) = (2 pi)^(-g/2) (g+1)^(-1/2)` for the standard normal density.
pub fn mf_normal(gamma: f64) -> f64 {
    (-0.5 * gamma * LN_2PI).exp() / (gamma + 1.0).sqrt()
}

fn check_inputs(ds: &Dataset, beta: &Array1<f64>, sigma: f64) -> Result<()> {
    if beta.len() != ds.p() {
        return Err(Error::DimensionMismatch(format!(
            "beta has length {} but p = {}",
            beta.len(),
            ds.p()
        )));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::NonPositiveSigma(sigma));
    }
    Ok(())
}

/// Mean of `expm1(-g r_i^2 / (2 sigma^2))`, i.e. the exponential average
/// minus one, computed without catastrophic cancellation for small `g`.
fn abar_minus_one(residuals: &Array1<f64>, sigma: f64, gamma: f64) -> f64 {
    let c = gamma / (2.0 * sigma * sigma);
    residuals.iter().map(|r| (-c * r * r).exp_m1()).sum::<f64>() / residuals.len() as f64
}

/// The DPD loss `L(beta, sigma)` at tuning parameter `gamma`.
pub fn dpd_loss(ds: &Dataset, beta: &Array1<f64>, sigma: f64, gamma: f64) -> Result<f64> {
    check_inputs(ds, beta, sigma)?;
    if gamma < 0.0 {
        return Err(Error::InvalidConfig(format!("gamma must be >= 0, got {gamma}")));
    }
    let r = ds.residuals(beta);
    let n = ds.n() as f64;
    if gamma == 0.0 {
        let ss = r.iter().map(|v| v * v).sum::<f64>();
        return Ok(ss / (2.0 * n * sigma * sigma) + sigma.ln() + 0.5 * LN_2PI);
    }
    // L = mf/sigma^g - expm1(t)/g with
    // t = log[(g+1) (2 pi)^(-g/2) sigma^(-g) * Abar],  Abar the exponential
    // average. ln_1p/expm1 keep full precision as g -> 0.
    let abar1 = abar_minus_one(&r, sigma, gamma);
    let t = (gamma).ln_1p() - 0.5 * gamma * LN_2PI - gamma * sigma.ln() + abar1.ln_1p();
    Ok(mf_normal(gamma) / sigma.powf(gamma) - t.exp_m1() / gamma)
}

/// The alternative objective `-log[(1/n) sum_i exp(-g r_i^2/(2 sigma^2))]`.
///
/// Shares its beta-minimizer with [`dpd_loss`] at fixed `sigma`; undefined
/// at `gamma = 0`. Returns `+inf` when every exponential underflows, which
/// can only happen far from any reasonable iterate.
pub fn dpd_loss_alternative(
    ds: &Dataset,
    beta: &Array1<f64>,
    sigma: f64,
    gamma: f64,
) -> Result<f64> {
    check_inputs(ds, beta, sigma)?;
    if gamma == 0.0 {
        return Err(Error::GammaZero);
    }
    Ok(-abar_minus_one(&ds.residuals(beta), sigma, gamma).ln_1p())
}

/// First estimating-equation kernel `psi_1(s) = u(s) f^g(s) = -s f^g(s)`.
///
/// Bounded over all of `R` for every `g > 0`, with extrema at
/// `s = +-1/sqrt(g)`.
pub fn psi1(s: f64, gamma: f64) -> f64 {
    -s * (-0.5 * gamma * (LN_2PI + s * s)).exp()
}

/// Second kernel `psi_2(s) = (1 - s^2) f^g(s) - g/(g+1) M_f^(g)`.
///
/// Its expectation under the standard normal is zero, which is what makes
/// the scale estimating equation Fisher-consistent.
pub fn psi2(s: f64, gamma: f64) -> f64 {
    (1.0 - s * s) * (-0.5 * gamma * (LN_2PI + s * s)).exp()
        - gamma / (gamma + 1.0) * mf_normal(gamma)
}

/// Analytic gradient of [`dpd_loss`] in `beta`:
/// `(1+g)/(n sigma^(g+1)) * sum_i psi_1(r_i/sigma) x_i`.
pub fn loss_gradient_beta(
    ds: &Dataset,
    beta: &Array1<f64>,
    sigma: f64,
    gamma: f64,
) -> Result<Array1<f64>> {
    check_inputs(ds, beta, sigma)?;
    let r = ds.residuals(beta);
    let n = ds.n() as f64;
    let scale = (1.0 + gamma) / (n * sigma.powf(gamma + 1.0));
    let psi: Array1<f64> = r.mapv(|ri| psi1(ri / sigma, gamma));
    Ok(ds.x.t().dot(&psi) * scale)
}

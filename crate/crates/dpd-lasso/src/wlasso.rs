//! Exact solver for the weighted-L1 penalized least-squares subproblem
//!
//! ```text
//! min_beta  sum_i (y*_i - x*_i^T beta)^2 + lambda sum_j w_j |beta_j|
//! ```
//!
//! by cyclic coordinate descent over an active set with periodic full
//! sweeps. The objective carries no 1/n and no 1/2 factor; every lambda
//! passed here is understood in that convention. Excluded coordinates
//! (infinite weight) are pinned at zero and never touched.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::weights::PenaltyWeight;

/// A weighted-lasso subproblem instance.
#[derive(Debug, Clone)]
pub struct WlsProblem {
    pub y_star: Array1<f64>,
    pub x_star: Array2<f64>,
    pub lambda: f64,
    pub weights: Vec<PenaltyWeight>,
    pub warm_start: Option<Array1<f64>>,
}

/// Solver output. `converged` is false when the sweep budget ran out
/// before the KKT conditions were met; the best iterate is still returned.
#[derive(Debug, Clone)]
pub struct WlassoSolution {
    pub beta: Array1<f64>,
    pub converged: bool,
    pub n_sweeps: usize,
}

/// Full coordinate-descent passes between KKT checks on the active set.
const ACTIVE_PASSES_PER_FULL_SWEEP: usize = 10;

/// Largest lambda with a nonzero solution: `max_j 2 |x_j^T y| / w_j`
/// over non-excluded coordinates. Returns infinity when some coordinate
/// is unpenalized (weight 0) and correlated with y.
pub fn lambda_max(y: &Array1<f64>, x: &Array2<f64>, weights: &[PenaltyWeight]) -> f64 {
    let mut best = 0.0f64;
    for (j, w) in weights.iter().enumerate() {
        let PenaltyWeight::Finite(wj) = w else { continue };
        let corr = 2.0 * x.column(j).dot(y).abs();
        if *wj == 0.0 {
            if corr > 0.0 {
                return f64::INFINITY;
            }
        } else {
            best = best.max(corr / wj);
        }
    }
    best
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Minimizes the weighted-lasso objective. The returned iterate satisfies
/// the KKT conditions within `epsilon_inner`:
/// `|2 x_j^T r| <= lambda w_j + eps` for zero coordinates and
/// `2 x_j^T r = lambda w_j sign(beta_j) +- eps` for the rest.
pub fn solve_weighted_lasso(
    prob: &WlsProblem,
    epsilon_inner: f64,
    max_inner_iter: usize,
) -> WlassoSolution {
    let n = prob.y_star.len();
    let p = prob.x_star.ncols();
    debug_assert_eq!(prob.weights.len(), p);

    // Column-major copies keep the inner loops contiguous.
    let cols: Vec<Vec<f64>> = (0..p).map(|j| prob.x_star.column(j).to_vec()).collect();
    let col_sq: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v * v).sum()).collect();

    let mut beta: Vec<f64> = match &prob.warm_start {
        Some(b) => b.to_vec(),
        None => vec![0.0; p],
    };
    for (j, w) in prob.weights.iter().enumerate() {
        if w.is_excluded() {
            beta[j] = 0.0;
        }
    }

    let mut residual: Vec<f64> = prob.y_star.to_vec();
    for j in 0..p {
        if beta[j] != 0.0 {
            for i in 0..n {
                residual[i] -= cols[j][i] * beta[j];
            }
        }
    }

    let update = |j: usize, beta: &mut [f64], residual: &mut [f64]| -> f64 {
        let wj = match prob.weights[j] {
            PenaltyWeight::Finite(w) => w,
            PenaltyWeight::Excluded => return 0.0,
        };
        if col_sq[j] <= 0.0 {
            // Zero column: the quadratic part is flat, the penalty pins it.
            let change = -beta[j];
            beta[j] = 0.0;
            return change.abs();
        }
        let old = beta[j];
        let mut z = old * col_sq[j];
        for i in 0..n {
            z += cols[j][i] * residual[i];
        }
        let new = soft_threshold(z, 0.5 * prob.lambda * wj) / col_sq[j];
        if new != old {
            let delta = new - old;
            for i in 0..n {
                residual[i] -= cols[j][i] * delta;
            }
            beta[j] = new;
        }
        (new - old).abs()
    };

    let kkt_violation = |beta: &[f64], residual: &[f64]| -> f64 {
        let mut worst = 0.0f64;
        for j in 0..p {
            let wj = match prob.weights[j] {
                PenaltyWeight::Finite(w) => w,
                PenaltyWeight::Excluded => continue,
            };
            let mut g = 0.0;
            for i in 0..n {
                g += cols[j][i] * residual[i];
            }
            g *= 2.0;
            let v = if beta[j] == 0.0 {
                (g.abs() - prob.lambda * wj).max(0.0)
            } else {
                (g - prob.lambda * wj * beta[j].signum()).abs()
            };
            worst = worst.max(v);
        }
        worst
    };

    let mut sweeps = 0;
    let mut converged = false;
    'outer: while sweeps < max_inner_iter {
        for j in 0..p {
            update(j, &mut beta, &mut residual);
        }
        sweeps += 1;
        if kkt_violation(&beta, &residual) <= epsilon_inner {
            converged = true;
            break;
        }
        let active: Vec<usize> = (0..p).filter(|&j| beta[j] != 0.0).collect();
        if active.is_empty() {
            continue;
        }
        for _ in 0..ACTIVE_PASSES_PER_FULL_SWEEP {
            if sweeps >= max_inner_iter {
                break 'outer;
            }
            let mut max_change = 0.0f64;
            for &j in &active {
                max_change = max_change.max(update(j, &mut beta, &mut residual));
            }
            sweeps += 1;
            if max_change <= epsilon_inner {
                break;
            }
        }
    }

    WlassoSolution {
        beta: Array1::from(beta),
        converged,
        n_sweeps: sweeps,
    }
}

/// Solves the weighted problem by rescaling: divide column `j` by `w_j`,
/// solve a plain lasso, divide the solution by `w_j` again. Excluded
/// coordinates are dropped before rescaling and restored as exact zeros;
/// a finite weight of zero cannot be rescaled and is an error here.
pub fn solve_via_rescaling(
    y: &Array1<f64>,
    x: &Array2<f64>,
    lambda: f64,
    weights: &[PenaltyWeight],
    epsilon_inner: f64,
    max_inner_iter: usize,
) -> Result<Array1<f64>> {
    let p = x.ncols();
    let kept: Vec<usize> = (0..p).filter(|j| !weights[*j].is_excluded()).collect();
    for &j in &kept {
        if weights[j].value() == 0.0 {
            return Err(Error::ZeroWeightInRescaling(j));
        }
    }
    let mut x_resc = Array2::zeros((x.nrows(), kept.len()));
    for (k, &j) in kept.iter().enumerate() {
        let w = weights[j].value();
        for i in 0..x.nrows() {
            x_resc[[i, k]] = x[[i, j]] / w;
        }
    }
    let prob = WlsProblem {
        y_star: y.clone(),
        x_star: x_resc,
        lambda,
        weights: vec![PenaltyWeight::Finite(1.0); kept.len()],
        warm_start: None,
    };
    let sol = solve_weighted_lasso(&prob, epsilon_inner, max_inner_iter);
    let mut beta = Array1::zeros(p);
    for (k, &j) in kept.iter().enumerate() {
        beta[j] = sol.beta[k] / weights[j].value();
    }
    Ok(beta)
}

/// The subproblem objective; exposed for tests and the fitting loop.
pub fn objective(prob: &WlsProblem, beta: &Array1<f64>) -> f64 {
    let r = &prob.y_star - &prob.x_star.dot(beta);
    let quad: f64 = r.iter().map(|v| v * v).sum();
    quad + prob.lambda * crate::weights::penalty_value(&prob.weights, beta.as_slice().unwrap())
}

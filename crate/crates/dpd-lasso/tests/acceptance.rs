//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured quantities (visible with `--nocapture`).
//!
//! Run with:
//!   cargo test --release -p dpd-lasso --test acceptance -- --nocapture

use ndarray::{array, Array1, Array2};
use once_cell::sync::Lazy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use dpd_lasso::diagnostics::{if_beta1, if_sigma, numeric_if_check, tau_scale, trimmed_rmse, IfContext};
use dpd_lasso::dpdloss::dpd_loss;
use dpd_lasso::mmfit::{fit, fit_auto, initialize, update_sigma};
use dpd_lasso::simharness::{method, run_study, Contamination, Method, Setting, SimReport, SimScenario};
use dpd_lasso::weights::PenaltyWeight;
use dpd_lasso::wlasso::{solve_via_rescaling, solve_weighted_lasso, WlsProblem};
use dpd_lasso::{
    fit_path, standardize, Dataset, FitConfig, Initializer, SelectionConfig, WeightScheme,
};

fn gaussian_instance(
    n: usize,
    beta: &Array1<f64>,
    sigma0: f64,
    seed: u64,
) -> (Array1<f64>, Array2<f64>) {
    let p = beta.len();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let x = Array2::from_shape_fn((n, p), |_| normal.sample(&mut rng));
    let y = x.dot(beta) + Array1::from_shape_fn(n, |_| sigma0 * normal.sample(&mut rng));
    (y, x)
}

fn desk_methods(gamma: f64, scheme: WeightScheme) -> Method {
    method(
        &format!("gamma={gamma:?},scheme={scheme:?}"),
        FitConfig {
            gamma,
            weight_scheme: scheme,
            ..FitConfig::default()
        },
        SelectionConfig::default(),
    )
}

/// Clean Setting A study shared by criteria 5, 7 and 9.
static CLEAN_A: Lazy<SimReport> = Lazy::new(|| {
    let scenario = SimScenario {
        n: 100,
        p: 50,
        setting: Setting::A,
        contamination: Contamination::None,
        n_replications: 50,
        seed: 20_240_501,
        ..SimScenario::default()
    };
    let methods = vec![
        desk_methods(0.3, WeightScheme::HardThreshold),
        desk_methods(0.3, WeightScheme::Scad { a: 3.7 }),
    ];
    run_study(&scenario, &methods).expect("clean study")
});

/// 10% response-outlier study shared by criterion 6.
static YOUT_A: Lazy<SimReport> = Lazy::new(|| {
    let scenario = SimScenario {
        n: 100,
        p: 50,
        setting: Setting::A,
        contamination: Contamination::YOutliers {
            frac: 0.1,
            mean: 20.0,
            sd: 1.0,
        },
        n_replications: 50,
        seed: 20_240_502,
        ..SimScenario::default()
    };
    let methods = vec![
        desk_methods(0.5, WeightScheme::HardThreshold),
        desk_methods(0.0, WeightScheme::Unit),
    ];
    run_study(&scenario, &methods).expect("y-outlier study")
});

/// 10% covariate-outlier study shared by criterion 7.
static XOUT_A: Lazy<SimReport> = Lazy::new(|| {
    let scenario = SimScenario {
        n: 100,
        p: 50,
        setting: Setting::A,
        contamination: Contamination::XOutliers {
            frac: 0.1,
            n_cols: 10,
            mean: 20.0,
            sd: 1.0,
            random_cols: false,
        },
        n_replications: 50,
        seed: 20_240_501,
        ..SimScenario::default()
    };
    let methods = vec![desk_methods(0.3, WeightScheme::HardThreshold)];
    run_study(&scenario, &methods).expect("x-outlier study")
});

#[test]
fn criterion_01_gamma_zero_reduction() {
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    let mut worst_beta_gap = 0.0f64;
    let mut worst_loss_gap = 0.0f64;
    for i in 0..100 {
        let p = 10;
        let beta_true = Array1::from_shape_fn(p, |j| if j < 3 { rng.gen_range(0.5..2.0) } else { 0.0 });
        let (y, x) = gaussian_instance(50, &beta_true, 0.5, 10_000 + i);
        let ds = standardize(&y, &x).unwrap();
        let lambda = rng.gen_range(0.005..0.1);
        let cfg = FitConfig {
            gamma: 0.0,
            lambda,
            weight_scheme: WeightScheme::Unit,
            initializer: Initializer::OlsLassoNonRobust,
            epsilon_outer: 1e-14,
            epsilon_inner: 1e-12,
            max_outer_iter: 1000,
            max_inner_iter: 200_000,
            ..FitConfig::default()
        };
        let model = fit_auto(&ds, &cfg).unwrap();
        // At the joint optimum the coefficient block solves a plain lasso
        // at 2 n sigma^2 lambda.
        let lam_sub = 2.0 * ds.n() as f64 * model.sigma * model.sigma * lambda;
        let prob = WlsProblem {
            y_star: ds.y.clone(),
            x_star: ds.x.clone(),
            lambda: lam_sub,
            weights: vec![PenaltyWeight::Finite(1.0); p],
            warm_start: None,
        };
        let direct = solve_weighted_lasso(&prob, 1e-12, 200_000);
        for j in 0..p {
            worst_beta_gap = worst_beta_gap.max((model.beta_std[j] - direct.beta[j]).abs());
        }

        // Loss continuity at the fitted point.
        let at_zero = dpd_loss(&ds, &model.beta_std, model.sigma, 0.0).unwrap();
        let near_zero = dpd_loss(&ds, &model.beta_std, model.sigma, 1e-6).unwrap();
        worst_loss_gap = worst_loss_gap.max((near_zero - at_zero).abs());
    }
    assert!(worst_beta_gap < 1e-6, "beta gap {worst_beta_gap}");
    assert!(worst_loss_gap < 1e-4, "loss gap {worst_loss_gap}");
    println!(
        "criterion 01 (gamma->0 reduction): PASS — max |beta - lasso| = {worst_beta_gap:.2e}, max loss gap = {worst_loss_gap:.2e}"
    );
}

#[test]
fn criterion_02_mm_descent_matrix() {
    let beta_true = {
        let mut b = Array1::zeros(20);
        b[0] = 3.0;
        b[1] = 1.5;
        b[4] = 2.0;
        b
    };
    let mut n_fits = 0;
    let mut worst_rise = 0.0f64;
    for (d, data_kind) in ["clean", "y_out", "x_out"].iter().enumerate() {
        let (mut y, mut x) = gaussian_instance(80, &beta_true, 0.5, 200 + d as u64);
        let mut rng = ChaCha12Rng::seed_from_u64(300 + d as u64);
        let shift = Normal::new(20.0, 1.0).unwrap();
        match *data_kind {
            "y_out" => {
                for i in 0..8 {
                    y[i] += shift.sample(&mut rng);
                }
            }
            "x_out" => {
                for i in 0..8 {
                    for j in 0..5 {
                        x[[i, j]] += shift.sample(&mut rng);
                    }
                }
            }
            _ => {}
        }
        let ds = standardize(&y, &x).unwrap();
        for &gamma in &[0.1, 0.3, 0.5, 1.0] {
            for scheme in [
                WeightScheme::Unit,
                WeightScheme::HardThreshold,
                WeightScheme::Scad { a: 3.7 },
            ] {
                let cfg = FitConfig {
                    gamma,
                    weight_scheme: scheme,
                    ..FitConfig::default()
                };
                let sel = SelectionConfig {
                    n_lambdas: 4,
                    lambda_min_ratio: 0.002,
                    ..SelectionConfig::default()
                };
                let path = fit_path(&ds, &cfg, &sel).unwrap();
                for m in &path.models {
                    n_fits += 1;
                    for w in m.objective_trace.windows(2) {
                        worst_rise = worst_rise.max(w[1] - w[0]);
                    }
                }
            }
        }
    }
    assert!(
        worst_rise <= 1e-10,
        "objective rose by {worst_rise} somewhere in the matrix"
    );
    println!(
        "criterion 02 (MM descent): PASS — {n_fits} fits, worst trace increase = {worst_rise:.2e}"
    );
}

#[test]
fn criterion_03_solver_oracle_equivalence() {
    let mut rng = ChaCha12Rng::seed_from_u64(303);

    // Brute-force grid oracle on 50 problems with p <= 2.
    let mut worst_gap = 0.0f64;
    for i in 0..50 {
        let p = 1 + (i % 2);
        let n = rng.gen_range(4..10);
        let x = Array2::from_shape_fn((n, p), |_| rng.gen_range(-1.5..1.5));
        let y = Array1::from_shape_fn(n, |_| rng.gen_range(-2.0..2.0));
        let lambda = rng.gen_range(0.05..1.5);
        let weights: Vec<PenaltyWeight> = (0..p)
            .map(|_| PenaltyWeight::Finite(rng.gen_range(0.5..2.0)))
            .collect();
        let prob = WlsProblem {
            y_star: y.clone(),
            x_star: x.clone(),
            lambda,
            weights: weights.clone(),
            warm_start: None,
        };
        let sol = solve_weighted_lasso(&prob, 1e-12, 200_000);
        assert!(sol.converged);
        let obj_cd = {
            let r = &y - &x.dot(&sol.beta);
            r.iter().map(|v| v * v).sum::<f64>()
                + lambda
                    * sol
                        .beta
                        .iter()
                        .zip(weights.iter())
                        .map(|(b, w)| w.value() * b.abs())
                        .sum::<f64>()
        };

        // Precompute Gram terms so each grid point costs O(1).
        let yy: f64 = y.iter().map(|v| v * v).sum();
        let g = x.t().dot(&x);
        let c = x.t().dot(&y);
        let mut best = f64::INFINITY;
        if p == 1 {
            for a in 0..=6000 {
                let b0 = -3.0 + a as f64 * 1e-3;
                let quad = yy - 2.0 * c[0] * b0 + g[[0, 0]] * b0 * b0;
                let obj = quad + lambda * weights[0].value() * b0.abs();
                if obj < best {
                    best = obj;
                }
            }
        } else {
            for a in 0..=6000 {
                let b0 = -3.0 + a as f64 * 1e-3;
                let pen0 = lambda * weights[0].value() * b0.abs();
                let base = yy - 2.0 * c[0] * b0 + g[[0, 0]] * b0 * b0 + pen0;
                for bidx in 0..=6000 {
                    let b1 = -3.0 + bidx as f64 * 1e-3;
                    let obj = base - 2.0 * c[1] * b1
                        + g[[1, 1]] * b1 * b1
                        + 2.0 * g[[0, 1]] * b0 * b1
                        + lambda * weights[1].value() * b1.abs();
                    if obj < best {
                        best = obj;
                    }
                }
            }
        }
        worst_gap = worst_gap.max((obj_cd - best).abs());
        assert!(sol.beta.iter().all(|b| b.abs() < 2.5), "solution left the grid box");
    }
    assert!(worst_gap < 1e-4, "objective gap {worst_gap}");

    // Rescaling equivalence on 200 problems with p <= 6.
    let mut worst_resc = 0.0f64;
    for _ in 0..200 {
        let p = rng.gen_range(1..7);
        let n = rng.gen_range(5..15);
        let x = Array2::from_shape_fn((n, p), |_| rng.gen_range(-2.0..2.0));
        let y = Array1::from_shape_fn(n, |_| rng.gen_range(-2.0..2.0));
        let lambda = rng.gen_range(0.01..2.0);
        let weights: Vec<PenaltyWeight> = (0..p)
            .map(|_| PenaltyWeight::Finite(rng.gen_range(0.25..4.0)))
            .collect();
        let prob = WlsProblem {
            y_star: y.clone(),
            x_star: x.clone(),
            lambda,
            weights: weights.clone(),
            warm_start: None,
        };
        let direct = solve_weighted_lasso(&prob, 1e-12, 200_000);
        let resc = solve_via_rescaling(&y, &x, lambda, &weights, 1e-12, 200_000).unwrap();
        for j in 0..p {
            worst_resc = worst_resc.max((direct.beta[j] - resc[j]).abs());
        }
    }
    assert!(worst_resc < 1e-8, "rescaling gap {worst_resc}");
    println!(
        "criterion 03 (solver oracles): PASS — grid objective gap = {worst_gap:.2e}, rescaling gap = {worst_resc:.2e}"
    );
}

#[test]
fn criterion_04_sigma_fixed_point() {
    let beta_true = array![2.0, -1.0, 0.5, 0.0, 1.5];
    let mut worst = 0.0f64;
    for (k, &gamma) in [0.1, 0.5].iter().enumerate() {
        let (y, x) = gaussian_instance(200, &beta_true, 0.5, 400 + k as u64);
        let ds = standardize(&y, &x).unwrap();
        let cfg = FitConfig {
            gamma,
            lambda: 0.01,
            weight_scheme: WeightScheme::Unit,
            epsilon_outer: 1e-15,
            epsilon_inner: 1e-12,
            max_outer_iter: 2000,
            max_inner_iter: 200_000,
            ..FitConfig::default()
        };
        let model = fit_auto(&ds, &cfg).unwrap();
        assert!(model.converged);
        let r = ds.residuals(&model.beta_std);
        let n = ds.n() as f64;
        let mut lhs = 0.0;
        for ri in r.iter() {
            let s = ri / model.sigma;
            lhs += (-0.5 * gamma * s * s).exp() * (1.0 - s * s);
        }
        lhs /= n;
        let target = gamma / (1.0 + gamma).powf(1.5);
        worst = worst.max((lhs - target).abs());
    }
    assert!(worst < 1e-5, "estimating-equation residual {worst}");
    println!("criterion 04 (sigma fixed point): PASS — worst residual = {worst:.2e}");
}

#[test]
fn criterion_05_clean_setting_a_reproduction() {
    let ad = &CLEAN_A.methods[0];
    assert_eq!(ad.n_failed, 0);
    let n_tp_perfect = ad.rows.iter().filter(|r| r.tp == 1.0).count();
    let frac_perfect = n_tp_perfect as f64 / ad.rows.len() as f64;
    let n_ms3 = ad.rows.iter().filter(|r| r.ms == 3.0).count();
    assert!(
        frac_perfect >= 0.95,
        "TP = 1.00 in only {n_tp_perfect}/{} replications",
        ad.rows.len()
    );
    assert!(
        (3.0..=3.8).contains(&ad.mean.ms),
        "mean MS = {}",
        ad.mean.ms
    );
    assert!(ad.mean.ee_sigma < 0.10, "mean EE = {}", ad.mean.ee_sigma);
    assert!(
        n_ms3 * 10 >= ad.rows.len() * 9,
        "MS = 3 in only {n_ms3}/{} replications",
        ad.rows.len()
    );
    println!(
        "criterion 05 (clean Setting A): PASS — TP=1 in {:.0}%, mean MS = {:.2}, mean EE = {:.4}",
        100.0 * frac_perfect,
        ad.mean.ms,
        ad.mean.ee_sigma
    );
}

#[test]
fn criterion_06_y_outlier_robustness_contrast() {
    let robust = &YOUT_A.methods[0]; // gamma = 0.5, hard-threshold
    let ls = &YOUT_A.methods[1]; // gamma = 0, unit
    assert_eq!(robust.n_failed, 0);
    assert_eq!(ls.n_failed, 0);
    let tp_gain = robust.mean.tp - ls.mean.tp;
    assert!(tp_gain >= 0.3, "TP gain {tp_gain}");
    assert!(
        robust.mean.ee_sigma < 0.15,
        "robust EE = {}",
        robust.mean.ee_sigma
    );
    assert!(ls.mean.ee_sigma > 1.0, "LS EE = {}", ls.mean.ee_sigma);
    println!(
        "criterion 06 (Y-outlier contrast): PASS — TP {:.2} vs {:.2}, EE {:.3} vs {:.3}",
        robust.mean.tp, ls.mean.tp, robust.mean.ee_sigma, ls.mean.ee_sigma
    );
}

#[test]
fn criterion_07_x_outlier_invariance() {
    let clean = &CLEAN_A.methods[0];
    let xout = &XOUT_A.methods[0];
    assert_eq!(xout.n_failed, 0);
    let gap = (clean.mean.mses - xout.mean.mses).abs();
    assert!(gap < 0.01, "MSES moved by {gap} under X-outliers");
    println!(
        "criterion 07 (X-outlier invariance): PASS — MSES {:.5} (clean) vs {:.5} (contaminated)",
        clean.mean.mses, xout.mean.mses
    );
}

#[test]
fn criterion_08_influence_function_suite() {
    // Analytic boundedness over |r| <= 1e6 for gamma in {0.3, 0.5, 1}.
    for &gamma in &[0.3, 0.5, 1.0] {
        let ctx = IfContext::new(array![1.0], 1.0, gamma, &array![[1.0]], None).unwrap();
        let mut sup_b = 0.0f64;
        let mut sup_s = 0.0f64;
        let beta = array![0.0];
        let x0 = array![0.0];
        let mut r = 0.0f64;
        while r <= 1e6 {
            let vb = if_beta1(&ctx, 1.0 + r, &array![1.0], 0.0).unwrap()[0].abs();
            let vs = if_sigma(1.0, gamma, r, &x0, &beta).abs();
            sup_b = sup_b.max(vb);
            sup_s = sup_s.max(vs);
            r = (r + 1e-3) * 1.001;
        }
        assert!(sup_b.is_finite() && sup_b < 100.0, "gamma={gamma}: sup_b={sup_b}");
        assert!(sup_s.is_finite() && sup_s < 100.0, "gamma={gamma}: sup_s={sup_s}");
    }

    // Scale IF at gamma 0 grows without bound.
    let beta = array![0.0];
    let x0 = array![0.0];
    let g3 = if_sigma(1.0, 0.0, 1e3, &x0, &beta).abs();
    let g4 = if_sigma(1.0, 0.0, 1e4, &x0, &beta).abs();
    assert!(g4 / g3 > 50.0, "growth ratio {}", g4 / g3);

    // Numeric derivative against the analytic IF: sign on every
    // coordinate, norm within a factor of 2.
    let n = 500;
    let beta_true = array![1.5, -1.0, 0.5];
    let (y, x) = gaussian_instance(n, &beta_true, 0.5, 808);
    let ds = Dataset::raw(y, x.clone()).unwrap();
    let cfg = FitConfig {
        gamma: 0.5,
        lambda: 0.0,
        weight_scheme: WeightScheme::Unit,
        initializer: Initializer::HuberLassoIrls,
        epsilon_outer: 1e-12,
        max_outer_iter: 500,
        ..FitConfig::default()
    };
    let clean_fit = fit_auto(&ds, &cfg).unwrap();
    let x_t = array![1.0, 0.8, -0.6];
    let y_t = x_t.dot(&clean_fit.beta_std) + 2.0;
    let numeric = numeric_if_check(&ds, &cfg, (y_t, &x_t), 1e-3).unwrap();
    let ctx = IfContext::from_sample(
        clean_fit.beta_std.clone(),
        clean_fit.sigma,
        0.5,
        &x,
        None,
    )
    .unwrap();
    let analytic = if_beta1(&ctx, y_t, &x_t, 0.0).unwrap();
    for j in 0..3 {
        assert!(
            numeric[j] * analytic[j] > 0.0,
            "sign mismatch at {j}: numeric {} vs analytic {}",
            numeric[j],
            analytic[j]
        );
    }
    let nn = numeric.iter().map(|v| v * v).sum::<f64>().sqrt();
    let na = analytic.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ratio = nn / na;
    assert!(
        (0.5..=2.0).contains(&ratio),
        "norm ratio {ratio}: numeric {nn} vs analytic {na}"
    );
    println!(
        "criterion 08 (influence functions): PASS — growth ratio {:.0}, numeric/analytic norm ratio {ratio:.3}",
        g4 / g3
    );
}

#[test]
fn criterion_09_scad_weight_substitution() {
    let ad = &CLEAN_A.methods[0];
    let aw = &CLEAN_A.methods[1];
    assert_eq!(aw.n_failed, 0);
    assert!(
        aw.mean.tp == 1.0,
        "SCAD-weighted TP = {} (want exactly 1.0)",
        aw.mean.tp
    );
    assert!(
        aw.mean.mses <= 2.0 * ad.mean.mses,
        "SCAD MSES {} vs hard-threshold {}",
        aw.mean.mses,
        ad.mean.mses
    );
    println!(
        "criterion 09 (SCAD substitution): PASS — MSES {:.5} (scad) vs {:.5} (adaptive), TP = {:.2}",
        aw.mean.mses, ad.mean.mses, aw.mean.tp
    );
}

#[test]
fn criterion_10_tau_scale_and_trimmed_rmse() {
    // Independent straight-line reimplementation.
    fn tau_ref(x: &[f64]) -> f64 {
        let n = x.len();
        let med = |v: &mut Vec<f64>| -> f64 {
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if n % 2 == 1 {
                v[n / 2]
            } else {
                0.5 * (v[n / 2 - 1] + v[n / 2])
            }
        };
        let m = med(&mut x.to_vec());
        let s0 = med(&mut x.iter().map(|t| (t - m).abs()).collect());
        let mut sw = 0.0;
        let mut sxw = 0.0;
        for &t in x {
            let u = (t - m) / s0;
            let w = if u.abs() <= 4.5 {
                (1.0 - (u / 4.5) * (u / 4.5)).powi(2)
            } else {
                0.0
            };
            sw += w;
            sxw += t * w;
        }
        let mu = sxw / sw;
        let acc: f64 = x
            .iter()
            .map(|&t| {
                let u = (t - mu) / s0;
                (u * u).min(9.0)
            })
            .sum();
        s0 * s0 / n as f64 * acc
    }

    let mut rng = ChaCha12Rng::seed_from_u64(1010);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(5..120);
        let sample: Vec<f64> = (0..n)
            .map(|_| normal.sample(&mut rng) * rng.gen_range(0.5..3.0))
            .collect();
        let a = tau_scale(&sample).unwrap();
        let b = tau_ref(&sample);
        worst = worst.max((a - b).abs() / (1.0 + b.abs()));

        // Location invariance and c^2 scale equivariance.
        let shifted: Vec<f64> = sample.iter().map(|v| v + 17.25).collect();
        let scaled: Vec<f64> = sample.iter().map(|v| v * 2.5).collect();
        let t_shift = tau_scale(&shifted).unwrap();
        let t_scale = tau_scale(&scaled).unwrap();
        assert!((t_shift - a).abs() < 1e-10 * (1.0 + a.abs()));
        assert!((t_scale - 6.25 * a).abs() < 1e-10 * (1.0 + 6.25 * a.abs()));
    }
    assert!(worst < 1e-12, "dual-implementation gap {worst}");

    // Trimmed RMSE sanity on the same draws.
    let r = [1.0, 1.0, 1.0, 100.0];
    assert!((trimmed_rmse(&r, 0.75).unwrap() - 1.0).abs() < 1e-15);
    for _ in 0..20 {
        let n = rng.gen_range(2..50);
        let sample: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        assert!(trimmed_rmse(&sample, 0.9).unwrap() <= trimmed_rmse(&sample, 1.0).unwrap() + 1e-12);
    }
    println!("criterion 10 (tau-scale / trimmed RMSE): PASS — dual-implementation gap = {worst:.2e}");
}

/// Companion check to the studies above: a quick sanity pass over the
/// shared reports so a silent regression in the harness shows up even if
/// an individual criterion is skipped.
#[test]
fn study_reports_are_complete() {
    for (name, report, methods) in [
        ("clean", &*CLEAN_A, 2usize),
        ("y-outliers", &*YOUT_A, 2),
        ("x-outliers", &*XOUT_A, 1),
    ] {
        assert_eq!(report.methods.len(), methods, "{name}");
        assert_eq!(report.n_replications, 50, "{name}");
        for m in &report.methods {
            assert_eq!(m.n_ok + m.n_failed, 50, "{name}/{}", m.name);
            assert!(m.mean.tp >= 0.0 && m.mean.tp <= 1.0);
            assert!(m.mean.tn >= 0.0 && m.mean.tn <= 1.0);
        }
    }
}

/// The sigma update alone, iterated at fixed coefficients, lands on the
/// estimating-equation root (supplement to criterion 4: isolates the
/// update from the full fit).
#[test]
fn sigma_update_iterates_to_estimating_equation_root() {
    let beta_true = array![2.0, -1.0, 0.5, 0.0, 1.5];
    let (y, x) = gaussian_instance(200, &beta_true, 0.5, 404);
    let ds = Dataset::raw(y, x).unwrap();
    let (b0, s0) = initialize(
        &ds,
        &FitConfig {
            gamma: 0.3,
            ..FitConfig::default()
        },
    )
    .unwrap();
    let model = fit(
        &ds,
        &FitConfig {
            gamma: 0.3,
            lambda: 0.0,
            weight_scheme: WeightScheme::Unit,
            epsilon_outer: 1e-14,
            max_outer_iter: 1000,
            ..FitConfig::default()
        },
        &b0,
        s0,
    )
    .unwrap();
    let mut sigma = 1.0;
    for _ in 0..500 {
        let next = update_sigma(&ds, &model.beta_std, sigma, 0.3).unwrap();
        if (next - sigma).abs() < 1e-15 {
            sigma = next;
            break;
        }
        sigma = next;
    }
    assert!((sigma - model.sigma).abs() < 1e-6);
}

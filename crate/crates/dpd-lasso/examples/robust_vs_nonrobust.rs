//! Side-by-side contrast of the least-squares limit (gamma = 0) and a
//! robust fit (gamma = 0.5) as response contamination grows.
//!
//! Run with: cargo run --release --example robust_vs_nonrobust

use dpd_lasso::{fit_auto, Dataset, FitConfig, WeightScheme};
use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn coefficient_error(est: &Array1<f64>, truth: &Array1<f64>) -> f64 {
    est.iter()
        .zip(truth.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn main() {
    let n = 100;
    let p = 15;
    let sigma0 = 0.5;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let x = Array2::from_shape_fn((n, p), |_| normal.sample(&mut rng));
    let mut beta_true = Array1::zeros(p);
    beta_true[0] = 3.0;
    beta_true[1] = 1.5;
    beta_true[4] = 2.0;
    let y_clean =
        x.dot(&beta_true) + Array1::from_shape_fn(n, |_| sigma0 * normal.sample(&mut rng));
    let shift = Normal::new(20.0, 1.0).unwrap();

    println!(
        "{:>10} {:>14} {:>14} {:>10} {:>10}",
        "outliers", "err(gamma=0)", "err(gamma=.5)", "sig(g=0)", "sig(g=.5)"
    );
    for n_out in [0usize, 5, 10, 15, 20] {
        let mut y = y_clean.clone();
        for i in 0..n_out {
            y[i] += shift.sample(&mut rng);
        }
        let ds = Dataset::raw(y, x.clone()).expect("dataset");
        let mut errs = Vec::new();
        let mut sigs = Vec::new();
        for gamma in [0.0, 0.5] {
            let cfg = FitConfig {
                gamma,
                lambda: 0.02,
                weight_scheme: WeightScheme::Unit,
                ..FitConfig::default()
            };
            let m = fit_auto(&ds, &cfg).expect("fit");
            errs.push(coefficient_error(&m.beta, &beta_true));
            sigs.push(m.sigma);
        }
        println!(
            "{:>9}% {:>14.4} {:>14.4} {:>10.4} {:>10.4}",
            n_out,
            errs[0],
            errs[1],
            sigs[0],
            sigs[1]
        );
    }
    println!();
    println!("true sigma = {sigma0}; the robust column should stay near it.");
}

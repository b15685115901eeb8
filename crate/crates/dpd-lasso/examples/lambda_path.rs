//! Fit a full regularization path and let HBIC pick the model.
//!
//! Run with: cargo run --release --example lambda_path

use dpd_lasso::{fit_path, standardize, FitConfig, SelectionConfig};
use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn main() {
    let n = 100;
    let p = 30;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let x = Array2::from_shape_fn((n, p), |_| normal.sample(&mut rng));
    let mut beta_true = Array1::zeros(p);
    beta_true[0] = 3.0;
    beta_true[1] = 1.5;
    beta_true[4] = 2.0;
    let y = x.dot(&beta_true) + Array1::from_shape_fn(n, |_| 0.5 * normal.sample(&mut rng));

    let ds = standardize(&y, &x).expect("standardize");
    let cfg = FitConfig {
        gamma: 0.3,
        ..FitConfig::default()
    };
    let sel = SelectionConfig {
        n_lambdas: 30,
        ..SelectionConfig::default()
    };
    let path = fit_path(&ds, &cfg, &sel).expect("path");

    println!("{:>4} {:>12} {:>4} {:>9} {:>10}", "k", "lambda", "ms", "sigma", "hbic");
    for k in 0..path.lambdas.len() {
        let m = &path.models[k];
        let marker = if k == path.selected_index { "  <- selected" } else { "" };
        println!(
            "{k:>4} {:>12.5e} {:>4} {:>9.4} {:>10.4}{marker}",
            path.lambdas[k],
            m.model_size(),
            m.sigma,
            path.hbic[k]
        );
    }
    let best = path.selected();
    println!();
    println!(
        "selected lambda = {:.5e}, support = {:?}",
        path.lambdas[path.selected_index],
        best.support
    );
}

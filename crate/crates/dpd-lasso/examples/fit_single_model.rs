//! Fit one robust sparse model at fixed (gamma, lambda) and inspect it.
//!
//! Run with: cargo run --release --example fit_single_model

use dpd_lasso::{fit_auto, Dataset, FitConfig, WeightScheme};
use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn main() {
    // y = 3 x1 + 1.5 x2 + 2 x5 + noise, with a handful of corrupted
    // responses thrown in.
    let n = 120;
    let p = 12;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let x = Array2::from_shape_fn((n, p), |_| normal.sample(&mut rng));
    let beta_true = {
        let mut b = Array1::zeros(p);
        b[0] = 3.0;
        b[1] = 1.5;
        b[4] = 2.0;
        b
    };
    let mut y = x.dot(&beta_true) + Array1::from_shape_fn(n, |_| 0.5 * normal.sample(&mut rng));
    for i in 0..8 {
        y[i] += 25.0; // gross response outliers
    }

    // The generative model has no intercept, so fit the raw sample; use
    // `standardize` when modeling real data on arbitrary scales.
    let ds = Dataset::raw(y, x).expect("dataset");
    let cfg = FitConfig {
        gamma: 0.5,
        lambda: 0.01,
        weight_scheme: WeightScheme::HardThreshold,
        ..FitConfig::default()
    };
    let model = fit_auto(&ds, &cfg).expect("fit");

    println!("converged: {} after {} iterations", model.converged, model.n_outer_iter);
    println!("sigma_hat: {:.4} (true 0.5)", model.sigma);
    println!("intercept: {:.4}", model.intercept);
    println!("support (0-based): {:?}", model.support);
    println!();
    println!("{:>4} {:>10} {:>10}", "j", "beta_hat", "beta_true");
    for j in 0..p {
        if model.beta[j] != 0.0 || beta_true[j] != 0.0 {
            println!("{j:>4} {:>10.4} {:>10.4}", model.beta[j], beta_true[j]);
        }
    }
    println!();
    println!(
        "objective trace (first/last): {:.6} -> {:.6}",
        model.objective_trace.first().unwrap(),
        model.objective_trace.last().unwrap()
    );
}

//! Robust prediction-error statistics: tau-scale and trimmed RMSE of
//! test residuals, contrasted with their non-robust counterparts.
//!
//! Run with: cargo run --release --example prediction_statistics

use dpd_lasso::diagnostics::{tau_scale, trimmed_rmse};
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn main() {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
    let normal = Normal::new(0.0, 0.5).unwrap();
    let clean: Vec<f64> = (0..200).map(|_| normal.sample(&mut rng)).collect();
    let mut contaminated = clean.clone();
    let shift = Normal::new(20.0, 1.0).unwrap();
    for r in contaminated.iter_mut().take(20) {
        *r += shift.sample(&mut rng);
    }

    println!("{:<22} {:>12} {:>12}", "statistic", "clean", "10% outliers");
    let rmse = |r: &[f64]| trimmed_rmse(r, 1.0).unwrap();
    println!(
        "{:<22} {:>12.4} {:>12.4}",
        "rmse",
        rmse(&clean),
        rmse(&contaminated)
    );
    println!(
        "{:<22} {:>12.4} {:>12.4}",
        "trimmed rmse (90%)",
        trimmed_rmse(&clean, 0.9).unwrap(),
        trimmed_rmse(&contaminated, 0.9).unwrap()
    );
    println!(
        "{:<22} {:>12.4} {:>12.4}",
        "tau-scale",
        tau_scale(&clean).unwrap(),
        tau_scale(&contaminated).unwrap()
    );
    println!();
    println!("the robust rows barely move; the plain RMSE explodes.");
}

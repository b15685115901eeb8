//! Influence functions of the coefficient and scale estimators, and the
//! numeric contamination derivative that cross-checks them.
//!
//! Run with: cargo run --release --example influence_functions

use dpd_lasso::diagnostics::{if_beta1, if_sigma, numeric_if_check, IfContext};
use dpd_lasso::{FitConfig, Initializer, WeightScheme};
use ndarray::{array, Array1, Array2};
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn main() {
    // Coefficient IF over a sweep of contamination residuals: bounded and
    // redescending for gamma > 0, linear (unbounded) at gamma = 0.
    println!("coefficient influence at contamination residual r (s=1, sigma=1):");
    println!("{:>10} {:>12} {:>12} {:>12}", "r", "gamma=0", "gamma=0.3", "gamma=1");
    for r in [0.5, 1.0, 2.0, 5.0, 10.0, 100.0] {
        let row: Vec<f64> = [0.0, 0.3, 1.0]
            .iter()
            .map(|&g| {
                let ctx = IfContext::new(array![1.0], 1.0, g, &array![[1.0]], None).unwrap();
                if_beta1(&ctx, 1.0 + r, &array![1.0], 0.0).unwrap()[0]
            })
            .collect();
        println!("{r:>10.1} {:>12.4} {:>12.4} {:>12.4}", row[0], row[1], row[2]);
    }

    println!();
    println!("scale influence at standardized residual rt:");
    println!("{:>10} {:>12} {:>12}", "rt", "gamma=0", "gamma=0.5");
    let b = array![0.0];
    let xt = array![0.0];
    for rt in [0.0, 1.0, 2.0, 10.0, 100.0] {
        println!(
            "{rt:>10.1} {:>12.4} {:>12.4}",
            if_sigma(1.0, 0.0, rt, &xt, &b),
            if_sigma(1.0, 0.5, rt, &xt, &b)
        );
    }

    // Numeric cross-check: refit with a replicated contamination point.
    println!();
    println!("numeric contamination derivative vs analytic IF (n=500, gamma=0.5):");
    let n = 500;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(21);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let beta_true = array![1.5, -1.0, 0.5];
    let x = Array2::from_shape_fn((n, 3), |_| normal.sample(&mut rng));
    let y = x.dot(&beta_true) + Array1::from_shape_fn(n, |_| 0.5 * normal.sample(&mut rng));
    let ds = dpd_lasso::Dataset::raw(y, x.clone()).unwrap();
    let cfg = FitConfig {
        gamma: 0.5,
        lambda: 0.0,
        weight_scheme: WeightScheme::Unit,
        initializer: Initializer::HuberLassoIrls,
        ..FitConfig::default()
    };
    let x_t = array![1.0, 0.5, -0.5];
    let y_t = x_t.dot(&beta_true) + 2.0;
    let numeric = numeric_if_check(&ds, &cfg, (y_t, &x_t), 1e-3).unwrap();
    let ctx = IfContext::from_sample(beta_true.clone(), 0.5, 0.5, &x, None).unwrap();
    let analytic = if_beta1(&ctx, y_t, &x_t, 0.0).unwrap();
    println!("{:>6} {:>12} {:>12}", "coord", "numeric", "analytic");
    for j in 0..3 {
        println!("{j:>6} {:>12.4} {:>12.4}", numeric[j], analytic[j]);
    }
}

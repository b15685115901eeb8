use dpd_lasso::*;
use dpd_lasso::simharness::*;

fn main() {
    let scenario = SimScenario {
        n: 100, p: 50, setting: Setting::A,
        contamination: Contamination::YOutliers { frac: 0.1, mean: 20.0, sd: 1.0 },
        n_replications: 1, seed: 20_240_502, ..SimScenario::default()
    };
    let (mut train, _test, beta0, _s0) = generate(&scenario, 0).unwrap();
    contaminate(&mut train, &scenario, 0);
    let ds = standardize(&train.y, &train.x).unwrap();
    let cfg = FitConfig { gamma: 0.5, weight_scheme: WeightScheme::HardThreshold,
        max_outer_iter: 400, epsilon_outer: 1e-10, ..FitConfig::default() };
    let (b0, s0) = mmfit::initialize(&ds, &cfg).unwrap();
    println!("init sigma={s0:.4}, init residual MAD check");
    // true-beta residuals on standardized scale for reference
    let bstd: Vec<f64> = (0..50).map(|j| beta0[j] * ds.column_scales[j]).collect();
    let bstd = ndarray::Array1::from(bstd);
    let r_true = ds.residuals(&bstd);
    let clean_sd = (r_true.iter().take(90).map(|v| v*v).sum::<f64>() / 90.0).sqrt();
    println!("(std-scale) residual rms at truth over all rows: {:.3}", (r_true.iter().map(|v| v*v).sum::<f64>()/100.0).sqrt());
    println!("approx clean-row rms at truth: {clean_sd:.3}");

    for lam in [3.2682e-3, 8.7676e-3] {
        let cfg_l = FitConfig { lambda: lam, ..cfg.clone() };
        let m = mmfit::fit(&ds, &cfg_l, &b0, s0).unwrap();
        println!("--- lam={lam:.4e}: ms={} sigma={:.4} conv={} iters={} trace_len={}",
            m.model_size(), m.sigma, m.converged, m.n_outer_iter, m.objective_trace.len());
        let t = &m.objective_trace;
        let show: Vec<String> = t.iter().take(8).map(|v| format!("{v:.6}")).collect();
        println!("  trace head: {}", show.join(", "));
        let show: Vec<String> = t.iter().rev().take(3).rev().map(|v| format!("{v:.8}")).collect();
        println!("  trace tail: {}", show.join(", "));
        println!("  beta[0..5] = {:?}", &m.beta_std.to_vec()[..5]);
    }
}

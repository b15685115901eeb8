use dpd_lasso::*;
use dpd_lasso::simharness::*;

fn main() {
    let scenario = SimScenario {
        n: 100, p: 50, setting: Setting::A,
        contamination: Contamination::YOutliers { frac: 0.1, mean: 20.0, sd: 1.0 },
        n_replications: 1, seed: 20_240_502, ..SimScenario::default()
    };
    let (mut train, _test, _b0, _s0) = generate(&scenario, 0).unwrap();
    contaminate(&mut train, &scenario, 0);
    let ds = standardize(&train.y, &train.x).unwrap();
    let cfg = FitConfig { gamma: 0.5, weight_scheme: WeightScheme::HardThreshold, ..FitConfig::default() };
    let (b0, s0) = mmfit::initialize(&ds, &cfg).unwrap();
    println!("init sigma = {s0:.4}");
    let sel = SelectionConfig::default();
    let path = fit_path(&ds, &cfg, &sel).unwrap();
    for k in 0..path.lambdas.len() {
        let m = &path.models[k];
        println!("k={k:2} lam={:10.4e} ms={:3} sigma={:8.4} hbic={:9.4} conv={}",
            path.lambdas[k], m.model_size(), m.sigma, path.hbic[k], m.converged);
    }
    println!("selected = {} (lam={:.4e})", path.selected_index, path.lambdas[path.selected_index]);
}

//! Synthetic-data generation, contamination injection, performance
//! metrics and replication studies.
//!
//! Randomness is organized as counter-based substreams keyed by
//! `(seed, replication, purpose)`, so replications can run in parallel
//! without changing any result.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Deserialize;

use crate::datamodel::{Dataset, FitConfig, FittedModel};
use crate::error::{Error, Result};
use crate::selection::{fit_path, SelectionConfig};

/// Sparse coefficient pattern of the generative model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Setting {
    /// Three active covariates among the first five.
    A,
    /// Nine active covariates: three blocks of twenty, each opening with
    /// the Setting-A pattern.
    B,
}

/// Contamination applied to the training sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Contamination {
    None,
    /// Additive shifts on the response for a random fraction of rows.
    YOutliers { frac: f64, mean: f64, sd: f64 },
    /// Additive shifts on `n_cols` covariate columns for a random
    /// fraction of rows. Columns are the first `n_cols` unless
    /// `random_cols` is set.
    XOutliers {
        frac: f64,
        n_cols: usize,
        mean: f64,
        sd: f64,
        random_cols: bool,
    },
}

#[derive(Debug, Clone)]
pub struct SimScenario {
    pub n: usize,
    pub p: usize,
    pub setting: Setting,
    pub contamination: Contamination,
    pub sigma0: f64,
    /// Base of the Toeplitz correlation `rho^|i-j|` between covariates.
    pub rho: f64,
    pub n_replications: usize,
    pub seed: u64,
}

impl Default for SimScenario {
    fn default() -> Self {
        SimScenario {
            n: 100,
            p: 50,
            setting: Setting::A,
            contamination: Contamination::None,
            sigma0: 0.5,
            rho: 0.5,
            n_replications: 50,
            seed: 0,
        }
    }
}

/// Raw (unstandardized) sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RawData {
    pub y: Array1<f64>,
    pub x: Array2<f64>,
}

/// True coefficient vector for a setting.
pub fn true_beta(setting: Setting, p: usize) -> Result<Array1<f64>> {
    let block = [3.0, 1.5, 0.0, 0.0, 2.0];
    match setting {
        Setting::A => {
            if p < 5 {
                return Err(Error::PTooSmall(p));
            }
            let mut b = Array1::zeros(p);
            for (j, v) in block.iter().enumerate() {
                b[j] = *v;
            }
            Ok(b)
        }
        Setting::B => {
            if p < 60 {
                return Err(Error::PTooSmall(p));
            }
            let mut b = Array1::zeros(p);
            for k in 0..3 {
                for (j, v) in block.iter().enumerate() {
                    b[20 * k + j] = *v;
                }
            }
            Ok(b)
        }
    }
}

/// Substream purposes; keep indices below `STREAMS_PER_REP`.
const STREAM_TRAIN_X: u64 = 0;
const STREAM_TRAIN_NOISE: u64 = 1;
const STREAM_TEST_X: u64 = 2;
const STREAM_TEST_NOISE: u64 = 3;
const STREAM_CONTAMINATION: u64 = 4;
const STREAMS_PER_REP: u64 = 8;

fn stream_rng(seed: u64, rep: u64, purpose: u64) -> ChaCha12Rng {
    debug_assert!(purpose < STREAMS_PER_REP);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(rep * STREAMS_PER_REP + purpose);
    rng
}

/// Rows with Toeplitz covariance `rho^|i-j|` realized exactly by the
/// AR(1) recursion `x_j = rho x_{j-1} + sqrt(1-rho^2) z_j`.
fn toeplitz_rows(rng: &mut ChaCha12Rng, n: usize, p: usize, rho: f64) -> Array2<f64> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let innov = (1.0 - rho * rho).sqrt();
    let mut x = Array2::zeros((n, p));
    for i in 0..n {
        let mut prev = normal.sample(rng);
        x[[i, 0]] = prev;
        for j in 1..p {
            let next = rho * prev + innov * normal.sample(rng);
            x[[i, j]] = next;
            prev = next;
        }
    }
    x
}

/// Generates the training and test samples for one replication,
/// deterministic in `(scenario.seed, rep_index)`. The test sample is
/// always clean.
pub fn generate(
    scenario: &SimScenario,
    rep_index: usize,
) -> Result<(RawData, RawData, Array1<f64>, f64)> {
    let beta0 = true_beta(scenario.setting, scenario.p)?;
    let rep = rep_index as u64;
    let normal = Normal::new(0.0, 1.0).unwrap();

    let make = |sx: u64, se: u64, n: usize| -> RawData {
        let mut rng_x = stream_rng(scenario.seed, rep, sx);
        let x = toeplitz_rows(&mut rng_x, n, scenario.p, scenario.rho);
        let mut rng_e = stream_rng(scenario.seed, rep, se);
        let noise =
            Array1::from_shape_fn(n, |_| scenario.sigma0 * normal.sample(&mut rng_e));
        let y = x.dot(&beta0) + &noise;
        RawData { y, x }
    };

    let train = make(STREAM_TRAIN_X, STREAM_TRAIN_NOISE, scenario.n);
    let test = make(STREAM_TEST_X, STREAM_TEST_NOISE, 100);
    Ok((train, test, beta0, scenario.sigma0))
}

/// Picks `count` distinct indices from `0..n` by partial Fisher-Yates.
fn choose_distinct(rng: &mut ChaCha12Rng, n: usize, count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for k in 0..count.min(n) {
        let j = rng.gen_range(k..n);
        idx.swap(k, j);
    }
    idx.truncate(count.min(n));
    idx
}

/// Applies the scenario's contamination in place, deterministic in
/// `(scenario.seed, rep_index)`.
pub fn contaminate(data: &mut RawData, scenario: &SimScenario, rep_index: usize) {
    let mut rng = stream_rng(scenario.seed, rep_index as u64, STREAM_CONTAMINATION);
    let n = data.y.len();
    match scenario.contamination {
        Contamination::None => {}
        Contamination::YOutliers { frac, mean, sd } => {
            let count = (frac * n as f64).floor() as usize;
            let rows = choose_distinct(&mut rng, n, count);
            let dist = Normal::new(mean, sd).unwrap();
            for i in rows {
                data.y[i] += dist.sample(&mut rng);
            }
        }
        Contamination::XOutliers {
            frac,
            n_cols,
            mean,
            sd,
            random_cols,
        } => {
            let count = (frac * n as f64).floor() as usize;
            let rows = choose_distinct(&mut rng, n, count);
            let p = data.x.ncols();
            let cols: Vec<usize> = if random_cols {
                choose_distinct(&mut rng, p, n_cols.min(p))
            } else {
                (0..n_cols.min(p)).collect()
            };
            let dist = Normal::new(mean, sd).unwrap();
            for &i in &rows {
                for &j in &cols {
                    data.x[[i, j]] += dist.sample(&mut rng);
                }
            }
        }
    }
}

/// Per-replication performance metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRow {
    pub ms: f64,
    pub tp: f64,
    pub tn: f64,
    pub mses: f64,
    pub msen: f64,
    pub ee_sigma: f64,
    pub aprb: f64,
}

/// Computes selection and estimation metrics of a fitted model against
/// the generative truth, plus mean absolute prediction error on the
/// clean test sample.
pub fn metrics(
    model: &FittedModel,
    beta0: &Array1<f64>,
    sigma0: f64,
    test: &RawData,
) -> Result<MetricRow> {
    let p = beta0.len();
    if model.beta.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "model has {} coefficients but truth has {p}",
            model.beta.len()
        )));
    }
    let support_true: Vec<bool> = beta0.iter().map(|b| *b != 0.0).collect();
    let s = support_true.iter().filter(|t| **t).count();
    let mut in_hat = vec![false; p];
    for &j in &model.support {
        in_hat[j] = true;
    }
    let tp_count = (0..p).filter(|&j| in_hat[j] && support_true[j]).count();
    let tn_count = (0..p).filter(|&j| !in_hat[j] && !support_true[j]).count();

    let mut mses = 0.0;
    let mut msen = 0.0;
    for j in 0..p {
        let d = model.beta[j] - beta0[j];
        if support_true[j] {
            mses += d * d;
        } else {
            msen += d * d;
        }
    }
    let pred = model.predict(&test.x);
    let aprb = (&test.y - &pred).iter().map(|v| v.abs()).sum::<f64>() / test.y.len() as f64;

    Ok(MetricRow {
        ms: model.support.len() as f64,
        tp: tp_count as f64 / s as f64,
        tn: tn_count as f64 / (p - s) as f64,
        mses: mses / s as f64,
        msen: msen / (p - s) as f64,
        ee_sigma: (model.sigma - sigma0).abs(),
        aprb,
    })
}

/// A named estimator to run in a study.
#[derive(Debug, Clone)]
pub struct Method {
    pub name: String,
    pub fit: FitConfig,
    pub selection: SelectionConfig,
}

/// Mean and standard error of each metric for one method.
#[derive(Debug, Clone)]
pub struct MethodSummary {
    pub name: String,
    pub mean: MetricRow,
    pub se: MetricRow,
    pub n_ok: usize,
    pub n_failed: usize,
    /// Every successful replication, in replication order.
    pub rows: Vec<MetricRow>,
}

#[derive(Debug, Clone)]
pub struct SimReport {
    pub methods: Vec<MethodSummary>,
    pub n_replications: usize,
}

fn summarize(name: &str, rows: Vec<Option<MetricRow>>) -> MethodSummary {
    let ok: Vec<MetricRow> = rows.iter().filter_map(|r| *r).collect();
    let n_ok = ok.len();
    let n_failed = rows.len() - n_ok;
    let nf = n_ok as f64;
    let get = |f: fn(&MetricRow) -> f64| -> (f64, f64) {
        if n_ok == 0 {
            return (f64::NAN, f64::NAN);
        }
        let mean = ok.iter().map(|r| f(r)).sum::<f64>() / nf;
        if n_ok == 1 {
            return (mean, 0.0);
        }
        let var = ok.iter().map(|r| (f(r) - mean).powi(2)).sum::<f64>() / (nf - 1.0);
        (mean, (var / nf).sqrt())
    };
    let (ms, ms_se) = get(|r| r.ms);
    let (tp, tp_se) = get(|r| r.tp);
    let (tn, tn_se) = get(|r| r.tn);
    let (mses, mses_se) = get(|r| r.mses);
    let (msen, msen_se) = get(|r| r.msen);
    let (ee, ee_se) = get(|r| r.ee_sigma);
    let (aprb, aprb_se) = get(|r| r.aprb);
    MethodSummary {
        name: name.to_string(),
        mean: MetricRow {
            ms,
            tp,
            tn,
            mses,
            msen,
            ee_sigma: ee,
            aprb,
        },
        se: MetricRow {
            ms: ms_se,
            tp: tp_se,
            tn: tn_se,
            mses: mses_se,
            msen: msen_se,
            ee_sigma: ee_se,
            aprb: aprb_se,
        },
        n_ok,
        n_failed,
        rows: ok,
    }
}

/// Runs every method on every replication and aggregates. Replications
/// run in parallel; failures are counted per method and excluded from the
/// averages, never silently dropped.
///
/// The generative model has no intercept and unit-scale covariates, so
/// fits run on the raw sample. Mean-centering here would push the
/// contamination shift into every clean residual.
pub fn run_study(scenario: &SimScenario, methods: &[Method]) -> Result<SimReport> {
    let reps = scenario.n_replications;
    let per_rep: Vec<Vec<Option<MetricRow>>> = (0..reps)
        .into_par_iter()
        .map(|rep| -> Vec<Option<MetricRow>> {
            let generated = generate(scenario, rep);
            let (mut train, test, beta0, sigma0) = match generated {
                Ok(v) => v,
                Err(_) => return vec![None; methods.len()],
            };
            contaminate(&mut train, scenario, rep);
            let ds = match Dataset::raw(train.y.clone(), train.x.clone()) {
                Ok(d) => d,
                Err(_) => return vec![None; methods.len()],
            };
            methods
                .iter()
                .map(|m| {
                    fit_path(&ds, &m.fit, &m.selection)
                        .ok()
                        .and_then(|path| metrics(path.selected(), &beta0, sigma0, &test).ok())
                })
                .collect()
        })
        .collect();

    let methods_out = methods
        .iter()
        .enumerate()
        .map(|(k, m)| summarize(&m.name, per_rep.iter().map(|r| r[k]).collect()))
        .collect();
    Ok(SimReport {
        methods: methods_out,
        n_replications: reps,
    })
}

impl SimReport {
    /// CSV with one row per method, header matching the metric names.
    pub fn to_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "method,ms,ms_se,tp,tp_se,tn,tn_se,mses,mses_se,msen,msen_se,ee_sigma,ee_sigma_se,aprb,aprb_se,n_failed"
        )?;
        for m in &self.methods {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                m.name,
                m.mean.ms,
                m.se.ms,
                m.mean.tp,
                m.se.tp,
                m.mean.tn,
                m.se.tn,
                m.mean.mses,
                m.se.mses,
                m.mean.msen,
                m.se.msen,
                m.mean.ee_sigma,
                m.se.ee_sigma,
                m.mean.aprb,
                m.se.aprb,
                m.n_failed
            )?;
        }
        Ok(())
    }
}

/// Convenience constructor used by the CLI and examples.
pub fn method(name: &str, fit: FitConfig, selection: SelectionConfig) -> Method {
    Method {
        name: name.to_string(),
        fit,
        selection,
    }
}

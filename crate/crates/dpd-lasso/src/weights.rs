//! Penalty weight functions mapping an initial coefficient estimate to
//! per-coordinate penalty multipliers.

use crate::datamodel::WeightScheme;

/// A per-coordinate penalty multiplier. `Excluded` stands for an infinite
/// weight: the coordinate is pinned to zero by the solver's active set and
/// never enters any arithmetic, so `0 * inf` cannot arise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PenaltyWeight {
    Finite(f64),
    Excluded,
}

impl PenaltyWeight {
    pub fn is_excluded(&self) -> bool {
        matches!(self, PenaltyWeight::Excluded)
    }

    /// The finite weight value; panics on excluded coordinates.
    pub fn value(&self) -> f64 {
        match self {
            PenaltyWeight::Finite(w) => *w,
            PenaltyWeight::Excluded => panic!("excluded coordinate has no finite weight"),
        }
    }
}

/// Evaluates the weight scheme at an initial estimate.
///
/// * `Unit`: all ones.
/// * `HardThreshold`: `1/|b_j|`, with coordinates whose initial estimate is
///   exactly zero excluded from the model.
/// * `Scad{a}`: the SCAD penalty derivative at threshold `scad_lambda`,
///   `I(|b| <= L) + (aL - |b|)_+ / ((a-1)L)` for `|b| > L`; a weight of 0
///   leaves the coordinate unpenalized.
pub fn compute_weights(
    scheme: WeightScheme,
    beta_init: &[f64],
    scad_lambda: f64,
) -> Vec<PenaltyWeight> {
    beta_init
        .iter()
        .map(|&b| match scheme {
            WeightScheme::Unit => PenaltyWeight::Finite(1.0),
            WeightScheme::HardThreshold => {
                if b == 0.0 {
                    PenaltyWeight::Excluded
                } else {
                    PenaltyWeight::Finite(1.0 / b.abs())
                }
            }
            WeightScheme::Scad { a } => {
                let s = b.abs();
                let w = if s <= scad_lambda {
                    1.0
                } else {
                    (a * scad_lambda - s).max(0.0) / ((a - 1.0) * scad_lambda)
                };
                PenaltyWeight::Finite(w)
            }
        })
        .collect()
}

/// Penalty term `sum_j w_j |beta_j|`, skipping excluded coordinates (whose
/// beta entries are required to be zero).
pub fn penalty_value(weights: &[PenaltyWeight], beta: &[f64]) -> f64 {
    weights
        .iter()
        .zip(beta.iter())
        .map(|(w, b)| match w {
            PenaltyWeight::Finite(w) => w * b.abs(),
            PenaltyWeight::Excluded => {
                debug_assert_eq!(*b, 0.0, "excluded coordinate must stay at zero");
                0.0
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite(ws: &[PenaltyWeight]) -> Vec<f64> {
        ws.iter().map(|w| w.value()).collect()
    }

    #[test]
    fn unit_weights() {
        let w = compute_weights(WeightScheme::Unit, &[3.0, -1.0, 0.0, 2.5], 1.0);
        assert_eq!(finite(&w), vec![1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn hard_threshold_weights() {
        let w = compute_weights(WeightScheme::HardThreshold, &[2.0, 0.0, -0.5], 1.0);
        assert_eq!(w[0], PenaltyWeight::Finite(0.5));
        assert!(w[1].is_excluded());
        assert_eq!(w[2], PenaltyWeight::Finite(2.0));
    }

    #[test]
    fn scad_piecewise_values() {
        let scheme = WeightScheme::Scad { a: 3.7 };
        let w = compute_weights(scheme, &[0.0, 2.0, 3.7, 5.0], 1.0);
        let vals = finite(&w);
        assert_eq!(vals[0], 1.0);
        assert!((vals[1] - 1.7 / 2.7).abs() < 1e-15);
        assert_eq!(vals[2], 0.0);
        assert_eq!(vals[3], 0.0);
    }

    #[test]
    fn scad_shape_on_grid() {
        // Non-increasing in |b|, continuous, in [0,1], exactly 1 on
        // [0, L] and exactly 0 beyond a*L.
        let a = 3.7;
        let lam = 0.8;
        let scheme = WeightScheme::Scad { a };
        let mut prev = f64::INFINITY;
        let mut b = 0.0;
        while b <= 5.0 {
            let w = compute_weights(scheme, &[b], lam)[0].value();
            assert!((0.0..=1.0).contains(&w));
            assert!(w <= prev + 1e-12);
            if b <= lam {
                assert_eq!(w, 1.0);
            }
            if b >= a * lam {
                assert_eq!(w, 0.0);
            }
            // Continuity against a nearby point.
            let w2 = compute_weights(scheme, &[b + 1e-9], lam)[0].value();
            assert!((w - w2).abs() < 1e-6);
            prev = w;
            b += 1e-3;
        }
    }

    #[test]
    fn hard_threshold_product_identity_and_equivariance() {
        let betas = [0.3, -2.0, 7.5, -0.01];
        let w = compute_weights(WeightScheme::HardThreshold, &betas, 1.0);
        for (wj, b) in w.iter().zip(betas.iter()) {
            assert!((wj.value() * b.abs() - 1.0).abs() < 1e-12);
        }
        // w(c b) = w(b)/c for c > 0.
        let c = 3.5;
        let scaled: Vec<f64> = betas.iter().map(|b| b * c).collect();
        let wc = compute_weights(WeightScheme::HardThreshold, &scaled, 1.0);
        for (wj, wcj) in w.iter().zip(wc.iter()) {
            assert!((wcj.value() - wj.value() / c).abs() < 1e-12);
        }
    }

    #[test]
    fn penalty_skips_excluded() {
        let w = vec![
            PenaltyWeight::Finite(2.0),
            PenaltyWeight::Excluded,
            PenaltyWeight::Finite(0.5),
        ];
        let val = penalty_value(&w, &[1.0, 0.0, -4.0]);
        assert!((val - 4.0).abs() < 1e-15);
    }
}

//! Weak-coupling predictions (`alpha = 1 + delta`, `|beta| << 1/n`).
//!
//! On the ring the doubly degenerate free level `k = j` splits into
//! `j ± |beta| lambda_j` with `lambda_j = |Σ_k e^{2 i j x_k}| / (2π)`. On the
//! segment the simple level `j/2` shifts by a term linear in `beta` set by
//! `gamma_j = Σ_k sin(j x_k) / (2π)`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SystemConfig, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubletPrediction {
    pub j: u64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub k_lower: f64,
    pub k_upper: f64,
    /// Predicted unfolded odd spacing `4 |beta| lambda_plus`.
    pub predicted_odd_spacing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentPrediction {
    pub j: u64,
    pub gamma: f64,
    pub k_pred: f64,
}

/// `(lambda_-, lambda_+)` for level `j`.
pub fn lambda_pm(j: u64, positions: &[f64]) -> (f64, f64) {
    let (mut c, mut s) = (0.0, 0.0);
    for &x in positions {
        let (sn, cs) = (2.0 * j as f64 * x).sin_cos();
        c += cs;
        s += sn;
    }
    let lp = c.hypot(s) / TAU;
    (-lp, lp)
}

/// Whether `|beta|` is small enough for the first-order expansion to be trusted,
/// using `|beta| <= 1/(2n)` as the working threshold.
pub fn within_weak_coupling(config: &SystemConfig) -> bool {
    config.n() == 0 || config.beta().abs() <= 1.0 / (2.0 * config.n() as f64)
}

/// Predictions for `j = 1..=max_j`.
pub fn perturbative_doublets(config: &SystemConfig, max_j: u64) -> Result<Vec<DoubletPrediction>> {
    if config.topology() != Topology::Circle {
        return Err(Error::Usage("doublet predictions need a circle configuration".into()));
    }
    let b = config.beta().abs();
    Ok((1..=max_j)
        .map(|j| {
            let (lm, lp) = lambda_pm(j, config.positions());
            DoubletPrediction {
                j,
                lambda_minus: lm,
                lambda_plus: lp,
                k_lower: j as f64 + b * lm,
                k_upper: j as f64 + b * lp,
                predicted_odd_spacing: 4.0 * b * lp,
            }
        })
        .collect())
}

/// Predicted even spacings `2 - 2|beta| (lambda_{j+1} + lambda_j)` from consecutive doublets.
pub fn predicted_even_spacings(doublets: &[DoubletPrediction], beta: f64) -> Vec<f64> {
    doublets
        .windows(2)
        .map(|w| 2.0 - 2.0 * beta.abs() * (w[1].lambda_plus + w[0].lambda_plus))
        .collect()
}

/// `gamma_j = Σ_k sin(j x_k) / (2π)` with the predicted segment root.
///
/// Solving the first-order segment equation gives `k_j = j/2 - beta gamma_j`;
/// the sign is fixed against the exact solver.
pub fn gamma_segment(j: u64, positions: &[f64], beta: f64) -> SegmentPrediction {
    let gamma = positions.iter().map(|&x| (j as f64 * x).sin()).sum::<f64>() / TAU;
    SegmentPrediction {
        j,
        gamma,
        k_pred: j as f64 / 2.0 - beta * gamma,
    }
}

/// Predicted unfolded segment spacings `1 - 2 beta (gamma_{j+1} - gamma_j)`.
pub fn predicted_segment_spacings(predictions: &[SegmentPrediction], beta: f64) -> Vec<f64> {
    predictions
        .windows(2)
        .map(|w| 1.0 - 2.0 * beta * (w[1].gamma - w[0].gamma))
        .collect()
}

/// A warning when `|beta|` is outside the weak-coupling range, or `None`.
pub fn coupling_warning(config: &SystemConfig) -> Option<String> {
    if within_weak_coupling(config) {
        return None;
    }
    let b = config.beta().abs();
    let n = config.n() as f64;
    Some(format!(
        "|beta| = {b:.4e} exceeds 1/(2n) = {:.4e}; first-order predictions are not expected to hold (|beta| n = {:.3})",
        0.5 / n,
        b * n
    ))
}

/// `λ⁺_j` for `j = 1..=count`.
pub fn lambda_plus_sequence(positions: &[f64], count: u64) -> Vec<f64> {
    (1..=count).map(|j| lambda_pm(j, positions).1).collect()
}

/// `cos(2 j x)` for `j = 1..=count`.
pub fn cosine_sequence(x: f64, count: u64) -> Vec<f64> {
    (1..=count).map(|j| (2.0 * j as f64 * x).cos()).collect()
}

/// CDF of `cos(θ)` for uniform `θ`: `1 - arccos(x)/π` on `[-1, 1]`.
pub fn arcsine_cdf(x: f64) -> f64 {
    if x <= -1.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        1.0 - x.acos() / PI
    }
}

/// `Σ_k sin(j x_k) · √(2/n)` for `j = 1..=count`: each term has variance 1/2, so for
/// independent phases the sums approach the standard normal law.
pub fn rescaled_sine_sums(positions: &[f64], count: u64) -> Vec<f64> {
    let scale = (2.0 / positions.len().max(1) as f64).sqrt();
    (1..=count)
        .map(|j| positions.iter().map(|&x| (j as f64 * x).sin()).sum::<f64>() * scale)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{beta_of_alpha, prime_positions};

    #[test]
    fn lambda_examples() {
        for j in [1, 7, 1000] {
            let (lm, lp) = lambda_pm(j, &[2.7]);
            assert!((lp - 1.0 / TAU).abs() < 1e-15);
            assert_eq!(lm, -lp);
        }
        let (_, lp) = lambda_pm(1, &[1.0, 2.0]);
        assert!((lp - 0.17198356548572724).abs() < 1e-14);
        let x = prime_positions(30);
        for j in 1..500 {
            let (_, lp) = lambda_pm(j, &x);
            assert!(lp <= 30.0 / TAU + 1e-12);
        }
    }

    #[test]
    fn doublet_examples() {
        let cfg = SystemConfig::new(Topology::Circle, 1.01, vec![3.3]).unwrap();
        let b = beta_of_alpha(1.01).unwrap();
        for d in perturbative_doublets(&cfg, 20).unwrap() {
            assert!((d.predicted_odd_spacing - 4.0 * b.abs() / TAU).abs() < 1e-15);
            assert!((d.predicted_odd_spacing - 0.006334368310770946).abs() < 1e-12);
            assert!(d.k_lower <= d.k_upper);
        }
        let free = SystemConfig::new(Topology::Circle, 1.0, prime_positions(4)).unwrap();
        let d = perturbative_doublets(&free, 10).unwrap();
        assert!(d.iter().all(|p| p.k_lower == p.j as f64 && p.k_upper == p.j as f64));
        assert!(d.iter().all(|p| p.predicted_odd_spacing == 0.0));
        assert!(predicted_even_spacings(&d, 0.0).iter().all(|&s| s == 2.0));
        let seg = SystemConfig::new(Topology::Segment, 1.01, vec![3.3]).unwrap();
        assert!(perturbative_doublets(&seg, 3).is_err());
    }

    #[test]
    fn gamma_examples() {
        let p = gamma_segment(1, &[1.0], 0.1);
        assert!((p.gamma - 0.13392426670058188).abs() < 1e-15);
        assert_eq!(gamma_segment(5, &[1.0, 2.0], 0.0).k_pred, 2.5);
        let x = prime_positions(12);
        for j in 1..300 {
            assert!(gamma_segment(j, &x, 0.3).gamma.abs() <= 12.0 / TAU);
        }
    }

    #[test]
    fn sequences() {
        assert_eq!(arcsine_cdf(-2.0), 0.0);
        assert_eq!(arcsine_cdf(0.0), 0.5);
        assert_eq!(arcsine_cdf(1.0), 1.0);
        let c = cosine_sequence(0.3, 4);
        assert!((c[3] - 2.4f64.cos()).abs() < 1e-15);
        let s = rescaled_sine_sums(&[1.0, 2.0], 1);
        assert!((s[0] - (1f64.sin() + 2f64.sin())).abs() < 1e-15);
        let l = lambda_plus_sequence(&[2.7], 5);
        assert!(l.iter().all(|v| (v - 1.0 / TAU).abs() < 1e-15));
    }

    #[test]
    fn weak_coupling_flag() {
        let weak = SystemConfig::with_prime_positions(Topology::Circle, 1.001, 47).unwrap();
        assert!(within_weak_coupling(&weak));
        let strong = SystemConfig::with_prime_positions(Topology::Circle, 1.4, 24).unwrap();
        assert!(!within_weak_coupling(&strong));
        assert!(coupling_warning(&weak).is_none());
        assert!(coupling_warning(&strong).is_some());
    }
}

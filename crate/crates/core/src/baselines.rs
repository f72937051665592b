//! Unquantized references for the multiple-access channel.
//!
//! * GMAC: Gaussian inputs, no output quantization, equal per-user SNR:
//!   `R_i ≤ log₂(1 + snr)`, `R₁ + R₂ ≤ log₂(1 + 2 snr)`.
//! * CCMAC: finite equiprobable alphabets with a continuous output. The
//!   rates are expectations over `z ~ CN(0, σ²)` of log-sum-exp expressions
//!   in the squared distances between sum points, evaluated with a product
//!   Gauss-Hermite rule.
//!
//! The Gaussian-input broadcast region is not reproduced here.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qmac::{argmax_first, Pentagon};
use crate::signals::SignalSet;

/// Gauss-Hermite rule for `∫ e^{-t²} f(t) dt`, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Newton iteration on the orthonormal Hermite recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
        let pim4 = std::f64::consts::PI.powf(-0.25);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        let mut z = 0.0f64;
        for i in 0..n.div_ceil(2) {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        nodes.reverse();
        weights.reverse();
        Self { nodes, weights }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub nodes_per_dim: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { nodes_per_dim: 32 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_dim < 8 {
            return Err(Error::InvalidParameter(format!(
                "quadrature needs at least 8 nodes per dimension, got {}",
                self.nodes_per_dim
            )));
        }
        Ok(())
    }
}

/// Closed-form two-user Gaussian MAC with Gaussian inputs.
pub fn gmac_region(snr_linear: f64) -> Pentagon {
    let single = (1.0 + snr_linear).log2();
    Pentagon {
        r1_max: single,
        r2_max: single,
        sum_max: (1.0 + 2.0 * snr_linear).log2(),
        theta: 0.0,
    }
}

/// Raised when doubling the node count moves a rate by more than 1e-3 bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyWarning {
    pub nodes_per_dim: usize,
    pub max_difference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcmacRates {
    pub pentagon: Pentagon,
    pub warning: Option<AccuracyWarning>,
}

/// `E_z log₂ Σ_c exp(-(|s - c + z|² - |z|²)/σ²)` for one true point, with the
/// exponent factorized across the two real dimensions.
fn log_sum_term(s: Complex64, candidates: &[Complex64], sigma: f64, rule: &GaussHermite, a: &mut Vec<f64>, b: &mut Vec<f64>) -> f64 {
    let n = rule.nodes.len();
    a.clear();
    b.clear();
    for c in candidates {
        let d = (s - c) / sigma;
        a.extend(rule.nodes.iter().map(|t| (-(d.re + t).powi(2)).exp()));
        b.extend(rule.nodes.iter().map(|t| (-(d.im + t).powi(2)).exp()));
    }
    let mut acc = 0.0;
    for i in 0..n {
        let ti = rule.nodes[i];
        let mut row = 0.0;
        for j in 0..n {
            let tj = rule.nodes[j];
            let mut sum = 0.0;
            for k in 0..candidates.len() {
                sum += a[k * n + i] * b[k * n + j];
            }
            row += rule.weights[j] * (sum.ln() + ti * ti + tj * tj);
        }
        acc += rule.weights[i] * row;
    }
    acc / std::f64::consts::PI / std::f64::consts::LN_2
}

fn ccmac_with_rule(x1: &SignalSet, x2: &SignalSet, sigma2: f64, rule: &GaussHermite) -> Pentagon {
    let (n1, n2) = (x1.len(), x2.len());
    let sigma = sigma2.sqrt();
    let sums: Vec<Complex64> = x1
        .points()
        .iter()
        .flat_map(|a| x2.points().iter().map(move |b| a + b))
        .collect();
    let terms: Vec<(f64, f64, f64)> = (0..n1 * n2)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new(), Vec::new()),
            |(a, b, cands), pair| {
                let (l, m) = (pair / n2, pair % n2);
                let s = sums[pair];
                let joint = log_sum_term(s, &sums, sigma, rule, a, b);
                cands.clear();
                cands.extend((0..n1).map(|l2| sums[l2 * n2 + m]));
                let given_x2 = log_sum_term(s, cands, sigma, rule, a, b);
                cands.clear();
                cands.extend((0..n2).map(|m2| sums[l * n2 + m2]));
                let given_x1 = log_sum_term(s, cands, sigma, rule, a, b);
                (joint, given_x2, given_x1)
            },
        )
        .collect();
    let norm = (n1 * n2) as f64;
    let (joint, given_x2, given_x1) = terms
        .iter()
        .fold((0.0, 0.0, 0.0), |acc, t| (acc.0 + t.0, acc.1 + t.1, acc.2 + t.2));
    Pentagon {
        r1_max: ((n1 as f64).log2() - given_x2 / norm).max(0.0),
        r2_max: ((n2 as f64).log2() - given_x1 / norm).max(0.0),
        sum_max: ((norm).log2() - joint / norm).max(0.0),
        theta: 0.0,
    }
}

fn max_rate_difference(a: &Pentagon, b: &Pentagon) -> f64 {
    (a.r1_max - b.r1_max)
        .abs()
        .max((a.r2_max - b.r2_max).abs())
        .max((a.sum_max - b.sum_max).abs())
}

/// CCMAC rates without the node-doubling check.
pub fn ccmac_rates_unchecked(x1: &SignalSet, x2: &SignalSet, sigma2: f64, quad: QuadratureSpec) -> Result<Pentagon> {
    quad.validate()?;
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidParameter(format!("σ² = {sigma2} must be positive")));
    }
    Ok(ccmac_with_rule(x1, x2, sigma2, &GaussHermite::new(quad.nodes_per_dim)))
}

/// CCMAC rates at `quad` nodes, cross-checked against twice as many nodes.
/// The finer result is returned.
pub fn ccmac_rates(x1: &SignalSet, x2: &SignalSet, sigma2: f64, quad: QuadratureSpec) -> Result<CcmacRates> {
    let coarse = ccmac_rates_unchecked(x1, x2, sigma2, quad)?;
    let fine_spec = QuadratureSpec {
        nodes_per_dim: 2 * quad.nodes_per_dim,
    };
    let fine = ccmac_rates_unchecked(x1, x2, sigma2, fine_spec)?;
    let diff = max_rate_difference(&coarse, &fine);
    Ok(CcmacRates {
        pentagon: fine,
        warning: (diff > 1e-3).then_some(AccuracyWarning {
            nodes_per_dim: quad.nodes_per_dim,
            max_difference: diff,
        }),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcmacSweep {
    /// Per-θ pentagons at the base node count.
    pub sweep: Vec<Pentagon>,
    /// Best θ re-evaluated with the doubling check.
    pub best: CcmacRates,
}

/// CCMAC over `base` and `base` rotated by each θ; the sum-rate argmax
/// (ties toward the smaller angle) is re-checked with doubled nodes.
pub fn ccmac_theta_sweep(base: &SignalSet, snr_db: f64, thetas: &[f64], quad: QuadratureSpec) -> Result<CcmacSweep> {
    let sigma2 = 10f64.powf(-snr_db / 10.0);
    let sweep: Vec<Pentagon> = thetas
        .iter()
        .map(|&t| {
            ccmac_rates_unchecked(base, &base.rotate(t), sigma2, quad).map(|p| Pentagon { theta: t, ..p })
        })
        .collect::<Result<_>>()?;
    let i = argmax_first(sweep.iter().map(|p| p.sum_max))
        .ok_or_else(|| Error::InvalidParameter("θ grid must be nonempty".into()))?;
    let theta = thetas[i];
    let mut best = ccmac_rates(base, &base.rotate(theta), sigma2, quad)?;
    best.pentagon.theta = theta;
    Ok(CcmacSweep { sweep, best })
}

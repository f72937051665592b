//! Entropies and the five mutual informations of a two-input channel with
//! equiprobable inputs, all in bits.

use crate::dmc::TransitionTable;
use crate::error::{Error, Result};

/// Mutual informations of one receiver, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiReport {
    pub i_x1_r_given_x2: f64,
    pub i_x2_r_given_x1: f64,
    pub i_x1_r: f64,
    pub i_x2_r: f64,
    pub i_x1x2_r: f64,
}

impl MiReport {
    pub fn max_abs_diff(&self, other: &MiReport) -> f64 {
        [
            self.i_x1_r_given_x2 - other.i_x1_r_given_x2,
            self.i_x2_r_given_x1 - other.i_x2_r_given_x1,
            self.i_x1_r - other.i_x1_r,
            self.i_x2_r - other.i_x2_r,
            self.i_x1x2_r - other.i_x1x2_r,
        ]
        .iter()
        .fold(0.0f64, |acc, d| acc.max(d.abs()))
    }
}

/// `-Σ p log₂ p` with `0 log 0 = 0`.
pub fn entropy(dist: &[f64]) -> Result<f64> {
    if dist.is_empty() {
        return Err(Error::InvalidDistribution("empty distribution".into()));
    }
    if dist.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::InvalidDistribution("entries must be finite and >= 0".into()));
    }
    let sum: f64 = dist.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
    }
    Ok(entropy_unchecked(dist))
}

fn entropy_unchecked(dist: &[f64]) -> f64 {
    dist.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// `log₂` of the sums of `p(k|l,m)` over `l`, over `m`, and over both.
struct ColumnSums {
    over_l: Vec<f64>,
    over_m: Vec<f64>,
    total: Vec<f64>,
}

fn column_sums(t: &TransitionTable) -> ColumnSums {
    let (n1, n2, k) = (t.n1(), t.n2(), t.outputs());
    let mut over_l = vec![0.0; n2 * k];
    let mut over_m = vec![0.0; n1 * k];
    for l in 0..n1 {
        for m in 0..n2 {
            for (j, p) in t.row(l, m).iter().enumerate() {
                over_l[m * k + j] += p;
                over_m[l * k + j] += p;
            }
        }
    }
    let mut total = vec![0.0; k];
    for m in 0..n2 {
        for j in 0..k {
            total[j] += over_l[m * k + j];
        }
    }
    let log = |v: Vec<f64>| v.into_iter().map(f64::log2).collect();
    ColumnSums {
        over_l: log(over_l),
        over_m: log(over_m),
        total: log(total),
    }
}

/// All five mutual informations via the explicit log-ratio sums.
///
/// For example `I(x₁; r | x₂) = log₂N₁ − (1/N₁N₂) Σ_{k,l,m} p(k|l,m)
/// log₂(Σ_{l'} p(k|l',m) / p(k|l,m))`; the unconditioned informations use
/// the full double sum in the numerator and the partial sum in the
/// denominator.
pub fn mutual_informations(t: &TransitionTable) -> MiReport {
    let (n1, n2, k) = (t.n1(), t.n2(), t.outputs());
    let sums = column_sums(t);
    let mut acc_x1_given_x2 = 0.0;
    let mut acc_x2_given_x1 = 0.0;
    let mut acc_joint = 0.0;
    let mut acc_x1 = 0.0;
    let mut acc_x2 = 0.0;
    for l in 0..n1 {
        for m in 0..n2 {
            let row = t.row(l, m);
            let over_l = &sums.over_l[m * k..(m + 1) * k];
            let over_m = &sums.over_m[l * k..(l + 1) * k];
            for j in 0..k {
                let p = row[j];
                if p <= 0.0 {
                    continue;
                }
                let lp = p.log2();
                let (ll, lm, lt) = (over_l[j], over_m[j], sums.total[j]);
                acc_x1_given_x2 += p * (ll - lp);
                acc_x2_given_x1 += p * (lm - lp);
                acc_joint += p * (lt - lp);
                acc_x2 += p * (lt - ll);
                acc_x1 += p * (lt - lm);
            }
        }
    }
    let norm = (n1 * n2) as f64;
    let (log_n1, log_n2) = ((n1 as f64).log2(), (n2 as f64).log2());
    let report = MiReport {
        i_x1_r_given_x2: (log_n1 - acc_x1_given_x2 / norm).max(0.0),
        i_x2_r_given_x1: (log_n2 - acc_x2_given_x1 / norm).max(0.0),
        i_x1x2_r: (log_n1 + log_n2 - acc_joint / norm).max(0.0),
        i_x1_r: (log_n1 - acc_x1 / norm).max(0.0),
        i_x2_r: (log_n2 - acc_x2 / norm).max(0.0),
    };
    debug_assert!(
        report.max_abs_diff(&entropy_form(t)) < 1e-10,
        "log-ratio and entropy forms disagree"
    );
    report
}

/// The same quantities from entropy differences, e.g. `I(x₂; r) = H(r) − H(r|x₂)`.
pub fn entropy_form(t: &TransitionTable) -> MiReport {
    let (n1, n2) = (t.n1(), t.n2());
    let marg = t.marginals();
    let h_r = entropy_unchecked(&marg.output);
    let h_r_x1 = (0..n1).map(|l| entropy_unchecked(marg.given_x1(l))).sum::<f64>() / n1 as f64;
    let h_r_x2 = (0..n2).map(|m| entropy_unchecked(marg.given_x2(m))).sum::<f64>() / n2 as f64;
    let h_r_x1x2 = (0..n1)
        .flat_map(|l| (0..n2).map(move |m| (l, m)))
        .map(|(l, m)| entropy_unchecked(t.row(l, m)))
        .sum::<f64>()
        / (n1 * n2) as f64;
    MiReport {
        i_x1_r_given_x2: (h_r_x2 - h_r_x1x2).max(0.0),
        i_x2_r_given_x1: (h_r_x1 - h_r_x1x2).max(0.0),
        i_x1_r: (h_r - h_r_x1).max(0.0),
        i_x2_r: (h_r - h_r_x2).max(0.0),
        i_x1x2_r: (h_r - h_r_x1x2).max(0.0),
    }
}

//! Exact discrete memoryless channel seen through a complex quantizer.
//!
//! For inputs `x₁ = X₁(l)`, `x₂ = X₂(m)` the receiver observes
//! `y = x₁ + x₂ + z`, `z ~ CN(0, σ²)`, and each real component of `y` falls
//! into a quantizer cell with a Gaussian probability of variance `σ²/2`. The
//! table stores `p(r = R(k) | l, m)` as the product of the two component
//! probabilities.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quantizer::{ComplexQuantizer, Quantizer, QuantizerSpec};
use crate::report::fmt_sig;
use crate::signals::{sum_set, SignalSet};

/// Circularly symmetric complex Gaussian noise `CN(0, σ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    variance: f64,
}

impl NoiseModel {
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance > 0.0) || !variance.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be positive and finite, got {variance}"
            )));
        }
        Ok(Self { variance })
    }

    /// Noise variance giving `snr_db = 10 log10(power / σ²)`.
    pub fn from_snr_db(power: f64, snr_db: f64) -> Result<Self> {
        Self::new(power / 10f64.powf(snr_db / 10.0))
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn component_variance(&self) -> f64 {
        self.variance / 2.0
    }
}

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Upper tail `Q(t) = P(N(0,1) ≥ t)`.
fn upper_tail(t: f64) -> f64 {
    0.5 * libm::erfc(t * FRAC_1_SQRT_2)
}

/// Gaussian measure of `[lower, upper)` under `N(mean, component_variance)`.
///
/// Each case is written as a difference of two tails on the same side of
/// the mean, so tiny probabilities far from the mean keep full relative
/// precision.
pub fn cell_probability(lower: f64, upper: f64, mean: f64, component_variance: f64) -> f64 {
    let s = component_variance.sqrt();
    let a = (lower - mean) / s;
    let b = (upper - mean) / s;
    let p = if a >= 0.0 {
        upper_tail(a) - upper_tail(b)
    } else if b <= 0.0 {
        upper_tail(-b) - upper_tail(-a)
    } else {
        1.0 - upper_tail(b) - upper_tail(-a)
    };
    p.clamp(0.0, 1.0)
}

/// Per-component probabilities: one row of `2^b` cell probabilities per
/// `(l, m)` pair, rows ordered with `l` outer and `m` inner.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentTable {
    pub cells: usize,
    pub rows: Vec<f64>,
}

impl ComponentTable {
    fn build(means: &[f64], quantizer: &Quantizer, component_variance: f64) -> Self {
        let cells = quantizer.len();
        let rows = means
            .par_iter()
            .flat_map_iter(|&mean| {
                quantizer
                    .cells()
                    .iter()
                    .map(move |c| cell_probability(c.lower, c.upper, mean, component_variance))
            })
            .collect();
        Self { cells, rows }
    }

    pub fn row(&self, pair: usize) -> &[f64] {
        &self.rows[pair * self.cells..(pair + 1) * self.cells]
    }
}

/// `p(r = R(k) | x₁ = X₁(l), x₂ = X₂(m))` for every `(l, m, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTable {
    n1: usize,
    n2: usize,
    outputs: usize,
    probs: Vec<f64>,
    output_levels: Vec<Complex64>,
    in_phase: ComponentTable,
    quadrature: ComponentTable,
}

impl TransitionTable {
    /// Builds the table from the two users' (scaled, rotated) alphabets.
    ///
    /// The quantizer extents are taken as given; callers normally derive
    /// them from the sum set of `x1` and `x2`.
    pub fn build(x1: &SignalSet, x2: &SignalSet, cq: &ComplexQuantizer, noise: NoiseModel) -> Self {
        let (means_i, means_q): (Vec<f64>, Vec<f64>) = x1
            .points()
            .iter()
            .flat_map(|a| x2.points().iter().map(move |b| a + b))
            .map(|s| (s.re, s.im))
            .unzip();
        let var = noise.component_variance();
        let in_phase = ComponentTable::build(&means_i, &cq.in_phase, var);
        let quadrature = ComponentTable::build(&means_q, &cq.quadrature, var);

        let outputs = cq.output_count();
        let pairs = means_i.len();
        let mut probs = vec![0.0; pairs * outputs];
        probs
            .par_chunks_mut(outputs)
            .enumerate()
            .for_each(|(pair, row)| {
                let ri = in_phase.row(pair);
                let rq = quadrature.row(pair);
                for (i, pi) in ri.iter().enumerate() {
                    for (q, pq) in rq.iter().enumerate() {
                        row[i * rq.len() + q] = pi * pq;
                    }
                }
            });

        Self {
            n1: x1.len(),
            n2: x2.len(),
            outputs,
            probs,
            output_levels: cq.output_levels(),
            in_phase,
            quadrature,
        }
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn output_levels(&self) -> &[Complex64] {
        &self.output_levels
    }

    pub fn in_phase(&self) -> &ComponentTable {
        &self.in_phase
    }

    pub fn quadrature(&self) -> &ComponentTable {
        &self.quadrature
    }

    /// Conditional output distribution for the input pair `(l, m)`.
    pub fn row(&self, l: usize, m: usize) -> &[f64] {
        let pair = l * self.n2 + m;
        &self.probs[pair * self.outputs..(pair + 1) * self.outputs]
    }

    pub fn prob(&self, l: usize, m: usize, k: usize) -> f64 {
        self.row(l, m)[k]
    }

    /// Builds a table directly from conditional rows, `rows[l][m][k]`.
    ///
    /// Output levels are left as zeros and the component tables are empty;
    /// useful for information-theoretic checks on arbitrary channels.
    pub fn from_rows(rows: &[Vec<Vec<f64>>]) -> Result<Self> {
        let n1 = rows.len();
        let n2 = rows.first().map_or(0, Vec::len);
        let outputs = rows.first().and_then(|r| r.first()).map_or(0, Vec::len);
        if n1 == 0 || n2 == 0 || outputs == 0 {
            return Err(Error::InvalidDistribution("empty transition table".into()));
        }
        let mut probs = Vec::with_capacity(n1 * n2 * outputs);
        for r in rows {
            if r.len() != n2 {
                return Err(Error::InvalidDistribution("ragged transition table".into()));
            }
            for dist in r {
                if dist.len() != outputs {
                    return Err(Error::InvalidDistribution("ragged transition table".into()));
                }
                let sum: f64 = dist.iter().sum();
                if dist.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidDistribution(format!(
                        "row is not a probability vector (sum {sum})"
                    )));
                }
                probs.extend_from_slice(dist);
            }
        }
        let empty = ComponentTable {
            cells: 0,
            rows: Vec::new(),
        };
        Ok(Self {
            n1,
            n2,
            outputs,
            probs,
            output_levels: vec![Complex64::new(0.0, 0.0); outputs],
            in_phase: empty.clone(),
            quadrature: empty,
        })
    }

    /// Marginal output distributions under equiprobable inputs.
    pub fn marginals(&self) -> Marginals {
        let (n1, n2, k) = (self.n1, self.n2, self.outputs);
        let mut given_x1 = vec![0.0; n1 * k];
        let mut given_x2 = vec![0.0; n2 * k];
        for l in 0..n1 {
            for m in 0..n2 {
                let row = self.row(l, m);
                for j in 0..k {
                    given_x1[l * k + j] += row[j];
                    given_x2[m * k + j] += row[j];
                }
            }
        }
        given_x1.iter_mut().for_each(|v| *v /= n2 as f64);
        given_x2.iter_mut().for_each(|v| *v /= n1 as f64);
        let mut output = vec![0.0; k];
        for m in 0..n2 {
            for j in 0..k {
                output[j] += given_x2[m * k + j];
            }
        }
        output.iter_mut().for_each(|v| *v /= n2 as f64);
        Marginals {
            outputs: k,
            given_x1,
            given_x2,
            output,
        }
    }

    /// Writes `l,m,k,re,im,prob` rows with a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "l,m,k,re,im,prob")?;
        for l in 0..self.n1 {
            for m in 0..self.n2 {
                for (k, p) in self.row(l, m).iter().enumerate() {
                    let r = self.output_levels[k];
                    writeln!(out, "{l},{m},{k},{},{},{}", fmt_sig(r.re), fmt_sig(r.im), fmt_sig(*p))?;
                }
            }
        }
        Ok(())
    }
}

/// Transition table of `x1 + x2 + z` with quantizer extents taken from the
/// sum set of the two alphabets.
pub fn quantized_channel(
    x1: &SignalSet,
    x2: &SignalSet,
    spec: QuantizerSpec,
    noise: NoiseModel,
) -> Result<TransitionTable> {
    let cq = spec.complex(sum_set(x1, x2).extents())?;
    Ok(TransitionTable::build(x1, x2, &cq, noise))
}

/// `p(r | x₁)`, `p(r | x₂)` and `p(r)` stored as flat row-major arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub outputs: usize,
    pub given_x1: Vec<f64>,
    pub given_x2: Vec<f64>,
    pub output: Vec<f64>,
}

impl Marginals {
    pub fn given_x1(&self, l: usize) -> &[f64] {
        &self.given_x1[l * self.outputs..(l + 1) * self.outputs]
    }

    pub fn given_x2(&self, m: usize) -> &[f64] {
        &self.given_x2[m * self.outputs..(m + 1) * self.outputs]
    }
}

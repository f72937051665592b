//! Search for the exponent `p` of the power-law quantizer and the rotation
//! angle that goes with it.
//!
//! For a fixed θ, start at `p = 1` and step `p` up by one while the sum rate
//! does not drop. At the first drop, evaluate every `p⁽ᵏ⁾ + lΔ` with
//! `l ∈ {⌊−1/Δ⌋, …, ⌊1/Δ⌋}` and keep the best. The outer search repeats
//! this for every θ on the grid.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qmac::{argmax_first, Pentagon, QmacScenario};
use crate::quantizer::QuantizerKind;
use crate::report::fmt_sig;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Fine-search granularity Δ.
    pub delta: f64,
    /// Maximum number of unit steps in the coarse phase.
    pub max_iters: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            delta: 0.1,
            max_iters: 64,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!("Δ = {} must lie in (0, 1)", self.delta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Coarse,
    Fine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub phase: Phase,
    pub p: f64,
    pub sum_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchTrace {
    pub theta: f64,
    pub records: Vec<TraceRecord>,
    pub p_tilde: f64,
    pub sum_rate: f64,
    /// Pentagon at the returned exponent.
    pub pentagon: Option<Pentagon>,
}

impl SearchTrace {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "k,phase,p,sum_rate")?;
        for r in &self.records {
            let phase = match r.phase {
                Phase::Coarse => "coarse",
                Phase::Fine => "fine",
            };
            writeln!(out, "{},{phase},{},{}", r.iteration, fmt_sig(r.p), fmt_sig(r.sum_rate))?;
        }
        Ok(())
    }
}

fn evaluate(sc: &QmacScenario, theta: f64, p: f64) -> Result<Pentagon> {
    sc.pentagon_with(theta, QuantizerKind::Power(p))
}

/// Coarse-then-fine search for `p̃(θ)`.
pub fn find_p(sc: &QmacScenario, theta: f64, cfg: &SearchConfig) -> Result<SearchTrace> {
    cfg.validate()?;
    let mut records = Vec::new();
    let mut p = 1.0;
    let mut current = evaluate(sc, theta, p)?;
    records.push(TraceRecord {
        iteration: 0,
        phase: Phase::Coarse,
        p,
        sum_rate: current.sum_max,
    });

    let mut k = 0;
    loop {
        if k == cfg.max_iters {
            return Err(Error::SearchDivergence {
                trace: Box::new(SearchTrace {
                    theta,
                    p_tilde: p,
                    sum_rate: current.sum_max,
                    pentagon: Some(current),
                    records,
                }),
            });
        }
        let next = evaluate(sc, theta, p + 1.0)?;
        records.push(TraceRecord {
            iteration: k + 1,
            phase: Phase::Coarse,
            p: p + 1.0,
            sum_rate: next.sum_max,
        });
        // A bit-identical rate (p did not move any cell, e.g. 1-bit
        // quantizers) counts as no improvement.
        if next.sum_max > current.sum_max {
            p += 1.0;
            current = next;
            k += 1;
        } else {
            break;
        }
    }

    let lo = (-1.0 / cfg.delta).floor() as i64;
    let hi = (1.0 / cfg.delta).floor() as i64;
    let candidates: Vec<f64> = (lo..=hi)
        .map(|l| ((p + l as f64 * cfg.delta) * 1e12).round() / 1e12)
        .filter(|&c| c >= 1.0)
        .collect();
    let fine: Vec<Pentagon> = candidates
        .par_iter()
        .map(|&c| evaluate(sc, theta, c))
        .collect::<Result<_>>()?;
    let best = argmax_first(fine.iter().map(|f| f.sum_max)).expect("fine grid contains l = 0");
    records.extend(candidates.iter().zip(&fine).map(|(&c, f)| TraceRecord {
        iteration: k + 1,
        phase: Phase::Fine,
        p: c,
        sum_rate: f.sum_max,
    }));
    Ok(SearchTrace {
        theta,
        records,
        p_tilde: candidates[best],
        sum_rate: fine[best].sum_max,
        pentagon: Some(fine[best]),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaPrime {
    pub theta: f64,
    pub p_tilde: f64,
    pub sum_rate: f64,
    pub pentagon: Pentagon,
    /// One search per grid angle, in grid order.
    pub traces: Vec<SearchTrace>,
}

/// Runs [`find_p`] at every θ of the scenario grid and keeps the best.
pub fn find_theta_prime(sc: &QmacScenario, cfg: &SearchConfig) -> Result<ThetaPrime> {
    cfg.validate()?;
    let traces: Vec<SearchTrace> = sc
        .thetas
        .par_iter()
        .map(|&t| find_p(sc, t, cfg))
        .collect::<Result<_>>()?;
    let best = argmax_first(traces.iter().map(|t| t.sum_rate))
        .ok_or_else(|| Error::InvalidParameter("θ grid must be nonempty".into()))?;
    let t = &traces[best];
    Ok(ThetaPrime {
        theta: t.theta,
        p_tilde: t.p_tilde,
        sum_rate: t.sum_rate,
        pentagon: t.pentagon.expect("completed search has a pentagon"),
        traces,
    })
}

/// Brute-force sum rates over an explicit exponent grid, for comparison.
pub fn scan_p(sc: &QmacScenario, theta: f64, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.par_iter()
        .map(|&p| Ok((p, evaluate(sc, theta, p)?.sum_max)))
        .collect()
}

//! Canned scenarios with embedded reference values, shared by the CLI and
//! the acceptance suite.

use crate::baselines::{ccmac_theta_sweep, CcmacSweep, QuadratureSpec};
use crate::error::Result;
use crate::qbc::{QbcEvaluation, QbcScenario};
use crate::qmac::{theta_opt, QmacScenario, ThetaOpt};
use crate::quantizer::{QuantizerKind, QuantizerSpec};
use crate::search::{find_theta_prime, SearchConfig, ThetaPrime};
use crate::signals::SignalSet;

/// Row labels of the mutual-information grid, in output order.
pub const TABLE1_ROWS: [&str; 6] = [
    "I(x1;r1|x2)",
    "I(x1;r1)",
    "I(x1;r2)",
    "I(x2;r1)",
    "I(x2;r2)",
    "I(x2;r2|x1)",
];

pub const TABLE1_ALPHAS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];

/// Reference grid, rows as in [`TABLE1_ROWS`], columns as in [`TABLE1_ALPHAS`].
pub const TABLE1_REFERENCE: [[f64; 4]; 6] = [
    [0.08083, 0.37272, 0.93188, 1.59350],
    [0.00893, 0.15668, 0.71584, 1.52160],
    [0.03572, 0.20718, 0.60551, 1.19670],
    [1.52160, 0.71584, 0.15668, 0.00893],
    [1.19670, 0.60551, 0.20718, 0.03572],
    [1.31920, 0.82872, 0.43039, 0.15825],
];

pub const TABLE1_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct Table1 {
    pub evaluations: Vec<QbcEvaluation>,
}

impl Table1 {
    /// `values[row][column]`, laid out like [`TABLE1_REFERENCE`].
    pub fn values(&self) -> [[f64; 4]; 6] {
        let mut out = [[0.0; 4]; 6];
        for (c, e) in self.evaluations.iter().enumerate() {
            let col = [
                e.receiver1.i_x1_r_given_x2,
                e.receiver1.i_x1_r,
                e.receiver2.i_x1_r,
                e.receiver1.i_x2_r,
                e.receiver2.i_x2_r,
                e.receiver2.i_x2_r_given_x1,
            ];
            for (r, v) in col.into_iter().enumerate() {
                out[r][c] = v;
            }
        }
        out
    }
}

pub fn table1() -> Result<Table1> {
    let sc = QbcScenario::table1();
    let evaluations = TABLE1_ALPHAS
        .iter()
        .map(|&a| sc.evaluate(a, 0.0))
        .collect::<Result<_>>()?;
    Ok(Table1 { evaluations })
}

/// One configuration of the uniform vs. power-law comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table2Case {
    pub qam: usize,
    pub snr_db: f64,
    pub bits: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table2Reference {
    pub uniform: f64,
    pub nonuniform: f64,
    pub p_tilde: f64,
    pub gain_percent: f64,
}

pub const TABLE2_CASES: [(Table2Case, Table2Reference); 4] = [
    (
        Table2Case { qam: 16, snr_db: 15.0, bits: 2 },
        Table2Reference { uniform: 2.9144, nonuniform: 3.4675, p_tilde: 2.9, gain_percent: 18.98 },
    ),
    (
        Table2Case { qam: 16, snr_db: 15.0, bits: 3 },
        Table2Reference { uniform: 4.6290, nonuniform: 5.0787, p_tilde: 1.3, gain_percent: 9.71 },
    ),
    (
        Table2Case { qam: 64, snr_db: 22.0, bits: 2 },
        Table2Reference { uniform: 3.0891, nonuniform: 3.7486, p_tilde: 3.2, gain_percent: 21.35 },
    ),
    (
        Table2Case { qam: 64, snr_db: 22.0, bits: 3 },
        Table2Reference { uniform: 4.8910, nonuniform: 5.1790, p_tilde: 1.6, gain_percent: 5.89 },
    ),
];

pub const TABLE2_UNIFORM_TOLERANCE: f64 = 1e-2;
pub const TABLE2_NONUNIFORM_TOLERANCE: f64 = 5e-2;
pub const TABLE2_P_TOLERANCE: f64 = 0.3;
pub const TABLE2_GAIN_TOLERANCE: f64 = 1.5;

/// Default θ sweep for the MAC experiments: 0°..89° in 1° steps.
pub fn mac_theta_grid() -> Vec<f64> {
    crate::qbc::theta_grid_deg(1.0, 89.0)
}

impl Table2Case {
    pub fn scenario(&self, thetas: Vec<f64>) -> Result<QmacScenario> {
        QmacScenario::new(SignalSet::qam(self.qam)?, self.snr_db, QuantizerSpec::uniform(self.bits), thetas)
    }
}

#[derive(Debug, Clone)]
pub struct Table2Row {
    pub case: Table2Case,
    pub uniform: ThetaOpt,
    pub nonuniform: ThetaPrime,
}

impl Table2Row {
    pub fn gain_percent(&self) -> f64 {
        100.0 * (self.nonuniform.sum_rate - self.uniform.pentagon.sum_max) / self.uniform.pentagon.sum_max
    }
}

pub fn table2_uniform(case: Table2Case, thetas: Vec<f64>) -> Result<ThetaOpt> {
    theta_opt(&case.scenario(thetas)?)
}

pub fn table2_row(case: Table2Case, thetas: Vec<f64>, cfg: &SearchConfig) -> Result<Table2Row> {
    let sc = case.scenario(thetas)?;
    let uniform = theta_opt(&sc)?;
    let search_sc = QmacScenario {
        quantizer: sc.quantizer.with_kind(QuantizerKind::Power(1.0)),
        ..sc
    };
    let nonuniform = find_theta_prime(&search_sc, cfg)?;
    Ok(Table2Row { case, uniform, nonuniform })
}

pub const CCMAC_REFERENCE: f64 = 5.886;
pub const CCMAC_TOLERANCE: f64 = 2e-2;
pub const CCMAC_RATIO_REFERENCE: f64 = 49.5;
pub const CCMAC_RATIO_TOLERANCE: f64 = 1.0;

/// Unquantized 16-QAM pair at 15 dB over the given θ grid.
pub fn ccmac_16qam(thetas: &[f64], quad: QuadratureSpec) -> Result<CcmacSweep> {
    ccmac_theta_sweep(&SignalSet::qam(16)?, 15.0, thetas, quad)
}

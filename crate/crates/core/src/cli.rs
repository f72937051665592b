//! `qrate` command-line front end.
//!
//! Every command writes CSV (header row, 6 significant digits). With
//! `--out <dir>` each table goes to its own file; otherwise all tables are
//! printed to stdout, each preceded by a `# <file name>` line.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::baselines::{ccmac_theta_sweep, gmac_region, QuadratureSpec};
use crate::error::Error;
use crate::experiments::{self, TABLE2_CASES};
use crate::qbc::{alpha_grid, region, theta_grid_deg, QbcScenario};
use crate::qmac::{hull_over_theta, theta_opt, Pentagon, QmacScenario};
use crate::quantizer::{Quantizer, QuantizerKind, QuantizerSpec};
use crate::report::fmt_sig;
use crate::search::{find_p, find_theta_prime, SearchConfig, SearchTrace};
use crate::signals::SignalSet;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CHECK: i32 = 3;
pub const EXIT_ACCURACY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "qrate", version, about = "Rate regions of quantized two-user broadcast and multiple-access channels")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Compare against the embedded reference values; exit 3 on mismatch.
    #[arg(long, global = true)]
    pub check: bool,
    /// Turn numerical-accuracy warnings into exit code 4.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Worker threads (default: rayon's choice).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for CSV files; stdout if omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// QMAC: hull the pentagons of every θ instead of reporting one θ.
    #[arg(long, global = true)]
    pub hull_over_theta: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mutual-information grid of the 4-QAM, 1-bit broadcast example.
    Table1,
    /// Uniform vs. power-law quantizer sum rates for the four MAC cases.
    Table2 {
        /// Also write each case's search trace at θ′.
        #[arg(long)]
        traces: bool,
    },
    /// Broadcast-channel sweep points and hull (needs --config).
    QbcRegion,
    /// MAC pentagon at the best θ, or the θ-swept hull (needs --config).
    QmacRegion,
    /// Unquantized constellation-constrained and Gaussian MAC references.
    Baseline,
    /// Sum-signal-set points for scatter plots.
    SumsetScatter,
    /// Cells of one scalar quantizer.
    Cells {
        #[arg(long)]
        bits: u32,
        #[arg(long, default_value_t = 1.0)]
        extent: f64,
        /// Power-law exponent; uniform if omitted.
        #[arg(long)]
        p: Option<f64>,
    },
}

/// Scenario file schema.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub channel: Channel,
    /// QAM size per user.
    pub alphabets: Vec<usize>,
    /// QBC: `[snr1, snr2]`; QMAC: `[snr]` (per user).
    pub snr_db: Vec<f64>,
    /// One quantizer for every receiver, or one per receiver.
    pub quantizer: QuantizerConfig,
    #[serde(default)]
    pub grids: Grids,
    /// Per-user rotations for `sumset-scatter`.
    #[serde(default)]
    pub rotations_deg: Option<Vec<f64>>,
    /// QMAC power-law search: optimize p at the uniform θ^opt only instead
    /// of jointly over θ.
    #[serde(default)]
    pub search_at_uniform_theta: bool,
    #[serde(default)]
    pub quadrature_nodes: Option<usize>,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Qbc,
    Qmac,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum QuantizerConfig {
    Shared(QuantizerEntry),
    PerReceiver(Vec<QuantizerEntry>),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantizerEntry {
    pub kind: KindName,
    pub bits: u32,
    #[serde(default)]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindName {
    Uniform,
    Nonuniform,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    pub alpha_step: Option<f64>,
    pub theta_step_deg: Option<f64>,
    pub theta_max_deg: Option<f64>,
    pub delta: Option<f64>,
}

/// File names, relative to `--out`; defaults per command.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub points: Option<String>,
    pub hull: Option<String>,
    pub region: Option<String>,
    pub summary: Option<String>,
    pub sweep: Option<String>,
    pub trace: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Check(String),
    Accuracy(String),
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Check(_) => EXIT_CHECK,
            Self::Accuracy(_) => EXIT_ACCURACY,
            Self::Run(_) => EXIT_FAILURE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Config(m) | Self::Check(m) | Self::Accuracy(m) | Self::Run(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidAlphabet(_) | Error::InvalidParameter(_) => Self::Config(e.to_string()),
            _ => Self::Run(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Run(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

impl QuantizerEntry {
    fn spec(&self, field: &str) -> CliResult<QuantizerSpec> {
        let kind = match (self.kind, self.p) {
            (KindName::Uniform, None) => QuantizerKind::Uniform,
            (KindName::Uniform, Some(_)) => {
                return Err(CliError::Config(format!("{field}.p: only valid for kind \"nonuniform\"")))
            }
            (KindName::Nonuniform, p) => QuantizerKind::Power(p.unwrap_or(1.0)),
        };
        if self.bits == 0 || self.bits > crate::quantizer::MAX_BITS {
            return Err(CliError::Config(format!("{field}.bits: {} outside 1..=16", self.bits)));
        }
        if let QuantizerKind::Power(p) = kind {
            if !(p >= 1.0) || !p.is_finite() {
                return Err(CliError::Config(format!("{field}.p: {p} must be ≥ 1")));
            }
        }
        Ok(QuantizerSpec::new(kind, self.bits))
    }

    /// Nonuniform without a fixed `p` means "search for p".
    fn wants_search(&self) -> bool {
        self.kind == KindName::Nonuniform && self.p.is_none()
    }
}

impl Scenario {
    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn expect_channel(&self, c: Channel) -> CliResult<()> {
        if self.channel != c {
            return Err(CliError::Config(format!(
                "channel: this command needs \"{}\"",
                match c {
                    Channel::Qbc => "qbc",
                    Channel::Qmac => "qmac",
                }
            )));
        }
        Ok(())
    }

    fn alphabet(&self, i: usize) -> CliResult<SignalSet> {
        SignalSet::qam(self.alphabets[i]).map_err(|e| CliError::Config(format!("alphabets[{i}]: {e}")))
    }

    fn two_users(&self) -> CliResult<()> {
        if self.alphabets.len() != 2 {
            return Err(CliError::Config(format!(
                "alphabets: expected 2 entries, got {}",
                self.alphabets.len()
            )));
        }
        Ok(())
    }

    fn quantizers(&self, receivers: usize) -> CliResult<Vec<QuantizerEntry>> {
        match &self.quantizer {
            QuantizerConfig::Shared(q) => Ok(vec![*q; receivers]),
            QuantizerConfig::PerReceiver(v) if v.len() == receivers => Ok(v.clone()),
            QuantizerConfig::PerReceiver(v) => Err(CliError::Config(format!(
                "quantizer: expected 1 or {receivers} entries, got {}",
                v.len()
            ))),
        }
    }

    fn thetas(&self, default_max: f64) -> CliResult<Vec<f64>> {
        let step = self.grids.theta_step_deg.unwrap_or(1.0);
        let max = self.grids.theta_max_deg.unwrap_or(default_max);
        if !(step > 0.0) || !(max >= 0.0) {
            return Err(CliError::Config("grids.theta_step_deg/theta_max_deg: need step > 0, max ≥ 0".into()));
        }
        Ok(theta_grid_deg(step, max))
    }

    fn search_config(&self) -> CliResult<SearchConfig> {
        let cfg = SearchConfig {
            delta: self.grids.delta.unwrap_or(SearchConfig::default().delta),
            ..SearchConfig::default()
        };
        cfg.validate().map_err(|e| CliError::Config(format!("grids.delta: {e}")))?;
        Ok(cfg)
    }

    fn quadrature(&self) -> CliResult<QuadratureSpec> {
        let q = QuadratureSpec {
            nodes_per_dim: self.quadrature_nodes.unwrap_or(QuadratureSpec::default().nodes_per_dim),
        };
        q.validate().map_err(|e| CliError::Config(format!("quadrature_nodes: {e}")))?;
        Ok(q)
    }

    pub fn qbc(&self) -> CliResult<QbcScenario> {
        self.expect_channel(Channel::Qbc)?;
        self.two_users()?;
        if self.snr_db.len() != 2 {
            return Err(CliError::Config("snr_db: qbc needs [snr1, snr2]".into()));
        }
        let q = self.quantizers(2)?;
        let step = self.grids.alpha_step.unwrap_or(0.01);
        if !(step > 0.0 && step <= 1.0) {
            return Err(CliError::Config(format!("grids.alpha_step: {step} outside (0, 1]")));
        }
        Ok(QbcScenario {
            user1: self.alphabet(0)?,
            user2: self.alphabet(1)?,
            power: 1.0,
            snr1_db: self.snr_db[0],
            snr2_db: self.snr_db[1],
            receiver1: q[0].spec("quantizer[0]")?,
            receiver2: q[1].spec("quantizer[1]")?,
            alphas: alpha_grid(step),
            thetas: self.thetas(0.0)?,
        })
    }

    pub fn qmac(&self) -> CliResult<(QmacScenario, bool)> {
        self.expect_channel(Channel::Qmac)?;
        self.two_users()?;
        if self.alphabets[0] != self.alphabets[1] {
            return Err(CliError::Config("alphabets: qmac users share one alphabet".into()));
        }
        if self.snr_db.len() != 1 {
            return Err(CliError::Config("snr_db: qmac needs [snr]".into()));
        }
        let q = self.quantizers(1)?[0];
        let sc = QmacScenario::new(self.alphabet(0)?, self.snr_db[0], q.spec("quantizer")?, self.thetas(89.0)?)?;
        Ok((sc, q.wants_search()))
    }
}

/// Named CSV tables, flushed in insertion order.
#[derive(Debug, Default)]
pub struct Output {
    pub files: Vec<(String, String)>,
    pub notes: Vec<String>,
}

impl Output {
    fn add(&mut self, name: impl Into<String>, body: String) {
        self.files.push((name.into(), body));
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn flush(&self, dir: Option<&Path>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> std::io::Result<()> {
        match dir {
            Some(d) => {
                std::fs::create_dir_all(d)?;
                for (name, body) in &self.files {
                    std::fs::write(d.join(name), body)?;
                }
            }
            None => {
                for (name, body) in &self.files {
                    writeln!(stdout, "# {name}")?;
                    stdout.write_all(body.as_bytes())?;
                }
            }
        }
        for n in &self.notes {
            writeln!(stderr, "{n}")?;
        }
        Ok(())
    }
}

fn row(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

fn deg(rad: f64) -> String {
    fmt_sig(rad.to_degrees())
}

fn polygon_csv(header: &str, vertices: &[(f64, f64)], theta: Option<f64>) -> String {
    let mut s = String::from(header);
    for (i, (a, b)) in vertices.iter().enumerate() {
        let mut f = Vec::new();
        if let Some(t) = theta {
            f.push(deg(t));
        }
        f.extend([i.to_string(), fmt_sig(*a), fmt_sig(*b)]);
        s.push_str(&row(&f));
    }
    s
}

fn trace_csv(t: &SearchTrace) -> CliResult<String> {
    let mut buf = Vec::new();
    t.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV is UTF-8"))
}

fn cmd_table1(g: &GlobalArgs, out: &mut Output) -> CliResult<()> {
    let t = experiments::table1()?;
    let values = t.values();
    let mut s = String::from("quantity");
    for a in experiments::TABLE1_ALPHAS {
        let _ = write!(s, ",alpha={}", fmt_sig(a));
    }
    s.push('\n');
    for (name, r) in experiments::TABLE1_ROWS.iter().zip(values.iter()) {
        let mut f = vec![name.to_string()];
        f.extend(r.iter().map(|v| format!("{v:.5}")));
        s.push_str(&row(&f));
    }
    out.add("table1.csv", s);
    if g.check {
        let mut bad = Vec::new();
        for (i, name) in experiments::TABLE1_ROWS.iter().enumerate() {
            for (j, a) in experiments::TABLE1_ALPHAS.iter().enumerate() {
                let (got, want) = (values[i][j], experiments::TABLE1_REFERENCE[i][j]);
                if (got - want).abs() > experiments::TABLE1_TOLERANCE {
                    bad.push(format!("{name} α={a}: got {got:.5}, expected {want:.5}, diff {:.2e}", got - want));
                }
            }
        }
        if !bad.is_empty() {
            return Err(CliError::Check(bad.join("\n")));
        }
        out.note("table1 check: all 24 values within 1e-3");
    }
    Ok(())
}

fn cmd_table2(g: &GlobalArgs, traces: bool, out: &mut Output) -> CliResult<()> {
    let cfg = SearchConfig::default();
    let mut s = String::from(
        "qam,snr_db,b,uniform_theta_opt_deg,uniform_sum_bits,nonuniform_theta_deg,nonuniform_sum_bits,p_tilde,gain_percent\n",
    );
    let mut bad = Vec::new();
    for (case, reference) in TABLE2_CASES {
        let r = experiments::table2_row(case, experiments::mac_theta_grid(), &cfg)?;
        let gain = r.gain_percent();
        s.push_str(&row(&[
            case.qam.to_string(),
            fmt_sig(case.snr_db),
            case.bits.to_string(),
            deg(r.uniform.theta),
            format!("{:.4}", r.uniform.pentagon.sum_max),
            deg(r.nonuniform.theta),
            format!("{:.4}", r.nonuniform.sum_rate),
            fmt_sig(r.nonuniform.p_tilde),
            format!("{gain:.2}"),
        ]));
        if traces {
            let idx = r
                .nonuniform
                .traces
                .iter()
                .position(|t| t.theta == r.nonuniform.theta)
                .expect("θ′ trace present");
            out.add(
                format!("search_trace_{}qam_b{}.csv", case.qam, case.bits),
                trace_csv(&r.nonuniform.traces[idx])?,
            );
        }
        let label = format!("{}-QAM b={}", case.qam, case.bits);
        let checks = [
            ("uniform sum", r.uniform.pentagon.sum_max, reference.uniform, experiments::TABLE2_UNIFORM_TOLERANCE),
            ("non-uniform sum", r.nonuniform.sum_rate, reference.nonuniform, experiments::TABLE2_NONUNIFORM_TOLERANCE),
            ("p̃", r.nonuniform.p_tilde, reference.p_tilde, experiments::TABLE2_P_TOLERANCE),
            ("% gain", gain, reference.gain_percent, experiments::TABLE2_GAIN_TOLERANCE),
        ];
        for (what, got, want, tol) in checks {
            if (got - want).abs() > tol + 1e-9 {
                bad.push(format!("{label} {what}: got {got:.4}, expected {want}, tolerance {tol}"));
            }
        }
    }
    out.add("table2.csv", s);
    if g.check {
        if !bad.is_empty() {
            return Err(CliError::Check(bad.join("\n")));
        }
        out.note("table2 check: all rows within tolerance");
    }
    Ok(())
}

fn require_config(g: &GlobalArgs) -> CliResult<Scenario> {
    match &g.config {
        Some(p) => Scenario::load(p),
        None => Err(CliError::Config("this command needs --config <path>".into())),
    }
}

fn cmd_qbc_region(g: &GlobalArgs, out: &mut Output) -> CliResult<()> {
    let cfg = require_config(g)?;
    let sc = cfg.qbc()?;
    let reg = region(&sc)?;
    let mut s = String::from("scheme,alpha,theta_deg,R1_bits,R2_bits,on_hull\n");
    for p in &reg.points {
        s.push_str(&row(&[
            p.provenance.scheme.number().to_string(),
            fmt_sig(p.provenance.alpha),
            deg(p.provenance.theta),
            fmt_sig(p.r1),
            fmt_sig(p.r2),
            u8::from(reg.on_hull(p)).to_string(),
        ]));
    }
    out.add(cfg.outputs.points.clone().unwrap_or_else(|| "qbc_points.csv".into()), s);
    out.add(
        cfg.outputs.hull.clone().unwrap_or_else(|| "qbc_hull.csv".into()),
        polygon_csv("vertex,R1_bits,R2_bits\n", reg.hull.vertices(), None),
    );
    Ok(())
}

fn sweep_csv(sweep: &[Pentagon], p_of: impl Fn(usize) -> f64) -> String {
    let mut s = String::from("theta_deg,p,R1_max,R2_max,sum_max\n");
    for (i, q) in sweep.iter().enumerate() {
        s.push_str(&row(&[deg(q.theta), fmt_sig(p_of(i)), fmt_sig(q.r1_max), fmt_sig(q.r2_max), fmt_sig(q.sum_max)]));
    }
    s
}

fn cmd_qmac_region(g: &GlobalArgs, out: &mut Output) -> CliResult<()> {
    let cfg = require_config(g)?;
    let (sc, search) = cfg.qmac()?;
    let bits = sc.quantizer.bits;
    let (kind_name, best, p, sweep, sweep_p, trace): (&str, Pentagon, f64, Vec<Pentagon>, Vec<f64>, Option<SearchTrace>) =
        if search {
            let scfg = cfg.search_config()?;
            if cfg.search_at_uniform_theta {
                let uni = theta_opt(&QmacScenario {
                    quantizer: sc.quantizer.with_kind(QuantizerKind::Uniform),
                    ..sc.clone()
                })?;
                let t = find_p(&sc, uni.theta, &scfg)?;
                let pent = t.pentagon.expect("completed search has a pentagon");
                ("nonuniform", pent, t.p_tilde, vec![pent], vec![t.p_tilde], Some(t))
            } else {
                let tp = find_theta_prime(&sc, &scfg)?;
                let sweep: Vec<Pentagon> = tp.traces.iter().map(|t| t.pentagon.expect("completed search")).collect();
                let ps: Vec<f64> = tp.traces.iter().map(|t| t.p_tilde).collect();
                let trace = tp.traces.iter().find(|t| t.theta == tp.theta).cloned();
                ("nonuniform", tp.pentagon, tp.p_tilde, sweep, ps, trace)
            }
        } else {
            let opt = theta_opt(&sc)?;
            let p = sc.quantizer.kind.exponent();
            let name = match sc.quantizer.kind {
                QuantizerKind::Uniform => "uniform",
                QuantizerKind::Power(_) => "nonuniform",
            };
            let n = opt.sweep.len();
            (name, opt.pentagon, p, opt.sweep, vec![p; n], None)
        };

    let region_csv = if g.hull_over_theta {
        polygon_csv("vertex,R1_bits,R2_bits\n", hull_over_theta(&sweep).vertices(), None)
    } else {
        polygon_csv("theta_deg,vertex,R1_bits,R2_bits\n", best.region_polygon().vertices(), Some(best.theta))
    };
    out.add(cfg.outputs.region.clone().unwrap_or_else(|| "qmac_region.csv".into()), region_csv);
    let mut summary = String::from("b,kind,p,theta_opt_deg,R1_max,R2_max,sum_max\n");
    summary.push_str(&row(&[
        bits.to_string(),
        kind_name.into(),
        fmt_sig(p),
        deg(best.theta),
        fmt_sig(best.r1_max),
        fmt_sig(best.r2_max),
        fmt_sig(best.sum_max),
    ]));
    out.add(cfg.outputs.summary.clone().unwrap_or_else(|| "qmac_summary.csv".into()), summary);
    out.add(
        cfg.outputs.sweep.clone().unwrap_or_else(|| "qmac_theta_sweep.csv".into()),
        sweep_csv(&sweep, |i| sweep_p[i]),
    );
    if let Some(t) = trace {
        out.add(cfg.outputs.trace.clone().unwrap_or_else(|| "search_trace.csv".into()), trace_csv(&t)?);
    }
    Ok(())
}

fn cmd_baseline(g: &GlobalArgs, out: &mut Output) -> CliResult<()> {
    let (base, snr_db, thetas, quad, is_default) = match &g.config {
        Some(path) => {
            let cfg = Scenario::load(path)?;
            cfg.expect_channel(Channel::Qmac)?;
            cfg.two_users()?;
            if cfg.snr_db.len() != 1 {
                return Err(CliError::Config("snr_db: qmac needs [snr]".into()));
            }
            let default = cfg.alphabets == [16, 16] && cfg.snr_db[0] == 15.0;
            (cfg.alphabet(0)?, cfg.snr_db[0], cfg.thetas(89.0)?, cfg.quadrature()?, default)
        }
        None => (SignalSet::qam(16)?, 15.0, experiments::mac_theta_grid(), QuadratureSpec::default(), true),
    };
    let sw = ccmac_theta_sweep(&base, snr_db, &thetas, quad)?;
    let mut s = String::from("theta_deg,R1_max,R2_max,sum_max\n");
    for p in &sw.sweep {
        s.push_str(&row(&[deg(p.theta), fmt_sig(p.r1_max), fmt_sig(p.r2_max), fmt_sig(p.sum_max)]));
    }
    out.add("ccmac_theta_sweep.csv", s);
    let gmac = gmac_region(10f64.powf(snr_db / 10.0));
    let b = sw.best.pentagon;
    let mut s = String::from("reference,theta_deg,R1_max,R2_max,sum_max,accuracy_warning\n");
    s.push_str(&row(&[
        "ccmac".into(),
        deg(b.theta),
        fmt_sig(b.r1_max),
        fmt_sig(b.r2_max),
        fmt_sig(b.sum_max),
        u8::from(sw.best.warning.is_some()).to_string(),
    ]));
    s.push_str(&row(&[
        "gmac".into(),
        String::new(),
        fmt_sig(gmac.r1_max),
        fmt_sig(gmac.r2_max),
        fmt_sig(gmac.sum_max),
        "0".into(),
    ]));
    out.add("baseline_summary.csv", s);
    out.add(
        "ccmac_region.csv",
        polygon_csv("theta_deg,vertex,R1_bits,R2_bits\n", b.region_polygon().vertices(), Some(b.theta)),
    );
    if let Some(w) = sw.best.warning {
        let msg = format!(
            "accuracy warning: {} vs {} nodes per dimension differ by {:.2e} bits",
            w.nodes_per_dim,
            2 * w.nodes_per_dim,
            w.max_difference
        );
        if g.strict {
            return Err(CliError::Accuracy(msg));
        }
        out.note(msg);
    }
    if g.check {
        if !is_default {
            return Err(CliError::Config("--check needs the default 16-QAM, 15 dB baseline".into()));
        }
        let diff = b.sum_max - experiments::CCMAC_REFERENCE;
        if diff.abs() > experiments::CCMAC_TOLERANCE {
            return Err(CliError::Check(format!(
                "ccmac max sum rate {:.4}, expected {} ± {}",
                b.sum_max,
                experiments::CCMAC_REFERENCE,
                experiments::CCMAC_TOLERANCE
            )));
        }
        out.note("baseline check: ccmac max sum rate within tolerance");
    }
    Ok(())
}

fn scatter_csv(users: &[SignalSet]) -> String {
    let mut points = vec![num_complex::Complex64::new(0.0, 0.0)];
    for u in users {
        points = points.iter().flat_map(|a| u.points().iter().map(move |b| a + b)).collect();
    }
    let mut s = String::from("index,re,im\n");
    for (i, p) in points.iter().enumerate() {
        s.push_str(&row(&[i.to_string(), fmt_sig(p.re), fmt_sig(p.im)]));
    }
    s
}

fn cmd_sumset_scatter(g: &GlobalArgs, out: &mut Output) -> CliResult<()> {
    match &g.config {
        Some(path) => {
            let cfg = Scenario::load(path)?;
            let rot = cfg.rotations_deg.clone().unwrap_or_else(|| vec![0.0; cfg.alphabets.len()]);
            if rot.len() != cfg.alphabets.len() || rot.is_empty() {
                return Err(CliError::Config("rotations_deg: need one angle per entry of alphabets".into()));
            }
            let users = (0..rot.len())
                .map(|i| Ok(cfg.alphabet(i)?.rotate(rot[i].to_radians())))
                .collect::<CliResult<Vec<_>>>()?;
            out.add(cfg.outputs.points.clone().unwrap_or_else(|| "sumset.csv".into()), scatter_csv(&users));
        }
        None => {
            let q = SignalSet::qam(16)?;
            let two = [q.clone(), q.rotate(45f64.to_radians())];
            let three = [q.clone(), q.rotate(30f64.to_radians()), q.rotate(60f64.to_radians())];
            out.add("sumset_2user.csv", scatter_csv(&two));
            out.add("sumset_3user.csv", scatter_csv(&three));
        }
    }
    Ok(())
}

fn cmd_cells(bits: u32, extent: f64, p: Option<f64>, out: &mut Output) -> CliResult<()> {
    let q = match p {
        Some(p) => Quantizer::nonuniform(bits, extent, p)?,
        None => Quantizer::uniform(bits, extent)?,
    };
    let mut buf = Vec::new();
    q.write_csv(&mut buf)?;
    out.add("quantizer_cells.csv", String::from_utf8(buf).expect("CSV is UTF-8"));
    Ok(())
}

/// Runs a parsed command, collecting its tables into `out`.
pub fn execute(cli: &Cli, out: &mut Output) -> CliResult<()> {
    let g = &cli.global;
    if g.config.is_some() && matches!(cli.command, Command::Table1 | Command::Table2 { .. } | Command::Cells { .. }) {
        return Err(CliError::Config("this command takes no --config".into()));
    }
    match &cli.command {
        Command::Table1 => cmd_table1(g, out),
        Command::Table2 { traces } => cmd_table2(g, *traces, out),
        Command::QbcRegion => cmd_qbc_region(g, out),
        Command::QmacRegion => cmd_qmac_region(g, out),
        Command::Baseline => cmd_baseline(g, out),
        Command::SumsetScatter => cmd_sumset_scatter(g, out),
        Command::Cells { bits, extent, p } => cmd_cells(*bits, *extent, *p, out),
    }
}

fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let mut out = Output::default();
    let result = match cli.global.threads {
        Some(0) => return Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Run(e.to_string()))?
            .install(|| execute(cli, &mut out)),
        None => execute(cli, &mut out),
    };
    // Tables are written even when a check fails so the diff can be inspected.
    out.flush(cli.global.out.as_deref(), stdout, stderr)?;
    result
}

/// Parses `args` (program name first), runs the command, and returns the
/// exit code.
pub fn run_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return e.exit_code();
        }
    };
    match run(&cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

/// Process entry point; returns the exit code.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_args(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

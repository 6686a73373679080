//! Report structure and its CSV, JSON and plain-text renderings.
//!
//! CSV files are one header row followed by data rows; echo columns repeat
//! on every row so each row stands alone. JSON is a single object whose key
//! order follows the struct definitions below.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use collapse_core::phenomenology::{BMesonPrediction, BoundResult, PhysicalConstants};
use collapse_core::stochastic::{EnsembleSummary, Step, RNG_ALGORITHM};

use crate::config::{Command, OutputFormat, PlanckConvention, Task};
use crate::error::{CliError, Result};
use crate::verify::PropertyOutcome;

pub const TOOL: &str = "collapse";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub rng_algorithm: &'static str,
    /// Seconds since the Unix epoch; absent with `--no-timestamp`.
    pub timestamp_unix_s: Option<u64>,
    pub planck_convention: PlanckConvention,
    pub constants: PhysicalConstants,
    pub config: Task,
    pub results: Results,
}

/// Serialized without a variant tag; the report's `command` field names it.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
#[allow(clippy::large_enum_variant)] // one per process
pub enum Results {
    Evolve(EvolveResults),
    Ensemble(EnsembleResults),
    Bounds(BoundsResults),
    Verify(VerifyResults),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveSample {
    pub t_over_tau_c: f64,
    pub t_s: f64,
    pub x_closed_form: f64,
    pub x_numeric: f64,
    pub y_numeric: f64,
    pub abs_error: f64,
    /// `x(1 − x)` of the numeric state.
    pub entanglement: f64,
    /// `x ln x + (1 − x) ln(1 − x)` of the numeric state.
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveResults {
    pub delta_gev: f64,
    pub tau_c_s: f64,
    pub eta: f64,
    pub max_abs_error: f64,
    pub samples: Vec<EvolveSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleResults {
    pub delta_gev: f64,
    pub tau_c_s: f64,
    pub summary: EnsembleSummary,
    pub mean_time_over_tau_c: f64,
    pub time_stderr_over_tau_c: Option<f64>,
    /// Exact recurrence values, double-or-nothing only.
    pub exact_mean_plays: Option<f64>,
    pub exact_mean_time_over_tau_c: Option<f64>,
    /// `|frac_to_one − x0| / √(x0(1 − x0)/n)`; absent at x0 ∈ {0, 1}.
    pub born_rule_z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dumped_trajectory: Option<DumpedTrajectory>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DumpedTrajectory {
    pub index: u64,
    pub n_plays: u64,
    pub outcome_x: f64,
    pub total_time_s: f64,
    #[serde(skip)]
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsResults {
    pub bounds: Vec<BoundResult>,
    pub b_meson: Vec<BMesonPrediction>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyResults {
    pub passed: usize,
    pub failed: usize,
    pub properties: Vec<PropertyOutcome>,
}

impl VerifyResults {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Full-precision, round-trip text for a float.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

type Table = (Vec<&'static str>, Vec<Vec<String>>);

fn trailer(report: &Report) -> (Vec<&'static str>, Vec<String>) {
    (
        vec![
            "hbar_gev_s",
            "planck_energy_gev",
            "rng",
            "version",
            "timestamp_unix_s",
        ],
        vec![
            num(report.constants.hbar),
            num(report.constants.planck_energy),
            RNG_ALGORITHM.into(),
            VERSION.into(),
            report
                .timestamp_unix_s
                .map(|t| t.to_string())
                .unwrap_or_default(),
        ],
    )
}

fn table(report: &Report) -> Table {
    let (tail_head, tail) = trailer(report);
    let (mut header, rows): Table = match (&report.results, &report.config) {
        (Results::Evolve(r), Task::Evolve(c)) => {
            let header = vec![
                "t_over_tau_c",
                "t_s",
                "x_closed_form",
                "x_numeric",
                "y_numeric",
                "abs_error",
                "entanglement",
                "entropy",
                "x0",
                "sign",
                "epsilon_gev",
                "e1_gev",
                "e2_gev",
                "dispersion",
                "delta_gev",
                "tau_c_s",
                "steps_per_tau_c",
            ];
            let sign = match c.sign {
                collapse_core::dynamics::SignChoice::Plus => "plus",
                collapse_core::dynamics::SignChoice::Minus => "minus",
            };
            let rows = r
                .samples
                .iter()
                .map(|s| {
                    vec![
                        num(s.t_over_tau_c),
                        num(s.t_s),
                        num(s.x_closed_form),
                        num(s.x_numeric),
                        num(s.y_numeric),
                        num(s.abs_error),
                        num(s.entanglement),
                        num(s.entropy),
                        num(c.x0),
                        sign.into(),
                        num(c.epsilon_gev),
                        num(c.e1_gev),
                        num(c.e2_gev),
                        c.dispersion.name().into(),
                        num(r.delta_gev),
                        num(r.tau_c_s),
                        c.steps_per_tau_c.to_string(),
                    ]
                })
                .collect();
            (header, rows)
        }
        (Results::Ensemble(r), Task::Ensemble(c)) => {
            let s = &r.summary;
            let header = vec![
                "n",
                "frac_to_one",
                "stderr",
                "mean_plays",
                "mean_time_over_tau_c",
                "plays_stderr",
                "time_stderr_over_tau_c",
                "mean_time_s",
                "exact_mean_plays",
                "exact_mean_time_over_tau_c",
                "born_rule_z",
                "energy_drift_gev",
                "energy_drift_stderr_gev",
                "uncertainty_ratio",
                "max_plays",
                "noise",
                "stake",
                "x0",
                "master_seed",
                "max_plays_cap",
                "epsilon_gev",
                "e1_gev",
                "e2_gev",
                "dispersion",
                "delta_gev",
                "tau_c_s",
            ];
            let row = vec![
                s.n_trajectories.to_string(),
                num(s.frac_to_one.mean),
                opt(s.frac_to_one.stderr),
                num(s.plays.mean),
                num(r.mean_time_over_tau_c),
                opt(s.plays.stderr),
                opt(r.time_stderr_over_tau_c),
                num(s.total_time.mean),
                opt(r.exact_mean_plays),
                opt(r.exact_mean_time_over_tau_c),
                opt(r.born_rule_z),
                num(s.energy_drift.mean),
                opt(s.energy_drift.stderr),
                num(s.uncertainty_ratio),
                s.max_plays_observed.to_string(),
                c.noise.name().into(),
                opt(c.noise.stake()),
                num(c.x0),
                c.master_seed.to_string(),
                c.max_plays.to_string(),
                num(c.epsilon_gev),
                num(c.e1_gev),
                num(c.e2_gev),
                c.dispersion.name().into(),
                num(r.delta_gev),
                num(r.tau_c_s),
            ];
            (header, vec![row])
        }
        (Results::Bounds(r), Task::Bounds(_)) => {
            let header = vec![
                "kind",
                "label",
                "kaon_rule",
                "b_rule",
                "tau_s",
                "delta_gev",
                "gamma",
                "gamma_c",
                "tau_c_min_s",
                "epsilon_gev",
                "epsilon_over_planck",
                "eight_pi_ratio",
                "predicted_gamma",
                "unphysical",
            ];
            let mut rows: Vec<Vec<String>> = r
                .bounds
                .iter()
                .map(|b| {
                    vec![
                        "bound".into(),
                        b.inputs.label.clone(),
                        String::new(),
                        String::new(),
                        num(b.inputs.tau),
                        num(b.inputs.delta),
                        num(b.inputs.gamma),
                        num(b.inputs.gamma_c),
                        num(b.tau_c_min),
                        num(b.epsilon_min),
                        num(b.epsilon_over_planck),
                        num(b.eight_pi_ratio),
                        String::new(),
                        String::new(),
                    ]
                })
                .collect();
            rows.extend(r.b_meson.iter().map(|p| {
                vec![
                    "prediction".into(),
                    "b-meson".into(),
                    p.kaon_rule.name().into(),
                    p.b_rule.name().into(),
                    num(p.tau),
                    num(p.delta),
                    String::new(),
                    num(p.gamma_c),
                    String::new(),
                    num(p.epsilon),
                    num(p.epsilon / report.constants.planck_energy),
                    String::new(),
                    num(p.prediction.gamma),
                    p.prediction.unphysical.to_string(),
                ]
            }));
            (header, rows)
        }
        (Results::Verify(r), Task::Verify(c)) => {
            let header = vec![
                "property",
                "cases",
                "worst",
                "tolerance",
                "passed",
                "detail",
                "seed",
            ];
            let rows = r
                .properties
                .iter()
                .map(|p| {
                    vec![
                        p.name.into(),
                        p.cases.to_string(),
                        num(p.worst),
                        num(p.tolerance),
                        p.passed.to_string(),
                        p.detail.clone(),
                        c.seed.to_string(),
                    ]
                })
                .collect();
            (header, rows)
        }
        _ => unreachable!("results always match their task"),
    };
    header.extend(tail_head);
    let rows = rows
        .into_iter()
        .map(|mut row| {
            row.extend(tail.iter().cloned());
            row
        })
        .collect();
    (header, rows)
}

pub fn render_csv(report: &Report) -> Result<Vec<u8>> {
    let (header, rows) = table(report);
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::invalid("output", e.to_string());
    w.write_record(&header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.into_inner()
        .map_err(|e| CliError::invalid("output", e.to_string()))
}

pub fn render_json(report: &Report) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(report)
        .map_err(|e| CliError::invalid("output", e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let fail = |source| CliError::Output {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(fail)?;
    }
    fs::File::create(path)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .map_err(fail)
}

pub fn emit_report(report: &Report, format: OutputFormat, path: &Path) -> Result<()> {
    let bytes = match format {
        OutputFormat::Csv => render_csv(report)?,
        OutputFormat::Json => render_json(report)?,
    };
    write_file(path, &bytes)
}

/// `play,time_s,x,sign`, one row per play.
pub fn emit_trajectory(steps: &[Step], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::invalid("dump_trajectory", e.to_string());
    w.write_record(["play", "time_s", "x", "sign"])
        .map_err(err)?;
    for s in steps {
        w.write_record([
            s.play.to_string(),
            num(s.time),
            num(s.x),
            s.sign.to_string(),
        ])
        .map_err(err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::invalid("dump_trajectory", e.to_string()))?;
    write_file(path, &bytes)
}

/// Two significant figures followed by the machine value.
fn sig2(v: f64) -> String {
    format!("{v:.1e} ({v:?})")
}

/// Human-readable digest for stdout.
pub fn summary(report: &Report) -> String {
    let mut out = format!(
        "{TOOL} {VERSION}  hbar = {:?} GeV s  E_p = {:?} GeV ({})\n",
        report.constants.hbar,
        report.constants.planck_energy,
        match report.planck_convention {
            PlanckConvention::Standard => "standard",
            PlanckConvention::Rounded => "rounded",
        }
    );
    match (&report.results, &report.config) {
        (Results::Evolve(r), Task::Evolve(c)) => {
            out += &format!(
                "evolve  x0 = {}  Δ = {} GeV  τ_c = {} s  η = {}\n",
                c.x0,
                sig2(r.delta_gev),
                sig2(r.tau_c_s),
                sig2(r.eta)
            );
            let last = r.samples.last().expect("at least two samples");
            if let Some(one) = r
                .samples
                .iter()
                .find(|s| s.t_over_tau_c == 1.0 && last.t_over_tau_c != 1.0)
            {
                out += &format!(
                    "  x(τ_c)  = {:.6} (closed form {:.6})\n",
                    one.x_numeric, one.x_closed_form
                );
            }
            out += &format!(
                "  x({} τ_c) = {:.6} (closed form {:.6})  {} samples  max |numeric − closed form| = {:.2e}\n",
                last.t_over_tau_c,
                last.x_numeric,
                last.x_closed_form,
                r.samples.len(),
                r.max_abs_error
            );
        }
        (Results::Ensemble(r), Task::Ensemble(c)) => {
            let s = &r.summary;
            out += &format!(
                "ensemble  {}  x0 = {}  n = {}  seed = {}  τ_c = {} s\n",
                c.noise.name(),
                c.x0,
                s.n_trajectories,
                c.master_seed,
                sig2(r.tau_c_s)
            );
            out += &format!(
                "  P(x → 1)     = {:.5} ± {}\n",
                s.frac_to_one.mean,
                s.frac_to_one
                    .stderr
                    .map_or("n/a".into(), |e| format!("{e:.5}"))
            );
            out += &format!(
                "  plays        = {:.4} ± {}{}\n",
                s.plays.mean,
                s.plays.stderr.map_or("n/a".into(), |e| format!("{e:.4}")),
                r.exact_mean_plays
                    .map_or(String::new(), |e| format!("  (exact {e:.6})"))
            );
            out += &format!(
                "  time / τ_c   = {:.4} ± {}{}\n",
                r.mean_time_over_tau_c,
                r.time_stderr_over_tau_c
                    .map_or("n/a".into(), |e| format!("{e:.4}")),
                r.exact_mean_time_over_tau_c
                    .map_or(String::new(), |e| format!("  (exact {e:.6})"))
            );
            out += &format!("  time         = {} s\n", sig2(s.total_time.mean));
            out += &format!(
                "  energy drift = {:.3e} ± {} GeV  |ΔE| 2τ_c / ħ = {}\n",
                s.energy_drift.mean,
                s.energy_drift
                    .stderr
                    .map_or("n/a".into(), |e| format!("{e:.3e}")),
                sig2(s.uncertainty_ratio)
            );
            if let Some(d) = &r.dumped_trajectory {
                out += &format!(
                    "  trajectory {} dumped: {} plays, x → {}, {} s\n",
                    d.index,
                    d.n_plays,
                    d.outcome_x,
                    sig2(d.total_time_s)
                );
            }
        }
        (Results::Bounds(r), Task::Bounds(_)) => {
            for b in &r.bounds {
                out += &format!(
                    "bound  {}  τ_c,min = {} s  ε_min = {} GeV  ε_min/E_p = {}  8π ε_min/E_p = {}\n",
                    b.inputs.label,
                    sig2(b.tau_c_min),
                    sig2(b.epsilon_min),
                    sig2(b.epsilon_over_planck),
                    sig2(b.eight_pi_ratio)
                );
            }
            for p in &r.b_meson {
                out += &format!(
                    "b-meson  kaon rule {}  b rule {}  Δ = {} GeV  ε = {} GeV  γ = {}{}\n",
                    p.kaon_rule.name(),
                    p.b_rule.name(),
                    sig2(p.delta),
                    sig2(p.epsilon),
                    sig2(p.prediction.gamma),
                    if p.prediction.unphysical {
                        "  (unphysical: > 1)"
                    } else {
                        ""
                    }
                );
            }
        }
        (Results::Verify(r), Task::Verify(_)) => {
            for p in &r.properties {
                out += &format!(
                    "{}  {:<28} worst {:.3e} (tol {:.0e}, {} checks)  {}\n",
                    if p.passed { "PASS" } else { "FAIL" },
                    p.name,
                    p.worst,
                    p.tolerance,
                    p.cases,
                    p.detail
                );
            }
            out += &format!("{} passed, {} failed\n", r.passed, r.failed);
        }
        _ => unreachable!("results always match their task"),
    }
    out
}

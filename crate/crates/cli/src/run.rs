//! Dispatch of a resolved [`RunConfig`] onto the core library.

use std::time::{SystemTime, UNIX_EPOCH};

use collapse_core::dynamics::{closed_form_population, PopulationIntegrator};
use collapse_core::phenomenology::{
    b_meson_prediction, epsilon_lower_bound, kaon_bound, PhysicalConstants, SplittingRule,
};
use collapse_core::qstate::{entanglement_entropy, PopulationState};
use collapse_core::stochastic::{
    ensemble_rng, ensemble_run, expected_plays_double_or_nothing, expected_time_double_or_nothing,
    record_game, EnsembleConfig, NoiseModel, RNG_ALGORITHM,
};
use collapse_core::Execution;

use crate::config::{BoundsTask, EnsembleTask, EvolveTask, Preset, RunConfig, Task};
use crate::error::{CliError, Result};
use crate::report::{
    emit_report, emit_trajectory, summary, BoundsResults, DumpedTrajectory, EnsembleResults,
    EvolveResults, EvolveSample, Report, Results, VerifyResults, TOOL, VERSION,
};
use crate::verify::run_suite;

fn evolve(task: &EvolveTask) -> Result<EvolveResults> {
    let params = task.collapse();
    let tau_c = params.tau_c();
    let last = (task.samples - 1) as f64;
    let grid: Vec<f64> = (0..task.samples)
        .map(|k| task.t_max_over_tau_c * k as f64 / last)
        .collect();
    let times: Vec<f64> = grid.iter().map(|t| t * tau_c).collect();
    let rk = PopulationIntegrator::new(task.steps_per_tau_c)?;
    let path = rk.sample(PopulationState::new(task.x0)?, tau_c, task.sign, &times)?;
    let mut samples = Vec::with_capacity(task.samples);
    for ((t, t_s), p) in grid.iter().zip(&times).zip(path) {
        let exact = closed_form_population(task.x0, *t_s, tau_c, task.sign);
        let x = p.x.clamp(0.0, 1.0);
        samples.push(EvolveSample {
            t_over_tau_c: *t,
            t_s: *t_s,
            x_closed_form: exact,
            x_numeric: p.x,
            y_numeric: p.y,
            abs_error: (p.x - exact).abs(),
            entanglement: p.x * p.y,
            entropy: entanglement_entropy(x)?,
        });
    }
    Ok(EvolveResults {
        delta_gev: params.delta(),
        tau_c_s: tau_c,
        eta: params.eta(),
        max_abs_error: samples.iter().map(|s| s.abs_error).fold(0.0, f64::max),
        samples,
    })
}

fn ensemble(task: &EnsembleTask, exec: Execution) -> Result<EnsembleResults> {
    let params = task.collapse();
    let tau_c = params.tau_c();
    let cfg = EnsembleConfig {
        model: task.noise,
        x0: task.x0,
        tau_c,
        level_energy: task.e1_gev + task.e2_gev,
        n: task.n,
        master_seed: task.master_seed,
        max_plays: task.max_plays,
    };
    let summary = ensemble_run(&cfg, exec)?;
    let exact = matches!(task.noise, NoiseModel::DoubleOrNothing);
    let interior = task.x0 > 0.0 && task.x0 < 1.0;
    let dumped_trajectory = match &task.dump {
        Some(d) => {
            let mut rng = ensemble_rng(task.master_seed, d.index);
            let t = record_game(&task.noise, task.x0, tau_c, task.max_plays, &mut rng)?;
            emit_trajectory(&t.steps, &d.path)?;
            Some(DumpedTrajectory {
                index: d.index,
                n_plays: t.n_plays,
                outcome_x: t.steps.last().map_or(task.x0, |s| s.x),
                total_time_s: t.total_time,
                steps: t.steps,
            })
        }
        None => None,
    };
    Ok(EnsembleResults {
        delta_gev: params.delta(),
        tau_c_s: tau_c,
        mean_time_over_tau_c: summary.total_time.mean / tau_c,
        time_stderr_over_tau_c: summary.total_time.stderr.map(|e| e / tau_c),
        exact_mean_plays: (exact && interior).then(|| expected_plays_double_or_nothing(task.x0)),
        exact_mean_time_over_tau_c: (exact && interior)
            .then(|| expected_time_double_or_nothing(task.x0)),
        born_rule_z: interior.then(|| {
            let se = (task.x0 * (1.0 - task.x0) / task.n as f64).sqrt();
            (summary.frac_to_one.mean - task.x0).abs() / se
        }),
        summary,
        dumped_trajectory,
    })
}

const RULES: [SplittingRule; 2] = [SplittingRule::Sqrt2, SplittingRule::Direct];

fn bounds(task: &BoundsTask, constants: &PhysicalConstants) -> Result<BoundsResults> {
    let kaon = || -> Result<Vec<_>> {
        RULES
            .iter()
            .map(|r| kaon_bound(constants, *r).map_err(CliError::from))
            .collect()
    };
    Ok(match task.preset {
        Preset::Kaon => BoundsResults {
            bounds: kaon()?,
            b_meson: Vec::new(),
        },
        Preset::BMeson => {
            let mut b_meson = Vec::new();
            for k in RULES {
                for b in RULES {
                    b_meson.push(b_meson_prediction(constants, k, b)?);
                }
            }
            BoundsResults {
                bounds: kaon()?,
                b_meson,
            }
        }
        Preset::Custom => {
            let inputs = task.custom.as_ref().expect("custom preset carries inputs");
            BoundsResults {
                bounds: vec![epsilon_lower_bound(inputs, constants)?],
                b_meson: Vec::new(),
            }
        }
    })
}

/// Computes the report without writing anything.
pub fn run_command(cfg: &RunConfig) -> Result<Report> {
    let results = match &cfg.task {
        Task::Evolve(t) => Results::Evolve(evolve(t)?),
        Task::Ensemble(t) => Results::Ensemble(ensemble(t, cfg.execution)?),
        Task::Bounds(t) => Results::Bounds(bounds(t, &cfg.constants)?),
        Task::Verify(t) => {
            let properties = run_suite(t, &cfg.constants);
            let failed = properties.iter().filter(|p| !p.passed).count();
            Results::Verify(VerifyResults {
                passed: properties.len() - failed,
                failed,
                properties,
            })
        }
    };
    let timestamp_unix_s = cfg.timestamp.then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs())
    });
    Ok(Report {
        tool: TOOL,
        version: VERSION,
        command: cfg.command,
        rng_algorithm: RNG_ALGORITHM,
        timestamp_unix_s,
        planck_convention: cfg.planck,
        constants: cfg.constants,
        config: cfg.task.clone(),
        results,
    })
}

/// Runs, writes the report file if one is configured, and returns the
/// report with its stdout summary.
pub fn execute(cfg: &RunConfig) -> Result<(Report, String)> {
    let report = run_command(cfg)?;
    if let Some(path) = &cfg.output {
        emit_report(&report, cfg.format, path)?;
    }
    let text = summary(&report);
    Ok((report, text))
}

/// The error a finished report should turn into, if any.
pub fn verdict(report: &Report) -> Result<()> {
    match &report.results {
        Results::Verify(v) if !v.all_passed() => Err(CliError::VerifyFailed {
            failed: v.failed,
            total: v.properties.len(),
        }),
        _ => Ok(()),
    }
}

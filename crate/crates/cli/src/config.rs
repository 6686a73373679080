//! Command-line flags, the TOML config file, and their resolution into a
//! validated [`RunConfig`].
//!
//! Precedence, lowest first: built-in defaults, config file, the
//! `COLLAPSE_OUTPUT_DIR` environment variable (output directory only),
//! command-line flags.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use collapse_core::dynamics::{
    total_dispersion, CollapseParameters, DispersionRule, PopulationIntegrator, SignChoice,
};
use collapse_core::phenomenology::{BoundInputs, PhysicalConstants};
use collapse_core::stochastic::{NoiseModel, DEFAULT_MAX_PLAYS};
use collapse_core::Execution;

use crate::error::{CliError, Result};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "COLLAPSE_OUTPUT_DIR";

const AFTER_HELP: &str = "Exit codes: 0 success, 1 verify failure, 2 usage, 3 invalid value, \
    4 config unreadable, 5 numerical failure, 6 output I/O.\n\
    Config file: TOML with the flag names as keys (dashes become underscores), \
    e.g. `x0 = 0.3`, `noise = \"fixed-stake\"`, `gamma_c = 0.5`. Flags override the file.\n\
    COLLAPSE_OUTPUT_DIR: directory for `<command>.csv|json` when --output is absent.";

#[derive(Debug, Parser)]
#[command(
    name = "collapse",
    version,
    about = "Nonlinear collapse of entangled two-level states: evolution, stochastic ensembles, bounds",
    after_help = AFTER_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Deterministic population decay: closed form against RK4 on a time grid.
    #[command(after_help = AFTER_HELP)]
    Evolve(Invocation),
    /// Monte Carlo ensemble of stochastic collapse games.
    #[command(after_help = AFTER_HELP)]
    Ensemble(Invocation),
    /// Lower bound on ε from CP violation, and the B-meson prediction.
    #[command(after_help = AFTER_HELP)]
    Bounds(Invocation),
    /// Run the invariant suite and report pass/fail per property.
    #[command(after_help = AFTER_HELP)]
    Verify(Invocation),
}

#[derive(Debug, Args)]
pub struct Invocation {
    /// TOML config file; flags given on the command line take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub params: Params,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Evolve,
    Ensemble,
    Bounds,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Ensemble => "ensemble",
            Command::Bounds => "bounds",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    DoubleOrNothing,
    FixedStake,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    #[default]
    Kaon,
    BMeson,
    Custom,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PlanckConvention {
    /// E_p = 1.22e19 GeV
    #[default]
    Standard,
    /// E_p = 1e19 GeV
    Rounded,
}

impl PlanckConvention {
    pub fn constants(self) -> PhysicalConstants {
        match self {
            PlanckConvention::Standard => PhysicalConstants::default(),
            PlanckConvention::Rounded => PhysicalConstants::rounded_planck(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Dispersion {
    /// Δ = √2 (E1 + E2)
    LinearSum,
    /// Δ = √2 √(E1² + E2²)
    Quadrature,
}

impl From<Dispersion> for DispersionRule {
    fn from(d: Dispersion) -> Self {
        match d {
            Dispersion::LinearSum => DispersionRule::LinearSum,
            Dispersion::Quadrature => DispersionRule::Quadrature,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    /// The first branch decays: dx/dt = −xy/τ_c.
    Plus,
    /// The first branch grows: dx/dt = +xy/τ_c.
    Minus,
}

impl From<Sign> for SignChoice {
    fn from(s: Sign) -> Self {
        match s {
            Sign::Plus => SignChoice::Plus,
            Sign::Minus => SignChoice::Minus,
        }
    }
}

/// Every tunable, all optional, shared by the command line and the config
/// file. Fields a command does not use are ignored by it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Initial population x0 = |α|² of the first branch, in [0, 1] [evolve, ensemble; required].
    #[arg(long)]
    pub x0: Option<f64>,

    /// Nonlinearity scale ε in GeV [default: Planck energy of the chosen convention].
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Level energy of particle 1 in GeV [default: 1].
    #[arg(long)]
    pub e1: Option<f64>,

    /// Level energy of particle 2 in GeV [default: 0].
    #[arg(long)]
    pub e2: Option<f64>,

    /// How E1 and E2 combine into the dispersion Δ [default: linear-sum].
    #[arg(long, value_enum)]
    pub dispersion: Option<Dispersion>,

    /// Sign of the nonlinear term [evolve; default: plus].
    #[arg(long, value_enum)]
    pub sign: Option<Sign>,

    /// End of the time grid in units of τ_c [evolve; default: 10].
    #[arg(long)]
    pub t_max: Option<f64>,

    /// Number of grid points including both ends [evolve; default: 1000].
    #[arg(long)]
    pub samples: Option<usize>,

    /// RK4 steps per τ_c, at least 100 [evolve; default: 100].
    #[arg(long)]
    pub steps_per_tau_c: Option<u32>,

    /// Noise rule [ensemble; default: double-or-nothing].
    #[arg(long, value_enum)]
    pub noise: Option<NoiseKind>,

    /// Stake per play, in (0, 1/2] [ensemble; required with fixed-stake].
    #[arg(long)]
    pub stake: Option<f64>,

    /// Number of trajectories [ensemble; default: 10000].
    #[arg(long)]
    pub n: Option<u64>,

    /// Master seed; trajectory i uses stream i under it [ensemble, verify; default: 0].
    #[arg(long)]
    pub seed: Option<u64>,

    /// Play cap per fixed-stake trajectory [ensemble; default: 10000000].
    #[arg(long)]
    pub max_plays: Option<u64>,

    /// Write trajectory K of the ensemble as play,time_s,x,sign rows [ensemble].
    #[arg(long, value_name = "PATH")]
    pub dump_trajectory: Option<PathBuf>,

    /// Index K of the dumped trajectory [ensemble; default: 0].
    #[arg(long, value_name = "K")]
    pub dump_index: Option<u64>,

    /// Scenario [bounds; default: kaon].
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,

    /// Lifetime in seconds [bounds, custom preset].
    #[arg(long)]
    pub tau: Option<f64>,

    /// Dispersion Δ in GeV [bounds, custom preset].
    #[arg(long)]
    pub delta: Option<f64>,

    /// Observed violating branching ratio γ [bounds, custom preset].
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Violating branching ratio γ_c if collapse precedes decay [bounds, custom preset].
    #[arg(long)]
    pub gamma_c: Option<f64>,

    /// Planck energy convention [default: standard].
    #[arg(long, value_enum)]
    pub planck: Option<PlanckConvention>,

    /// Random samples per property [verify; default: 1000].
    #[arg(long)]
    pub cases: Option<usize>,

    /// Report file; without it, `$COLLAPSE_OUTPUT_DIR/<command>.<format>` if set.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Report format [default: from the output extension, else csv].
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    /// Leave the timestamp out of the report, making reruns byte-identical.
    #[arg(long)]
    #[serde(default)]
    pub no_timestamp: bool,

    /// Run ensembles on one thread.
    #[arg(long)]
    #[serde(default)]
    pub sequential: bool,
}

impl Params {
    /// Keys accepted in a config file.
    pub const KEYS: &'static [&'static str] = &[
        "x0",
        "epsilon",
        "e1",
        "e2",
        "dispersion",
        "sign",
        "t_max",
        "samples",
        "steps_per_tau_c",
        "noise",
        "stake",
        "n",
        "seed",
        "max_plays",
        "dump_trajectory",
        "dump_index",
        "preset",
        "tau",
        "delta",
        "gamma",
        "gamma_c",
        "planck",
        "cases",
        "output",
        "format",
        "no_timestamp",
        "sequential",
    ];

    /// `top` wins wherever it sets a value.
    pub fn overlay(self, top: Params) -> Params {
        Params {
            x0: top.x0.or(self.x0),
            epsilon: top.epsilon.or(self.epsilon),
            e1: top.e1.or(self.e1),
            e2: top.e2.or(self.e2),
            dispersion: top.dispersion.or(self.dispersion),
            sign: top.sign.or(self.sign),
            t_max: top.t_max.or(self.t_max),
            samples: top.samples.or(self.samples),
            steps_per_tau_c: top.steps_per_tau_c.or(self.steps_per_tau_c),
            noise: top.noise.or(self.noise),
            stake: top.stake.or(self.stake),
            n: top.n.or(self.n),
            seed: top.seed.or(self.seed),
            max_plays: top.max_plays.or(self.max_plays),
            dump_trajectory: top.dump_trajectory.or(self.dump_trajectory),
            dump_index: top.dump_index.or(self.dump_index),
            preset: top.preset.or(self.preset),
            tau: top.tau.or(self.tau),
            delta: top.delta.or(self.delta),
            gamma: top.gamma.or(self.gamma),
            gamma_c: top.gamma_c.or(self.gamma_c),
            planck: top.planck.or(self.planck),
            cases: top.cases.or(self.cases),
            output: top.output.or(self.output),
            format: top.format.or(self.format),
            no_timestamp: top.no_timestamp || self.no_timestamp,
            sequential: top.sequential || self.sequential,
        }
    }
}

/// Reads a config file. Unknown keys are usage errors; wrongly typed
/// values are invalid values.
pub fn load_file(path: &Path) -> Result<Params> {
    let unreadable = |message: String| CliError::ConfigUnreadable {
        path: path.to_path_buf(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| unreadable(e.to_string()))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| unreadable(e.to_string()))?;
    if let Some(key) = table.keys().find(|k| !Params::KEYS.contains(&k.as_str())) {
        return Err(CliError::Usage(format!(
            "unknown key `{key}` in config file {}",
            path.display()
        )));
    }
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::invalid("config", e.message().to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveTask {
    pub x0: f64,
    pub sign: SignChoice,
    pub epsilon_gev: f64,
    pub e1_gev: f64,
    pub e2_gev: f64,
    pub dispersion: DispersionRule,
    pub t_max_over_tau_c: f64,
    pub samples: usize,
    pub steps_per_tau_c: u32,
}

impl EvolveTask {
    pub fn collapse(&self) -> CollapseParameters {
        CollapseParameters::new(self.epsilon_gev, self.e1_gev, self.e2_gev, self.dispersion)
            .expect("validated on resolution")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryDump {
    /// Not echoed, so reports do not depend on where the dump went.
    #[serde(skip)]
    pub path: PathBuf,
    pub index: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleTask {
    pub x0: f64,
    pub noise: NoiseModel,
    pub n: u64,
    pub master_seed: u64,
    pub max_plays: u64,
    pub epsilon_gev: f64,
    pub e1_gev: f64,
    pub e2_gev: f64,
    pub dispersion: DispersionRule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump: Option<TrajectoryDump>,
}

impl EnsembleTask {
    pub fn collapse(&self) -> CollapseParameters {
        CollapseParameters::new(self.epsilon_gev, self.e1_gev, self.e2_gev, self.dispersion)
            .expect("validated on resolution")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsTask {
    pub preset: Preset,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub custom: Option<BoundInputs>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyTask {
    pub cases: usize,
    pub seed: u64,
}

/// Command-specific validated inputs; this is what reports echo.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Task {
    Evolve(EvolveTask),
    Ensemble(EnsembleTask),
    Bounds(BoundsTask),
    Verify(VerifyTask),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub planck: PlanckConvention,
    pub constants: PhysicalConstants,
    pub task: Task,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub timestamp: bool,
    pub execution: Execution,
}

/// Parses `args` (program name first) and any `--config` file.
pub fn parse_config<I, T>(args: I, output_dir: Option<PathBuf>) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let (command, inv) = match cli.command {
        CommandArgs::Evolve(i) => (Command::Evolve, i),
        CommandArgs::Ensemble(i) => (Command::Ensemble, i),
        CommandArgs::Bounds(i) => (Command::Bounds, i),
        CommandArgs::Verify(i) => (Command::Verify, i),
    };
    let file = match &inv.config {
        Some(path) => load_file(path)?,
        None => Params::default(),
    };
    resolve(command, file.overlay(inv.params), output_dir)
}

/// Same as [`parse_config`] with the output directory taken from
/// `COLLAPSE_OUTPUT_DIR`.
pub fn parse_env_config<I, T>(args: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let dir = std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(PathBuf::from);
    parse_config(args, dir)
}

fn finite(field: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::invalid(field, format!("{v} is not finite")))
    }
}

fn positive(field: &'static str, v: f64) -> Result<f64> {
    if finite(field, v)? > 0.0 {
        Ok(v)
    } else {
        Err(CliError::invalid(field, format!("{v} must be > 0")))
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<f64> {
    if finite(field, v)? >= 0.0 {
        Ok(v)
    } else {
        Err(CliError::invalid(field, format!("{v} must be >= 0")))
    }
}

fn probability(field: &'static str, v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(CliError::invalid(field, format!("{v} is outside [0, 1]")))
    }
}

struct Energies {
    epsilon: f64,
    e1: f64,
    e2: f64,
    rule: DispersionRule,
}

fn energies(p: &Params, constants: &PhysicalConstants) -> Result<Energies> {
    let e = Energies {
        epsilon: positive("epsilon", p.epsilon.unwrap_or(constants.planck_energy))?,
        e1: non_negative("e1", p.e1.unwrap_or(1.0))?,
        e2: non_negative("e2", p.e2.unwrap_or(0.0))?,
        rule: p.dispersion.map_or(DispersionRule::default(), Into::into),
    };
    let delta = total_dispersion(e.e1, e.e2, e.rule)?;
    if delta == 0.0 {
        return Err(CliError::invalid(
            "e1",
            "e1 and e2 are both zero, so nothing collapses",
        ));
    }
    Ok(e)
}

fn resolve_evolve(p: &Params, constants: &PhysicalConstants) -> Result<EvolveTask> {
    let x0 = probability(
        "x0",
        p.x0.ok_or(CliError::Missing {
            field: "x0",
            command: "evolve",
        })?,
    )?;
    let e = energies(p, constants)?;
    let samples = p.samples.unwrap_or(1000);
    if samples < 2 {
        return Err(CliError::invalid(
            "samples",
            format!("{samples} must be >= 2"),
        ));
    }
    let steps = p
        .steps_per_tau_c
        .unwrap_or(PopulationIntegrator::MIN_STEPS_PER_TAU_C);
    if steps < PopulationIntegrator::MIN_STEPS_PER_TAU_C {
        return Err(CliError::invalid(
            "steps_per_tau_c",
            format!(
                "{steps} must be >= {}",
                PopulationIntegrator::MIN_STEPS_PER_TAU_C
            ),
        ));
    }
    Ok(EvolveTask {
        x0,
        sign: p.sign.map_or(SignChoice::Plus, Into::into),
        epsilon_gev: e.epsilon,
        e1_gev: e.e1,
        e2_gev: e.e2,
        dispersion: e.rule,
        t_max_over_tau_c: positive("t_max", p.t_max.unwrap_or(10.0))?,
        samples,
        steps_per_tau_c: steps,
    })
}

fn resolve_ensemble(p: &Params, constants: &PhysicalConstants) -> Result<EnsembleTask> {
    let x0 = probability(
        "x0",
        p.x0.ok_or(CliError::Missing {
            field: "x0",
            command: "ensemble",
        })?,
    )?;
    let noise = match (p.noise.unwrap_or(NoiseKind::DoubleOrNothing), p.stake) {
        (NoiseKind::DoubleOrNothing, None) => NoiseModel::DoubleOrNothing,
        (NoiseKind::DoubleOrNothing, Some(_)) => {
            return Err(CliError::Conflict {
                field: "stake",
                context: "noise = double-or-nothing (the stake is min(x, 1 - x))".into(),
            })
        }
        (NoiseKind::FixedStake, None) => {
            return Err(CliError::Missing {
                field: "stake",
                command: "ensemble --noise fixed-stake",
            })
        }
        (NoiseKind::FixedStake, Some(s)) => NoiseModel::fixed_stake(s)
            .map_err(|_| CliError::invalid("stake", format!("{s} is outside (0, 0.5]")))?,
    };
    let n = p.n.unwrap_or(10_000);
    if n == 0 {
        return Err(CliError::invalid("n", "0 must be >= 1"));
    }
    let max_plays = p.max_plays.unwrap_or(DEFAULT_MAX_PLAYS);
    if max_plays == 0 {
        return Err(CliError::invalid("max_plays", "0 must be >= 1"));
    }
    let dump = match (&p.dump_trajectory, p.dump_index) {
        (Some(path), index) => {
            let index = index.unwrap_or(0);
            if index >= n {
                return Err(CliError::invalid(
                    "dump_index",
                    format!("{index} is not below n = {n}"),
                ));
            }
            Some(TrajectoryDump {
                path: path.clone(),
                index,
            })
        }
        (None, Some(_)) => {
            return Err(CliError::Missing {
                field: "dump_trajectory",
                command: "ensemble --dump-index",
            })
        }
        (None, None) => None,
    };
    let e = energies(p, constants)?;
    Ok(EnsembleTask {
        x0,
        noise,
        n,
        master_seed: p.seed.unwrap_or(0),
        max_plays,
        epsilon_gev: e.epsilon,
        e1_gev: e.e1,
        e2_gev: e.e2,
        dispersion: e.rule,
        dump,
    })
}

fn resolve_bounds(p: &Params) -> Result<BoundsTask> {
    let preset = p.preset.unwrap_or_default();
    let given = [
        ("tau", p.tau),
        ("delta", p.delta),
        ("gamma", p.gamma),
        ("gamma_c", p.gamma_c),
    ];
    if preset != Preset::Custom {
        if let Some((field, _)) = given.iter().find(|(_, v)| v.is_some()) {
            return Err(CliError::Conflict {
                field,
                context: "a built-in preset; use --preset custom to supply inputs".into(),
            });
        }
        return Ok(BoundsTask {
            preset,
            custom: None,
        });
    }
    let mut vals = [0.0; 4];
    for (slot, (field, v)) in vals.iter_mut().zip(given) {
        *slot = v.ok_or(CliError::Missing {
            field,
            command: "bounds --preset custom",
        })?;
    }
    let [tau, delta, gamma, gamma_c] = vals;
    let inputs = BoundInputs::new("custom", tau, delta, gamma, gamma_c).map_err(|e| match e {
        collapse_core::Error::Domain { name, .. }
        | collapse_core::Error::InvalidParameter { name, .. } => {
            CliError::invalid(name, e.to_string())
        }
        other => other.into(),
    })?;
    Ok(BoundsTask {
        preset,
        custom: Some(inputs),
    })
}

fn resolve_verify(p: &Params) -> Result<VerifyTask> {
    let cases = p.cases.unwrap_or(1000);
    if cases == 0 {
        return Err(CliError::invalid("cases", "0 must be >= 1"));
    }
    Ok(VerifyTask {
        cases,
        seed: p.seed.unwrap_or(0),
    })
}

/// Applies defaults and validation to merged parameters.
pub fn resolve(command: Command, p: Params, output_dir: Option<PathBuf>) -> Result<RunConfig> {
    let planck = p.planck.unwrap_or_default();
    let constants = planck.constants();
    let task = match command {
        Command::Evolve => Task::Evolve(resolve_evolve(&p, &constants)?),
        Command::Ensemble => Task::Ensemble(resolve_ensemble(&p, &constants)?),
        Command::Bounds => Task::Bounds(resolve_bounds(&p)?),
        Command::Verify => Task::Verify(resolve_verify(&p)?),
    };
    let format = p
        .format
        .unwrap_or_else(|| match p.output.as_ref().and_then(|o| o.extension()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        });
    let output = p.output.or_else(|| {
        output_dir.map(|d| d.join(format!("{}.{}", command.name(), format.extension())))
    });
    Ok(RunConfig {
        command,
        planck,
        constants,
        task,
        output,
        format,
        timestamp: !p.no_timestamp,
        execution: if p.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        },
    })
}

//! Random sign flips of the nonlinear term, modelled as a game between the
//! two branch populations.
//!
//! Each play moves a stake `δ` from one branch to the other according to a
//! fair coin. With a fixed stake this is the classical gambler's ruin; with
//! "double or nothing" the weaker branch stakes everything it has. Both are
//! martingales in `x`, so the probability of ending at `x = 1` is `x₀`.
//!
//! A play of stake `δ` at populations `(x, y)` lasts `δ τ_c / (x y)`, the
//! inverse of the differential stake `δ = x y dt / τ_c`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{energy_expectation, Hamiltonian2};
use crate::error::{require_positive, Error, Result};
use crate::linalg::Mat2;
use crate::par::{map_indices, Execution};
use crate::qstate::{PopulationState, PsiMatrix};
use crate::units::HBAR_GEV_S;

/// Identifier of the per-trajectory random stream, echoed in reports.
pub const RNG_ALGORITHM: &str = "chacha8/seed_from_u64(master)+stream(index)/coin=msb";

/// Fixed-stake walks are abandoned after this many plays by default.
pub const DEFAULT_MAX_PLAYS: u64 = 10_000_000;

/// A double-or-nothing game this long means the coin source is broken.
pub const DOUBLE_OR_NOTHING_CAP: u64 = 200;

/// Populations this close to a boundary after a fixed-stake play are
/// snapped onto it, absorbing accumulated rounding of `x ± δ`.
pub const BOUNDARY_SNAP: f64 = 1e-12;

/// Outcome of one fair coin toss: `Heads` means the `x` branch wins the play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coin {
    Heads,
    Tails,
}

impl Coin {
    /// Top bit of a 64-bit draw.
    pub fn toss<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        if rng.next_u64() >> 63 == 1 {
            Coin::Heads
        } else {
            Coin::Tails
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Coin::Heads => 1,
            Coin::Tails => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseModel {
    FixedStake { stake: f64 },
    DoubleOrNothing,
}

impl NoiseModel {
    pub fn fixed_stake(stake: f64) -> Result<Self> {
        if stake > 0.0 && stake <= 0.5 {
            Ok(NoiseModel::FixedStake { stake })
        } else {
            Err(Error::Domain {
                name: "stake",
                value: stake,
                expected: "0 < stake <= 1/2",
            })
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseModel::FixedStake { .. } => "fixed-stake",
            NoiseModel::DoubleOrNothing => "double-or-nothing",
        }
    }

    pub fn stake(&self) -> Option<f64> {
        match *self {
            NoiseModel::FixedStake { stake } => Some(stake),
            NoiseModel::DoubleOrNothing => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    ToOne,
    ToZero,
}

/// State after one play.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    /// 1-based play index.
    pub play: u64,
    /// Cumulative time in seconds.
    pub time: f64,
    pub x: f64,
    /// `+1` if the `x` branch won the play.
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub x0: f64,
    pub steps: Vec<Step>,
    pub outcome: Outcome,
    pub total_time: f64,
    pub n_plays: u64,
}

/// Terminal data of one game, without the path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameResult {
    pub outcome: Outcome,
    pub x_final: f64,
    pub n_plays: u64,
    pub total_time: f64,
}

fn population(x: f64) -> PopulationState {
    PopulationState { x, y: 1.0 - x }
}

fn snap(x: f64) -> f64 {
    if x <= BOUNDARY_SNAP {
        0.0
    } else if x >= 1.0 - BOUNDARY_SNAP {
        1.0
    } else {
        x
    }
}

/// Stake actually wagered: `δ` clamped to the weaker population.
pub fn effective_stake(p: &PopulationState, delta: f64) -> f64 {
    delta.min(p.x).min(p.y).max(0.0)
}

/// One fixed-stake play: `x ← x ± δ`, `y ← y ∓ δ`, with `δ` clamped so the
/// boundary is absorbing.
pub fn step_fixed_stake(p: &PopulationState, delta: f64, coin: Coin) -> PopulationState {
    let stake = effective_stake(p, delta);
    let x = match coin {
        Coin::Heads => p.x + stake,
        Coin::Tails => p.x - stake,
    };
    population(snap(x))
}

/// One double-or-nothing play; returns the new state and the play's duration
/// `τ_c / max(x, y)`.
///
/// On the `y = 1 − x` representation both outcomes are exact in binary
/// floating point (doubling, or `2x − 1` for `x ≥ 1/2`).
pub fn step_double_or_nothing(
    p: &PopulationState,
    tau_c: f64,
    coin: Coin,
) -> (PopulationState, f64) {
    let x = p.x;
    let duration = tau_c / x.max(1.0 - x);
    let next = match (x.partial_cmp(&0.5), coin) {
        (Some(std::cmp::Ordering::Less), Coin::Heads) => 2.0 * x,
        (Some(std::cmp::Ordering::Less), Coin::Tails) => 0.0,
        (Some(std::cmp::Ordering::Greater), Coin::Heads) => 1.0,
        (Some(std::cmp::Ordering::Greater), Coin::Tails) => 2.0 * x - 1.0,
        (_, Coin::Heads) => 1.0,
        (_, Coin::Tails) => 0.0,
    };
    (population(next), duration)
}

/// The double-or-nothing stake `min(x, 1 − x)`: the admissible stake with
/// the largest `δ²`, hence the fastest entanglement decrease.
pub fn double_or_nothing_stake(x: f64) -> f64 {
    x.min(1.0 - x)
}

/// Two-branch average change of `x(1 − x)` under a stake `δ`; equals `−δ²`.
pub fn avg_entanglement_change(x: f64, delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            name: "x",
            value: x,
            expected: "0 <= x <= 1",
        });
    }
    if !(delta >= 0.0 && delta <= x.min(1.0 - x)) {
        return Err(Error::Domain {
            name: "delta",
            value: delta,
            expected: "0 <= delta <= min(x, 1 - x)",
        });
    }
    let e = |v: f64| v * (1.0 - v);
    Ok(0.5 * (e(x + delta) + e(x - delta)) - e(x))
}

fn validate_start(x0: f64, tau_c: f64) -> Result<()> {
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::Domain {
            name: "x0",
            value: x0,
            expected: "0 < x0 < 1",
        });
    }
    require_positive("tau_c", tau_c)?;
    Ok(())
}

/// Plays a game to absorption, reporting each step to `observe`.
pub fn play_game<R: RngCore + ?Sized>(
    model: &NoiseModel,
    x0: f64,
    tau_c: f64,
    max_plays: u64,
    rng: &mut R,
    mut observe: impl FnMut(Step),
) -> Result<GameResult> {
    validate_start(x0, tau_c)?;
    let cap = match model {
        NoiseModel::FixedStake { stake } => {
            NoiseModel::fixed_stake(*stake)?;
            max_plays
        }
        NoiseModel::DoubleOrNothing => DOUBLE_OR_NOTHING_CAP,
    };
    let mut p = population(x0);
    let mut time = 0.0;
    let mut plays = 0u64;
    while !p.is_collapsed() {
        if plays == cap {
            return Err(match model {
                NoiseModel::FixedStake { .. } => Error::RunawayWalk { cap },
                NoiseModel::DoubleOrNothing => Error::PlayCapExceeded { cap },
            });
        }
        let coin = Coin::toss(rng);
        let (next, dt) = match *model {
            NoiseModel::FixedStake { stake } => {
                let wager = effective_stake(&p, stake);
                (
                    step_fixed_stake(&p, stake, coin),
                    wager * tau_c / (p.x * p.y),
                )
            }
            NoiseModel::DoubleOrNothing => step_double_or_nothing(&p, tau_c, coin),
        };
        p = next;
        time += dt;
        plays += 1;
        observe(Step {
            play: plays,
            time,
            x: p.x,
            sign: coin.sign(),
        });
    }
    Ok(GameResult {
        outcome: if p.x == 1.0 {
            Outcome::ToOne
        } else {
            Outcome::ToZero
        },
        x_final: p.x,
        n_plays: plays,
        total_time: time,
    })
}

/// Plays a game and keeps its full path.
pub fn record_game<R: RngCore + ?Sized>(
    model: &NoiseModel,
    x0: f64,
    tau_c: f64,
    max_plays: u64,
    rng: &mut R,
) -> Result<Trajectory> {
    let mut steps = Vec::new();
    let result = play_game(model, x0, tau_c, max_plays, rng, |s| steps.push(s))?;
    Ok(Trajectory {
        x0,
        steps,
        outcome: result.outcome,
        total_time: result.total_time,
        n_plays: result.n_plays,
    })
}

/// Single-trajectory generator seeded directly from `seed`.
pub fn trajectory_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for trajectory `index` of an ensemble: one ChaCha stream per
/// index under the master seed.
pub fn ensemble_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

pub fn run_fixed_stake(x0: f64, delta: f64, tau_c: f64, seed: u64) -> Result<Trajectory> {
    let model = NoiseModel::fixed_stake(delta)?;
    record_game(
        &model,
        x0,
        tau_c,
        DEFAULT_MAX_PLAYS,
        &mut trajectory_rng(seed),
    )
}

pub fn run_double_or_nothing(x0: f64, tau_c: f64, seed: u64) -> Result<Trajectory> {
    record_game(
        &NoiseModel::DoubleOrNothing,
        x0,
        tau_c,
        DEFAULT_MAX_PLAYS,
        &mut trajectory_rng(seed),
    )
}

/// Orbit of the double-or-nothing game conditioned on survival: the weaker
/// branch doubles each play.
fn surviving_orbit(x0: f64) -> impl Iterator<Item = f64> {
    std::iter::successors(Some(x0), |&x| {
        if x == 0.5 || x <= 0.0 || x >= 1.0 {
            None
        } else if x < 0.5 {
            Some(2.0 * x)
        } else {
            Some(2.0 * x - 1.0)
        }
    })
}

/// Exact expected length of the double-or-nothing game from the recurrence
/// `L(1/2) = 1`, `L(x) = 1 + L(T x)/2`.
pub fn expected_plays_double_or_nothing(x0: f64) -> f64 {
    surviving_orbit(x0)
        .take(2000)
        .enumerate()
        .map(|(k, _)| 0.5f64.powi(k as i32))
        .sum()
}

/// Exact expected duration of the double-or-nothing game in units of `τ_c`.
pub fn expected_time_double_or_nothing(x0: f64) -> f64 {
    surviving_orbit(x0)
        .take(2000)
        .enumerate()
        .map(|(k, x)| 0.5f64.powi(k as i32) / x.max(1.0 - x))
        .sum()
}

/// Exact ensemble mean of `x(1 − x)` after each play of the double-or-nothing
/// game (index 0 is the initial state), until every path has terminated.
pub fn expected_entanglement_profile_double_or_nothing(x0: f64) -> Vec<f64> {
    let mut profile: Vec<f64> = surviving_orbit(x0)
        .take(2000)
        .enumerate()
        .map(|(k, x)| 0.5f64.powi(k as i32) * x * (1.0 - x))
        .collect();
    profile.push(0.0);
    profile
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub model: NoiseModel,
    pub x0: f64,
    pub tau_c: f64,
    /// Branch energy scale `E` in GeV (`E1 + E2` for a pair), for the drift
    /// bookkeeping.
    pub level_energy: f64,
    pub n: u64,
    pub master_seed: u64,
    pub max_plays: u64,
}

/// Mean and its standard error; `stderr` is `None` for a single sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: Option<f64>,
}

impl Estimate {
    fn from_samples(values: impl Iterator<Item = f64> + Clone, n: u64) -> Self {
        let nf = n as f64;
        let mean = values.clone().sum::<f64>() / nf;
        let stderr = (n > 1).then(|| {
            let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
            (ss / (nf - 1.0)).sqrt() / nf.sqrt()
        });
        Self { mean, stderr }
    }

    /// `|mean − target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> Option<f64> {
        self.stderr.map(|s| {
            if s == 0.0 {
                if self.mean == target {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (self.mean - target).abs() / s
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub n_trajectories: u64,
    pub frac_to_one: Estimate,
    pub plays: Estimate,
    /// Seconds.
    pub total_time: Estimate,
    /// `Tr(ψ†Hψ)` at absorption minus its initial value, GeV.
    pub energy_drift: Estimate,
    /// Mean `|ΔE| · 2τ_c / ħ`.
    pub uncertainty_ratio: f64,
    pub max_plays_observed: u64,
}

fn diagonal_energy(x: f64, h: &Hamiltonian2) -> f64 {
    let psi = PsiMatrix(Mat2::from_real(x.sqrt(), 0.0, 0.0, (1.0 - x).sqrt()));
    energy_expectation(&psi, h)
}

pub fn ensemble_results(config: &EnsembleConfig, exec: Execution) -> Result<Vec<GameResult>> {
    if config.n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            constraint: "must be >= 1".into(),
        });
    }
    validate_start(config.x0, config.tau_c)?;
    map_indices(config.n, exec, |i| {
        let mut rng = ensemble_rng(config.master_seed, i);
        play_game(
            &config.model,
            config.x0,
            config.tau_c,
            config.max_plays,
            &mut rng,
            |_| {},
        )
    })
}

/// Runs `n` independent games and aggregates them in index order, so the
/// summary is bit-identical for any thread count.
pub fn ensemble_run(config: &EnsembleConfig, exec: Execution) -> Result<EnsembleSummary> {
    let results = ensemble_results(config, exec)?;
    Ok(summarize(config, &results))
}

pub fn summarize(config: &EnsembleConfig, results: &[GameResult]) -> EnsembleSummary {
    let n = results.len() as u64;
    let h = Hamiltonian2 {
        energy: config.level_energy,
    };
    let e0 = diagonal_energy(config.x0, &h);
    let drifts = results.iter().map(|r| diagonal_energy(r.x_final, &h) - e0);
    let uncertainty_ratio =
        drifts.clone().map(f64::abs).sum::<f64>() / n as f64 * 2.0 * config.tau_c / HBAR_GEV_S;
    EnsembleSummary {
        n_trajectories: n,
        frac_to_one: Estimate::from_samples(
            results.iter().map(|r| {
                if r.outcome == Outcome::ToOne {
                    1.0
                } else {
                    0.0
                }
            }),
            n,
        ),
        plays: Estimate::from_samples(results.iter().map(|r| r.n_plays as f64), n),
        total_time: Estimate::from_samples(results.iter().map(|r| r.total_time), n),
        energy_drift: Estimate::from_samples(drifts, n),
        uncertainty_ratio,
        max_plays_observed: results.iter().map(|r| r.n_plays).max().unwrap_or(0),
    }
}

/// Sample mean of `x(1 − x)` over the ensemble after each play, absorbed
/// games contributing zero; index 0 is the initial state.
pub fn entanglement_profile(config: &EnsembleConfig, exec: Execution) -> Result<Vec<f64>> {
    validate_start(config.x0, config.tau_c)?;
    let paths = map_indices(config.n, exec, |i| {
        let mut rng = ensemble_rng(config.master_seed, i);
        record_game(
            &config.model,
            config.x0,
            config.tau_c,
            config.max_plays,
            &mut rng,
        )
    })?;
    let longest = paths.iter().map(|t| t.n_plays).max().unwrap_or(0) as usize;
    let mut sums = vec![0.0; longest + 1];
    for path in &paths {
        sums[0] += path.x0 * (1.0 - path.x0);
        for s in &path.steps {
            sums[s.play as usize] += s.x * (1.0 - s.x);
        }
    }
    let n = config.n as f64;
    Ok(sums.into_iter().map(|s| s / n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pop(x: f64, y: f64) -> PopulationState {
        PopulationState { x, y }
    }

    /// Replays a fixed coin sequence.
    struct Scripted(std::vec::IntoIter<Coin>);

    impl RngCore for Scripted {
        fn next_u32(&mut self) -> u32 {
            (self.next_u64() >> 32) as u32
        }
        fn next_u64(&mut self) -> u64 {
            match self.0.next().expect("script exhausted") {
                Coin::Heads => u64::MAX,
                Coin::Tails => 0,
            }
        }
        fn fill_bytes(&mut self, _dst: &mut [u8]) {
            unimplemented!()
        }
    }

    fn scripted(coins: &[Coin]) -> Scripted {
        Scripted(Vec::from(coins).into_iter())
    }

    #[test]
    fn fixed_stake_step_examples() {
        let out = step_fixed_stake(&pop(0.5, 0.5), 0.1, Coin::Heads);
        assert!((out.x - 0.6).abs() < 1e-15 && (out.y - 0.4).abs() < 1e-15);

        let weak = pop(0.05, 0.95);
        assert_eq!(effective_stake(&weak, 0.1), 0.05);
        assert_eq!(step_fixed_stake(&weak, 0.1, Coin::Tails), pop(0.0, 1.0));

        let out = step_fixed_stake(&pop(0.3, 0.7), 0.3, Coin::Heads);
        assert!((out.x - 0.6).abs() < 1e-15);
        assert_eq!(out.x + out.y, 1.0);
    }

    #[test]
    fn one_shot_fixed_stake_game() {
        let model = NoiseModel::fixed_stake(0.5).unwrap();
        for coin in [Coin::Heads, Coin::Tails] {
            let t = record_game(&model, 0.5, 1.0, 10, &mut scripted(&[coin])).unwrap();
            assert_eq!(t.n_plays, 1);
            assert_eq!(t.total_time, 2.0);
        }
    }

    #[test]
    fn fixed_stake_cap_is_reported() {
        let model = NoiseModel::fixed_stake(0.001).unwrap();
        let err = record_game(&model, 0.5, 1.0, 50, &mut trajectory_rng(1)).unwrap_err();
        assert_eq!(err, Error::RunawayWalk { cap: 50 });
    }

    #[test]
    fn stake_validation() {
        assert!(NoiseModel::fixed_stake(0.0).is_err());
        assert!(NoiseModel::fixed_stake(0.6).is_err());
        assert!(NoiseModel::fixed_stake(0.5).is_ok());
        assert!(run_fixed_stake(1.0, 0.1, 1.0, 0).is_err());
        assert!(run_double_or_nothing(0.0, 1.0, 0).is_err());
        assert!(run_double_or_nothing(0.5, -1.0, 0).is_err());
    }

    #[test]
    fn double_or_nothing_step_examples() {
        let tau = 3.0;
        let (p, dt) = step_double_or_nothing(&pop(0.5, 0.5), tau, Coin::Tails);
        assert!(p.is_collapsed());
        assert_eq!(dt, 2.0 * tau);

        let (p, dt) = step_double_or_nothing(&population(0.3), tau, Coin::Heads);
        assert_eq!(p.x, 0.6);
        assert!((dt - tau / 0.7).abs() < 1e-15);

        let (p, _) = step_double_or_nothing(&population(0.3), tau, Coin::Tails);
        assert_eq!((p.x, p.y), (0.0, 1.0));

        // weaker branch is y
        let (p, _) = step_double_or_nothing(&population(0.75), tau, Coin::Tails);
        assert_eq!(p.x, 0.5);
        let (p, _) = step_double_or_nothing(&population(0.75), tau, Coin::Heads);
        assert_eq!(p.x, 1.0);
    }

    #[test]
    fn double_or_nothing_half_is_one_play() {
        for seed in 0..100 {
            let t = run_double_or_nothing(0.5, 1.0, seed).unwrap();
            assert_eq!(t.n_plays, 1);
            assert_eq!(t.total_time, 2.0);
        }
    }

    #[test]
    fn trajectory_invariants() {
        for seed in 0..200 {
            let t = run_double_or_nothing(0.3, 1.0, seed).unwrap();
            let last = t.steps.last().unwrap();
            assert!(last.x == 0.0 || last.x == 1.0);
            assert_eq!(t.outcome == Outcome::ToOne, last.x == 1.0);
            let mut prev = 0.0;
            for s in &t.steps {
                assert!(s.time > prev);
                assert!((0.0..=1.0).contains(&s.x));
                prev = s.time;
            }
        }
    }

    #[test]
    fn exact_recurrences() {
        assert_eq!(expected_plays_double_or_nothing(0.5), 1.0);
        assert_eq!(expected_plays_double_or_nothing(0.25), 1.5);
        assert_eq!(expected_plays_double_or_nothing(0.75), 1.5);
        assert!((expected_plays_double_or_nothing(0.3) - 2.0).abs() < 1e-12);
        assert_eq!(expected_time_double_or_nothing(0.5), 2.0);
        // 1/0.75 + (1/2)·2
        assert!((expected_time_double_or_nothing(0.25) - (4.0 / 3.0 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn entanglement_change_examples() {
        assert!((avg_entanglement_change(0.5, 0.1).unwrap() + 0.01).abs() < 1e-15);
        assert_eq!(avg_entanglement_change(0.4, 0.0).unwrap(), 0.0);
        assert!((avg_entanglement_change(0.3, 0.3).unwrap() + 0.09).abs() < 1e-15);
        assert!(avg_entanglement_change(0.3, 0.31).is_err());
        assert!(avg_entanglement_change(1.1, 0.0).is_err());
        assert_eq!(double_or_nothing_stake(0.3), 0.3);
        assert_eq!(double_or_nothing_stake(0.8), 1.0 - 0.8);
    }

    #[test]
    fn exact_profile_is_strictly_decreasing() {
        for x0 in [0.1, 0.3, 0.25, 0.7, 0.5, 0.123456] {
            let prof = expected_entanglement_profile_double_or_nothing(x0);
            assert!(prof.windows(2).all(|w| w[1] < w[0]), "x0 = {x0}");
            assert_eq!(*prof.last().unwrap(), 0.0);
        }
    }

    #[test]
    fn single_trajectory_ensemble_flags_stderr() {
        let cfg = EnsembleConfig {
            model: NoiseModel::DoubleOrNothing,
            x0: 0.3,
            tau_c: 1.0,
            level_energy: 1.0,
            n: 1,
            master_seed: 9,
            max_plays: DEFAULT_MAX_PLAYS,
        };
        let s = ensemble_run(&cfg, Execution::Sequential).unwrap();
        let t = record_game(
            &cfg.model,
            0.3,
            1.0,
            DEFAULT_MAX_PLAYS,
            &mut ensemble_rng(9, 0),
        )
        .unwrap();
        assert_eq!(s.n_trajectories, 1);
        assert_eq!(s.plays.mean, t.n_plays as f64);
        assert_eq!(s.total_time.mean, t.total_time);
        assert_eq!(s.frac_to_one.stderr, None);
        assert_eq!(s.frac_to_one.z_score(0.3), None);
    }

    #[test]
    fn zero_trajectories_rejected() {
        let cfg = EnsembleConfig {
            model: NoiseModel::DoubleOrNothing,
            x0: 0.3,
            tau_c: 1.0,
            level_energy: 1.0,
            n: 0,
            master_seed: 0,
            max_plays: 10,
        };
        assert!(ensemble_run(&cfg, Execution::Sequential).is_err());
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let cfg = EnsembleConfig {
            model: NoiseModel::fixed_stake(0.05).unwrap(),
            x0: 0.35,
            tau_c: 1.0e-5,
            level_energy: 0.2,
            n: 2000,
            master_seed: 77,
            max_plays: DEFAULT_MAX_PLAYS,
        };
        let a = ensemble_run(&cfg, Execution::Sequential).unwrap();
        let b = ensemble_run(&cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}

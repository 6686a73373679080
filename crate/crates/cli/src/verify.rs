//! The invariant suite behind `collapse verify`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use collapse_core::dynamics::{
    closed_form_population, det_identity_residual, geometric_rhs, nonlinear_rhs, population_rhs,
    Hamiltonian2, PopulationIntegrator, SignChoice, DEFAULT_FD_STEP,
};
use collapse_core::linalg::Mat2;
use collapse_core::phenomenology::{
    b_meson_prediction, epsilon_lower_bound, kaon_bound, predict_branching, saturation_epsilon,
    BoundInputs, PhysicalConstants, SplittingRule,
};
use collapse_core::qstate::{
    entanglement_entropy, EntangledState, Particle, PopulationState, PsiMatrix, Unitary2,
};
use collapse_core::stochastic::{
    avg_entanglement_change, double_or_nothing_stake, ensemble_results, ensemble_run,
    expected_plays_double_or_nothing, EnsembleConfig, NoiseModel, Outcome, DEFAULT_MAX_PLAYS,
};
use collapse_core::units::{ev_to_gev, gev_to_ev, gev_to_mev, mev_to_gev};
use collapse_core::Execution;

use crate::config::VerifyTask;

/// Trajectories per Monte Carlo property.
pub const ENSEMBLE_N: u64 = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub cases: usize,
    /// Largest observed violation measure; `0` for exact properties.
    pub worst: f64,
    /// Pass threshold for `worst`; exact properties require `worst == 0`.
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

struct Tally {
    name: &'static str,
    tolerance: f64,
    cases: usize,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            cases: 0,
            worst: 0.0,
        }
    }

    /// NaN is sticky.
    fn record(&mut self, err: f64) {
        self.cases += 1;
        if !self.worst.is_nan() && (err.is_nan() || err > self.worst) {
            self.worst = err;
        }
    }

    fn check(&mut self, ok: bool) {
        self.record(if ok { 0.0 } else { 1.0 });
    }

    fn finish(self, detail: impl Into<String>) -> PropertyOutcome {
        let passed = if self.tolerance == 0.0 {
            self.worst == 0.0
        } else {
            self.worst < self.tolerance
        };
        PropertyOutcome {
            name: self.name,
            cases: self.cases,
            worst: self.worst,
            tolerance: self.tolerance,
            passed,
            detail: detail.into(),
        }
    }
}

fn complex(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
}

fn random_psi(rng: &mut ChaCha8Rng) -> PsiMatrix {
    loop {
        let m = Mat2::new(
            complex(rng, 1.0),
            complex(rng, 1.0),
            complex(rng, 1.0),
            complex(rng, 1.0),
        );
        if m.frobenius_sq() > 1e-6 {
            return PsiMatrix::normalized(m).expect("nonzero");
        }
    }
}

fn random_unitary(rng: &mut ChaCha8Rng) -> Unitary2 {
    Unitary2::from_angles(
        rng.random_range(-PI..PI),
        rng.random_range(-PI..PI),
        rng.random_range(-PI..PI),
        rng.random_range(-PI..PI),
    )
}

fn normalization(rng: &mut ChaCha8Rng, cases: usize) -> PropertyOutcome {
    let mut t = Tally::new("normalization", 1e-12);
    for _ in 0..cases {
        let (a, b) = (complex(rng, 1.0), complex(rng, 1.0));
        match EntangledState::new(a, b) {
            Ok(s) => t.record((s.alpha().norm_sqr() + s.beta().norm_sqr() - 1.0).abs()),
            Err(_) => t.check(a.norm() + b.norm() == 0.0),
        }
    }
    t.finish("|α|² + |β|² = 1 after construction")
}

fn determinant_range(rng: &mut ChaCha8Rng, cases: usize) -> PropertyOutcome {
    let mut t = Tally::new("entanglement-determinant", 1e-12);
    for _ in 0..cases {
        let psi = random_psi(rng);
        let e = psi.entanglement_det();
        let [lo, hi] = psi.reduced_density(Particle::One).eigenvalues();
        t.record((lo * hi - e).abs());
        t.check((0.0..=0.25 + 1e-15).contains(&e));
        let x: f64 = rng.random_range(0.0..=1.0);
        let diag = EntangledState::new(
            Complex64::new(x.sqrt(), 0.0),
            Complex64::new((1.0 - x).sqrt(), 0.0),
        )
        .expect("unit vector")
        .to_psi();
        t.record((diag.entanglement_det() - x * (1.0 - x)).abs());
    }
    t.finish("0 <= Det(ψ†ψ) <= 1/4, equals x(1 − x) on diagonal states and λ₁λ₂ of ρ₁")
}

fn local_unitary_invariance(rng: &mut ChaCha8Rng, cases: usize) -> PropertyOutcome {
    let mut t = Tally::new("local-unitary-invariance", 1e-12);
    for _ in 0..cases {
        let psi = random_psi(rng);
        let (u, v) = (random_unitary(rng), random_unitary(rng));
        t.record((psi.transform(&u, &v).entanglement_det() - psi.entanglement_det()).abs());
    }
    t.finish("|Det(ψ'†ψ') − Det(ψ†ψ)| for ψ' = UψV†")
}

fn reduced_entropy(rng: &mut ChaCha8Rng, cases: usize) -> PropertyOutcome {
    let mut t = Tally::new("reduced-entropy", 1e-12);
    for _ in 0..cases {
        let x: f64 = rng.random_range(0.0..=1.0);
        let phase = rng.random_range(-PI..PI);
        let s = EntangledState::new(
            Complex64::new(x.sqrt(), 0.0),
            Complex64::from_polar((1.0 - x).sqrt(), phase),
        )
        .expect("unit vector");
        let rho = s.to_psi().reduced_density(Particle::Two);
        let vn = rho.von_neumann_entropy();
        let want = entanglement_entropy(s.x()).expect("x in [0, 1]");
        t.record((vn + want).abs());
    }
    t.finish("S(x) = −(von Neumann entropy of either particle)")
}

fn determinant_identity(rng: &mut ChaCha8Rng, cases: usize) -> PropertyOutcome {
    let mut t = Tally::new("determinant-identity", 1e-12);
    let scale = 10.0 / SQRT_2;
    for _ in 0..cases {
        let a = Mat2::new(
            complex(rng, scale),
            complex(rng, scale),
            complex(rng, scale),
            complex(rng, scale),
        );
        t.record(det_identity_residual(&a, complex(rng, 1.0)));
    }
    t.finish("Det(1 + νA) = 1 + ν Tr A + ν² Det A, entries up to 10")
}

fn generator_consistency(rng: &mut ChaCha8Rng, cases: usize) -> PropertyOutcome {
    let mut t = Tally::new("generator-consistency", 1e-6);
    while t.cases < cases {
        let psi = random_psi(rng);
        if psi.entanglement_det() <= 1e-8 {
            continue;
        }
        let h = Hamiltonian2::new(rng.random_range(0.1..5.0)).expect("positive");
        let eta = rng.random_range(0.05..2.0);
        let sign = if rng.random_bool(0.5) {
            SignChoice::Plus
        } else {
            SignChoice::Minus
        };
        let an = nonlinear_rhs(&psi, &h, eta, sign);
        match geometric_rhs(&psi, &h, eta, sign, DEFAULT_FD_STEP) {
            Ok(fd) => t.record((an - fd).max_abs() / an.max_abs()),
            Err(_) => t.record(f64::NAN),
        }
    }
    t.finish("expanded generator against finite differences of the determinant form, relative")
}

fn closed_form_vs_integrator(rng: &mut ChaCha8Rng, cases: usize) -> PropertyOutcome {
    let mut t = Tally::new("closed-form-vs-integrator", 1e-8);
    let rk = PopulationIntegrator::default();
    let runs = (cases / 100).max(2);
    for run in 0..runs {
        let x0 = if run == 0 {
            0.5
        } else {
            rng.random_range(0.01..0.99)
        };
        let tau = 10f64.powf(rng.random_range(-20.0..10.0));
        let sign = if run % 2 == 0 {
            SignChoice::Plus
        } else {
            SignChoice::Minus
        };
        let times: Vec<f64> = (0..1000).map(|i| 10.0 * tau * i as f64 / 999.0).collect();
        match rk.sample(
            PopulationState::new(x0).expect("in range"),
            tau,
            sign,
            &times,
        ) {
            Ok(path) => {
                for (time, p) in times.iter().zip(path) {
                    t.record((p.x - closed_form_population(x0, *time, tau, sign)).abs());
                }
            }
            Err(_) => t.record(f64::NAN),
        }
    }
    t.finish(format!(
        "RK4 x(t) against the logistic solution, {runs} runs of 1000 points over 10 τ_c"
    ))
}

fn population_sum(rng: &mut ChaCha8Rng, cases: usize) -> PropertyOutcome {
    let mut t = Tally::new("population-sum", 0.0);
    for _ in 0..cases {
        let p = PopulationState::new(rng.random_range(0.0..=1.0)).expect("in range");
        let tau = 10f64.powf(rng.random_range(-20.0..20.0));
        for sign in [SignChoice::Plus, SignChoice::Minus] {
            let (dx, dy) = population_rhs(&p, tau, sign);
            t.record((dx + dy).abs());
        }
    }
    t.finish("dx/dt + dy/dt = 0 exactly")
}

fn entropy_arrow(rng: &mut ChaCha8Rng, cases: usize) -> PropertyOutcome {
    let mut t = Tally::new("entropy-arrow", 1e-12);
    for _ in 0..cases {
        let x: f64 = rng.random_range(0.0..=1.0);
        let delta = rng.random_range(0.0..=x.min(1.0 - x));
        match avg_entanglement_change(x, delta) {
            Ok(d) => t.record((d + delta * delta).abs()),
            Err(_) => t.record(f64::NAN),
        }
    }
    t.finish("two-branch average change of x(1 − x) equals −δ²")
}

fn maximal_stake(rng: &mut ChaCha8Rng, cases: usize) -> PropertyOutcome {
    let mut t = Tally::new("maximal-stake", 0.0);
    for _ in 0..cases {
        let x: f64 = rng.random_range(0.0..=1.0);
        let best = double_or_nothing_stake(x);
        let other = rng.random_range(0.0..=x.min(1.0 - x));
        t.check(best == x.min(1.0 - x) && best * best >= other * other);
    }
    t.finish("the double-or-nothing stake min(x, 1 − x) maximizes δ² over admissible stakes")
}

fn ensemble(model: NoiseModel, x0: f64, n: u64, seed: u64) -> EnsembleConfig {
    EnsembleConfig {
        model,
        x0,
        tau_c: 1.0,
        level_energy: 1.0,
        n,
        master_seed: seed,
        max_plays: DEFAULT_MAX_PLAYS,
    }
}

fn models() -> [NoiseModel; 2] {
    [
        NoiseModel::DoubleOrNothing,
        NoiseModel::FixedStake { stake: 0.1 },
    ]
}

fn born_rule(seed: u64) -> PropertyOutcome {
    let mut t = Tally::new("born-rule", 5.0);
    for model in models() {
        for x0 in [0.1, 0.3, 0.5, 0.7] {
            match ensemble_run(&ensemble(model, x0, ENSEMBLE_N, seed), Execution::default()) {
                Ok(s) => {
                    let se = (x0 * (1.0 - x0) / ENSEMBLE_N as f64).sqrt();
                    t.record((s.frac_to_one.mean - x0).abs() / se);
                }
                Err(_) => t.record(f64::NAN),
            }
        }
    }
    t.finish(format!(
        "|P(x → 1) − x0| in binomial standard errors, n = {ENSEMBLE_N}, both noise models"
    ))
}

fn game_length(seed: u64) -> PropertyOutcome {
    let mut t = Tally::new("game-length", 5.0);
    let half = ensemble_results(
        &ensemble(NoiseModel::DoubleOrNothing, 0.5, 1000, seed),
        Execution::default(),
    );
    match half {
        Ok(rs) => {
            for r in rs {
                t.record(if r.n_plays == 1 && r.total_time == 2.0 {
                    0.0
                } else {
                    f64::INFINITY
                });
            }
        }
        Err(_) => t.record(f64::NAN),
    }
    t.record(if expected_plays_double_or_nothing(0.25) == 1.5 {
        0.0
    } else {
        f64::INFINITY
    });
    for x0 in [0.3, 0.25, 0.1] {
        let exact = expected_plays_double_or_nothing(x0);
        if exact > 2.0 {
            t.record(f64::INFINITY);
        }
        match ensemble_run(
            &ensemble(NoiseModel::DoubleOrNothing, x0, ENSEMBLE_N, seed),
            Execution::default(),
        ) {
            Ok(s) => t.record(s.plays.z_score(exact).unwrap_or(f64::NAN)),
            Err(_) => t.record(f64::NAN),
        }
    }
    t.finish("double-or-nothing: one play of 2 τ_c at x0 = 1/2; mean plays ≤ 2 and within 5 stderr of the exact recurrence")
}

fn energy_conservation(seed: u64) -> PropertyOutcome {
    let mut t = Tally::new("energy-conservation", 5.0);
    for model in models() {
        let cfg = ensemble(model, 0.3, ENSEMBLE_N, seed);
        match ensemble_results(&cfg, Execution::default()) {
            Ok(rs) => {
                let xs: Vec<f64> = rs.iter().map(|r| r.x_final).collect();
                let n = xs.len() as f64;
                let mean = xs.iter().sum::<f64>() / n;
                let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
                t.record((mean - 0.3).abs() / (var / n).sqrt());
                t.check(rs.iter().all(|r| match r.outcome {
                    Outcome::ToOne => r.x_final == 1.0,
                    Outcome::ToZero => r.x_final == 0.0,
                }));
            }
            Err(_) => t.record(f64::NAN),
        }
    }
    t.finish("|mean(x_final) − x0| in standard errors, both noise models")
}

fn determinism(seed: u64) -> PropertyOutcome {
    let mut t = Tally::new("determinism", 0.0);
    for model in models() {
        let cfg = ensemble(model, 0.3, 2000, seed);
        let runs = (
            ensemble_run(&cfg, Execution::Sequential),
            ensemble_run(&cfg, Execution::default()),
            ensemble_run(&cfg, Execution::default()),
        );
        match runs {
            (Ok(a), Ok(b), Ok(c)) => t.check(a == b && b == c),
            _ => t.record(f64::NAN),
        }
    }
    t.finish("same master seed gives identical summaries, sequential and parallel")
}

fn kaon(constants: &PhysicalConstants) -> PropertyOutcome {
    let mut t = Tally::new("kaon-bound", 0.0);
    let mut parts = Vec::new();
    for rule in [SplittingRule::Sqrt2, SplittingRule::Direct] {
        match kaon_bound(constants, rule) {
            Ok(b) => {
                t.check((0.5..=5.0).contains(&b.eight_pi_ratio));
                parts.push(format!("{} {:.3}", rule.name(), b.eight_pi_ratio));
            }
            Err(_) => t.record(f64::NAN),
        }
    }
    t.finish(format!("8π ε_min / E_p in [0.5, 5]: {}", parts.join(", ")))
}

fn b_meson(constants: &PhysicalConstants) -> PropertyOutcome {
    let mut t = Tally::new("b-meson-prediction", 0.0);
    let detail = match b_meson_prediction(constants, SplittingRule::Sqrt2, SplittingRule::Sqrt2) {
        Ok(b) => {
            t.check((0.5e-5..=5e-5).contains(&b.prediction.gamma));
            format!("γ_B = {:.3e} in [5e-6, 5e-5]", b.prediction.gamma)
        }
        Err(e) => {
            t.record(f64::NAN);
            e.to_string()
        }
    };
    t.finish(detail)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn bound_algebra(
    rng: &mut ChaCha8Rng,
    cases: usize,
    constants: &PhysicalConstants,
) -> PropertyOutcome {
    let mut t = Tally::new("bound-algebra", 1e-12);
    for _ in 0..cases {
        let tau = 10f64.powf(rng.random_range(-15.0..-5.0));
        let delta = 10f64.powf(rng.random_range(-3.0..1.0));
        let gamma_c = rng.random_range(0.1..1.0);
        let gamma = gamma_c * rng.random_range(1e-4..0.5);
        let base = match BoundInputs::new("random", tau, delta, gamma, gamma_c) {
            Ok(b) => b,
            Err(_) => {
                t.record(f64::NAN);
                continue;
            }
        };
        let eps = |i: &BoundInputs| epsilon_lower_bound(i, constants).map(|r| r.epsilon_min);
        let (Ok(e0), Ok(sat)) = (eps(&base), saturation_epsilon(&base, constants)) else {
            t.record(f64::NAN);
            continue;
        };
        match predict_branching(delta, tau, gamma_c, sat, constants) {
            Ok(p) => t.record(rel(p.gamma, gamma)),
            Err(_) => t.record(f64::NAN),
        }
        let scaled = [
            (
                BoundInputs {
                    delta: 2.0 * delta,
                    ..base.clone()
                },
                4.0,
            ),
            (
                BoundInputs {
                    tau: 2.0 * tau,
                    ..base.clone()
                },
                2.0,
            ),
            (
                BoundInputs {
                    gamma: 0.5 * gamma,
                    ..base.clone()
                },
                2.0,
            ),
            (
                BoundInputs {
                    gamma_c: 0.5 * gamma_c,
                    ..base.clone()
                },
                0.5,
            ),
        ];
        for (inputs, factor) in scaled {
            match eps(&inputs) {
                Ok(e) => t.record(rel(e, factor * e0)),
                Err(_) => t.record(f64::NAN),
            }
        }
    }
    t.finish("saturation round trip and Δ², τ, 1/γ, γ_c homogeneity of ε_min, relative")
}

fn unit_round_trip(rng: &mut ChaCha8Rng, cases: usize) -> PropertyOutcome {
    let mut t = Tally::new("unit-round-trip", 1e-15);
    for _ in 0..cases {
        let v = 10f64.powf(rng.random_range(-30.0..30.0));
        t.record(rel(mev_to_gev(gev_to_mev(v)), v));
        t.record(rel(ev_to_gev(gev_to_ev(v)), v));
    }
    t.finish("GeV ↔ MeV and GeV ↔ eV, relative")
}

/// Runs every property. Each property draws from its own generator so
/// adding one does not perturb the others.
pub fn run_suite(task: &VerifyTask, constants: &PhysicalConstants) -> Vec<PropertyOutcome> {
    let cases = task.cases;
    let rng = |k: u64| {
        let mut r = ChaCha8Rng::seed_from_u64(task.seed);
        r.set_stream(k);
        r
    };
    vec![
        normalization(&mut rng(1), cases),
        determinant_range(&mut rng(2), cases),
        local_unitary_invariance(&mut rng(3), cases),
        reduced_entropy(&mut rng(4), cases),
        determinant_identity(&mut rng(5), cases),
        generator_consistency(&mut rng(6), cases),
        closed_form_vs_integrator(&mut rng(7), cases),
        population_sum(&mut rng(8), cases),
        entropy_arrow(&mut rng(9), cases),
        maximal_stake(&mut rng(10), cases),
        born_rule(task.seed),
        game_length(task.seed),
        energy_conservation(task.seed),
        determinism(task.seed),
        kaon(constants),
        b_meson(constants),
        bound_algebra(&mut rng(11), cases, constants),
        unit_round_trip(&mut rng(12), cases),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_rejects_nan_and_exact_misses() {
        let mut t = Tally::new("x", 1e-3);
        t.record(1e-4);
        t.record(f64::NAN);
        t.record(0.0);
        assert!(!t.finish("").passed);
        let mut t = Tally::new("y", 0.0);
        t.check(true);
        assert!(t.finish("").passed);
    }
}

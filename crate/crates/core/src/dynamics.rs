//! Fixed-sign nonlinear evolution.
//!
//! The generator is `(ħ/ε) dψ/dt = ±σ ∂/∂ψ* Det(1 ∓ iη ψ†ψ)` with `η = E/ε`.
//! Expanding the determinant gives the linear Schrödinger term plus a
//! nonlinear term proportional to `Det(ψ†ψ) H ψ†⁻¹`, which is evaluated here
//! as `Det(ψ) adj(ψ†)` so it stays finite on collapsed (singular) states.
//!
//! In the interaction picture a diagonal ψ keeps its form and the branch
//! populations obey the logistic pair `dx/dt = ∓xy/τ_c`, `dy/dt = ±xy/τ_c`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_finite, require_positive, Error, Result};
use crate::linalg::{Mat2, I};
use crate::qstate::{PopulationState, PsiMatrix};
use crate::units::HBAR_GEV_S;

/// Which branch of the `±` / `∓` pair is active.
///
/// `Plus` selects the upper signs of the geometric generator
/// `±σ ∂/∂ψ* Det(1 ∓ iηψ†ψ)`. On diagonal states it drains the first branch,
/// `dx/dt = −xy/τ_c`, and its expanded nonlinear term is `−η H Det(ψ) adj(ψ†)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignChoice {
    Plus,
    Minus,
}

impl SignChoice {
    pub fn value(self) -> f64 {
        match self {
            SignChoice::Plus => 1.0,
            SignChoice::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SignChoice::Plus => SignChoice::Minus,
            SignChoice::Minus => SignChoice::Plus,
        }
    }
}

/// `H = E σ_z`, levels at `±E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonian2 {
    pub energy: f64,
}

impl Hamiltonian2 {
    pub fn new(energy: f64) -> Result<Self> {
        Ok(Self {
            energy: require_finite("E", energy)?,
        })
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2::sigma_z() * self.energy
    }
}

/// How per-particle dispersions combine into the total `Δ`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DispersionRule {
    /// `Δ = √2 (E₁ + E₂)`
    #[default]
    LinearSum,
    /// `Δ = √(2 (E₁² + E₂²))`
    Quadrature,
}

impl DispersionRule {
    pub fn name(self) -> &'static str {
        match self {
            DispersionRule::LinearSum => "linear-sum",
            DispersionRule::Quadrature => "quadrature",
        }
    }
}

/// Total dispersion driving collapse. Contributions from the two particles
/// add; they never cancel.
pub fn total_dispersion(e1: f64, e2: f64, rule: DispersionRule) -> Result<f64> {
    for (name, e) in [("E1", e1), ("E2", e2)] {
        if !(e.is_finite() && e >= 0.0) {
            return Err(Error::InvalidParameter {
                name,
                value: e,
                constraint: "must be finite and >= 0".into(),
            });
        }
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    Ok(match rule {
        DispersionRule::LinearSum => sqrt2 * (e1 + e2),
        DispersionRule::Quadrature => (2.0 * (e1 * e1 + e2 * e2)).sqrt(),
    })
}

/// `τ_c = ħ ε / Δ²` in seconds.
///
/// `Δ = 0` returns `f64::INFINITY`: without dispersion the state never
/// collapses.
pub fn collapse_time(epsilon: f64, delta: f64) -> Result<f64> {
    collapse_time_with_hbar(HBAR_GEV_S, epsilon, delta)
}

/// [`collapse_time`] with an explicit `ħ`, for other unit systems.
pub fn collapse_time_with_hbar(hbar: f64, epsilon: f64, delta: f64) -> Result<f64> {
    require_positive("hbar", hbar)?;
    require_positive("epsilon", epsilon)?;
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            constraint: "must be finite and >= 0".into(),
        });
    }
    if delta == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(hbar * epsilon / (delta * delta))
}

/// The universal scale `ε` together with per-particle level energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseParameters {
    pub epsilon: f64,
    pub e1: f64,
    pub e2: f64,
    pub rule: DispersionRule,
}

impl CollapseParameters {
    pub fn new(epsilon: f64, e1: f64, e2: f64, rule: DispersionRule) -> Result<Self> {
        require_positive("epsilon", epsilon)?;
        total_dispersion(e1, e2, rule)?;
        Ok(Self {
            epsilon,
            e1,
            e2,
            rule,
        })
    }

    pub fn delta(&self) -> f64 {
        total_dispersion(self.e1, self.e2, self.rule).expect("validated at construction")
    }

    pub fn tau_c(&self) -> f64 {
        collapse_time(self.epsilon, self.delta()).expect("validated at construction")
    }

    /// `η = E₁/ε`
    pub fn eta(&self) -> f64 {
        self.e1 / self.epsilon
    }

    pub fn hamiltonian(&self) -> Hamiltonian2 {
        Hamiltonian2 { energy: self.e1 }
    }
}

/// `ħ dψ/dt` from the expanded equation, in GeV.
///
/// `−iHψ − s η H Det(ψ) adj(ψ†)` where `s = sign.value()`; see
/// [`SignChoice`] for the orientation.
pub fn nonlinear_rhs(psi: &PsiMatrix, h: &Hamiltonian2, eta: f64, sign: SignChoice) -> Mat2 {
    let hm = h.matrix();
    let p = *psi.matrix();
    let linear = (hm * p).scale(-I);
    linear + nonlinear_term(psi, h, eta, sign)
}

/// The nonlinear part of [`nonlinear_rhs`] alone.
pub fn nonlinear_term(psi: &PsiMatrix, h: &Hamiltonian2, eta: f64, sign: SignChoice) -> Mat2 {
    let p = *psi.matrix();
    let regularized = p.adjoint().adjugate().scale(p.det());
    (h.matrix() * regularized) * (-sign.value() * eta)
}

/// Default central-difference step for [`geometric_rhs`].
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// `ħ dψ/dt` evaluated straight from the determinant generator by numerical
/// Wirtinger differentiation, `∂/∂ψ* = ½(∂/∂Re + i ∂/∂Im)`, with central
/// differences of size `step` on every entry.
///
/// At `η = 0` the generator degenerates to the quadratic form `Tr(ψ†ψ)`,
/// i.e. `−iH ∂|Ψ|²/∂Ψ*`, which is differentiated instead.
pub fn geometric_rhs(
    psi: &PsiMatrix,
    h: &Hamiltonian2,
    eta: f64,
    sign: SignChoice,
    step: f64,
) -> Result<Mat2> {
    require_finite("eta", eta)?;
    let p = *psi.matrix();
    let sigma = Mat2::sigma_z();
    if eta == 0.0 {
        let grad = wirtinger_gradient(&p, step, |m| Complex64::new(m.frobenius_sq(), 0.0))?;
        return Ok((sigma * grad).scale(-I * h.energy));
    }
    // upper signs: +σ, ν = −iη; lower signs: −σ, ν = +iη
    let s = sign.value();
    let nu = Complex64::new(0.0, -s * eta);
    let generator = |m: &Mat2| (Mat2::identity() + (m.adjoint() * *m).scale(nu)).det();
    let grad = wirtinger_gradient(&p, step, generator)?;
    // ε = E/η
    Ok((sigma * grad) * (s * h.energy / eta))
}

fn wirtinger_gradient(p: &Mat2, step: f64, f: impl Fn(&Mat2) -> Complex64) -> Result<Mat2> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::StepUnderflow { step });
    }
    let mut out = Mat2::zero();
    for r in 0..2 {
        for c in 0..2 {
            let z = p.m[r][c];
            if z.re + step == z.re || z.im + step == z.im {
                return Err(Error::StepUnderflow { step });
            }
            let shifted = |dz: Complex64| {
                let mut q = *p;
                q.m[r][c] = z + dz;
                f(&q)
            };
            let d_re = (shifted(Complex64::new(step, 0.0)) - shifted(Complex64::new(-step, 0.0)))
                / (2.0 * step);
            let d_im = (shifted(Complex64::new(0.0, step)) - shifted(Complex64::new(0.0, -step)))
                / (2.0 * step);
            out.m[r][c] = 0.5 * (d_re + I * d_im);
        }
    }
    if !out.is_finite() {
        return Err(Error::StepUnderflow { step });
    }
    Ok(out)
}

/// `|Det(I + νA) − (1 + ν Tr A + ν² Det A)|`
pub fn det_identity_residual(a: &Mat2, nu: Complex64) -> f64 {
    let lhs = (Mat2::identity() + a.scale(nu)).det();
    let rhs = 1.0 + nu * a.trace() + nu * nu * a.det();
    (lhs - rhs).norm()
}

/// `(dx/dt, dy/dt)`; `Plus` gives `(−xy/τ_c, +xy/τ_c)`.
pub fn population_rhs(p: &PopulationState, tau_c: f64, sign: SignChoice) -> (f64, f64) {
    let rate = p.x * p.y / tau_c;
    let dx = -sign.value() * rate;
    (dx, -dx)
}

/// Closed-form solution of the population pair for `Plus`:
/// `x(t) = x₀ / (x₀ + (1 − x₀) e^{t/τ_c})`.
pub fn closed_form_x(x0: f64, t: f64, tau_c: f64) -> f64 {
    closed_form_population(x0, t, tau_c, SignChoice::Plus)
}

/// Closed form for either sign; `Minus` is the time-reversed logistic.
pub fn closed_form_population(x0: f64, t: f64, tau_c: f64, sign: SignChoice) -> f64 {
    if x0 <= 0.0 || x0 >= 1.0 {
        return x0.clamp(0.0, 1.0);
    }
    let decay = (-sign.value() * t / tau_c).exp();
    let w = x0 * decay;
    if w.is_infinite() {
        return 1.0;
    }
    w / (w + (1.0 - x0))
}

/// Fixed-step classical RK4 for the population pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopulationIntegrator {
    steps_per_tau_c: u32,
}

impl Default for PopulationIntegrator {
    fn default() -> Self {
        Self {
            steps_per_tau_c: Self::MIN_STEPS_PER_TAU_C,
        }
    }
}

impl PopulationIntegrator {
    /// Step size is never coarser than `τ_c / 100`.
    pub const MIN_STEPS_PER_TAU_C: u32 = 100;

    pub fn new(steps_per_tau_c: u32) -> Result<Self> {
        if steps_per_tau_c < Self::MIN_STEPS_PER_TAU_C {
            return Err(Error::Integrator(format!(
                "steps per tau_c must be >= {}, got {steps_per_tau_c}",
                Self::MIN_STEPS_PER_TAU_C
            )));
        }
        Ok(Self { steps_per_tau_c })
    }

    pub fn steps_per_tau_c(&self) -> u32 {
        self.steps_per_tau_c
    }

    pub fn evolve(
        &self,
        p0: PopulationState,
        tau_c: f64,
        sign: SignChoice,
        t: f64,
    ) -> Result<PopulationState> {
        Ok(self.sample(p0, tau_c, sign, &[t])?[0])
    }

    /// States at each of the ascending, non-negative `times`, integrating
    /// through them in one pass.
    pub fn sample(
        &self,
        p0: PopulationState,
        tau_c: f64,
        sign: SignChoice,
        times: &[f64],
    ) -> Result<Vec<PopulationState>> {
        if tau_c.is_nan() || tau_c <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "tau_c",
                value: tau_c,
                constraint: "must be > 0".into(),
            });
        }
        let max_step = tau_c / f64::from(self.steps_per_tau_c);
        let mut out = Vec::with_capacity(times.len());
        let mut state = p0;
        let mut now = 0.0;
        for &t in times {
            if !(t.is_finite() && t >= now) {
                return Err(Error::Integrator(format!(
                    "sample times must be finite, non-negative and ascending (got {t} after {now})"
                )));
            }
            let span = t - now;
            if span > 0.0 && tau_c.is_finite() {
                let n = (span / max_step).ceil().max(1.0) as u64;
                let h = span / n as f64;
                for _ in 0..n {
                    state = rk4_step(state, tau_c, sign, h);
                }
            }
            now = t;
            out.push(state);
        }
        Ok(out)
    }
}

fn rk4_step(p: PopulationState, tau_c: f64, sign: SignChoice, h: f64) -> PopulationState {
    let at = |x: f64, y: f64| population_rhs(&PopulationState { x, y }, tau_c, sign);
    let (k1x, k1y) = at(p.x, p.y);
    let (k2x, k2y) = at(p.x + 0.5 * h * k1x, p.y + 0.5 * h * k1y);
    let (k3x, k3y) = at(p.x + 0.5 * h * k2x, p.y + 0.5 * h * k2y);
    let (k4x, k4y) = at(p.x + h * k3x, p.y + h * k3y);
    PopulationState {
        x: p.x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        y: p.y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
    }
}

/// `Tr(ψ† H ψ)`, with `H` acting on particle 1.
pub fn energy_expectation(psi: &PsiMatrix, h: &Hamiltonian2) -> f64 {
    let p = *psi.matrix();
    (p.adjoint() * h.matrix() * p).trace().re
}

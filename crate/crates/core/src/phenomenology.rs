//! Lower bound on the collapse scale `ε` from an unstable entangled state
//! with a small symmetry-violating branching ratio, and the branching ratio
//! it implies for another system when the bound is saturated.
//!
//! If collapse into the factorized constituents (violation ratio `γ_c`) had
//! time to happen before decay, the observed ratio `γ` would be larger.
//! Exponential collapse then requires `τ_c ≥ γ_c τ / γ`, and with
//! `τ_c = ħε/Δ²` this bounds `ε` from below.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::DispersionRule;
use crate::error::{require_positive, Error, Result};
use crate::units::{mev_to_gev, HBAR_GEV_S, PLANCK_ENERGY_GEV, PLANCK_ENERGY_ROUNDED_GEV};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// GeV·s
    pub hbar: f64,
    /// GeV
    pub planck_energy: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: HBAR_GEV_S,
            planck_energy: PLANCK_ENERGY_GEV,
        }
    }
}

impl PhysicalConstants {
    /// Same `ħ`, Planck energy rounded to `10¹⁹ GeV`.
    pub fn rounded_planck() -> Self {
        Self {
            planck_energy: PLANCK_ENERGY_ROUNDED_GEV,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("hbar", self.hbar)?;
        require_positive("planck_energy", self.planck_energy)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub label: String,
    /// Lifetime, s.
    pub tau: f64,
    /// Dispersion, GeV.
    pub delta: f64,
    /// Observed violating branching ratio.
    pub gamma: f64,
    /// Violating branching ratio if collapse precedes decay.
    pub gamma_c: f64,
}

impl BoundInputs {
    pub fn new(
        label: impl Into<String>,
        tau: f64,
        delta: f64,
        gamma: f64,
        gamma_c: f64,
    ) -> Result<Self> {
        let inputs = Self {
            label: label.into(),
            tau,
            delta,
            gamma,
            gamma_c,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    /// `γ = 0` is allowed through here and reported as an infinite bound by
    /// [`epsilon_lower_bound`].
    pub fn validate(&self) -> Result<()> {
        require_positive("tau", self.tau)?;
        require_positive("delta", self.delta)?;
        require_positive("gamma_c", self.gamma_c)?;
        for (name, v) in [("gamma", self.gamma), ("gamma_c", self.gamma_c)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain {
                    name,
                    value: v,
                    expected: "0 <= value <= 1",
                });
            }
        }
        Ok(())
    }

    /// Whether `γ < γ_c`, i.e. the bound says more than `τ_c ≥ τ`.
    pub fn is_meaningful(&self) -> bool {
        self.gamma < self.gamma_c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub inputs: BoundInputs,
    pub constants: PhysicalConstants,
    /// s
    pub tau_c_min: f64,
    /// GeV
    pub epsilon_min: f64,
    pub epsilon_over_planck: f64,
    /// `8π ε_min / E_p`
    pub eight_pi_ratio: f64,
}

/// `τ_c,min = γ_c τ / γ` and `ε_min = Δ² τ_c,min / ħ`.
pub fn epsilon_lower_bound(
    inputs: &BoundInputs,
    constants: &PhysicalConstants,
) -> Result<BoundResult> {
    inputs.validate()?;
    constants.validate()?;
    if inputs.gamma == 0.0 {
        return Err(Error::InfiniteBound);
    }
    let tau_c_min = inputs.gamma_c * inputs.tau / inputs.gamma;
    let epsilon_min = inputs.delta * inputs.delta * tau_c_min / constants.hbar;
    let epsilon_over_planck = epsilon_min / constants.planck_energy;
    Ok(BoundResult {
        inputs: inputs.clone(),
        constants: *constants,
        tau_c_min,
        epsilon_min,
        epsilon_over_planck,
        eight_pi_ratio: 8.0 * PI * epsilon_over_planck,
    })
}

/// The `ε` at which the bound holds with equality: all of the observed
/// violation comes from collapse.
pub fn saturation_epsilon(inputs: &BoundInputs, constants: &PhysicalConstants) -> Result<f64> {
    epsilon_lower_bound(inputs, constants).map(|r| r.epsilon_min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchingPrediction {
    pub gamma: f64,
    /// `γ > 1`: saturation cannot hold for this system.
    pub unphysical: bool,
}

/// `γ = γ_c τ Δ² / (ħ ε) = γ_c τ / τ_c`.
pub fn predict_branching(
    delta: f64,
    tau: f64,
    gamma_c: f64,
    epsilon: f64,
    constants: &PhysicalConstants,
) -> Result<BranchingPrediction> {
    require_positive("delta", delta)?;
    require_positive("tau", tau)?;
    constants.validate()?;
    if !(0.0..=1.0).contains(&gamma_c) {
        return Err(Error::Domain {
            name: "gamma_c",
            value: gamma_c,
            expected: "0 <= gamma_c <= 1",
        });
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon,
            constraint: "must be > 0".into(),
        });
    }
    let gamma = gamma_c * tau * delta * delta / (constants.hbar * epsilon);
    Ok(BranchingPrediction {
        gamma,
        unphysical: gamma > 1.0,
    })
}

/// Quark mass splitting driving the kaon estimate, GeV.
pub const KAON_MASS_SPLITTING_GEV: f64 = 0.2;
pub const KAON_LONG_LIFETIME_S: f64 = 5.0e-8;
pub const KAON_GAMMA: f64 = 2.0e-3;
/// The neutral kaons are not CP eigenstates, so a collapsed pair violates
/// CP half the time.
pub const KAON_GAMMA_C: f64 = 0.5;

/// b–d quark mass difference, GeV.
pub const B_MASS_SPLITTING_GEV: f64 = 5.0;
pub const B_LIFETIME_S: f64 = 1.0e-12;
pub const B_GAMMA_C: f64 = 0.5;

/// How a mass splitting becomes the dispersion `Δ`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplittingRule {
    /// `Δ = √2 δm`, matching `Δ = E√2` for a two-level particle.
    #[default]
    Sqrt2,
    /// `Δ = δm`
    Direct,
}

impl SplittingRule {
    pub fn dispersion(self, splitting: f64) -> f64 {
        match self {
            SplittingRule::Sqrt2 => std::f64::consts::SQRT_2 * splitting,
            SplittingRule::Direct => splitting,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SplittingRule::Sqrt2 => "sqrt2",
            SplittingRule::Direct => "direct",
        }
    }
}

impl From<DispersionRule> for SplittingRule {
    /// A single dispersive particle gives `√2 E` under either combination rule.
    fn from(_: DispersionRule) -> Self {
        SplittingRule::Sqrt2
    }
}

pub fn kaon_inputs(rule: SplittingRule) -> BoundInputs {
    BoundInputs {
        label: format!("kaon ({})", rule.name()),
        tau: KAON_LONG_LIFETIME_S,
        delta: rule.dispersion(KAON_MASS_SPLITTING_GEV),
        gamma: KAON_GAMMA,
        gamma_c: KAON_GAMMA_C,
    }
}

/// Bound from CP violation in long-lived neutral kaon decay.
pub fn kaon_bound(constants: &PhysicalConstants, rule: SplittingRule) -> Result<BoundResult> {
    epsilon_lower_bound(&kaon_inputs(rule), constants)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BMesonPrediction {
    pub kaon_rule: SplittingRule,
    pub b_rule: SplittingRule,
    /// Kaon-saturated `ε`, GeV.
    pub epsilon: f64,
    /// GeV
    pub delta: f64,
    /// s
    pub tau: f64,
    pub gamma_c: f64,
    pub prediction: BranchingPrediction,
}

/// B-system CP-violating branching ratio when the kaon bound is saturated.
pub fn b_meson_prediction(
    constants: &PhysicalConstants,
    kaon_rule: SplittingRule,
    b_rule: SplittingRule,
) -> Result<BMesonPrediction> {
    let epsilon = saturation_epsilon(&kaon_inputs(kaon_rule), constants)?;
    let delta = b_rule.dispersion(B_MASS_SPLITTING_GEV);
    let prediction = predict_branching(delta, B_LIFETIME_S, B_GAMMA_C, epsilon, constants)?;
    Ok(BMesonPrediction {
        kaon_rule,
        b_rule,
        epsilon,
        delta,
        tau: B_LIFETIME_S,
        gamma_c: B_GAMMA_C,
        prediction,
    })
}

/// Kaon mass splitting expressed in MeV, as usually quoted.
pub fn kaon_splitting_mev() -> f64 {
    crate::units::gev_to_mev(KAON_MASS_SPLITTING_GEV)
}

/// Convenience for inputs quoted in MeV.
pub fn dispersion_from_mev(splitting_mev: f64, rule: SplittingRule) -> f64 {
    rule.dispersion(mev_to_gev(splitting_mev))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn unity_factors_give_epsilon_equal_delta() {
        let k = PhysicalConstants::default();
        let delta = 0.37;
        let tau = k.hbar / delta;
        let inputs = BoundInputs::new("unit", tau, delta, 0.1, 0.1).unwrap();
        let r = epsilon_lower_bound(&inputs, &k).unwrap();
        assert!(rel(r.epsilon_min, delta) < 1e-15);
    }

    #[test]
    fn kaon_bound_arithmetic() {
        let k = PhysicalConstants::default();
        let r = kaon_bound(&k, SplittingRule::Sqrt2).unwrap();
        assert!(rel(r.tau_c_min, 1.25e-5) < 1e-15);
        // (0.2√2)² · 1.25e-5 / ħ = 1e-6 / 6.582119e-25
        assert!(rel(r.epsilon_min, 1e-6 / 6.582119e-25) < 1e-14);
        assert!((r.eight_pi_ratio - 3.1292).abs() < 1e-3);
        let direct = kaon_bound(&k, SplittingRule::Direct).unwrap();
        assert!(rel(direct.epsilon_min, 5e-7 / 6.582119e-25) < 1e-14);
        assert!((direct.epsilon_min / (k.planck_energy / (8.0 * PI)) - 1.5646).abs() < 1e-3);
    }

    #[test]
    fn gamma_homogeneity_and_errors() {
        let k = PhysicalConstants::default();
        let base = kaon_inputs(SplittingRule::Sqrt2);
        let doubled = BoundInputs {
            gamma: 2.0 * base.gamma,
            ..base.clone()
        };
        let a = saturation_epsilon(&base, &k).unwrap();
        let b = saturation_epsilon(&doubled, &k).unwrap();
        assert!(rel(b, a / 2.0) < 1e-15);

        let zero = BoundInputs {
            gamma: 0.0,
            ..base.clone()
        };
        assert_eq!(epsilon_lower_bound(&zero, &k), Err(Error::InfiniteBound));
        assert!(BoundInputs::new("bad", -1.0, 1.0, 0.1, 0.5).is_err());
        assert!(BoundInputs::new("bad", 1.0, 1.0, 1.5, 0.5).is_err());
        assert!(!BoundInputs::new("flat", 1.0, 1.0, 0.5, 0.5)
            .unwrap()
            .is_meaningful());
    }

    #[test]
    fn b_meson_prediction_value() {
        let k = PhysicalConstants::default();
        let p = b_meson_prediction(&k, SplittingRule::Sqrt2, SplittingRule::Sqrt2).unwrap();
        // 0.5 · 1e-12 · 50 / (ħ ε_K) with ħ ε_K = 1e-6 GeV²·s
        assert!(rel(p.prediction.gamma, 2.5e-5) < 1e-12);
        assert!(!p.prediction.unphysical);
        let direct_b = b_meson_prediction(&k, SplittingRule::Sqrt2, SplittingRule::Direct).unwrap();
        assert!(rel(direct_b.prediction.gamma, 1.25e-5) < 1e-12);
    }

    #[test]
    fn prediction_limits() {
        let k = PhysicalConstants::default();
        assert_eq!(
            predict_branching(1.0, 1.0, 0.5, f64::INFINITY, &k)
                .unwrap()
                .gamma,
            0.0
        );
        assert_eq!(
            predict_branching(1.0, 1.0, 0.0, 1e18, &k).unwrap().gamma,
            0.0
        );
        let huge = predict_branching(100.0, 1.0, 0.5, 1.0, &k).unwrap();
        assert!(huge.unphysical);
        assert!(predict_branching(1.0, 1.0, 0.5, 0.0, &k).is_err());
    }

    #[test]
    fn mev_inputs() {
        assert_eq!(kaon_splitting_mev(), 200.0);
        assert_eq!(dispersion_from_mev(200.0, SplittingRule::Direct), 0.2);
    }
}

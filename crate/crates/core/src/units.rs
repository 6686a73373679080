//! Units and physical constants. Energies are in GeV and times in seconds
//! everywhere in the crate.

/// Reduced Planck constant in GeV·s.
pub const HBAR_GEV_S: f64 = 6.582119e-25;

/// Planck energy in GeV (standard value).
pub const PLANCK_ENERGY_GEV: f64 = 1.22e19;

/// Planck energy rounded to its order of magnitude.
pub const PLANCK_ENERGY_ROUNDED_GEV: f64 = 1.0e19;

pub const MEV_PER_GEV: f64 = 1.0e3;
pub const EV_PER_GEV: f64 = 1.0e9;

pub fn mev_to_gev(mev: f64) -> f64 {
    mev / MEV_PER_GEV
}

pub fn gev_to_mev(gev: f64) -> f64 {
    gev * MEV_PER_GEV
}

pub fn ev_to_gev(ev: f64) -> f64 {
    ev / EV_PER_GEV
}

pub fn gev_to_ev(gev: f64) -> f64 {
    gev * EV_PER_GEV
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn named_conversions() {
        assert_eq!(mev_to_gev(200.0), 0.2);
        assert_eq!(ev_to_gev(1.0), 1e-9);
        assert_eq!(gev_to_mev(5.0), 5000.0);
    }

    proptest! {
        #[test]
        fn round_trips_are_exact_to_one_ulp(v in 1e-30f64..1e30) {
            let back = mev_to_gev(gev_to_mev(v));
            prop_assert!(((back - v) / v).abs() <= 1e-15);
            let back = gev_to_ev(ev_to_gev(v));
            prop_assert!(((back - v) / v).abs() <= 1e-15);
        }
    }
}

//! Algebraic invariants of the state space and the nonlinear generator,
//! checked against oracles written independently of the library routines.

use collapse_core::dynamics::{
    det_identity_residual, geometric_rhs, nonlinear_rhs, population_rhs, Hamiltonian2,
    PopulationIntegrator, SignChoice, DEFAULT_FD_STEP,
};
use collapse_core::linalg::Mat2;
use collapse_core::qstate::{
    entanglement_entropy, product_state, EntangledState, Particle, PopulationState, PsiMatrix,
    Unitary2,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn psi() -> impl Strategy<Value = PsiMatrix> {
    (complex(), complex(), complex(), complex())
        .prop_filter("nonzero", |(a, b, c, d)| {
            a.norm() + b.norm() + c.norm() + d.norm() > 1e-3
        })
        .prop_map(|(a, b, c, d)| PsiMatrix::normalized(Mat2::new(a, b, c, d)).unwrap())
}

fn unitary() -> impl Strategy<Value = Unitary2> {
    let angle = -std::f64::consts::PI..std::f64::consts::PI;
    (angle.clone(), angle.clone(), angle.clone(), angle)
        .prop_map(|(p, t, l, m)| Unitary2::from_angles(p, t, l, m))
}

/// Squared singular values of ψ from the characteristic polynomial of ψ†ψ,
/// computed from explicit entries.
fn squared_singular_values(p: &Mat2) -> (f64, f64) {
    let e = p.entries();
    let (a, b, c, d) = (e[0], e[1], e[2], e[3]);
    // G = ψ†ψ
    let g00 = a.norm_sqr() + c.norm_sqr();
    let g11 = b.norm_sqr() + d.norm_sqr();
    let g01 = a.conj() * b + c.conj() * d;
    let tr = g00 + g11;
    let disc = ((g00 - g11).powi(2) + 4.0 * g01.norm_sqr()).sqrt();
    let hi = 0.5 * (tr + disc);
    let lo = (g00 * g11 - g01.norm_sqr()) / hi;
    (hi, lo)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn entanglement_det_is_product_of_squared_singular_values(p in psi()) {
        let (s1, s2) = squared_singular_values(p.matrix());
        prop_assert!((p.entanglement_det() - s1 * s2).abs() < 1e-12);
        prop_assert!(p.entanglement_det() <= 0.25 + 1e-12);
        prop_assert!((p.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entanglement_det_is_local_unitary_invariant(p in psi(), u in unitary(), v in unitary()) {
        let moved = p.transform(&u, &v);
        prop_assert!((moved.entanglement_det() - p.entanglement_det()).abs() < 1e-12);
        prop_assert!((moved.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transform_matches_kronecker_action(p in psi(), u in unitary(), v in unitary()) {
        // UψV† is (U ⊗ V̄)|Ψ⟩: Ψ'_jk = Σ_ab U_ja conj(V_kb) Ψ_ab
        let out = p.transform(&u, &v);
        let (um, vm, pm) = (u.matrix(), v.matrix(), p.matrix());
        for j in 0..2 {
            for k in 0..2 {
                let mut want = Complex64::new(0.0, 0.0);
                for a in 0..2 {
                    for b in 0..2 {
                        want += um.get(j, a) * vm.get(k, b).conj() * pm.get(a, b);
                    }
                }
                prop_assert!((out.matrix().get(j, k) - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn reduced_density_is_a_state(p in psi()) {
        for particle in [Particle::One, Particle::Two] {
            let rho = p.reduced_density(particle);
            prop_assert!(rho.is_hermitian(1e-15));
            prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
            let [lo, hi] = rho.eigenvalues();
            prop_assert!(lo >= -1e-12);
            prop_assert!((lo * hi - p.entanglement_det()).abs() < 1e-12);
        }
        // particle 1 by elementwise sums: ρ₁[j][j'] = Σ_k ψ_jk ψ*_j'k
        let m = p.matrix();
        let rho = p.reduced_density(Particle::One);
        for j in 0..2 {
            for jp in 0..2 {
                let want: Complex64 = (0..2).map(|k| m.get(j, k) * m.get(jp, k).conj()).sum();
                prop_assert!((rho.matrix().get(j, jp) - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn diagonal_states_have_entropy_of_their_populations(x in 0.0f64..=1.0, phase in -3.0f64..3.0) {
        let s = EntangledState::new(
            Complex64::new(x.sqrt(), 0.0),
            Complex64::from_polar((1.0 - x).sqrt(), phase),
        ).unwrap();
        let psi = s.to_psi();
        let rho = psi.reduced_density(Particle::One);
        let vn = rho.von_neumann_entropy();
        prop_assert!((vn + entanglement_entropy(s.x()).unwrap()).abs() < 1e-12);
        prop_assert!((psi.entanglement_det() - s.x() * (1.0 - s.x())).abs() < 1e-12);
        prop_assert!((s.x() + s.population().y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalization_on_construction(a in complex(), b in complex()) {
        prop_assume!(a.norm() + b.norm() > 1e-6);
        let s = EntangledState::new(a, b).unwrap();
        prop_assert!((s.alpha().norm_sqr() + s.beta().norm_sqr() - 1.0).abs() < 1e-12);
        // relative phase preserved
        if a.norm() > 1e-3 && b.norm() > 1e-3 {
            let before = (b / a).arg();
            let after = (s.beta() / s.alpha()).arg();
            prop_assert!((before - after).abs() < 1e-12);
        }
    }

    #[test]
    fn product_states_have_zero_determinant(a0 in complex(), a1 in complex(), b0 in complex(), b1 in complex()) {
        prop_assume!(a0.norm() + a1.norm() > 1e-2 && b0.norm() + b1.norm() > 1e-2);
        let p = product_state([a0, a1], [b0, b1]).unwrap();
        prop_assert!(p.entanglement_det() < 1e-15);
        let [lo, _] = p.reduced_density(Particle::Two).eigenvalues();
        prop_assert!(lo < 1e-15);
    }

    #[test]
    fn determinant_identity(
        a in (complex(), complex(), complex(), complex()),
        scale in 0.0f64..=10.0,
        nu in complex(),
    ) {
        let m = Mat2::new(a.0, a.1, a.2, a.3) * (scale / std::f64::consts::SQRT_2);
        prop_assert!(det_identity_residual(&m, nu) < 1e-12);
    }

    #[test]
    fn analytic_and_finite_difference_generators_agree(
        p in psi(),
        eta in 0.05f64..2.0,
        energy in 0.1f64..5.0,
        plus in any::<bool>(),
    ) {
        prop_assume!(p.entanglement_det() > 1e-8);
        let h = Hamiltonian2::new(energy).unwrap();
        let sign = if plus { SignChoice::Plus } else { SignChoice::Minus };
        let an = nonlinear_rhs(&p, &h, eta, sign);
        let fd = geometric_rhs(&p, &h, eta, sign, DEFAULT_FD_STEP).unwrap();
        prop_assert!((an - fd).max_abs() / an.max_abs() < 1e-6);
    }

    #[test]
    fn population_pair_conserves_sum(x in 0.0f64..=1.0, tau in 1e-20f64..1e20) {
        let p = PopulationState::new(x).unwrap();
        for sign in [SignChoice::Plus, SignChoice::Minus] {
            let (dx, dy) = population_rhs(&p, tau, sign);
            prop_assert_eq!(dx + dy, 0.0);
        }
    }
}

/// Logistic solution written out independently,
/// `x(t) = 1 / (1 + ((1 − x₀)/x₀) e^{t/τ})`.
fn logistic(x0: f64, t: f64, tau: f64) -> f64 {
    1.0 / (1.0 + (1.0 - x0) / x0 * (t / tau).exp())
}

#[test]
fn integrator_tracks_logistic_solution() {
    let rk = PopulationIntegrator::default();
    for &(x0, tau) in &[(0.5, 1.0), (0.3, 2.5e-7), (0.9, 1.0e12), (0.01, 3.0)] {
        let times: Vec<f64> = (0..=1000).map(|i| 10.0 * tau * i as f64 / 1000.0).collect();
        let path = rk
            .sample(
                PopulationState::new(x0).unwrap(),
                tau,
                SignChoice::Plus,
                &times,
            )
            .unwrap();
        for (t, p) in times.iter().zip(&path) {
            assert!((p.x - logistic(x0, *t, tau)).abs() < 1e-8, "x0={x0} t={t}");
            assert!((p.x + p.y - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn fixed_points_are_exact() {
    let rk = PopulationIntegrator::default();
    for x0 in [0.0, 1.0] {
        for sign in [SignChoice::Plus, SignChoice::Minus] {
            let p = PopulationState::new(x0).unwrap();
            assert_eq!(rk.evolve(p, 1.0, sign, 25.0).unwrap(), p);
        }
    }
}

#[test]
fn zero_eta_keeps_moduli() {
    // The linear flow ħψ' = −iHψ only rotates phases of a diagonal ψ.
    let s = EntangledState::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap();
    let mut psi = *s.to_psi().matrix();
    let h = Hamiltonian2::new(1.0).unwrap();
    let dt = 1e-3;
    for _ in 0..1000 {
        let f = |m: Mat2| nonlinear_rhs(&PsiMatrix(m), &h, 0.0, SignChoice::Plus);
        let k1 = f(psi);
        let k2 = f(psi + k1 * (0.5 * dt));
        let k3 = f(psi + k2 * (0.5 * dt));
        let k4 = f(psi + k3 * dt);
        psi = psi + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    assert!((psi.get(0, 0).norm() - 0.6).abs() < 1e-12);
    assert!((psi.get(1, 1).norm() - 0.8).abs() < 1e-12);
    assert_eq!(psi.get(0, 1).norm(), 0.0);
}

#[test]
fn entropy_and_determinant_are_comonotone() {
    let mut prev = (0.0, 0.0);
    for i in 0..=500 {
        let x = 0.5 * i as f64 / 500.0;
        let e = x * (1.0 - x);
        let s = entanglement_entropy(x).unwrap().abs();
        if i > 0 {
            assert!(e > prev.0 && s > prev.1, "x = {x}");
        }
        prev = (e, s);
    }
    for x in [0.0, 1.0] {
        assert_eq!(entanglement_entropy(x).unwrap(), 0.0);
    }
}

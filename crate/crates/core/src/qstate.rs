//! Two-level ⊗ two-level pure states, the operator (ψ-matrix) picture of a
//! state vector, and the two entanglement measures used by the collapse
//! dynamics: the determinant `Det(ψ†ψ)` and the entropy `S(x)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_probability, Error, Result};
use crate::linalg::{Mat2, ONE, ZERO};

/// Tolerance used for normalization and unitarity checks.
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// Entangled pure state `α|1⟩|1'⟩ + β|2⟩|2'⟩`, normalized at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangledState {
    alpha: Complex64,
    beta: Complex64,
}

impl EntangledState {
    /// Normalizes `(alpha, beta)` to unit norm, keeping the relative phase.
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        for z in [alpha, beta] {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidState(format!("non-finite amplitude {z}")));
            }
        }
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("both amplitudes are zero".into()));
        }
        Ok(Self {
            alpha: alpha / norm,
            beta: beta / norm,
        })
    }

    /// The long-lived neutral kaon in the quark picture: `α = 1/√2 = −β`.
    pub fn kaon_long() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            alpha: Complex64::new(a, 0.0),
            beta: Complex64::new(-a, 0.0),
        }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// `|α|²`
    pub fn x(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn population(&self) -> PopulationState {
        PopulationState {
            x: self.alpha.norm_sqr(),
            y: self.beta.norm_sqr(),
        }
    }

    /// Diagonal embedding: `ψ = diag(α, β)`.
    pub fn to_psi(&self) -> PsiMatrix {
        PsiMatrix(Mat2::diag(self.alpha, self.beta))
    }
}

/// Branch populations `(x, y) = (|α|², |β|²)` with `x + y = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationState {
    pub x: f64,
    pub y: f64,
}

impl PopulationState {
    pub fn new(x: f64) -> Result<Self> {
        let x = require_probability("x", x)?;
        Ok(Self { x, y: 1.0 - x })
    }

    /// Checked constructor from both populations.
    pub fn from_pair(x: f64, y: f64) -> Result<Self> {
        require_probability("x", x)?;
        require_probability("y", y)?;
        if (x + y - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::InvalidState(format!("x + y = {} != 1", x + y)));
        }
        Ok(Self { x, y })
    }

    /// `x(1 − x)`, the determinant measure of a diagonal state.
    pub fn entanglement(&self) -> f64 {
        self.x * self.y
    }

    pub fn is_collapsed(&self) -> bool {
        self.x == 0.0 || self.y == 0.0
    }

    pub fn weaker(&self) -> f64 {
        self.x.min(self.y)
    }
}

/// Operator image `ψ = Σ ψ_jk |j,1⟩⟨k,2|` of a two-particle state vector.
///
/// Rows index particle 1, columns particle 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiMatrix(pub Mat2);

impl PsiMatrix {
    pub fn from_entangled(state: &EntangledState) -> Self {
        state.to_psi()
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    /// Rescales an arbitrary nonzero matrix so that `Tr(ψ†ψ) = 1`.
    pub fn normalized(m: Mat2) -> Result<Self> {
        let n = m.frobenius_sq().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero matrix".into()));
        }
        Ok(Self(m * (1.0 / n)))
    }

    /// `Tr(ψ†ψ)`, the squared norm of the state vector.
    pub fn norm_sqr(&self) -> f64 {
        self.0.frobenius_sq()
    }

    /// `Det(ψ†ψ)`, evaluated as `|det ψ|²`.
    pub fn entanglement_det(&self) -> f64 {
        self.0.det().norm_sqr()
    }

    /// `ψ ↦ UψV†`. Because particle 2 sits on the bra side of ψ this is the
    /// state vector `(U ⊗ V̄)|Ψ⟩`; V ranges over all unitaries either way.
    pub fn transform(&self, u: &Unitary2, v: &Unitary2) -> Self {
        Self(u.0 * self.0 * v.0.adjoint())
    }

    /// Reduced density matrix of one particle.
    ///
    /// Particle 1 gets `ψψ†`. Particle 2 gets `(ψ†ψ)ᵀ = ψᵀψ*`, the matrix of
    /// `Tr₁|Ψ⟩⟨Ψ|` in the `|k,2⟩` basis; it shares its spectrum with `ψ†ψ`.
    pub fn reduced_density(&self, particle: Particle) -> DensityMatrix2 {
        let m = match particle {
            Particle::One => self.0 * self.0.adjoint(),
            Particle::Two => (self.0.adjoint() * self.0).transpose(),
        };
        DensityMatrix2(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Particle {
    One,
    Two,
}

/// A single-particle unitary, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2(Mat2);

impl Unitary2 {
    pub fn new(m: Mat2) -> Result<Self> {
        let deviation = (m.adjoint() * m - Mat2::identity()).max_abs();
        if deviation.is_finite() && deviation <= ALGEBRAIC_TOL {
            Ok(Self(m))
        } else {
            Err(Error::NotUnitary { deviation })
        }
    }

    pub fn identity() -> Self {
        Self(Mat2::identity())
    }

    /// General U(2) element `e^{iφ} [[a, b], [−b*, a*]]` with
    /// `a = cos θ · e^{iλ}`, `b = sin θ · e^{iμ}`.
    pub fn from_angles(phase: f64, theta: f64, lambda: f64, mu: f64) -> Self {
        let a = Complex64::from_polar(theta.cos(), lambda);
        let b = Complex64::from_polar(theta.sin(), mu);
        let g = Complex64::from_polar(1.0, phase);
        Self(Mat2::new(a * g, b * g, -b.conj() * g, a.conj() * g))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }
}

/// Hermitian, unit-trace single-particle density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2(pub Mat2);

impl DensityMatrix2 {
    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.0.approx_eq(&self.0.adjoint(), tol)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 2] {
        self.0.hermitian_eigenvalues()
    }

    /// `−Σ λ ln λ`, natural log, with `0 ln 0 = 0`.
    pub fn von_neumann_entropy(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .map(|&l| if l > 0.0 { -l * l.ln() } else { 0.0 })
            .sum()
    }
}

/// `S(x) = x ln x + (1 − x) ln(1 − x)`, non-positive, zero at both ends.
pub fn entanglement_entropy(x: f64) -> Result<f64> {
    let x = require_probability("x", x)?;
    let xlogx = |p: f64| if p > 0.0 { p * p.ln() } else { 0.0 };
    Ok(xlogx(x) + xlogx(1.0 - x))
}

/// Factorized state `|a⟩ ⊗ |b⟩` in ψ-matrix form (outer product `a bᵀ`).
pub fn product_state(a: [Complex64; 2], b: [Complex64; 2]) -> Result<PsiMatrix> {
    PsiMatrix::normalized(Mat2::new(
        a[0] * b[0],
        a[0] * b[1],
        a[1] * b[0],
        a[1] * b[1],
    ))
}

/// `diag(1, 0)`: the collapsed state with all weight on the first branch.
pub fn collapsed_state() -> PsiMatrix {
    PsiMatrix(Mat2::diag(ONE, ZERO))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn make_entangled_examples() {
        let kl = EntangledState::new(c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)).unwrap();
        assert!((kl.x() - 0.5).abs() < 1e-15);
        assert_eq!(kl, EntangledState::kaon_long());

        let fact = EntangledState::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(fact.x(), 1.0);

        let forced = EntangledState::new(c(2.0, 0.0), c(0.0, 2.0)).unwrap();
        assert!((forced.alpha() - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((forced.beta() - c(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((forced.x() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn make_entangled_rejects_zero_and_nan() {
        assert!(matches!(
            EntangledState::new(c(0.0, 0.0), c(0.0, 0.0)),
            Err(Error::InvalidState(_))
        ));
        assert!(EntangledState::new(c(f64::NAN, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn psi_matrix_is_diagonal_embedding() {
        let psi = EntangledState::kaon_long().to_psi();
        let expect = Mat2::diag(c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0));
        assert!(psi.matrix().approx_eq(&expect, 1e-15));
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);

        let phased = EntangledState::new(c(0.0, FRAC_1_SQRT_2), c(FRAC_1_SQRT_2, 0.0)).unwrap();
        assert_eq!(phased.to_psi().matrix().get(0, 0), c(0.0, FRAC_1_SQRT_2));
        assert_eq!(collapsed_state().matrix().get(1, 1), ZERO);
    }

    #[test]
    fn entanglement_det_examples() {
        let kl = EntangledState::kaon_long().to_psi();
        assert!((kl.entanglement_det() - 0.25).abs() < 1e-15);
        assert_eq!(collapsed_state().entanglement_det(), 0.0);
    }

    #[test]
    fn entropy_examples() {
        assert!((entanglement_entropy(0.5).unwrap() + LN_2).abs() < 1e-15);
        assert_eq!(entanglement_entropy(0.0).unwrap(), 0.0);
        assert_eq!(entanglement_entropy(1.0).unwrap(), 0.0);
        // 0.3 ln 0.3 + 0.7 ln 0.7, high-precision value -0.6108643020548935...
        assert!((entanglement_entropy(0.3).unwrap() + 0.610_864_302_054_893_5).abs() < 1e-14);
        assert!(matches!(
            entanglement_entropy(1.2),
            Err(Error::Domain { .. })
        ));
        assert!(entanglement_entropy(-0.01).is_err());
        assert!(entanglement_entropy(f64::NAN).is_err());
    }

    #[test]
    fn transform_identity_and_swap() {
        let kl = EntangledState::kaon_long().to_psi();
        let id = Unitary2::identity();
        assert_eq!(kl.transform(&id, &id), kl);

        let swap = Unitary2::new(Mat2::sigma_x()).unwrap();
        let out = kl.transform(&swap, &id);
        // σx · diag(a, b) = [[0, b], [a, 0]]
        let expect = Mat2::new(ZERO, c(-FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0), ZERO);
        assert!(out.matrix().approx_eq(&expect, 1e-15));
        assert!((out.entanglement_det() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn non_unitary_is_rejected() {
        let m = Mat2::from_real(1.0, 0.1, 0.0, 1.0);
        assert!(matches!(Unitary2::new(m), Err(Error::NotUnitary { .. })));
        assert!(Unitary2::new(Mat2::sigma_z()).is_ok());
    }

    #[test]
    fn reduced_density_examples() {
        let kl = EntangledState::kaon_long().to_psi();
        let rho = kl.reduced_density(Particle::One);
        assert!(rho
            .matrix()
            .approx_eq(&Mat2::from_real(0.5, 0.0, 0.0, 0.5), 1e-15));
        assert!((rho.von_neumann_entropy() - LN_2).abs() < 1e-14);

        let rho2 = collapsed_state().reduced_density(Particle::Two);
        assert!(rho2
            .matrix()
            .approx_eq(&Mat2::from_real(1.0, 0.0, 0.0, 0.0), 0.0));
        assert_eq!(rho2.von_neumann_entropy(), 0.0);
    }

    #[test]
    fn reduced_density_of_particle_two_matches_partial_trace() {
        let psi = PsiMatrix::normalized(Mat2::new(
            c(0.3, 0.1),
            c(-0.2, 0.5),
            c(0.0, -0.7),
            c(0.4, 0.2),
        ))
        .unwrap();
        let m = psi.matrix();
        let rho = psi.reduced_density(Particle::Two);
        // ρ₂[k][k'] = Σ_j ψ_jk ψ*_jk'
        for k in 0..2 {
            for kp in 0..2 {
                let want: Complex64 = (0..2).map(|j| m.get(j, k) * m.get(j, kp).conj()).sum();
                assert!((rho.matrix().get(k, kp) - want).norm() < 1e-15);
            }
        }
        assert!(rho.is_hermitian(1e-15));
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn population_constructors() {
        assert!(PopulationState::new(1.5).is_err());
        assert!(PopulationState::from_pair(0.3, 0.6).is_err());
        let p = PopulationState::from_pair(0.3, 0.7).unwrap();
        assert!((p.entanglement() - 0.21).abs() < 1e-15);
        assert!(!p.is_collapsed());
        assert!(PopulationState::new(0.0).unwrap().is_collapsed());
    }
}

//! The Farhi-Gutmann two-state analog-computation model.
//!
//! The Hamiltonian `H = E_a |a><a| + E_b |b><b|` with overlap `s = <a|b>`
//! has closed-form transition dynamics; this module carries the parameter
//! bundle, the explicit 2x2 matrix in the `{|b>, |b'>}` basis, its
//! diagonalization, and the closed forms for `P_t`, `P_max` and `t_min`.

use num_complex::Complex64;

use crate::error::{QslError, Result};
use crate::linalg::{outer_product, ComplexMatrix, ComplexVector};
use crate::quantum::{Observable, PhysicalConstants, QuantumState};

/// Validated model parameters and the derived constants.
///
/// Derived fields: `e = e_a + e_b`, `x = e_a - e_b`,
/// `mu = sqrt(s^2 + (x/e)^2 (1 - s^2))` and
/// `lambda = s^2 - (x/e)(1 - s^2)`; `s <= mu <= 1` always holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgModel {
    e_a: f64,
    e_b: f64,
    s: f64,
    e: f64,
    x: f64,
    mu: f64,
    lambda: f64,
}

/// Coordinates of the model kets in the `{|b>, |b'>}` basis.
#[derive(Debug, Clone)]
pub struct FgBasis {
    pub a: QuantumState,
    pub b: QuantumState,
    /// Set when `s = 1`: `|b'>` is undefined and both kets collapse onto
    /// `(1, 0)`.
    pub degenerate: bool,
}

impl FgModel {
    /// Build a model from the two level energies and the overlap `s`.
    ///
    /// `s = 0` is rejected: the target is then unreachable and `mu = |x|/e`
    /// degenerates the maximum-probability formula.
    pub fn new(e_a: f64, e_b: f64, s: f64) -> Result<Self> {
        if !e_a.is_finite() || e_a <= 0.0 {
            return Err(QslError::invalid(
                "e_a",
                format!("must be positive, got {e_a}"),
            ));
        }
        if !e_b.is_finite() || e_b <= 0.0 {
            return Err(QslError::invalid(
                "e_b",
                format!("must be positive, got {e_b}"),
            ));
        }
        if !s.is_finite() || s <= 0.0 || s > 1.0 {
            return Err(QslError::invalid(
                "s",
                format!("overlap must lie in (0, 1], got {s}"),
            ));
        }
        let e = e_a + e_b;
        let x = e_a - e_b;
        let ratio = x / e;
        let mu = (s * s + ratio * ratio * (1.0 - s * s)).sqrt();
        let lambda = s * s - ratio * (1.0 - s * s);
        Ok(Self {
            e_a,
            e_b,
            s,
            e,
            x,
            mu,
            lambda,
        })
    }

    pub fn e_a(&self) -> f64 {
        self.e_a
    }

    pub fn e_b(&self) -> f64 {
        self.e_b
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Total energy `E_a + E_b`.
    pub fn e(&self) -> f64 {
        self.e
    }

    /// Energy asymmetry `E_a - E_b`.
    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `|a> = (s, sqrt(1-s^2))` and `|b> = (1, 0)` in the `{|b>, |b'>}`
    /// basis.
    pub fn basis_states(&self) -> FgBasis {
        let b = QuantumState::basis_state(2, 0).expect("static dimension");
        if self.s >= 1.0 {
            return FgBasis {
                a: b.clone(),
                b,
                degenerate: true,
            };
        }
        let a = QuantumState::new(
            ComplexVector::from_real(&[self.s, (1.0 - self.s * self.s).sqrt()])
                .expect("finite entries"),
        )
        .expect("unit norm by construction");
        FgBasis {
            a,
            b,
            degenerate: false,
        }
    }

    /// Closed-form Hamiltonian
    /// `(E/2) [[1+lambda, w], [w, 1-lambda]]` with `w = sqrt(mu^2 - lambda^2)`.
    pub fn hamiltonian(&self) -> Observable {
        let w = (self.mu * self.mu - self.lambda * self.lambda)
            .max(0.0)
            .sqrt();
        let half_e = 0.5 * self.e;
        let m = ComplexMatrix::from_real_rows(&[
            vec![half_e * (1.0 + self.lambda), half_e * w],
            vec![half_e * w, half_e * (1.0 - self.lambda)],
        ])
        .expect("static shape");
        Observable::new(m).expect("symmetric by construction")
    }

    /// The same operator assembled as `E_a |a><a| + E_b |b><b|`; kept as an
    /// independent construction to cross-check [`FgModel::hamiltonian`].
    pub fn hamiltonian_projected(&self) -> Observable {
        let basis = self.basis_states();
        let pa = outer_product(basis.a.amplitudes(), basis.a.amplitudes());
        let pb = outer_product(basis.b.amplitudes(), basis.b.amplitudes());
        let m = pa
            .scaled(Complex64::new(self.e_a, 0.0))
            .add(&pb.scaled(Complex64::new(self.e_b, 0.0)))
            .expect("matching shapes");
        Observable::new(m).expect("hermitian by construction")
    }

    /// Closed-form eigenvalues `(E/2)(1 + mu), (E/2)(1 - mu)` and the real
    /// rotation whose columns are the matching eigenvectors.
    pub fn diagonalize(&self) -> ([f64; 2], ComplexMatrix) {
        let eigenvalues = [
            0.5 * self.e * (1.0 + self.mu),
            0.5 * self.e * (1.0 - self.mu),
        ];
        let plus = ((1.0 + self.lambda / self.mu) * 0.5).max(0.0).sqrt();
        let minus = ((1.0 - self.lambda / self.mu) * 0.5).max(0.0).sqrt();
        let u = ComplexMatrix::from_real_rows(&[vec![plus, minus], vec![minus, -plus]])
            .expect("static shape");
        (eigenvalues, u)
    }

    /// Closed-form transition probability
    /// `P_t = s^2 [ (1/mu^2 - 1) sin^2(mu E t / 2 hbar) + 1 ]`.
    pub fn probability(&self, t: f64, k: &PhysicalConstants) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(QslError::invalid(
                "t",
                format!("time must be finite and non-negative, got {t}"),
            ));
        }
        let phase = self.mu * self.e * t / (2.0 * k.hbar());
        let sin = phase.sin();
        let value = self.s * self.s * ((1.0 / (self.mu * self.mu) - 1.0) * sin * sin + 1.0);
        Ok(value.clamp(0.0, 1.0))
    }

    /// Largest transition probability ever reached: `(s / mu)^2`.
    pub fn p_max(&self) -> f64 {
        let r = self.s / self.mu;
        (r * r).min(1.0)
    }

    /// First time the maximum is attained: `pi hbar / (E mu)`.
    pub fn t_min(&self, k: &PhysicalConstants) -> f64 {
        std::f64::consts::PI * k.hbar() / (self.e * self.mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inner_product;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn k() -> PhysicalConstants {
        PhysicalConstants::natural()
    }

    #[test]
    fn derived_fields_symmetric_model() {
        let m = FgModel::new(1.0, 1.0, 0.5).unwrap();
        assert_eq!(m.e(), 2.0);
        assert_eq!(m.x(), 0.0);
        assert!((m.mu() - 0.5).abs() < 1e-15);
        assert!((m.lambda() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn derived_fields_asymmetric_model() {
        let m = FgModel::new(2.0, 1.0, 0.5).unwrap();
        assert_eq!(m.e(), 3.0);
        assert_eq!(m.x(), 1.0);
        assert!((m.mu() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(m.lambda().abs() < 1e-15);
    }

    #[test]
    fn full_overlap_collapses_parameters() {
        let m = FgModel::new(3.0, 0.7, 1.0).unwrap();
        assert!((m.mu() - 1.0).abs() < 1e-15);
        assert!((m.lambda() - 1.0).abs() < 1e-15);
        assert_eq!(m.p_max(), 1.0);
    }

    #[test]
    fn constructor_rejects_bad_domains() {
        assert!(FgModel::new(0.0, 1.0, 0.5).is_err());
        assert!(FgModel::new(1.0, -2.0, 0.5).is_err());
        assert!(FgModel::new(1.0, 1.0, 0.0).is_err());
        assert!(FgModel::new(1.0, 1.0, 1.1).is_err());
    }

    #[test]
    fn mu_bounds_hold() {
        for &(ea, eb, s) in &[(0.1, 4.9, 0.05), (2.0, 2.0, 0.9), (5.0, 0.1, 0.5)] {
            let m = FgModel::new(ea, eb, s).unwrap();
            assert!(
                m.s() <= m.mu() && m.mu() <= 1.0,
                "s <= mu <= 1 broken: {m:?}"
            );
            let identity = m.s()
                * m.s()
                * (1.0 - m.s() * m.s())
                * (1.0 + m.x() / m.e())
                * (1.0 + m.x() / m.e());
            assert!((m.mu() * m.mu() - m.lambda() * m.lambda() - identity).abs() < 1e-12);
        }
    }

    #[test]
    fn basis_states_match_overlap() {
        let m = FgModel::new(1.0, 1.0, 0.5).unwrap();
        let basis = m.basis_states();
        assert!(!basis.degenerate);
        assert!((basis.a.amplitudes().get(0).re - 0.5).abs() < 1e-15);
        assert!((basis.a.amplitudes().get(1).re - 0.75f64.sqrt()).abs() < 1e-15);
        let overlap = inner_product(basis.b.amplitudes(), basis.a.amplitudes()).unwrap();
        assert!((overlap.re - m.s()).abs() < 1e-12);
        assert!(overlap.im.abs() < 1e-15);
    }

    #[test]
    fn degenerate_basis_flag() {
        let m = FgModel::new(1.0, 2.0, 1.0).unwrap();
        let basis = m.basis_states();
        assert!(basis.degenerate);
        assert!((crate::quantum::fidelity(&basis.a, &basis.b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_closed_form_values() {
        let m = FgModel::new(1.0, 1.0, 0.5).unwrap();
        let h = m.hamiltonian();
        assert!((h.matrix().get(0, 0).re - 1.25).abs() < 1e-15);
        assert!((h.matrix().get(1, 1).re - 0.75).abs() < 1e-15);
        let w = 0.1875f64.sqrt(); // sqrt(mu^2 - lambda^2) * E/2 with E = 2
        assert!((h.matrix().get(0, 1).re - w).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_constructions_agree() {
        for &(ea, eb, s) in &[(1.0, 1.0, 0.5), (2.0, 1.0, 0.5), (0.4, 3.3, 0.8)] {
            let m = FgModel::new(ea, eb, s).unwrap();
            let dev = m
                .hamiltonian()
                .matrix()
                .sub(m.hamiltonian_projected().matrix())
                .unwrap()
                .max_abs_entry();
            assert!(
                dev < 1e-12,
                "constructions disagree by {dev} at {ea},{eb},{s}"
            );
        }
    }

    #[test]
    fn hamiltonian_trace_is_total_energy() {
        let m = FgModel::new(2.0, 1.0, 0.5).unwrap();
        let tr = m.hamiltonian().matrix().trace().unwrap();
        assert!((tr.re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn full_overlap_hamiltonian_is_rank_one() {
        let m = FgModel::new(1.5, 0.5, 1.0).unwrap();
        let h = m.hamiltonian_projected();
        assert!((h.matrix().get(0, 0).re - 2.0).abs() < 1e-12);
        assert!(h.matrix().get(1, 1).norm() < 1e-12);
    }

    #[test]
    fn diagonalization_reconstructs() {
        for &(ea, eb, s) in &[(1.0, 1.0, 0.5), (2.0, 1.0, 0.5), (0.3, 4.0, 0.77)] {
            let m = FgModel::new(ea, eb, s).unwrap();
            let ([ep, em], u) = m.diagonalize();
            assert!((ep - 0.5 * m.e() * (1.0 + m.mu())).abs() < 1e-12);
            assert!((em - 0.5 * m.e() * (1.0 - m.mu())).abs() < 1e-12);

            // u diag u^T reproduces the closed-form matrix.
            let diag = ComplexMatrix::diagonal(&[Complex64::new(ep, 0.0), Complex64::new(em, 0.0)]);
            let rec = u.mul_mat(&diag).unwrap().mul_mat(&u.adjoint()).unwrap();
            let dev = rec.sub(m.hamiltonian().matrix()).unwrap().max_abs_entry();
            assert!(dev < 1e-12, "reconstruction off by {dev}");

            // u is orthogonal.
            let gram = u.adjoint().mul_mat(&u).unwrap();
            assert!(
                gram.sub(&ComplexMatrix::identity(2))
                    .unwrap()
                    .max_abs_entry()
                    < 1e-12
            );
        }
    }

    #[test]
    fn zero_lambda_rotation_is_hadamard_like() {
        let m = FgModel::new(2.0, 1.0, 0.5).unwrap();
        assert!(m.lambda().abs() < 1e-15);
        let (_, u) = m.diagonalize();
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        for (i, j, sign) in [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -1.0)] {
            assert!((u.get(i, j).re - sign * inv).abs() < 1e-12);
        }
    }

    #[test]
    fn probability_closed_form_values() {
        let sym = FgModel::new(1.0, 1.0, 0.5).unwrap();
        assert!((sym.probability(0.0, &k()).unwrap() - 0.25).abs() < 1e-15);
        assert!((sym.probability(PI, &k()).unwrap() - 1.0).abs() < 1e-12);

        let asym = FgModel::new(2.0, 1.0, 0.5).unwrap();
        let t_peak = asym.t_min(&k());
        assert!((asym.probability(t_peak, &k()).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn p_max_values() {
        assert_eq!(FgModel::new(1.0, 1.0, 0.5).unwrap().p_max(), 1.0);
        let asym = FgModel::new(2.0, 1.0, 0.5).unwrap();
        assert!((asym.p_max() - 0.75).abs() < 1e-12);
        assert_eq!(FgModel::new(1.0, 1.0, 1.0).unwrap().p_max(), 1.0);
    }

    #[test]
    fn t_min_values() {
        let sym = FgModel::new(1.0, 1.0, 0.5).unwrap();
        assert!((sym.t_min(&k()) - PI).abs() < 1e-12);
        let full = FgModel::new(1.0, 1.0, 1.0).unwrap();
        assert!((full.t_min(&k()) - FRAC_PI_2).abs() < 1e-12);
    }
}

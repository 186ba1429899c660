//! States, observables, expectations and fidelity.
//!
//! A [`QuantumState`] is a normalized complex vector, an [`Observable`] is a
//! Hermitian matrix, and every statistical quantity (mean, standard
//! deviation, Robertson product, Ehrenfest derivative) lives here as a pure
//! function of those two.

use num_complex::Complex64;

use crate::error::{QslError, Result};
use crate::linalg::{
    inner_product, is_hermitian, outer_product, ComplexMatrix, ComplexVector, HERMITICITY_TOLERANCE,
};

/// Tolerance on `| ||psi|| - 1 |` for accepting a state as normalized.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Absolute bound on the imaginary residue of an expectation value before it
/// is treated as evidence of a non-Hermitian operator.
pub const IMAGINARY_RESIDUE_TOLERANCE: f64 = 1e-10;

/// Lower clamp window for variance radicands; anything below is corruption.
pub const VARIANCE_CLAMP: f64 = -1e-12;

/// Reduced Planck constant in the unit system of a computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    hbar: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64) -> Result<Self> {
        if !hbar.is_finite() || hbar <= 0.0 {
            return Err(QslError::invalid(
                "hbar",
                format!("must be finite and positive, got {hbar}"),
            ));
        }
        Ok(Self { hbar })
    }

    /// Natural units, `hbar = 1`.
    pub fn natural() -> Self {
        Self { hbar: 1.0 }
    }

    /// SI value in J*s.
    pub fn si() -> Self {
        Self {
            hbar: 1.054571817e-34,
        }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::natural()
    }
}

/// A normalized pure state.
///
/// The constructor rejects unnormalized vectors instead of silently fixing
/// them; use [`QuantumState::normalized`] when renormalization is intended.
#[derive(Debug, Clone)]
pub struct QuantumState {
    amplitudes: ComplexVector,
    label: Option<String>,
}

impl QuantumState {
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(QslError::NotNormalized {
                norm,
                tolerance: NORMALIZATION_TOLERANCE,
            });
        }
        Ok(Self {
            amplitudes,
            label: None,
        })
    }

    /// Renormalize an arbitrary nonzero vector into a state.
    pub fn normalized(v: ComplexVector) -> Result<Self> {
        Ok(Self {
            amplitudes: v.normalized()?,
            label: None,
        })
    }

    /// Computational basis state `|index>` in the given dimension.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        Ok(Self {
            amplitudes: ComplexVector::basis(dim, index)?,
            label: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.dim()
    }
}

/// A Hermitian operator.
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: ComplexMatrix,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, HERMITICITY_TOLERANCE)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !is_hermitian(&matrix, tol)? {
            let deviation = crate::linalg::hermiticity_deviation(&matrix);
            return Err(QslError::NotHermitian {
                deviation,
                tolerance: tol,
            });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        self.matrix.mul_vec(v)
    }

    /// `-A`, handy for adjoint-direction evolution.
    pub fn negated(&self) -> Self {
        Self {
            matrix: self.matrix.scaled(Complex64::new(-1.0, 0.0)),
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            matrix: ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])
                .expect("static shape"),
        }
    }

    pub fn pauli_y() -> Self {
        Self {
            matrix: ComplexMatrix::from_rows(&[
                vec![Complex64::ZERO, Complex64::new(0.0, -1.0)],
                vec![Complex64::new(0.0, 1.0), Complex64::ZERO],
            ])
            .expect("static shape"),
        }
    }

    pub fn pauli_z() -> Self {
        Self {
            matrix: ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]])
                .expect("static shape"),
        }
    }
}

fn check_state_dim(a: &Observable, psi: &QuantumState) -> Result<()> {
    if a.dim() != psi.dim() {
        return Err(QslError::DimensionMismatch {
            left: a.dim(),
            right: psi.dim(),
        });
    }
    Ok(())
}

/// Expectation value `<psi|A|psi>`.
///
/// An imaginary residue above [`IMAGINARY_RESIDUE_TOLERANCE`] signals a
/// non-Hermitian operator slipping through and is reported as an error.
pub fn expectation(a: &Observable, psi: &QuantumState) -> Result<f64> {
    check_state_dim(a, psi)?;
    let applied = a.apply(psi.amplitudes())?;
    let z = inner_product(psi.amplitudes(), &applied)?;
    if z.im.abs() > IMAGINARY_RESIDUE_TOLERANCE {
        return Err(QslError::ImaginaryResidue {
            residue: z.im.abs(),
            tolerance: IMAGINARY_RESIDUE_TOLERANCE,
        });
    }
    Ok(z.re)
}

/// Standard deviation `sqrt(<A^2> - <A>^2)`.
///
/// `<A^2>` is evaluated as `||A psi||^2`, which keeps the radicand
/// non-negative up to roundoff; radicands in `(-1e-12, 0)` clamp to zero and
/// anything lower is an error.
pub fn std_dev(a: &Observable, psi: &QuantumState) -> Result<f64> {
    check_state_dim(a, psi)?;
    let applied = a.apply(psi.amplitudes())?;
    let second_moment = applied.norm_sqr();
    let mean = expectation(a, psi)?;
    let radicand = second_moment - mean * mean;
    if radicand < VARIANCE_CLAMP {
        return Err(QslError::NegativeVariance { radicand });
    }
    Ok(radicand.max(0.0).sqrt())
}

/// Rank-one projector `|psi><psi|`.
pub fn projector(psi: &QuantumState) -> Observable {
    Observable {
        matrix: outer_product(psi.amplitudes(), psi.amplitudes()),
    }
}

/// Squared overlap `|<a|b>|^2`, clamped into [0, 1].
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    let overlap = inner_product(a.amplitudes(), b.amplitudes())?;
    Ok(overlap.norm_sqr().min(1.0))
}

/// Both sides of the Robertson uncertainty relation for `R` and `S` in state
/// `psi`: `(lhs, rhs) = (dS * dR, |<[R, S]>| / 2)`; the caller asserts
/// `lhs >= rhs` up to roundoff.
pub fn robertson_check(r: &Observable, s: &Observable, psi: &QuantumState) -> Result<(f64, f64)> {
    check_state_dim(r, psi)?;
    check_state_dim(s, psi)?;
    let lhs = std_dev(s, psi)? * std_dev(r, psi)?;
    let commutator_mean = commutator_expectation(r, s, psi)?;
    Ok((lhs, 0.5 * commutator_mean.norm()))
}

fn commutator_expectation(a: &Observable, b: &Observable, psi: &QuantumState) -> Result<Complex64> {
    let b_psi = b.apply(psi.amplitudes())?;
    let ab_psi = a.apply(&b_psi)?;
    let a_psi = a.apply(psi.amplitudes())?;
    let ba_psi = b.apply(&a_psi)?;
    let ab = inner_product(psi.amplitudes(), &ab_psi)?;
    let ba = inner_product(psi.amplitudes(), &ba_psi)?;
    Ok(ab - ba)
}

/// Instantaneous growth rate of `<R>` under Hamiltonian `H`:
/// `(1 / i hbar) <[R, H]>`, which is real for Hermitian inputs.
pub fn ehrenfest_rhs(
    r: &Observable,
    h: &Observable,
    psi: &QuantumState,
    k: &PhysicalConstants,
) -> Result<f64> {
    check_state_dim(r, psi)?;
    check_state_dim(h, psi)?;
    let z = commutator_expectation(r, h, psi)?;
    // <[R, H]> is purely imaginary for Hermitian R, H; a real residue means
    // corrupted input.
    if z.re.abs() > IMAGINARY_RESIDUE_TOLERANCE {
        return Err(QslError::ImaginaryResidue {
            residue: z.re.abs(),
            tolerance: IMAGINARY_RESIDUE_TOLERANCE,
        });
    }
    Ok(z.im / k.hbar())
}

/// True when an energy uncertainty is numerically indistinguishable from a
/// stationary state, relative to the operator scale.
pub fn is_stationary(delta_h: f64, operator_scale: f64) -> bool {
    delta_h <= 1e-12 * operator_scale.max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus_state() -> QuantumState {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        QuantumState::new(ComplexVector::from_real(&[inv, inv]).unwrap()).unwrap()
    }

    #[test]
    fn constants_validate() {
        assert!(PhysicalConstants::new(0.0).is_err());
        assert!(PhysicalConstants::new(f64::INFINITY).is_err());
        assert_eq!(PhysicalConstants::natural().hbar(), 1.0);
        assert!(PhysicalConstants::si().hbar() > 0.0);
    }

    #[test]
    fn state_constructor_rejects_unnormalized() {
        let v = ComplexVector::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            QuantumState::new(v.clone()),
            Err(QslError::NotNormalized { .. })
        ));
        let s = QuantumState::normalized(v).unwrap();
        assert!((s.amplitudes().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expectation_eigenstate_and_off_diagonal() {
        let diag = Observable::new(ComplexMatrix::diagonal(&[c(2.0, 0.0), c(5.0, 0.0)])).unwrap();
        let e0 = QuantumState::basis_state(2, 0).unwrap();
        assert!((expectation(&diag, &e0).unwrap() - 2.0).abs() < 1e-15);

        let x = Observable::pauli_x();
        assert!(expectation(&x, &e0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn expectation_of_projector_is_overlap_probability() {
        let e0 = QuantumState::basis_state(2, 0).unwrap();
        let lam = projector(&e0);
        let val = expectation(&lam, &plus_state()).unwrap();
        assert!((val - 0.5).abs() < 1e-14);
    }

    #[test]
    fn std_dev_pauli_x_on_basis_state() {
        let x = Observable::pauli_x();
        let e0 = QuantumState::basis_state(2, 0).unwrap();
        assert!((std_dev(&x, &e0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn std_dev_vanishes_on_eigenstate() {
        let diag = Observable::new(ComplexMatrix::diagonal(&[c(2.0, 0.0), c(5.0, 0.0)])).unwrap();
        let e1 = QuantumState::basis_state(2, 1).unwrap();
        assert!(std_dev(&diag, &e1).unwrap().abs() < 1e-14);
    }

    #[test]
    fn std_dev_projector_at_half_probability() {
        // <Lambda> = 0.5 gives sqrt(0.5 - 0.25) = 0.5.
        let e0 = QuantumState::basis_state(2, 0).unwrap();
        let lam = projector(&e0);
        let sd = std_dev(&lam, &plus_state()).unwrap();
        assert!((sd - 0.5).abs() < 1e-14);
    }

    #[test]
    fn projector_values() {
        let e0 = QuantumState::basis_state(2, 0).unwrap();
        let p = projector(&e0);
        assert!((p.matrix().get(0, 0) - Complex64::ONE).norm() < 1e-15);
        assert!(p.matrix().get(1, 1).norm() < 1e-15);

        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let s =
            QuantumState::new(ComplexVector::new(vec![c(inv, 0.0), c(0.0, inv)]).unwrap()).unwrap();
        let p = projector(&s);
        // |psi><psi| for (1, i)/sqrt(2): off-diagonal -i/2 and i/2.
        assert!((p.matrix().get(0, 1) - c(0.0, -0.5)).norm() < 1e-15);
        assert!((p.matrix().get(1, 0) - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn projector_is_idempotent_with_unit_trace() {
        let p = projector(&plus_state());
        let m = p.matrix();
        let sq = m.mul_mat(m).unwrap();
        assert!(sq.sub(m).unwrap().max_abs_entry() < 1e-10);
        assert!((m.trace().unwrap() - Complex64::ONE).norm() < 1e-10);
    }

    #[test]
    fn fidelity_basic_values() {
        let e0 = QuantumState::basis_state(2, 0).unwrap();
        let e1 = QuantumState::basis_state(2, 1).unwrap();
        assert_eq!(fidelity(&e0, &e0).unwrap(), 1.0);
        assert_eq!(fidelity(&e0, &e1).unwrap(), 0.0);

        let b = QuantumState::new(ComplexVector::from_real(&[0.5, 3.0f64.sqrt() / 2.0]).unwrap())
            .unwrap();
        assert!((fidelity(&e0, &b).unwrap() - 0.25).abs() < 1e-14);
        assert_eq!(fidelity(&e0, &b).unwrap(), fidelity(&b, &e0).unwrap());
    }

    #[test]
    fn robertson_self_commuting_and_equality_case() {
        let x = Observable::pauli_x();
        let e0 = QuantumState::basis_state(2, 0).unwrap();

        let (lhs, rhs) = robertson_check(&x, &x, &e0).unwrap();
        assert_eq!(rhs, 0.0);
        assert!(lhs >= 0.0);

        // [X, Z] = -2iY and <Y> = 0 on |0>.
        let z = Observable::pauli_z();
        let (lhs, rhs) = robertson_check(&x, &z, &e0).unwrap();
        assert!(rhs.abs() < 1e-14);
        assert!(lhs >= rhs - 1e-10);

        // [X, Y] = 2iZ: equality on |0>.
        let y = Observable::pauli_y();
        let (lhs, rhs) = robertson_check(&x, &y, &e0).unwrap();
        assert!((rhs - 1.0).abs() < 1e-14);
        assert!((lhs - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ehrenfest_zero_cases() {
        let k = PhysicalConstants::natural();
        let e0 = QuantumState::basis_state(2, 0).unwrap();

        // Commuting pair.
        let z = Observable::pauli_z();
        assert!(ehrenfest_rhs(&z, &z, &e0, &k).unwrap().abs() < 1e-14);

        // Stationary state of a diagonal Hamiltonian.
        let h = Observable::new(ComplexMatrix::diagonal(&[c(1.0, 0.0), c(3.0, 0.0)])).unwrap();
        let lam = projector(&e0);
        assert!(ehrenfest_rhs(&lam, &h, &e0, &k).unwrap().abs() < 1e-14);

        // <[Z, X]> = 2i<Y> = 0 on |0>.
        let x = Observable::pauli_x();
        assert!(ehrenfest_rhs(&z, &x, &e0, &k).unwrap().abs() < 1e-14);
    }

    #[test]
    fn observable_rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            Observable::new(m),
            Err(QslError::NotHermitian { .. })
        ));
    }
}

//! Seeded random states and operators for self-checks and tests.
//!
//! Randomness always flows through an explicitly seeded ChaCha8 stream so
//! identical seeds reproduce identical cases on every run.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::quantum::{Observable, QuantumState};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.random();
        if u1 <= f64::MIN_POSITIVE {
            continue;
        }
        let u2: f64 = rng.random();
        return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
    }
}

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(standard_normal(rng), standard_normal(rng))
}

/// Haar-like random pure state of the given dimension.
pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> QuantumState {
    loop {
        let v = ComplexVector::from_raw((0..dim).map(|_| random_complex(rng)).collect());
        if let Ok(state) = QuantumState::normalized(v) {
            return state;
        }
    }
}

/// Random Hermitian operator `(G + G†) / 2` scaled by `scale`.
pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> Observable {
    let mut m = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        m.set(i, i, Complex64::new(scale * standard_normal(rng), 0.0));
        for j in (i + 1)..dim {
            let z = random_complex(rng) * (scale * std::f64::consts::FRAC_1_SQRT_2);
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    Observable::new(m).expect("hermitian by construction")
}

/// Random state orthogonal to `reference`, or `None` when the residual after
/// projection is numerically nil (only possible in dimension 1).
pub fn random_orthogonal_to<R: Rng>(rng: &mut R, reference: &QuantumState) -> Option<QuantumState> {
    let dim = reference.dim();
    for _ in 0..32 {
        let candidate = random_state(rng, dim);
        let overlap = crate::linalg::inner_product(reference.amplitudes(), candidate.amplitudes())
            .expect("same dimension");
        let projected = candidate
            .amplitudes()
            .sub(&reference.amplitudes().scaled(overlap))
            .expect("same dimension");
        if projected.norm() > 1e-6 {
            return QuantumState::normalized(projected).ok();
        }
    }
    None
}

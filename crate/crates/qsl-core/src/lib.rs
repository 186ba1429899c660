//! Quantum-speed-limit toolkit for time-independent Hamiltonians.
//!
//! The crate computes closed-form minimum-time lower bounds on state
//! transitions (the Mandelstam-Tamm / Bhattacharyya family), evolves states
//! under `exp(-i H t / hbar)`, searches first hitting times of transition
//! probabilities, carries the Farhi-Gutmann two-state model in closed form,
//! and grades control runs with the minimum-time performance measure
//! `eta = t_min / t_cqs`.
//!
//! Every closed form is backed by an independent numerical route (spectral
//! propagation, RK4 integration, randomized invariant sweeps in
//! [`selfcheck`]); the library is organized so those cross-checks stay
//! cheap to run.

pub mod bounds;
pub mod error;
pub mod eta;
pub mod farhi_gutmann;
pub mod linalg;
pub mod propagation;
pub mod quantum;
pub mod sampling;
pub mod selfcheck;

pub use bounds::{BoundKind, BoundReport};
pub use error::{QslError, Result};
pub use eta::{ControlRun, EtaKind, EtaReport};
pub use farhi_gutmann::FgModel;
pub use linalg::{ComplexMatrix, ComplexVector, EigenDecomposition};
pub use propagation::{HitMode, HittingResult, ProbabilitySeries, Propagator};
pub use quantum::{Observable, PhysicalConstants, QuantumState};

pub use num_complex::Complex64;

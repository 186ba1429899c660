//! The minimum-time performance measure `eta = t_min / t_cqs`.
//!
//! A control run that took `t_cqs` to accomplish a transition is graded
//! against the quantum-speed-limit floor `t_min` for that transition:
//! `eta = 1` saturates the limit, `eta = 0` encodes non-convergence
//! (`t_cqs -> infinity`), and raw ratios above 1 are clamped with a flag
//! since they can only come from inconsistent inputs.

use crate::bounds::{general_transition_bound, orthogonal_bound};
use crate::error::{QslError, Result};
use crate::farhi_gutmann::FgModel;
use crate::quantum::{
    fidelity, is_stationary, std_dev, Observable, PhysicalConstants, QuantumState,
};

/// Default fidelity above which a run counts as having reached the target
/// exactly; numerical controllers rarely land on fidelity 1 to the bit.
pub const FIDELITY_THRESHOLD_DEFAULT: f64 = 1.0 - 1e-6;

/// One control run to grade: how long it took and what it reached.
///
/// `t_cqs = None` encodes a run that never converged. A converged run must
/// carry at least one of the achieved state or the achieved fidelity.
#[derive(Debug, Clone)]
pub struct ControlRun {
    t_cqs: Option<f64>,
    achieved_state: Option<QuantumState>,
    achieved_fidelity: Option<f64>,
}

impl ControlRun {
    /// General constructor enforcing the run invariants.
    pub fn new(
        t_cqs: Option<f64>,
        achieved_state: Option<QuantumState>,
        achieved_fidelity: Option<f64>,
    ) -> Result<Self> {
        if let Some(t) = t_cqs {
            if !t.is_finite() || t <= 0.0 {
                return Err(QslError::invalid(
                    "t_cqs",
                    format!("must be finite and positive when present, got {t}"),
                ));
            }
            if achieved_state.is_none() && achieved_fidelity.is_none() {
                return Err(QslError::invalid(
                    "run",
                    "a converged run needs an achieved state or an achieved fidelity",
                ));
            }
        }
        if let Some(f) = achieved_fidelity {
            if !(0.0..=1.0).contains(&f) || !f.is_finite() {
                return Err(QslError::InvalidProbability { value: f });
            }
        }
        Ok(Self {
            t_cqs,
            achieved_state,
            achieved_fidelity,
        })
    }

    /// A run that never converged (`t_cqs -> infinity`).
    pub fn non_converged() -> Self {
        Self {
            t_cqs: None,
            achieved_state: None,
            achieved_fidelity: None,
        }
    }

    /// A run that claims to have completed the target transition in `t_cqs`;
    /// records achieved fidelity 1.
    pub fn completed(t_cqs: f64) -> Result<Self> {
        Self::new(Some(t_cqs), None, Some(1.0))
    }

    pub fn with_fidelity(t_cqs: f64, achieved_fidelity: f64) -> Result<Self> {
        Self::new(Some(t_cqs), None, Some(achieved_fidelity))
    }

    pub fn with_state(t_cqs: f64, achieved_state: QuantumState) -> Result<Self> {
        Self::new(Some(t_cqs), Some(achieved_state), None)
    }

    pub fn t_cqs(&self) -> Option<f64> {
        self.t_cqs
    }

    pub fn achieved_state(&self) -> Option<&QuantumState> {
        self.achieved_state.as_ref()
    }

    pub fn achieved_fidelity(&self) -> Option<f64> {
        self.achieved_fidelity
    }

    pub fn converged(&self) -> bool {
        self.t_cqs.is_some()
    }
}

/// Which specialization produced a grade.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaKind {
    /// Plain ratio of caller-supplied times.
    Ratio,
    /// Exact-target transition graded through the overlap angle.
    Bhattacharyya,
    /// Transition to an orthogonal state.
    Orthogonal,
    /// Farhi-Gutmann model transition.
    FarhiGutmann,
    /// General pair of states.
    General,
    /// Run missed the target; graded on the state it actually reached.
    PartialFidelity,
}

impl EtaKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EtaKind::Ratio => "ratio",
            EtaKind::Bhattacharyya => "bhattacharyya",
            EtaKind::Orthogonal => "orthogonal",
            EtaKind::FarhiGutmann => "farhi-gutmann",
            EtaKind::General => "general",
            EtaKind::PartialFidelity => "partial-fidelity",
        }
    }
}

/// Result of grading one run.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaReport {
    pub eta: f64,
    pub t_min: f64,
    pub t_cqs: Option<f64>,
    pub kind: EtaKind,
    /// Set when the raw ratio exceeded 1 and was clamped; signals
    /// inconsistent inputs rather than a faster-than-limit controller.
    pub clamped: bool,
}

/// The base measure: `eta = t_min / t_cqs`, clamped into [0, 1].
pub fn eta(t_min: f64, run: &ControlRun) -> Result<EtaReport> {
    eta_with_kind(t_min, run, EtaKind::Ratio)
}

fn eta_with_kind(t_min: f64, run: &ControlRun, kind: EtaKind) -> Result<EtaReport> {
    if !t_min.is_finite() || t_min < 0.0 {
        return Err(QslError::invalid(
            "t_min",
            format!("must be finite and non-negative, got {t_min}"),
        ));
    }
    let Some(t_cqs) = run.t_cqs() else {
        return Ok(EtaReport {
            eta: 0.0,
            t_min,
            t_cqs: None,
            kind,
            clamped: false,
        });
    };
    if !t_cqs.is_finite() || t_cqs <= 0.0 {
        return Err(QslError::invalid(
            "t_cqs",
            format!("must be finite and positive, got {t_cqs}"),
        ));
    }
    let raw = t_min / t_cqs;
    let clamped = raw > 1.0;
    Ok(EtaReport {
        eta: if clamped { 1.0 } else { raw },
        t_min,
        t_cqs: Some(t_cqs),
        kind,
        clamped,
    })
}

fn delta_h_on_initial(h: &Observable, psi_i: &QuantumState) -> Result<f64> {
    // dH is a constant of motion for time-independent H, so the initial
    // state is as good as any point on the trajectory.
    let dh = std_dev(h, psi_i)?;
    if is_stationary(dh, h.matrix().frobenius_norm()) {
        return Err(QslError::StationaryState);
    }
    Ok(dh)
}

/// Grade an exact-target transition: `t_min = hbar arccos|<psi_g|psi_i>| / dH`
/// with `dH` evaluated on the initial state.
pub fn eta_bhattacharyya(
    h: &Observable,
    psi_i: &QuantumState,
    psi_g: &QuantumState,
    run: &ControlRun,
    k: &PhysicalConstants,
) -> Result<EtaReport> {
    let dh = delta_h_on_initial(h, psi_i)?;
    let bound = general_transition_bound(psi_i, psi_g, dh, k)?;
    eta_with_kind(bound.t_min(), run, EtaKind::Bhattacharyya)
}

/// Grade a transition to an orthogonal state: `t_min = pi hbar / (2 dH)`.
pub fn eta_orthogonal(delta_h: f64, run: &ControlRun, k: &PhysicalConstants) -> Result<EtaReport> {
    let bound = orthogonal_bound(delta_h, k)?;
    eta_with_kind(bound.t_min(), run, EtaKind::Orthogonal)
}

/// Grade a Farhi-Gutmann transition: `t_min = pi hbar / (E mu)`.
pub fn eta_fg(model: &FgModel, run: &ControlRun, k: &PhysicalConstants) -> Result<EtaReport> {
    eta_with_kind(model.t_min(k), run, EtaKind::FarhiGutmann)
}

/// Grade a transition between two arbitrary states:
/// `t_min = hbar arccos|<b|a>| / dH`.
pub fn eta_general(
    a: &QuantumState,
    b: &QuantumState,
    delta_h: f64,
    run: &ControlRun,
    k: &PhysicalConstants,
) -> Result<EtaReport> {
    let bound = general_transition_bound(a, b, delta_h, k)?;
    eta_with_kind(bound.t_min(), run, EtaKind::General)
}

/// Grade a run that may have missed the target.
///
/// If the achieved fidelity toward `psi_g` is at least `fidelity_threshold`,
/// the run is graded as an exact-target transition. Otherwise it is graded
/// on the transition it actually made: `t_min = hbar arccos(sqrt(P)) / dH`
/// with `P` the overlap probability between the initial and achieved states
/// (falling back to the reported fidelity when no achieved state is given),
/// and the report is tagged [`EtaKind::PartialFidelity`].
pub fn grade_run(
    h: &Observable,
    psi_i: &QuantumState,
    psi_g: &QuantumState,
    run: &ControlRun,
    fidelity_threshold: f64,
    k: &PhysicalConstants,
) -> Result<EtaReport> {
    if !run.converged() {
        return eta_with_kind(0.0, run, EtaKind::Bhattacharyya);
    }
    let achieved_fidelity = match (run.achieved_fidelity(), run.achieved_state()) {
        (Some(f), _) => f,
        (None, Some(state)) => fidelity(psi_g, state)?,
        (None, None) => {
            return Err(QslError::invalid(
                "run",
                "grading needs an achieved state or an achieved fidelity",
            ))
        }
    };
    if achieved_fidelity >= fidelity_threshold {
        return eta_bhattacharyya(h, psi_i, psi_g, run, k);
    }
    let p = match run.achieved_state() {
        Some(state) => fidelity(psi_i, state)?,
        None => achieved_fidelity,
    };
    let dh = delta_h_on_initial(h, psi_i)?;
    let t_min = k.hbar() * p.sqrt().clamp(0.0, 1.0).acos() / dh;
    eta_with_kind(t_min, run, EtaKind::PartialFidelity)
}

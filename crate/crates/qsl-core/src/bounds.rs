//! Closed-form minimum-time lower bounds.
//!
//! Every bound reduces to `t_min = hbar * angle / delta_h` for a
//! kind-specific geodesic angle; routing all four kinds through that single
//! expression makes the consistency chain between them bit-exact.

use std::f64::consts::FRAC_PI_2;

use crate::error::{QslError, Result};
use crate::linalg::inner_product;
use crate::quantum::{PhysicalConstants, QuantumState};

/// Which closed-form bound produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Bhattacharyya,
    Orthogonal,
    Offset,
    General,
}

impl BoundKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::Bhattacharyya => "bhattacharyya",
            BoundKind::Orthogonal => "orthogonal",
            BoundKind::Offset => "offset",
            BoundKind::General => "general",
        }
    }
}

/// The raw inputs a bound was computed from, kept so any report can be
/// recomputed and audited later.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundInputs {
    /// Target transition probability.
    Bhattacharyya {
        p_target: f64,
    },
    Orthogonal,
    /// Angle to the reference state, `|<c|a>| = cos(phi)`.
    Offset {
        phi: f64,
    },
    /// Overlap amplitude `|<b|a>|`.
    General {
        overlap: f64,
    },
}

/// A minimum-time lower bound with enough provenance to recompute it.
#[derive(Debug, Clone)]
pub struct BoundReport {
    kind: BoundKind,
    inputs: BoundInputs,
    t_min: f64,
    delta_h: f64,
    hbar: f64,
    inputs_summary: String,
}

impl BoundReport {
    pub fn kind(&self) -> BoundKind {
        self.kind
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn delta_h(&self) -> f64 {
        self.delta_h
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn inputs(&self) -> &BoundInputs {
        &self.inputs
    }

    pub fn inputs_summary(&self) -> &str {
        &self.inputs_summary
    }

    /// Re-derive `t_min` from the stored inputs; identical to the stored
    /// value by construction.
    pub fn recompute(&self) -> f64 {
        bound_time(angle_for(&self.inputs), self.delta_h, self.hbar)
    }
}

fn angle_for(inputs: &BoundInputs) -> f64 {
    match inputs {
        BoundInputs::Bhattacharyya { p_target } => p_target.sqrt().clamp(0.0, 1.0).acos(),
        BoundInputs::Orthogonal => 0.0f64.acos(),
        BoundInputs::Offset { phi } => (0.0f64.acos() - phi).max(0.0),
        BoundInputs::General { overlap } => overlap.clamp(0.0, 1.0).acos(),
    }
}

fn bound_time(angle: f64, delta_h: f64, hbar: f64) -> f64 {
    hbar * angle / delta_h
}

fn check_delta_h(delta_h: f64) -> Result<()> {
    if !delta_h.is_finite() || delta_h <= 0.0 {
        return Err(QslError::StationaryState);
    }
    Ok(())
}

fn report(
    inputs: BoundInputs,
    kind: BoundKind,
    delta_h: f64,
    k: &PhysicalConstants,
) -> BoundReport {
    let t_min = bound_time(angle_for(&inputs), delta_h, k.hbar());
    let inputs_summary = match &inputs {
        BoundInputs::Bhattacharyya { p_target } => {
            format!("p_target={p_target}, delta_h={delta_h}, hbar={}", k.hbar())
        }
        BoundInputs::Orthogonal => format!("delta_h={delta_h}, hbar={}", k.hbar()),
        BoundInputs::Offset { phi } => {
            format!("phi={phi}, delta_h={delta_h}, hbar={}", k.hbar())
        }
        BoundInputs::General { overlap } => {
            format!("overlap={overlap}, delta_h={delta_h}, hbar={}", k.hbar())
        }
    };
    BoundReport {
        kind,
        inputs,
        t_min,
        delta_h,
        hbar: k.hbar(),
        inputs_summary,
    }
}

/// Minimum time for the survival probability to fall to `p_target`:
/// `t >= (hbar / delta_h) * arccos(sqrt(p_target))`.
pub fn bhattacharyya_time(
    delta_h: f64,
    p_target: f64,
    k: &PhysicalConstants,
) -> Result<BoundReport> {
    check_delta_h(delta_h)?;
    if !(0.0..=1.0).contains(&p_target) || !p_target.is_finite() {
        return Err(QslError::InvalidProbability { value: p_target });
    }
    Ok(report(
        BoundInputs::Bhattacharyya { p_target },
        BoundKind::Bhattacharyya,
        delta_h,
        k,
    ))
}

/// Minimum time to reach an orthogonal state: `pi hbar / (2 delta_h)`.
pub fn orthogonal_bound(delta_h: f64, k: &PhysicalConstants) -> Result<BoundReport> {
    check_delta_h(delta_h)?;
    Ok(report(
        BoundInputs::Orthogonal,
        BoundKind::Orthogonal,
        delta_h,
        k,
    ))
}

/// Minimum time to reach a state orthogonal to a reference at angle `phi`
/// (`|<c|a>| = cos(phi)`): `hbar (pi - 2 phi) / (2 delta_h)`.
pub fn offset_bound(delta_h: f64, phi: f64, k: &PhysicalConstants) -> Result<BoundReport> {
    check_delta_h(delta_h)?;
    if !phi.is_finite() || !(0.0..=FRAC_PI_2).contains(&phi) {
        return Err(QslError::AngleOutOfRange {
            value: phi,
            max: FRAC_PI_2,
        });
    }
    Ok(report(
        BoundInputs::Offset { phi },
        BoundKind::Offset,
        delta_h,
        k,
    ))
}

/// Minimum time for a transition between two arbitrary states:
/// `hbar * arccos(|<b|a>|) / delta_h`.
pub fn general_transition_bound(
    a: &QuantumState,
    b: &QuantumState,
    delta_h: f64,
    k: &PhysicalConstants,
) -> Result<BoundReport> {
    check_delta_h(delta_h)?;
    let overlap = inner_product(b.amplitudes(), a.amplitudes())?.norm();
    Ok(report(
        BoundInputs::General {
            overlap: overlap.clamp(0.0, 1.0),
        },
        BoundKind::General,
        delta_h,
        k,
    ))
}

/// Survival-probability floor `cos^2(delta_h t / hbar)`, valid only up to
/// the first zero of the cosine.
///
/// Past `t = pi hbar / (2 delta_h)` the cosine re-ascends while the true
/// probability may stay low, so times outside the window are an error.
pub fn mt_envelope(delta_h: f64, t: f64, k: &PhysicalConstants) -> Result<f64> {
    if !delta_h.is_finite() || delta_h < 0.0 {
        return Err(QslError::invalid(
            "delta_h",
            format!("must be finite and non-negative, got {delta_h}"),
        ));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(QslError::invalid(
            "t",
            format!("must be finite and non-negative, got {t}"),
        ));
    }
    let arg = delta_h * t / k.hbar();
    // One-ulp slack so the window boundary itself always passes.
    if arg > FRAC_PI_2 * (1.0 + 1e-12) {
        let t_max = FRAC_PI_2 * k.hbar() / delta_h;
        return Err(QslError::OutsideEnvelopeWindow { t, t_max });
    }
    let c = arg.cos();
    Ok(c * c)
}

/// Offset variant of the envelope, `cos^2(delta_h t / hbar + phi)`, valid
/// while the argument stays in `[0, pi/2]`.
pub fn offset_envelope(delta_h: f64, phi: f64, t: f64, k: &PhysicalConstants) -> Result<f64> {
    if !phi.is_finite() || !(0.0..=FRAC_PI_2).contains(&phi) {
        return Err(QslError::AngleOutOfRange {
            value: phi,
            max: FRAC_PI_2,
        });
    }
    if !delta_h.is_finite() || delta_h < 0.0 {
        return Err(QslError::invalid(
            "delta_h",
            format!("must be finite and non-negative, got {delta_h}"),
        ));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(QslError::invalid(
            "t",
            format!("must be finite and non-negative, got {t}"),
        ));
    }
    let arg = delta_h * t / k.hbar() + phi;
    if arg > FRAC_PI_2 * (1.0 + 1e-12) {
        let t_max = (FRAC_PI_2 - phi).max(0.0) * k.hbar() / delta_h;
        return Err(QslError::OutsideEnvelopeWindow { t, t_max });
    }
    let c = arg.cos();
    Ok(c * c)
}

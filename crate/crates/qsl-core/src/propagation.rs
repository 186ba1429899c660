//! Time evolution under time-independent Hamiltonians.
//!
//! The spectral propagator `U(t) = exp(-i H t / hbar)` drives everything:
//! single-shot evolution, transition-probability scans, and the
//! first-hitting-time search that turns the closed-form infima into numbers.
//! A fixed-step RK4 integrator doubles as an independent oracle for the
//! spectral path.

use num_complex::Complex64;

use crate::error::{QslError, Result};
use crate::linalg::{inner_product, ComplexMatrix, ComplexVector, EigenDecomposition};
use crate::quantum::{is_stationary, std_dev, Observable, PhysicalConstants, QuantumState};

/// Entrywise tolerance for `||U†U - I||` on constructed propagators.
pub const UNITARITY_TOLERANCE: f64 = 1e-9;

/// Default number of coarse grid points for the hitting-time search.
pub const HITTING_GRID_POINTS: usize = 2048;

/// Bisection iterations for refining a bracketed crossing.
pub const BISECTION_ITERATIONS: usize = 80;

/// Probability proximity required to call a hitting time converged.
pub const HITTING_TOLERANCE: f64 = 1e-9;

/// Probability level treated as "the transition probability vanished".
pub const VANISH_EPSILON: f64 = 1e-10;

/// The unitary `exp(-i H t / hbar)` for a fixed elapsed time `t >= 0`.
#[derive(Debug, Clone)]
pub struct Propagator {
    matrix: ComplexMatrix,
    t: f64,
    hbar: f64,
}

impl Propagator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn apply(&self, psi: &QuantumState) -> Result<QuantumState> {
        let v = self.matrix.mul_vec(psi.amplitudes())?;
        QuantumState::normalized(v)
    }
}

/// Transition probabilities sampled on a strictly increasing time grid.
#[derive(Debug, Clone)]
pub struct ProbabilitySeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl ProbabilitySeries {
    fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(QslError::DimensionMismatch {
                left: times.len(),
                right: values.len(),
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(QslError::invalid("times", "must be strictly increasing"));
        }
        if values.iter().any(|&p| !(-1e-12..=1.0 + 1e-12).contains(&p)) {
            return Err(QslError::InvalidProbability {
                value: values
                    .iter()
                    .copied()
                    .find(|&p| !(-1e-12..=1.0 + 1e-12).contains(&p))
                    .unwrap_or(f64::NAN),
            });
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }
}

/// Outcome of a first-hitting-time search.
#[derive(Debug, Clone, PartialEq)]
pub struct HittingResult {
    pub time: Option<f64>,
    /// Probability at the returned time, or the closest approach when the
    /// search did not converge.
    pub achieved: f64,
    pub converged: bool,
}

impl HittingResult {
    fn converged(time: f64, achieved: f64) -> Self {
        Self {
            time: Some(time),
            achieved,
            converged: true,
        }
    }

    fn missed(achieved: f64) -> Self {
        Self {
            time: None,
            achieved,
            converged: false,
        }
    }
}

/// What the hitting-time search looks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitMode {
    /// First time the probability equals the requested level.
    ReachLevel,
    /// First time the probability vanishes (reaches [`VANISH_EPSILON`]).
    Vanish,
}

/// Precomputed spectral data for one (H, psi0, target) triple.
///
/// The amplitude is `<target|U(t)|psi0> = sum_j w_j exp(-i lambda_j t/hbar)`
/// with weights `w_j = <target|v_j><v_j|psi0>`, so each probability or
/// derivative evaluation is O(dim) after one eigendecomposition.
pub(crate) struct SpectralEvolution {
    eigenvalues: Vec<f64>,
    weights: Vec<Complex64>,
    hbar: f64,
}

impl SpectralEvolution {
    pub(crate) fn new(
        h: &Observable,
        psi0: &QuantumState,
        target: &QuantumState,
        k: &PhysicalConstants,
    ) -> Result<Self> {
        let eig = crate::linalg::eig_hermitian(h.matrix())?;
        Self::from_eigen(&eig, psi0, target, k)
    }

    pub(crate) fn from_eigen(
        eig: &EigenDecomposition,
        psi0: &QuantumState,
        target: &QuantumState,
        k: &PhysicalConstants,
    ) -> Result<Self> {
        let dim = eig.dim();
        if psi0.dim() != dim {
            return Err(QslError::DimensionMismatch {
                left: dim,
                right: psi0.dim(),
            });
        }
        if target.dim() != dim {
            return Err(QslError::DimensionMismatch {
                left: dim,
                right: target.dim(),
            });
        }
        let mut weights = Vec::with_capacity(dim);
        for j in 0..dim {
            let v_j = eig.eigenvectors().column(j);
            let c_j = inner_product(&v_j, psi0.amplitudes())?;
            let d_j = inner_product(target.amplitudes(), &v_j)?;
            weights.push(d_j * c_j);
        }
        Ok(Self {
            eigenvalues: eig.eigenvalues().to_vec(),
            weights,
            hbar: k.hbar(),
        })
    }

    fn amplitude(&self, t: f64) -> Complex64 {
        self.eigenvalues
            .iter()
            .zip(&self.weights)
            .map(|(&lam, &w)| w * Complex64::new(0.0, -lam * t / self.hbar).exp())
            .sum()
    }

    pub(crate) fn probability(&self, t: f64) -> f64 {
        self.amplitude(t).norm_sqr().clamp(0.0, 1.0)
    }

    /// Exact d/dt of the transition probability.
    fn derivative(&self, t: f64) -> f64 {
        let f = self.amplitude(t);
        let fdot: Complex64 = self
            .eigenvalues
            .iter()
            .zip(&self.weights)
            .map(|(&lam, &w)| {
                w * Complex64::new(0.0, -lam / self.hbar)
                    * Complex64::new(0.0, -lam * t / self.hbar).exp()
            })
            .sum();
        2.0 * (f.conj() * fdot).re
    }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(QslError::invalid(
            "t",
            format!("time must be finite and non-negative, got {t}"),
        ));
    }
    Ok(())
}

/// Spectral propagator `U(t) = exp(-i H t / hbar)`, with `t0` fixed at 0.
pub fn propagator(h: &Observable, t: f64, k: &PhysicalConstants) -> Result<Propagator> {
    check_time(t)?;
    let hbar = k.hbar();
    let matrix = crate::linalg::spectral_function(h.matrix(), |lam| {
        Complex64::new(0.0, -lam * t / hbar).exp()
    })?;
    let n = matrix.rows();
    let gram = matrix.adjoint().mul_mat(&matrix)?;
    let deviation = gram.sub(&ComplexMatrix::identity(n))?.max_abs_entry();
    if deviation > UNITARITY_TOLERANCE {
        return Err(QslError::NotUnitary { deviation });
    }
    Ok(Propagator { matrix, t, hbar })
}

/// Evolve a state: `U(t) |psi0>`.
pub fn evolve(
    h: &Observable,
    psi0: &QuantumState,
    t: f64,
    k: &PhysicalConstants,
) -> Result<QuantumState> {
    check_time(t)?;
    if h.dim() != psi0.dim() {
        return Err(QslError::DimensionMismatch {
            left: h.dim(),
            right: psi0.dim(),
        });
    }
    let eig = crate::linalg::eig_hermitian(h.matrix())?;
    let dim = eig.dim();
    let mut out = vec![Complex64::ZERO; dim];
    for j in 0..dim {
        let v_j = eig.eigenvectors().column(j);
        let coeff = inner_product(&v_j, psi0.amplitudes())?
            * Complex64::new(0.0, -eig.eigenvalues()[j] * t / k.hbar()).exp();
        for (slot, amp) in out.iter_mut().zip(v_j.entries()) {
            *slot += coeff * amp;
        }
    }
    QuantumState::normalized(ComplexVector::from_raw(out))
}

/// `|<target|U(t)|psi0>|^2`; survival probability when `target == psi0`.
pub fn transition_probability(
    h: &Observable,
    psi0: &QuantumState,
    target: &QuantumState,
    t: f64,
    k: &PhysicalConstants,
) -> Result<f64> {
    check_time(t)?;
    let se = SpectralEvolution::new(h, psi0, target, k)?;
    Ok(se.probability(t))
}

/// Sample the transition probability on a uniform grid `[0, t_max]` with
/// `n_points` points, reusing a single eigendecomposition.
pub fn scan_probability(
    h: &Observable,
    psi0: &QuantumState,
    target: &QuantumState,
    t_max: f64,
    n_points: usize,
    k: &PhysicalConstants,
) -> Result<ProbabilitySeries> {
    if !t_max.is_finite() || t_max <= 0.0 {
        return Err(QslError::invalid(
            "t_max",
            format!("must be finite and positive, got {t_max}"),
        ));
    }
    if n_points < 2 {
        return Err(QslError::invalid(
            "n_points",
            format!("need at least 2 grid points, got {n_points}"),
        ));
    }
    let se = SpectralEvolution::new(h, psi0, target, k)?;
    let denom = (n_points - 1) as f64;
    let mut times = Vec::with_capacity(n_points);
    let mut values = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let t = t_max * i as f64 / denom;
        times.push(t);
        values.push(se.probability(t));
    }
    ProbabilitySeries::new(times, values)
}

/// Default search horizon: four bound-periods `pi hbar / (2 dH)`.
///
/// Errors with [`QslError::StationaryState`] when the initial state is
/// stationary, since no finite horizon is meaningful there.
pub fn default_t_max(h: &Observable, psi0: &QuantumState, k: &PhysicalConstants) -> Result<f64> {
    let dh = std_dev(h, psi0)?;
    if is_stationary(dh, h.matrix().frobenius_norm()) {
        return Err(QslError::StationaryState);
    }
    Ok(4.0 * std::f64::consts::FRAC_PI_2 * k.hbar() / dh)
}

/// First time the transition probability to `target` reaches `level`
/// (`ReachLevel`) or vanishes (`Vanish`), searched on `[0, t_max]`.
///
/// Coarse grid, bracket detection, then 80 bisection steps; tangent
/// approaches (the level is an extremum of the probability) are refined on
/// the exact derivative of the spectral amplitude.
pub fn first_hitting_time(
    h: &Observable,
    psi0: &QuantumState,
    target: &QuantumState,
    level: f64,
    mode: HitMode,
    t_max: f64,
    k: &PhysicalConstants,
) -> Result<HittingResult> {
    first_hitting_time_with_grid(h, psi0, target, level, mode, t_max, HITTING_GRID_POINTS, k)
}

/// [`first_hitting_time`] with an explicit coarse-grid resolution.
#[allow(clippy::too_many_arguments)]
pub fn first_hitting_time_with_grid(
    h: &Observable,
    psi0: &QuantumState,
    target: &QuantumState,
    level: f64,
    mode: HitMode,
    t_max: f64,
    grid_points: usize,
    k: &PhysicalConstants,
) -> Result<HittingResult> {
    if !(0.0..=1.0).contains(&level) || !level.is_finite() {
        return Err(QslError::InvalidProbability { value: level });
    }
    if !t_max.is_finite() || t_max <= 0.0 {
        return Err(QslError::invalid(
            "t_max",
            format!("must be finite and positive, got {t_max}"),
        ));
    }
    if grid_points < 8 {
        return Err(QslError::invalid(
            "grid_points",
            format!("need at least 8 grid points, got {grid_points}"),
        ));
    }

    let se = SpectralEvolution::new(h, psi0, target, k)?;
    let effective_level = match mode {
        HitMode::ReachLevel => level,
        HitMode::Vanish => VANISH_EPSILON,
    };

    let p0 = se.probability(0.0);
    match mode {
        HitMode::ReachLevel => {
            if (p0 - effective_level).abs() <= HITTING_TOLERANCE {
                return Ok(HittingResult::converged(0.0, p0));
            }
        }
        HitMode::Vanish => {
            if p0 <= effective_level {
                return Ok(HittingResult::converged(0.0, p0));
            }
        }
    }

    let dh = std_dev(h, psi0)?;
    if is_stationary(dh, h.matrix().frobenius_norm()) {
        // The probability is constant in time; nothing left to find.
        return Ok(HittingResult::missed(p0));
    }

    match mode {
        HitMode::ReachLevel => search_reach_level(&se, effective_level, t_max, grid_points, p0),
        HitMode::Vanish => search_vanish(&se, effective_level, t_max, grid_points, p0),
    }
}

fn search_reach_level(
    se: &SpectralEvolution,
    level: f64,
    t_max: f64,
    grid_points: usize,
    p0: f64,
) -> Result<HittingResult> {
    let denom = (grid_points - 1) as f64;
    let grid_t = |i: usize| t_max * i as f64 / denom;

    let mut best_achieved = p0;
    let mut best_gap = (p0 - level).abs();

    let mut p_prev2: Option<f64> = None;
    let mut p_prev = p0;
    let mut t_prev = 0.0;

    for i in 1..grid_points {
        let t_i = grid_t(i);
        let p_i = se.probability(t_i);

        // Transversal crossing inside (t_prev, t_i].
        if (p_prev - level) * (p_i - level) < 0.0 {
            let t_hit = bisect_level(se, level, t_prev, t_i);
            return Ok(HittingResult::converged(t_hit, se.probability(t_hit)));
        }
        if (p_i - level).abs() <= 1e-15 {
            return Ok(HittingResult::converged(t_i, p_i));
        }

        // Tangent approach: extremum centered on the previous grid point.
        if let Some(p_prev2) = p_prev2 {
            let t_left = grid_t(i - 2);
            let flat = p_prev2 == p_prev && p_prev == p_i;
            let local_max = !flat && p_prev >= p_prev2 && p_prev >= p_i && p_prev < level;
            let local_min = !flat && p_prev <= p_prev2 && p_prev <= p_i && p_prev > level;
            if local_max || local_min {
                let t_ext = refine_extremum(se, t_left, t_i);
                let p_ext = se.probability(t_ext);
                if (p_ext - level).abs() <= HITTING_TOLERANCE {
                    return Ok(HittingResult::converged(t_ext, p_ext));
                }
                // The true extremum pokes past the level between grid points:
                // the earliest equality is on the approach side.
                if (local_max && p_ext > level) || (local_min && p_ext < level) {
                    let t_hit = bisect_level(se, level, t_left, t_ext);
                    return Ok(HittingResult::converged(t_hit, se.probability(t_hit)));
                }
                if (p_ext - level).abs() < best_gap {
                    best_gap = (p_ext - level).abs();
                    best_achieved = p_ext;
                }
            }
        }

        if (p_i - level).abs() < best_gap {
            best_gap = (p_i - level).abs();
            best_achieved = p_i;
        }
        p_prev2 = Some(p_prev);
        p_prev = p_i;
        t_prev = t_i;
    }

    Ok(HittingResult::missed(best_achieved))
}

fn search_vanish(
    se: &SpectralEvolution,
    eps: f64,
    t_max: f64,
    grid_points: usize,
    p0: f64,
) -> Result<HittingResult> {
    let denom = (grid_points - 1) as f64;
    let grid_t = |i: usize| t_max * i as f64 / denom;

    let mut best_achieved = p0;
    let mut p_prev2: Option<f64> = None;
    let mut p_prev = p0;

    let mut i = 1;
    while i < grid_points {
        let t_i = grid_t(i);
        let p_i = se.probability(t_i);
        best_achieved = best_achieved.min(p_i);

        if p_i <= eps {
            // Entered the vanishing region: find its grid argmin, then polish
            // the minimum.
            let mut argmin = i;
            let mut min_p = p_i;
            let mut j = i + 1;
            while j < grid_points {
                let p_j = se.probability(grid_t(j));
                if p_j > eps {
                    break;
                }
                if p_j < min_p {
                    min_p = p_j;
                    argmin = j;
                }
                j += 1;
            }
            let left = grid_t(argmin.saturating_sub(1));
            let right = grid_t((argmin + 1).min(grid_points - 1));
            let t_refined = refine_extremum(se, left, right);
            let p_refined = se.probability(t_refined);
            // Keep whichever point sits deeper; `achieved` stays the
            // probability at the reported time either way.
            return Ok(if p_refined <= min_p {
                HittingResult::converged(t_refined, p_refined)
            } else {
                HittingResult::converged(grid_t(argmin), min_p)
            });
        }

        // A dip narrower than the grid: refine interior minima and test them.
        if let Some(p_prev2_v) = p_prev2 {
            let flat = p_prev2_v == p_prev && p_prev == p_i;
            if !flat && p_prev <= p_prev2_v && p_prev <= p_i {
                let t_left = grid_t(i - 2);
                let t_ext = refine_extremum(se, t_left, t_i);
                let p_ext = se.probability(t_ext);
                best_achieved = best_achieved.min(p_ext);
                if p_ext <= eps {
                    return Ok(HittingResult::converged(t_ext, p_ext));
                }
            }
        }

        p_prev2 = Some(p_prev);
        p_prev = p_i;
        i += 1;
    }

    Ok(HittingResult::missed(best_achieved))
}

/// Bisection on `P(t) - level` over a sign-changing bracket.
fn bisect_level(se: &SpectralEvolution, level: f64, mut a: f64, mut b: f64) -> f64 {
    let mut ga = se.probability(a) - level;
    for _ in 0..BISECTION_ITERATIONS {
        let mid = 0.5 * (a + b);
        let gm = se.probability(mid) - level;
        if gm == 0.0 {
            return mid;
        }
        if ga * gm < 0.0 {
            b = mid;
        } else {
            a = mid;
            ga = gm;
        }
    }
    0.5 * (a + b)
}

/// Locate the extremum of `P` inside `[a, b]` by bisecting its exact
/// derivative; falls back to a parabola vertex when the derivative does not
/// change sign on the bracket.
fn refine_extremum(se: &SpectralEvolution, a: f64, b: f64) -> f64 {
    let mut lo = a;
    let mut hi = b;
    let mut d_lo = se.derivative(lo);
    let d_hi = se.derivative(hi);
    if d_lo == 0.0 {
        return lo;
    }
    if d_lo * d_hi < 0.0 {
        for _ in 0..BISECTION_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            let d_mid = se.derivative(mid);
            if d_mid == 0.0 {
                return mid;
            }
            if d_lo * d_mid < 0.0 {
                hi = mid;
            } else {
                lo = mid;
                d_lo = d_mid;
            }
        }
        return 0.5 * (lo + hi);
    }
    // Derivative did not bracket (flat or asymmetric sampling): quadratic fit
    // through the endpoints and midpoint.
    let mid = 0.5 * (a + b);
    let (pa, pm, pb) = (se.probability(a), se.probability(mid), se.probability(b));
    let denom = pa - 2.0 * pm + pb;
    if denom.abs() < 1e-300 {
        return mid;
    }
    let shift = 0.5 * (pa - pb) / denom * 0.5 * (b - a);
    (mid + shift).clamp(a, b)
}

/// Fixed-step RK4 integration of `d psi / dt = -(i/hbar) H psi`.
///
/// No renormalization is applied: norm drift away from 1 is the caller's
/// signal that the step count is inadequate. Returns raw amplitudes rather
/// than a [`QuantumState`] for the same reason.
pub fn rk4_evolve(
    h: &Observable,
    psi0: &QuantumState,
    t: f64,
    steps: usize,
    k: &PhysicalConstants,
) -> Result<ComplexVector> {
    rk4_evolve_raw(h, psi0.amplitudes(), t, steps, k)
}

/// [`rk4_evolve`] starting from raw (possibly drifted) amplitudes, so long
/// integrations can be chained without renormalizing in between.
pub fn rk4_evolve_raw(
    h: &Observable,
    start: &ComplexVector,
    t: f64,
    steps: usize,
    k: &PhysicalConstants,
) -> Result<ComplexVector> {
    check_time(t)?;
    if steps < 1 {
        return Err(QslError::invalid("steps", "need at least one step"));
    }
    if h.dim() != start.dim() {
        return Err(QslError::DimensionMismatch {
            left: h.dim(),
            right: start.dim(),
        });
    }
    let dim = h.dim();
    let m = h.matrix();
    let factor = Complex64::new(0.0, -1.0 / k.hbar());

    let rhs = |y: &[Complex64], out: &mut [Complex64]| {
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for (j, amp) in y.iter().enumerate() {
                acc += m.get(i, j) * amp;
            }
            *slot = factor * acc;
        }
    };

    let dt = t / steps as f64;
    let mut y: Vec<Complex64> = start.entries().to_vec();
    let mut k1 = vec![Complex64::ZERO; dim];
    let mut k2 = vec![Complex64::ZERO; dim];
    let mut k3 = vec![Complex64::ZERO; dim];
    let mut k4 = vec![Complex64::ZERO; dim];
    let mut stage = vec![Complex64::ZERO; dim];

    for _ in 0..steps {
        rhs(&y, &mut k1);
        for i in 0..dim {
            stage[i] = y[i] + k1[i] * (0.5 * dt);
        }
        rhs(&stage, &mut k2);
        for i in 0..dim {
            stage[i] = y[i] + k2[i] * (0.5 * dt);
        }
        rhs(&stage, &mut k3);
        for i in 0..dim {
            stage[i] = y[i] + k3[i] * dt;
        }
        rhs(&stage, &mut k4);
        for i in 0..dim {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
    Ok(ComplexVector::from_raw(y))
}

//! Acceptance suite: one test per criterion, each printing a pass line with
//! its statistics (visible with `cargo test -- --nocapture`).
//!
//! Criterion 10 (CLI determinism and exit codes) lives in the CLI crate's
//! own acceptance target.

use std::time::Instant;

use qsl_core::bounds::{
    bhattacharyya_time, general_transition_bound, mt_envelope, offset_bound, orthogonal_bound,
};
use qsl_core::eta::{eta, eta_orthogonal, ControlRun};
use qsl_core::farhi_gutmann::FgModel;
use qsl_core::linalg::inner_product;
use qsl_core::propagation::{
    default_t_max, first_hitting_time, rk4_evolve_raw, scan_probability, transition_probability,
    HitMode,
};
use qsl_core::quantum::{
    ehrenfest_rhs, expectation, is_stationary, robertson_check, std_dev, Observable,
    PhysicalConstants, QuantumState,
};
use qsl_core::sampling::{random_hermitian, random_orthogonal_to, random_state, rng_from_seed};
use qsl_core::ComplexVector;

fn k() -> PhysicalConstants {
    PhysicalConstants::natural()
}

fn random_dim(rng: &mut rand_chacha::ChaCha8Rng) -> usize {
    rand::Rng::random_range(rng, 2..=6usize)
}

/// Criterion 1: measured first-hitting times never undercut the
/// Bhattacharyya floor, over >= 500 randomized triples, within 60 s.
#[test]
fn c01_bhattacharyya_bound_validity() {
    let started = Instant::now();
    let k = k();
    let mut rng = rng_from_seed(0xC1);

    let mut triples = 0usize;
    let mut checks = 0usize;
    while triples < 500 {
        let dim = random_dim(&mut rng);
        let h = random_hermitian(&mut rng, dim, 1.0);
        let psi0 = random_state(&mut rng, dim);
        let target = random_state(&mut rng, dim);
        let dh = std_dev(&h, &psi0).unwrap();
        if is_stationary(dh, h.matrix().frobenius_norm()) {
            continue;
        }
        triples += 1;

        let t_max = default_t_max(&h, &psi0, &k).unwrap();
        let series = scan_probability(&h, &psi0, &psi0, t_max, 129, &k).unwrap();
        for &idx in &[32usize, 64, 96] {
            let level = series.values()[idx];
            if !(1e-3..=1.0 - 1e-3).contains(&level) {
                continue;
            }
            let hit = first_hitting_time(&h, &psi0, &psi0, level, HitMode::ReachLevel, t_max, &k)
                .unwrap();
            if !hit.converged {
                continue;
            }
            let floor = bhattacharyya_time(dh, level, &k).unwrap().t_min();
            let t_hit = hit.time.unwrap();
            assert!(
                t_hit >= floor - 1e-6,
                "survival hit level {level} at {t_hit}, under floor {floor}"
            );
            checks += 1;
        }

        // The target state of the triple: a converged full transfer must
        // respect the overlap-angle bound.
        let hit = first_hitting_time(
            &h,
            &psi0,
            &target,
            1.0 - 1e-9,
            HitMode::ReachLevel,
            t_max,
            &k,
        )
        .unwrap();
        if hit.converged {
            let floor = general_transition_bound(&psi0, &target, dh, &k)
                .unwrap()
                .t_min();
            let t_hit = hit.time.unwrap();
            assert!(t_hit >= floor - 1e-6);
            checks += 1;
        }
    }

    let elapsed = started.elapsed();
    assert!(checks >= 500, "only {checks} hitting checks ran");
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "criterion 1 overran its runtime budget: {elapsed:?}"
    );
    println!(
        "[PASS] C1 bhattacharyya bound validity: {triples} triples, {checks} hitting checks, {elapsed:?}"
    );
}

/// Criterion 2: survival probability never falls below `cos^2(dH t / hbar)`
/// on a 256-point grid inside the validity window, over >= 200 systems.
#[test]
fn c02_mt_envelope() {
    let k = k();
    let mut rng = rng_from_seed(0xC2);
    let mut systems = 0usize;
    while systems < 200 {
        let dim = random_dim(&mut rng);
        let h = random_hermitian(&mut rng, dim, 1.0);
        let psi = random_state(&mut rng, dim);
        let dh = std_dev(&h, &psi).unwrap();
        if is_stationary(dh, h.matrix().frobenius_norm()) {
            continue;
        }
        systems += 1;
        let window = std::f64::consts::FRAC_PI_2 * k.hbar() / dh;
        let series = scan_probability(&h, &psi, &psi, window, 256, &k).unwrap();
        for (t, p) in series.iter() {
            let floor = mt_envelope(dh, t, &k).unwrap();
            assert!(
                p >= floor - 1e-9,
                "survival {p} under envelope {floor} at t={t}"
            );
        }
    }
    println!("[PASS] C2 MT envelope: {systems} systems x 256 grid points");
}

/// Criterion 3: the Pauli-X system saturates the orthogonal-transition
/// bound, so the ideal run grades to 1.
#[test]
fn c03_rabi_saturation() {
    let k = k();
    let h = Observable::pauli_x();
    let psi0 = QuantumState::basis_state(2, 0).unwrap();
    let target = QuantumState::basis_state(2, 1).unwrap();
    let dh = std_dev(&h, &psi0).unwrap();

    let hit = first_hitting_time(
        &h,
        &psi0,
        &target,
        1.0,
        HitMode::ReachLevel,
        std::f64::consts::PI,
        &k,
    )
    .unwrap();
    assert!(hit.converged);
    let t_hit = hit.time.unwrap();
    let bound = orthogonal_bound(dh, &k).unwrap().t_min();
    assert!(
        (t_hit - bound).abs() <= 1e-6,
        "hitting time {t_hit} vs bound {bound}"
    );

    let graded = eta_orthogonal(dh, &ControlRun::completed(t_hit).unwrap(), &k).unwrap();
    assert!(
        (graded.eta - 1.0).abs() <= 1e-6,
        "eta {} at saturation",
        graded.eta
    );
    println!(
        "[PASS] C3 Rabi saturation: hit at {t_hit}, bound {bound}, eta {}",
        graded.eta
    );
}

/// Criterion 4: the two-state closed form stays within 1e-9 of the spectral
/// propagator and 1e-7 of the RK4 oracle over 100 random models x 64 times.
#[test]
fn c04_fg_closed_form() {
    let k = k();
    let mut rng = rng_from_seed(0xC4);
    for _ in 0..100 {
        let e_a = rand::Rng::random_range(&mut rng, 0.1..5.0);
        let e_b = rand::Rng::random_range(&mut rng, 0.1..5.0);
        let s = rand::Rng::random_range(&mut rng, 0.05..0.95);
        let model = FgModel::new(e_a, e_b, s).unwrap();
        let basis = model.basis_states();
        let h = model.hamiltonian();
        let t_span = 3.0 * model.t_min(&k);

        // One incremental RK4 integration across the grid, step sized for a
        // phase budget well inside the 1e-7 tolerance.
        let omega_total = model.e() * t_span / k.hbar();
        let total_steps = (100.0 * omega_total).ceil().max(10_000.0);
        let h_target = t_span / total_steps;

        let mut rk4_state: ComplexVector = basis.a.amplitudes().clone();
        let mut t_prev = 0.0;
        for i in 0..64 {
            let t = t_span * i as f64 / 63.0;
            let closed = model.probability(t, &k).unwrap();

            let spectral = transition_probability(&h, &basis.a, &basis.b, t, &k).unwrap();
            assert!(
                (closed - spectral).abs() <= 1e-9,
                "closed {closed} vs spectral {spectral} at t={t} for {model:?}"
            );

            if t > t_prev {
                let span = t - t_prev;
                let steps = (span / h_target).ceil().max(1.0) as usize;
                rk4_state = rk4_evolve_raw(&h, &rk4_state, span, steps, &k).unwrap();
                t_prev = t;
            }
            let amp = inner_product(basis.b.amplitudes(), &rk4_state).unwrap();
            let oracle = amp.norm_sqr();
            assert!(
                (closed - oracle).abs() <= 1e-7,
                "closed {closed} vs RK4 {oracle} at t={t} for {model:?}"
            );
        }
    }
    println!("[PASS] C4 FG closed form: 100 models x 64 times vs spectral (1e-9) and RK4 (1e-7)");
}

/// Criterion 5: the scanned maximum matches `(s/mu)^2` and is first attained
/// at `pi hbar / (E mu)`, over 100 random models plus the golden case.
#[test]
fn c05_fg_extrema() {
    let k = k();

    // Golden case: symmetric energies at half overlap.
    let golden = FgModel::new(1.0, 1.0, 0.5).unwrap();
    assert!((golden.p_max() - 1.0).abs() < 1e-15);
    assert!((golden.t_min(&k) - std::f64::consts::PI).abs() < 1e-12);

    let mut rng = rng_from_seed(0xC5);
    for case in 0..100 {
        let model = if case == 0 {
            golden
        } else {
            FgModel::new(
                rand::Rng::random_range(&mut rng, 0.1..5.0),
                rand::Rng::random_range(&mut rng, 0.1..5.0),
                rand::Rng::random_range(&mut rng, 0.05..0.95),
            )
            .unwrap()
        };
        let basis = model.basis_states();
        let h = model.hamiltonian();
        let t_peak = model.t_min(&k);

        let series = scan_probability(&h, &basis.a, &basis.b, 3.0 * t_peak, 16_384, &k).unwrap();
        let scanned_max = series.values().iter().copied().fold(0.0f64, f64::max);
        assert!(
            (scanned_max - model.p_max()).abs() <= 1e-6,
            "scanned max {scanned_max} vs closed form {} for {model:?}",
            model.p_max()
        );

        let hit = first_hitting_time(
            &h,
            &basis.a,
            &basis.b,
            model.p_max(),
            HitMode::ReachLevel,
            2.5 * t_peak,
            &k,
        )
        .unwrap();
        assert!(hit.converged, "peak never hit for {model:?}");
        let t_hit = hit.time.unwrap();
        assert!(
            (t_hit - t_peak).abs() <= 1e-6,
            "first attainment {t_hit} vs closed form {t_peak} for {model:?}"
        );
        assert!((hit.achieved - model.p_max()).abs() <= 1e-6);
    }
    println!("[PASS] C5 FG extrema: 100 models, golden case P_max=1 at t=pi");
}

/// Criterion 6: the four bounds coincide bit-for-bit on their common case.
#[test]
fn c06_bound_consistency_chain() {
    let k = k();
    let a = QuantumState::basis_state(2, 0).unwrap();
    let b = QuantumState::basis_state(2, 1).unwrap();
    let mut rng = rng_from_seed(0xC6);
    for _ in 0..100 {
        let dh = rand::Rng::random_range(&mut rng, 1e-3..1e3);
        let orth = orthogonal_bound(dh, &k).unwrap().t_min();
        let bhat = bhattacharyya_time(dh, 0.0, &k).unwrap().t_min();
        let off = offset_bound(dh, 0.0, &k).unwrap().t_min();
        let gen = general_transition_bound(&a, &b, dh, &k).unwrap().t_min();
        assert_eq!(orth.to_bits(), bhat.to_bits());
        assert_eq!(orth.to_bits(), off.to_bits());
        assert_eq!(orth.to_bits(), gen.to_bits());
    }
    println!("[PASS] C6 bound consistency chain: bit-identical over 100 uncertainties");
}

/// Criterion 7: the in-plane maximizer attains the general bound through the
/// offset bound, and no state orthogonal to the target exceeds it.
#[test]
fn c07_sup_over_reference_states() {
    let k = k();
    let mut rng = rng_from_seed(0xC7);
    let mut cases = 0usize;
    while cases < 200 {
        let dim = random_dim(&mut rng);
        let a = random_state(&mut rng, dim);
        let b = random_state(&mut rng, dim);
        let overlap = inner_product(b.amplitudes(), a.amplitudes()).unwrap();
        if overlap.norm() > 1.0 - 1e-6 {
            continue;
        }
        cases += 1;
        let dh = rand::Rng::random_range(&mut rng, 0.2..4.0);
        let general = general_transition_bound(&a, &b, dh, &k).unwrap().t_min();

        // Constructed maximizer: the component of a orthogonal to b.
        let residual = a.amplitudes().sub(&b.amplitudes().scaled(overlap)).unwrap();
        let c_star = QuantumState::normalized(residual).unwrap();
        let phi_star = inner_product(c_star.amplitudes(), a.amplitudes())
            .unwrap()
            .norm()
            .clamp(0.0, 1.0)
            .acos();
        let attained = offset_bound(dh, phi_star, &k).unwrap().t_min();
        assert!(
            (attained - general).abs() <= 1e-9,
            "maximizer attains {attained}, general bound {general}"
        );

        for _ in 0..32 {
            let Some(c) = random_orthogonal_to(&mut rng, &b) else {
                continue;
            };
            let phi_c = inner_product(c.amplitudes(), a.amplitudes())
                .unwrap()
                .norm()
                .clamp(0.0, 1.0)
                .acos();
            let offset = offset_bound(dh, phi_c, &k).unwrap().t_min();
            assert!(
                offset <= general + 1e-9,
                "offset bound {offset} exceeds general bound {general}"
            );
        }
    }
    println!("[PASS] C7 supremum construction: {cases} cases x 32 reference states");
}

/// Criterion 8: eta semantics — non-convergence, saturation, clamping, and
/// strict monotonicity in the elapsed time.
#[test]
fn c08_eta_semantics() {
    let mut rng = rng_from_seed(0xC8);

    assert_eq!(eta(1.7, &ControlRun::non_converged()).unwrap().eta, 0.0);

    let ideal = eta(0.9, &ControlRun::completed(0.9).unwrap()).unwrap();
    assert_eq!(ideal.eta, 1.0);
    assert!(!ideal.clamped);

    for _ in 0..1000 {
        let t_min = rand::Rng::random_range(&mut rng, 0.01..10.0);
        let t_cqs = rand::Rng::random_range(&mut rng, 0.01..10.0);
        let report = eta(t_min, &ControlRun::completed(t_cqs).unwrap()).unwrap();
        assert_eq!(report.clamped, t_min / t_cqs > 1.0, "clamp flag mismatch");
        assert!((0.0..=1.0).contains(&report.eta));
    }

    for _ in 0..1000 {
        let t_min = rand::Rng::random_range(&mut rng, 0.01..10.0);
        let t1 = t_min + rand::Rng::random_range(&mut rng, 0.001..5.0);
        let t2 = t1 + rand::Rng::random_range(&mut rng, 0.001..5.0);
        let e1 = eta(t_min, &ControlRun::completed(t1).unwrap()).unwrap().eta;
        let e2 = eta(t_min, &ControlRun::completed(t2).unwrap()).unwrap().eta;
        assert!(e1 > e2, "eta not strictly decreasing: {e1} !> {e2}");
    }
    println!("[PASS] C8 eta semantics: non-convergence, saturation, clamping, monotonicity");
}

/// Criterion 9: finite differences match the Ehrenfest derivative to 1e-6
/// and the Robertson inequality never breaks beyond 1e-10, over >= 500
/// random triples.
#[test]
fn c09_ehrenfest_and_robertson() {
    let k = k();
    let mut rng = rng_from_seed(0xC9);
    for _ in 0..500 {
        let dim = random_dim(&mut rng);
        let h = random_hermitian(&mut rng, dim, 1.0);
        let r = random_hermitian(&mut rng, dim, 1.0);
        let psi = random_state(&mut rng, dim);

        let step = 1e-5;
        let plus = expectation(
            &r,
            &qsl_core::propagation::evolve(&h, &psi, step, &k).unwrap(),
        )
        .unwrap();
        let minus = expectation(
            &r,
            &qsl_core::propagation::evolve(&h.negated(), &psi, step, &k).unwrap(),
        )
        .unwrap();
        let fd = (plus - minus) / (2.0 * step);
        let exact = ehrenfest_rhs(&r, &h, &psi, &k).unwrap();
        assert!(
            (fd - exact).abs() <= 1e-6,
            "finite difference {fd} vs commutator {exact}"
        );

        let (lhs, rhs) = robertson_check(&r, &h, &psi).unwrap();
        assert!(lhs >= rhs - 1e-10, "Robertson violated: {lhs} < {rhs}");
    }
    println!("[PASS] C9 Ehrenfest/Robertson numerics: 500 triples");
}

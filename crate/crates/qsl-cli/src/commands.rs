//! Subcommand implementations.
//!
//! Exit-code contract: 0 on success (including a hitting search that
//! legitimately found nothing), 1 when a self-check invariant fails, 2 for
//! usage and validation errors. Validation diagnostics go to stderr.

use std::path::Path;
use std::process::ExitCode;

use qsl_core::bounds::{
    bhattacharyya_time, general_transition_bound, mt_envelope, offset_bound, orthogonal_bound,
    BoundReport,
};
use qsl_core::eta::{
    eta_general, eta_orthogonal, grade_run, ControlRun, EtaReport, FIDELITY_THRESHOLD_DEFAULT,
};
use qsl_core::farhi_gutmann::FgModel;
use qsl_core::linalg::inner_product;
use qsl_core::propagation::{
    evolve, first_hitting_time_with_grid, scan_probability, HitMode, HITTING_GRID_POINTS,
};
use qsl_core::quantum::{is_stationary, std_dev, PhysicalConstants, QuantumState};
use qsl_core::selfcheck::run_all;

use crate::emit::{fmt_f64, fmt_opt_f64, json_escape};
use crate::problem::{parse_problem, parse_runs, ParsedRecord, ProblemFile, RunRecord};
use crate::{BoundKindArg, EtaKindArg};

pub type CmdResult = Result<ExitCode, String>;

fn load_problem(path: &Path) -> Result<ProblemFile, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read problem file {}: {e}", path.display()))?;
    parse_problem(&text)
}

fn resolve_constants(flag: Option<f64>, file: Option<f64>) -> Result<PhysicalConstants, String> {
    match flag.or(file) {
        Some(hbar) => PhysicalConstants::new(hbar).map_err(|e| e.to_string()),
        None => Ok(PhysicalConstants::natural()),
    }
}

fn delta_h_on_initial(problem: &ProblemFile) -> Result<f64, String> {
    let dh = std_dev(&problem.hamiltonian, &problem.initial_state).map_err(|e| e.to_string())?;
    if is_stationary(dh, problem.hamiltonian.matrix().frobenius_norm()) {
        return Err(
            "initial state is stationary (zero energy uncertainty); no transition bound applies"
                .to_string(),
        );
    }
    Ok(dh)
}

fn resolve_t_max(
    flag: Option<f64>,
    problem: &ProblemFile,
    k: &PhysicalConstants,
) -> Result<f64, String> {
    if let Some(t) = flag.or(problem.t_max) {
        if !t.is_finite() || t <= 0.0 {
            return Err(format!("`t_max` must be finite and positive, got {t}"));
        }
        return Ok(t);
    }
    let dh = delta_h_on_initial(problem)?;
    Ok(4.0 * std::f64::consts::FRAC_PI_2 * k.hbar() / dh)
}

fn resolve_grid(flag: Option<usize>, problem: &ProblemFile) -> Result<usize, String> {
    let grid = flag.or(problem.grid_points).unwrap_or(HITTING_GRID_POINTS);
    if grid < 2 {
        return Err(format!("`grid` must be at least 2, got {grid}"));
    }
    Ok(grid)
}

fn require_target<'a>(problem: &'a ProblemFile, context: &str) -> Result<&'a QuantumState, String> {
    problem
        .target_state
        .as_ref()
        .ok_or_else(|| format!("missing field `target_state` (required for {context})"))
}

fn print_bound(report: &BoundReport) {
    println!(
        "{{\"kind\":\"{}\",\"t_min\":{},\"delta_h\":{},\"hbar\":{}}}",
        report.kind().as_str(),
        fmt_f64(report.t_min()),
        fmt_f64(report.delta_h()),
        fmt_f64(report.hbar()),
    );
}

pub fn cmd_bound(
    path: &Path,
    kind: BoundKindArg,
    level: Option<f64>,
    hbar: Option<f64>,
) -> CmdResult {
    let problem = load_problem(path)?;
    let k = resolve_constants(hbar, problem.hbar)?;
    let dh = delta_h_on_initial(&problem)?;

    let report = match kind {
        BoundKindArg::Orthogonal => orthogonal_bound(dh, &k),
        BoundKindArg::Bhattacharyya => {
            let p = level.or(problem.level).ok_or_else(|| {
                "missing field `level` (required for --kind bhattacharyya)".to_string()
            })?;
            bhattacharyya_time(dh, p, &k)
        }
        BoundKindArg::Offset => {
            let target = require_target(&problem, "--kind offset")?;
            let phi = inner_product(target.amplitudes(), problem.initial_state.amplitudes())
                .map_err(|e| e.to_string())?
                .norm()
                .clamp(0.0, 1.0)
                .acos();
            offset_bound(dh, phi, &k)
        }
        BoundKindArg::General => {
            let target = require_target(&problem, "--kind general")?;
            general_transition_bound(&problem.initial_state, target, dh, &k)
        }
    }
    .map_err(|e| e.to_string())?;

    print_bound(&report);
    Ok(ExitCode::SUCCESS)
}

pub fn cmd_evolve(
    path: &Path,
    t: Option<f64>,
    csv: Option<&Path>,
    t_max: Option<f64>,
    grid: Option<usize>,
    hbar: Option<f64>,
) -> CmdResult {
    let problem = load_problem(path)?;
    let k = resolve_constants(hbar, problem.hbar)?;

    match (t, csv) {
        (Some(t), None) => {
            if !t.is_finite() || t < 0.0 {
                return Err(format!("`t` must be finite and non-negative, got {t}"));
            }
            let state = evolve(&problem.hamiltonian, &problem.initial_state, t, &k)
                .map_err(|e| e.to_string())?;
            let amplitudes: Vec<String> = state
                .amplitudes()
                .entries()
                .iter()
                .map(|z| format!("[{},{}]", fmt_f64(z.re), fmt_f64(z.im)))
                .collect();
            println!(
                "{{\"t\":{},\"state\":[{}]}}",
                fmt_f64(t),
                amplitudes.join(",")
            );
            Ok(ExitCode::SUCCESS)
        }
        (None, Some(csv_path)) => {
            let target = require_target(&problem, "series mode")?;
            let t_max = resolve_t_max(t_max, &problem, &k)?;
            let grid = resolve_grid(grid, &problem)?;
            let dh =
                std_dev(&problem.hamiltonian, &problem.initial_state).map_err(|e| e.to_string())?;

            let target_series = scan_probability(
                &problem.hamiltonian,
                &problem.initial_state,
                target,
                t_max,
                grid,
                &k,
            )
            .map_err(|e| e.to_string())?;
            let survival_series = scan_probability(
                &problem.hamiltonian,
                &problem.initial_state,
                &problem.initial_state,
                t_max,
                grid,
                &k,
            )
            .map_err(|e| e.to_string())?;

            let mut out = String::from("t,p_target,p_survival,mt_envelope\n");
            for ((t_i, p_target), (_, p_survival)) in
                target_series.iter().zip(survival_series.iter())
            {
                let envelope = match mt_envelope(dh, t_i, &k) {
                    Ok(v) => fmt_f64(v),
                    Err(_) => String::new(),
                };
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_f64(t_i),
                    fmt_f64(p_target),
                    fmt_f64(p_survival),
                    envelope
                ));
            }
            std::fs::write(csv_path, out)
                .map_err(|e| format!("cannot write {}: {e}", csv_path.display()))?;
            Ok(ExitCode::SUCCESS)
        }
        (Some(_), Some(_)) => Err("pass either --t or --csv, not both".to_string()),
        (None, None) => Err("pass --t for a single time or --csv for a series".to_string()),
    }
}

pub fn cmd_hit(
    path: &Path,
    level: Option<f64>,
    t_max: Option<f64>,
    grid: Option<usize>,
    hbar: Option<f64>,
) -> CmdResult {
    let problem = load_problem(path)?;
    let k = resolve_constants(hbar, problem.hbar)?;
    let target = require_target(&problem, "hit")?;
    let level = level
        .or(problem.level)
        .ok_or_else(|| "missing field `level` (flag --level or problem key)".to_string())?;
    if !level.is_finite() || !(0.0..=1.0).contains(&level) {
        return Err(format!("`level` must lie in [0, 1], got {level}"));
    }
    let t_max = resolve_t_max(t_max, &problem, &k)?;
    let grid = resolve_grid(grid, &problem)?;

    // Level 0 asks when the transition probability vanishes.
    let mode = if level == 0.0 {
        HitMode::Vanish
    } else {
        HitMode::ReachLevel
    };
    let hit = first_hitting_time_with_grid(
        &problem.hamiltonian,
        &problem.initial_state,
        target,
        level,
        mode,
        t_max,
        grid,
        &k,
    )
    .map_err(|e| e.to_string())?;

    println!(
        "{{\"time\":{},\"achieved\":{},\"converged\":{}}}",
        fmt_opt_f64(hit.time),
        fmt_f64(hit.achieved),
        hit.converged
    );
    Ok(ExitCode::SUCCESS)
}

fn control_run_from_record(record: &RunRecord) -> Result<ControlRun, String> {
    match (record.t_cqs, record.achieved_fidelity) {
        (None, _) => Ok(ControlRun::non_converged()),
        (Some(t), Some(f)) => ControlRun::with_fidelity(t, f).map_err(|e| e.to_string()),
        // A bare timed record asserts the transition completed.
        (Some(t), None) => ControlRun::completed(t).map_err(|e| e.to_string()),
    }
}

fn print_eta_line(label: &str, report: &EtaReport) {
    println!(
        "{{\"label\":\"{}\",\"kind\":\"{}\",\"eta\":{},\"t_min\":{},\"t_cqs\":{},\"clamped\":{}}}",
        json_escape(label),
        report.kind.as_str(),
        fmt_f64(report.eta),
        fmt_f64(report.t_min),
        fmt_opt_f64(report.t_cqs),
        report.clamped
    );
}

pub fn cmd_eta(path: &Path, runs_path: &Path, kind: EtaKindArg, hbar: Option<f64>) -> CmdResult {
    let problem = load_problem(path)?;
    let k = resolve_constants(hbar, problem.hbar)?;
    let dh = delta_h_on_initial(&problem)?;
    if matches!(kind, EtaKindArg::Bhattacharyya | EtaKindArg::General) {
        require_target(&problem, "--kind bhattacharyya|general")?;
    }

    let runs_text = std::fs::read_to_string(runs_path)
        .map_err(|e| format!("cannot read runs file {}: {e}", runs_path.display()))?;
    let records = parse_runs(&runs_text)?;

    let mut graded = 0usize;
    let mut failed = 0usize;
    let mut converged = 0usize;
    let mut eta_sum = 0.0f64;

    for parsed in &records {
        let record = match parsed {
            ParsedRecord::Ok(r) => r,
            ParsedRecord::Err { index, detail } => {
                failed += 1;
                println!(
                    "{{\"index\":{index},\"error\":\"{}\"}}",
                    json_escape(detail)
                );
                continue;
            }
        };
        let run = match control_run_from_record(record) {
            Ok(run) => run,
            Err(detail) => {
                failed += 1;
                println!(
                    "{{\"label\":\"{}\",\"error\":\"{}\"}}",
                    json_escape(&record.label),
                    json_escape(&detail)
                );
                continue;
            }
        };
        let report = match kind {
            EtaKindArg::Orthogonal => eta_orthogonal(dh, &run, &k),
            EtaKindArg::General => eta_general(
                &problem.initial_state,
                problem.target_state.as_ref().expect("checked above"),
                dh,
                &run,
                &k,
            ),
            EtaKindArg::Bhattacharyya => grade_run(
                &problem.hamiltonian,
                &problem.initial_state,
                problem.target_state.as_ref().expect("checked above"),
                &run,
                FIDELITY_THRESHOLD_DEFAULT,
                &k,
            ),
        };
        match report {
            Ok(report) => {
                graded += 1;
                if run.converged() {
                    converged += 1;
                    eta_sum += report.eta;
                }
                print_eta_line(&record.label, &report);
            }
            Err(e) => {
                failed += 1;
                println!(
                    "{{\"label\":\"{}\",\"error\":\"{}\"}}",
                    json_escape(&record.label),
                    json_escape(&e.to_string())
                );
            }
        }
    }

    let mean = if converged > 0 {
        fmt_f64(eta_sum / converged as f64)
    } else {
        "null".to_string()
    };
    println!("{{\"count\":{graded},\"converged\":{converged},\"mean_eta\":{mean}}}");

    if !records.is_empty() && graded == 0 && failed > 0 {
        return Err(format!("all {failed} run records failed"));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn cmd_fg(e_a: f64, e_b: f64, s: f64, t_cqs: Option<f64>, hbar: Option<f64>) -> CmdResult {
    let k = resolve_constants(hbar, None)?;
    let model = FgModel::new(e_a, e_b, s).map_err(|e| e.to_string())?;
    let eta_field = match t_cqs {
        Some(t) => {
            let run = ControlRun::completed(t).map_err(|e| e.to_string())?;
            let report = qsl_core::eta::eta_fg(&model, &run, &k).map_err(|e| e.to_string())?;
            format!(",\"eta\":{}", fmt_f64(report.eta))
        }
        None => String::new(),
    };
    println!(
        "{{\"e\":{},\"x\":{},\"mu\":{},\"lambda\":{},\"p_max\":{},\"t_min\":{}{}}}",
        fmt_f64(model.e()),
        fmt_f64(model.x()),
        fmt_f64(model.mu()),
        fmt_f64(model.lambda()),
        fmt_f64(model.p_max()),
        fmt_f64(model.t_min(&k)),
        eta_field
    );
    Ok(ExitCode::SUCCESS)
}

pub fn cmd_check(seed: u64, cases: usize) -> CmdResult {
    if cases == 0 {
        return Err("`--cases` must be at least 1".to_string());
    }
    let outcomes = run_all(seed, cases);
    let mut failures = 0usize;
    for outcome in &outcomes {
        if outcome.ok() {
            println!("ok {}: {}/{}", outcome.name, outcome.passed, outcome.cases);
        } else {
            failures += 1;
            println!(
                "FAIL {}: {}/{} ({})",
                outcome.name,
                outcome.passed,
                outcome.cases,
                outcome.failure.as_deref().unwrap_or("no detail")
            );
        }
    }
    if failures == 0 {
        println!(
            "self-check passed: {} suites, seed {seed}, cases {cases}",
            outcomes.len()
        );
        Ok(ExitCode::SUCCESS)
    } else {
        println!(
            "self-check FAILED: {failures} of {} suites, seed {seed}, cases {cases}",
            outcomes.len()
        );
        Ok(ExitCode::from(1))
    }
}

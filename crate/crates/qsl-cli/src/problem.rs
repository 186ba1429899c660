//! Strict parsing of problem and runs files.
//!
//! A problem file is a JSON object with exactly the keys `hamiltonian`,
//! `initial_state`, `target_state`, `hbar`, `t_max`, `grid_points` and
//! `level`; complex numbers are `[re, im]` pairs. Optional keys are omitted,
//! never null, and unknown keys are rejected. Hermiticity and normalization
//! are validated on load.

use serde_json::Value;

use qsl_core::linalg::{ComplexMatrix, ComplexVector};
use qsl_core::quantum::{Observable, QuantumState};
use qsl_core::Complex64;

#[derive(Debug)]
pub struct ProblemFile {
    pub hamiltonian: Observable,
    pub initial_state: QuantumState,
    pub target_state: Option<QuantumState>,
    pub hbar: Option<f64>,
    pub t_max: Option<f64>,
    pub grid_points: Option<usize>,
    pub level: Option<f64>,
}

const PROBLEM_KEYS: &[&str] = &[
    "hamiltonian",
    "initial_state",
    "target_state",
    "hbar",
    "t_max",
    "grid_points",
    "level",
];

pub fn parse_problem(text: &str) -> Result<ProblemFile, String> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| format!("problem file is not valid JSON: {e}"))?;
    let obj = root
        .as_object()
        .ok_or_else(|| "problem file must be a JSON object".to_string())?;

    for key in obj.keys() {
        if !PROBLEM_KEYS.contains(&key.as_str()) {
            return Err(format!("unknown key `{key}` in problem file"));
        }
    }
    for (key, value) in obj.iter() {
        if value.is_null() {
            return Err(format!("key `{key}` must be omitted rather than null"));
        }
    }

    let ham_value = obj
        .get("hamiltonian")
        .ok_or_else(|| "missing field `hamiltonian`".to_string())?;
    let matrix = parse_matrix(ham_value, "hamiltonian")?;
    if matrix.rows() != matrix.cols() {
        return Err(format!(
            "`hamiltonian` must be square, got {}x{}",
            matrix.rows(),
            matrix.cols()
        ));
    }
    let hamiltonian = Observable::new(matrix)
        .map_err(|e| format!("`hamiltonian` is not a valid observable: {e}"))?;
    let dim = hamiltonian.dim();

    let initial_value = obj
        .get("initial_state")
        .ok_or_else(|| "missing field `initial_state`".to_string())?;
    let initial_state = parse_state(initial_value, "initial_state", dim)?;

    let target_state = obj
        .get("target_state")
        .map(|v| parse_state(v, "target_state", dim))
        .transpose()?;

    let hbar = obj
        .get("hbar")
        .map(|v| parse_positive_number(v, "hbar"))
        .transpose()?;
    let t_max = obj
        .get("t_max")
        .map(|v| parse_positive_number(v, "t_max"))
        .transpose()?;
    let grid_points = obj.get("grid_points").map(parse_grid_points).transpose()?;
    let level = obj
        .get("level")
        .map(|v| parse_probability(v, "level"))
        .transpose()?;

    Ok(ProblemFile {
        hamiltonian,
        initial_state,
        target_state,
        hbar,
        t_max,
        grid_points,
        level,
    })
}

fn parse_complex_pair(value: &Value, context: &str) -> Result<Complex64, String> {
    let pair = value
        .as_array()
        .ok_or_else(|| format!("{context}: complex numbers are [re, im] pairs"))?;
    if pair.len() != 2 {
        return Err(format!(
            "{context}: complex numbers are [re, im] pairs, got {} entries",
            pair.len()
        ));
    }
    let re = pair[0]
        .as_f64()
        .ok_or_else(|| format!("{context}: non-numeric real part"))?;
    let im = pair[1]
        .as_f64()
        .ok_or_else(|| format!("{context}: non-numeric imaginary part"))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(format!("{context}: non-finite component"));
    }
    Ok(Complex64::new(re, im))
}

fn parse_matrix(value: &Value, field: &str) -> Result<ComplexMatrix, String> {
    let rows = value
        .as_array()
        .ok_or_else(|| format!("`{field}` must be an array of rows"))?;
    if rows.is_empty() {
        return Err(format!("`{field}` must not be empty"));
    }
    let mut parsed: Vec<Vec<Complex64>> = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let entries = row
            .as_array()
            .ok_or_else(|| format!("`{field}` row {i} must be an array"))?;
        if entries.len() != rows.len() {
            return Err(format!(
                "`{field}` row {i} has {} entries, expected {}",
                entries.len(),
                rows.len()
            ));
        }
        let mut out = Vec::with_capacity(entries.len());
        for (j, entry) in entries.iter().enumerate() {
            out.push(parse_complex_pair(entry, &format!("`{field}`[{i}][{j}]"))?);
        }
        parsed.push(out);
    }
    ComplexMatrix::from_rows(&parsed).map_err(|e| format!("`{field}`: {e}"))
}

fn parse_state(value: &Value, field: &str, dim: usize) -> Result<QuantumState, String> {
    let entries = value
        .as_array()
        .ok_or_else(|| format!("`{field}` must be an array of [re, im] pairs"))?;
    if entries.len() != dim {
        return Err(format!(
            "`{field}` has dimension {}, expected {dim} to match the hamiltonian",
            entries.len()
        ));
    }
    let mut amplitudes = Vec::with_capacity(entries.len());
    for (i, entry) in entries.iter().enumerate() {
        amplitudes.push(parse_complex_pair(entry, &format!("`{field}`[{i}]"))?);
    }
    let vector = ComplexVector::new(amplitudes).map_err(|e| format!("`{field}`: {e}"))?;
    QuantumState::new(vector).map_err(|e| format!("`{field}`: {e}"))
}

fn parse_positive_number(value: &Value, field: &str) -> Result<f64, String> {
    let x = value
        .as_f64()
        .ok_or_else(|| format!("`{field}` must be a number"))?;
    if !x.is_finite() || x <= 0.0 {
        return Err(format!("`{field}` must be finite and positive, got {x}"));
    }
    Ok(x)
}

fn parse_probability(value: &Value, field: &str) -> Result<f64, String> {
    let x = value
        .as_f64()
        .ok_or_else(|| format!("`{field}` must be a number"))?;
    if !x.is_finite() || !(0.0..=1.0).contains(&x) {
        return Err(format!("`{field}` must lie in [0, 1], got {x}"));
    }
    Ok(x)
}

fn parse_grid_points(value: &Value) -> Result<usize, String> {
    let n = value
        .as_u64()
        .ok_or_else(|| "`grid_points` must be a non-negative integer".to_string())?;
    if n < 2 {
        return Err(format!("`grid_points` must be at least 2, got {n}"));
    }
    Ok(n as usize)
}

/// One record in a runs file: a label, the elapsed time (null when the
/// controller never converged) and optionally the fidelity it achieved.
#[derive(Debug)]
pub struct RunRecord {
    pub label: String,
    pub t_cqs: Option<f64>,
    pub achieved_fidelity: Option<f64>,
}

/// Per-record parse outcome, in input order.
pub enum ParsedRecord {
    Ok(RunRecord),
    Err { index: usize, detail: String },
}

pub fn parse_runs(text: &str) -> Result<Vec<ParsedRecord>, String> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| format!("runs file is not valid JSON: {e}"))?;
    let records = root
        .as_array()
        .ok_or_else(|| "runs file must be a JSON array of records".to_string())?;
    Ok(records
        .iter()
        .enumerate()
        .map(|(index, record)| match parse_run_record(record) {
            Ok(r) => ParsedRecord::Ok(r),
            Err(detail) => ParsedRecord::Err { index, detail },
        })
        .collect())
}

fn parse_run_record(value: &Value) -> Result<RunRecord, String> {
    let obj = value
        .as_object()
        .ok_or_else(|| "record must be a JSON object".to_string())?;
    for key in obj.keys() {
        if !["label", "t_cqs", "achieved_fidelity"].contains(&key.as_str()) {
            return Err(format!("unknown key `{key}` in run record"));
        }
    }
    let label = obj
        .get("label")
        .ok_or_else(|| "missing field `label`".to_string())?
        .as_str()
        .ok_or_else(|| "`label` must be a string".to_string())?
        .to_string();
    let t_cqs = match obj.get("t_cqs") {
        None => return Err("missing field `t_cqs` (use null for non-converged runs)".to_string()),
        Some(Value::Null) => None,
        Some(v) => Some(parse_positive_number(v, "t_cqs")?),
    };
    let achieved_fidelity = match obj.get("achieved_fidelity") {
        None => None,
        Some(Value::Null) => {
            return Err("`achieved_fidelity` must be omitted rather than null".to_string())
        }
        Some(v) => Some(parse_probability(v, "achieved_fidelity")?),
    };
    Ok(RunRecord {
        label,
        t_cqs,
        achieved_fidelity,
    })
}

//! Dense complex linear algebra for small operators.
//!
//! Everything here targets operator dimensions in the single or low double
//! digits: storage is a flat row-major `Vec<Complex64>`, and the Hermitian
//! eigensolver is a cyclic Jacobi sweep, which is simple, deterministic and
//! accurate at these sizes.

use num_complex::Complex64;

use crate::error::{QslError, Result};

/// Default entrywise tolerance for accepting a matrix as Hermitian.
///
/// Inputs frequently come from hand-written JSON, so asymmetries at the level
/// of decimal rounding must pass.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

const MAX_JACOBI_SWEEPS: usize = 64;

/// Dense complex vector; the coordinate carrier for kets.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    /// Build a vector, rejecting empty or non-finite input.
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(QslError::Empty);
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(QslError::NonFinite {
                context: "vector entry",
            });
        }
        Ok(Self { entries })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    /// Computational basis vector `e_index` of the given dimension.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(QslError::Empty);
        }
        if index >= dim {
            return Err(QslError::invalid(
                "index",
                format!("basis index {index} out of range for dimension {dim}"),
            ));
        }
        let mut entries = vec![Complex64::ZERO; dim];
        entries[index] = Complex64::ONE;
        Ok(Self { entries })
    }

    pub(crate) fn from_raw(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.entries[i]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Returns `self / ||self||`, or an error when the norm vanishes.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= 1e-300 {
            return Err(QslError::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }
}

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(QslError::DimensionMismatch { left, right });
    }
    Ok(())
}

/// Inner product `<x|y>`, conjugate-linear in the first argument.
pub fn inner_product(x: &ComplexVector, y: &ComplexVector) -> Result<Complex64> {
    check_dims(x.dim(), y.dim())?;
    Ok(x.entries
        .iter()
        .zip(&y.entries)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Outer product `|x><y|`.
pub fn outer_product(x: &ComplexVector, y: &ComplexVector) -> ComplexMatrix {
    let rows = x.dim();
    let cols = y.dim();
    let mut entries = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            entries.push(x.entries[i] * y.entries[j].conj());
        }
    }
    ComplexMatrix {
        entries,
        rows,
        cols,
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    entries: Vec<Complex64>,
    rows: usize,
    cols: usize,
}

impl ComplexMatrix {
    pub fn new(entries: Vec<Complex64>, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(QslError::Empty);
        }
        if entries.len() != rows * cols {
            return Err(QslError::invalid(
                "entries",
                format!(
                    "expected {} entries for {rows}x{cols}, got {}",
                    rows * cols,
                    entries.len()
                ),
            ));
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(QslError::NonFinite {
                context: "matrix entry",
            });
        }
        Ok(Self {
            entries,
            rows,
            cols,
        })
    }

    /// Build from nested rows; all rows must share one length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(QslError::Empty);
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(QslError::invalid("rows", "ragged rows"));
        }
        Self::new(rows.concat(), rows.len(), cols)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let converted: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&converted)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            entries: vec![Complex64::ZERO; rows * cols],
            rows,
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(QslError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * factor).collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
            rows: self.rows,
            cols: self.cols,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
            rows: self.rows,
            cols: self.cols,
        })
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(QslError::DimensionMismatch {
                left: self.rows * self.cols,
                right: other.rows * other.cols,
            });
        }
        Ok(())
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        check_dims(self.cols, v.dim())?;
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = Complex64::ZERO;
            for j in 0..self.cols {
                acc += self.get(i, j) * v.entries[j];
            }
            out.push(acc);
        }
        Ok(ComplexVector::from_raw(out))
    }

    pub fn mul_mat(&self, other: &Self) -> Result<Self> {
        check_dims(self.cols, other.rows)?;
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + a * other.get(k, j));
                }
            }
        }
        Ok(out)
    }

    /// Largest entrywise modulus.
    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::from_raw((0..self.rows).map(|i| self.get(i, j)).collect())
    }
}

/// True iff `max |M - M†|` entrywise is at most `tol`.
pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    if !m.is_square() {
        return Err(QslError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(QslError::invalid("tol", "tolerance must be positive"));
    }
    Ok(hermiticity_deviation(m) <= tol)
}

/// `max |M - M†|` entrywise; assumes a square matrix.
pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.rows;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (m.get(i, j) - m.get(j, i).conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// an orthonormal eigenvector per column.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Matrix whose columns are the eigenvectors, ordered like `eigenvalues`.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(lambda) V†`; used to verify reconstruction accuracy.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            for i in 0..n {
                let v = scaled.get(i, j);
                scaled.set(i, j, v * self.eigenvalues[j]);
            }
        }
        scaled
            .mul_mat(&self.eigenvectors.adjoint())
            .expect("square shapes agree")
    }
}

/// Diagonalize a Hermitian matrix with cyclic Jacobi rotations.
///
/// Eigenvalues come back sorted ascending; exact ties keep the order the
/// sweep produced. Output is deterministic for identical input.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    eig_hermitian_with_tolerance(m, HERMITICITY_TOLERANCE)
}

pub fn eig_hermitian_with_tolerance(m: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(QslError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let deviation = hermiticity_deviation(m);
    if deviation > tol {
        return Err(QslError::NotHermitian {
            deviation,
            tolerance: tol,
        });
    }

    let n = m.rows;
    // Work on the Hermitian average so sub-tolerance asymmetry cannot leak in.
    let mut a = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (m.get(i, j) + m.get(j, i).conj());
        }
    }
    let mut v = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::ONE;
    }

    let scale = {
        let fro: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        fro.max(f64::MIN_POSITIVE)
    };
    let target = 1e-14 * scale;

    let mut converged = false;
    let mut last_off = f64::INFINITY;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    s += 2.0 * a[p * n + q].norm_sqr();
                }
            }
            s.sqrt()
        };
        last_off = off;
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, n, p, q);
            }
        }
    }
    if !converged {
        return Err(QslError::NoConvergence {
            sweeps: MAX_JACOBI_SWEEPS,
            off_norm: last_off,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, col, v[row * n + src]);
        }
    }

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: vectors,
    })
}

/// One Jacobi rotation zeroing the (p, q) off-diagonal element in place.
fn jacobi_rotate(a: &mut [Complex64], v: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let abs_apq = apq.norm();
    if abs_apq == 0.0 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let phase = apq / abs_apq;

    // tan(theta) chosen as the small root of t^2 - 2*tau*t - 1 = 0, which
    // zeroes the rotated (p, q) entry.
    let tau = (aqq - app) / (2.0 * abs_apq);
    let sign = if tau < 0.0 { -1.0 } else { 1.0 };
    let t = -sign / (tau.abs() + (tau * tau + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let new_app = c * c * app + 2.0 * c * s * abs_apq + s * s * aqq;
    let new_aqq = s * s * app - 2.0 * c * s * abs_apq + c * c * aqq;
    a[p * n + p] = Complex64::new(new_app, 0.0);
    a[q * n + q] = Complex64::new(new_aqq, 0.0);
    a[p * n + q] = Complex64::ZERO;
    a[q * n + p] = Complex64::ZERO;

    let s_conj_phase = phase.conj() * s;
    let s_phase = phase * s;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_akp = akp * c + akq * s_conj_phase;
        let new_akq = -akp * s_phase + akq * c;
        a[k * n + p] = new_akp;
        a[k * n + q] = new_akq;
        a[p * n + k] = new_akp.conj();
        a[q * n + k] = new_akq.conj();
    }
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * c + vkq * s_conj_phase;
        v[k * n + q] = -vkp * s_phase + vkq * c;
    }
}

/// Apply a scalar function to a Hermitian matrix through its spectrum,
/// returning `V diag(f(lambda)) V†`.
pub fn spectral_function<F>(m: &ComplexMatrix, f: F) -> Result<ComplexMatrix>
where
    F: Fn(f64) -> Complex64,
{
    let eig = eig_hermitian(m)?;
    let n = eig.dim();
    let mut scaled = eig.eigenvectors.clone();
    for j in 0..n {
        let fj = f(eig.eigenvalues[j]);
        for i in 0..n {
            let v = scaled.get(i, j);
            scaled.set(i, j, v * fj);
        }
    }
    scaled.mul_mat(&eig.eigenvectors.adjoint())
}

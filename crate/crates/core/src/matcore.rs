//! Dense complex matrices for states and measurement effects.
//!
//! Everything here is sized for the small systems the instrumental scenario
//! needs (local dimension up to ~8, joint dimension up to 64). Storage is
//! row-major; there is no sparsity and no BLAS.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tolerances::TOL;

/// Largest matrix dimension accepted by the Jacobi eigenvalue routine.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("trace has non-negligible imaginary part {0:.3e}")]
    ImaginaryResidue(f64),
    #[error("matrix rows have unequal lengths")]
    Ragged,
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("dimension {0} exceeds the supported maximum {MAX_DIM}")]
    TooLarge(usize),
}

/// Which factor of a bipartite system to keep in [`partial_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HermitianCheckReport {
    pub is_hermitian: bool,
    pub is_psd: bool,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::default(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(1.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, MatError> {
        if data.len() != rows * cols {
            return Err(MatError::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MatError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a real matrix from row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self, MatError> {
        Self::from_vec(rows, cols, entries.iter().map(|&x| c(x)).collect())
    }

    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = c(x);
        }
        m
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn pauli_y() -> Self {
        let i = Complex64::i();
        Self::from_vec(2, 2, vec![c(0.0), -i, i, c(0.0)]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::diag(&[1.0, -1.0])
    }

    /// `|v><v|` for a (not necessarily normalized) ket.
    pub fn projector(ket: &[Complex64]) -> Self {
        let n = ket.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = ket[i] * ket[j].conj();
            }
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

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    /// Plain transpose (no conjugation).
    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, MatError> {
        if self.cols != other.rows {
            return Err(MatError::DimensionMismatch {
                expected: format!("{} rows", self.cols),
                found: format!("{} rows", other.rows),
            });
        }
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::default() {
                    continue;
                }
                for j in 0..other.cols {
                    m.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(m)
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= TOL.hermitian
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>, MatError> {
        if !self.is_square() {
            return Err(MatError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.rows > MAX_DIM {
            return Err(MatError::TooLarge(self.rows));
        }
        let defect = self.hermiticity_defect();
        if defect > TOL.hermitian {
            return Err(MatError::NotHermitian(defect));
        }
        // H = X + iY is Hermitian iff [[X, -Y], [Y, X]] is real symmetric; the
        // real embedding carries every eigenvalue of H twice.
        let n = self.rows;
        let m = 2 * n;
        let mut s = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                let z = self[(i, j)];
                s[i * m + j] = z.re;
                s[(i + n) * m + (j + n)] = z.re;
                s[i * m + (j + n)] = -z.im;
                s[(i + n) * m + j] = z.im;
            }
        }
        let mut eig = jacobi_symmetric(&mut s, m);
        eig.sort_by(|a, b| a.total_cmp(b));
        Ok(eig.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
    }
}

/// Cyclic Jacobi sweeps on a real symmetric `n x n` matrix stored row-major.
/// Returns the diagonal after convergence.
fn jacobi_symmetric(a: &mut [f64], n: usize) -> Vec<f64> {
    let scale: f64 = a
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = cs * akp - sn * akq;
                    a[k * n + q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = cs * apk - sn * aqk;
                    a[q * n + k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of bounds"
        );
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// JSON form: rows of `[re, im]` pairs.
impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| [self[(i, j)].re, self[(i, j)].im])
                    .collect()
            })
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(serde::de::Error::custom(MatError::Ragged));
        }
        let data = rows
            .into_iter()
            .flatten()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::from_vec(n_rows, n_cols, data).map_err(serde::de::Error::custom)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    m[(i * b.rows + k, j * b.cols + l)] = x * b[(k, l)];
                }
            }
        }
    }
    m
}

/// Reduced matrix of a bipartite operator on `C^{d_A} ⊗ C^{d_B}`.
pub fn partial_trace(
    m: &ComplexMatrix,
    (d_a, d_b): (usize, usize),
    keep: Subsystem,
) -> Result<ComplexMatrix, MatError> {
    let n = d_a * d_b;
    if m.rows != n || m.cols != n {
        return Err(MatError::DimensionMismatch {
            expected: format!("{n}x{n}"),
            found: format!("{}x{}", m.rows, m.cols),
        });
    }
    let out = match keep {
        Subsystem::B => {
            let mut r = ComplexMatrix::zeros(d_b, d_b);
            for i in 0..d_b {
                for j in 0..d_b {
                    r[(i, j)] = (0..d_a).map(|k| m[(k * d_b + i, k * d_b + j)]).sum();
                }
            }
            r
        }
        Subsystem::A => {
            let mut r = ComplexMatrix::zeros(d_a, d_a);
            for i in 0..d_a {
                for j in 0..d_a {
                    r[(i, j)] = (0..d_b).map(|k| m[(i * d_b + k, j * d_b + k)]).sum();
                }
            }
            r
        }
    };
    Ok(out)
}

/// `Tr[operator · state]`, which must be real for Hermitian inputs.
pub fn expectation(operator: &ComplexMatrix, state: &ComplexMatrix) -> Result<f64, MatError> {
    if !operator.is_square() || operator.rows != state.cols || operator.cols != state.rows {
        return Err(MatError::DimensionMismatch {
            expected: format!("{}x{}", state.cols, state.rows),
            found: format!("{}x{}", operator.rows, operator.cols),
        });
    }
    // Tr[AB] = sum_ij A_ij B_ji without forming the product.
    let n = operator.rows;
    let mut t = Complex64::default();
    for i in 0..n {
        for j in 0..n {
            t += operator.data[i * n + j] * state.data[j * n + i];
        }
    }
    let scale = t.re.abs().max(1.0);
    if t.im.abs() > TOL.imaginary * scale {
        return Err(MatError::ImaginaryResidue(t.im));
    }
    Ok(t.re)
}

/// Closed-form eigen-decomposition of a 2x2 Hermitian matrix.
///
/// Eigenvalues come back in descending order with unit eigenvectors.
pub fn eig2_hermitian(m: &ComplexMatrix) -> Result<([f64; 2], [[Complex64; 2]; 2]), MatError> {
    if m.rows != 2 || m.cols != 2 {
        return Err(MatError::DimensionMismatch {
            expected: "2x2".into(),
            found: format!("{}x{}", m.rows, m.cols),
        });
    }
    let defect = m.hermiticity_defect();
    if defect > TOL.hermitian {
        return Err(MatError::NotHermitian(defect));
    }
    // m = t I + (x σx + y σy + z σz)
    let t = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let z = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
    let off = m[(1, 0)];
    let (x, y) = (off.re, off.im);
    let r = (x * x + y * y + z * z).sqrt();
    let vals = [t + r, t - r];
    let vecs = if r <= 1e-300 {
        [[c(1.0), c(0.0)], [c(0.0), c(1.0)]]
    } else {
        [bloch_eigvec(x, y, z, r), bloch_eigvec(-x, -y, -z, r)]
    };
    Ok((vals, vecs))
}

/// +1 eigenvector of `(x σx + y σy + z σz)/r`.
fn bloch_eigvec(x: f64, y: f64, z: f64, r: f64) -> [Complex64; 2] {
    let (nx, ny, nz) = (x / r, y / r, z / r);
    if nz >= 0.0 {
        let a = ((1.0 + nz) / 2.0).sqrt();
        let b = Complex64::new(nx, ny) / (2.0 * a);
        [c(a), b]
    } else {
        let b = ((1.0 - nz) / 2.0).sqrt();
        let a = Complex64::new(nx, -ny) / (2.0 * b);
        [a, c(b)]
    }
}

/// Hermiticity, positivity and trace of a square matrix.
pub fn check_density(m: &ComplexMatrix) -> HermitianCheckReport {
    let trace = m.trace().re;
    if !m.is_square() || !m.is_hermitian() {
        return HermitianCheckReport {
            is_hermitian: false,
            is_psd: false,
            trace,
            min_eigenvalue: f64::NAN,
        };
    }
    match m.hermitian_eigenvalues() {
        Ok(eig) => {
            let min = eig.first().copied().unwrap_or(0.0);
            HermitianCheckReport {
                is_hermitian: true,
                is_psd: min >= -TOL.psd,
                trace,
                min_eigenvalue: min,
            }
        }
        Err(_) => HermitianCheckReport {
            is_hermitian: true,
            is_psd: false,
            trace,
            min_eigenvalue: f64::NAN,
        },
    }
}

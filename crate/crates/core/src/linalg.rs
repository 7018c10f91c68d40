//! Dense complex linear algebra sized for small quantum systems.
//!
//! Storage is row-major throughout, and tensor products use big-endian
//! indexing: the first tensor factor is the most significant digit of a
//! flat index. Every operation here is a pure function over immutable
//! values.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Complex scalar used everywhere in the crate.
pub type C64 = Complex64;

/// Absolute tolerance for operator identities.
pub const OPERATOR_TOL: f64 = 1e-10;
/// Absolute tolerance for state norms.
pub const NORM_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 80;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },
    #[error("non-finite entry encountered")]
    NonFinite,
    #[error("state vector norm {norm} differs from 1")]
    NotNormalized { norm: f64 },
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("invalid factor selection: {0}")]
    InvalidFactors(String),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// `exp(2πi k / d)`, with `k` reduced modulo `d` before evaluation so that
/// equal phases are bit-identical.
pub fn root_of_unity(d: usize, k: i64) -> C64 {
    let d_i = d as i64;
    let k = k.rem_euclid(d_i);
    if k == 0 {
        return C64::new(1.0, 0.0);
    }
    // Exact values for the quarter turns keep the d = 2, 4 cases free of
    // rounding noise.
    if 4 * k == d_i {
        return C64::new(0.0, 1.0);
    }
    if 2 * k == d_i {
        return C64::new(-1.0, 0.0);
    }
    if 4 * k == 3 * d_i {
        return C64::new(0.0, -1.0);
    }
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64)
}

/// Dense complex matrix with row-major storage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::DimensionMismatch { expected: 1, found: 0 });
        }
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Builds a matrix from real entries given row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::new(r, c, data)
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |r, c| v[r] * v[c].conj())
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let lhs = &self.data[r * self.cols..(r + 1) * self.cols];
            let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for (k, &a) in lhs.iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let rhs = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in dst.iter_mut().zip(rhs) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry-wise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max entry-wise deviation from Hermiticity.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Max entry-wise deviation of `M†M` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let prod = self.adjoint().matmul(self).expect("square matrices always conform");
        prod.max_abs_diff(&Self::identity(self.rows)).expect("same shape")
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(())
    }

    fn require_square(&self) -> Result<usize> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.rows)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on non-conforming shapes; use [`ComplexMatrix::matmul`] for a
    /// fallible product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("non-conforming matrix product")
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| {
                    let z = self[(r, c)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Kronecker product; entry `(i_a·rows_b + i_b, j_a·cols_b + j_b)` equals
/// `a[i_a, j_a]·b[i_b, j_b]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows * b.rows, a.cols * b.cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    })
}

/// Kronecker product of two amplitude vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Big-endian strides: `stride[f] = ∏_{g>f} dims[g]`.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for f in (0..dims.len().saturating_sub(1)).rev() {
        s[f] = s[f + 1] * dims[f + 1];
    }
    s
}

/// Flat offsets of every multi-index over the selected factors, enumerated
/// in big-endian order of the selection.
fn factor_offsets(dims: &[usize], strides: &[usize], factors: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for &f in factors {
        offsets = offsets
            .iter()
            .flat_map(|&base| (0..dims[f]).map(move |i| base + i * strides[f]))
            .collect();
    }
    offsets
}

/// Reduced operator on the factors in `keep` (returned in ascending factor
/// order) obtained by tracing out all other factors of `rho`.
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let n = rho.require_square()?;
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: total,
        });
    }
    if keep.is_empty() {
        return Err(LinalgError::InvalidFactors("keep set is empty".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&f| f >= dims.len()) {
        return Err(LinalgError::InvalidFactors(format!(
            "keep {keep:?} is not a set of factor indices below {}",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|f| !kept.contains(f)).collect();
    let st = strides(dims);
    let kept_off = factor_offsets(dims, &st, &kept);
    let traced_off = factor_offsets(dims, &st, &traced);
    let k = kept_off.len();
    let mut out = ComplexMatrix::zeros(k, k);
    for (a, &oa) in kept_off.iter().enumerate() {
        for (b, &ob) in kept_off.iter().enumerate() {
            out[(a, b)] = traced_off.iter().map(|&t| rho[(oa + t, ob + t)]).sum();
        }
    }
    Ok(out)
}

/// Unit-norm state on a tensor product of factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Validating constructor: the norm must already be 1 within
    /// [`NORM_TOL`].
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        Self::check_layout(&dims, &amplitudes)?;
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(LinalgError::NotNormalized { norm });
        }
        Ok(Self { dims, amplitudes })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        Self::check_layout(&dims, &amplitudes)?;
        let norm = l2_norm(&amplitudes);
        if norm == 0.0 {
            return Err(LinalgError::ZeroVector);
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / norm).collect();
        Ok(Self { dims, amplitudes })
    }

    /// Computational basis vector `|index⟩` of a single factor of dimension `d`.
    pub fn basis(d: usize, index: usize) -> Result<Self> {
        if index >= d {
            return Err(LinalgError::DimensionMismatch {
                expected: d,
                found: index,
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); d];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self {
            dims: vec![d],
            amplitudes: amps,
        })
    }

    /// `(1/√d) Σ_j |j⟩`.
    pub fn uniform(d: usize) -> Self {
        let a = 1.0 / (d as f64).sqrt();
        Self {
            dims: vec![d],
            amplitudes: vec![C64::new(a, 0.0); d],
        }
    }

    fn check_layout(dims: &[usize], amplitudes: &[C64]) -> Result<()> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || total != amplitudes.len() {
            return Err(LinalgError::DimensionMismatch {
                expected: total,
                found: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            dims,
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    /// Applies a unitary acting on the full space; the result is
    /// renormalised so rounding drift never breaks the norm invariant.
    pub fn apply(&self, op: &ComplexMatrix) -> Result<Self> {
        if !op.is_square() || op.cols() != self.dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim(),
                found: op.cols(),
            });
        }
        let amps = op.mul_vec(&self.amplitudes)?;
        Self::normalized(self.dims.clone(), amps)
    }

    /// Reduced density operator on the kept factors.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<ComplexMatrix> {
        partial_trace(&self.projector(), &self.dims, keep)
    }

    /// Same amplitudes viewed with a different factor structure.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        Self::check_layout(&dims, &self.amplitudes)?;
        Ok(Self {
            dims,
            amplitudes: self.amplitudes.clone(),
        })
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenDecomposition {
    /// `QΛQ†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let q = &self.eigenvectors;
        let n = q.rows();
        ComplexMatrix::from_fn(n, n, |r, c| {
            self.eigenvalues
                .iter()
                .enumerate()
                .map(|(k, &l)| q[(r, k)] * q[(c, k)].conj() * l)
                .sum()
        })
    }

    /// `f(H) = Q f(Λ) Q†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mapped = Self {
            eigenvalues: self.eigenvalues.iter().map(|&l| f(l)).collect(),
            eigenvectors: self.eigenvectors.clone(),
        };
        mapped.reconstruct()
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// The input is symmetrised as `(H + H†)/2` after checking that its
/// asymmetry is below [`OPERATOR_TOL`].
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<HermitianEigenDecomposition> {
    let n = h.require_square()?;
    let asym = h.hermitian_defect();
    if asym > OPERATOR_TOL {
        return Err(LinalgError::NotHermitian { asymmetry: asym });
    }
    let mut a = ComplexMatrix::from_fn(n, n, |r, c| (h[(r, c)] + h[(c, r)].conj()) * 0.5);
    let mut q = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |c| (p, c)))
            .map(|(p, c)| a[(p, c)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                jacobi_rotate(&mut a, &mut q, p, r);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| q[(r, order[c])]);
    Ok(HermitianEigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Annihilates `a[p, q]` with the unitary `W = diag(1, e^{-iφ})·R(θ)` on
/// the (p, q) plane, where `a[p, q] = |g| e^{iφ}`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let g = a[(p, q)];
    let abs = g.norm();
    if abs == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if abs < 1e-300 || abs <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = g / abs;
    let tau = (aqq - app) / (2.0 * abs);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let w_pp = C64::new(c, 0.0);
    let w_pq = C64::new(s, 0.0);
    let w_qp = -phase.conj() * s;
    let w_qq = phase.conj() * c;

    let n = a.rows();
    // A ← A W
    for k in 0..n {
        let x = a[(k, p)];
        let y = a[(k, q)];
        a[(k, p)] = x * w_pp + y * w_qp;
        a[(k, q)] = x * w_pq + y * w_qq;
    }
    // A ← W† A
    for k in 0..n {
        let x = a[(p, k)];
        let y = a[(q, k)];
        a[(p, k)] = w_pp.conj() * x + w_qp.conj() * y;
        a[(q, k)] = w_pq.conj() * x + w_qq.conj() * y;
    }
    // Q ← Q W
    for k in 0..n {
        let x = v[(k, p)];
        let y = v[(k, q)];
        v[(k, p)] = x * w_pp + y * w_qp;
        v[(k, q)] = x * w_pq + y * w_qq;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

//! Dense complex matrices and the handful of operations the channel code needs.
//!
//! Index convention: a pair `(i, j)` of `d`-level indices is flattened as
//! `i * d + j` everywhere (vectorization, Kronecker products, reshuffling).
//! The reshuffle is sensitive to this choice, so it is fixed crate-wide.
//!
//! The Hermitian eigensolver is a cyclic complex Jacobi iteration. Matrices
//! here are at most `d^2 x d^2` with small `d`, and Jacobi is accurate to a
//! few ulps on every eigenvalue, which is what an oracle should be.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// An eigenvalue counts as negative only below `-NEGATIVITY_TOL`.
pub const NEGATIVITY_TOL: f64 = 1e-10;

/// Tolerance for the Hermiticity precondition of [`hermitian_eigs`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::BadShape {
                rows,
                cols,
                found: data.len(),
            });
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
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    /// Builds a real matrix from nested rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| {
            assert_eq!(rows[i].len(), c, "ragged rows");
            C64::new(rows[i][j], 0.0)
        })
    }

    pub fn column(v: &[C64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Rank-one projector `|v><v|` (not normalized).
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
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

    /// Side length of a square matrix.
    pub fn dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in dst.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    /// Largest entrywise modulus of `self - rhs`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - self^dagger`.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.max_off_diagonal() <= tol
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    m = m.max(self[(i, j)].norm());
                }
            }
        }
        m
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// `u * self * u^dagger`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim()?;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[(r, col)].norm().total_cmp(&a[(s, col)].norm()))
                .expect("non-empty range");
            if a[(pivot, col)].norm() <= 1e-14 * scale {
                return Err(Error::SingularMatrix);
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a[(col, col)].inv();
            for j in 0..n {
                a[(col, j)] *= p;
                inv[(col, j)] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let (ac, ic) = (a[(col, j)], inv[(col, j)]);
                    a[(r, j)] -= f * ac;
                    inv[(r, j)] -= f * ic;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r: usize, s: usize) {
        for j in 0..self.cols {
            self.data.swap(r * self.cols + j, s * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("inner dimensions must agree")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("shapes must agree")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("shapes must agree")
    }
}

/// Kronecker product; row index of the result is `i_a * rows_b + i_b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows, a.cols, b.rows, b.cols);
    ComplexMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// `|X>>` with component `i * d + j` equal to `X_ij`.
pub fn vectorize(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = x.dim()?;
    Ok(ComplexMatrix {
        rows: d * d,
        cols: 1,
        data: x.data.clone(),
    })
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = v.rows * v.cols;
    let d = exact_sqrt(n).ok_or(Error::NotPerfectSquare(n))?;
    Ok(ComplexMatrix {
        rows: d,
        cols: d,
        data: v.data.clone(),
    })
}

pub(crate) fn exact_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// Reshuffle of a `d^2 x d^2` matrix: `C[(i,j),(k,l)] = M[(i,k),(j,l)]`.
///
/// Maps a superoperator to its Choi matrix and back (it is an involution).
pub fn reshuffle(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.dim()?;
    let d = exact_sqrt(n).ok_or(Error::NotPerfectSquare(n))?;
    Ok(ComplexMatrix::from_fn(n, n, |row, col| {
        let (i, j) = (row / d, row % d);
        let (k, l) = (col / d, col % d);
        m[(i * d + k, j * d + l)]
    }))
}

/// Real spectrum of a Hermitian matrix, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub tolerance: f64,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Self {
            eigenvalues,
            tolerance: NEGATIVITY_TOL,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn abs_sum(&self) -> f64 {
        self.eigenvalues.iter().map(|x| x.abs()).sum()
    }

    pub fn has_negative(&self) -> bool {
        self.min() < -self.tolerance
    }

    /// Largest deviation between two spectra of equal length.
    pub fn max_deviation(&self, other: &Spectrum) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.eigenvalues
            .iter()
            .zip(&other.eigenvalues)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Eigenvalues (descending) with the matching eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V diag(f(lambda)) V^dagger`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * f(self.values[k]))
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = h.dim()?;
    let scale = h.max_abs().max(1.0);
    let dev = h.hermiticity_deviation();
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }
    // Symmetrize so round-off in the input cannot leak into the rotations.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (h[(i, j)] + h[(j, i)].conj()));
    let mut v = ComplexMatrix::identity(n);
    let total = a.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= f64::MIN_POSITIVE || g <= 1e-300 * total {
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, g);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let im = a[(i, i)].im;
        if im.abs() > 1e-10 * scale {
            return Err(Error::NotHermitian(im.abs()));
        }
    }
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigenDecomposition { values, vectors })
}

// One unitary rotation in the (p, q) plane that annihilates a[p][q].
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, apq: C64, g: f64) {
    let n = a.rows;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // phase that makes the (p, q) entry real and positive
    let phase = apq / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = diag(1, conj(phase)) * [[c, s], [-s, c]]
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigs(h: &ComplexMatrix) -> Result<Spectrum> {
    Ok(Spectrum::new(hermitian_eigen(h)?.values))
}

/// Sum of singular values. Hermitian inputs use `sum |lambda|`; others take
/// square roots of the eigenvalues of `A^dagger A`.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    a.dim()?;
    let scale = a.max_abs().max(1.0);
    if a.hermiticity_deviation() <= HERMITIAN_TOL * scale {
        return Ok(hermitian_eigs(a)?.abs_sum());
    }
    let gram = a.adjoint().matmul(a)?;
    Ok(hermitian_eigs(&gram)?
        .eigenvalues
        .iter()
        .map(|&x| x.max(0.0).sqrt())
        .sum())
}

/// Validation thresholds for [`DensityMatrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateTolerance {
    pub hermiticity: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl Default for StateTolerance {
    fn default() -> Self {
        Self {
            hermiticity: 1e-12,
            trace: 1e-12,
            min_eigenvalue: -1e-10,
        }
    }
}

/// A validated quantum state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, StateTolerance::default())
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: StateTolerance) -> Result<Self> {
        matrix.dim()?;
        let herm = matrix.hermiticity_deviation();
        if herm > tol.hermiticity {
            return Err(Error::InvalidState(format!(
                "Hermiticity deviation {herm:e}"
            )));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol.trace {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = hermitian_eigs(&matrix)?.min();
        if min < tol.min_eigenvalue {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(ComplexMatrix::outer(psi).scale_real(1.0 / norm2))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    /// Computational basis state `|k><k|`.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(k, k)] = C64::new(1.0, 0.0);
        Self { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// `D(r1, r2) = ||r1 - r2||_1 / 2`.
pub fn trace_distance(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    if r1.dim() != r2.dim() {
        return Err(Error::DimensionMismatch {
            expected: r1.dim(),
            found: r2.dim(),
        });
    }
    let diff = r1.matrix().try_sub(r2.matrix())?;
    Ok(0.5 * trace_norm(&diff)?)
}

//! Dense complex linear algebra for small Hermitian systems.
//!
//! Everything here targets desk-scale dimensions (n <= 8): storage is a flat
//! row-major `Vec<Complex64>`, the eigensolver is a cyclic complex Jacobi
//! iteration, and matrix exponentials go through the spectral decomposition.

use num_complex::Complex64;

/// Absolute tolerance for calling a matrix Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

const MAX_JACOBI_SWEEPS: usize = 60;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: max |M[a][b] - conj(M[b][a])| = {max_asymmetry:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { max_asymmetry: f64, tolerance: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for a in 0..dim {
            m[(a, a)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for a in 0..dim {
            for b in 0..dim {
                m[(a, b)] = f(a, b);
            }
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn real_diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (a, &e) in entries.iter().enumerate() {
            m[(a, a)] = Complex64::new(e, 0.0);
        }
        m
    }

    /// Projector |i><j| in the computational basis (0-based).
    pub fn ket_bra(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(i, j)] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|a| self[(a, a)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |a, b| self[(b, a)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for a in 0..n {
            for k in 0..n {
                let lhs = self[(a, k)];
                if lhs == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..n {
                    out[(a, b)] += lhs * other[(k, b)];
                }
            }
        }
        out
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * factor).collect() }
    }

    /// self += factor * other, entrywise.
    pub fn add_scaled_assign(&mut self, factor: f64, other: &Self) {
        assert_eq!(self.dim, other.dim, "add_scaled_assign dimension mismatch");
        for (z, w) in self.data.iter_mut().zip(other.data.iter()) {
            *z += factor * w;
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "add dimension mismatch");
        let data = self.data.iter().zip(other.data.iter()).map(|(a, b)| a + b).collect();
        Self { dim: self.dim, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "sub dimension mismatch");
        let data = self.data.iter().zip(other.data.iter()).map(|(a, b)| a - b).collect();
        Self { dim: self.dim, data }
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.dim {
            for b in a..self.dim {
                let d = (self[(a, b)] - self[(b, a)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= HERMITIAN_TOL
    }

    /// (M + M†)/2.
    pub fn hermitized(&self) -> Self {
        Self::from_fn(self.dim, |a, b| (self[(a, b)] + self[(b, a)].conj()) * 0.5)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff dimension mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn first_non_finite(&self) -> Option<(usize, usize)> {
        for a in 0..self.dim {
            for b in 0..self.dim {
                let z = self[(a, b)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (row, col): (usize, usize)) -> &Complex64 {
        &self.data[row * self.dim + col]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (row, col): (usize, usize)) -> &mut Complex64 {
        &mut self.data[row * self.dim + col]
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
/// Column k of `vectors` pairs with `values[k]`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// V diag(values) V†, for residual checks.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.vectors.dim();
        ComplexMatrix::from_fn(n, |a, b| {
            (0..n)
                .map(|k| self.vectors[(a, k)] * self.values[k] * self.vectors[(b, k)].conj())
                .sum()
        })
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Rejects inputs whose Hermitian defect exceeds [`HERMITIAN_TOL`]. The
/// returned eigenvalues are ascending; within a degenerate cluster the
/// eigenvector basis is whatever the rotation sequence produced, which is all
/// downstream code may assume.
pub fn eig_hermitian(matrix: &ComplexMatrix) -> Result<EigenDecomposition, LinalgError> {
    if let Some((row, col)) = matrix.first_non_finite() {
        return Err(LinalgError::NonFinite { row, col });
    }
    let defect = matrix.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian { max_asymmetry: defect, tolerance: HERMITIAN_TOL });
    }

    let n = matrix.dim();
    let mut a = matrix.hermitized();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);
    let target = 1e-15 * scale;

    for _ in 0..MAX_JACOBI_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let off = off_diagonal_norm(&a);
    if off > target.max(1e-13 * scale) {
        return Err(LinalgError::NoConvergence { sweeps: MAX_JACOBI_SWEEPS, off_norm: off });
    }

    // Sort ascending, carrying eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |row, col| v[(row, order[col])]);

    Ok(EigenDecomposition { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                sum += a[(p, q)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One two-sided Jacobi rotation annihilating A[p][q].
///
/// The pivot is factored as |g| e^{i phi}; a phase rotation makes the 2x2
/// block real symmetric and a classic Givens rotation with
/// t = sign(tau) / (|tau| + sqrt(1 + tau^2)), tau = (A_qq - A_pp) / (2|g|),
/// zeroes it.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let g = a[(p, q)];
    let abs_g = g.norm();
    if abs_g == 0.0 {
        return;
    }
    let phase = g / abs_g; // e^{i phi}
    let alpha = a[(p, p)].re;
    let beta = a[(q, q)].re;

    let tau = (beta - alpha) / (2.0 * abs_g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.dim();
    // Columns/rows outside the pivot pair.
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        let new_kp = c * akp - s * phase.conj() * akq;
        let new_kq = s * phase * akp + c * akq;
        a[(k, p)] = new_kp;
        a[(p, k)] = new_kp.conj();
        a[(k, q)] = new_kq;
        a[(q, k)] = new_kq.conj();
    }
    // Pivot block.
    let shift = 2.0 * c * s * abs_g;
    a[(p, p)] = Complex64::new(c * c * alpha + s * s * beta - shift, 0.0);
    a[(q, q)] = Complex64::new(s * s * alpha + c * c * beta + shift, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);

    // Accumulate V <- V * U.
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * phase.conj() * vkq;
        v[(k, q)] = s * phase * vkp + c * vkq;
    }
}

/// exp(-i H dt / hbar) through the spectral decomposition of Hermitian H.
pub fn propagator(h: &ComplexMatrix, dt: f64, hbar: f64) -> Result<ComplexMatrix, LinalgError> {
    let eig = eig_hermitian(h)?;
    let n = h.dim();
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&lambda| Complex64::new(0.0, -lambda * dt / hbar).exp())
        .collect();
    Ok(ComplexMatrix::from_fn(n, |a, b| {
        (0..n)
            .map(|k| eig.vectors[(a, k)] * phases[k] * eig.vectors[(b, k)].conj())
            .sum()
    }))
}

/// Tr(A B).
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64, LinalgError> {
    if a.dim() != b.dim() {
        return Err(LinalgError::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let n = a.dim();
    let mut sum = Complex64::new(0.0, 0.0);
    for row in 0..n {
        for col in 0..n {
            sum += a[(row, col)] * b[(col, row)];
        }
    }
    Ok(sum)
}

//! Dense complex linear algebra shared by every other module.
//!
//! Rank decisions go through singular values with a relative threshold
//! `eps_rank * max(sigma_max, 1)`; span bases come from a deterministic
//! two-pass modified Gram-Schmidt.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type StateVector = DVector<C64>;

/// Numerical thresholds used by every rank, equality and membership test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Relative singular-value cut-off for rank and null-space decisions.
    pub eps_rank: f64,
    /// Entrywise residual bound for axioms (self-adjointness, idempotence, ...).
    pub eps_entry: f64,
    /// Frobenius bound on projector differences for subspace comparisons.
    pub eps_subspace: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eps_rank: 1e-10,
            eps_entry: 1e-9,
            eps_subspace: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(eps_rank: f64, eps_entry: f64, eps_subspace: f64) -> Result<Self> {
        let tol = Tolerance {
            eps_rank,
            eps_entry,
            eps_subspace,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.eps_rank, self.eps_entry, self.eps_subspace];
        if all.iter().any(|e| !e.is_finite() || *e <= 0.0) {
            return Err(Error::InvalidTolerance(
                "all thresholds must be finite and strictly positive".into(),
            ));
        }
        if !(self.eps_rank <= self.eps_entry && self.eps_entry <= self.eps_subspace) {
            return Err(Error::InvalidTolerance(format!(
                "expected eps_rank <= eps_entry <= eps_subspace, got {:e}, {:e}, {:e}",
                self.eps_rank, self.eps_entry, self.eps_subspace
            )));
        }
        Ok(())
    }

    fn rank_cutoff(&self, scale: f64) -> f64 {
        self.eps_rank * scale.max(1.0)
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(n, n)
}

/// Builds a matrix from real row-major entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| c(x, 0.0)))
}

pub fn real_vector(entries: &[f64]) -> StateVector {
    StateVector::from_iterator(entries.len(), entries.iter().map(|&x| c(x, 0.0)))
}

pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

pub fn multiply(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            found: b.nrows(),
        });
    }
    Ok(a * b)
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.norm()
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn require_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// Rank-one outer product `v v^dag`.
pub fn outer(v: &StateVector) -> ComplexMatrix {
    v * v.adjoint()
}

/// Incrementally grown orthonormal basis.
///
/// Each candidate is orthogonalized twice against the current basis; it is
/// accepted when the residual norm exceeds the caller's cut-off.
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    dim: usize,
    vectors: Vec<StateVector>,
}

impl OrthoBasis {
    pub fn new(dim: usize) -> Self {
        OrthoBasis {
            dim,
            vectors: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<StateVector> {
        self.vectors
    }

    /// Component of `v` orthogonal to the current basis.
    pub fn residual(&self, v: &StateVector) -> StateVector {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &self.vectors {
                let coeff = b.dotc(&r);
                r.axpy(-coeff, b, C64::new(1.0, 0.0));
            }
        }
        r
    }

    /// Adds the normalized residual of `v` if its norm exceeds `cutoff`.
    pub fn push(&mut self, v: &StateVector, cutoff: f64) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        if self.vectors.len() == self.dim {
            return false;
        }
        let r = self.residual(v);
        let norm = r.norm();
        if norm <= cutoff {
            return false;
        }
        self.vectors.push(r.unscale(norm));
        true
    }
}

fn shared_dim(vectors: &[StateVector]) -> Result<Option<usize>> {
    let Some(first) = vectors.first() else {
        return Ok(None);
    };
    let dim = first.len();
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: v.len(),
        });
    }
    Ok(Some(dim))
}

/// Orthonormal basis of the span of `vectors`, in input order.
///
/// Vectors whose residual is at most `eps_rank` times the largest input
/// norm are dropped.
pub fn orthonormalize(vectors: &[StateVector], tol: &Tolerance) -> Result<Vec<StateVector>> {
    let Some(dim) = shared_dim(vectors)? else {
        return Ok(Vec::new());
    };
    let largest = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if largest == 0.0 {
        return Ok(Vec::new());
    }
    let cutoff = tol.eps_rank * largest;
    let mut basis = OrthoBasis::new(dim);
    for v in vectors {
        basis.push(v, cutoff);
    }
    Ok(basis.into_vectors())
}

/// Spectrum of the Hermitian dilation `[[0, M], [M^dag, 0]]`, whose
/// eigenvalues are `±σ_i` padded with zeros. Working through the Hermitian
/// eigensolver keeps singular values unsquared and avoids the general SVD,
/// which misfactors some rank-deficient inputs.
struct Decomposition {
    rows: usize,
    sigma: Vec<f64>,
    cutoff: f64,
    values: Vec<f64>,
    vectors: ComplexMatrix,
}

fn decompose(m: &ComplexMatrix, tol: &Tolerance) -> Decomposition {
    let (r, k) = m.shape();
    let mut w = ComplexMatrix::zeros(r + k, r + k);
    w.view_mut((0, r), (r, k)).copy_from(m);
    w.view_mut((r, 0), (k, r)).copy_from(&m.adjoint());
    let eig = SymmetricEigen::new(w);
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let mut sigma: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    sigma.truncate(r.min(k));
    let largest = sigma.first().copied().unwrap_or(0.0);
    Decomposition {
        rows: r,
        cutoff: tol.rank_cutoff(largest),
        sigma,
        values,
        vectors: eig.eigenvectors,
    }
}

impl Decomposition {
    /// Orthonormal basis of the support of `scale * Σ p p^dag`, summed over
    /// the upper or lower block of the selected eigenvectors.
    fn support(&self, keep: impl Fn(f64) -> bool, lower: bool, scale: f64) -> Vec<StateVector> {
        let (offset, len) = if lower {
            (self.rows, self.vectors.nrows() - self.rows)
        } else {
            (0, self.rows)
        };
        let mut block = ComplexMatrix::zeros(len, len);
        for (k, &value) in self.values.iter().enumerate() {
            if keep(value) {
                let part = self.vectors.view((offset, k), (len, 1));
                block += part * part.adjoint();
            }
        }
        block *= c(scale, 0.0);
        let eig = SymmetricEigen::new(block);
        let raw: Vec<StateVector> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.5)
            .map(|(k, _)| eig.eigenvectors.column(k).into_owned())
            .collect();
        canonical_basis(raw)
    }
}

/// Deterministic orthonormal basis of the span of orthonormal `raw`: the
/// projections of e_1, e_2, ... onto the span, Gram-Schmidt'ed in order.
/// Falls back to `raw` if the projections are too ill-conditioned.
pub fn canonical_basis(raw: Vec<StateVector>) -> Vec<StateVector> {
    let Some(n) = raw.first().map(|v| v.len()) else {
        return raw;
    };
    let mut projector = ComplexMatrix::zeros(n, n);
    for v in &raw {
        projector += v * v.adjoint();
    }
    let mut basis = OrthoBasis::new(n);
    for k in 0..n {
        if basis.len() == raw.len() {
            break;
        }
        basis.push(&projector.column(k).into_owned(), 1e-4);
    }
    if basis.len() == raw.len() {
        basis.into_vectors()
    } else {
        raw
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    decompose(m, &Tolerance::default()).sigma
}

pub fn numerical_rank(m: &ComplexMatrix, tol: &Tolerance) -> usize {
    if m.is_empty() {
        return 0;
    }
    let d = decompose(m, tol);
    d.sigma.iter().filter(|&&s| s > d.cutoff).count()
}

/// Orthonormal basis of the null space of a square matrix.
pub fn nullspace(m: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<StateVector>> {
    require_square(m)?;
    Ok(kernel(m, tol))
}

/// Orthonormal basis of the null space of any matrix.
pub(crate) fn kernel(m: &ComplexMatrix, tol: &Tolerance) -> Vec<StateVector> {
    if m.ncols() == 0 {
        return Vec::new();
    }
    if m.nrows() == 0 {
        return (0..m.ncols()).map(|k| identity(m.ncols()).column(k).into_owned()).collect();
    }
    let d = decompose(m, tol);
    let cutoff = d.cutoff;
    d.support(|v| v.abs() <= cutoff, true, 1.0)
}

/// Orthonormal basis of the column space.
pub fn column_space(m: &ComplexMatrix, tol: &Tolerance) -> Vec<StateVector> {
    if m.is_empty() {
        return Vec::new();
    }
    let d = decompose(m, tol);
    let cutoff = d.cutoff;
    d.support(|v| v > cutoff, false, 2.0)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, Vec<StateVector>)> {
    let n = require_square(m)?;
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let herm = (m + m.adjoint()).unscale(2.0);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).into_owned())
        .collect();
    Ok((values, vectors))
}

/// Eigenvalues of a general square matrix (complex Schur form diagonal).
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    let n = require_square(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let (_, t) = Schur::new(m.clone()).unpack();
    Ok((0..n).map(|k| t[(k, k)]).collect())
}

/// Gram matrix `B^dag B` minus identity, as a max-entry residual.
pub fn orthonormality_residual(vectors: &[StateVector]) -> f64 {
    let k = vectors.len();
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let g = vectors[i].dotc(&vectors[j]);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - c(target, 0.0)).norm());
        }
    }
    worst
}

//! Linear subspaces of C^n in canonical form.
//!
//! A subspace is stored as an orthonormal basis together with its orthogonal
//! projector `B B^dag`. Comparisons go through the projector, which is
//! independent of the basis chosen.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, identity, ComplexMatrix, StateVector, Tolerance};

#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<StateVector>,
    projector: ComplexMatrix,
}

impl Subspace {
    /// The zero subspace `{0}`.
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Vec::new(),
            projector: linalg::zeros(ambient_dim),
        }
    }

    /// The whole space.
    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|k| identity(ambient_dim).column(k).into_owned())
            .collect();
        Subspace {
            ambient_dim,
            basis,
            projector: identity(ambient_dim),
        }
    }

    pub fn from_span(ambient_dim: usize, vectors: &[StateVector], tol: &Tolerance) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                found: v.len(),
            });
        }
        let basis = linalg::orthonormalize(vectors, tol)?;
        Ok(Self::from_orthonormal(ambient_dim, basis))
    }

    /// Wraps a basis already known to be orthonormal.
    pub(crate) fn from_orthonormal(ambient_dim: usize, basis: Vec<StateVector>) -> Self {
        let mut projector = linalg::zeros(ambient_dim);
        for b in &basis {
            projector += linalg::outer(b);
        }
        Subspace {
            ambient_dim,
            basis,
            projector,
        }
    }

    /// Column space of an arbitrary square matrix.
    pub fn column_space(m: &ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        let n = linalg::require_square(m)?;
        Ok(Self::from_orthonormal(n, linalg::column_space(m, tol)))
    }

    /// Null space of an arbitrary square matrix.
    pub fn null_space(m: &ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        let n = linalg::require_square(m)?;
        Ok(Self::from_orthonormal(n, linalg::nullspace(m, tol)?))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[StateVector] {
        &self.basis
    }

    /// The orthogonal projector onto this subspace.
    pub fn projector(&self) -> &ComplexMatrix {
        &self.projector
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient_dim
    }

    pub fn is_trivial(&self) -> bool {
        self.is_zero() || self.is_full()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        Ok(())
    }

    /// Frobenius distance between the two projectors.
    pub fn distance(&self, other: &Subspace) -> Result<f64> {
        self.check_ambient(other)?;
        Ok(linalg::frobenius(&(&self.projector - &other.projector)))
    }

    pub fn equals(&self, other: &Subspace, tol: &Tolerance) -> Result<bool> {
        Ok(self.distance(other)? <= tol.eps_subspace)
    }

    /// `‖(I - Π) v‖ <= eps_subspace ‖v‖`
    pub fn contains_vector(&self, v: &StateVector, tol: &Tolerance) -> Result<bool> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: v.len(),
            });
        }
        let outside = v - &self.projector * v;
        Ok(outside.norm() <= tol.eps_subspace * v.norm())
    }

    /// `self ⊆ other`, i.e. `‖(I - Π_other) Π_self‖_F <= eps_subspace`.
    pub fn is_subspace_of(&self, other: &Subspace, tol: &Tolerance) -> Result<bool> {
        self.check_ambient(other)?;
        let n = self.ambient_dim;
        let leak = (identity(n) - &other.projector) * &self.projector;
        Ok(linalg::frobenius(&leak) <= tol.eps_subspace)
    }

    /// Intersection: the common null space of `I - Π_U` and `I - Π_V`.
    pub fn meet(&self, other: &Subspace, tol: &Tolerance) -> Result<Subspace> {
        self.check_ambient(other)?;
        let n = self.ambient_dim;
        let mut stacked = ComplexMatrix::zeros(2 * n, n);
        stacked
            .rows_mut(0, n)
            .copy_from(&(identity(n) - &self.projector));
        stacked
            .rows_mut(n, n)
            .copy_from(&(identity(n) - &other.projector));
        Ok(Self::from_orthonormal(n, linalg::kernel(&stacked, tol)))
    }

    /// Span of the union.
    pub fn join(&self, other: &Subspace, tol: &Tolerance) -> Result<Subspace> {
        self.check_ambient(other)?;
        let all: Vec<StateVector> = self.basis.iter().chain(&other.basis).cloned().collect();
        Self::from_span(self.ambient_dim, &all, tol)
    }

    pub fn ortho_complement(&self, tol: &Tolerance) -> Subspace {
        let basis = linalg::nullspace(&self.projector, tol).expect("projector is square");
        Self::from_orthonormal(self.ambient_dim, basis)
    }

    /// `U ⊕ V = H` with `U ⟂ V`.
    pub fn is_direct_sum_decomposition(&self, other: &Subspace, tol: &Tolerance) -> Result<bool> {
        self.check_ambient(other)?;
        let orthogonal = linalg::max_abs(&(&self.projector * &other.projector)) <= tol.eps_entry;
        Ok(orthogonal && self.meet(other, tol)?.is_zero() && self.join(other, tol)?.is_full())
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "{{0}}");
        }
        if self.is_full() {
            return write!(f, "C^{}", self.ambient_dim);
        }
        write!(f, "span{{")?;
        for (k, b) in self.basis.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_vector(&phase_normalized(b)))?;
        }
        write!(f, "}}")
    }
}

/// Rotates the global phase so the first non-negligible entry is real positive.
pub fn phase_normalized(v: &StateVector) -> StateVector {
    match v.iter().find(|z| z.norm() > 1e-12) {
        Some(lead) => {
            let phase = lead.conj() / lead.norm();
            v.map(|z| z * phase)
        }
        None => v.clone(),
    }
}

pub fn format_vector(v: &StateVector) -> String {
    let parts: Vec<String> = v.iter().map(|z| format_complex(z.re, z.im)).collect();
    format!("({})", parts.join(", "))
}

pub fn format_complex(re: f64, im: f64) -> String {
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    let (re, im) = (clean(re), clean(im));
    match (re == 0.0, im == 0.0) {
        (_, true) => format!("{re:.6}"),
        (true, false) => format!("{im:.6}i"),
        (false, false) if im < 0.0 => format!("{re:.6}-{:.6}i", -im),
        _ => format!("{re:.6}+{im:.6}i"),
    }
}

//! Validated projectors, maximal contexts and context collections.

use crate::error::{Error, Result};
use crate::linalg::{self, c, identity, ComplexMatrix, StateVector, Tolerance};
use crate::subspace::Subspace;

/// A self-adjoint idempotent matrix. The matrix is stored exactly as supplied.
#[derive(Debug, Clone)]
pub struct Projector {
    matrix: ComplexMatrix,
    rank: usize,
    label: String,
}

impl Projector {
    pub fn validate(matrix: ComplexMatrix, label: impl Into<String>, tol: &Tolerance) -> Result<Self> {
        let label = label.into();
        linalg::require_square(&matrix)?;
        if !linalg::is_finite(&matrix) {
            return Err(Error::NonFinite);
        }
        let hermitian = linalg::max_abs(&(&matrix - matrix.adjoint()));
        if hermitian > tol.eps_entry {
            return Err(Error::NotHermitian {
                label,
                residual: hermitian,
            });
        }
        let idempotent = linalg::max_abs(&(&matrix * &matrix - &matrix));
        if idempotent > tol.eps_entry {
            return Err(Error::NotIdempotent {
                label,
                residual: idempotent,
            });
        }
        let rank = linalg::numerical_rank(&matrix, tol);
        Ok(Projector {
            matrix,
            rank,
            label,
        })
    }

    /// Rank-one projector `v v^dag / |v|^2`.
    pub fn from_ray(v: &StateVector, label: impl Into<String>, tol: &Tolerance) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroState);
        }
        Self::validate(linalg::outer(&v.unscale(norm)), label, tol)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Column space: the vectors fixed by the projector.
    pub fn ran(&self, tol: &Tolerance) -> Subspace {
        Subspace::column_space(&self.matrix, tol).expect("validated projector is square")
    }

    /// Null space: the vectors annihilated by the projector.
    pub fn ker(&self, tol: &Tolerance) -> Subspace {
        Subspace::null_space(&self.matrix, tol).expect("validated projector is square")
    }

    /// `1 - P`, validated with the same tolerance.
    pub fn complement(&self, tol: &Tolerance) -> Result<Projector> {
        let m = identity(self.dim()) - &self.matrix;
        Projector::validate(m, format!("1-{}", self.label), tol)
    }
}

/// `‖(I - Π_U) M Π_U‖_F <= eps_subspace`.
pub fn is_invariant_under(u: &Subspace, m: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    Ok(invariance_residual(u, m)? <= tol.eps_subspace)
}

pub fn invariance_residual(u: &Subspace, m: &ComplexMatrix) -> Result<f64> {
    let n = linalg::require_square(m)?;
    if n != u.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: u.ambient_dim(),
            found: n,
        });
    }
    let pi = u.projector();
    let leak = (identity(n) - pi) * m * pi;
    Ok(linalg::frobenius(&leak))
}

pub fn is_invariant(u: &Subspace, p: &Projector, tol: &Tolerance) -> Result<bool> {
    is_invariant_under(u, p.matrix(), tol)
}

/// A set of mutually annihilating projectors that resolve the identity.
#[derive(Debug, Clone)]
pub struct MaximalContext {
    id: String,
    members: Vec<Projector>,
}

impl MaximalContext {
    pub fn validate(id: impl Into<String>, members: Vec<Projector>, tol: &Tolerance) -> Result<Self> {
        let id = id.into();
        let Some(first) = members.first() else {
            return Err(Error::EmptyContext { context: id });
        };
        let n = first.dim();
        if let Some(p) = members.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.dim(),
            });
        }
        for i in 0..members.len() {
            for j in 0..members.len() {
                if i == j {
                    continue;
                }
                let residual = linalg::max_abs(&(members[i].matrix() * members[j].matrix()));
                if residual > tol.eps_entry {
                    return Err(Error::PairwiseProductNonzero {
                        context: id,
                        i: i.min(j),
                        j: i.max(j),
                        residual,
                    });
                }
            }
        }
        let mut sum = linalg::zeros(n);
        for p in &members {
            sum += p.matrix();
        }
        let residual = linalg::max_abs(&(sum - identity(n)));
        if residual > tol.eps_entry {
            return Err(Error::SumNotIdentity {
                context: id,
                residual,
            });
        }
        Ok(MaximalContext { id, members })
    }

    /// Rank-one context from an orthonormal basis, with labels `P{k}^{id}`.
    pub fn from_basis(id: impl Into<String>, vectors: &[StateVector], tol: &Tolerance) -> Result<Self> {
        let id = id.into();
        let labeled: Vec<(String, StateVector)> = vectors
            .iter()
            .enumerate()
            .map(|(k, v)| (format!("P{}^{}", k + 1, id), v.clone()))
            .collect();
        Self::from_labeled_basis(id, &labeled, tol)
    }

    pub fn from_labeled_basis(
        id: impl Into<String>,
        vectors: &[(String, StateVector)],
        tol: &Tolerance,
    ) -> Result<Self> {
        let id = id.into();
        let Some((_, first)) = vectors.first() else {
            return Err(Error::EmptyContext { context: id });
        };
        let n = first.len();
        if let Some((_, v)) = vectors.iter().find(|(_, v)| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        let plain: Vec<StateVector> = vectors.iter().map(|(_, v)| v.clone()).collect();
        let residual = linalg::orthonormality_residual(&plain);
        if residual > tol.eps_entry {
            return Err(Error::NotOrthonormal {
                context: id,
                residual,
            });
        }
        if vectors.len() != n {
            return Err(Error::NotComplete {
                context: id,
                found: vectors.len(),
                dim: n,
            });
        }
        let members = vectors
            .iter()
            .map(|(label, v)| Projector::validate(linalg::outer(v), label.clone(), tol))
            .collect::<Result<Vec<_>>>()?;
        Self::validate(id, members, tol)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn members(&self) -> &[Projector] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    /// Copy of this context under a new id; member labels are kept.
    pub fn relabeled(&self, id: impl Into<String>) -> Self {
        MaximalContext {
            id: id.into(),
            members: self.members.clone(),
        }
    }
}

/// Identity of a projector across all contexts of a collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjectorId(pub usize);

#[derive(Debug, Clone)]
pub struct RegistryEntry {
    pub id: ProjectorId,
    /// First occurrence, used as the representative.
    pub projector: Projector,
    /// `(context index, member index)` pairs, in input order.
    pub occurrences: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct ContextCollection {
    ambient_dim: usize,
    contexts: Vec<MaximalContext>,
    registry: Vec<RegistryEntry>,
    member_ids: Vec<Vec<ProjectorId>>,
}

impl ContextCollection {
    /// Projectors equal within `eps_subspace` (Frobenius) share one identity.
    pub fn new(contexts: Vec<MaximalContext>, tol: &Tolerance) -> Result<Self> {
        let Some(first) = contexts.first() else {
            return Err(Error::EmptyCollection);
        };
        let ambient_dim = first.dim();
        if let Some(ctx) = contexts.iter().find(|c| c.dim() != ambient_dim) {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                found: ctx.dim(),
            });
        }
        let mut registry: Vec<RegistryEntry> = Vec::new();
        let mut member_ids = Vec::with_capacity(contexts.len());
        for (ci, ctx) in contexts.iter().enumerate() {
            let mut ids = Vec::with_capacity(ctx.len());
            for (mi, p) in ctx.members().iter().enumerate() {
                let existing = registry.iter_mut().find(|e| {
                    linalg::frobenius(&(e.projector.matrix() - p.matrix())) <= tol.eps_subspace
                });
                let id = match existing {
                    Some(entry) => {
                        entry.occurrences.push((ci, mi));
                        entry.id
                    }
                    None => {
                        let id = ProjectorId(registry.len());
                        registry.push(RegistryEntry {
                            id,
                            projector: p.clone(),
                            occurrences: vec![(ci, mi)],
                        });
                        id
                    }
                };
                ids.push(id);
            }
            member_ids.push(ids);
        }
        Ok(ContextCollection {
            ambient_dim,
            contexts,
            registry,
            member_ids,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn contexts(&self) -> &[MaximalContext] {
        &self.contexts
    }

    pub fn context(&self, id: &str) -> Result<&MaximalContext> {
        self.contexts
            .iter()
            .find(|c| c.id() == id)
            .ok_or_else(|| Error::UnknownContext(id.to_string()))
    }

    pub fn registry(&self) -> &[RegistryEntry] {
        &self.registry
    }

    pub fn entry(&self, id: ProjectorId) -> &RegistryEntry {
        &self.registry[id.0]
    }

    /// Registry identities of each context's members.
    pub fn member_ids(&self) -> &[Vec<ProjectorId>] {
        &self.member_ids
    }

    /// Distinct projector matrices in registry order.
    pub fn generators(&self) -> Vec<ComplexMatrix> {
        self.registry
            .iter()
            .map(|e| e.projector.matrix().clone())
            .collect()
    }
}

pub fn pauli_z() -> [ComplexMatrix; 2] {
    [
        linalg::real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]),
        linalg::real_matrix(2, 2, &[0.0, 0.0, 0.0, 1.0]),
    ]
}

pub fn pauli_x() -> [ComplexMatrix; 2] {
    [
        linalg::real_matrix(2, 2, &[0.5, 0.5, 0.5, 0.5]),
        linalg::real_matrix(2, 2, &[0.5, -0.5, -0.5, 0.5]),
    ]
}

pub fn pauli_y() -> [ComplexMatrix; 2] {
    let h = 0.5;
    [
        ComplexMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(0.0, -h), c(0.0, h), c(h, 0.0)]),
        ComplexMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(0.0, h), c(0.0, -h), c(h, 0.0)]),
    ]
}

/// The eigenprojectors of the three Pauli matrices as contexts `z`, `x`, `y`.
pub fn pauli_matrices() -> Vec<(&'static str, [ComplexMatrix; 2])> {
    vec![("z", pauli_z()), ("x", pauli_x()), ("y", pauli_y())]
}

/// Builds a collection from named contexts of raw matrices.
pub fn collection_from_matrices(
    contexts: Vec<(String, Vec<ComplexMatrix>)>,
    tol: &Tolerance,
) -> Result<ContextCollection> {
    let mut built = Vec::with_capacity(contexts.len());
    for (id, matrices) in contexts {
        let members = matrices
            .into_iter()
            .enumerate()
            .map(|(k, m)| Projector::validate(m, format!("P{}^{}", k + 1, id), tol))
            .collect::<Result<Vec<_>>>()?;
        built.push(MaximalContext::validate(id, members, tol)?);
    }
    ContextCollection::new(built, tol)
}

pub fn pauli_contexts() -> ContextCollection {
    let contexts = pauli_matrices()
        .into_iter()
        .map(|(id, ms)| (id.to_string(), ms.to_vec()))
        .collect();
    collection_from_matrices(contexts, &Tolerance::default()).expect("Pauli projectors are exact")
}

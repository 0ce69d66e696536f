//! Irreducibility of a set of operators on C^n.
//!
//! Over the complex field a set of operators has no nontrivial common
//! invariant subspace exactly when the unital algebra it generates is all of
//! `L(C^n)` (Burnside). [`algebra_closure`] computes that algebra as a span
//! closed under products; [`invariant_subspace_witness`] independently looks
//! for an explicit invariant subspace.

use crate::error::{Error, Result};
use crate::linalg::{self, identity, ComplexMatrix, OrthoBasis, StateVector, Tolerance};
use crate::projector::is_invariant_under;
use crate::subspace::Subspace;

/// Largest ambient dimension searched for an explicit witness.
pub const WITNESS_CAP: usize = 6;

#[derive(Debug, Clone)]
pub struct AlgebraClosure {
    pub ambient_dim: usize,
    /// Orthonormal under `<A, B> = tr(A^dag B)`, in generation-then-index order.
    pub basis: Vec<ComplexMatrix>,
    pub dimension: usize,
    /// Product rounds run until the span stopped growing.
    pub generations: usize,
    pub saturated: bool,
}

#[derive(Debug, Clone)]
pub struct IrreducibilityReport {
    pub ambient_dim: usize,
    pub irreducible: bool,
    pub algebra_dimension: usize,
    pub generations: usize,
    pub witness: Option<Subspace>,
}

fn common_dim(generators: &[ComplexMatrix]) -> Result<usize> {
    let Some(first) = generators.first() else {
        return Err(Error::EmptyInput("generator"));
    };
    let n = linalg::require_square(first)?;
    for g in generators {
        if linalg::require_square(g)? != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.nrows(),
            });
        }
        if !linalg::is_finite(g) {
            return Err(Error::NonFinite);
        }
    }
    Ok(n)
}

fn flatten(m: &ComplexMatrix) -> StateVector {
    StateVector::from_column_slice(m.as_slice())
}

fn unflatten(v: &StateVector, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(n, n, v.as_slice())
}

fn push_matrix(basis: &mut OrthoBasis, m: &ComplexMatrix, tol: &Tolerance) -> bool {
    let v = flatten(m);
    let cutoff = tol.eps_rank * v.norm().max(1.0);
    basis.push(&v, cutoff)
}

/// Span closure of `{1} ∪ generators` under multiplication.
pub fn algebra_closure(generators: &[ComplexMatrix], tol: &Tolerance) -> Result<AlgebraClosure> {
    let n = common_dim(generators)?;
    let full = n * n;
    let mut basis = OrthoBasis::new(full);
    push_matrix(&mut basis, &identity(n), tol);
    for g in generators {
        push_matrix(&mut basis, g, tol);
    }

    // Products among elements that were all present in an earlier round are
    // already in the span, so each round only pairs against the newcomers.
    let mut settled = 0;
    let mut generations = 0;
    while basis.len() < full && settled < basis.len() {
        generations += 1;
        let snapshot: Vec<ComplexMatrix> = basis.vectors().iter().map(|v| unflatten(v, n)).collect();
        let fresh = settled;
        settled = snapshot.len();
        'round: for i in 0..snapshot.len() {
            for j in 0..snapshot.len() {
                if i < fresh && j < fresh {
                    continue;
                }
                push_matrix(&mut basis, &(&snapshot[i] * &snapshot[j]), tol);
                if basis.len() == full {
                    break 'round;
                }
            }
        }
    }

    let dimension = basis.len();
    Ok(AlgebraClosure {
        ambient_dim: n,
        basis: basis.vectors().iter().map(|v| unflatten(v, n)).collect(),
        dimension,
        generations,
        saturated: dimension == full,
    })
}

/// Decides irreducibility by saturation of the generated algebra and, when
/// reducible and `n <= WITNESS_CAP`, attaches an explicit invariant subspace.
pub fn is_irreducible(generators: &[ComplexMatrix], tol: &Tolerance) -> Result<IrreducibilityReport> {
    let n = common_dim(generators)?;
    if n == 1 {
        return Err(Error::AmbientDimOne);
    }
    let closure = algebra_closure(generators, tol)?;
    let witness = if !closure.saturated && n <= WITNESS_CAP {
        invariant_subspace_witness(generators, tol)?
    } else {
        None
    };
    Ok(IrreducibilityReport {
        ambient_dim: n,
        irreducible: closure.saturated,
        algebra_dimension: closure.dimension,
        generations: closure.generations,
        witness,
    })
}

fn invariant_under_all(u: &Subspace, generators: &[ComplexMatrix], tol: &Tolerance) -> bool {
    !u.is_trivial()
        && generators
            .iter()
            .all(|g| is_invariant_under(u, g, tol).expect("dimensions checked"))
}

/// Eigenspaces of a Hermitian matrix, largest eigenvalue first, each with a
/// canonical basis (projections of e_1, e_2, ... orthonormalized).
fn eigenspaces(h: &ComplexMatrix) -> Vec<Vec<StateVector>> {
    let (values, vectors) = linalg::hermitian_eigen(h).expect("square");
    let scale = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let gap = 1e-7 * scale;

    let mut groups: Vec<Vec<StateVector>> = Vec::new();
    let mut last: Option<f64> = None;
    for (value, vector) in values.into_iter().zip(vectors) {
        match (last, groups.last_mut()) {
            (Some(prev), Some(group)) if prev - value <= gap => group.push(vector),
            _ => groups.push(vec![vector]),
        }
        last = Some(value);
    }

    groups.into_iter().map(linalg::canonical_basis).collect()
}

/// Smallest subspace containing `v` and invariant under every generator.
fn cyclic_span(v: &StateVector, generators: &[ComplexMatrix], tol: &Tolerance) -> Subspace {
    let n = v.len();
    let mut basis = OrthoBasis::new(n);
    basis.push(v, tol.eps_rank * v.norm().max(1.0));
    let mut next = 0;
    while next < basis.len() && basis.len() < n {
        let u = basis.vectors()[next].clone();
        for g in generators {
            let image = g * &u;
            basis.push(&image, tol.eps_rank * image.norm().max(1.0));
        }
        next += 1;
    }
    Subspace::from_orthonormal(n, basis.into_vectors())
}

/// Best-effort search for a nontrivial common invariant subspace.
///
/// Candidates, in order: sums of eigenspaces of the combination
/// `Σ (k+1) G_k` (Hermitian part), single and paired eigenvectors, then the
/// cyclic subspaces generated by eigenvectors and by the standard basis, and
/// finally cyclic subspaces seeded by eigenvectors of the combination itself.
/// `None` is not a proof of irreducibility; [`algebra_closure`] is.
pub fn invariant_subspace_witness(generators: &[ComplexMatrix], tol: &Tolerance) -> Result<Option<Subspace>> {
    let n = common_dim(generators)?;
    if n > WITNESS_CAP {
        return Err(Error::SearchCapExceeded {
            dim: n,
            cap: WITNESS_CAP,
        });
    }
    if n < 2 {
        return Ok(None);
    }

    let mut combo = linalg::zeros(n);
    for (k, g) in generators.iter().enumerate() {
        combo += g * linalg::c((k + 1) as f64, 0.0);
    }
    let groups = eigenspaces(&combo);

    let k = groups.len();
    for mask in 1u32..(1u32 << k).saturating_sub(1) {
        let vectors: Vec<StateVector> = (0..k)
            .filter(|g| mask & (1 << g) != 0)
            .flat_map(|g| groups[g].iter().cloned())
            .collect();
        let candidate = Subspace::from_span(n, &vectors, tol)?;
        if invariant_under_all(&candidate, generators, tol) {
            return Ok(Some(candidate));
        }
    }

    let eigvecs: Vec<StateVector> = groups.iter().flatten().cloned().collect();
    for v in &eigvecs {
        let candidate = Subspace::from_span(n, std::slice::from_ref(v), tol)?;
        if invariant_under_all(&candidate, generators, tol) {
            return Ok(Some(candidate));
        }
    }
    for i in 0..eigvecs.len() {
        for j in i + 1..eigvecs.len() {
            let candidate = Subspace::from_span(n, &[eigvecs[i].clone(), eigvecs[j].clone()], tol)?;
            if invariant_under_all(&candidate, generators, tol) {
                return Ok(Some(candidate));
            }
        }
    }

    let standard = (0..n).map(|k| identity(n).column(k).into_owned());
    for seed in eigvecs.iter().cloned().chain(standard) {
        let candidate = cyclic_span(&seed, generators, tol);
        if invariant_under_all(&candidate, generators, tol) {
            return Ok(Some(candidate));
        }
    }

    norton_candidate(&combo, generators, tol)
}

/// For each eigenvalue `l` of the (non-normal) combination `a`: cyclic spans of
/// vectors in `ker(a - l)` and orthogonal complements of the adjoint cyclic
/// spans of vectors in `ker(a^dag - conj(l))`. A proper invariant subspace `W`
/// shows up through one side for every eigenvalue, provided the kernel is a line.
fn norton_candidate(a: &ComplexMatrix, generators: &[ComplexMatrix], tol: &Tolerance) -> Result<Option<Subspace>> {
    let n = a.nrows();
    let loose = Tolerance::new(tol.eps_subspace, tol.eps_subspace, tol.eps_subspace)?;
    let adjoints: Vec<ComplexMatrix> = generators.iter().map(linalg::adjoint).collect();
    let eye = identity(n);
    for l in linalg::eigenvalues(a)? {
        for seed in linalg::nullspace(&(a - &eye * l), &loose)? {
            let candidate = cyclic_span(&seed, generators, tol);
            if invariant_under_all(&candidate, generators, tol) {
                return Ok(Some(candidate));
            }
        }
        for seed in linalg::nullspace(&(a.adjoint() - &eye * l.conj()), &loose)? {
            let candidate = cyclic_span(&seed, &adjoints, tol).ortho_complement(tol);
            if invariant_under_all(&candidate, generators, tol) {
                return Ok(Some(candidate));
            }
        }
    }
    Ok(None)
}

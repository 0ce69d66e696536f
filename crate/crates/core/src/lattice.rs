//! Finite families of invariant subspaces attached to projectors and contexts.
//!
//! `Lat(P)` is the four-element family `{0}, ran P, ker P, H`. For a context
//! it is the family of ranges of all partial sums of its members. These are
//! chosen finite sub-families: any `A ⊕ B` with `A ⊆ ran P`, `B ⊆ ker P` is
//! also P-invariant but is not listed.

use crate::error::{Error, Result};
use crate::linalg::{self, Tolerance};
use crate::projector::{MaximalContext, Projector};
use crate::subspace::Subspace;

/// Largest context size accepted by [`lat_context`].
pub const DEFAULT_SUBSET_CAP: usize = 20;

#[derive(Debug, Clone)]
pub struct LatticeFamily {
    ambient_dim: usize,
    elements: Vec<Subspace>,
    labels: Vec<String>,
}

impl LatticeFamily {
    pub fn new(ambient_dim: usize) -> Self {
        LatticeFamily {
            ambient_dim,
            elements: Vec::new(),
            labels: Vec::new(),
        }
    }

    /// Inserts unless an equal element is already present; the first label wins.
    pub fn insert(&mut self, element: Subspace, label: impl Into<String>, tol: &Tolerance) -> Result<bool> {
        if element.ambient_dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: element.ambient_dim(),
            });
        }
        if self.position(&element, tol)?.is_some() {
            return Ok(false);
        }
        self.elements.push(element);
        self.labels.push(label.into());
        Ok(true)
    }

    pub fn position(&self, element: &Subspace, tol: &Tolerance) -> Result<Option<usize>> {
        for (k, e) in self.elements.iter().enumerate() {
            if e.equals(element, tol)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    pub fn contains(&self, element: &Subspace, tol: &Tolerance) -> Result<bool> {
        Ok(self.position(element, tol)?.is_some())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn elements(&self) -> &[Subspace] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Subspace, &str)> {
        self.elements.iter().zip(self.labels.iter().map(String::as_str))
    }

    /// Same elements, ignoring order and labels.
    pub fn same_elements(&self, other: &LatticeFamily, tol: &Tolerance) -> Result<bool> {
        if self.ambient_dim != other.ambient_dim || self.len() != other.len() {
            return Ok(false);
        }
        for e in &self.elements {
            if !other.contains(e, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Pairs `(i, j)` whose meet or join falls outside the family.
    pub fn closure_violations(&self, tol: &Tolerance) -> Result<Vec<(usize, usize)>> {
        let mut bad = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let (u, v) = (&self.elements[i], &self.elements[j]);
                if !self.contains(&u.meet(v, tol)?, tol)? || !self.contains(&u.join(v, tol)?, tol)? {
                    bad.push((i, j));
                }
            }
        }
        Ok(bad)
    }

    pub fn is_closed(&self, tol: &Tolerance) -> Result<bool> {
        Ok(self.closure_violations(tol)?.is_empty())
    }
}

pub fn lat_single(p: &Projector, tol: &Tolerance) -> LatticeFamily {
    let n = p.dim();
    let mut family = LatticeFamily::new(n);
    let candidates = [
        (Subspace::zero(n), "{0}".to_string()),
        (p.ran(tol), format!("ran({})", p.label())),
        (p.ker(tol), format!("ker({})", p.label())),
        (Subspace::full(n), "H".to_string()),
    ];
    for (element, label) in candidates {
        family.insert(element, label, tol).expect("dimensions agree");
    }
    family
}

pub fn lat_context(ctx: &MaximalContext, tol: &Tolerance) -> Result<LatticeFamily> {
    lat_context_capped(ctx, tol, DEFAULT_SUBSET_CAP)
}

/// Ranges of `Σ_{i∈S} P_i` over every subset `S`, in subset-index order.
pub fn lat_context_capped(ctx: &MaximalContext, tol: &Tolerance, cap: usize) -> Result<LatticeFamily> {
    let m = ctx.len();
    if m > cap || m >= 64 {
        return Err(Error::SubsetLimitExceeded { members: m, cap: cap.min(63) });
    }
    let n = ctx.dim();
    let mut family = LatticeFamily::new(n);
    for mask in 0u64..(1u64 << m) {
        let chosen: Vec<&Projector> = (0..m)
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| &ctx.members()[k])
            .collect();
        let label = if chosen.is_empty() {
            "{0}".to_string()
        } else if chosen.len() == m {
            "H".to_string()
        } else {
            let names: Vec<&str> = chosen.iter().map(|p| p.label()).collect();
            format!("ran({})", names.join("+"))
        };
        let mut sum = linalg::zeros(n);
        for p in &chosen {
            sum += p.matrix();
        }
        family.insert(Subspace::column_space(&sum, tol)?, label, tol)?;
    }
    Ok(family)
}

/// Elements common to every family, labelled and ordered as in the first.
pub fn lat_intersect(families: &[LatticeFamily], tol: &Tolerance) -> Result<LatticeFamily> {
    let Some(first) = families.first() else {
        return Err(Error::EmptyInput("lattice family"));
    };
    let n = first.ambient_dim();
    if let Some(f) = families.iter().find(|f| f.ambient_dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.ambient_dim(),
        });
    }
    let mut out = LatticeFamily::new(n);
    'elements: for (element, label) in first.iter() {
        for other in &families[1..] {
            if !other.contains(element, tol)? {
                continue 'elements;
            }
        }
        out.insert(element.clone(), label, tol)?;
    }
    Ok(out)
}

/// True iff the family is exactly `{ {0}, H }`.
pub fn is_trivial(family: &LatticeFamily) -> bool {
    family.len() == 2
        && family.elements().iter().any(Subspace::is_zero)
        && family.elements().iter().any(Subspace::is_full)
}

//! JSON operator-set documents.
//!
//! ```json
//! { "dim": 2,
//!   "eps_entry": 1e-9,
//!   "contexts": { "z": [ [[[1,0],[0,0]], [[0,0],[0,0]]], ... ] } }
//! ```
//!
//! or, with rays that are normalized and turned into rank-one projectors:
//!
//! ```json
//! { "dim": 2,
//!   "rays": { "up": [[1,0],[0,0]], "down": [[0,0],[1,0]] },
//!   "groups": { "z": ["up", "down"] } }
//! ```
//!
//! Complex numbers are `[re, im]`; matrices are arrays of rows.

use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, StateVector, Tolerance};
use crate::projector::{collection_from_matrices, ContextCollection, MaximalContext};

pub type Pair = [f64; 2];
pub type MatrixRows = Vec<Vec<Pair>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSetDocument {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_rank: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_entry: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_subspace: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contexts: Option<IndexMap<String, Vec<MatrixRows>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rays: Option<IndexMap<String, Vec<Pair>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<IndexMap<String, Vec<String>>>,
}

/// Tolerance fields that may override a document's own settings.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ToleranceOverrides {
    pub eps_rank: Option<f64>,
    pub eps_entry: Option<f64>,
    pub eps_subspace: Option<f64>,
}

impl ToleranceOverrides {
    /// Defaults, then `base`, then `self`.
    pub fn apply(&self, base: Tolerance) -> Result<Tolerance> {
        Tolerance::new(
            self.eps_rank.unwrap_or(base.eps_rank),
            self.eps_entry.unwrap_or(base.eps_entry),
            self.eps_subspace.unwrap_or(base.eps_subspace),
        )
    }
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn complex(p: &Pair) -> Result<crate::linalg::C64> {
    if !(p[0].is_finite() && p[1].is_finite()) {
        return Err(parse_err("non-finite number"));
    }
    Ok(c(p[0], p[1]))
}

fn matrix_from_rows(name: &str, rows: &MatrixRows, dim: usize) -> Result<ComplexMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(parse_err(format!("context `{name}`: every matrix must be {dim}x{dim}")));
    }
    let entries = rows.iter().flatten().map(complex).collect::<Result<Vec<_>>>()?;
    Ok(ComplexMatrix::from_row_slice(dim, dim, &entries))
}

fn vector_from_pairs(name: &str, pairs: &[Pair], dim: usize) -> Result<StateVector> {
    if pairs.len() != dim {
        return Err(parse_err(format!(
            "ray `{name}` has {} entries, expected {dim}",
            pairs.len()
        )));
    }
    let entries = pairs.iter().map(complex).collect::<Result<Vec<_>>>()?;
    Ok(StateVector::from_vec(entries))
}

pub fn matrix_to_rows(m: &ComplexMatrix) -> MatrixRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn vector_to_pairs(v: &StateVector) -> Vec<Pair> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

impl OperatorSetDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: OperatorSetDocument = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        doc.check_shape()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    fn check_shape(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(parse_err("`dim` must be positive"));
        }
        match (&self.contexts, &self.rays, &self.groups) {
            (Some(_), None, None) | (None, Some(_), Some(_)) => Ok(()),
            (None, Some(_), None) => Err(parse_err("`rays` requires `groups`")),
            (None, None, Some(_)) => Err(parse_err("`groups` requires `rays`")),
            (None, None, None) => Err(parse_err("expected `contexts` or `rays` with `groups`")),
            _ => Err(parse_err("`contexts` cannot be combined with `rays`/`groups`")),
        }
    }

    /// The document's own tolerance on top of the defaults.
    pub fn tolerance(&self) -> Result<Tolerance> {
        ToleranceOverrides {
            eps_rank: self.eps_rank,
            eps_entry: self.eps_entry,
            eps_subspace: self.eps_subspace,
        }
        .apply(Tolerance::default())
    }

    pub fn build(&self, tol: &Tolerance) -> Result<ContextCollection> {
        self.check_shape()?;
        let n = self.dim;
        if let Some(contexts) = &self.contexts {
            let raw = contexts
                .iter()
                .map(|(name, ms)| {
                    let ms = ms
                        .iter()
                        .map(|rows| matrix_from_rows(name, rows, n))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((name.clone(), ms))
                })
                .collect::<Result<Vec<_>>>()?;
            return collection_from_matrices(raw, tol);
        }

        let rays = self.rays.as_ref().expect("shape checked");
        let groups = self.groups.as_ref().expect("shape checked");
        let mut normalized = IndexMap::new();
        for (name, pairs) in rays {
            let v = vector_from_pairs(name, pairs, n)?;
            let norm = v.norm();
            if norm == 0.0 {
                return Err(parse_err(format!("ray `{name}` is zero")));
            }
            normalized.insert(name.as_str(), v.unscale(norm));
        }
        let mut contexts = Vec::with_capacity(groups.len());
        for (ctx, members) in groups {
            let labeled = members
                .iter()
                .map(|m| {
                    normalized
                        .get(m.as_str())
                        .map(|v| (m.clone(), v.clone()))
                        .ok_or_else(|| parse_err(format!("group `{ctx}` references unknown ray `{m}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            contexts.push(MaximalContext::from_labeled_basis(ctx.clone(), &labeled, tol)?);
        }
        ContextCollection::new(contexts, tol)
    }

    /// Matrix-form document for an existing collection.
    pub fn from_collection(collection: &ContextCollection) -> Self {
        let contexts = collection
            .contexts()
            .iter()
            .map(|ctx| {
                let ms = ctx.members().iter().map(|p| matrix_to_rows(p.matrix())).collect();
                (ctx.id().to_string(), ms)
            })
            .collect();
        OperatorSetDocument {
            dim: collection.ambient_dim(),
            eps_rank: None,
            eps_entry: None,
            eps_subspace: None,
            contexts: Some(contexts),
            rays: None,
            groups: None,
        }
    }
}

/// Reads, validates and builds a collection. Flags override document fields.
pub fn ingest(path: &Path, overrides: &ToleranceOverrides) -> Result<(ContextCollection, Tolerance)> {
    let text = std::fs::read_to_string(path).map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
    ingest_str(&text, overrides)
}

pub fn ingest_str(text: &str, overrides: &ToleranceOverrides) -> Result<(ContextCollection, Tolerance)> {
    let doc = OperatorSetDocument::from_json(text)?;
    let base = doc.tolerance()?;
    let tol = overrides.apply(base)?;
    Ok((doc.build(&tol)?, tol))
}

pub fn emit(collection: &ContextCollection) -> String {
    OperatorSetDocument::from_collection(collection).to_json()
}

/// Parses `"re,im;re,im;..."`.
pub fn parse_state(text: &str) -> Result<StateVector> {
    let entries = text
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let parts: Vec<&str> = pair.split(',').map(str::trim).collect();
            let [re, im] = parts[..] else {
                return Err(parse_err(format!("state entry `{pair}` is not `re,im`")));
            };
            let num = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| parse_err(format!("bad number `{s}` in state")))
            };
            Ok(c(num(re)?, num(im)?))
        })
        .collect::<Result<Vec<_>>>()?;
    if entries.is_empty() {
        return Err(parse_err("empty state"));
    }
    Ok(StateVector::from_vec(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::projector::pauli_contexts;

    const PAULI_RAYS: &str = r#"{
        "dim": 2,
        "rays": { "up": [[1,0],[0,0]], "down": [[0,0],[1,0]] },
        "groups": { "z": ["up", "down"] }
    }"#;

    #[test]
    fn ingest_matrix_form() {
        let text = emit(&pauli_contexts());
        let (col, _) = ingest_str(&text, &ToleranceOverrides::default()).unwrap();
        assert_eq!(col.contexts().len(), 3);
        assert_eq!(col.registry().len(), 6);
    }

    #[test]
    fn ingest_ray_form_matches_matrices() {
        let (col, _) = ingest_str(PAULI_RAYS, &ToleranceOverrides::default()).unwrap();
        let z = pauli_contexts();
        let z = z.context("z").unwrap();
        for (a, b) in col.contexts()[0].members().iter().zip(z.members()) {
            assert!(linalg::max_abs(&(a.matrix() - b.matrix())) < 1e-15);
        }
        assert_eq!(col.contexts()[0].members()[0].label(), "up");
    }

    #[test]
    fn rays_are_normalized() {
        let text = r#"{"dim":2,"rays":{"a":[[3,0],[3,0]],"b":[[2,0],[-2,0]]},"groups":{"x":["a","b"]}}"#;
        let (col, _) = ingest_str(text, &ToleranceOverrides::default()).unwrap();
        assert_eq!(col.contexts()[0].members()[0].rank(), 1);
    }

    #[test]
    fn short_ray_is_a_parse_error() {
        let text = r#"{"dim":2,"rays":{"a":[[1,0],[0,0],[0,0]],"b":[[0,0],[1,0]]},"groups":{"z":["a","b"]}}"#;
        assert!(matches!(ingest_str(text, &Default::default()), Err(Error::Parse(_))));
    }

    #[test]
    fn structural_errors() {
        let cases = [
            r#"{"dim":2}"#,
            r#"{"dim":2,"rays":{}}"#,
            r#"{"dim":0,"contexts":{}}"#,
            r#"{"dim":2,"contexts":{},"rays":{},"groups":{}}"#,
            r#"{"dim":2,"contexts":{"z":[[[[1,0]]]]}}"#,
            r#"{"dim":2,"rays":{"a":[[1,0],[0,0]]},"groups":{"z":["a","zz"]}}"#,
            r#"{"dim":2,"contexts":{},"bogus":1}"#,
            "not json",
        ];
        for text in cases {
            assert!(matches!(ingest_str(text, &Default::default()), Err(Error::Parse(_))), "{text}");
        }
    }

    #[test]
    fn validation_errors_are_not_parse_errors() {
        let text = r#"{"dim":2,"contexts":{"bad":[[[[1,0],[0,0]],[[0,0],[0,0]]],[[[0.5,0],[0.5,0]],[[0.5,0],[0.5,0]]]]}}"#;
        assert!(matches!(
            ingest_str(text, &Default::default()),
            Err(Error::PairwiseProductNonzero { .. })
        ));
    }

    #[test]
    fn tolerance_precedence() {
        let text = r#"{"dim":2,"eps_entry":1e-6,"eps_subspace":1e-5,"contexts":{"t":[[[[1,0],[0,0]],[[0,0],[1,0]]]]}}"#;
        let (_, tol) = ingest_str(text, &Default::default()).unwrap();
        assert_eq!((tol.eps_rank, tol.eps_entry, tol.eps_subspace), (1e-10, 1e-6, 1e-5));
        let flags = ToleranceOverrides {
            eps_entry: Some(1e-7),
            ..Default::default()
        };
        let (_, tol) = ingest_str(text, &flags).unwrap();
        assert_eq!(tol.eps_entry, 1e-7);
        let bad = ToleranceOverrides {
            eps_rank: Some(1.0),
            ..Default::default()
        };
        assert!(matches!(ingest_str(text, &bad), Err(Error::InvalidTolerance(_))));
    }

    #[test]
    fn parse_state_forms() {
        let v = parse_state("1,0; 0,-1").unwrap();
        assert_eq!(v.as_slice(), [c(1.0, 0.0), c(0.0, -1.0)]);
        assert!(parse_state("1;0").is_err());
        assert!(parse_state("").is_err());
        assert!(parse_state("a,b").is_err());
    }
}

//! State-dependent truth values of projectors and the search for a global
//! noncontextual 0/1 assignment.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{StateVector, Tolerance};
use crate::projector::{ContextCollection, MaximalContext, Projector, ProjectorId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TruthValue {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    /// The state lies in neither the range nor the kernel.
    #[serde(rename = "undefined")]
    Undefined,
}

impl TruthValue {
    pub fn as_bit(self) -> Option<u8> {
        match self {
            TruthValue::Zero => Some(0),
            TruthValue::One => Some(1),
            TruthValue::Undefined => None,
        }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TruthValue::Zero => "0",
            TruthValue::One => "1",
            TruthValue::Undefined => "undefined",
        })
    }
}

fn check_state(state: &StateVector, dim: usize) -> Result<f64> {
    if state.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: state.len(),
        });
    }
    let norm = state.norm();
    if !norm.is_finite() {
        return Err(Error::NonFinite);
    }
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(norm)
}

/// 1 if `P ψ = ψ`, 0 if `P ψ = 0`, otherwise undefined (relative to `eps_entry`).
pub fn valuate(state: &StateVector, p: &Projector, tol: &Tolerance) -> Result<TruthValue> {
    let norm = check_state(state, p.dim())?;
    let image = p.matrix() * state;
    let bound = tol.eps_entry * norm;
    if (&image - state).norm() <= bound {
        Ok(TruthValue::One)
    } else if image.norm() <= bound {
        Ok(TruthValue::Zero)
    } else {
        Ok(TruthValue::Undefined)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContextValuation {
    pub context: String,
    pub values: Vec<TruthValue>,
    /// Number of ones, present only when every value is defined.
    pub sum: Option<usize>,
}

impl ContextValuation {
    pub fn is_bivalent(&self) -> bool {
        self.sum.is_some()
    }
}

pub fn context_valuation(state: &StateVector, ctx: &MaximalContext, tol: &Tolerance) -> Result<ContextValuation> {
    let values = ctx
        .members()
        .iter()
        .map(|p| valuate(state, p, tol))
        .collect::<Result<Vec<_>>>()?;
    let sum = values
        .iter()
        .map(|v| v.as_bit().map(usize::from))
        .sum::<Option<usize>>();
    Ok(ContextValuation {
        context: ctx.id().to_string(),
        values,
        sum,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ValuationEntry {
    pub id: usize,
    pub label: String,
    pub value: TruthValue,
}

#[derive(Debug, Clone, Serialize)]
pub struct BivalenceReport {
    /// One entry per registry identity.
    pub entries: Vec<ValuationEntry>,
    pub contexts: Vec<ContextValuation>,
    pub undefined: Vec<usize>,
    pub bivalent: bool,
}

pub fn bivalence_report(state: &StateVector, collection: &ContextCollection, tol: &Tolerance) -> Result<BivalenceReport> {
    let entries = collection
        .registry()
        .iter()
        .map(|e| {
            Ok(ValuationEntry {
                id: e.id.0,
                label: e.projector.label().to_string(),
                value: valuate(state, &e.projector, tol)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let contexts = collection
        .contexts()
        .iter()
        .map(|c| context_valuation(state, c, tol))
        .collect::<Result<Vec<_>>>()?;
    let undefined: Vec<usize> = entries
        .iter()
        .filter(|e| e.value == TruthValue::Undefined)
        .map(|e| e.id)
        .collect();
    Ok(BivalenceReport {
        bivalent: undefined.is_empty(),
        entries,
        contexts,
        undefined,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SearchStatus {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNSAT")]
    Unsat,
}

impl fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchStatus::Sat => "SAT",
            SearchStatus::Unsat => "UNSAT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentSearchResult {
    pub status: SearchStatus,
    pub assignment: Option<BTreeMap<ProjectorId, u8>>,
    /// Number of (context, one-position) trials made.
    pub nodes_explored: u64,
}

impl AssignmentSearchResult {
    pub fn is_sat(&self) -> bool {
        self.status == SearchStatus::Sat
    }
}

struct Search<'a> {
    contexts: &'a [Vec<ProjectorId>],
    /// Members that may carry the one; zero-rank projectors never do.
    eligible: Vec<Vec<bool>>,
    values: Vec<Option<u8>>,
    nodes: u64,
}

impl Search<'_> {
    /// Assignments implied by putting the one at `choice`, or `None` on conflict.
    fn implied(&self, ctx: usize, choice: usize) -> Option<Vec<ProjectorId>> {
        if !self.eligible[ctx][choice] {
            return None;
        }
        let ids = &self.contexts[ctx];
        let one = ids[choice];
        let mut fresh = Vec::new();
        for (k, &id) in ids.iter().enumerate() {
            let want = u8::from(k == choice);
            if k != choice && id == one {
                return None;
            }
            match self.values[id.0] {
                Some(v) if v != want => return None,
                Some(_) => {}
                None => {
                    if !fresh.contains(&id) {
                        fresh.push(id);
                    }
                }
            }
        }
        Some(fresh)
    }

    fn apply(&mut self, ctx: usize, choice: usize, fresh: &[ProjectorId]) {
        let one = self.contexts[ctx][choice];
        for &id in fresh {
            self.values[id.0] = Some(u8::from(id == one));
        }
    }

    fn undo(&mut self, fresh: &[ProjectorId]) {
        for &id in fresh {
            self.values[id.0] = None;
        }
    }

    /// Every later context still has some admissible one-position.
    fn forward_ok(&self, from: usize) -> bool {
        (from..self.contexts.len()).all(|c| (0..self.contexts[c].len()).any(|k| self.implied(c, k).is_some()))
    }

    fn run(&mut self, ctx: usize) -> bool {
        if ctx == self.contexts.len() {
            return true;
        }
        for choice in 0..self.contexts[ctx].len() {
            self.nodes += 1;
            let Some(fresh) = self.implied(ctx, choice) else {
                continue;
            };
            self.apply(ctx, choice, &fresh);
            if self.forward_ok(ctx + 1) && self.run(ctx + 1) {
                return true;
            }
            self.undo(&fresh);
        }
        false
    }
}

/// Chronological backtracking for a 0/1 map on registry identities with
/// exactly one 1 in every context. Contexts are taken in input order and the
/// one-position is tried in ascending member order, so the first solution is
/// the lexicographically smallest under that ordering.
pub fn ks_assignment_search(collection: &ContextCollection) -> AssignmentSearchResult {
    let eligible = collection
        .contexts()
        .iter()
        .map(|c| c.members().iter().map(|p| p.rank() > 0).collect())
        .collect();
    let mut search = Search {
        contexts: collection.member_ids(),
        eligible,
        values: vec![None; collection.registry().len()],
        nodes: 0,
    };
    let found = search.run(0);
    let assignment = found.then(|| {
        search
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| (ProjectorId(k), v.expect("every identity occurs in some context")))
            .collect()
    });
    AssignmentSearchResult {
        status: if found { SearchStatus::Sat } else { SearchStatus::Unsat },
        assignment,
        nodes_explored: search.nodes,
    }
}

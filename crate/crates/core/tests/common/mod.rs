#![allow(dead_code)]

use std::collections::BTreeMap;

use kslat::linalg::{c, identity, ComplexMatrix, StateVector, C64};
use kslat::projector::collection_from_matrices;
use kslat::{ContextCollection, MaximalContext, Projector, ProjectorId, Tolerance};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const PAULI_JSON: &str = include_str!("../../data/pauli.json");
pub const PAULI_RAYS_JSON: &str = include_str!("../../data/pauli_rays.json");
pub const CABELLO_JSON: &str = include_str!("../../data/cabello18.json");
pub const BAD_CONTEXT_JSON: &str = include_str!("../../data/bad_context.json");

pub fn tol() -> Tolerance {
    Tolerance::default()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut StdRng) -> C64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_vector(rng: &mut StdRng, n: usize) -> StateVector {
    StateVector::from_fn(n, |_, _| random_complex(rng))
}

pub fn random_matrix(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| random_complex(rng))
}

/// Classical Gram-Schmidt on random vectors; kept separate from the library's
/// orthonormalization so generated inputs do not depend on the code under test.
pub fn random_orthonormal_basis(rng: &mut StdRng, n: usize) -> Vec<StateVector> {
    loop {
        let mut out: Vec<StateVector> = Vec::with_capacity(n);
        for _ in 0..n {
            let mut v = random_vector(rng, n);
            for _ in 0..2 {
                for u in &out {
                    let overlap = u.dotc(&v);
                    v -= u * overlap;
                }
            }
            let norm = v.norm();
            if norm < 1e-3 {
                break;
            }
            out.push(v.unscale(norm));
        }
        if out.len() == n {
            return out;
        }
    }
}

pub fn random_unitary(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_columns(&random_orthonormal_basis(rng, n))
}

pub fn outer(v: &StateVector) -> ComplexMatrix {
    v * v.adjoint()
}

/// Random maximal context with `m` members whose ranks are given.
pub fn random_context(rng: &mut StdRng, id: &str, ranks: &[usize]) -> MaximalContext {
    let n: usize = ranks.iter().sum();
    let basis = random_orthonormal_basis(rng, n);
    let mut offset = 0;
    let members = ranks
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let mut p = ComplexMatrix::zeros(n, n);
            for v in &basis[offset..offset + r] {
                p += outer(v);
            }
            offset += r;
            Projector::validate(p, format!("P{}^{id}", k + 1), &tol()).expect("constructed projector")
        })
        .collect();
    MaximalContext::validate(id, members, &tol()).expect("constructed context")
}

pub fn random_rank1_context(rng: &mut StdRng, id: &str, n: usize) -> MaximalContext {
    random_context(rng, id, &vec![1; n])
}

/// Random context in dim `n` whose first member is the ray `shared`.
pub fn context_through(rng: &mut StdRng, id: &str, shared: &StateVector) -> MaximalContext {
    let n = shared.len();
    let mut basis = vec![shared.clone()];
    while basis.len() < n {
        let mut v = random_vector(rng, n);
        for _ in 0..2 {
            for u in &basis {
                let overlap = u.dotc(&v);
                v -= u * overlap;
            }
        }
        let norm = v.norm();
        if norm > 1e-3 {
            basis.push(v.unscale(norm));
        }
    }
    MaximalContext::from_basis(id, &basis, &tol()).expect("constructed context")
}

pub fn perturb(m: &ComplexMatrix, rng: &mut StdRng, magnitude: f64) -> ComplexMatrix {
    m.map(|z| z + random_complex(rng) * magnitude)
}

/// Pauli contexts rebuilt from matrices carrying entrywise noise.
pub fn noisy_pauli(rng: &mut StdRng, magnitude: f64) -> kslat::Result<ContextCollection> {
    let contexts = kslat::projector::pauli_matrices()
        .into_iter()
        .map(|(id, ms)| (id.to_string(), ms.iter().map(|m| perturb(m, rng, magnitude)).collect()))
        .collect();
    collection_from_matrices(contexts, &tol())
}

pub fn line(entries: &[C64]) -> kslat::Subspace {
    kslat::Subspace::from_span(entries.len(), &[StateVector::from_column_slice(entries)], &tol()).unwrap()
}

/// Every 0/1 assignment over the registry with exactly one 1 per context.
pub fn brute_force_assignments(col: &ContextCollection) -> Vec<BTreeMap<ProjectorId, u8>> {
    let n = col.registry().len();
    assert!(n <= 24, "brute force is exponential");
    let masks: Vec<u32> = col
        .member_ids()
        .iter()
        .map(|ids| ids.iter().fold(0u32, |acc, id| acc | (1 << id.0)))
        .collect();
    (0u32..(1 << n))
        .filter(|bits| masks.iter().all(|m| (bits & m).count_ones() == 1))
        .map(|bits| (0..n).map(|k| (ProjectorId(k), ((bits >> k) & 1) as u8)).collect())
        .collect()
}

/// Counting argument: a one-hot assignment puts exactly `#contexts` ones into
/// the context-by-context tally, while each projector contributes
/// `value * occurrences`. If every projector occurs an even number of times and
/// the number of contexts is odd, no assignment can exist.
pub fn parity_obstruction(col: &ContextCollection) -> bool {
    let mut occurrences = vec![0usize; col.registry().len()];
    for ids in col.member_ids() {
        for id in ids {
            occurrences[id.0] += 1;
        }
    }
    col.contexts().len() % 2 == 1 && occurrences.iter().all(|k| k % 2 == 0)
}

/// Rank of a set of matrices seen as vectors of length n^2, by complex
/// Gaussian elimination with partial pivoting.
pub fn matrix_span_rank(mats: &[ComplexMatrix], eps: f64) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let cols = mats[0].len();
    let mut rows: Vec<Vec<C64>> = mats.iter().map(|m| m.iter().copied().collect()).collect();
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..rows.len()).max_by(|&a, &b| rows[a][col].norm().total_cmp(&rows[b][col].norm()));
        let Some(p) = pivot else { break };
        if rows[p][col].norm() <= eps {
            continue;
        }
        rows.swap(rank, p);
        let lead = rows[rank][col];
        for r in 0..rows.len() {
            if r != rank {
                let f = rows[r][col] / lead;
                if f.norm() > 0.0 {
                    let pivot_row = rows[rank].clone();
                    for (x, y) in rows[r].iter_mut().zip(pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Algebra dimension by growing words letter by letter: keep a word only if it
/// raises the rank, then extend the kept words of the last length by each
/// generator until no new word is kept.
pub fn word_algebra_dimension(generators: &[ComplexMatrix]) -> usize {
    let n = generators[0].nrows();
    let eps = 1e-9;
    let mut kept = vec![identity(n)];
    let mut frontier = vec![identity(n)];
    while !frontier.is_empty() && kept.len() < n * n {
        let mut next = Vec::new();
        for w in &frontier {
            for g in generators {
                let candidate = w * g;
                let norm = candidate.norm();
                if norm <= 1e-12 {
                    continue;
                }
                let candidate = candidate.unscale(norm);
                let mut trial = kept.clone();
                trial.push(candidate.clone());
                if matrix_span_rank(&trial, eps) > kept.len() {
                    kept.push(candidate.clone());
                    next.push(candidate);
                }
            }
        }
        frontier = next;
    }
    kept.len()
}

fn block_diag(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = (a.nrows(), b.nrows());
    let mut m = ComplexMatrix::zeros(p + q, p + q);
    m.view_mut((0, 0), (p, p)).copy_from(a);
    m.view_mut((p, p), (q, q)).copy_from(b);
    m
}

fn conjugate(u: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    u * m * u.adjoint()
}

fn upper_triangular(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| if i <= j { random_complex(rng) } else { c(0.0, 0.0) })
}

/// Named generator sets in dims 2-4 with known reducibility (`true` means a
/// proper common invariant subspace exists by construction).
pub fn generator_corpus() -> Vec<(String, Vec<ComplexMatrix>, Option<bool>)> {
    use kslat::projector::{pauli_x, pauli_y, pauli_z};
    let mut out: Vec<(String, Vec<ComplexMatrix>, Option<bool>)> = Vec::new();
    let six: Vec<ComplexMatrix> = pauli_z().into_iter().chain(pauli_x()).chain(pauli_y()).collect();
    out.push(("pauli six".into(), six, Some(false)));
    out.push(("pauli z".into(), pauli_z().to_vec(), Some(true)));
    out.push(("pauli z and x".into(), pauli_z().into_iter().chain(pauli_x()).collect(), Some(false)));
    out.push(("P1x alone".into(), vec![pauli_x()[0].clone()], Some(true)));
    out.push(("identity and zero".into(), vec![identity(2), ComplexMatrix::zeros(2, 2)], Some(true)));
    out.push((
        "nilpotent".into(),
        vec![kslat::linalg::real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0])],
        Some(true),
    ));

    let mut g = rng(2024);
    for n in 2..=4 {
        for k in 0..3 {
            let a = random_rank1_context(&mut g, "a", n);
            let b = random_rank1_context(&mut g, "b", n);
            let ma: Vec<ComplexMatrix> = a.members().iter().map(|p| p.matrix().clone()).collect();
            let mb: Vec<ComplexMatrix> = b.members().iter().map(|p| p.matrix().clone()).collect();
            out.push((format!("context alone n={n} #{k}"), ma.clone(), Some(true)));
            out.push((format!("two contexts n={n} #{k}"), ma.into_iter().chain(mb).collect(), Some(false)));
            out.push((
                format!("random pair n={n} #{k}"),
                vec![random_matrix(&mut g, n), random_matrix(&mut g, n)],
                Some(false),
            ));
            let u = random_unitary(&mut g, n);
            out.push((
                format!("rotated triangular n={n} #{k}"),
                vec![conjugate(&u, &upper_triangular(&mut g, n)), conjugate(&u, &upper_triangular(&mut g, n))],
                Some(true),
            ));
        }
    }
    for (p, q) in [(1, 2), (2, 1), (1, 3), (2, 2), (3, 1)] {
        let u = random_unitary(&mut g, p + q);
        let gens = (0..3)
            .map(|_| conjugate(&u, &block_diag(&random_matrix(&mut g, p), &random_matrix(&mut g, q))))
            .collect();
        out.push((format!("rotated blocks {p}+{q}"), gens, Some(true)));
    }
    for n in [1usize, 2] {
        let u = random_unitary(&mut g, 2 * n);
        let gens = (0..2)
            .map(|_| {
                let a = random_matrix(&mut g, n);
                conjugate(&u, &block_diag(&a, &a))
            })
            .collect();
        out.push((format!("repeated block {n}+{n}"), gens, Some(true)));
    }
    for n in 3..=4 {
        let shared = random_orthonormal_basis(&mut g, n).remove(0);
        let gens = (0..3)
            .flat_map(|k| {
                context_through(&mut g, &format!("c{k}"), &shared)
                    .members()
                    .iter()
                    .map(|p| p.matrix().clone())
                    .collect::<Vec<_>>()
            })
            .collect();
        out.push((format!("shared ray n={n}"), gens, Some(true)));
    }
    let (cabello, _) = kslat::document::ingest_str(CABELLO_JSON, &Default::default()).unwrap();
    out.push(("eighteen rays".into(), cabello.generators(), None));
    let first: Vec<ComplexMatrix> = cabello.contexts()[0].members().iter().map(|p| p.matrix().clone()).collect();
    out.push(("one context of the eighteen rays".into(), first, Some(true)));
    out
}

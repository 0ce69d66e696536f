//! Command-line front end: argument parsing, dispatch and reports.
//!
//! Exit codes: 0 success, 1 parse or validation failure, 2 `ks-search`
//! found no assignment, 3 an internal cap was exceeded.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::burnside::{self, WITNESS_CAP};
use crate::document::{self, vector_to_pairs, ToleranceOverrides};
use crate::error::{Error, Result};
use crate::lattice::{self, LatticeFamily};
use crate::linalg::{self, identity, real_vector, StateVector, Tolerance};
use crate::projector::{pauli_contexts, ContextCollection};
use crate::subspace::{format_vector, phase_normalized, Subspace};
use crate::valuation::{self, BivalenceReport, SearchStatus};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_UNSAT: u8 = 2;
pub const EXIT_CAP: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "kslat", version, about = "Invariant-subspace lattices and 0/1 assignments for projector contexts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[arg(long, global = true)]
    pub eps_rank: Option<f64>,

    #[arg(long, global = true)]
    pub eps_entry: Option<f64>,

    #[arg(long, global = true)]
    pub eps_subspace: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check projector and context axioms.
    Validate { file: PathBuf },
    /// Invariant-subspace family of each context.
    Lattice {
        file: PathBuf,
        #[arg(long)]
        context: Option<String>,
    },
    /// Intersection of all context families and its triviality.
    Intersect { file: PathBuf },
    /// Algebra closure of all projectors, with a witness when reducible.
    Irreducible { file: PathBuf },
    /// Truth values of every projector for a state given as "re,im;re,im;...".
    Valuate {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        state: String,
    },
    /// Search for a noncontextual 0/1 assignment.
    KsSearch { file: PathBuf },
    /// Built-in reproductions.
    Demo {
        #[arg(value_enum)]
        which: Demo,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    Pauli,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub exit_code: u8,
    pub verdicts: Value,
    pub residuals: Value,
    pub timing_ms: f64,
    pub error: Option<String>,
    pub lines: Vec<String>,
}

impl Report {
    fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            exit_code: EXIT_OK,
            verdicts: json!({}),
            residuals: json!({}),
            timing_ms: 0.0,
            error: None,
            lines: Vec::new(),
        }
    }

    fn failed(command: impl Into<String>, err: &Error) -> Self {
        let mut r = Report::new(command);
        r.exit_code = if err.is_cap() { EXIT_CAP } else { EXIT_INVALID };
        r.error = Some(err.to_string());
        r.lines.push(format!("error: {err}"));
        r
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "exit_code": self.exit_code,
            "verdicts": self.verdicts,
            "residuals": self.residuals,
            "timing_ms": self.timing_ms,
            "error": self.error,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.to_json()).expect("report serializes"),
            Format::Text => {
                let mut out = format!("command: {}\n", self.command);
                for line in &self.lines {
                    out.push_str(line);
                    out.push('\n');
                }
                out.push_str(&format!("exit: {}  ({:.2} ms)", self.exit_code, self.timing_ms));
                out
            }
        }
    }
}

/// Result of one invocation: exit code and the text to print.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: u8,
    pub output: String,
    pub report: Option<Report>,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            return Outcome {
                exit_code: code,
                output: e.render().to_string(),
                report: None,
            };
        }
    };
    let report = execute(&cli);
    Outcome {
        exit_code: report.exit_code,
        output: report.render(cli.format),
        report: Some(report),
    }
}

pub fn execute(cli: &Cli) -> Report {
    let start = Instant::now();
    let overrides = ToleranceOverrides {
        eps_rank: cli.eps_rank,
        eps_entry: cli.eps_entry,
        eps_subspace: cli.eps_subspace,
    };
    let (name, result) = match &cli.command {
        Command::Validate { file } => ("validate", load(file, &overrides).and_then(|(c, t)| validate_report(&c, &t))),
        Command::Lattice { file, context } => (
            "lattice",
            load(file, &overrides).and_then(|(c, t)| lattice_report(&c, &t, context.as_deref())),
        ),
        Command::Intersect { file } => ("intersect", load(file, &overrides).and_then(|(c, t)| intersect_report(&c, &t))),
        Command::Irreducible { file } => (
            "irreducible",
            load(file, &overrides).and_then(|(c, t)| irreducible_report(&c, &t)),
        ),
        Command::Valuate { file, state } => (
            "valuate",
            load(file, &overrides).and_then(|(c, t)| {
                let psi = document::parse_state(state)?;
                valuate_report(&c, &t, &psi)
            }),
        ),
        Command::KsSearch { file } => ("ks-search", load(file, &overrides).and_then(|(c, t)| ks_search_report(&c, &t))),
        Command::Demo { which: Demo::Pauli } => (
            "demo pauli",
            overrides.apply(Tolerance::default()).and_then(|t| demo_pauli(&pauli_contexts(), &t)),
        ),
    };
    let mut report = match result {
        Ok(mut r) => {
            r.command = name.to_string();
            r
        }
        Err(e) => Report::failed(name, &e),
    };
    report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}

fn load(path: &Path, overrides: &ToleranceOverrides) -> Result<(ContextCollection, Tolerance)> {
    document::ingest(path, overrides)
}

fn subspace_json(u: &Subspace, label: &str) -> Value {
    let basis: Vec<Value> = u
        .basis()
        .iter()
        .map(|b| json!(vector_to_pairs(&phase_normalized(b))))
        .collect();
    json!({ "label": label, "dim": u.dim(), "basis": basis })
}

fn family_json(f: &LatticeFamily) -> Value {
    Value::Array(f.iter().map(|(u, label)| subspace_json(u, label)).collect())
}

fn family_line(f: &LatticeFamily) -> String {
    let parts: Vec<String> = f.iter().map(|(u, label)| format!("{label} = {u}")).collect();
    parts.join(" | ")
}

fn tolerance_json(t: &Tolerance) -> Value {
    json!({ "eps_rank": t.eps_rank, "eps_entry": t.eps_entry, "eps_subspace": t.eps_subspace })
}

/// Measured axiom residuals of every context.
fn axiom_residuals(col: &ContextCollection) -> Value {
    let mut out = serde_json::Map::new();
    for ctx in col.contexts() {
        let n = ctx.dim();
        let mut hermitian = 0.0f64;
        let mut idempotent = 0.0f64;
        let mut pairwise = 0.0f64;
        let mut sum = linalg::zeros(n);
        for (i, p) in ctx.members().iter().enumerate() {
            let m = p.matrix();
            hermitian = hermitian.max(linalg::max_abs(&(m - m.adjoint())));
            idempotent = idempotent.max(linalg::max_abs(&(m * m - m)));
            for (j, q) in ctx.members().iter().enumerate() {
                if i != j {
                    pairwise = pairwise.max(linalg::max_abs(&(m * q.matrix())));
                }
            }
            sum += m;
        }
        out.insert(
            ctx.id().to_string(),
            json!({
                "hermitian": hermitian,
                "idempotent": idempotent,
                "pairwise_product": pairwise,
                "sum_minus_identity": linalg::max_abs(&(sum - identity(n))),
            }),
        );
    }
    Value::Object(out)
}

pub fn validate_report(col: &ContextCollection, tol: &Tolerance) -> Result<Report> {
    let mut r = Report::new("validate");
    let contexts: Vec<Value> = col
        .contexts()
        .iter()
        .zip(col.member_ids())
        .map(|(ctx, ids)| {
            let members: Vec<Value> = ctx
                .members()
                .iter()
                .zip(ids)
                .map(|(p, id)| json!({ "label": p.label(), "rank": p.rank(), "registry_id": id.0 }))
                .collect();
            json!({ "id": ctx.id(), "members": members })
        })
        .collect();
    r.verdicts = json!({
        "valid": true,
        "ambient_dim": col.ambient_dim(),
        "contexts": contexts,
        "distinct_projectors": col.registry().len(),
        "tolerance": tolerance_json(tol),
    });
    r.residuals = axiom_residuals(col);
    r.lines.push(format!(
        "valid: {} contexts in dimension {}, {} distinct projectors",
        col.contexts().len(),
        col.ambient_dim(),
        col.registry().len()
    ));
    for ctx in col.contexts() {
        let ranks: Vec<String> = ctx
            .members()
            .iter()
            .map(|p| format!("{} (rank {})", p.label(), p.rank()))
            .collect();
        r.lines.push(format!("  context {}: {}", ctx.id(), ranks.join(", ")));
    }
    Ok(r)
}

fn context_families(col: &ContextCollection, tol: &Tolerance) -> Result<Vec<LatticeFamily>> {
    col.contexts().iter().map(|c| lattice::lat_context(c, tol)).collect()
}

pub fn lattice_report(col: &ContextCollection, tol: &Tolerance, only: Option<&str>) -> Result<Report> {
    let mut r = Report::new("lattice");
    let selected: Vec<_> = match only {
        Some(id) => vec![col.context(id)?],
        None => col.contexts().iter().collect(),
    };
    let mut out = serde_json::Map::new();
    for ctx in selected {
        let fam = lattice::lat_context(ctx, tol)?;
        let closed = fam.is_closed(tol)?;
        out.insert(
            ctx.id().to_string(),
            json!({ "elements": family_json(&fam), "size": fam.len(), "closed_under_meet_join": closed }),
        );
        r.lines.push(format!("Lat({}) [{} elements, closed: {closed}]: {}", ctx.id(), fam.len(), family_line(&fam)));
    }
    r.verdicts = json!({ "lattices": out });
    Ok(r)
}

/// Algebra closure summary shared by several reports.
fn algebra_summary(col: &ContextCollection, tol: &Tolerance) -> Result<(Value, Vec<String>, Option<bool>)> {
    let generators = col.generators();
    let n = col.ambient_dim();
    if n < 2 {
        let note = "algebra route: not applicable in dimension 1".to_string();
        return Ok((json!({ "applicable": false }), vec![note], None));
    }
    let report = burnside::is_irreducible(&generators, tol)?;
    let witness = report.witness.as_ref().map(|w| subspace_json(w, "witness"));
    let mut lines = vec![format!(
        "algebra generated by {} projectors: dimension {} of {} ({} product rounds), irreducible: {}",
        generators.len(),
        report.algebra_dimension,
        n * n,
        report.generations,
        report.irreducible
    )];
    match &report.witness {
        Some(w) => lines.push(format!("invariant subspace witness: {w}")),
        None if !report.irreducible && n > WITNESS_CAP => {
            lines.push(format!("witness search skipped above dimension {WITNESS_CAP}"))
        }
        None if !report.irreducible => lines.push("no witness found by the eigenspace search".into()),
        None => {}
    }
    let value = json!({
        "applicable": true,
        "ambient_dim": n,
        "algebra_dimension": report.algebra_dimension,
        "full_dimension": n * n,
        "generations": report.generations,
        "irreducible": report.irreducible,
        "witness": witness,
        "interpretation": "irreducible means the algebra generated by the projectors equals L(H)",
    });
    Ok((value, lines, Some(report.irreducible)))
}

fn intersection_summary(col: &ContextCollection, tol: &Tolerance) -> Result<(LatticeFamily, Vec<LatticeFamily>)> {
    let fams = context_families(col, tol)?;
    Ok((lattice::lat_intersect(&fams, tol)?, fams))
}

pub fn intersect_report(col: &ContextCollection, tol: &Tolerance) -> Result<Report> {
    let mut r = Report::new("intersect");
    let (common, _) = intersection_summary(col, tol)?;
    let trivial = lattice::is_trivial(&common);
    let (algebra, lines, irreducible) = algebra_summary(col, tol)?;
    r.lines.push(format!("intersection of {} context lattices: {}", col.contexts().len(), family_line(&common)));
    r.lines.push(format!("trivial: {trivial}"));
    r.lines.extend(lines);
    r.verdicts = json!({
        "intersection": family_json(&common),
        "trivial": trivial,
        "algebra": algebra,
        "routes_agree": irreducible.map(|irr| irr == trivial),
    });
    Ok(r)
}

pub fn irreducible_report(col: &ContextCollection, tol: &Tolerance) -> Result<Report> {
    if col.ambient_dim() < 2 {
        return Err(Error::AmbientDimOne);
    }
    let mut r = Report::new("irreducible");
    let (algebra, lines, _) = algebra_summary(col, tol)?;
    r.lines.extend(lines);
    r.verdicts = algebra;
    Ok(r)
}

fn valuation_json(report: &BivalenceReport) -> Value {
    serde_json::to_value(report).expect("valuation serializes")
}

fn valuation_lines(psi: &StateVector, report: &BivalenceReport) -> Vec<String> {
    let mut lines = vec![format!("state {}", format_vector(psi))];
    for e in &report.entries {
        lines.push(format!("  v({}) = {}", e.label, e.value));
    }
    for c in &report.contexts {
        match c.sum {
            Some(s) => lines.push(format!("  context {}: sum = {s}", c.context)),
            None => lines.push(format!("  context {}: non-bivalent for this state", c.context)),
        }
    }
    lines.push(format!("bivalent: {}", report.bivalent));
    lines
}

pub fn valuate_report(col: &ContextCollection, tol: &Tolerance, psi: &StateVector) -> Result<Report> {
    let mut r = Report::new("valuate");
    let report = valuation::bivalence_report(psi, col, tol)?;
    r.lines = valuation_lines(psi, &report);
    r.verdicts = json!({ "state": vector_to_pairs(psi), "valuation": valuation_json(&report) });
    Ok(r)
}

fn search_json(col: &ContextCollection, result: &valuation::AssignmentSearchResult) -> Value {
    let assignment = result.assignment.as_ref().map(|a| {
        let map: serde_json::Map<String, Value> = a
            .iter()
            .map(|(id, v)| (col.entry(*id).projector.label().to_string(), json!(v)))
            .collect();
        Value::Object(map)
    });
    json!({
        "status": result.status,
        "assignment": assignment,
        "nodes_explored": result.nodes_explored,
    })
}

fn search_lines(col: &ContextCollection, result: &valuation::AssignmentSearchResult) -> Vec<String> {
    let mut lines = vec![format!(
        "assignment search: {} after {} nodes",
        result.status, result.nodes_explored
    )];
    if let Some(a) = &result.assignment {
        let ones: Vec<&str> = a
            .iter()
            .filter(|(_, &v)| v == 1)
            .map(|(id, _)| col.entry(*id).projector.label())
            .collect();
        lines.push(format!("  value 1 on: {}", ones.join(", ")));
    }
    lines
}

pub fn ks_search_report(col: &ContextCollection, tol: &Tolerance) -> Result<Report> {
    let mut r = Report::new("ks-search");
    let result = valuation::ks_assignment_search(col);
    r.lines = search_lines(col, &result);
    let (common, _) = intersection_summary(col, tol)?;
    let trivial = lattice::is_trivial(&common);
    r.lines.push(format!("lattice intersection trivial: {trivial}"));
    r.verdicts = json!({
        "search": search_json(col, &result),
        "lattice_intersection_trivial": trivial,
    });
    if result.status == SearchStatus::Unsat {
        r.exit_code = EXIT_UNSAT;
    }
    Ok(r)
}

/// Full reproduction on the Pauli eigenprojectors.
pub fn demo_pauli(col: &ContextCollection, tol: &Tolerance) -> Result<Report> {
    let mut r = Report::new("demo pauli");
    let (common, fams) = intersection_summary(col, tol)?;
    let mut lats = serde_json::Map::new();
    for (ctx, fam) in col.contexts().iter().zip(&fams) {
        lats.insert(ctx.id().to_string(), family_json(fam));
        r.lines.push(format!("Lat({}): {}", ctx.id(), family_line(fam)));
    }
    let trivial = lattice::is_trivial(&common);
    r.lines.push(format!("Lat(z) ∩ Lat(x) ∩ Lat(y): {}", family_line(&common)));
    r.lines.push(format!("intersection trivial: {trivial}"));

    let (algebra, lines, irreducible) = algebra_summary(col, tol)?;
    r.lines.extend(lines);

    let psi = real_vector(&[1.0, 0.0]);
    let val = valuation::bivalence_report(&psi, col, tol)?;
    r.lines.extend(valuation_lines(&psi, &val));

    let search = valuation::ks_assignment_search(col);
    r.lines.extend(search_lines(col, &search));
    r.lines.push(
        "note: the state-dependent valuation is partial while a state-independent one-hot assignment exists".into(),
    );

    r.verdicts = json!({
        "lattices": lats,
        "intersection": family_json(&common),
        "intersection_trivial": trivial,
        "algebra": algebra,
        "routes_agree": irreducible.map(|irr| irr == trivial),
        "state": vector_to_pairs(&psi),
        "valuation": valuation_json(&val),
        "search": search_json(col, &search),
    });
    r.residuals = axiom_residuals(col);
    Ok(r)
}

//! One function per subcommand. Each returns the artifact body together with
//! the identities it asserts.

use std::collections::BTreeMap;
use std::path::Path;

use imd_core::anchored::census::{census_counts, intersection_census};
use imd_core::anchored::{quantum_trace, QuantumPotential};
use imd_core::cycles::{
    hamiltonian_nodes, imd_potential_with, reading_kind, trace_potential, ReadingKind, TracePolynomial,
};
use imd_core::flatness::{
    check_classical_flatness_with, check_connection_with, check_quantum_flatness_with, classical_potentials,
    FlatnessOptions,
};
use imd_core::quiver::{Generators, GraphSpec, KPartiteGraph, Reading, SymplecticData};
use imd_core::reductions::{
    classical_moment_pullback, corrected_potentials, diffop_apply, dynamical_gap, named_hamiltonians,
    weyl_module_action, weyl_to_diffop, BipartiteFrame, NamedHamiltonian, Orientation, PositionPolynomial,
    QuantumMoment, ReductionSystem, TimeSlot,
};
use imd_core::weyl::{WeylAlgebra, WeylElement};
use serde_json::{json, Value};

use crate::error::CliError;

pub struct Assertion {
    pub name: String,
    pub holds: bool,
}

impl Assertion {
    fn new(name: impl Into<String>, holds: bool) -> Assertion {
        Assertion { name: name.into(), holds }
    }
}

pub struct Outcome {
    pub artifact: Value,
    pub assertions: Vec<Assertion>,
}

/// A parsed graph configuration.
pub struct Setup {
    pub spec: GraphSpec,
    pub g: KPartiteGraph,
    pub r: Reading,
    pub s: SymplecticData,
    pub kind: ReadingKind,
}

impl Setup {
    pub fn load(path: &Path) -> Result<Setup, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let spec: GraphSpec =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("invalid graph spec: {e}")))?;
        let (g, r, s) = spec.build()?;
        let kind = match spec.times.as_deref() {
            Some(flag) => ReadingKind::from_times_flag(flag).ok_or_else(|| {
                CliError::Config(format!("unknown times side `{flag}`; expected infinity, zero or both"))
            })?,
            None => reading_kind(&g, &r)?,
        };
        if kind != ReadingKind::Generic && r.is_generic() {
            return Err(CliError::Config("a times side was given but no part is read at infinity".into()));
        }
        Ok(Setup { spec, g, r, s, kind })
    }

    fn graph_json(&self) -> Value {
        let parts: Vec<Value> = (0..self.g.part_count())
            .map(|p| {
                let nodes = self.g.nodes_in(p);
                json!({
                    "label": self.g.label(p),
                    "reading": self.r.value(p).to_string(),
                    "nodes": nodes,
                    "dims": nodes.iter().map(|&n| self.g.dim(n)).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({"parts": parts, "convention": self.spec.convention, "reading_kind": self.kind})
    }
}

fn trace_json(p: &TracePolynomial, gens: &Generators) -> Value {
    let terms: Vec<Value> = p.terms().iter().map(|(m, c)| json!({"monomial": m, "coeff": c.to_text()})).collect();
    json!({"text": p.render(gens), "terms": terms})
}

fn weyl_json(x: &WeylElement, gens: &Generators) -> Value {
    json!({"text": x.render(gens), "terms": x.to_json()})
}

fn generator_table(gens: &Generators) -> Value {
    Value::Array(gens.entries().iter().enumerate().map(|(id, e)| json!({"id": id, "entry": e.to_string()})).collect())
}

pub fn potentials(st: &Setup) -> Result<Outcome, CliError> {
    let classical = classical_potentials(&st.g, &st.r, st.kind)?;
    let quantum = imd_core::anchored::quantum_potentials(&st.g, &st.r, st.kind)?;
    let nodes: Vec<Value> = classical
        .iter()
        .zip(&quantum)
        .map(|((n, w), (_, q))| {
            json!({"node": n, "time": st.g.time(*n).to_string(), "classical": w.to_json(&st.g), "quantum": q.to_json(&st.g)})
        })
        .collect();
    Ok(Outcome { artifact: json!({"graph": st.graph_json(), "potentials": nodes}), assertions: vec![] })
}

pub fn hamiltonians(st: &Setup) -> Result<Outcome, CliError> {
    let gens = Generators::new(&st.g);
    let alg = WeylAlgebra::new(&st.g, &st.s);
    let classical = classical_potentials(&st.g, &st.r, st.kind)?;
    let quantum = imd_core::anchored::quantum_potentials(&st.g, &st.r, st.kind)?;
    let nodes: Vec<Value> = classical
        .iter()
        .zip(&quantum)
        .map(|((n, w), (_, q))| {
            json!({
                "node": n,
                "classical": trace_json(&trace_potential(w, &st.g, &gens), &gens),
                "quantum": weyl_json(&quantum_trace(q, &st.g, &alg), &gens),
            })
        })
        .collect();
    Ok(Outcome {
        artifact: json!({"graph": st.graph_json(), "generators": generator_table(&gens), "hamiltonians": nodes}),
        assertions: vec![],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlatnessMode {
    Both,
    Classical,
    Quantum,
}

pub fn check_flatness(
    st: &Setup,
    mode: FlatnessMode,
    override_file: Option<&Path>,
    opts: &FlatnessOptions,
) -> Result<Outcome, CliError> {
    let opts = FlatnessOptions { kind: Some(st.kind), ..opts.clone() };
    let mut artifact = serde_json::Map::new();
    let mut assertions = Vec::new();
    if let Some(path) = override_file {
        let hamiltonians = read_override(path, &st.g)?;
        let report = check_connection_with(&st.g, &st.s, &hamiltonians, &opts)?;
        assertions.push(Assertion::new("override_flat", report.is_flat()));
        artifact.insert("override".into(), report.to_json());
    } else {
        if mode != FlatnessMode::Quantum {
            let report = check_classical_flatness_with(&st.g, &st.r, &st.s, &opts)?;
            assertions.push(Assertion::new("classical_flat", report.is_flat()));
            artifact.insert("classical".into(), report.to_json());
        }
        if mode != FlatnessMode::Classical {
            let report = check_quantum_flatness_with(&st.g, &st.r, &st.s, &opts)?;
            assertions.push(Assertion::new("quantum_flat", report.is_flat()));
            artifact.insert("quantum".into(), report.to_json());
        }
    }
    artifact.insert("graph".into(), st.graph_json());
    Ok(Outcome { artifact: Value::Object(artifact), assertions })
}

/// Reads `{"hamiltonians": [{"node": n, "terms": [{"word": [...], "coeff": "..."}]}]}`.
fn read_override(path: &Path, g: &KPartiteGraph) -> Result<Vec<(usize, WeylElement)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read override {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("invalid override: {e}")))?;
    let entries = value
        .get("hamiltonians")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Config("override needs a `hamiltonians` array".into()))?;
    let gens = Generators::new(g);
    entries
        .iter()
        .map(|entry| {
            let node = entry
                .get("node")
                .and_then(Value::as_u64)
                .ok_or_else(|| CliError::Config("override entry without a `node`".into()))?;
            let terms = entry.get("terms").cloned().unwrap_or(Value::Array(vec![]));
            Ok((node as usize, WeylElement::from_json(&terms, &gens)?))
        })
        .collect()
}

fn slot_json(slot: TimeSlot, node: usize) -> Value {
    match slot {
        TimeSlot::Factor(i) => json!({"slot": "factor", "index": i, "node": node}),
        TimeSlot::Diagonal(j) => json!({"slot": "diagonal", "index": j, "node": node}),
    }
}

fn slot_node(frame: &BipartiteFrame, slot: TimeSlot) -> usize {
    match slot {
        TimeSlot::Factor(i) => frame.factor_node(i),
        TimeSlot::Diagonal(j) => frame.basis()[j].0,
    }
}

fn require_kind(st: &Setup, wanted: ReadingKind, system: &str) -> Result<(), CliError> {
    let actual = reading_kind(&st.g, &st.r)?;
    if actual != wanted {
        return Err(CliError::Unsupported(format!(
            "comparison for {system} needs a {wanted:?} graph, found {actual:?}"
        )));
    }
    Ok(())
}

pub fn reduce(st: &Setup, system: ReductionSystem, compare: bool) -> Result<Outcome, CliError> {
    if compare {
        let wanted = match system {
            ReductionSystem::Kz => ReadingKind::Star,
            ReductionSystem::Dmt => ReadingKind::DualStar,
            _ => ReadingKind::Bipartite,
        };
        require_kind(st, wanted, &format!("{system:?}").to_lowercase())?;
    }
    let frame = BipartiteFrame::new(&st.g, &st.r, &st.s)?;
    let named = named_hamiltonians(system, frame.times())?;
    let listed: Vec<Value> = named
        .iter()
        .map(|h| {
            let mut v = slot_json(h.slot, slot_node(&frame, h.slot));
            v["text"] = json!(match &h.value {
                imd_core::reductions::Hamiltonian::Classical(x) => x.to_string(),
                imd_core::reductions::Hamiltonian::Quantum(x) => x.to_string(),
            });
            v["value"] = h.value.to_json();
            v
        })
        .collect();
    let mut artifact = json!({"graph": st.graph_json(), "system": system, "hamiltonians": listed});
    let mut assertions = Vec::new();
    if compare {
        let comparisons = match system {
            ReductionSystem::Kz => compare_kz(st, &named, &mut assertions)?,
            ReductionSystem::Dmt => compare_dmt(st, &named, &mut assertions)?,
            ReductionSystem::Fmtv => compare_fmtv(st, &named, &mut assertions)?,
            ReductionSystem::Jmms => compare_jmms(st, &frame, &named, &mut assertions)?,
            other => return Err(CliError::Usage(format!("no comparison is defined for {other:?}"))),
        };
        artifact["comparisons"] = Value::Array(comparisons);
    }
    Ok(Outcome { artifact, assertions })
}

fn quantum_value(h: &NamedHamiltonian) -> &imd_core::reductions::UEnvElement {
    h.value.as_quantum().expect("quantum system")
}

/// `μ*(KZ_i) - Ĥ_i` on a star, traced in the moment's target algebra.
fn compare_kz(st: &Setup, named: &[NamedHamiltonian], out: &mut Vec<Assertion>) -> Result<Vec<Value>, CliError> {
    let qm = QuantumMoment::new(&st.g, &st.r, &st.s)?;
    let gens = qm.target().generators();
    let slqc: BTreeMap<usize, QuantumPotential> =
        imd_core::anchored::quantum_potentials(&st.g, &st.r, ReadingKind::Star)?.into_iter().collect();
    let mut rows = Vec::new();
    for h in named {
        let node = slot_node(qm.frame(), h.slot);
        let residue = qm.pullback(quantum_value(h))?.sub(&quantum_trace(&slqc[&node], &st.g, qm.target()));
        out.push(Assertion::new(format!("kz_pullback_node_{node}"), residue.is_zero()));
        let mut row = slot_json(h.slot, node);
        row["residue"] = weyl_json(&residue, gens);
        row["zero"] = json!(residue.is_zero());
        rows.push(row);
    }
    Ok(rows)
}

/// On a dual star, `μ*(DMT_j) - Ĥ_j` is nonzero; it must equal the
/// change-of-anchor correction plus the image of the dynamical gap, both of
/// order below four.
fn compare_dmt(st: &Setup, named: &[NamedHamiltonian], out: &mut Vec<Assertion>) -> Result<Vec<Value>, CliError> {
    let qm = QuantumMoment::new(&st.g, &st.r, &st.s)?;
    let target = qm.target();
    let gens = target.generators();
    let slqc: BTreeMap<usize, QuantumPotential> =
        imd_core::anchored::quantum_potentials(&st.g, &st.r, ReadingKind::DualStar)?.into_iter().collect();
    let (_, corrected) = corrected_potentials(&st.g, &st.r)?;
    let corrected: BTreeMap<usize, QuantumPotential> = corrected.into_iter().collect();
    let mut rows = Vec::new();
    for h in named {
        let TimeSlot::Diagonal(j) = h.slot else { continue };
        let node = slot_node(qm.frame(), h.slot);
        let original = quantum_trace(&slqc[&node], &st.g, target);
        let raw = qm.pullback(quantum_value(h))?.sub(&original);
        let anchor = quantum_trace(&corrected[&node], &st.g, target).sub(&original);
        let gap = qm.pullback(&dynamical_gap(j, frame_times(&qm))?)?;
        let mismatch = raw.sub(&anchor).sub(&gap);
        let order = raw.filtration_order().ok();
        let vanishes = order.is_none_or(|o| o < 4);
        out.push(Assertion::new(format!("dmt_residue_matches_correction_node_{node}"), mismatch.is_zero()));
        out.push(Assertion::new(format!("dmt_residue_vanishes_semiclassically_node_{node}"), vanishes));
        let mut row = slot_json(h.slot, node);
        row["raw_residue"] = weyl_json(&raw, gens);
        row["anchor_correction"] = weyl_json(&anchor, gens);
        row["dynamical_gap_image"] = weyl_json(&gap, gens);
        row["mismatch"] = weyl_json(&mismatch, gens);
        row["residue_order"] = json!(order);
        row["vanishes_semiclassically"] = json!(vanishes);
        rows.push(row);
    }
    Ok(rows)
}

fn frame_times(qm: &QuantumMoment) -> &imd_core::reductions::ReductionTimes {
    qm.frame().times()
}

/// On a bipartite graph, `μ*(FMTV) - Ĥ` equals the corrected minus the
/// original Hamiltonian, which has order below four.
fn compare_fmtv(st: &Setup, named: &[NamedHamiltonian], out: &mut Vec<Assertion>) -> Result<Vec<Value>, CliError> {
    let qm = QuantumMoment::new(&st.g, &st.r, &st.s)?;
    let target = qm.target();
    let gens = target.generators();
    let slqc: BTreeMap<usize, QuantumPotential> =
        imd_core::anchored::quantum_potentials(&st.g, &st.r, ReadingKind::Bipartite)?.into_iter().collect();
    let (_, corrected) = corrected_potentials(&st.g, &st.r)?;
    let corrected: BTreeMap<usize, QuantumPotential> = corrected.into_iter().collect();
    let mut rows = Vec::new();
    for h in named {
        let node = slot_node(qm.frame(), h.slot);
        let image = qm.pullback(quantum_value(h))?;
        let raw = image.sub(&quantum_trace(&slqc[&node], &st.g, target));
        let mismatch = image.sub(&quantum_trace(&corrected[&node], &st.g, target));
        let order = raw.filtration_order().ok();
        let vanishes = order.is_none_or(|o| o < 4);
        out.push(Assertion::new(format!("fmtv_pullback_is_corrected_node_{node}"), mismatch.is_zero()));
        out.push(Assertion::new(format!("fmtv_residue_vanishes_semiclassically_node_{node}"), vanishes));
        let mut row = slot_json(h.slot, node);
        row["raw_residue"] = weyl_json(&raw, gens);
        row["mismatch"] = weyl_json(&mismatch, gens);
        row["residue_order"] = json!(order);
        row["vanishes_semiclassically"] = json!(vanishes);
        rows.push(row);
    }
    Ok(rows)
}

/// Classical pullback of JMMS against the bipartite Hamiltonians.
fn compare_jmms(
    st: &Setup,
    frame: &BipartiteFrame,
    named: &[NamedHamiltonian],
    out: &mut Vec<Assertion>,
) -> Result<Vec<Value>, CliError> {
    let gens = Generators::new(&st.g);
    let mut rows = Vec::new();
    for h in named {
        let node = slot_node(frame, h.slot);
        let x = h.value.as_classical().expect("classical system");
        let w = imd_potential_with(&st.g, &st.r, ReadingKind::Bipartite, node)?.total();
        let residue = classical_moment_pullback(x, frame, &gens)?.sub(&trace_potential(&w, &st.g, &gens));
        out.push(Assertion::new(format!("jmms_pullback_node_{node}"), residue.is_zero()));
        let mut row = slot_json(h.slot, node);
        row["residue"] = trace_json(&residue, &gens);
        row["zero"] = json!(residue.is_zero());
        rows.push(row);
    }
    Ok(rows)
}

/// Positions along the triangle cycle when every part has one node, else the
/// positive arrows.
fn default_orientation(g: &KPartiteGraph) -> Result<Orientation, CliError> {
    let one_per_part = (0..g.part_count()).all(|p| g.nodes_in(p).len() == 1);
    if one_per_part && g.node_count() >= 3 {
        Ok(Orientation::cyclic(g)?)
    } else {
        Ok(Orientation::new(g, g.arrows().into_iter().filter(|&a| g.is_positive(a)))?)
    }
}

pub fn diffop(st: &Setup, node: usize, poly: &str) -> Result<Outcome, CliError> {
    if node >= st.g.node_count() {
        return Err(CliError::Usage(format!("node {node} does not exist")));
    }
    if !hamiltonian_nodes(&st.g, &st.r, st.kind).contains(&node) {
        return Err(CliError::Usage(format!("node {node} carries no time in this reading")));
    }
    let alg = WeylAlgebra::new(&st.g, &st.s);
    let w = imd_potential_with(&st.g, &st.r, st.kind, node)?.total();
    let h = quantum_trace(&imd_core::anchored::quantise_imd(&w)?, &st.g, &alg);
    let orientation = default_orientation(&st.g)?;
    let (op, space) = weyl_to_diffop(&h, &st.g, &alg, &orientation)?;
    let p = PositionPolynomial::parse(poly, &space)?;
    let applied = diffop_apply(&op, &p);
    let oracle = weyl_module_action(&h, &space, &p);
    let positions: Vec<&str> = (0..space.len()).map(|v| space.name(v)).collect();
    let artifact = json!({
        "graph": st.graph_json(),
        "node": node,
        "positions": positions,
        "operator": {"text": op.render(&space), "terms": op.to_json(&space)},
        "input": p.render(&space),
        "result": applied.render(&space),
    });
    Ok(Outcome { artifact, assertions: vec![Assertion::new("action_matches_weyl_module", applied == oracle)] })
}

pub fn intersections(st: &Setup) -> Result<Outcome, CliError> {
    let classes = intersection_census(&st.g, &st.s);
    let (total, nonzero, free) = census_counts(&classes);
    let artifact = json!({
        "graph": st.graph_json(),
        "classes": serde_json::to_value(&classes).map_err(|e| CliError::Other(e.to_string()))?,
        "counts": {"classes": total, "nonzero_bracket": nonzero, "free_of_antiparallel": free},
    });
    Ok(Outcome { artifact, assertions: vec![] })
}

//! Complete k-partite graphs, their readings, and the symplectic data on the
//! space of representations of the doubled quiver.
//!
//! Nodes are numbered globally: the nodes of part 0 come first, then those of
//! part 1, and so on. Every arrow `tail -> head` joins nodes in different parts.
//! For each edge one arrow is called positive: the one whose head lies in the
//! part with the smaller index. With the zero part listed before the infinity
//! part, this makes the maps `Q: W^inf -> W^0` positive.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalars::{Scalar, ScalarError, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("invalid reading: {0}")]
    InvalidReading(String),
    #[error("part {0} has no nodes")]
    EmptyPart(usize),
    #[error("nodes {0} and {1} lie in the same part")]
    NotAdjacent(usize, usize),
    #[error("node {0} does not exist")]
    UnknownNode(usize),
    #[error("inconsistent graph description: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReadingValue {
    Finite(Scalar),
    Infinity,
}

impl ReadingValue {
    pub fn parse(text: &str) -> Result<ReadingValue, QuiverError> {
        match text.trim() {
            "inf" | "infinity" | "∞" => Ok(ReadingValue::Infinity),
            other => Ok(ReadingValue::Finite(Scalar::parse(other)?)),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ReadingValue::Infinity)
    }

    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            ReadingValue::Finite(s) => Some(s),
            ReadingValue::Infinity => None,
        }
    }
}

impl fmt::Display for ReadingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReadingValue::Finite(s) => write!(f, "{s}"),
            ReadingValue::Infinity => write!(f, "inf"),
        }
    }
}

/// One value per part, injective, with at most one infinite value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reading {
    values: Vec<ReadingValue>,
}

impl Reading {
    pub fn new(values: Vec<ReadingValue>) -> Result<Reading, QuiverError> {
        let infinite = values.iter().filter(|v| v.is_infinite()).count();
        if infinite > 1 {
            return Err(QuiverError::InvalidReading("more than one part is read at infinity".into()));
        }
        for (i, a) in values.iter().enumerate() {
            for b in &values[i + 1..] {
                if let (Some(x), Some(y)) = (a.finite(), b.finite()) {
                    if x == y {
                        return Err(QuiverError::InvalidReading(format!("value {x} is used twice")));
                    }
                }
            }
        }
        Ok(Reading { values })
    }

    /// The reading `a_j` on every part `j`.
    pub fn symbolic(parts: usize) -> Reading {
        Reading { values: (0..parts as u32).map(|j| ReadingValue::Finite(Scalar::reading(j))).collect() }
    }

    pub fn values(&self) -> &[ReadingValue] {
        &self.values
    }

    pub fn value(&self, part: usize) -> &ReadingValue {
        &self.values[part]
    }

    pub fn is_generic(&self) -> bool {
        self.values.iter().all(|v| !v.is_infinite())
    }

    pub fn infinite_part(&self) -> Option<usize> {
        self.values.iter().position(ReadingValue::is_infinite)
    }
}

/// An arrow of the doubled quiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arrow {
    pub tail: usize,
    pub head: usize,
}

impl Arrow {
    pub fn new(tail: usize, head: usize) -> Arrow {
        Arrow { tail, head }
    }

    /// The antiparallel arrow.
    pub fn star(self) -> Arrow {
        Arrow { tail: self.head, head: self.tail }
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.tail, self.head)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KPartiteGraph {
    labels: Vec<String>,
    part_nodes: Vec<Vec<usize>>,
    node_part: Vec<usize>,
    dims: Vec<usize>,
    times: Vec<Symbol>,
}

impl KPartiteGraph {
    pub fn part_count(&self) -> usize {
        self.part_nodes.len()
    }

    pub fn node_count(&self) -> usize {
        self.node_part.len()
    }

    pub fn label(&self, part: usize) -> &str {
        &self.labels[part]
    }

    pub fn part_of(&self, node: usize) -> usize {
        self.node_part[node]
    }

    pub fn nodes_in(&self, part: usize) -> &[usize] {
        &self.part_nodes[part]
    }

    pub fn dim(&self, node: usize) -> usize {
        self.dims[node]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn time(&self, node: usize) -> Symbol {
        self.times[node]
    }

    pub fn time_scalar(&self, node: usize) -> Scalar {
        Scalar::symbol(self.times[node])
    }

    pub fn nodes(&self) -> std::ops::Range<usize> {
        0..self.node_count()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.node_part[i] != self.node_part[j]
    }

    /// Positive arrows have their head in the part with the smaller index.
    pub fn is_positive(&self, a: Arrow) -> bool {
        self.node_part[a.head] < self.node_part[a.tail]
    }

    pub fn check_arrow(&self, a: Arrow) -> Result<(), QuiverError> {
        for n in [a.tail, a.head] {
            if n >= self.node_count() {
                return Err(QuiverError::UnknownNode(n));
            }
        }
        if !self.adjacent(a.tail, a.head) {
            return Err(QuiverError::NotAdjacent(a.tail, a.head));
        }
        Ok(())
    }

    /// All arrows in increasing `(tail, head)` order; positions are the arrow ids.
    pub fn arrows(&self) -> Vec<Arrow> {
        let mut out = Vec::new();
        for tail in self.nodes() {
            for head in self.nodes() {
                if self.adjacent(tail, head) {
                    out.push(Arrow::new(tail, head));
                }
            }
        }
        out
    }

    pub fn arrow_id(&self, a: Arrow) -> Option<usize> {
        self.arrows().binary_search(&a).ok()
    }

    pub fn arrow_by_id(&self, id: usize) -> Option<Arrow> {
        self.arrows().get(id).copied()
    }

    /// Node index within its part.
    pub fn local_index(&self, node: usize) -> usize {
        let p = self.node_part[node];
        node - self.part_nodes[p][0]
    }
}

/// Builds the graph with parts of the given sizes, node dimensions listed in
/// global node order, and one reading value per part. Node `i` gets time `t{i}`.
pub fn build_graph(
    part_sizes: &[usize],
    dims: &[usize],
    reading: Vec<ReadingValue>,
) -> Result<(KPartiteGraph, Reading), QuiverError> {
    if part_sizes.len() != reading.len() {
        return Err(QuiverError::Inconsistent(format!(
            "{} parts but {} reading values",
            part_sizes.len(),
            reading.len()
        )));
    }
    if let Some(p) = part_sizes.iter().position(|&s| s == 0) {
        return Err(QuiverError::EmptyPart(p));
    }
    let total: usize = part_sizes.iter().sum();
    if dims.len() != total {
        return Err(QuiverError::Inconsistent(format!("{total} nodes but {} dimensions", dims.len())));
    }
    if dims.contains(&0) {
        return Err(QuiverError::Inconsistent("node dimensions must be positive".into()));
    }
    let reading = Reading::new(reading)?;
    let mut part_nodes = Vec::new();
    let mut node_part = Vec::new();
    for (p, &size) in part_sizes.iter().enumerate() {
        let start = node_part.len();
        part_nodes.push((start..start + size).collect());
        node_part.extend(std::iter::repeat_n(p, size));
    }
    let graph = KPartiteGraph {
        labels: (0..part_sizes.len()).map(|p| format!("j{p}")).collect(),
        part_nodes,
        node_part,
        dims: dims.to_vec(),
        times: (0..total as u32).map(Symbol::time).collect(),
    };
    Ok((graph, reading))
}

/// The weight between two nodes: `1/(a_i - a_j)` for finite readings,
/// `1` when node `i` is read at infinity and `-1` when node `j` is.
pub fn phi_weight(g: &KPartiteGraph, r: &Reading, i: usize, j: usize) -> Result<Scalar, QuiverError> {
    g.check_arrow(Arrow::new(i, j))?;
    let (pi, pj) = (g.part_of(i), g.part_of(j));
    Ok(match (r.value(pi), r.value(pj)) {
        (ReadingValue::Infinity, _) => Scalar::one(),
        (_, ReadingValue::Infinity) => -Scalar::one(),
        (ReadingValue::Finite(a), ReadingValue::Finite(b)) => (a - b).inverse()?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    Unit,
    PhiInverse,
    Phi,
}

/// Bracket constants of the doubled quiver: for each positive arrow `alpha`,
/// `[X^alpha_{kl}, X^{alpha*}_{lk}] = c`, and the reversed pair gives `-c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticData {
    constants: BTreeMap<Arrow, Scalar>,
}

impl SymplecticData {
    /// Explicit constants keyed by positive arrow; every edge must be present and nonzero.
    pub fn from_constants(
        g: &KPartiteGraph,
        constants: BTreeMap<Arrow, Scalar>,
    ) -> Result<SymplecticData, QuiverError> {
        for a in g.arrows().into_iter().filter(|&a| g.is_positive(a)) {
            match constants.get(&a) {
                Some(c) if !c.is_zero() => {}
                _ => return Err(QuiverError::Inconsistent(format!("missing or zero constant on {a}"))),
            }
        }
        if constants.len() != g.arrows().len() / 2 {
            return Err(QuiverError::Inconsistent("constants must be keyed by positive arrows".into()));
        }
        Ok(SymplecticData { constants })
    }

    pub fn positive_constant(&self, positive: Arrow) -> &Scalar {
        &self.constants[&positive]
    }

    /// The constant `[X^a, X^b]` when `b` is the partner of `a`, else zero.
    pub fn bracket(&self, a: Arrow, b: Arrow) -> Scalar {
        if b != a.star() {
            return Scalar::zero();
        }
        match (self.constants.get(&a), self.constants.get(&b)) {
            (Some(c), _) => c.clone(),
            (None, Some(c)) => -c,
            (None, None) => Scalar::zero(),
        }
    }

    pub fn constants(&self) -> &BTreeMap<Arrow, Scalar> {
        &self.constants
    }

    /// Returns a copy with the whole structure rescaled by `-1`.
    pub fn opposite(&self) -> SymplecticData {
        SymplecticData { constants: self.constants.iter().map(|(a, c)| (*a, -c)).collect() }
    }
}

pub fn default_symplectic(g: &KPartiteGraph, r: &Reading, convention: Convention) -> SymplecticData {
    let constants = g
        .arrows()
        .into_iter()
        .filter(|&a| g.is_positive(a))
        .map(|a| {
            let c = match convention {
                Convention::Unit => Scalar::one(),
                Convention::PhiInverse => phi_weight(g, r, a.head, a.tail)
                    .and_then(|w| Ok(w.inverse()?))
                    .expect("adjacent nodes with distinct readings"),
                Convention::Phi => phi_weight(g, r, a.head, a.tail).expect("adjacent nodes"),
            };
            (a, c)
        })
        .collect();
    SymplecticData { constants }
}

/// One matrix entry `X^alpha_{row,col}`, with `row` indexing the head space
/// and `col` the tail space (both zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entry {
    pub arrow: Arrow,
    pub row: usize,
    pub col: usize,
}

impl Entry {
    pub fn partner(self) -> Entry {
        Entry { arrow: self.arrow.star(), row: self.col, col: self.row }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X[{}->{}]({},{})", self.arrow.tail, self.arrow.head, self.row + 1, self.col + 1)
    }
}

/// Numbering of all entry variables of a graph.
///
/// Positive entries come first; within each sign the key is
/// `(part of tail, part of head, tail, head, row, col)`.
#[derive(Debug, Clone)]
pub struct Generators {
    entries: Vec<Entry>,
    index: HashMap<Entry, u32>,
    partner: Vec<u32>,
    positive_count: usize,
}

impl Generators {
    pub fn new(g: &KPartiteGraph) -> Generators {
        let mut entries = Vec::new();
        for a in g.arrows() {
            for row in 0..g.dim(a.head) {
                for col in 0..g.dim(a.tail) {
                    entries.push(Entry { arrow: a, row, col });
                }
            }
        }
        let key = |e: &Entry| {
            (
                !g.is_positive(e.arrow),
                g.part_of(e.arrow.tail),
                g.part_of(e.arrow.head),
                e.arrow.tail,
                e.arrow.head,
                e.row,
                e.col,
            )
        };
        entries.sort_by_key(key);
        let positive_count = entries.iter().filter(|e| g.is_positive(e.arrow)).count();
        let index: HashMap<Entry, u32> = entries.iter().enumerate().map(|(i, e)| (*e, i as u32)).collect();
        let partner = entries.iter().map(|e| index[&e.partner()]).collect();
        Generators { entries, index, partner, positive_count }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, id: u32) -> Entry {
        self.entries[id as usize]
    }

    pub fn id(&self, e: Entry) -> u32 {
        self.index[&e]
    }

    pub fn get(&self, e: Entry) -> Option<u32> {
        self.index.get(&e).copied()
    }

    pub fn partner(&self, id: u32) -> u32 {
        self.partner[id as usize]
    }

    pub fn is_positive(&self, id: u32) -> bool {
        (id as usize) < self.positive_count
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }
}

/// JSON graph description accepted by the command-line front end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub parts: Vec<PartSpec>,
    #[serde(default)]
    pub convention: Convention,
    /// Which side carries the times for a degenerate bipartite reading.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartSpec {
    #[serde(default)]
    pub label: Option<String>,
    pub reading: String,
    pub nodes: Vec<NodeSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub dim: usize,
}

impl GraphSpec {
    pub fn build(&self) -> Result<(KPartiteGraph, Reading, SymplecticData), QuiverError> {
        let sizes: Vec<usize> = self.parts.iter().map(|p| p.nodes.len()).collect();
        let dims: Vec<usize> = self.parts.iter().flat_map(|p| p.nodes.iter().map(|n| n.dim)).collect();
        let reading = self.parts.iter().map(|p| ReadingValue::parse(&p.reading)).collect::<Result<Vec<_>, _>>()?;
        let (mut g, r) = build_graph(&sizes, &dims, reading)?;
        for (p, spec) in self.parts.iter().enumerate() {
            if let Some(label) = &spec.label {
                g.labels[p] = label.clone();
            }
        }
        let s = default_symplectic(&g, &r, self.convention);
        Ok((g, r, s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(n: i64) -> ReadingValue {
        ReadingValue::Finite(Scalar::from_int(n))
    }

    fn triangle() -> (KPartiteGraph, Reading) {
        let r = Reading::symbolic(3);
        build_graph(&[1, 1, 1], &[1, 1, 1], r.values().to_vec()).unwrap()
    }

    #[test]
    fn star_graph_shape() {
        let (g, r) = build_graph(&[1, 3], &[2, 1, 1, 1], vec![fin(0), ReadingValue::Infinity]).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.nodes_in(1), &[1, 2, 3]);
        assert_eq!(g.arrows().len(), 6);
        assert!(!r.is_generic());
        assert!(g.is_positive(Arrow::new(2, 0)));
        assert!(!g.is_positive(Arrow::new(0, 2)));
    }

    #[test]
    fn rejects_bad_readings_and_parts() {
        assert!(matches!(build_graph(&[2, 2], &[1; 4], vec![fin(0), fin(0)]), Err(QuiverError::InvalidReading(_))));
        assert!(matches!(
            build_graph(&[1, 1], &[1; 2], vec![ReadingValue::Infinity, ReadingValue::Infinity]),
            Err(QuiverError::InvalidReading(_))
        ));
        assert!(matches!(build_graph(&[1, 0], &[1], vec![fin(0), fin(1)]), Err(QuiverError::EmptyPart(1))));
    }

    #[test]
    fn phi_weights() {
        let (g, r) = triangle();
        let w = phi_weight(&g, &r, 0, 1).unwrap();
        assert_eq!(w, (Scalar::reading(0) - Scalar::reading(1)).inverse().unwrap());
        assert!((w + phi_weight(&g, &r, 1, 0).unwrap()).is_zero());
        let (s, sr) = build_graph(&[1, 1], &[1, 1], vec![fin(0), ReadingValue::Infinity]).unwrap();
        assert!(phi_weight(&s, &sr, 1, 0).unwrap().is_one());
        assert_eq!(phi_weight(&s, &sr, 0, 1).unwrap(), -Scalar::one());
        let (b, br) = build_graph(&[2, 1], &[1; 3], vec![fin(0), fin(1)]).unwrap();
        assert_eq!(phi_weight(&b, &br, 0, 1), Err(QuiverError::NotAdjacent(0, 1)));
    }

    #[test]
    fn symplectic_conventions() {
        let (g, r) = triangle();
        let unit = default_symplectic(&g, &r, Convention::Unit);
        assert!(unit.constants().values().all(Scalar::is_one));
        assert_eq!(unit.constants().len(), 3);
        let phi = default_symplectic(&g, &r, Convention::PhiInverse);
        let c = phi.positive_constant(Arrow::new(1, 0));
        assert_eq!(*c, Scalar::reading(0) - Scalar::reading(1));
        assert_eq!(phi.bracket(Arrow::new(0, 1), Arrow::new(1, 0)), -c);
        assert!(phi.bracket(Arrow::new(0, 1), Arrow::new(0, 2)).is_zero());
    }

    #[test]
    fn generator_numbering() {
        let (g, _) = build_graph(&[1, 2], &[2, 1, 1], vec![fin(0), ReadingValue::Infinity]).unwrap();
        let gens = Generators::new(&g);
        assert_eq!(gens.len(), 8);
        for id in 0..gens.len() as u32 {
            assert_eq!(gens.partner(gens.partner(id)), id);
            assert_ne!(gens.is_positive(id), gens.is_positive(gens.partner(id)));
        }
        assert_eq!(gens.entry(0).to_string(), "X[1->0](1,1)");
    }

    #[test]
    fn graph_spec_json() {
        let spec: GraphSpec = serde_json::from_str(
            r#"{"parts":[{"label":"zero","reading":"0","nodes":[{"dim":2}]},
                         {"reading":"inf","nodes":[{"dim":1},{"dim":1}]}],
                "convention":"unit"}"#,
        )
        .unwrap();
        let (g, r, s) = spec.build().unwrap();
        assert_eq!(g.label(0), "zero");
        assert_eq!(r.infinite_part(), Some(1));
        assert_eq!(s.constants().len(), 2);
    }
}

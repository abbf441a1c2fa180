//! Quantum potentials built from anchored cycles.
//!
//! An [`AnchoredCycle`] is a closed walk with a chosen first arrow. Its trace
//! is the ordered product of entry operators read from the last arrow walked
//! down to the anchor, which stands rightmost. Two anchorings define the same
//! operator when one is reached from the other by admissible swaps: cut the
//! walk into two blocks with no antiparallel arrows between them and exchange
//! the blocks.

pub mod census;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::cycles::{
    classify_word, hamiltonian_nodes, imd_potential_with, Cycle, CycleError, CycleKind, Potential, ReadingKind,
};
use crate::quiver::{Arrow, Entry, KPartiteGraph, Reading, SymplecticData};
use crate::scalars::Scalar;
use crate::weyl::{WeylAlgebra, WeylElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnchoredError {
    #[error("{0} is not a cycle of a Hamiltonian potential")]
    NotAnIMDCycle(String),
    #[error("no closed commutator formula for this pair: {0}")]
    UnsupportedPair(String),
    #[error("anchor index {0} is out of range")]
    BadAnchor(usize),
    #[error(transparent)]
    Cycle(#[from] CycleError),
}

/// A walk whose first arrow is the anchor, reduced to the least member of
/// its admissible-swap class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnchoredCycle {
    word: Vec<Arrow>,
}

fn rotate<T: Clone>(word: &[T], k: usize) -> Vec<T> {
    word[k..].iter().chain(&word[..k]).cloned().collect()
}

fn swap_allowed(word: &[Arrow], cut: usize) -> bool {
    let (a, b) = word.split_at(cut);
    !a.iter().any(|x| b.contains(&x.star()))
}

impl AnchoredCycle {
    /// The walk `word`, anchored at `word[0]`.
    pub fn new(word: Vec<Arrow>) -> Result<AnchoredCycle, AnchoredError> {
        Cycle::new(word.clone())?;
        let n = word.len();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([0usize]);
        seen.insert(0usize);
        while let Some(offset) = queue.pop_front() {
            let current = rotate(&word, offset);
            for cut in 1..n {
                if swap_allowed(&current, cut) {
                    let next = (offset + cut) % n;
                    if seen.insert(next) {
                        queue.push_back(next);
                    }
                }
            }
        }
        let best = seen.into_iter().map(|k| rotate(&word, k)).min().expect("nonempty class");
        Ok(AnchoredCycle { word: best })
    }

    /// The closed walk through `nodes`, anchored at its first arrow.
    pub fn through(nodes: &[usize]) -> Result<AnchoredCycle, AnchoredError> {
        let n = nodes.len();
        AnchoredCycle::new((0..n).map(|p| Arrow::new(nodes[p], nodes[(p + 1) % n])).collect())
    }

    /// The same walk with the anchor moved to position `k`.
    pub fn rotated(&self, k: usize) -> Result<AnchoredCycle, AnchoredError> {
        if k >= self.word.len() {
            return Err(AnchoredError::BadAnchor(k));
        }
        AnchoredCycle::new(rotate(&self.word, k))
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn anchor(&self) -> Arrow {
        self.word[0]
    }

    pub fn kind(&self) -> CycleKind {
        classify_word(&self.word)
    }

    /// The underlying cycle, forgetting the anchor.
    pub fn classical(&self) -> Cycle {
        Cycle::new(self.word.clone()).expect("valid walk")
    }

    /// All canonical anchorings reachable by moving the anchor.
    pub fn all_anchorings(&self) -> BTreeSet<AnchoredCycle> {
        (0..self.len()).map(|k| self.rotated(k).expect("in range")).collect()
    }
}

impl fmt::Display for AnchoredCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}", self.word[0].tail)?;
        for a in &self.word {
            write!(f, "->{}", a.head)?;
        }
        write!(f, ">")
    }
}

/// Combination of anchored traces, ordered products of anchored traces, and a constant.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuantumPotential {
    terms: BTreeMap<AnchoredCycle, Scalar>,
    products: BTreeMap<Vec<AnchoredCycle>, Scalar>,
    constant: Scalar,
}

fn bump<K: Ord>(map: &mut BTreeMap<K, Scalar>, key: K, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let slot = map.entry(key).or_default();
    *slot += &c;
    if slot.is_zero() {
        map.retain(|_, v| !v.is_zero());
    }
}

impl QuantumPotential {
    pub fn zero() -> QuantumPotential {
        QuantumPotential::default()
    }

    pub fn single(c: AnchoredCycle, coeff: Scalar) -> QuantumPotential {
        let mut q = QuantumPotential::zero();
        q.add_term(c, coeff);
        q
    }

    pub fn add_term(&mut self, c: AnchoredCycle, coeff: Scalar) {
        bump(&mut self.terms, c, coeff);
    }

    /// Adds `coeff * Tr(f[0]) * Tr(f[1]) * ...` in the given order.
    pub fn add_product(&mut self, factors: Vec<AnchoredCycle>, coeff: Scalar) {
        match factors.len() {
            0 => self.add_constant(coeff),
            1 => self.add_term(factors.into_iter().next().expect("one factor"), coeff),
            _ => bump(&mut self.products, factors, coeff),
        }
    }

    pub fn add_constant(&mut self, c: Scalar) {
        self.constant += &c;
    }

    pub fn terms(&self) -> &BTreeMap<AnchoredCycle, Scalar> {
        &self.terms
    }

    pub fn products(&self) -> &BTreeMap<Vec<AnchoredCycle>, Scalar> {
        &self.products
    }

    pub fn constant(&self) -> &Scalar {
        &self.constant
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.products.is_empty() && self.constant.is_zero()
    }

    pub fn add(&self, other: &QuantumPotential) -> QuantumPotential {
        let mut out = self.clone();
        for (c, v) in &other.terms {
            out.add_term(c.clone(), v.clone());
        }
        for (f, v) in &other.products {
            out.add_product(f.clone(), v.clone());
        }
        out.add_constant(other.constant.clone());
        out
    }

    pub fn scale(&self, s: &Scalar) -> QuantumPotential {
        self.map_coefficients(|c| c * s)
    }

    pub fn sub(&self, other: &QuantumPotential) -> QuantumPotential {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn map_coefficients(&self, f: impl Fn(&Scalar) -> Scalar) -> QuantumPotential {
        let mut out = QuantumPotential::zero();
        for (c, v) in &self.terms {
            out.add_term(c.clone(), f(v));
        }
        for (p, v) in &self.products {
            out.add_product(p.clone(), f(v));
        }
        out.constant = f(&self.constant);
        out
    }

    /// The anchored terms of greatest length, with anchors forgotten.
    pub fn leading_potential(&self) -> Potential {
        let top = self.terms.keys().map(AnchoredCycle::len).max().unwrap_or(0);
        let mut out = Potential::zero();
        for (c, v) in self.terms.iter().filter(|(c, _)| c.len() == top) {
            out.add_term(c.classical(), v.clone());
        }
        out
    }

    pub fn to_json(&self, g: &KPartiteGraph) -> serde_json::Value {
        let ids = |c: &AnchoredCycle| -> Vec<usize> {
            c.arrows().iter().map(|a| g.arrow_id(*a).expect("arrow of the graph")).collect()
        };
        serde_json::json!({
            "terms": self.terms.iter().map(|(c, v)| serde_json::json!({
                "cycle": ids(c), "anchor": 0, "coeff": v.to_text()
            })).collect::<Vec<_>>(),
            "products": self.products.iter().map(|(f, v)| serde_json::json!({
                "factors": f.iter().map(|c| serde_json::json!({"cycle": ids(c), "anchor": 0})).collect::<Vec<_>>(),
                "coeff": v.to_text()
            })).collect::<Vec<_>>(),
            "constant": self.constant.to_text(),
        })
    }
}

impl fmt::Display for QuantumPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.terms.iter().map(|(c, v)| format!("({v}){c}")).collect();
        for (fs, v) in &self.products {
            let names: Vec<String> = fs.iter().map(ToString::to_string).collect();
            parts.push(format!("({v}){}", names.join("")));
        }
        if !self.constant.is_zero() {
            parts.push(format!("({})", self.constant));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// The trace of an anchored walk as a normal-ordered Weyl element.
pub fn quantum_trace_cycle(c: &AnchoredCycle, g: &KPartiteGraph, alg: &WeylAlgebra) -> WeylElement {
    let word = c.arrows();
    let mut out = WeylElement::zero();
    let mut seq = Vec::with_capacity(word.len());
    for start in 0..g.dim(word[0].tail) {
        expand_ordered(word, g, alg, 0, start, start, &mut seq, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn expand_ordered(
    word: &[Arrow],
    g: &KPartiteGraph,
    alg: &WeylAlgebra,
    pos: usize,
    start: usize,
    col: usize,
    seq: &mut Vec<u32>,
    out: &mut WeylElement,
) {
    if pos == word.len() {
        if col == start {
            let ordered: Vec<u32> = seq.iter().rev().copied().collect();
            *out = out.add(&alg.ordered_product(&ordered));
        }
        return;
    }
    let a = word[pos];
    let last = pos + 1 == word.len();
    for row in 0..g.dim(a.head) {
        if last && row != start {
            continue;
        }
        seq.push(alg.generators().id(Entry { arrow: a, row, col }));
        expand_ordered(word, g, alg, pos + 1, start, row, seq, out);
        seq.pop();
    }
}

pub fn quantum_trace(q: &QuantumPotential, g: &KPartiteGraph, alg: &WeylAlgebra) -> WeylElement {
    let mut out = WeylElement::constant(q.constant.clone());
    for (c, v) in &q.terms {
        out = out.add(&quantum_trace_cycle(c, g, alg).scale(v));
    }
    for (fs, v) in &q.products {
        let mut acc = WeylElement::constant(v.clone());
        for c in fs {
            acc = alg.mul(&acc, &quantum_trace_cycle(c, g, alg));
        }
        out = out.add(&acc);
    }
    out
}

/// The anchoring rule for one cycle of a Hamiltonian potential.
pub fn quantise_cycle(c: &Cycle) -> Result<QuantumPotential, AnchoredError> {
    let word = c.arrows().to_vec();
    match classify_word(&word) {
        CycleKind::TwoCycle => {
            let mut q = QuantumPotential::zero();
            let half = Scalar::ratio(1, 2);
            q.add_term(AnchoredCycle::new(word.clone())?, half.clone());
            q.add_term(AnchoredCycle::new(rotate(&word, 1))?, half);
            Ok(q)
        }
        CycleKind::DegenerateFour { center } => {
            let k = word.iter().position(|a| a.tail == center).expect("centre is visited");
            Ok(QuantumPotential::single(AnchoredCycle::new(rotate(&word, k))?, Scalar::one()))
        }
        CycleKind::ThreeCycle | CycleKind::NondegenerateFour => {
            Ok(QuantumPotential::single(AnchoredCycle::new(word)?, Scalar::one()))
        }
        CycleKind::Other { .. } => Err(AnchoredError::NotAnIMDCycle(c.to_string())),
    }
}

/// Quantises a potential made of Hamiltonian cycles.
pub fn quantise_imd(w: &Potential) -> Result<QuantumPotential, AnchoredError> {
    let mut out = QuantumPotential::zero();
    for (c, v) in w.terms() {
        out = out.add(&quantise_cycle(c)?.scale(v));
    }
    Ok(out)
}

/// `(node, W_i-hat)` for every node that carries a time.
pub fn quantum_potentials(
    g: &KPartiteGraph,
    r: &Reading,
    kind: ReadingKind,
) -> Result<Vec<(usize, QuantumPotential)>, AnchoredError> {
    hamiltonian_nodes(g, r, kind)
        .into_iter()
        .map(|i| Ok((i, quantise_imd(&imd_potential_with(g, r, kind, i)?.total())?)))
        .collect()
}

/// Adds `coeff * Tr(first) * Tr(second)`, where an empty walk at a node
/// contributes the dimension of that node.
fn push_split(
    out: &mut QuantumPotential,
    g: &KPartiteGraph,
    first: (&[Arrow], usize),
    second: (&[Arrow], usize),
    coeff: Scalar,
) -> Result<(), AnchoredError> {
    let mut coeff = coeff;
    let mut factors = Vec::new();
    for (walk, node) in [first, second] {
        if walk.is_empty() {
            coeff = &coeff * &Scalar::from_int(g.dim(node) as i64);
        } else {
            factors.push(AnchoredCycle::new(walk.to_vec())?);
        }
    }
    out.add_product(factors, coeff);
    Ok(())
}

/// `Tr(C anchored at word[0]) - Tr(C anchored at word[1])`.
fn anchor_step(word: &[Arrow], g: &KPartiteGraph, s: &SymplecticData) -> Result<QuantumPotential, AnchoredError> {
    let n = word.len();
    let first = word[0];
    let mut out = QuantumPotential::zero();
    for p in 1..n {
        if word[p] != first.star() {
            continue;
        }
        let coeff = s.bracket(word[p], first);
        push_split(&mut out, g, (&word[p + 1..], first.tail), (&word[1..p], first.head), coeff)?;
    }
    Ok(out)
}

/// `Tr(c) - Tr(c with the anchor moved to position k)`, as a sum of products
/// of shorter anchored traces.
pub fn change_anchor(
    c: &AnchoredCycle,
    new_anchor: usize,
    g: &KPartiteGraph,
    s: &SymplecticData,
) -> Result<QuantumPotential, AnchoredError> {
    if new_anchor >= c.len() {
        return Err(AnchoredError::BadAnchor(new_anchor));
    }
    let mut out = QuantumPotential::zero();
    for step in 0..new_anchor {
        out = out.add(&anchor_step(&rotate(c.arrows(), step), g, s)?);
    }
    Ok(out)
}

fn satisfies_lemma(word: &[Arrow]) -> bool {
    word.len() == 2 || !word.iter().any(|a| word.contains(&a.star()))
}

fn is_imd(word: &[Arrow]) -> bool {
    !matches!(classify_word(word), CycleKind::Other { .. })
}

/// `[Tr(c1), Tr(c2)]` as a quantum potential, for quantised Hamiltonian cycles.
///
/// Pairs where one cycle is a 2-cycle or free of antiparallel arrows are
/// handled by gluing along each antiparallel pair. Two degenerate 4-cycles
/// must both be anchored at their centres.
pub fn quantum_cycle_commutator(
    c1: &AnchoredCycle,
    c2: &AnchoredCycle,
    s: &SymplecticData,
) -> Result<QuantumPotential, AnchoredError> {
    let (x, y) = (c1.arrows(), c2.arrows());
    if !is_imd(x) || !is_imd(y) {
        return Err(AnchoredError::UnsupportedPair(format!("{c1} or {c2} is not a Hamiltonian cycle")));
    }
    let pairs: Vec<(usize, usize)> =
        (0..x.len()).flat_map(|i| (0..y.len()).map(move |j| (i, j))).filter(|&(i, j)| x[i] == y[j].star()).collect();
    if pairs.is_empty() || c1 == c2 {
        return Ok(QuantumPotential::zero());
    }
    let mut out = QuantumPotential::zero();
    if satisfies_lemma(x) || satisfies_lemma(y) {
        let first_free = satisfies_lemma(x);
        for (i, j) in pairs {
            let coeff = s.bracket(x[i], y[j]);
            let mut word = Vec::with_capacity(x.len() + y.len() - 2);
            if first_free {
                word.extend_from_slice(&y[..j]);
                word.extend_from_slice(&x[i + 1..]);
                word.extend_from_slice(&x[..i]);
                word.extend_from_slice(&y[j + 1..]);
            } else {
                word.extend_from_slice(&x[..i]);
                word.extend_from_slice(&y[j + 1..]);
                word.extend_from_slice(&y[..j]);
                word.extend_from_slice(&x[i + 1..]);
            }
            out.add_term(AnchoredCycle::new(word)?, coeff);
        }
        return Ok(out);
    }
    let (CycleKind::DegenerateFour { center: v1 }, CycleKind::DegenerateFour { center: v2 }) = (c1.kind(), c2.kind())
    else {
        return Err(AnchoredError::UnsupportedPair(format!("{c1} and {c2}")));
    };
    if c1.anchor().tail != v1 || c2.anchor().tail != v2 {
        return Err(AnchoredError::UnsupportedPair(format!("{c1} and {c2} are not anchored at their centres")));
    }
    if v1 != v2 {
        return Ok(QuantumPotential::zero());
    }
    let legs = |w: &[Arrow]| -> BTreeSet<usize> { w.iter().filter(|a| a.tail == v1).map(|a| a.head).collect() };
    let (l1, l2) = (legs(x), legs(y));
    let shared: Vec<usize> = l1.intersection(&l2).copied().collect();
    let [b] = shared[..] else {
        return Err(AnchoredError::UnsupportedPair(format!("{c1} and {c2}")));
    };
    let a = *l1.iter().find(|&&n| n != b).expect("two legs");
    let c = *l2.iter().find(|&&n| n != b).expect("two legs");
    let petal = |leg: usize| [Arrow::new(v1, leg), Arrow::new(leg, v1)];
    let beta = Arrow::new(v1, b);
    let coeff = s.bracket(beta, beta.star());
    let forward: Vec<Arrow> = [petal(c), petal(b), petal(a)].concat();
    let backward: Vec<Arrow> = [petal(c), petal(a), petal(b)].concat();
    out.add_term(AnchoredCycle::new(forward)?, coeff.clone());
    out.add_term(AnchoredCycle::new(backward)?, -coeff);
    Ok(out)
}

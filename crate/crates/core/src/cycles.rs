//! Classical cycle calculus on the doubled quiver.
//!
//! A [`Cycle`] is stored in traversal order: `arrows()[0]` is the first arrow
//! walked, and each arrow starts where the previous one ends. The matrix
//! product attached to a cycle multiplies in the reverse order, so the first
//! arrow walked is the rightmost factor of the trace.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quiver::{Arrow, Entry, Generators, KPartiteGraph, QuiverError, Reading, SymplecticData};
use crate::scalars::{Scalar, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleError {
    #[error("empty cycle")]
    Empty,
    #[error("arrows {0} and {1} do not compose")]
    NotComposable(Arrow, Arrow),
    #[error("unsupported degenerate reading: {0}")]
    UnsupportedDegenerateReading(String),
    #[error("node {0} carries no time in this reading")]
    UntimedNode(usize),
    #[error("unknown arrow id {0}")]
    UnknownArrow(usize),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

/// An oriented cycle modulo rotation, stored as its least rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    word: Vec<Arrow>,
}

fn check_composable(word: &[Arrow]) -> Result<(), CycleError> {
    if word.is_empty() {
        return Err(CycleError::Empty);
    }
    for p in 0..word.len() {
        let next = word[(p + 1) % word.len()];
        if word[p].head != next.tail {
            return Err(CycleError::NotComposable(word[p], next));
        }
    }
    Ok(())
}

/// Least rotation of a word.
pub fn least_rotation<T: Ord + Clone>(word: &[T]) -> Vec<T> {
    let n = word.len();
    (0..n).map(|r| word[r..].iter().chain(&word[..r]).cloned().collect::<Vec<T>>()).min().unwrap_or_default()
}

impl Cycle {
    pub fn new(word: Vec<Arrow>) -> Result<Cycle, CycleError> {
        check_composable(&word)?;
        Ok(Cycle { word: least_rotation(&word) })
    }

    /// The closed walk `nodes[0] -> nodes[1] -> ... -> nodes[0]`.
    pub fn through(nodes: &[usize]) -> Result<Cycle, CycleError> {
        let n = nodes.len();
        Cycle::new((0..n).map(|p| Arrow::new(nodes[p], nodes[(p + 1) % n])).collect())
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

    /// Distinct nodes visited.
    pub fn nodes(&self) -> BTreeSet<usize> {
        self.word.iter().map(|a| a.tail).collect()
    }

    pub fn check_in(&self, g: &KPartiteGraph) -> Result<(), CycleError> {
        for a in &self.word {
            g.check_arrow(*a)?;
        }
        Ok(())
    }

    pub fn has_antiparallel_pair(&self) -> bool {
        self.word.iter().any(|a| self.word.contains(&a.star()))
    }

    pub fn to_ids(&self, g: &KPartiteGraph) -> Vec<usize> {
        self.word.iter().map(|a| g.arrow_id(*a).expect("arrow of the graph")).collect()
    }

    pub fn from_ids(g: &KPartiteGraph, ids: &[usize]) -> Result<Cycle, CycleError> {
        let word = ids
            .iter()
            .map(|&id| g.arrow_by_id(id).ok_or(CycleError::UnknownArrow(id)))
            .collect::<Result<Vec<_>, _>>()?;
        Cycle::new(word)
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (p, a) in self.word.iter().enumerate() {
            if p == 0 {
                write!(f, "{}", a.tail)?;
            }
            write!(f, "->{}", a.head)?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CycleKind {
    TwoCycle,
    ThreeCycle,
    NondegenerateFour,
    DegenerateFour { center: usize },
    Other { length: usize },
}

/// Classifies a word by length and by the number of distinct nodes it touches.
pub fn classify_word(word: &[Arrow]) -> CycleKind {
    let mut nodes: Vec<usize> = word.iter().map(|a| a.tail).collect();
    let visits = nodes.clone();
    nodes.sort_unstable();
    nodes.dedup();
    match (word.len(), nodes.len()) {
        (2, 2) => CycleKind::TwoCycle,
        (3, 3) => CycleKind::ThreeCycle,
        (4, 4) => CycleKind::NondegenerateFour,
        (4, 3) => {
            let center = *nodes
                .iter()
                .find(|&&n| visits.iter().filter(|&&v| v == n).count() == 2)
                .expect("a node is visited twice");
            CycleKind::DegenerateFour { center }
        }
        (length, _) => CycleKind::Other { length },
    }
}

pub fn classify_cycle(c: &Cycle) -> CycleKind {
    classify_word(c.arrows())
}

/// A finite linear combination of cycles.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Potential {
    terms: BTreeMap<Cycle, Scalar>,
}

impl Potential {
    pub fn zero() -> Potential {
        Potential::default()
    }

    pub fn single(c: Cycle, coeff: Scalar) -> Potential {
        let mut p = Potential::zero();
        p.add_term(c, coeff);
        p
    }

    pub fn add_term(&mut self, c: Cycle, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(c).or_default();
        *slot += &coeff;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn terms(&self) -> &BTreeMap<Cycle, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, c: &Cycle) -> Scalar {
        self.terms.get(c).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &Potential) -> Potential {
        let mut out = self.clone();
        for (c, v) in &other.terms {
            out.add_term(c.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Potential) -> Potential {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, s: &Scalar) -> Potential {
        let mut out = Potential::zero();
        for (c, v) in &self.terms {
            out.add_term(c.clone(), v * s);
        }
        out
    }

    pub fn to_json(&self, g: &KPartiteGraph) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms.iter().map(|(c, v)| serde_json::json!({"cycle": c.to_ids(g), "coeff": v.to_text()})).collect(),
        )
    }

    pub fn from_json(g: &KPartiteGraph, value: &serde_json::Value) -> Result<Potential, CycleError> {
        #[derive(Deserialize)]
        struct Term {
            cycle: Vec<usize>,
            coeff: Scalar,
        }
        let terms: Vec<Term> =
            serde_json::from_value(value.clone()).map_err(|e| QuiverError::Inconsistent(e.to_string()))?;
        let mut out = Potential::zero();
        for t in terms {
            out.add_term(Cycle::from_ids(g, &t.cycle)?, t.coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (c, v)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({v}){c}")?;
        }
        Ok(())
    }
}

/// The three pieces of a Hamiltonian potential, by cycle length.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ImdPotential {
    pub four: Potential,
    pub three: Potential,
    pub two: Potential,
}

impl ImdPotential {
    pub fn total(&self) -> Potential {
        self.four.add(&self.three).add(&self.two)
    }
}

/// How the Hamiltonians of a graph are produced from its reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadingKind {
    /// No part is read at infinity.
    Generic,
    /// Two parts read `0` and `inf`; only the infinity side carries times.
    Star,
    /// Two parts read `0` and `inf`; only the zero side carries times.
    DualStar,
    /// Two parts read `0` and `inf`; both sides carry times.
    Bipartite,
}

impl ReadingKind {
    pub fn from_times_flag(flag: &str) -> Option<ReadingKind> {
        match flag {
            "infinity" => Some(ReadingKind::Star),
            "zero" => Some(ReadingKind::DualStar),
            "both" => Some(ReadingKind::Bipartite),
            _ => None,
        }
    }
}

/// Sides of a `{0, inf}` bipartite reading, as part indices.
fn degenerate_sides(g: &KPartiteGraph, r: &Reading) -> Result<(usize, usize), CycleError> {
    let inf = r.infinite_part().expect("degenerate reading");
    if g.part_count() != 2 {
        return Err(CycleError::UnsupportedDegenerateReading(format!(
            "a part is read at infinity on a {}-partite graph",
            g.part_count()
        )));
    }
    let zero = 1 - inf;
    if !r.value(zero).finite().map(Scalar::is_zero).unwrap_or(false) {
        return Err(CycleError::UnsupportedDegenerateReading(format!(
            "the finite part is read at {} rather than 0",
            r.value(zero)
        )));
    }
    Ok((zero, inf))
}

/// The reading kind implied by the shape of the graph: a single node on the
/// zero side gives a star, a single node on the infinity side a dual star.
pub fn reading_kind(g: &KPartiteGraph, r: &Reading) -> Result<ReadingKind, CycleError> {
    if r.is_generic() {
        return Ok(ReadingKind::Generic);
    }
    let (zero, inf) = degenerate_sides(g, r)?;
    let (nz, ni) = (g.nodes_in(zero).len(), g.nodes_in(inf).len());
    Ok(match (nz, ni) {
        (1, n) if n > 1 => ReadingKind::Star,
        (n, 1) if n > 1 => ReadingKind::DualStar,
        _ => ReadingKind::Bipartite,
    })
}

fn node_has_time(g: &KPartiteGraph, r: &Reading, kind: ReadingKind, node: usize) -> bool {
    let on_inf = r.infinite_part() == Some(g.part_of(node));
    match kind {
        ReadingKind::Generic | ReadingKind::Bipartite => true,
        ReadingKind::Star => on_inf,
        ReadingKind::DualStar => !on_inf,
    }
}

/// Nodes that carry a time, hence a Hamiltonian.
pub fn hamiltonian_nodes(g: &KPartiteGraph, r: &Reading, kind: ReadingKind) -> Vec<usize> {
    g.nodes().filter(|&n| node_has_time(g, r, kind, n)).collect()
}

/// The potentials `(W_i(4), W_i(3), W_i(2))` for node `i`, using the reading
/// kind implied by the graph.
pub fn imd_potential(g: &KPartiteGraph, r: &Reading, i: usize) -> Result<ImdPotential, CycleError> {
    let kind = reading_kind(g, r)?;
    imd_potential_with(g, r, kind, i)
}

pub fn imd_potential_with(
    g: &KPartiteGraph,
    r: &Reading,
    kind: ReadingKind,
    i: usize,
) -> Result<ImdPotential, CycleError> {
    if i >= g.node_count() {
        return Err(QuiverError::UnknownNode(i).into());
    }
    if kind != ReadingKind::Generic {
        degenerate_sides(g, r)?;
    } else if !r.is_generic() {
        return Err(CycleError::UnsupportedDegenerateReading(
            "generic weights requested for a degenerate reading".into(),
        ));
    }
    if !node_has_time(g, r, kind, i) {
        return Err(CycleError::UntimedNode(i));
    }
    let t = |n: usize| g.time_scalar(n);
    let a = |n: usize| r.value(g.part_of(n)).finite().cloned().expect("finite reading");
    let same_part = |x: usize| g.nodes().filter(move |&n| g.part_of(n) == g.part_of(x));
    let others = |x: usize| g.nodes().filter(move |&n| g.part_of(n) != g.part_of(x));
    let mut out = ImdPotential::default();

    // Four-cycles i -> l -> m -> j -> i with m beside i and j, l across.
    for m in same_part(i).filter(|&m| m != i) {
        let denom = (t(i) - t(m)).inverse().expect("distinct times");
        for j in others(i) {
            for l in others(i) {
                let weight = if kind == ReadingKind::Generic {
                    &(&(a(i) - a(j)) * &(a(i) - a(l))) * &denom
                } else {
                    denom.clone()
                };
                out.four.add_term(Cycle::through(&[i, l, m, j])?, weight);
            }
        }
    }

    match kind {
        ReadingKind::Generic => {
            for j in others(i) {
                for l in others(i).filter(|&l| g.part_of(l) != g.part_of(j)) {
                    out.three.add_term(Cycle::through(&[i, j, l])?, a(j) - a(l));
                }
                out.two.add_term(Cycle::through(&[i, j])?, t(i) - t(j));
            }
        }
        _ => {
            for j in others(i).filter(|&j| node_has_time(g, r, kind, j)) {
                out.two.add_term(Cycle::through(&[i, j])?, t(j));
            }
        }
    }
    Ok(out)
}

/// Formal derivative of the coefficients with respect to a time.
pub fn potential_time_derivative(w: &Potential, t: Symbol) -> Potential {
    let mut out = Potential::zero();
    for (c, v) in &w.terms {
        out.add_term(c.clone(), v.partial(t));
    }
    out
}

/// The necklace bracket of two cycles.
///
/// For every position `i` of `c1` and `j` of `c2` with antiparallel arrows,
/// both arrows are removed and the remaining walks are joined, weighted by
/// the bracket constant of the removed pair.
pub fn necklace_bracket(c1: &Cycle, c2: &Cycle, s: &SymplecticData) -> Potential {
    let (x, y) = (c1.arrows(), c2.arrows());
    let (n, m) = (x.len(), y.len());
    let mut out = Potential::zero();
    for i in 0..n {
        for j in 0..m {
            if x[i] != y[j].star() {
                continue;
            }
            let coeff = s.bracket(x[i], y[j]);
            let mut word = Vec::with_capacity(n + m - 2);
            word.extend_from_slice(&y[..j]);
            word.extend_from_slice(&x[i + 1..]);
            word.extend_from_slice(&x[..i]);
            word.extend_from_slice(&y[j + 1..]);
            if word.is_empty() {
                continue;
            }
            out.add_term(Cycle::new(word).expect("glued walk closes"), coeff);
        }
    }
    out
}

pub fn necklace_bracket_potentials(w1: &Potential, w2: &Potential, s: &SymplecticData) -> Potential {
    let mut out = Potential::zero();
    for (c1, v1) in &w1.terms {
        for (c2, v2) in &w2.terms {
            let b = necklace_bracket(c1, c2, s);
            if !b.is_zero() {
                out = out.add(&b.scale(&(v1 * v2)));
            }
        }
    }
    out
}

/// Commutative polynomial in the entry variables, keyed by sorted generator ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TracePolynomial {
    terms: BTreeMap<Vec<u32>, Scalar>,
}

impl TracePolynomial {
    pub fn zero() -> TracePolynomial {
        TracePolynomial::default()
    }

    pub fn constant(c: Scalar) -> TracePolynomial {
        let mut p = TracePolynomial::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn variable(id: u32) -> TracePolynomial {
        let mut p = TracePolynomial::zero();
        p.add_term(vec![id], Scalar::one());
        p
    }

    /// Adds `coeff * monomial`; the monomial need not be sorted.
    pub fn add_term(&mut self, mut monomial: Vec<u32>, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        monomial.sort_unstable();
        use std::collections::btree_map::Entry as E;
        match self.terms.entry(monomial) {
            E::Vacant(v) => {
                v.insert(coeff);
            }
            E::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add(&self, other: &TracePolynomial) -> TracePolynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TracePolynomial) -> TracePolynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> TracePolynomial {
        let mut out = TracePolynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &TracePolynomial) -> TracePolynomial {
        let mut out = TracePolynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = m1.clone();
                m.extend_from_slice(m2);
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    /// Applies a function to every coefficient.
    pub fn map_coefficients(&self, f: impl Fn(&Scalar) -> Scalar) -> TracePolynomial {
        let mut out = TracePolynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn render(&self, gens: &Generators) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m.iter().map(|&id| gens.entry(id).to_string()).collect();
                if vars.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{}", vars.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Trace of a cycle as a polynomial in entry variables.
pub fn trace(c: &Cycle, g: &KPartiteGraph, gens: &Generators) -> TracePolynomial {
    trace_word(c.arrows(), g, gens)
}

/// Trace of the matrix product attached to a closed walk.
pub fn trace_word(word: &[Arrow], g: &KPartiteGraph, gens: &Generators) -> TracePolynomial {
    let mut out = TracePolynomial::zero();
    let start_dim = g.dim(word[0].tail);
    let mut current = Vec::with_capacity(word.len());
    for start in 0..start_dim {
        expand_trace(word, g, gens, 0, start, start, &mut current, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn expand_trace(
    word: &[Arrow],
    g: &KPartiteGraph,
    gens: &Generators,
    pos: usize,
    start: usize,
    col: usize,
    current: &mut Vec<u32>,
    out: &mut TracePolynomial,
) {
    if pos == word.len() {
        if col == start {
            out.add_term(current.clone(), Scalar::one());
        }
        return;
    }
    let a = word[pos];
    let rows: Vec<usize> = if pos + 1 == word.len() { vec![start] } else { (0..g.dim(a.head)).collect() };
    for row in rows {
        current.push(gens.id(Entry { arrow: a, row, col }));
        expand_trace(word, g, gens, pos + 1, start, row, current, out);
        current.pop();
    }
}

pub fn trace_potential(w: &Potential, g: &KPartiteGraph, gens: &Generators) -> TracePolynomial {
    let mut out = TracePolynomial::zero();
    for (c, v) in &w.terms {
        for (m, one) in trace(c, g, gens).terms {
            out.add_term(m, &one * v);
        }
    }
    out
}

/// Poisson bracket of two polynomials from the generator brackets
/// `{X^alpha_{kl}, X^{alpha*}_{lk}} = c` for positive `alpha`.
pub fn poisson_bracket_oracle(
    f: &TracePolynomial,
    h: &TracePolynomial,
    gens: &Generators,
    s: &SymplecticData,
) -> TracePolynomial {
    let omega = |id: u32| {
        let e = gens.entry(id);
        s.bracket(e.arrow, e.arrow.star())
    };
    let mut out = TracePolynomial::zero();
    for (m1, c1) in &f.terms {
        for (m2, c2) in &h.terms {
            let mut k = 0;
            while k < m1.len() {
                let a = m1[k];
                let mult1 = m1[k..].iter().take_while(|&&x| x == a).count();
                k += mult1;
                let b = gens.partner(a);
                let mult2 = m2.iter().filter(|&&x| x == b).count();
                if mult2 == 0 {
                    continue;
                }
                let mut mono: Vec<u32> = Vec::with_capacity(m1.len() + m2.len() - 2);
                let mut skipped = false;
                for &x in m1 {
                    if x == a && !skipped {
                        skipped = true;
                    } else {
                        mono.push(x);
                    }
                }
                let mut skipped = false;
                for &x in m2 {
                    if x == b && !skipped {
                        skipped = true;
                    } else {
                        mono.push(x);
                    }
                }
                let factor = Scalar::from_int((mult1 * mult2) as i64);
                out.add_term(mono, &(&(c1 * c2) * &factor) * &omega(a));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{build_graph, default_symplectic, Convention, ReadingValue};

    fn triangle() -> (KPartiteGraph, Reading) {
        build_graph(&[1, 1, 1], &[1, 1, 1], Reading::symbolic(3).values().to_vec()).unwrap()
    }

    fn star(m: usize, n: usize) -> (KPartiteGraph, Reading) {
        let mut dims = vec![n];
        dims.extend(std::iter::repeat_n(1, m));
        build_graph(&[1, m], &dims, vec![ReadingValue::Finite(Scalar::zero()), ReadingValue::Infinity]).unwrap()
    }

    #[test]
    fn rotations_are_identified() {
        let a = Cycle::through(&[0, 1, 2]).unwrap();
        let b = Cycle::through(&[1, 2, 0]).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, Cycle::through(&[0, 2, 1]).unwrap());
        assert!(Cycle::new(vec![Arrow::new(0, 1), Arrow::new(2, 0)]).is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(classify_cycle(&Cycle::through(&[0, 1]).unwrap()), CycleKind::TwoCycle);
        assert_eq!(classify_cycle(&Cycle::through(&[0, 1, 2]).unwrap()), CycleKind::ThreeCycle);
        assert_eq!(classify_cycle(&Cycle::through(&[0, 1, 0, 2]).unwrap()), CycleKind::DegenerateFour { center: 0 });
        assert_eq!(classify_cycle(&Cycle::through(&[0, 1, 2, 3]).unwrap()), CycleKind::NondegenerateFour);
        assert_eq!(classify_cycle(&Cycle::through(&[0, 1, 0, 1]).unwrap()), CycleKind::Other { length: 4 });
    }

    #[test]
    fn triangle_has_no_four_cycles() {
        let (g, r) = triangle();
        let w = imd_potential(&g, &r, 0).unwrap();
        assert!(w.four.is_zero());
        assert_eq!(w.three.len(), 2);
        assert_eq!(w.two.len(), 2);
    }

    #[test]
    fn star_has_only_degenerate_four_cycles() {
        let (g, r) = star(3, 2);
        assert_eq!(reading_kind(&g, &r).unwrap(), ReadingKind::Star);
        let w = imd_potential(&g, &r, 1).unwrap();
        assert!(w.three.is_zero() && w.two.is_zero());
        assert_eq!(w.four.len(), 2);
        for c in w.four.terms().keys() {
            assert_eq!(classify_cycle(c), CycleKind::DegenerateFour { center: 0 });
        }
        assert_eq!(imd_potential(&g, &r, 0), Err(CycleError::UntimedNode(0)));
    }

    #[test]
    fn unsupported_degenerate_reading() {
        let vals =
            vec![ReadingValue::Finite(Scalar::zero()), ReadingValue::Finite(Scalar::one()), ReadingValue::Infinity];
        let (g, r) = build_graph(&[1, 1, 1], &[1, 1, 1], vals).unwrap();
        assert!(matches!(imd_potential(&g, &r, 0), Err(CycleError::UnsupportedDegenerateReading(_))));
    }

    #[test]
    fn two_cycle_traces() {
        let (g, _) = build_graph(&[1, 1], &[2, 2], Reading::symbolic(2).values().to_vec()).unwrap();
        let gens = Generators::new(&g);
        let t = trace(&Cycle::through(&[0, 1]).unwrap(), &g, &gens);
        assert_eq!(t.len(), 4);
        assert!(t.terms().values().all(Scalar::is_one));
        assert!(trace_potential(&Potential::zero(), &g, &gens).is_zero());
    }

    #[test]
    fn bracket_of_a_cycle_with_itself_vanishes() {
        let (g, r) = triangle();
        let s = default_symplectic(&g, &r, Convention::Unit);
        let c = Cycle::through(&[0, 1, 0, 2]).unwrap();
        assert!(necklace_bracket(&c, &c, &s).is_zero());
        let d = Cycle::through(&[0, 1, 2]).unwrap();
        assert!(necklace_bracket(&d, &d, &s).is_zero());
    }

    #[test]
    fn bracket_matches_oracle_on_small_pair() {
        let (g, r) = build_graph(&[1, 1, 1], &[2, 1, 2], Reading::symbolic(3).values().to_vec()).unwrap();
        let s = default_symplectic(&g, &r, Convention::PhiInverse);
        let gens = Generators::new(&g);
        let c1 = Cycle::through(&[0, 1, 2]).unwrap();
        let c2 = Cycle::through(&[1, 0, 2, 0]).unwrap();
        let lhs = trace_potential(&necklace_bracket(&c1, &c2, &s), &g, &gens);
        let rhs = poisson_bracket_oracle(&trace(&c1, &g, &gens), &trace(&c2, &g, &gens), &gens, &s);
        assert!(!rhs.is_zero());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn darboux_pair() {
        let (g, r) = star(1, 1);
        let s = default_symplectic(&g, &r, Convention::Unit);
        let gens = Generators::new(&g);
        let q = TracePolynomial::variable(0);
        let p = TracePolynomial::variable(gens.partner(0));
        assert_eq!(poisson_bracket_oracle(&q, &p, &gens, &s), TracePolynomial::constant(Scalar::one()));
    }

    #[test]
    fn time_derivatives_of_potentials() {
        let (g, r) = triangle();
        let w = imd_potential(&g, &r, 0).unwrap();
        let d = potential_time_derivative(&w.two, g.time(1));
        assert_eq!(d, Potential::single(Cycle::through(&[0, 1]).unwrap(), -Scalar::one()));
        assert!(potential_time_derivative(&w.three, g.time(1)).is_zero());
    }

    #[test]
    fn potential_json_round_trip() {
        let (g, r) = star(2, 2);
        let w = imd_potential(&g, &r, 1).unwrap().total();
        let back = Potential::from_json(&g, &w.to_json(&g)).unwrap();
        assert_eq!(back, w);
    }
}

//! Moment maps of a `{0, inf}` bipartite graph.
//!
//! The residue side is `W0`, the direct sum of the spaces on the zero part,
//! and each node of the infinity part is one factor. For a factor node `v`
//! write `Q_v` for the block of the arrows `v -> zero part` and `P_v` for the
//! block of the arrows `zero part -> v`. Then `R_v = Q_v P_v / c` lies in
//! `gl(W0)`, where `c = [Q, P]` is the bracket constant of the factor. The
//! leg action of `gl(V_v)` is generated by `P_v Q_v`.
//!
//! Quantum images live in the opposite Weyl algebra, where both moment maps
//! are Lie algebra morphisms. The classical images are their semiclassical
//! limits.

use std::collections::{BTreeMap, HashMap};

use super::algebra::{Gen, SymElement, UEnvElement};
use super::{ReductionError, ReductionTimes};
use crate::anchored::{quantum_potentials, quantum_trace, AnchoredCycle, QuantumPotential};
use crate::cycles::{reading_kind, ReadingKind, TracePolynomial};
use crate::quiver::{Arrow, Entry, Generators, KPartiteGraph, Reading, SymplecticData};
use crate::scalars::Scalar;
use crate::weyl::{WeylAlgebra, WeylElement};

/// Default filtration cap for [`quantum_reduction_project`].
pub const DEFAULT_ORDER_CAP: usize = 6;

/// Index bookkeeping for a `{0, inf}` bipartite graph.
#[derive(Debug, Clone)]
pub struct BipartiteFrame {
    zero_part: usize,
    inf_part: usize,
    factors: Vec<usize>,
    /// `(zero node, row)` for each basis vector of `W0`.
    basis: Vec<(usize, usize)>,
    leg_dims: Vec<usize>,
    /// `1 / [Q, P]` per factor.
    scale: Vec<Scalar>,
    times: ReductionTimes,
}

impl BipartiteFrame {
    pub fn new(g: &KPartiteGraph, r: &Reading, s: &SymplecticData) -> Result<BipartiteFrame, ReductionError> {
        let kind = reading_kind(g, r)?;
        if kind == ReadingKind::Generic {
            return Err(ReductionError::UnsupportedGraph("moment maps need a reading with a part at infinity".into()));
        }
        let inf_part = r.infinite_part().expect("degenerate reading");
        let zero_part = 1 - inf_part;
        let factors = g.nodes_in(inf_part).to_vec();
        let basis: Vec<(usize, usize)> =
            g.nodes_in(zero_part).iter().flat_map(|&n| (0..g.dim(n)).map(move |row| (n, row))).collect();
        let mut scale = Vec::with_capacity(factors.len());
        for (i, &v) in factors.iter().enumerate() {
            let mut constants = g.nodes_in(zero_part).iter().map(|&n| s.bracket(Arrow::new(v, n), Arrow::new(n, v)));
            let c = constants.next().expect("zero part is nonempty");
            if constants.any(|other| other != c) {
                return Err(ReductionError::NonUniformConstants(i));
            }
            scale.push(c.inverse().map_err(|_| ReductionError::NonUniformConstants(i))?);
        }
        let times = ReductionTimes {
            factor: factors.iter().map(|&v| g.time_scalar(v)).collect(),
            diagonal: basis.iter().map(|&(n, _)| g.time_scalar(n)).collect(),
        };
        let leg_dims = factors.iter().map(|&v| g.dim(v)).collect();
        Ok(BipartiteFrame { zero_part, inf_part, factors, basis, leg_dims, scale, times })
    }

    pub fn zero_part(&self) -> usize {
        self.zero_part
    }

    pub fn inf_part(&self) -> usize {
        self.inf_part
    }

    /// Number of factors `m`.
    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    /// `dim W0`.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn factor_node(&self, i: usize) -> usize {
        self.factors[i]
    }

    pub fn basis(&self) -> &[(usize, usize)] {
        &self.basis
    }

    /// Node times: factor `i` gets the time of its node, basis vector `j`
    /// the time of the zero node it lives on.
    pub fn times(&self) -> &ReductionTimes {
        &self.times
    }

    fn q_entry(&self, i: usize, j: usize, m: usize) -> Entry {
        let (n, row) = self.basis[j];
        Entry { arrow: Arrow::new(self.factors[i], n), row, col: m }
    }

    fn p_entry(&self, i: usize, m: usize, k: usize) -> Entry {
        let (n, col) = self.basis[k];
        Entry { arrow: Arrow::new(n, self.factors[i]), row: m, col }
    }

    fn check_residue_gen(&self, g: Gen) -> Result<(), ReductionError> {
        if g.factor >= self.factors.len() || g.row >= self.basis.len() || g.col >= self.basis.len() {
            return Err(ReductionError::DimensionMismatch(format!(
                "{} does not fit {} factors of gl_{}",
                g.name(),
                self.factors.len(),
                self.basis.len()
            )));
        }
        Ok(())
    }

    fn check_leg_gen(&self, g: Gen) -> Result<(), ReductionError> {
        let ok = g.factor < self.factors.len() && g.row < self.leg_dims[g.factor] && g.col < self.leg_dims[g.factor];
        if !ok {
            return Err(ReductionError::DimensionMismatch(format!("{} is not a leg generator", g.name())));
        }
        Ok(())
    }

    fn residue_gens(&self) -> Vec<Gen> {
        let d = self.basis.len();
        (0..self.factors.len()).flat_map(|i| (0..d).flat_map(move |j| (0..d).map(move |k| Gen::new(i, j, k)))).collect()
    }

    fn leg_gens(&self) -> Vec<Gen> {
        self.leg_dims
            .iter()
            .enumerate()
            .flat_map(|(i, &n)| (0..n).flat_map(move |k| (0..n).map(move |l| Gen::new(i, k, l))))
            .collect()
    }
}

/// `Σ_m Q[j,m] P[m,k]` (residue) or `Σ_n P[k,n] Q[n,l]` (leg) as commutative
/// polynomials, scaled.
fn classical_image(frame: &BipartiteFrame, gens: &Generators, g: Gen, leg: bool) -> TracePolynomial {
    let mut out = TracePolynomial::zero();
    let i = g.factor;
    if leg {
        let scale = -&frame.scale[i];
        for n in 0..frame.basis.len() {
            let ids = vec![gens.id(frame.p_entry(i, g.row, n)), gens.id(frame.q_entry(i, n, g.col))];
            out.add_term(ids, scale.clone());
        }
    } else {
        for m in 0..frame.leg_dims[i] {
            let ids = vec![gens.id(frame.q_entry(i, g.row, m)), gens.id(frame.p_entry(i, m, g.col))];
            out.add_term(ids, frame.scale[i].clone());
        }
    }
    out
}

fn pull_back_classical(
    x: &SymElement,
    frame: &BipartiteFrame,
    gens: &Generators,
    leg: bool,
) -> Result<TracePolynomial, ReductionError> {
    let mut out = TracePolynomial::zero();
    for (w, c) in x.terms() {
        let mut acc = TracePolynomial::constant(c.clone());
        for &g in w {
            if leg {
                frame.check_leg_gen(g)?;
            } else {
                frame.check_residue_gen(g)?;
            }
            acc = acc.mul(&classical_image(frame, gens, g, leg));
        }
        out = out.add(&acc);
    }
    Ok(out)
}

/// Substitutes `(R_i)_{jk} = Σ_m (Q_i)_{jm} (P_i)_{mk} / c_i`; a unital ring
/// homomorphism into the entry polynomials.
pub fn classical_moment_pullback(
    x: &SymElement,
    frame: &BipartiteFrame,
    gens: &Generators,
) -> Result<TracePolynomial, ReductionError> {
    pull_back_classical(x, frame, gens, false)
}

/// The classical leg moment `f^{(i)}_{kl} ↦ -Σ_n (P_i)_{kn} (Q_i)_{nl} / c_i`.
pub fn classical_leg_pullback(
    x: &SymElement,
    frame: &BipartiteFrame,
    gens: &Generators,
) -> Result<TracePolynomial, ReductionError> {
    pull_back_classical(x, frame, gens, true)
}

/// The quantum moment maps, with their target algebra.
#[derive(Debug, Clone)]
pub struct QuantumMoment {
    frame: BipartiteFrame,
    target: WeylAlgebra,
}

impl QuantumMoment {
    pub fn new(g: &KPartiteGraph, r: &Reading, s: &SymplecticData) -> Result<QuantumMoment, ReductionError> {
        let frame = BipartiteFrame::new(g, r, s)?;
        Ok(QuantumMoment { frame, target: WeylAlgebra::new(g, s).opposite() })
    }

    pub fn frame(&self) -> &BipartiteFrame {
        &self.frame
    }

    /// The opposite Weyl algebra of the graph.
    pub fn target(&self) -> &WeylAlgebra {
        &self.target
    }

    fn image(&self, g: Gen, leg: bool) -> WeylElement {
        let gens = self.target.generators();
        let mut out = WeylElement::zero();
        for (ids, c) in classical_image(&self.frame, gens, g, leg).terms() {
            // Entry order matters here: Q before P on the residue side.
            let ordered = if leg { self.leg_order(g, ids) } else { self.residue_order(g, ids) };
            out = out.add(&self.target.ordered_product(&ordered).scale(c));
        }
        out
    }

    fn residue_order(&self, g: Gen, ids: &[u32]) -> Vec<u32> {
        let gens = self.target.generators();
        let q_side = |id: u32| gens.entry(id).arrow.tail == self.frame.factors[g.factor];
        order_pair(ids, q_side)
    }

    fn leg_order(&self, g: Gen, ids: &[u32]) -> Vec<u32> {
        let gens = self.target.generators();
        let p_side = |id: u32| gens.entry(id).arrow.head == self.frame.factors[g.factor];
        order_pair(ids, p_side)
    }

    fn pull_back(&self, u: &UEnvElement, leg: bool) -> Result<WeylElement, ReductionError> {
        let mut cache: HashMap<Gen, WeylElement> = HashMap::new();
        let mut out = WeylElement::zero();
        for (w, c) in u.terms() {
            let mut acc = WeylElement::constant(c.clone());
            for &g in w {
                if leg {
                    self.frame.check_leg_gen(g)?;
                } else {
                    self.frame.check_residue_gen(g)?;
                }
                let img = cache.entry(g).or_insert_with(|| self.image(g, leg));
                acc = self.target.mul(&acc, img);
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// Extends `e^{(i)}_{jk} ↦ Σ_m Q̂_{jm} P̂_{mk} / c_i` multiplicatively.
    pub fn pullback(&self, u: &UEnvElement) -> Result<WeylElement, ReductionError> {
        self.pull_back(u, false)
    }

    /// Extends `f^{(i)}_{kl} ↦ -Σ_n P̂_{kn} Q̂_{nl} / c_i` multiplicatively; the
    /// generators use `factor = i` and leg indices `k, l`.
    pub fn leg_pullback(&self, u: &UEnvElement) -> Result<WeylElement, ReductionError> {
        self.pull_back(u, true)
    }

    /// Every residue generator paired with its image.
    pub fn residue_images(&self) -> Vec<(Gen, WeylElement)> {
        self.frame.residue_gens().into_iter().map(|g| (g, self.image(g, false))).collect()
    }

    pub fn leg_images(&self) -> Vec<(Gen, WeylElement)> {
        self.frame.leg_gens().into_iter().map(|g| (g, self.image(g, true))).collect()
    }
}

fn order_pair(ids: &[u32], first: impl Fn(u32) -> bool) -> Vec<u32> {
    let mut out: Vec<u32> = ids.iter().copied().filter(|&id| first(id)).collect();
    out.extend(ids.iter().copied().filter(|&id| !first(id)));
    out
}

/// Commutators of the residue images with the leg images.
#[derive(Debug, Clone)]
pub struct HoweReport {
    pub checked: usize,
    /// `(residue generator, leg generator, commutator)` for every nonzero pair.
    pub nonzero: Vec<(String, String, WeylElement)>,
}

impl HoweReport {
    pub fn all_zero(&self) -> bool {
        self.nonzero.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nonzero: Vec<serde_json::Value> = self
            .nonzero
            .iter()
            .map(|(a, b, r)| serde_json::json!({"residue": a, "leg": b, "commutator": r.to_json()}))
            .collect();
        serde_json::json!({"checked": self.checked, "all_zero": self.all_zero(), "nonzero": nonzero})
    }
}

/// Checks that both moment images commute generator by generator, which by
/// the Leibniz rule covers the full images.
pub fn howe_commutation_check(qm: &QuantumMoment) -> HoweReport {
    let residue = qm.residue_images();
    let legs = qm.leg_images();
    let mut nonzero = Vec::new();
    for (a, x) in &residue {
        for (b, y) in &legs {
            let c = qm.target.commutator(x, y);
            if !c.is_zero() {
                nonzero.push((a.name(), format!("f({},{},{})", b.factor + 1, b.row + 1, b.col + 1), c));
            }
        }
    }
    HoweReport { checked: residue.len() * legs.len(), nonzero }
}

/// Result of reducing an invariant element modulo a left ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub element: WeylElement,
    /// Normal form of the coset representative.
    pub remainder: WeylElement,
    pub in_ideal: bool,
    pub order_cap: usize,
    /// Rank of the truncated ideal used for the reduction.
    pub ideal_rank: usize,
}

type Key = (usize, Vec<u32>);
type Row = BTreeMap<Key, Scalar>;

fn to_row(x: &WeylElement) -> Row {
    x.terms().iter().map(|(w, c)| ((w.len(), w.clone()), c.clone())).collect()
}

fn from_row(r: &Row) -> WeylElement {
    r.iter().fold(WeylElement::zero(), |acc, ((_, w), c)| acc.add(&WeylElement::word(w.clone(), c.clone())))
}

fn axpy(row: &mut Row, factor: &Scalar, other: &Row) {
    for (k, v) in other {
        let slot = row.entry(k.clone()).or_default();
        *slot = &*slot - &(factor * v);
        if slot.is_zero() {
            row.remove(k);
        }
    }
}

/// Nondecreasing words of length at most `max` over `n` letters.
fn monomials(n: u32, max: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &frontier {
            let start = w.last().copied().unwrap_or(0);
            for g in start..n {
                let mut v: Vec<u32> = w.clone();
                v.push(g);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Checks that `x` commutes with the leg action, then reduces it modulo the
/// left ideal generated by the leg images of `ideal`, truncated at filtration
/// order `cap`. The reduction is Gaussian elimination with the largest word
/// as pivot.
pub fn quantum_reduction_project(
    x: &WeylElement,
    ideal: &[UEnvElement],
    qm: &QuantumMoment,
    cap: usize,
) -> Result<Projection, ReductionError> {
    let alg = &qm.target;
    for (g, y) in qm.leg_images() {
        if !alg.commutator(&y, x).is_zero() {
            return Err(ReductionError::NotInvariant(format!(
                "fails to commute with the image of f({},{},{})",
                g.factor + 1,
                g.row + 1,
                g.col + 1
            )));
        }
    }
    let order = x.filtration_order().unwrap_or(0);
    if order > cap {
        return Err(ReductionError::OrderCapExceeded { order, cap });
    }
    let n = alg.generators().len() as u32;
    let mut pivots: BTreeMap<Key, Row> = BTreeMap::new();
    for u in ideal {
        let y = qm.leg_pullback(u)?;
        let Ok(oy) = y.filtration_order() else { continue };
        if oy > cap {
            return Err(ReductionError::OrderCapExceeded { order: oy, cap });
        }
        for w in monomials(n, cap - oy) {
            let mut row = to_row(&alg.mul(&WeylElement::word(w, Scalar::one()), &y));
            while let Some((lead, c)) = row.last_key_value().map(|(k, c)| (k.clone(), c.clone())) {
                match pivots.get(&lead) {
                    Some(p) => axpy(&mut row, &c, p),
                    None => {
                        let inv = c.inverse().expect("nonzero lead");
                        let row: Row = row.iter().map(|(k, v)| (k.clone(), v * &inv)).collect();
                        pivots.insert(lead, row);
                        break;
                    }
                }
            }
        }
    }
    let mut rest = to_row(x);
    let mut remainder = Row::new();
    while let Some((lead, c)) = rest.pop_last() {
        match pivots.get(&lead) {
            Some(p) => {
                rest.insert(lead, c.clone());
                axpy(&mut rest, &c, p);
            }
            None => {
                remainder.insert(lead, c);
            }
        }
    }
    let remainder = from_row(&remainder);
    Ok(Projection {
        element: x.clone(),
        in_ideal: remainder.is_zero(),
        remainder,
        order_cap: cap,
        ideal_rank: pivots.len(),
    })
}

/// The two graph shapes whose reduction needs re-anchored Hamiltonians.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionCase {
    DualStar,
    Bipartite,
}

fn correction_case(g: &KPartiteGraph, r: &Reading) -> Result<CorrectionCase, ReductionError> {
    match reading_kind(g, r)? {
        ReadingKind::DualStar => Ok(CorrectionCase::DualStar),
        ReadingKind::Bipartite => Ok(CorrectionCase::Bipartite),
        other => Err(ReductionError::UnsupportedGraph(format!("no corrected connection for a {other:?} reading"))),
    }
}

/// The corrected Hamiltonians `H'`, whose cycles all start on the zero part;
/// they are the moment images of the root-ordered dynamical operators
/// (dual star) or of the FMTV operators (bipartite).
pub fn corrected_potentials(
    g: &KPartiteGraph,
    r: &Reading,
) -> Result<(CorrectionCase, Vec<(usize, QuantumPotential)>), ReductionError> {
    let case = correction_case(g, r)?;
    let inf = r.infinite_part().expect("degenerate reading");
    let zero_nodes = g.nodes_in(1 - inf).to_vec();
    let inf_nodes = g.nodes_in(inf).to_vec();
    let t = |n: usize| g.time_scalar(n);
    let inv = |a: usize, b: usize| (t(a) - t(b)).inverse().expect("distinct node times");
    let mut out = Vec::new();
    match case {
        CorrectionCase::DualStar => {
            let hub = inf_nodes[0];
            for &j in &zero_nodes {
                let mut q = QuantumPotential::zero();
                for &k in zero_nodes.iter().filter(|&&k| k != j) {
                    q.add_term(AnchoredCycle::through(&[j, hub, k, hub])?, inv(j, k));
                }
                out.push((j, q));
            }
        }
        CorrectionCase::Bipartite => {
            for &i in &inf_nodes {
                let mut q = QuantumPotential::zero();
                for &k in inf_nodes.iter().filter(|&&k| k != i) {
                    for &j in &zero_nodes {
                        for &l in &zero_nodes {
                            q.add_term(AnchoredCycle::through(&[j, k, l, i])?, inv(i, k));
                        }
                    }
                }
                for &j in &zero_nodes {
                    q.add_term(AnchoredCycle::through(&[j, i])?, t(j));
                }
                out.push((i, q));
            }
            for &j in &zero_nodes {
                let mut q = QuantumPotential::zero();
                for &k in zero_nodes.iter().filter(|&&k| k != j) {
                    for &i in &inf_nodes {
                        for &l in &inf_nodes {
                            q.add_term(AnchoredCycle::through(&[j, l, k, i])?, inv(j, k));
                        }
                    }
                }
                for &i in &inf_nodes {
                    q.add_term(AnchoredCycle::through(&[j, i])?, t(i));
                }
                out.push((j, q));
            }
        }
    }
    out.sort_by_key(|(n, _)| *n);
    Ok((case, out))
}

/// `H'_i - H_i` for every timed node, in the Weyl algebra of `(g, s)`.
pub fn correction_difference(
    g: &KPartiteGraph,
    r: &Reading,
    s: &SymplecticData,
) -> Result<Vec<(usize, WeylElement)>, ReductionError> {
    let (case, corrected) = corrected_potentials(g, r)?;
    let kind = match case {
        CorrectionCase::DualStar => ReadingKind::DualStar,
        CorrectionCase::Bipartite => ReadingKind::Bipartite,
    };
    let alg = WeylAlgebra::new(g, s);
    let original: BTreeMap<usize, QuantumPotential> = quantum_potentials(g, r, kind)?.into_iter().collect();
    corrected
        .into_iter()
        .map(|(n, q)| {
            let h = original.get(&n).cloned().unwrap_or_default();
            Ok((n, quantum_trace(&q, g, &alg).sub(&quantum_trace(&h, g, &alg))))
        })
        .collect()
}

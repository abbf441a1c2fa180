//! Flatness checks for the classical and quantum isomonodromy connections.
//!
//! Each check runs over every pair of Hamiltonian nodes and computes two
//! residues: the curl `d_{t_j} H_i - d_{t_i} H_j`, and the bracket of the two
//! Hamiltonians (Poisson for the classical system, commutator in the Weyl
//! algebra for the quantum one). A pair passes when both residues are
//! syntactically zero.
//!
//! Brackets whose expansion would exceed the configured term budget are
//! either refused with [`FlatnessError::ResourceLimit`] or, when the fallback
//! is enabled, computed after substituting seeded random rationals for every
//! time and reading. The curl is always computed symbolically.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::anchored::census::IntersectionType;
use crate::anchored::{quantum_potentials, quantum_trace, AnchoredError};
use crate::cycles::{
    hamiltonian_nodes, imd_potential_with, poisson_bracket_oracle, potential_time_derivative, reading_kind,
    trace_potential, CycleError, Potential, ReadingKind, TracePolynomial,
};
use crate::quiver::{Generators, KPartiteGraph, QuiverError, Reading, SymplecticData};
use crate::scalars::{Scalar, ScalarError, Symbol};
use crate::weyl::{WeylAlgebra, WeylElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlatnessError {
    #[error("bracket of nodes {i} and {j} needs about {estimate} products, over the budget of {budget}; rerun with random evaluation enabled")]
    ResourceLimit { i: usize, j: usize, estimate: usize, budget: usize },
    #[error("no evaluation point avoided the poles after {0} attempts")]
    NoRegularPoint(usize),
    #[error("override for node {0}, which is not a node of the graph")]
    UnknownNode(usize),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    Anchored(#[from] AnchoredError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

#[derive(Debug, Clone)]
pub struct FlatnessOptions {
    /// Which nodes carry times; `None` uses the kind implied by the graph.
    pub kind: Option<ReadingKind>,
    /// Largest accepted product `terms(H_i) * terms(H_j)` for a symbolic bracket.
    pub max_terms: usize,
    /// Use random evaluation instead of failing when the budget is exceeded.
    pub fallback: bool,
    pub seed: u64,
    /// Evaluation points tried per pair in fallback mode.
    pub samples: usize,
}

impl Default for FlatnessOptions {
    fn default() -> FlatnessOptions {
        FlatnessOptions { kind: None, max_terms: 250_000, fallback: true, seed: 0x5eed, samples: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStatus {
    /// Both residues are exactly zero.
    Pass,
    /// The curl vanishes exactly and the bracket vanished at every sampled point.
    PassByEvaluation,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    pub curl_residue: String,
    pub commutator_residue: String,
    pub status: PairStatus,
    /// Intersection types of cycle pairs from the two potentials, with multiplicities.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub intersections: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub pairs: usize,
    pub passed: usize,
    pub failed: usize,
    pub flat: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatnessReport {
    pub pairs: Vec<PairReport>,
    pub summary: Summary,
}

impl FlatnessReport {
    fn from_pairs(mut pairs: Vec<PairReport>) -> FlatnessReport {
        pairs.sort_by_key(|p| (p.i, p.j));
        let failed = pairs.iter().filter(|p| p.status == PairStatus::Fail).count();
        let summary = Summary { pairs: pairs.len(), passed: pairs.len() - failed, failed, flat: failed == 0 };
        FlatnessReport { pairs, summary }
    }

    pub fn is_flat(&self) -> bool {
        self.summary.flat
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serialises")
    }
}

fn kind_of(g: &KPartiteGraph, r: &Reading, opts: &FlatnessOptions) -> Result<ReadingKind, FlatnessError> {
    Ok(match opts.kind {
        Some(k) => k,
        None => reading_kind(g, r)?,
    })
}

/// `(node, W_i)` for every node carrying a time.
pub fn classical_potentials(
    g: &KPartiteGraph,
    r: &Reading,
    kind: ReadingKind,
) -> Result<Vec<(usize, Potential)>, FlatnessError> {
    hamiltonian_nodes(g, r, kind).into_iter().map(|i| Ok((i, imd_potential_with(g, r, kind, i)?.total()))).collect()
}

fn intersection_breakdown(w1: &Potential, w2: &Potential) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for c1 in w1.terms().keys() {
        for c2 in w2.terms().keys() {
            if let Some(t) = IntersectionType::of(c1, c2) {
                let name = format!(
                    "{:?} x {:?}, {} shared{}",
                    t.families.0,
                    t.families.1,
                    t.shared_pairs,
                    match t.common_centre {
                        Some(true) => ", common centre",
                        Some(false) => ", distinct centres",
                        None => "",
                    }
                );
                *out.entry(name).or_insert(0) += 1;
            }
        }
    }
    out
}

/// Seeded random substitution for a set of symbols.
struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    fn new(seed: u64) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn point(&mut self, symbols: &BTreeSet<Symbol>) -> HashMap<Symbol, Scalar> {
        symbols
            .iter()
            .map(|s| {
                let num = BigInt::from(self.rng.gen_range(-997i64..=997));
                let den = BigInt::from(self.rng.gen_range(1i64..=61));
                (*s, Scalar::from_rational(&BigRational::new(num, den)))
            })
            .collect()
    }
}

const POLE_RETRIES: usize = 16;

fn weyl_symbols(x: &WeylElement) -> BTreeSet<Symbol> {
    x.terms().values().flat_map(Scalar::symbols).collect()
}

/// Evaluates `[h1, h2]` at random points; returns the first nonzero residue.
fn sampled_commutator(
    g: &KPartiteGraph,
    s: &SymplecticData,
    h1: &WeylElement,
    h2: &WeylElement,
    sampler: &mut Sampler,
    samples: usize,
) -> Result<WeylElement, FlatnessError> {
    let mut symbols = weyl_symbols(h1);
    symbols.extend(weyl_symbols(h2));
    symbols.extend(s.constants().values().flat_map(Scalar::symbols));
    let mut done = 0;
    let mut attempts = 0;
    while done < samples {
        attempts += 1;
        if attempts > samples * POLE_RETRIES {
            return Err(FlatnessError::NoRegularPoint(attempts - 1));
        }
        let point = sampler.point(&symbols);
        let sub = |c: &Scalar| c.subs(&point);
        let constants: Result<BTreeMap<_, _>, ScalarError> =
            s.constants().iter().map(|(a, c)| Ok((*a, sub(c)?))).collect();
        let (Ok(constants), Ok(e1), Ok(e2)) = (constants, h1.try_map_coefficients(sub), h2.try_map_coefficients(sub))
        else {
            continue;
        };
        let alg = WeylAlgebra::new(g, &SymplecticData::from_constants(g, constants)?);
        let residue = alg.commutator(&e1, &e2);
        if !residue.is_zero() {
            return Ok(residue);
        }
        done += 1;
    }
    Ok(WeylElement::zero())
}

fn status(curl_zero: bool, bracket_zero: bool, sampled: bool) -> PairStatus {
    match (curl_zero && bracket_zero, sampled) {
        (false, _) => PairStatus::Fail,
        (true, false) => PairStatus::Pass,
        (true, true) => PairStatus::PassByEvaluation,
    }
}

pub fn check_classical_flatness(
    g: &KPartiteGraph,
    r: &Reading,
    s: &SymplecticData,
) -> Result<FlatnessReport, FlatnessError> {
    check_classical_flatness_with(g, r, s, &FlatnessOptions::default())
}

pub fn check_classical_flatness_with(
    g: &KPartiteGraph,
    r: &Reading,
    s: &SymplecticData,
    opts: &FlatnessOptions,
) -> Result<FlatnessReport, FlatnessError> {
    let potentials = classical_potentials(g, r, kind_of(g, r, opts)?)?;
    check_classical_potentials(g, s, &potentials)
}

/// The classical battery on arbitrary potentials indexed by node.
pub fn check_classical_potentials(
    g: &KPartiteGraph,
    s: &SymplecticData,
    potentials: &[(usize, Potential)],
) -> Result<FlatnessReport, FlatnessError> {
    let gens = Generators::new(g);
    let traces: Vec<TracePolynomial> = potentials.iter().map(|(_, w)| trace_potential(w, g, &gens)).collect();
    let mut pairs = Vec::new();
    for (a, (i, wi)) in potentials.iter().enumerate() {
        for (b, (j, wj)) in potentials.iter().enumerate().skip(a + 1) {
            let curl = potential_time_derivative(wj, g.time(*i)).sub(&potential_time_derivative(wi, g.time(*j)));
            let curl = trace_potential(&curl, g, &gens);
            let bracket = poisson_bracket_oracle(&traces[a], &traces[b], &gens, s);
            pairs.push(PairReport {
                i: *i,
                j: *j,
                curl_residue: curl.render(&gens),
                commutator_residue: bracket.render(&gens),
                status: status(curl.is_zero(), bracket.is_zero(), false),
                intersections: intersection_breakdown(wi, wj),
            });
        }
    }
    Ok(FlatnessReport::from_pairs(pairs))
}

pub fn check_quantum_flatness(
    g: &KPartiteGraph,
    r: &Reading,
    s: &SymplecticData,
) -> Result<FlatnessReport, FlatnessError> {
    check_quantum_flatness_with(g, r, s, &FlatnessOptions::default())
}

pub fn check_quantum_flatness_with(
    g: &KPartiteGraph,
    r: &Reading,
    s: &SymplecticData,
    opts: &FlatnessOptions,
) -> Result<FlatnessReport, FlatnessError> {
    let kind = kind_of(g, r, opts)?;
    let alg = WeylAlgebra::new(g, s);
    let hamiltonians: Vec<(usize, WeylElement)> =
        quantum_potentials(g, r, kind)?.into_iter().map(|(i, w)| (i, quantum_trace(&w, g, &alg))).collect();
    let classical = classical_potentials(g, r, kind)?;
    let mut report = check_connection_with(g, s, &hamiltonians, opts)?;
    for pair in &mut report.pairs {
        let find = |n: usize| &classical.iter().find(|(m, _)| *m == n).expect("same nodes").1;
        pair.intersections = intersection_breakdown(find(pair.i), find(pair.j));
    }
    Ok(report)
}

pub fn check_connection(
    g: &KPartiteGraph,
    s: &SymplecticData,
    hamiltonians: &[(usize, WeylElement)],
) -> Result<FlatnessReport, FlatnessError> {
    check_connection_with(g, s, hamiltonians, &FlatnessOptions::default())
}

/// Curl and commutator residues for user-supplied quantum Hamiltonians.
pub fn check_connection_with(
    g: &KPartiteGraph,
    s: &SymplecticData,
    hamiltonians: &[(usize, WeylElement)],
    opts: &FlatnessOptions,
) -> Result<FlatnessReport, FlatnessError> {
    if let Some((n, _)) = hamiltonians.iter().find(|(n, _)| *n >= g.node_count()) {
        return Err(FlatnessError::UnknownNode(*n));
    }
    let alg = WeylAlgebra::new(g, s);
    let gens = alg.generators();
    let mut sampler = Sampler::new(opts.seed);
    let mut pairs = Vec::new();
    for (a, (i, hi)) in hamiltonians.iter().enumerate() {
        for (j, hj) in hamiltonians.iter().skip(a + 1) {
            let (ti, tj) = (g.time(*i), g.time(*j));
            let curl = hi.map_coefficients(|c| c.partial(tj)).sub(&hj.map_coefficients(|c| c.partial(ti)));
            let estimate = hi.len().saturating_mul(hj.len());
            let (bracket, sampled) = if estimate <= opts.max_terms {
                (alg.commutator(hi, hj), false)
            } else if opts.fallback {
                (sampled_commutator(g, s, hi, hj, &mut sampler, opts.samples.max(1))?, true)
            } else {
                return Err(FlatnessError::ResourceLimit { i: *i, j: *j, estimate, budget: opts.max_terms });
            };
            pairs.push(PairReport {
                i: *i,
                j: *j,
                curl_residue: curl.render(gens),
                commutator_residue: bracket.render(gens),
                status: status(curl.is_zero(), bracket.is_zero(), sampled),
                intersections: BTreeMap::new(),
            });
        }
    }
    Ok(FlatnessReport::from_pairs(pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anchored::{quantise_imd, AnchoredCycle, QuantumPotential};
    use crate::cycles::{classify_cycle, Cycle, CycleKind};
    use crate::quiver::{build_graph, default_symplectic, Convention, ReadingValue};

    fn zero() -> ReadingValue {
        ReadingValue::Finite(Scalar::zero())
    }

    fn generic(parts: &[usize], dims: &[usize]) -> (KPartiteGraph, Reading, SymplecticData) {
        let (g, r) = build_graph(parts, dims, Reading::symbolic(parts.len()).values().to_vec()).unwrap();
        let s = default_symplectic(&g, &r, Convention::Phi);
        (g, r, s)
    }

    fn degenerate(parts: &[usize], dims: &[usize]) -> (KPartiteGraph, Reading, SymplecticData) {
        let (g, r) = build_graph(parts, dims, vec![zero(), ReadingValue::Infinity]).unwrap();
        let s = default_symplectic(&g, &r, Convention::Unit);
        (g, r, s)
    }

    #[test]
    fn classical_star_and_triangle() {
        let (g, r, s) = degenerate(&[1, 3], &[2, 1, 1, 1]);
        let report = check_classical_flatness(&g, &r, &s).unwrap();
        assert!(report.is_flat());
        assert_eq!(report.summary.pairs, 3);
        let (g, r, s) = generic(&[1, 1, 1], &[1, 1, 1]);
        assert!(check_classical_flatness(&g, &r, &s).unwrap().is_flat());
    }

    #[test]
    fn corrupted_weight_is_caught() {
        let (g, r, s) = generic(&[1, 1, 1], &[1, 1, 1]);
        let mut potentials = classical_potentials(&g, &r, ReadingKind::Generic).unwrap();
        let (cycle, coeff) =
            potentials[0].1.terms().iter().find(|(c, _)| c.len() == 3).map(|(c, v)| (c.clone(), v.clone())).unwrap();
        potentials[0].1.add_term(cycle, coeff);
        let report = check_classical_potentials(&g, &s, &potentials).unwrap();
        assert!(!report.is_flat());
        let bad = report.pairs.iter().find(|p| p.status == PairStatus::Fail).unwrap();
        assert_ne!(bad.commutator_residue, "0");
    }

    #[test]
    fn quantum_star_two_legs() {
        let (g, r, s) = degenerate(&[1, 2], &[2, 1, 1]);
        let report = check_quantum_flatness(&g, &r, &s).unwrap();
        assert!(report.is_flat(), "{:?}", report.pairs);
        assert_eq!(report.pairs[0].status, PairStatus::Pass);
    }

    #[test]
    fn quantum_bipartite_two_by_two() {
        let (g, r, s) = degenerate(&[2, 2], &[1, 1, 1, 1]);
        let report = check_quantum_flatness(&g, &r, &s).unwrap();
        assert_eq!(report.summary.pairs, 6);
        assert!(report.is_flat(), "{:?}", report.pairs);
    }

    #[test]
    fn quantum_generic_triangle() {
        let (g, r, s) = generic(&[1, 1, 1], &[1, 1, 1]);
        assert!(check_quantum_flatness(&g, &r, &s).unwrap().is_flat());
    }

    fn off_centre_hamiltonians(
        g: &KPartiteGraph,
        r: &Reading,
        s: &SymplecticData,
    ) -> Vec<(usize, WeylElement, WeylElement)> {
        let alg = WeylAlgebra::new(g, s);
        let kind = reading_kind(g, r).unwrap();
        let mut out = Vec::new();
        for i in hamiltonian_nodes(g, r, kind) {
            let w = imd_potential_with(g, r, kind, i).unwrap();
            let mut q = quantise_imd(&w.two.add(&w.three)).unwrap();
            for (c, v) in w.four.terms() {
                let term = match classify_cycle(c) {
                    CycleKind::DegenerateFour { center } => {
                        let k = c.arrows().iter().position(|a| a.tail != center).unwrap();
                        let leg_first = AnchoredCycle::new(c.arrows().to_vec()).unwrap().rotated(k).unwrap();
                        QuantumPotential::single(leg_first, v.clone())
                    }
                    _ => quantise_imd(&Potential::single(c.clone(), v.clone())).unwrap(),
                };
                q = q.add(&term);
            }
            let standard = quantum_trace(&quantise_imd(&w.total()).unwrap(), g, &alg);
            out.push((i, standard, quantum_trace(&q, g, &alg)));
        }
        out
    }

    #[test]
    fn off_centre_anchors_shift_by_two_cycles_and_stay_flat() {
        for (g, r, s) in [degenerate(&[2, 2], &[2, 1, 2, 1]), generic(&[2, 1, 1], &[1, 2, 1, 1])] {
            let hs = off_centre_hamiltonians(&g, &r, &s);
            assert!(hs.iter().any(|(_, a, b)| a != b));
            for (_, a, b) in &hs {
                assert!(a.sub(b).filtration_order().map_or(true, |o| o <= 2));
            }
            let h: Vec<_> = hs.into_iter().map(|(i, _, b)| (i, b)).collect();
            assert!(check_connection(&g, &s, &h).unwrap().is_flat());
        }
    }

    #[test]
    fn corrupted_quantum_hamiltonian_is_caught() {
        let (g, r, s) = degenerate(&[2, 2], &[1, 1, 1, 1]);
        let alg = WeylAlgebra::new(&g, &s);
        let mut h: Vec<(usize, WeylElement)> = quantum_potentials(&g, &r, ReadingKind::Bipartite)
            .unwrap()
            .into_iter()
            .map(|(i, w)| (i, quantum_trace(&w, &g, &alg)))
            .collect();
        let extra = AnchoredCycle::through(&[0, 2, 1, 3]).unwrap();
        h[0].1 = h[0].1.add(&quantum_trace(&QuantumPotential::single(extra, Scalar::one()), &g, &alg));
        let report = check_connection(&g, &s, &h).unwrap();
        assert!(!report.is_flat());
        assert!(report.pairs.iter().filter(|p| p.i == 0).any(|p| p.status == PairStatus::Fail));
    }

    #[test]
    fn zero_hamiltonians_are_flat() {
        let (g, _, s) = degenerate(&[1, 2], &[1, 1, 1]);
        let h = vec![(1, WeylElement::zero()), (2, WeylElement::zero())];
        assert!(check_connection(&g, &s, &h).unwrap().is_flat());
        let bad = vec![(9, WeylElement::zero())];
        assert!(matches!(check_connection(&g, &s, &bad), Err(FlatnessError::UnknownNode(9))));
    }

    #[test]
    fn budget_and_fallback() {
        let (g, r, s) = generic(&[1, 1, 1], &[1, 1, 1]);
        let strict = FlatnessOptions { max_terms: 1, fallback: false, ..FlatnessOptions::default() };
        assert!(matches!(check_quantum_flatness_with(&g, &r, &s, &strict), Err(FlatnessError::ResourceLimit { .. })));
        let sampled = FlatnessOptions { max_terms: 1, ..FlatnessOptions::default() };
        let report = check_quantum_flatness_with(&g, &r, &s, &sampled).unwrap();
        assert!(report.pairs.iter().all(|p| p.status == PairStatus::PassByEvaluation));
    }

    #[test]
    fn evaluation_detects_a_bad_pair() {
        let (g, _, s) = generic(&[1, 1, 1], &[1, 1, 1]);
        let alg = WeylAlgebra::new(&g, &s);
        let two = |a: usize, b: usize| {
            let q = quantise_imd(&Potential::single(Cycle::through(&[a, b]).unwrap(), Scalar::one())).unwrap();
            quantum_trace(&q, &g, &alg)
        };
        let tri = quantum_trace(
            &QuantumPotential::single(AnchoredCycle::through(&[0, 1, 2]).unwrap(), Scalar::time(5)),
            &g,
            &alg,
        );
        let h = vec![(0, two(0, 1)), (1, tri)];
        let opts = FlatnessOptions { max_terms: 0, ..FlatnessOptions::default() };
        let report = check_connection_with(&g, &s, &h, &opts).unwrap();
        assert_eq!(report.pairs[0].status, PairStatus::Fail);
    }
}

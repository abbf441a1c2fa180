//! The Lie-algebra side of the reductions: Schlesinger-type systems on
//! `gl_d^{⊕m}`, their quantisations (KZ, DMT, FMTV), moment maps into the
//! Weyl algebra of a bipartite graph, and the differential-operator picture.
//!
//! Factor indices `i` run over the `m` residues and matrix indices over
//! `0..d`. Times attached to factors and to diagonal entries are supplied by
//! a [`ReductionTimes`].

mod algebra;
mod diffop;
mod moment;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anchored::AnchoredError;
use crate::cycles::CycleError;
use crate::quiver::QuiverError;
use crate::scalars::{Scalar, Symbol};
use crate::weyl::WeylError;

pub use algebra::{casimir_omega, omega_between, pbw_quantise, Gen, SymElement, UEnvElement};
pub use diffop::{
    diffop_apply, weyl_module_action, weyl_to_diffop, DiffOp, Orientation, PositionPolynomial, PositionSpace,
};
pub use moment::{
    classical_leg_pullback, classical_moment_pullback, corrected_potentials, correction_difference,
    howe_commutation_check, quantum_reduction_project, BipartiteFrame, CorrectionCase, HoweReport, Projection,
    QuantumMoment, DEFAULT_ORDER_CAP,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("element does not commute with the leg action: {0}")]
    NotInvariant(String),
    #[error("element of order {order} exceeds the order cap {cap}")]
    OrderCapExceeded { order: usize, cap: usize },
    #[error("orientation mismatch: {0}")]
    OrientationMismatch(String),
    #[error("cannot read polynomial: {0}")]
    BadPolynomial(String),
    #[error("unsupported graph: {0}")]
    UnsupportedGraph(String),
    #[error("bracket constants differ along the arrows of factor {0}")]
    NonUniformConstants(usize),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    Anchored(#[from] AnchoredError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

/// Named isomonodromy systems and their quantisations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionSystem {
    Schlesinger,
    Kz,
    DualSchlesinger,
    Dmt,
    Jmms,
    Fmtv,
}

impl ReductionSystem {
    pub fn parse(name: &str) -> Option<ReductionSystem> {
        Some(match name {
            "schlesinger" => ReductionSystem::Schlesinger,
            "kz" => ReductionSystem::Kz,
            "dual_schlesinger" | "dual-schlesinger" => ReductionSystem::DualSchlesinger,
            "dmt" => ReductionSystem::Dmt,
            "jmms" => ReductionSystem::Jmms,
            "fmtv" => ReductionSystem::Fmtv,
            _ => return None,
        })
    }

    pub fn is_quantum(self) -> bool {
        matches!(self, ReductionSystem::Kz | ReductionSystem::Dmt | ReductionSystem::Fmtv)
    }

    /// The classical system a quantum one quantises, and vice versa.
    pub fn partner(self) -> ReductionSystem {
        use ReductionSystem::*;
        match self {
            Schlesinger => Kz,
            Kz => Schlesinger,
            DualSchlesinger => Dmt,
            Dmt => DualSchlesinger,
            Jmms => Fmtv,
            Fmtv => Jmms,
        }
    }
}

/// Times attached to the `m` factors and to the `d` diagonal entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTimes {
    pub factor: Vec<Scalar>,
    pub diagonal: Vec<Scalar>,
}

impl ReductionTimes {
    /// Factor `i` gets `t{i+1}` and diagonal entry `j` gets `s{j+1}`.
    pub fn symbolic(m: usize, d: usize) -> ReductionTimes {
        let sym = |family: &str, k: usize| Scalar::symbol(Symbol::new(family, k as u32 + 1).expect("static family"));
        ReductionTimes {
            factor: (0..m).map(|i| sym("t", i)).collect(),
            diagonal: (0..d).map(|j| sym("s", j)).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.factor.len()
    }

    pub fn d(&self) -> usize {
        self.diagonal.len()
    }
}

/// One Hamiltonian of a named system, classical or quantum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hamiltonian {
    Classical(SymElement),
    Quantum(UEnvElement),
}

impl Hamiltonian {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Hamiltonian::Classical(x) => serde_json::json!({"kind": "classical", "terms": x.to_json()}),
            Hamiltonian::Quantum(x) => serde_json::json!({"kind": "quantum", "terms": x.to_json()}),
        }
    }

    pub fn as_classical(&self) -> Option<&SymElement> {
        match self {
            Hamiltonian::Classical(x) => Some(x),
            Hamiltonian::Quantum(_) => None,
        }
    }

    pub fn as_quantum(&self) -> Option<&UEnvElement> {
        match self {
            Hamiltonian::Quantum(x) => Some(x),
            Hamiltonian::Classical(_) => None,
        }
    }
}

/// Which time a Hamiltonian is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeSlot {
    /// The pole position of factor `i`.
    Factor(usize),
    /// The `j`-th diagonal entry of the irregular part.
    Diagonal(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedHamiltonian {
    pub slot: TimeSlot,
    pub value: Hamiltonian,
}

fn inverse_difference(a: &Scalar, b: &Scalar) -> Result<Scalar, ReductionError> {
    (a - b).inverse().map_err(|_| ReductionError::BadDimension("two times coincide".into()))
}

fn sym_pair(a: Gen, b: Gen) -> SymElement {
    SymElement::var(a).mul(&SymElement::var(b))
}

/// `Σ_{k≠i} Tr(R_i R_k)/(t_i - t_k)` on the symmetric side.
fn schlesinger(i: usize, d: usize, times: &ReductionTimes) -> Result<SymElement, ReductionError> {
    let mut out = SymElement::zero();
    for k in (0..times.m()).filter(|&k| k != i) {
        let w = inverse_difference(&times.factor[i], &times.factor[k])?;
        for a in 0..d {
            for b in 0..d {
                out = out.add(&sym_pair(Gen::new(i, a, b), Gen::new(k, b, a)).scale(&w));
            }
        }
    }
    Ok(out)
}

/// `Σ_{k≠j} Σ_{i,n} (R_i)_{jk} (R_n)_{kj} / (s_j - s_k)`.
fn dual_schlesinger(j: usize, times: &ReductionTimes) -> Result<SymElement, ReductionError> {
    let mut out = SymElement::zero();
    for k in (0..times.d()).filter(|&k| k != j) {
        let w = inverse_difference(&times.diagonal[j], &times.diagonal[k])?;
        for i in 0..times.m() {
            for n in 0..times.m() {
                out = out.add(&sym_pair(Gen::new(i, j, k), Gen::new(n, k, j)).scale(&w));
            }
        }
    }
    Ok(out)
}

fn kz(i: usize, d: usize, times: &ReductionTimes) -> Result<UEnvElement, ReductionError> {
    let mut out = UEnvElement::zero();
    for k in (0..times.m()).filter(|&k| k != i) {
        let w = inverse_difference(&times.factor[i], &times.factor[k])?;
        out = out.add(&omega_between(i, k, d).scale(&w));
    }
    Ok(out)
}

/// The dynamical operator `Σ_{k≠j} Σ_{i,n} e^{(i)}_{jk} e^{(n)}_{kj} / (s_j - s_k)`,
/// ordered as a product of positive and negative root vectors.
fn dynamical(j: usize, times: &ReductionTimes) -> Result<UEnvElement, ReductionError> {
    let mut out = UEnvElement::zero();
    for k in (0..times.d()).filter(|&k| k != j) {
        let w = inverse_difference(&times.diagonal[j], &times.diagonal[k])?;
        for i in 0..times.m() {
            for n in 0..times.m() {
                out = out.add(&UEnvElement::ordered_product(&[Gen::new(i, j, k), Gen::new(n, k, j)], w.clone()));
            }
        }
    }
    Ok(out)
}

fn diagonal_linear_classical(i: usize, times: &ReductionTimes) -> SymElement {
    let mut out = SymElement::zero();
    for (j, t) in times.diagonal.iter().enumerate() {
        out = out.add(&SymElement::monomial(vec![Gen::new(i, j, j)], t.clone()));
    }
    out
}

fn factor_linear_classical(j: usize, times: &ReductionTimes) -> SymElement {
    let mut out = SymElement::zero();
    for (i, t) in times.factor.iter().enumerate() {
        out = out.add(&SymElement::monomial(vec![Gen::new(i, j, j)], t.clone()));
    }
    out
}

/// The Hamiltonians of a named system on `gl_d^{⊕m}`, where `m` and `d` are
/// read off the times.
///
/// * Schlesinger and KZ have one Hamiltonian per factor.
/// * Dual Schlesinger and DMT have one per diagonal entry. With several
///   factors the residue is `R = Σ_i R_i` and DMT acts through the coproduct.
/// * JMMS and FMTV have both kinds, factor Hamiltonians first.
pub fn named_hamiltonians(
    system: ReductionSystem,
    times: &ReductionTimes,
) -> Result<Vec<NamedHamiltonian>, ReductionError> {
    let (m, d) = (times.m(), times.d());
    if m == 0 || d == 0 {
        return Err(ReductionError::BadDimension(format!("m = {m} and d = {d} must both be positive")));
    }
    let needs_rank_two = matches!(
        system,
        ReductionSystem::DualSchlesinger | ReductionSystem::Dmt | ReductionSystem::Jmms | ReductionSystem::Fmtv
    );
    if needs_rank_two && d < 2 {
        return Err(ReductionError::BadDimension(format!("{system:?} needs d >= 2, got {d}")));
    }
    let mut out = Vec::new();
    let factor_slots = (0..m).map(TimeSlot::Factor);
    let diagonal_slots = (0..d).map(TimeSlot::Diagonal);
    use Hamiltonian::{Classical, Quantum};
    match system {
        ReductionSystem::Schlesinger => {
            for (i, slot) in factor_slots.enumerate() {
                out.push(NamedHamiltonian { slot, value: Classical(schlesinger(i, d, times)?) });
            }
        }
        ReductionSystem::Kz => {
            for (i, slot) in factor_slots.enumerate() {
                out.push(NamedHamiltonian { slot, value: Quantum(kz(i, d, times)?) });
            }
        }
        ReductionSystem::DualSchlesinger => {
            for (j, slot) in diagonal_slots.enumerate() {
                out.push(NamedHamiltonian { slot, value: Classical(dual_schlesinger(j, times)?) });
            }
        }
        ReductionSystem::Dmt => {
            for (j, slot) in diagonal_slots.enumerate() {
                out.push(NamedHamiltonian { slot, value: Quantum(pbw_quantise(&dual_schlesinger(j, times)?)) });
            }
        }
        ReductionSystem::Jmms => {
            for (i, slot) in factor_slots.enumerate() {
                let h = schlesinger(i, d, times)?.add(&diagonal_linear_classical(i, times));
                out.push(NamedHamiltonian { slot, value: Classical(h) });
            }
            for (j, slot) in diagonal_slots.enumerate() {
                let h = dual_schlesinger(j, times)?.add(&factor_linear_classical(j, times));
                out.push(NamedHamiltonian { slot, value: Classical(h) });
            }
        }
        ReductionSystem::Fmtv => {
            for (i, slot) in factor_slots.enumerate() {
                let h = kz(i, d, times)?.add(&pbw_quantise(&diagonal_linear_classical(i, times)));
                out.push(NamedHamiltonian { slot, value: Quantum(h) });
            }
            for (j, slot) in diagonal_slots.enumerate() {
                let h = dynamical(j, times)?.add(&pbw_quantise(&factor_linear_classical(j, times)));
                out.push(NamedHamiltonian { slot, value: Quantum(h) });
            }
        }
    }
    Ok(out)
}

/// `Σ_i Σ_{k≠j} (e^{(i)}_{kk} - e^{(i)}_{jj}) / (2(s_j - s_k))`: the order-one
/// gap between the symmetrised and the root-ordered dynamical operators.
pub fn dynamical_gap(j: usize, times: &ReductionTimes) -> Result<UEnvElement, ReductionError> {
    if j >= times.d() {
        return Err(ReductionError::DimensionMismatch(format!("diagonal index {j} out of range")));
    }
    let mut out = UEnvElement::zero();
    for k in (0..times.d()).filter(|&k| k != j) {
        let w = &inverse_difference(&times.diagonal[j], &times.diagonal[k])? * &Scalar::ratio(1, 2);
        for i in 0..times.m() {
            let diff = UEnvElement::generator(Gen::new(i, k, k)).sub(&UEnvElement::generator(Gen::new(i, j, j)));
            out = out.add(&diff.scale(&w));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quantum(system: ReductionSystem, times: &ReductionTimes) -> Vec<UEnvElement> {
        named_hamiltonians(system, times).unwrap().into_iter().map(|h| h.value.as_quantum().unwrap().clone()).collect()
    }

    fn classical(system: ReductionSystem, times: &ReductionTimes) -> Vec<SymElement> {
        named_hamiltonians(system, times)
            .unwrap()
            .into_iter()
            .map(|h| h.value.as_classical().unwrap().clone())
            .collect()
    }

    #[test]
    fn kz_for_two_points() {
        let times = ReductionTimes::symbolic(2, 2);
        let h = quantum(ReductionSystem::Kz, &times);
        let w = (&times.factor[0] - &times.factor[1]).inverse().unwrap();
        assert_eq!(h[0], omega_between(0, 1, 2).scale(&w));
        assert_eq!(h[1], omega_between(1, 0, 2).scale(&-&w));
    }

    #[test]
    fn kz_hamiltonians_commute_for_three_points() {
        let times = ReductionTimes::symbolic(3, 2);
        let h = quantum(ReductionSystem::Kz, &times);
        for a in 0..3 {
            for b in a + 1..3 {
                assert!(h[a].commutator(&h[b]).is_zero(), "pair {a} {b}");
            }
        }
    }

    #[test]
    fn kz_is_the_quantised_schlesinger_system() {
        let times = ReductionTimes::symbolic(3, 2);
        let q = quantum(ReductionSystem::Kz, &times);
        let c = classical(ReductionSystem::Schlesinger, &times);
        for (k, s) in q.iter().zip(&c) {
            assert_eq!(&pbw_quantise(s), k);
        }
    }

    #[test]
    fn dmt_single_gap() {
        let times = ReductionTimes::symbolic(1, 2);
        let h = quantum(ReductionSystem::Dmt, &times);
        let (a, b) = (Gen::new(0, 0, 1), Gen::new(0, 1, 0));
        let w = (&times.diagonal[0] - &times.diagonal[1]).inverse().unwrap();
        let half = &w * &Scalar::ratio(1, 2);
        let expected =
            UEnvElement::ordered_product(&[a, b], half.clone()).add(&UEnvElement::ordered_product(&[b, a], half));
        assert_eq!(h[0], expected);
    }

    #[test]
    fn fmtv_dynamical_part_differs_from_dmt_by_the_gap() {
        let mut times = ReductionTimes::symbolic(1, 3);
        times.factor = vec![Scalar::zero()];
        let dmt = quantum(ReductionSystem::Dmt, &times);
        let fmtv = quantum(ReductionSystem::Fmtv, &times);
        for j in 0..3 {
            let gap = dynamical_gap(j, &times).unwrap();
            assert_eq!(dmt[j], fmtv[1 + j].add(&gap));
            assert_eq!(gap.filtration_order(), Some(1));
        }
    }

    #[test]
    fn fmtv_minus_quantised_jmms_is_minus_the_gap() {
        let times = ReductionTimes::symbolic(2, 2);
        let fmtv = quantum(ReductionSystem::Fmtv, &times);
        let jmms = classical(ReductionSystem::Jmms, &times);
        for i in 0..2 {
            assert_eq!(fmtv[i], pbw_quantise(&jmms[i]));
        }
        for j in 0..2 {
            let diff = fmtv[2 + j].sub(&pbw_quantise(&jmms[2 + j]));
            let gap = dynamical_gap(j, &times).unwrap();
            assert_eq!(diff, gap.scale(&Scalar::from_int(-1)));
            assert_eq!(diff.leading_symbol().degree(), 1);
        }
    }

    #[test]
    fn rank_one_is_rejected_where_roots_are_needed() {
        let times = ReductionTimes::symbolic(2, 1);
        assert!(matches!(named_hamiltonians(ReductionSystem::Dmt, &times), Err(ReductionError::BadDimension(_))));
        assert!(named_hamiltonians(ReductionSystem::Kz, &times).is_ok());
    }
}

//! Enumeration of intersection classes of Hamiltonian cycles.
//!
//! Two cycles intersect when one contains an arrow whose reverse lies in the
//! other. Intersections are grouped by the families of the two cycles and
//! the number of antiparallel pairs they share; for two degenerate squares
//! the group also records whether the centres agree.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::cycles::{classify_cycle, necklace_bracket, Cycle, CycleKind};
use crate::quiver::{KPartiteGraph, SymplecticData};

/// The shape of a pair of cycles: each cycle as its visiting sequence of
/// relabelled nodes.
pub type PairShape = (Vec<usize>, Vec<usize>);

/// Cycle families of a Hamiltonian potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleFamily {
    Two,
    Three,
    NondegenerateFour,
    DegenerateFour,
}

impl CycleFamily {
    pub fn of(c: &Cycle) -> Option<CycleFamily> {
        match classify_cycle(c) {
            CycleKind::TwoCycle => Some(CycleFamily::Two),
            CycleKind::ThreeCycle => Some(CycleFamily::Three),
            CycleKind::NondegenerateFour => Some(CycleFamily::NondegenerateFour),
            CycleKind::DegenerateFour { .. } => Some(CycleFamily::DegenerateFour),
            CycleKind::Other { .. } => None,
        }
    }
}

/// The type of an intersection: the two families, how many antiparallel
/// pairs the cycles share, and for two degenerate squares whether their
/// centres coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IntersectionType {
    pub families: (CycleFamily, CycleFamily),
    pub shared_pairs: usize,
    pub common_centre: Option<bool>,
}

impl IntersectionType {
    pub fn of(c1: &Cycle, c2: &Cycle) -> Option<IntersectionType> {
        let shared = shared_pairs(c1, c2);
        if shared == 0 {
            return None;
        }
        let mut families = [CycleFamily::of(c1)?, CycleFamily::of(c2)?];
        families.sort();
        let common_centre = match (classify_cycle(c1), classify_cycle(c2)) {
            (CycleKind::DegenerateFour { center: a }, CycleKind::DegenerateFour { center: b }) => Some(a == b),
            _ => None,
        };
        Some(IntersectionType { families: (families[0], families[1]), shared_pairs: shared, common_centre })
    }
}

/// Every cycle that can appear in a Hamiltonian potential on `g`.
pub fn imd_cycles(g: &KPartiteGraph) -> BTreeSet<Cycle> {
    let nodes: Vec<usize> = g.nodes().collect();
    let mut out = BTreeSet::new();
    for &i in &nodes {
        for &j in nodes.iter().filter(|&&j| g.adjacent(i, j)) {
            out.insert(Cycle::through(&[i, j]).expect("edge"));
            for &l in nodes.iter().filter(|&&l| g.adjacent(j, l) && g.adjacent(l, i)) {
                out.insert(Cycle::through(&[i, j, l]).expect("triangle"));
            }
            for &m in nodes.iter().filter(|&&m| m != i && g.part_of(m) == g.part_of(i)) {
                for &l in nodes.iter().filter(|&&l| g.adjacent(l, i)) {
                    out.insert(Cycle::through(&[i, j, m, l]).expect("square"));
                }
            }
        }
    }
    out
}

fn visits(c: &Cycle) -> Vec<usize> {
    c.arrows().iter().map(|a| a.tail).collect()
}

fn relabel(first: &[usize], second: &[usize]) -> PairShape {
    let mut names = BTreeMap::new();
    let mut name = |n: usize| {
        let next = names.len();
        *names.entry(n).or_insert(next)
    };
    let a = first.iter().map(|&n| name(n)).collect();
    let b = second.iter().map(|&n| name(n)).collect();
    (a, b)
}

fn rotations(v: &[usize]) -> Vec<Vec<usize>> {
    (0..v.len()).map(|k| v[k..].iter().chain(&v[..k]).copied().collect()).collect()
}

/// Canonical shape of an unordered pair, ignoring node names.
pub fn pair_shape(c1: &Cycle, c2: &Cycle) -> PairShape {
    let (v1, v2) = (visits(c1), visits(c2));
    let mut best: Option<PairShape> = None;
    for (x, y) in [(&v1, &v2), (&v2, &v1)] {
        for rx in rotations(x) {
            for ry in rotations(y) {
                let shape = relabel(&rx, &ry);
                if best.as_ref().is_none_or(|b| shape < *b) {
                    best = Some(shape);
                }
            }
        }
    }
    best.expect("nonempty cycles")
}

pub fn intersects(c1: &Cycle, c2: &Cycle) -> bool {
    c1.arrows().iter().any(|a| c2.arrows().contains(&a.star()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionClass {
    pub kind: IntersectionType,
    /// Distinct pair shapes met inside this class.
    pub shapes: usize,
    pub example: (String, String),
    pub nonzero_bracket: bool,
    pub free_of_antiparallel: bool,
    pub occurrences: usize,
}

fn shared_pairs(c1: &Cycle, c2: &Cycle) -> usize {
    c1.arrows().iter().filter(|a| c2.arrows().contains(&a.star())).count()
}

/// All intersection classes of distinct Hamiltonian cycles on `g`, sorted by type.
pub fn intersection_census(g: &KPartiteGraph, s: &SymplecticData) -> Vec<IntersectionClass> {
    let cycles: Vec<Cycle> = imd_cycles(g).into_iter().collect();
    let mut classes: BTreeMap<IntersectionType, (IntersectionClass, BTreeSet<PairShape>)> = BTreeMap::new();
    for (p, c1) in cycles.iter().enumerate() {
        for c2 in &cycles[p + 1..] {
            let Some(kind) = IntersectionType::of(c1, c2) else { continue };
            let shape = pair_shape(c1, c2);
            let bracket = necklace_bracket(c1, c2, s);
            let nonzero = !bracket.is_zero();
            let free = bracket.terms().keys().all(|c| !c.has_antiparallel_pair());
            let (class, shapes) = classes.entry(kind).or_insert_with(|| {
                let class = IntersectionClass {
                    kind,
                    shapes: 0,
                    example: (c1.to_string(), c2.to_string()),
                    nonzero_bracket: false,
                    free_of_antiparallel: true,
                    occurrences: 0,
                };
                (class, BTreeSet::new())
            });
            if shapes.insert(shape) {
                class.shapes += 1;
            }
            class.occurrences += 1;
            class.nonzero_bracket |= nonzero;
            class.free_of_antiparallel &= free;
        }
    }
    classes
        .into_values()
        .map(|(mut class, _)| {
            class.free_of_antiparallel &= class.nonzero_bracket;
            class
        })
        .collect()
}

/// Totals of a census: classes, classes with a nonzero bracket, and classes
/// whose bracket is free of antiparallel pairs.
pub fn census_counts(classes: &[IntersectionClass]) -> (usize, usize, usize) {
    let nonzero = classes.iter().filter(|c| c.nonzero_bracket).count();
    let free = classes.iter().filter(|c| c.free_of_antiparallel).count();
    (classes.len(), nonzero, free)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{build_graph, default_symplectic, Convention, Reading};

    fn census(parts: &[usize]) -> Vec<IntersectionClass> {
        let n = parts.iter().sum();
        let r = Reading::symbolic(parts.len());
        let (g, r) = build_graph(parts, &vec![1; n], r.values().to_vec()).unwrap();
        let s = default_symplectic(&g, &r, Convention::Phi);
        intersection_census(&g, &s)
    }

    #[test]
    fn full_census_on_a_wide_four_part_graph() {
        let classes = census(&[3, 2, 1, 1]);
        assert_eq!(census_counts(&classes), (15, 13, 5));
        let vanishing: Vec<_> = classes.iter().filter(|c| !c.nonzero_bracket).map(|c| c.kind).collect();
        assert!(vanishing.contains(&IntersectionType {
            families: (CycleFamily::Two, CycleFamily::DegenerateFour),
            shared_pairs: 2,
            common_centre: None,
        }));
        assert!(vanishing.contains(&IntersectionType {
            families: (CycleFamily::DegenerateFour, CycleFamily::DegenerateFour),
            shared_pairs: 2,
            common_centre: Some(false),
        }));
    }

    #[test]
    fn narrow_graph_misses_the_degenerate_pairs() {
        assert_eq!(census_counts(&census(&[2, 1, 1, 1])), (11, 10, 4));
    }

    #[test]
    fn shape_ignores_names_and_order() {
        let a = Cycle::through(&[0, 2, 3]).unwrap();
        let b = Cycle::through(&[0, 3, 2]).unwrap();
        let c = Cycle::through(&[5, 7, 6]).unwrap();
        let d = Cycle::through(&[5, 6, 7]).unwrap();
        assert_eq!(pair_shape(&a, &b), pair_shape(&d, &c));
        assert!(intersects(&a, &b));
        assert!(!intersects(&a, &d));
    }
}

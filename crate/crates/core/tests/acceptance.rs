//! Acceptance suite: one line per criterion, exit status 1 if any fails.
//!
//! Every criterion demands exact equality. A criterion that runs over its
//! time budget is reported as failing as well.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use imd_core::anchored::census::{census_counts, imd_cycles, intersection_census, CycleFamily};
use imd_core::anchored::{
    quantise_cycle, quantise_imd, quantum_cycle_commutator, quantum_potentials, quantum_trace, quantum_trace_cycle,
    AnchoredCycle, QuantumPotential,
};
use imd_core::cycles::{
    hamiltonian_nodes, imd_potential_with, necklace_bracket, poisson_bracket_oracle, potential_time_derivative,
    reading_kind, trace, trace_potential, Cycle, ReadingKind,
};
use imd_core::flatness::{check_classical_flatness_with, check_quantum_flatness_with, FlatnessOptions, PairStatus};
use imd_core::quiver::{
    build_graph, default_symplectic, Arrow, Convention, Generators, KPartiteGraph, Reading, ReadingValue,
    SymplecticData,
};
use imd_core::reductions::{
    correction_difference, diffop_apply, howe_commutation_check, named_hamiltonians, pbw_quantise, weyl_module_action,
    weyl_to_diffop, Gen, Orientation, PositionPolynomial, QuantumMoment, ReductionSystem, ReductionTimes, SymElement,
    TimeSlot, UEnvElement,
};
use imd_core::scalars::Scalar;
use imd_core::weyl::WeylAlgebra;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

struct Instance {
    g: KPartiteGraph,
    r: Reading,
    s: SymplecticData,
}

fn generic(parts: &[usize], dims: &[usize]) -> Instance {
    let r = Reading::symbolic(parts.len());
    let (g, r) = build_graph(parts, dims, r.values().to_vec()).unwrap();
    let s = default_symplectic(&g, &r, Convention::Phi);
    Instance { g, r, s }
}

/// Zero part first, infinity part second.
fn degenerate(parts: [usize; 2], dims: &[usize]) -> Instance {
    let values = vec![ReadingValue::Finite(Scalar::zero()), ReadingValue::Infinity];
    let (g, r) = build_graph(&parts, dims, values).unwrap();
    let s = default_symplectic(&g, &r, Convention::Unit);
    Instance { g, r, s }
}

fn star(m: usize, zero_dim: usize) -> Instance {
    let mut dims = vec![zero_dim];
    dims.extend(std::iter::repeat_n(1, m));
    degenerate([1, m], &dims)
}

fn exact() -> FlatnessOptions {
    FlatnessOptions { max_terms: usize::MAX, fallback: false, ..FlatnessOptions::default() }
}

/// Every closed walk of length 2 to `max_len`, up to rotation.
fn closed_walks(g: &KPartiteGraph, max_len: usize) -> BTreeSet<Cycle> {
    fn extend(g: &KPartiteGraph, start: usize, path: &mut Vec<Arrow>, max_len: usize, out: &mut BTreeSet<Cycle>) {
        let here = path.last().map_or(start, |a| a.head);
        for next in g.nodes().filter(|&n| g.adjacent(here, n)) {
            path.push(Arrow::new(here, next));
            if next == start {
                out.insert(Cycle::new(path.clone()).unwrap());
            }
            if path.len() < max_len {
                extend(g, start, path, max_len, out);
            }
            path.pop();
        }
    }
    let mut out = BTreeSet::new();
    for start in g.nodes() {
        extend(g, start, &mut Vec::new(), max_len, &mut out);
    }
    out
}

fn criterion_1() -> Outcome {
    let mut pairs = 0;
    let mut graphs = 0;
    for mask in 0..16u32 {
        let dims: Vec<usize> = (0..4).map(|b| 1 + ((mask >> b) & 1) as usize).collect();
        let inst = generic(&[1, 1, 2], &dims);
        let gens = Generators::new(&inst.g);
        let cycles: Vec<Cycle> = closed_walks(&inst.g, 4).into_iter().collect();
        let traces: Vec<_> = cycles.iter().map(|c| trace(c, &inst.g, &gens)).collect();
        for a in 0..cycles.len() {
            for b in a..cycles.len() {
                let bracket = necklace_bracket(&cycles[a], &cycles[b], &inst.s);
                let lhs = trace_potential(&bracket, &inst.g, &gens);
                let rhs = poisson_bracket_oracle(&traces[a], &traces[b], &gens, &inst.s);
                ensure!(lhs == rhs, "dims {dims:?}: {} with {}", cycles[a], cycles[b]);
                pairs += 1;
            }
        }
        graphs += 1;
    }
    Ok(format!("{pairs} pairs over {graphs} dimension vectors"))
}

fn criterion_2() -> Outcome {
    let inst = generic(&[2, 1, 1], &[1, 1, 1, 1]);
    let nodes = hamiltonian_nodes(&inst.g, &inst.r, ReadingKind::Generic);
    let w: BTreeMap<usize, _> = nodes
        .iter()
        .map(|&i| (i, imd_potential_with(&inst.g, &inst.r, ReadingKind::Generic, i).unwrap().total()))
        .collect();
    let mut pairs = 0;
    for &i in &nodes {
        for &j in nodes.iter().filter(|&&j| j > i) {
            let lhs = potential_time_derivative(&w[&j], inst.g.time(i));
            let rhs = potential_time_derivative(&w[&i], inst.g.time(j));
            ensure!(lhs == rhs, "curl of ({i}, {j}) is nonzero");
            ensure!(!lhs.is_zero(), "derivative of W_{j} in t_{i} vanishes, so the check is vacuous");
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs"))
}

fn all_exact_passes(report: &imd_core::flatness::FlatnessReport) -> bool {
    report.pairs.iter().all(|p| p.status == PairStatus::Pass)
}

fn criterion_3() -> Outcome {
    let mut pairs = 0;
    for (name, inst) in [("star m=3", star(3, 2)), ("triangle", generic(&[1, 1, 1], &[1, 1, 1]))] {
        let report = check_classical_flatness_with(&inst.g, &inst.r, &inst.s, &exact()).unwrap();
        ensure!(report.summary.pairs > 0, "{name}: no pairs");
        ensure!(all_exact_passes(&report), "{name}: {:?}", report.pairs.iter().find(|p| p.status != PairStatus::Pass));
        pairs += report.summary.pairs;
    }
    Ok(format!("{pairs} pairs exact"))
}

fn criterion_4() -> Outcome {
    let cases = [
        ("star m=2", star(2, 2)),
        ("dual star l=3", degenerate([3, 1], &[1, 1, 1, 2])),
        ("bipartite 2x2", degenerate([2, 2], &[1, 1, 1, 1])),
    ];
    let mut pairs = 0;
    for (name, inst) in cases {
        let report = check_quantum_flatness_with(&inst.g, &inst.r, &inst.s, &exact()).unwrap();
        ensure!(report.summary.pairs > 0, "{name}: no pairs");
        ensure!(all_exact_passes(&report), "{name}: {:?}", report.pairs.iter().find(|p| p.status != PairStatus::Pass));
        pairs += report.summary.pairs;
    }
    Ok(format!("{pairs} pairs exact"))
}

fn criterion_5() -> Outcome {
    let inst = generic(&[2, 1, 1, 1], &[1; 5]);
    let counts = census_counts(&intersection_census(&inst.g, &inst.s));
    ensure!(counts == (15, 13, 5), "found (classes, nonzero, antiparallel-free) = {counts:?}, expected (15, 13, 5)");
    Ok(format!("{counts:?}"))
}

fn reversed(c: &Cycle) -> Cycle {
    Cycle::new(c.arrows().iter().rev().map(|a| a.star()).collect()).unwrap()
}

fn category(c1: &Cycle, c2: &Cycle) -> Option<&'static str> {
    use CycleFamily::*;
    let mut f = [CycleFamily::of(c1)?, CycleFamily::of(c2)?];
    f.sort();
    Some(match (f[0], f[1]) {
        (DegenerateFour, DegenerateFour) => "degenerate-4 pairs",
        (Two, Three) => "3-cycle x 2-cycle",
        (Three, NondegenerateFour) => "4-cycle x 3-cycle",
        (NondegenerateFour, DegenerateFour) => "4-cycle x degenerate-4",
        (Two, NondegenerateFour) => "4-cycle x 2-cycle",
        (NondegenerateFour, NondegenerateFour) if reversed(c1) == *c2 => "opposite 4-cycles",
        _ => return None,
    })
}

fn criterion_6() -> Outcome {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for (parts, dims) in [(vec![3, 1, 1], vec![1, 1, 2, 1, 1]), (vec![2, 1, 1, 1], vec![2, 1, 1, 2, 1])] {
        let inst = generic(&parts, &dims);
        let alg = WeylAlgebra::new(&inst.g, &inst.s);
        let anchored: BTreeSet<AnchoredCycle> = imd_cycles(&inst.g)
            .iter()
            .flat_map(|c| quantise_cycle(c).unwrap().terms().keys().cloned().collect::<Vec<_>>())
            .collect();
        let anchored: Vec<AnchoredCycle> = anchored.into_iter().collect();
        let traces: Vec<_> = anchored.iter().map(|c| quantum_trace_cycle(c, &inst.g, &alg)).collect();
        for p in 0..anchored.len() {
            for q in p + 1..anchored.len() {
                let (c1, c2) = (&anchored[p].classical(), &anchored[q].classical());
                let shares = c1.arrows().iter().any(|a| c2.arrows().contains(&a.star()));
                let Some(cat) = category(c1, c2).filter(|_| shares) else { continue };
                let combinatorial =
                    quantum_cycle_commutator(&anchored[p], &anchored[q], &inst.s).map_err(|e| format!("{cat}: {e}"))?;
                let brute = alg.commutator(&traces[p], &traces[q]);
                ensure!(
                    quantum_trace(&combinatorial, &inst.g, &alg) == brute,
                    "{cat}: {} with {}",
                    anchored[p],
                    anchored[q]
                );
                *seen.entry(cat).or_default() += 1;
            }
        }
    }
    ensure!(seen.len() == 6, "categories reached: {:?}", seen.keys().collect::<Vec<_>>());
    Ok(seen.iter().map(|(k, v)| format!("{k}: {v}")).collect::<Vec<_>>().join(", "))
}

fn gen(f: usize, r: usize, c: usize) -> UEnvElement {
    UEnvElement::generator(Gen::new(f, r, c))
}

fn criterion_7() -> Outcome {
    // the symmetrised trace pairing against the Casimir tensor written out entrywise
    for i in 0..3 {
        for j in (0..3).filter(|&j| j != i) {
            let mut classical = SymElement::zero();
            let mut omega = UEnvElement::zero();
            for a in 0..2 {
                for b in 0..2 {
                    let (x, y) = (Gen::new(i, a, b), Gen::new(j, b, a));
                    classical = classical.add(&SymElement::var(x).mul(&SymElement::var(y)));
                    omega = omega.add(&gen(i, a, b).mul(&gen(j, b, a)));
                }
            }
            ensure!(pbw_quantise(&classical) == omega, "symmetrised Tr(R_{i} R_{j}) differs from the Casimir tensor");
        }
    }
    let inst = star(3, 2);
    let qm = QuantumMoment::new(&inst.g, &inst.r, &inst.s).unwrap();
    let kz = named_hamiltonians(ReductionSystem::Kz, qm.frame().times()).unwrap();
    let slqc: BTreeMap<usize, QuantumPotential> =
        quantum_potentials(&inst.g, &inst.r, ReadingKind::Star).unwrap().into_iter().collect();
    for h in &kz {
        let TimeSlot::Factor(i) = h.slot else { return Err("KZ Hamiltonian on a diagonal slot".into()) };
        let node = qm.frame().factor_node(i);
        let lhs = qm.pullback(h.value.as_quantum().unwrap()).unwrap();
        ensure!(lhs == quantum_trace(&slqc[&node], &inst.g, qm.target()), "KZ pullback differs at node {node}");
    }
    let mut checked = 0;
    for inst in [star(3, 2), degenerate([2, 2], &[1, 1, 2, 1])] {
        let report = howe_commutation_check(&QuantumMoment::new(&inst.g, &inst.r, &inst.s).unwrap());
        ensure!(report.all_zero(), "Howe commutator nonzero: {} with {}", report.nonzero[0].0, report.nonzero[0].1);
        checked += report.checked;
    }
    Ok(format!("{} KZ Hamiltonians, {checked} Howe commutators", kz.len()))
}

/// `Σ_i Σ_{k≠j} (e_kk - e_jj) / (2 (s_j - s_k))`, written out from the generators.
fn explicit_gap(j: usize, times: &ReductionTimes) -> UEnvElement {
    let mut out = UEnvElement::zero();
    for k in (0..times.d()).filter(|&k| k != j) {
        let w = (&(&times.diagonal[j] - &times.diagonal[k]) * &Scalar::from_int(2)).inverse().unwrap();
        for i in 0..times.m() {
            out = out.add(&gen(i, k, k).sub(&gen(i, j, j)).scale(&w));
        }
    }
    out
}

fn quantum_list(system: ReductionSystem, times: &ReductionTimes) -> Vec<UEnvElement> {
    named_hamiltonians(system, times).unwrap().into_iter().map(|h| h.value.as_quantum().unwrap().clone()).collect()
}

fn criterion_8() -> Outcome {
    // change of anchor on a dual star with one-dimensional leaves
    let inst = degenerate([2, 1], &[1, 1, 2]);
    let alg = WeylAlgebra::new(&inst.g, &inst.s);
    let (i, j, hub) = (0, 1, 2);
    let tr = |nodes: &[usize]| quantum_trace_cycle(&AnchoredCycle::through(nodes).unwrap(), &inst.g, &alg);
    let lhs = tr(&[i, hub, j, hub]).sub(&tr(&[hub, i, hub, j]));
    ensure!(lhs == tr(&[hub, j]), "change-of-anchor difference is not Tr(P_j Q_j)");
    ensure!(!lhs.is_zero(), "change-of-anchor difference vanished");

    let mut times = ReductionTimes::symbolic(1, 3);
    times.factor = vec![Scalar::zero()];
    let dmt = quantum_list(ReductionSystem::Dmt, &times);
    let fmtv = quantum_list(ReductionSystem::Fmtv, &times);
    for j in 0..3 {
        ensure!(dmt[j].sub(&fmtv[1 + j]) == explicit_gap(j, &times), "DMT - FMTV-II at j = {j}");
    }

    let times = ReductionTimes::symbolic(2, 2);
    let fmtv = quantum_list(ReductionSystem::Fmtv, &times);
    let jmms: Vec<SymElement> = named_hamiltonians(ReductionSystem::Jmms, &times)
        .unwrap()
        .into_iter()
        .map(|h| h.value.as_classical().unwrap().clone())
        .collect();
    for j in 0..2 {
        let diff = fmtv[2 + j].sub(&pbw_quantise(&jmms[2 + j]));
        ensure!(diff == explicit_gap(j, &times).scale(&Scalar::from_int(-1)), "FMTV-II - Q(JMMS-0) at j = {j}");
        ensure!(diff.filtration_order() == Some(1), "FMTV-II - Q(JMMS-0) is not of order one");
    }
    Ok("anchor change, DMT at m=1 d=3, JMMS at m=2 d=2".into())
}

fn criterion_9() -> Outcome {
    let suite = [
        ("star m=3", star(3, 2)),
        ("star m=2", star(2, 2)),
        ("triangle", generic(&[1, 1, 1], &[1, 1, 1])),
        ("generic (2,1,1)", generic(&[2, 1, 1], &[1, 1, 1, 1])),
        ("dual star", degenerate([3, 1], &[1, 1, 1, 2])),
        ("bipartite 2x2", degenerate([2, 2], &[1, 1, 1, 1])),
    ];
    let mut symbols = 0;
    for (name, inst) in &suite {
        let kind = reading_kind(&inst.g, &inst.r).unwrap();
        let gens = Generators::new(&inst.g);
        let alg = WeylAlgebra::new(&inst.g, &inst.s);
        for node in hamiltonian_nodes(&inst.g, &inst.r, kind) {
            let w = imd_potential_with(&inst.g, &inst.r, kind, node).unwrap();
            let longest = [&w.four, &w.three, &w.two].into_iter().find(|p| !p.is_zero()).unwrap();
            let leading = quantise_imd(&w.total()).unwrap().leading_potential();
            ensure!(&leading == longest, "{name}, node {node}: leading cycles");
            for part in [&w.four, &w.three, &w.two].into_iter().filter(|p| !p.is_zero()) {
                let quantum = quantum_trace(&quantise_imd(part).unwrap(), &inst.g, &alg);
                let classical = trace_potential(part, &inst.g, &gens);
                ensure!(quantum.semiclassical_limit().unwrap() == classical, "{name}, node {node}: symbol differs");
                symbols += 1;
            }
        }
    }
    let mut corrections = 0;
    for (name, inst) in &suite[4..] {
        for (node, diff) in correction_difference(&inst.g, &inst.r, &inst.s).unwrap() {
            let order = diff.filtration_order().unwrap_or(0);
            ensure!(order < 4, "{name}, node {node}: correction has order {order}");
            ensure!(!diff.rees_homogenize().contains_key(&4), "{name}, node {node}: order-four part survives");
            corrections += 1;
        }
    }
    Ok(format!("{symbols} symbols, {corrections} corrections"))
}

fn criterion_10() -> Outcome {
    let inst = generic(&[1, 1, 1], &[1, 1, 1]);
    let alg = WeylAlgebra::new(&inst.g, &inst.s);
    let (node, q) = quantum_potentials(&inst.g, &inst.r, ReadingKind::Generic).unwrap().remove(0);
    ensure!(node == 0, "first Hamiltonian sits at node {node}");
    let h = quantum_trace(&q, &inst.g, &alg);
    let (op, space) = weyl_to_diffop(&h, &inst.g, &alg, &Orientation::cyclic(&inst.g).unwrap()).unwrap();
    let v = |name: &str| space.index_of(name).unwrap();
    let (q12, q23, q31) = (v("q(1,2)"), v("q(2,3)"), v("q(3,1)"));
    let exps = |vars: &[usize]| {
        let mut e = vec![0u32; 3];
        vars.iter().for_each(|&x| e[x] += 1);
        e
    };
    let expected: BTreeSet<_> = [
        (exps(&[q31, q23, q12]), exps(&[])),
        (exps(&[]), exps(&[q31, q23, q12])),
        (exps(&[q12]), exps(&[q12])),
        (exps(&[q31]), exps(&[q31])),
        (exps(&[]), exps(&[])),
    ]
    .into_iter()
    .collect();
    let support: BTreeSet<_> = op.terms().keys().cloned().collect();
    ensure!(support == expected, "monomial support differs: {}", op.render(&space));
    let mut monomials = 0;
    for total in 0..=3u32 {
        for x in 0..=total {
            for y in 0..=total - x {
                let p = PositionPolynomial::monomial(vec![x, y, total - x - y], Scalar::one());
                ensure!(
                    diffop_apply(&op, &p) == weyl_module_action(&h, &space, &p),
                    "action differs on {}",
                    p.render(&space)
                );
                monomials += 1;
            }
        }
    }
    Ok(format!("5 monomials, agreement on {monomials} test monomials"))
}

fn main() {
    let criteria: [(u32, &str, u64, fn() -> Outcome); 10] = [
        (1, "necklace bracket matches the Poisson oracle", 30, criterion_1),
        (2, "curl identity on the generic (2,1,1) graph", 5, criterion_2),
        (3, "classical flatness: star and triangle", 60, criterion_3),
        (4, "quantum flatness: star, dual star, bipartite", 120, criterion_4),
        (5, "intersection census on (2,1,1,1)", 30, criterion_5),
        (6, "combinatorial commutators match the Weyl algebra", 60, criterion_6),
        (7, "KZ reduction chain and Howe pair", 60, criterion_7),
        (8, "change of anchor, DMT and FMTV identities", 30, criterion_8),
        (9, "semiclassical contract", 10, criterion_9),
        (10, "rank-3 triangle as a differential operator", 10, criterion_10),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (n, title, budget, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|payload| {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > Duration::from_secs(budget) => Err(format!("over the {budget} s budget")),
            other => other,
        };
        match result {
            Ok(detail) => println!("criterion {n:>2}: PASS  {title} [{detail}; {:.2} s]", elapsed.as_secs_f64()),
            Err(why) => {
                failures += 1;
                println!("criterion {n:>2}: FAIL  {title} [{why}; {:.2} s]", elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

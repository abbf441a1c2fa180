//! Differential operators on the polynomial ring of position variables.
//!
//! An orientation picks one arrow from every antiparallel pair as the
//! position. Position entries act by multiplication and their partners by
//! `κ ∂`, with `κ = -[X_pos, X_partner]`, which reproduces the Weyl relation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ReductionError;
use crate::quiver::{Arrow, KPartiteGraph};
use crate::scalars::Scalar;
use crate::weyl::{WeylAlgebra, WeylElement};

/// A set of position arrows, one per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    positions: BTreeSet<Arrow>,
}

impl Orientation {
    pub fn new(g: &KPartiteGraph, positions: impl IntoIterator<Item = Arrow>) -> Result<Orientation, ReductionError> {
        let positions: BTreeSet<Arrow> = positions.into_iter().collect();
        for &a in &positions {
            g.check_arrow(a).map_err(|e| ReductionError::OrientationMismatch(e.to_string()))?;
            if positions.contains(&a.star()) {
                return Err(ReductionError::OrientationMismatch(format!("both {a} and its reverse are positions")));
            }
        }
        if let Some(a) = g.arrows().into_iter().find(|a| !positions.contains(a) && !positions.contains(&a.star())) {
            return Err(ReductionError::OrientationMismatch(format!("edge of {a} has no position arrow")));
        }
        Ok(Orientation { positions })
    }

    /// Positions along the cycle `0 -> 1 -> ... -> n-1 -> 0` of a graph with
    /// one node per part.
    pub fn cyclic(g: &KPartiteGraph) -> Result<Orientation, ReductionError> {
        let n = g.node_count();
        if n < 3 {
            return Err(ReductionError::OrientationMismatch("the cyclic orientation needs three nodes".into()));
        }
        Orientation::new(g, (0..n).map(|k| Arrow::new(k, (k + 1) % n)))
    }

    pub fn is_position(&self, a: Arrow) -> bool {
        self.positions.contains(&a)
    }
}

#[derive(Debug, Clone, Copy)]
enum Letter {
    Multiply(usize),
    Derive(usize),
}

/// The position variables of an orientation and how each Weyl generator acts.
#[derive(Debug, Clone)]
pub struct PositionSpace {
    names: Vec<String>,
    letters: Vec<Letter>,
    kappa: Vec<Scalar>,
}

impl PositionSpace {
    pub fn new(g: &KPartiteGraph, alg: &WeylAlgebra, o: &Orientation) -> PositionSpace {
        let gens = alg.generators();
        let mut names = Vec::new();
        let mut var_of = BTreeMap::new();
        for (id, e) in gens.entries().iter().enumerate() {
            if o.is_position(e.arrow) {
                var_of.insert(id as u32, names.len());
                let (t, h) = (e.arrow.tail + 1, e.arrow.head + 1);
                if g.dim(e.arrow.tail) == 1 && g.dim(e.arrow.head) == 1 {
                    names.push(format!("q({t},{h})"));
                } else {
                    names.push(format!("q({t},{h};{},{})", e.row + 1, e.col + 1));
                }
            }
        }
        let mut letters = Vec::with_capacity(gens.len());
        let mut kappa = vec![Scalar::zero(); names.len()];
        for id in 0..gens.len() as u32 {
            match var_of.get(&id) {
                Some(&v) => letters.push(Letter::Multiply(v)),
                None => {
                    let pos = gens.partner(id);
                    let v = var_of[&pos];
                    kappa[v] = -alg.bracket(pos, id);
                    letters.push(Letter::Derive(v));
                }
            }
        }
        PositionSpace { names, letters, kappa }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    /// Variable index of a position name such as `q(1,2)`.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn letter_op(&self, id: u32) -> DiffOp {
        let n = self.len();
        let mut q = vec![0; n];
        let mut d = vec![0; n];
        match self.letters[id as usize] {
            Letter::Multiply(v) => {
                q[v] = 1;
                DiffOp::term(q, d, Scalar::one())
            }
            Letter::Derive(v) => {
                d[v] = 1;
                DiffOp::term(q, d, self.kappa[v].clone())
            }
        }
    }
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

/// A polynomial in the position variables, keyed by exponent vectors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PositionPolynomial {
    terms: BTreeMap<Vec<u32>, Scalar>,
}

impl PositionPolynomial {
    pub fn monomial(exponents: Vec<u32>, c: Scalar) -> PositionPolynomial {
        let mut p = PositionPolynomial::default();
        bump(&mut p.terms, exponents, c);
        p
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &PositionPolynomial) -> PositionPolynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            bump(&mut out.terms, e.clone(), c.clone());
        }
        out
    }

    /// Parses `c*q(1,2)^2*q(2,3) + ...` against the names of `space`.
    pub fn parse(text: &str, space: &PositionSpace) -> Result<PositionPolynomial, ReductionError> {
        let bad = ReductionError::BadPolynomial;
        let mut out = PositionPolynomial::default();
        for term in split_top_level(text, '+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(bad(format!("empty term in {text:?}")));
            }
            let mut exps = vec![0u32; space.len()];
            let mut coeff = Scalar::one();
            for factor in split_top_level(term, '*') {
                let factor = factor.trim();
                if factor.starts_with("q(") {
                    let (name, power) = match factor.rfind(")^") {
                        Some(p) => (&factor[..=p], factor[p + 2..].parse::<u32>().map_err(|e| bad(e.to_string()))?),
                        None => (factor, 1),
                    };
                    let v = space.index_of(name).ok_or_else(|| bad(format!("unknown position variable {name}")))?;
                    exps[v] += power;
                } else {
                    let c = Scalar::parse(factor).map_err(|e| bad(e.to_string()))?;
                    coeff = &coeff * &c;
                }
            }
            out = out.add(&PositionPolynomial::monomial(exps, coeff));
        }
        Ok(out)
    }

    pub fn render(&self, space: &PositionSpace) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut s = format!("({c})");
                for (v, &k) in e.iter().enumerate().filter(|(_, &k)| k > 0) {
                    s.push('*');
                    s.push_str(space.name(v));
                    if k > 1 {
                        s.push_str(&format!("^{k}"));
                    }
                }
                s
            })
            .collect();
        parts.join(" + ")
    }
}

fn split_top_level(text: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

/// A differential operator `Σ c q^a ∂^b` with every multiplication to the
/// left of every derivative.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiffOp {
    terms: BTreeMap<(Vec<u32>, Vec<u32>), Scalar>,
}

fn falling(n: u32, k: u32) -> i64 {
    (0..k).map(|i| (n - i) as i64).product()
}

fn binomial(n: u32, k: u32) -> i64 {
    falling(n, k) / falling(k, k)
}

impl DiffOp {
    pub fn term(q: Vec<u32>, d: Vec<u32>, c: Scalar) -> DiffOp {
        let mut op = DiffOp::default();
        bump(&mut op.terms, (q, d), c);
        op
    }

    pub fn terms(&self) -> &BTreeMap<(Vec<u32>, Vec<u32>), Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            bump(&mut out.terms, k.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> DiffOp {
        let mut out = DiffOp::default();
        for (k, c) in &self.terms {
            bump(&mut out.terms, k.clone(), c * s);
        }
        out
    }

    /// `self ∘ other`, using `∂^b q^c = Σ_k C(b,k) c!/(c-k)! q^{c-k} ∂^{b-k}` in
    /// each variable.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        let mut out = DiffOp::default();
        for ((qa, da), ca) in &self.terms {
            for ((qb, db), cb) in &other.terms {
                let n = qa.len();
                let mut partial: Vec<(Vec<u32>, Vec<u32>, i64)> = vec![(Vec::new(), Vec::new(), 1)];
                for v in 0..n {
                    let (b, c) = (da[v], qb[v]);
                    let mut next = Vec::new();
                    for (q, d, w) in &partial {
                        for k in 0..=b.min(c) {
                            let mut q = q.clone();
                            let mut d = d.clone();
                            q.push(qa[v] + c - k);
                            d.push(b - k + db[v]);
                            next.push((q, d, w * binomial(b, k) * falling(c, k)));
                        }
                    }
                    partial = next;
                }
                let c = ca * cb;
                for (q, d, w) in partial {
                    bump(&mut out.terms, (q, d), &c * &Scalar::from_int(w));
                }
            }
        }
        out
    }

    pub fn render(&self, space: &PositionSpace) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((q, d), c)| {
                let mut s = format!("({c})");
                for (prefix, exps) in [("", q), ("d", d)] {
                    for (v, &k) in exps.iter().enumerate().filter(|(_, &k)| k > 0) {
                        let name = space.name(v);
                        let name = if prefix.is_empty() { name.to_string() } else { format!("d{}", &name[1..]) };
                        s.push('*');
                        s.push_str(&name);
                        if k > 1 {
                            s.push_str(&format!("^{k}"));
                        }
                    }
                }
                s
            })
            .collect();
        parts.join(" + ")
    }

    pub fn to_json(&self, space: &PositionSpace) -> serde_json::Value {
        let names = |exps: &[u32], prefix: &str| -> Vec<String> {
            exps.iter()
                .enumerate()
                .flat_map(|(v, &k)| {
                    let name = format!("{prefix}{}", &space.name(v)[1..]);
                    std::iter::repeat_n(name, k as usize)
                })
                .collect()
        };
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|((q, d), c)| {
                    let mut word = names(q, "q");
                    word.extend(names(d, "d"));
                    serde_json::json!({"word": word, "coeff": c.to_text()})
                })
                .collect(),
        )
    }
}

/// The operator of a Weyl element under the representation fixed by `o`.
pub fn weyl_to_diffop(
    x: &WeylElement,
    g: &KPartiteGraph,
    alg: &WeylAlgebra,
    o: &Orientation,
) -> Result<(DiffOp, PositionSpace), ReductionError> {
    let space = PositionSpace::new(g, alg, o);
    let n = space.len();
    let unit = DiffOp::term(vec![0; n], vec![0; n], Scalar::one());
    let mut out = DiffOp::default();
    for (w, c) in x.terms() {
        let mut acc = unit.scale(c);
        for &id in w {
            if id as usize >= space.letters.len() {
                return Err(ReductionError::OrientationMismatch(format!("generator {id} is outside the graph")));
            }
            acc = acc.compose(&space.letter_op(id));
        }
        out = out.add(&acc);
    }
    Ok((out, space))
}

/// Exact action of an operator on a polynomial.
pub fn diffop_apply(op: &DiffOp, p: &PositionPolynomial) -> PositionPolynomial {
    let mut out = PositionPolynomial::default();
    for ((q, d), c) in &op.terms {
        for (e, pc) in &p.terms {
            if e.iter().zip(d).any(|(a, b)| a < b) {
                continue;
            }
            let mut w = 1i64;
            let mut exps = Vec::with_capacity(e.len());
            for v in 0..e.len() {
                w *= falling(e[v], d[v]);
                exps.push(e[v] - d[v] + q[v]);
            }
            bump(&mut out.terms, exps, &(c * pc) * &Scalar::from_int(w));
        }
    }
    out
}

/// The module action computed letter by letter from the right, without
/// normal-ordering any operator.
pub fn weyl_module_action(x: &WeylElement, space: &PositionSpace, p: &PositionPolynomial) -> PositionPolynomial {
    let mut out = PositionPolynomial::default();
    for (w, c) in x.terms() {
        let mut cur = p.clone();
        for &id in w.iter().rev() {
            let mut next = PositionPolynomial::default();
            for (e, pc) in &cur.terms {
                match space.letters[id as usize] {
                    Letter::Multiply(v) => {
                        let mut e = e.clone();
                        e[v] += 1;
                        bump(&mut next.terms, e, pc.clone());
                    }
                    Letter::Derive(v) if e[v] > 0 => {
                        let k = Scalar::from_int(e[v] as i64);
                        let mut e = e.clone();
                        e[v] -= 1;
                        bump(&mut next.terms, e, &(pc * &k) * &space.kappa[v]);
                    }
                    Letter::Derive(_) => {}
                }
            }
            cur = next;
        }
        for (e, pc) in cur.terms {
            bump(&mut out.terms, e, pc * c);
        }
    }
    out
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} terms", self.terms.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{build_graph, default_symplectic, Convention, Reading};

    fn triangle() -> (KPartiteGraph, WeylAlgebra, Orientation) {
        let (g, r) = build_graph(&[1, 1, 1], &[1, 1, 1], Reading::symbolic(3).values().to_vec()).unwrap();
        let s = default_symplectic(&g, &r, Convention::Unit);
        let alg = WeylAlgebra::new(&g, &s);
        let o = Orientation::cyclic(&g).unwrap();
        (g, alg, o)
    }

    #[test]
    fn derivative_after_multiplication() {
        // -∂ ∘ q applied to 1 gives -1
        let n = 1;
        let d = DiffOp::term(vec![0; n], vec![1], Scalar::from_int(-1));
        let q = DiffOp::term(vec![1], vec![0; n], Scalar::one());
        let one = PositionPolynomial::monomial(vec![0], Scalar::one());
        let got = diffop_apply(&d.compose(&q), &one);
        assert_eq!(got, PositionPolynomial::monomial(vec![0], Scalar::from_int(-1)));
    }

    #[test]
    fn representation_respects_products() {
        let (g, alg, o) = triangle();
        let n = alg.generators().len() as u32;
        for a in 0..n {
            for b in 0..n {
                let x = WeylElement::word(vec![a], Scalar::one());
                let y = WeylElement::word(vec![b], Scalar::from_int(3));
                let (lhs, _) = weyl_to_diffop(&alg.mul(&x, &y), &g, &alg, &o).unwrap();
                let (dx, _) = weyl_to_diffop(&x, &g, &alg, &o).unwrap();
                let (dy, _) = weyl_to_diffop(&y, &g, &alg, &o).unwrap();
                assert_eq!(lhs, dx.compose(&dy), "{a} {b}");
            }
        }
    }

    #[test]
    fn polynomial_text_round_trip() {
        let (g, alg, o) = triangle();
        let space = PositionSpace::new(&g, &alg, &o);
        let p = PositionPolynomial::parse("2*q(1,2)^2*q(3,1) + q(2,3) + 1/3", &space).unwrap();
        assert_eq!(p.terms().len(), 3);
        assert_eq!(PositionPolynomial::parse(&p.render(&space), &space).unwrap(), p);
        assert!(PositionPolynomial::parse("q(2,1)", &space).is_err());
    }

    #[test]
    fn triangle_hamiltonian_shape_and_action() {
        use crate::anchored::{quantum_potentials, quantum_trace};
        use crate::cycles::ReadingKind;
        let (g, r) = build_graph(&[1, 1, 1], &[1, 1, 1], Reading::symbolic(3).values().to_vec()).unwrap();
        let s = default_symplectic(&g, &r, Convention::Phi);
        let alg = WeylAlgebra::new(&g, &s);
        let o = Orientation::cyclic(&g).unwrap();
        let (node, q) = quantum_potentials(&g, &r, ReadingKind::Generic).unwrap().remove(0);
        assert_eq!(node, 0);
        let h = quantum_trace(&q, &g, &alg);
        let (op, space) = weyl_to_diffop(&h, &g, &alg, &o).unwrap();
        let v = |name: &str| space.index_of(name).unwrap();
        let mut expected = BTreeSet::new();
        let unit = |vars: &[usize]| {
            let mut e = vec![0u32; 3];
            for &x in vars {
                e[x] += 1;
            }
            e
        };
        let (a, b, c) = (v("q(1,2)"), v("q(2,3)"), v("q(3,1)"));
        expected.insert((unit(&[a, b, c]), unit(&[])));
        expected.insert((unit(&[]), unit(&[a, b, c])));
        expected.insert((unit(&[a]), unit(&[a])));
        expected.insert((unit(&[c]), unit(&[c])));
        expected.insert((unit(&[]), unit(&[])));
        let support: BTreeSet<_> = op.terms().keys().cloned().collect();
        assert_eq!(support, expected);
        for total in 0..=3u32 {
            for x in 0..=total {
                for y in 0..=total - x {
                    let p = PositionPolynomial::monomial(vec![x, y, total - x - y], Scalar::one());
                    assert_eq!(diffop_apply(&op, &p), weyl_module_action(&h, &space, &p));
                }
            }
        }
    }

    #[test]
    fn half_orientations_are_rejected() {
        let (g, _, _) = triangle();
        assert!(Orientation::new(&g, [Arrow::new(0, 1)]).is_err());
        assert!(Orientation::new(&g, [Arrow::new(0, 1), Arrow::new(1, 0), Arrow::new(1, 2), Arrow::new(2, 0)]).is_err());
    }
}

//! The Weyl algebra on the entry variables, in normal form.
//!
//! A word is a nondecreasing list of generator ids (see
//! [`Generators`](crate::quiver::Generators) for the order), so positive
//! entries always stand to the left of negative ones. Products are brought
//! back to normal form with `[X^alpha_{kl}, X^{alpha*}_{lk}] = c`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Deserialize;
use thiserror::Error;

use crate::cycles::TracePolynomial;
use crate::quiver::{Entry, Generators, KPartiteGraph, SymplecticData};
use crate::scalars::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeylError {
    #[error("the zero element has no filtration order")]
    ZeroElement,
    #[error("malformed element: {0}")]
    Malformed(String),
}

/// Generators and commutation constants of one Weyl algebra.
#[derive(Debug, Clone)]
pub struct WeylAlgebra {
    gens: Generators,
    /// `[X_id, X_partner(id)]` for every id.
    omega: Vec<Scalar>,
}

impl WeylAlgebra {
    pub fn new(g: &KPartiteGraph, s: &SymplecticData) -> WeylAlgebra {
        let gens = Generators::new(g);
        let omega = gens.entries().iter().map(|e| s.bracket(e.arrow, e.arrow.star())).collect();
        WeylAlgebra { gens, omega }
    }

    /// The same generators with every commutation constant negated.
    pub fn opposite(&self) -> WeylAlgebra {
        WeylAlgebra { gens: self.gens.clone(), omega: self.omega.iter().map(|c| -c).collect() }
    }

    pub fn generators(&self) -> &Generators {
        &self.gens
    }

    /// `[X_a, X_b]` as a scalar.
    pub fn bracket(&self, a: u32, b: u32) -> Scalar {
        if self.gens.partner(a) == b {
            self.omega[a as usize].clone()
        } else {
            Scalar::zero()
        }
    }

    pub fn generator(&self, e: Entry) -> WeylElement {
        WeylElement::word(vec![self.gens.id(e)], Scalar::one())
    }

    /// Normal form of the ordered product `X_{ids[0]} X_{ids[1]} ...`.
    pub fn ordered_product(&self, ids: &[u32]) -> WeylElement {
        let mut acc: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
        acc.insert(Vec::new(), Scalar::one());
        for &g in ids {
            acc = self.right_mul_generator(&acc, g);
        }
        WeylElement::from_map(acc)
    }

    fn right_mul_generator(&self, x: &BTreeMap<Vec<u32>, Scalar>, g: u32) -> BTreeMap<Vec<u32>, Scalar> {
        let partner = self.gens.partner(g);
        let mut out: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
        for (w, c) in x {
            let pos = w.partition_point(|&a| a <= g);
            let mut inserted = Vec::with_capacity(w.len() + 1);
            inserted.extend_from_slice(&w[..pos]);
            inserted.push(g);
            inserted.extend_from_slice(&w[pos..]);
            accumulate(&mut out, inserted, c.clone());
            if partner > g {
                let count = w[pos..].iter().filter(|&&a| a == partner).count();
                if count > 0 {
                    let mut removed = w.clone();
                    let at = removed.iter().position(|&a| a == partner).expect("present");
                    removed.remove(at);
                    let k = &Scalar::from_int(count as i64) * &self.omega[partner as usize];
                    accumulate(&mut out, removed, c * &k);
                }
            }
        }
        out
    }

    pub fn mul(&self, x: &WeylElement, y: &WeylElement) -> WeylElement {
        let mut out: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
        for (wy, cy) in &y.terms {
            let mut acc = x.terms.clone();
            for &g in wy {
                acc = self.right_mul_generator(&acc, g);
            }
            for (w, c) in acc {
                accumulate(&mut out, w, &c * cy);
            }
        }
        WeylElement::from_map(out)
    }

    pub fn commutator(&self, x: &WeylElement, y: &WeylElement) -> WeylElement {
        self.mul(x, y).sub(&self.mul(y, x))
    }

    pub fn render(&self, x: &WeylElement) -> String {
        x.render(&self.gens)
    }
}

fn accumulate(map: &mut BTreeMap<Vec<u32>, Scalar>, key: Vec<u32>, c: Scalar) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry as E;
    match map.entry(key) {
        E::Vacant(v) => {
            v.insert(c);
        }
        E::Occupied(mut o) => {
            *o.get_mut() += &c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// A normal-ordered element of a Weyl algebra.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeylElement {
    terms: BTreeMap<Vec<u32>, Scalar>,
}

impl WeylElement {
    pub fn zero() -> WeylElement {
        WeylElement::default()
    }

    pub fn constant(c: Scalar) -> WeylElement {
        WeylElement::word(Vec::new(), c)
    }

    /// A single normal-ordered word; the ids are sorted here.
    pub fn word(mut ids: Vec<u32>, c: Scalar) -> WeylElement {
        ids.sort_unstable();
        let mut terms = BTreeMap::new();
        accumulate(&mut terms, ids, c);
        WeylElement { terms }
    }

    fn from_map(terms: BTreeMap<Vec<u32>, Scalar>) -> WeylElement {
        WeylElement { terms }
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

    pub fn constant_term(&self) -> Scalar {
        self.terms.get(&Vec::new()).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &WeylElement) -> WeylElement {
        let mut out = self.terms.clone();
        for (w, c) in &other.terms {
            accumulate(&mut out, w.clone(), c.clone());
        }
        WeylElement { terms: out }
    }

    pub fn sub(&self, other: &WeylElement) -> WeylElement {
        let mut out = self.terms.clone();
        for (w, c) in &other.terms {
            accumulate(&mut out, w.clone(), -c);
        }
        WeylElement { terms: out }
    }

    pub fn scale(&self, s: &Scalar) -> WeylElement {
        self.map_coefficients(|c| c * s)
    }

    pub fn map_coefficients(&self, f: impl Fn(&Scalar) -> Scalar) -> WeylElement {
        let mut out = BTreeMap::new();
        for (w, c) in &self.terms {
            accumulate(&mut out, w.clone(), f(c));
        }
        WeylElement { terms: out }
    }

    /// Fallible coefficient map, used for evaluation at sample points.
    pub fn try_map_coefficients<E>(&self, f: impl Fn(&Scalar) -> Result<Scalar, E>) -> Result<WeylElement, E> {
        let mut out = BTreeMap::new();
        for (w, c) in &self.terms {
            accumulate(&mut out, w.clone(), f(c)?);
        }
        Ok(WeylElement { terms: out })
    }

    /// Longest word with a nonzero coefficient.
    pub fn filtration_order(&self) -> Result<usize, WeylError> {
        self.terms.keys().map(Vec::len).max().ok_or(WeylError::ZeroElement)
    }

    /// Top-order part, read as a commutative polynomial.
    pub fn semiclassical_limit(&self) -> Result<TracePolynomial, WeylError> {
        let top = self.filtration_order()?;
        let mut out = TracePolynomial::zero();
        for (w, c) in self.terms.iter().filter(|(w, _)| w.len() == top) {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    /// Splits by word length; the key is the power of the deformation parameter.
    pub fn rees_homogenize(&self) -> BTreeMap<usize, WeylElement> {
        let mut out: BTreeMap<usize, WeylElement> = BTreeMap::new();
        for (w, c) in &self.terms {
            accumulate(&mut out.entry(w.len()).or_default().terms, w.clone(), c.clone());
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
            .map(|(w, c)| {
                if w.is_empty() {
                    format!("({c})")
                } else {
                    let word: Vec<String> = w.iter().map(|&id| gens.entry(id).to_string()).collect();
                    format!("({c})*{}", word.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms.iter().map(|(w, c)| serde_json::json!({"word": w, "coeff": c.to_text()})).collect(),
        )
    }

    pub fn from_json(value: &serde_json::Value, gens: &Generators) -> Result<WeylElement, WeylError> {
        #[derive(Deserialize)]
        struct Term {
            word: Vec<u32>,
            coeff: Scalar,
        }
        let terms: Vec<Term> =
            serde_json::from_value(value.clone()).map_err(|e| WeylError::Malformed(e.to_string()))?;
        let mut out = WeylElement::zero();
        for t in terms {
            if let Some(bad) = t.word.iter().find(|&&id| id as usize >= gens.len()) {
                return Err(WeylError::Malformed(format!("unknown generator id {bad}")));
            }
            if t.word.windows(2).any(|p| p[0] > p[1]) {
                return Err(WeylError::Malformed("word is not in normal order".into()));
            }
            out = out.add(&WeylElement::word(t.word, t.coeff));
        }
        Ok(out)
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for id in w {
                write!(f, "*g{id}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{build_graph, default_symplectic, Arrow, Convention, Reading, ReadingValue};

    fn bipartite_ones() -> (KPartiteGraph, WeylAlgebra) {
        let (g, r) =
            build_graph(&[1, 1], &[1, 1], vec![ReadingValue::Finite(Scalar::zero()), ReadingValue::Infinity]).unwrap();
        let s = default_symplectic(&g, &r, Convention::Unit);
        let alg = WeylAlgebra::new(&g, &s);
        (g, alg)
    }

    #[test]
    fn reordering_a_pair_costs_the_constant() {
        let (_, alg) = bipartite_ones();
        let q = alg.generator(Entry { arrow: Arrow::new(1, 0), row: 0, col: 0 });
        let p = alg.generator(Entry { arrow: Arrow::new(0, 1), row: 0, col: 0 });
        let pq = alg.mul(&p, &q);
        let expected = alg.mul(&q, &p).sub(&WeylElement::constant(Scalar::one()));
        assert_eq!(pq, expected);
        assert_eq!(alg.commutator(&q, &p), WeylElement::constant(Scalar::one()));
        assert!(alg.commutator(&q, &q).is_zero());
    }

    #[test]
    fn commuting_generators_reorder_freely() {
        let (g, r) = build_graph(&[1, 1, 1], &[2, 2, 2], Reading::symbolic(3).values().to_vec()).unwrap();
        let alg = WeylAlgebra::new(&g, &default_symplectic(&g, &r, Convention::Phi));
        let x = alg.generator(Entry { arrow: Arrow::new(0, 1), row: 0, col: 1 });
        let y = alg.generator(Entry { arrow: Arrow::new(2, 1), row: 1, col: 0 });
        assert_eq!(alg.mul(&x, &y), alg.mul(&y, &x));
        assert_eq!(alg.mul(&x, &y).len(), 1);
    }

    #[test]
    fn order_limit_and_grading() {
        let (_, alg) = bipartite_ones();
        let qp = alg.ordered_product(&[1, 0]);
        let x = qp.add(&WeylElement::constant(Scalar::from_int(7)));
        assert_eq!(x.filtration_order().unwrap(), 2);
        assert_eq!(WeylElement::constant(Scalar::from_int(5)).filtration_order().unwrap(), 0);
        assert_eq!(WeylElement::zero().filtration_order(), Err(WeylError::ZeroElement));
        let sigma = x.semiclassical_limit().unwrap();
        assert_eq!(sigma.len(), 1);
        assert_eq!(sigma.degree(), 2);
        let rees = qp.rees_homogenize();
        assert_eq!(rees.keys().copied().collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn render_and_json() {
        let (_, alg) = bipartite_ones();
        let x = alg.ordered_product(&[1, 0]);
        assert_eq!(alg.render(&x), "(-1) + (1)*X[1->0](1,1)*X[0->1](1,1)");
        let back = WeylElement::from_json(&x.to_json(), alg.generators()).unwrap();
        assert_eq!(back, x);
        assert!(
            WeylElement::from_json(&serde_json::json!([{"word": [1, 0], "coeff": "(1)"}]), alg.generators()).is_err()
        );
    }
}

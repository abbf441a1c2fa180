//! Commutative and enveloping algebras of `gl_d^{⊕m}`.
//!
//! Both algebras use the generators `e^{(i)}_{jk}`: factor `i`, matrix
//! position `(j, k)`, all stored zero-based. The enveloping algebra keeps
//! every element as a combination of nondecreasing words (a PBW basis) and
//! rewrites with
//! `[e^{(i)}_{jk}, e^{(n)}_{lm}] = δ_{in}(δ_{kl} e^{(i)}_{jm} - δ_{mj} e^{(i)}_{lk})`.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalars::Scalar;

/// The basis matrix `e_{row,col}` in factor `factor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gen {
    pub factor: usize,
    pub row: usize,
    pub col: usize,
}

impl Gen {
    pub fn new(factor: usize, row: usize, col: usize) -> Gen {
        Gen { factor, row, col }
    }

    /// Commutator with another generator, as a short list of generators.
    pub fn bracket(self, other: Gen) -> Vec<(Gen, i64)> {
        if self.factor != other.factor {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(2);
        if self.col == other.row {
            out.push((Gen::new(self.factor, self.row, other.col), 1));
        }
        if other.col == self.row {
            let g = Gen::new(self.factor, other.row, self.col);
            match out.iter().position(|(h, _)| *h == g) {
                Some(p) => {
                    out.remove(p);
                }
                None => out.push((g, -1)),
            }
        }
        out
    }

    pub fn name(self) -> String {
        format!("e({},{},{})", self.factor + 1, self.row + 1, self.col + 1)
    }

    pub fn parse(text: &str) -> Option<Gen> {
        let inner = text.strip_prefix("e(")?.strip_suffix(')')?;
        let parts: Vec<usize> = inner.split(',').map(|p| p.trim().parse().ok()).collect::<Option<_>>()?;
        match parts[..] {
            [f, r, c] if f > 0 && r > 0 && c > 0 => Some(Gen::new(f - 1, r - 1, c - 1)),
            _ => None,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn accumulate(map: &mut BTreeMap<Vec<Gen>, Scalar>, key: Vec<Gen>, c: Scalar) {
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

fn render(terms: &BTreeMap<Vec<Gen>, Scalar>, sep: &str) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let parts: Vec<String> = terms
        .iter()
        .map(|(w, c)| {
            if w.is_empty() {
                format!("({c})")
            } else {
                let names: Vec<String> = w.iter().map(|g| g.name()).collect();
                format!("({c})*{}", names.join(sep))
            }
        })
        .collect();
    parts.join(" + ")
}

fn terms_json(terms: &BTreeMap<Vec<Gen>, Scalar>) -> serde_json::Value {
    serde_json::Value::Array(
        terms
            .iter()
            .map(|(w, c)| {
                let names: Vec<String> = w.iter().map(|g| g.name()).collect();
                serde_json::json!({"word": names, "coeff": c.to_text()})
            })
            .collect(),
    )
}

/// A polynomial in the commuting variables `e^{(i)}_{jk}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymElement {
    terms: BTreeMap<Vec<Gen>, Scalar>,
}

impl SymElement {
    pub fn zero() -> SymElement {
        SymElement::default()
    }

    pub fn constant(c: Scalar) -> SymElement {
        SymElement::monomial(Vec::new(), c)
    }

    pub fn var(g: Gen) -> SymElement {
        SymElement::monomial(vec![g], Scalar::one())
    }

    pub fn monomial(mut vars: Vec<Gen>, c: Scalar) -> SymElement {
        vars.sort_unstable();
        let mut terms = BTreeMap::new();
        accumulate(&mut terms, vars, c);
        SymElement { terms }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Gen>, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add(&self, other: &SymElement) -> SymElement {
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            accumulate(&mut terms, w.clone(), c.clone());
        }
        SymElement { terms }
    }

    pub fn sub(&self, other: &SymElement) -> SymElement {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> SymElement {
        let mut terms = BTreeMap::new();
        for (w, c) in &self.terms {
            accumulate(&mut terms, w.clone(), c * s);
        }
        SymElement { terms }
    }

    pub fn mul(&self, other: &SymElement) -> SymElement {
        let mut terms = BTreeMap::new();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w: Vec<Gen> = w1.iter().chain(w2).copied().collect();
                w.sort_unstable();
                accumulate(&mut terms, w, c1 * c2);
            }
        }
        SymElement { terms }
    }

    pub fn to_json(&self) -> serde_json::Value {
        terms_json(&self.terms)
    }
}

impl fmt::Display for SymElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.terms, "*"))
    }
}

/// An element of `U(gl_d)^{⊗m}` in PBW normal form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UEnvElement {
    terms: BTreeMap<Vec<Gen>, Scalar>,
}

impl UEnvElement {
    pub fn zero() -> UEnvElement {
        UEnvElement::default()
    }

    pub fn constant(c: Scalar) -> UEnvElement {
        UEnvElement::ordered_product(&[], c)
    }

    pub fn generator(g: Gen) -> UEnvElement {
        UEnvElement::ordered_product(&[g], Scalar::one())
    }

    /// `c` times the product of the generators in the given order.
    pub fn ordered_product(word: &[Gen], c: Scalar) -> UEnvElement {
        let mut pending = BTreeMap::new();
        accumulate(&mut pending, word.to_vec(), c);
        UEnvElement { terms: normalise(pending) }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Gen>, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Length of the longest PBW word, or `None` for zero.
    pub fn filtration_order(&self) -> Option<usize> {
        self.terms.keys().map(Vec::len).max()
    }

    pub fn add(&self, other: &UEnvElement) -> UEnvElement {
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            accumulate(&mut terms, w.clone(), c.clone());
        }
        UEnvElement { terms }
    }

    pub fn sub(&self, other: &UEnvElement) -> UEnvElement {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> UEnvElement {
        let mut terms = BTreeMap::new();
        for (w, c) in &self.terms {
            accumulate(&mut terms, w.clone(), c * s);
        }
        UEnvElement { terms }
    }

    pub fn mul(&self, other: &UEnvElement) -> UEnvElement {
        let mut pending = BTreeMap::new();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let w: Vec<Gen> = w1.iter().chain(w2).copied().collect();
                accumulate(&mut pending, w, c1 * c2);
            }
        }
        UEnvElement { terms: normalise(pending) }
    }

    pub fn commutator(&self, other: &UEnvElement) -> UEnvElement {
        self.mul(other).sub(&other.mul(self))
    }

    /// Top-order component read as a commutative polynomial.
    pub fn leading_symbol(&self) -> SymElement {
        let Some(top) = self.filtration_order() else { return SymElement::zero() };
        let mut terms = BTreeMap::new();
        for (w, c) in self.terms.iter().filter(|(w, _)| w.len() == top) {
            accumulate(&mut terms, w.clone(), c.clone());
        }
        SymElement { terms }
    }

    /// The inverse of [`pbw_quantise`]: peels off the leading symbol order by
    /// order until nothing is left.
    pub fn desymmetrise(&self) -> SymElement {
        let mut rest = self.clone();
        let mut out = SymElement::zero();
        while !rest.is_zero() {
            let top = rest.leading_symbol();
            rest = rest.sub(&pbw_quantise(&top));
            out = out.add(&top);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        terms_json(&self.terms)
    }
}

impl fmt::Display for UEnvElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.terms, "·"))
    }
}

/// Rewrites arbitrary words into PBW normal form. The largest pending word
/// is always treated first, so coefficients of equal words merge before they
/// are rewritten again.
fn normalise(mut pending: BTreeMap<Vec<Gen>, Scalar>) -> BTreeMap<Vec<Gen>, Scalar> {
    let mut out = BTreeMap::new();
    while let Some((w, c)) = pending.pop_last() {
        let Some(k) = w.windows(2).position(|p| p[0] > p[1]) else {
            accumulate(&mut out, w, c);
            continue;
        };
        let (x, y) = (w[k], w[k + 1]);
        for (g, sign) in x.bracket(y) {
            let mut shorter = Vec::with_capacity(w.len() - 1);
            shorter.extend_from_slice(&w[..k]);
            shorter.push(g);
            shorter.extend_from_slice(&w[k + 2..]);
            accumulate(&mut pending, shorter, &c * &Scalar::from_int(sign));
        }
        let mut swapped = w;
        swapped.swap(k, k + 1);
        accumulate(&mut pending, swapped, c);
    }
    out
}

/// Distinct orderings of a sorted multiset.
fn arrangements(sorted: &[Gen]) -> Vec<Vec<Gen>> {
    if sorted.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (p, g) in sorted.iter().enumerate() {
        if p > 0 && sorted[p - 1] == *g {
            continue;
        }
        let mut rest = sorted.to_vec();
        rest.remove(p);
        for mut tail in arrangements(&rest) {
            tail.insert(0, *g);
            out.push(tail);
        }
    }
    out
}

/// Symmetrisation `x_1⋯x_n ↦ (1/n!) Σ_σ x_{σ1}⋯x_{σn}`, in normal form.
pub fn pbw_quantise(x: &SymElement) -> UEnvElement {
    let mut pending = BTreeMap::new();
    for (w, c) in &x.terms {
        let words = arrangements(w);
        let share = c * &Scalar::ratio(1, words.len() as i64);
        for word in words {
            accumulate(&mut pending, word, share.clone());
        }
    }
    UEnvElement { terms: normalise(pending) }
}

/// Casimir element `Σ_{j,k} e_{jk} e_{kj}` of a single `gl_d` factor.
pub fn casimir_omega(d: usize) -> UEnvElement {
    omega_between(0, 0, d)
}

/// `Ω_{ab} = Σ_{j,k} e^{(a)}_{jk} e^{(b)}_{kj}`.
pub fn omega_between(a: usize, b: usize, d: usize) -> UEnvElement {
    let mut out = UEnvElement::zero();
    for j in 0..d {
        for k in 0..d {
            out = out.add(&UEnvElement::ordered_product(&[Gen::new(a, j, k), Gen::new(b, k, j)], Scalar::one()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(f: usize, r: usize, c: usize) -> UEnvElement {
        UEnvElement::generator(Gen::new(f, r, c))
    }

    #[test]
    fn generator_relations() {
        // [e12, e21] = e11 - e22 in gl_2
        let lhs = e(0, 0, 1).commutator(&e(0, 1, 0));
        assert_eq!(lhs, e(0, 0, 0).sub(&e(0, 1, 1)));
        assert!(e(0, 0, 1).commutator(&e(1, 1, 0)).is_zero());
        // [e11, e12] = e12
        assert_eq!(e(0, 0, 0).commutator(&e(0, 0, 1)), e(0, 0, 1));
    }

    #[test]
    fn casimir_is_central_in_gl2_and_gl3() {
        for d in [2, 3] {
            let omega = casimir_omega(d);
            for j in 0..d {
                for k in 0..d {
                    assert!(omega.commutator(&e(0, j, k)).is_zero(), "d={d} ({j},{k})");
                }
            }
        }
        assert_eq!(casimir_omega(1), UEnvElement::ordered_product(&[Gen::new(0, 0, 0); 2], Scalar::one()));
    }

    #[test]
    fn symmetrisation_of_a_mixed_square() {
        let a = Gen::new(0, 0, 1);
        let b = Gen::new(0, 1, 0);
        let q = pbw_quantise(&SymElement::var(a).mul(&SymElement::var(b)));
        let half = Scalar::ratio(1, 2);
        let expected =
            UEnvElement::ordered_product(&[a, b], half.clone()).add(&UEnvElement::ordered_product(&[b, a], half));
        assert_eq!(q, expected);
        assert_eq!(q.desymmetrise(), SymElement::var(a).mul(&SymElement::var(b)));
        // different factors commute, so no symmetrisation correction
        let c = Gen::new(1, 1, 0);
        let q = pbw_quantise(&SymElement::var(a).mul(&SymElement::var(c)));
        assert_eq!(q, UEnvElement::ordered_product(&[a, c], Scalar::one()));
    }

    #[test]
    fn generator_names_round_trip() {
        let g = Gen::new(2, 0, 1);
        assert_eq!(g.name(), "e(3,1,2)");
        assert_eq!(Gen::parse("e(3,1,2)"), Some(g));
        assert_eq!(Gen::parse("e(0,1,2)"), None);
    }
}

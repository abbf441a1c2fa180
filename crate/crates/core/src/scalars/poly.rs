//! Sparse multivariate polynomials over the integers.
//!
//! Monomials are ordered graded-lexicographically; symbols that sort first
//! are the most significant variables in the lexicographic tie-break.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ScalarError;

const FAMILY_LEN: usize = 7;

/// A formal symbol such as `t3` or `a0`: a short lowercase family name and an index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    family: [u8; FAMILY_LEN],
    index: u32,
}

impl Symbol {
    pub fn new(family: &str, index: u32) -> Result<Symbol, ScalarError> {
        let bytes = family.as_bytes();
        if bytes.is_empty() || bytes.len() > FAMILY_LEN || !bytes.iter().all(|b| b.is_ascii_lowercase()) {
            return Err(ScalarError::BadSymbol(format!("{family}{index}")));
        }
        let mut buf = [0u8; FAMILY_LEN];
        buf[..bytes.len()].copy_from_slice(bytes);
        Ok(Symbol { family: buf, index })
    }

    /// The time symbol attached to a node.
    pub fn time(index: u32) -> Symbol {
        Symbol::new("t", index).expect("static family")
    }

    /// The reading symbol attached to a part.
    pub fn reading(index: u32) -> Symbol {
        Symbol::new("a", index).expect("static family")
    }

    pub fn family(&self) -> &str {
        let end = self.family.iter().position(|&b| b == 0).unwrap_or(FAMILY_LEN);
        std::str::from_utf8(&self.family[..end]).expect("ascii family")
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    /// Parses names of the form `letters digits`, e.g. `t12`.
    pub fn parse(name: &str) -> Result<Symbol, ScalarError> {
        let split = name.find(|c: char| c.is_ascii_digit()).ok_or_else(|| ScalarError::BadSymbol(name.to_string()))?;
        let (family, digits) = name.split_at(split);
        let index = digits.parse::<u32>().map_err(|_| ScalarError::BadSymbol(name.to_string()))?;
        Symbol::new(family, index)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family(), self.index)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A power product of symbols, stored sparsely and sorted by symbol.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(s: Symbol) -> Monomial {
        Monomial(vec![(s, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(Symbol, u32)>) -> Monomial {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_by_key(|a| a.0);
        let mut out: Vec<(Symbol, u32)> = Vec::with_capacity(pairs.len());
        for (s, e) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == s => last.1 += e,
                _ => out.push((s, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.0.iter().find(|&&(v, _)| v == s).map(|&(_, e)| e).unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(s, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < s {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == s {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((s, e - f)),
                }
            } else {
                out.push((s, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    fn without(&self, s: Symbol) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&(v, _)| v != s).collect())
    }

    fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(a), Some(b)) => match a.0.cmp(&b.0) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if a.1 != b.1 {
                            return a.1.cmp(&b.1);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree().cmp(&other.total_degree()).then_with(|| self.lex_cmp(other))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Integer-coefficient polynomial; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn var(s: Symbol) -> Poly {
        Poly::monomial(Monomial::var(s), BigInt::one())
    }

    pub fn monomial(m: Monomial, c: BigInt) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigInt)>>(it: I) -> Poly {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    /// The value of a constant polynomial (zero included).
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().expect("one term");
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// Greatest term under the graded-lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|&(s, _)| s)).collect()
    }

    /// Nonnegative gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly { terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect() }
    }

    /// Divides every coefficient by `c`; `c` must divide the content.
    pub fn div_integer(&self, c: &BigInt) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v / c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Makes the leading coefficient positive; returns whether a flip happened.
    pub fn normalize_sign(&mut self) -> bool {
        if self.leading().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            for v in self.terms.values_mut() {
                *v = -v.clone();
            }
            true
        } else {
            false
        }
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.terms.keys().map(|m| m.degree_in(s)).max().unwrap_or(0)
    }

    /// `self` with `s` replaced by an integer.
    pub fn substitute_integer(&self, s: Symbol, value: &BigInt) -> Poly {
        Poly::from_terms(
            self.terms.iter().map(|(m, c)| (m.without(s), c * num_traits::pow(value.clone(), m.degree_in(s) as usize))),
        )
    }

    /// Coefficients with respect to `s`, indexed by the power of `s`.
    pub fn coeffs_in(&self, s: Symbol) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(s) as usize + 1];
        for (m, c) in &self.terms {
            let d = m.degree_in(s) as usize;
            out[d].add_term(m.without(s), c.clone());
        }
        out
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if let Some(c) = divisor.as_constant() {
            return self.terms.values().all(|v| v.is_multiple_of(&c)).then(|| self.div_integer(&c));
        }
        let (lm, lc) = divisor.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = m.div(&lm)?;
            if !c.is_multiple_of(&lc) {
                return None;
            }
            let qc = &c / &lc;
            rem = &rem - &divisor.mul_monomial(&qm).scale(&qc);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Greatest common divisor over the integers, with positive leading coefficient.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let mut g = gcd_inner(a, b);
        g.normalize_sign();
        g
    }

    pub fn partial(&self, s: Symbol) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.degree_in(s);
            if e == 0 {
                continue;
            }
            let reduced =
                Monomial::from_pairs(m.0.iter().map(|&(v, k)| if v == s { (v, k - 1) } else { (v, k) }).collect());
            out.add_term(reduced, c * BigInt::from(e));
        }
        out
    }

    pub fn eval(&self, assignment: &HashMap<Symbol, BigRational>) -> Result<BigRational, ScalarError> {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = BigRational::from_integer(c.clone());
            for &(s, e) in &m.0 {
                let v = assignment.get(&s).ok_or_else(|| ScalarError::UnboundSymbol(s.to_string()))?;
                term *= num_traits::pow(v.clone(), e as usize);
            }
            total += term;
        }
        Ok(total)
    }
}

fn gcd_inner(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::constant(a.content().gcd(&b.content()));
    }
    if a == b || *a == -b {
        return a.clone();
    }
    // Cheap exact-division shortcut: most denominators here are products of linear forms.
    if a.len() <= b.len() && b.exact_div(a).is_some() {
        return a.clone();
    }
    if b.len() < a.len() && a.exact_div(b).is_some() {
        return b.clone();
    }
    let sa = a.symbols();
    let sb = b.symbols();
    // A variable present in only one input cannot occur in the gcd.
    if let Some(&x) = sa.symmetric_difference(&sb).next() {
        return if sa.contains(&x) { gcd_inner(&content_in(a, x), b) } else { gcd_inner(a, &content_in(b, x)) };
    }
    let mut bounds = Vec::with_capacity(sa.len());
    for &x in &sa {
        let bound = degree_bound(a, b, x);
        if bound == 0 {
            return gcd_inner(&content_in(a, x), &content_in(b, x));
        }
        bounds.push((bound, x));
    }
    // A common divisor that reaches every degree bound is the gcd up to an integer.
    if let Some(h) = heuristic_gcd(a, b) {
        if bounds.iter().all(|&(d, x)| h.degree_in(x) == d) {
            return h;
        }
    }
    let (_, x) = *bounds.iter().min_by_key(|&&(d, _)| d).expect("nonconstant input");
    let ca = content_in(a, x);
    let cb = content_in(b, x);
    let pa = a.exact_div(&ca).expect("content divides");
    let pb = b.exact_div(&cb).expect("content divides");
    let c = gcd_inner(&ca, &cb);
    let g = primitive_prs(pa, pb, x);
    &c * &g
}

/// Common divisor found by evaluating at large integers and reading the gcd of
/// the images back as balanced digits. `None` when no attempt verifies.
fn heuristic_gcd(a: &Poly, b: &Poly) -> Option<Poly> {
    let vars: Vec<Symbol> = a.symbols().union(&b.symbols()).copied().collect();
    heuristic_gcd_in(a, b, &vars)
}

fn heuristic_gcd_in(a: &Poly, b: &Poly, vars: &[Symbol]) -> Option<Poly> {
    let common = a.content().gcd(&b.content());
    let Some((&x, rest)) = vars.split_first() else {
        return Some(Poly::constant(common));
    };
    let (a, b) = (a.div_integer(&common), b.div_integer(&common));
    let norm = |p: &Poly| p.terms.values().map(|c| c.abs()).max().unwrap_or_default();
    let mut point = BigInt::from(2) * norm(&a).min(norm(&b)) + 29;
    for _ in 0..6 {
        let (ai, bi) = (a.substitute_integer(x, &point), b.substitute_integer(x, &point));
        if !ai.is_zero() && !bi.is_zero() {
            if let Some(image) = heuristic_gcd_in(&ai, &bi, rest) {
                let mut h = interpolate_digits(image, x, &point);
                if !h.is_zero() {
                    h = h.div_integer(&h.content());
                    h.normalize_sign();
                    if a.exact_div(&h).is_some() && b.exact_div(&h).is_some() {
                        return Some(h.scale(&common));
                    }
                }
            }
        }
        point = BigInt::from(73794) * &point * point.sqrt().sqrt() / BigInt::from(27011);
    }
    None
}

/// Reads `image` as a number in base `point` with balanced digits, each a
/// polynomial in the remaining variables, and returns the polynomial in `x`.
fn interpolate_digits(mut image: Poly, x: Symbol, point: &BigInt) -> Poly {
    let half = point / 2;
    let mut out = Poly::zero();
    let mut power = 0;
    while !image.is_zero() {
        let digit = Poly::from_terms(image.terms.iter().map(|(m, c)| {
            let mut r = c.mod_floor(point);
            if r > half {
                r -= point;
            }
            (m.clone(), r)
        }));
        let shift = Monomial::from_pairs(vec![(x, power)]);
        out = &out + &digit.mul_monomial(&shift);
        image = (&image - &digit).div_integer(point);
        power += 1;
    }
    out
}

/// Upper bound on the degree in `x` of `gcd(a, b)`.
///
/// Every other variable is specialised at an integer point where both leading
/// coefficients in `x` survive; the gcd then maps to a divisor of the
/// univariate gcd of the images, with its degree in `x` intact.
fn degree_bound(a: &Poly, b: &Poly, x: Symbol) -> u32 {
    let (ac, bc) = (a.coeffs_in(x), b.coeffs_in(x));
    let others: Vec<Symbol> = a.symbols().union(&b.symbols()).copied().filter(|&s| s != x).collect();
    let mut best = (ac.len() - 1).min(bc.len() - 1) as u32;
    let mut seed: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut found = 0;
    for _ in 0..8 {
        let point: HashMap<Symbol, BigRational> = others
            .iter()
            .map(|&s| {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let v = (seed >> 33) % 2003;
                (s, BigRational::from_integer(BigInt::from(v as i64 - 1001)))
            })
            .collect();
        let image = |cs: &[Poly]| -> Vec<BigRational> {
            cs.iter().map(|c| c.eval(&point).expect("every symbol is bound")).collect()
        };
        let (ai, bi) = (image(&ac), image(&bc));
        if ai.last().is_none_or(Zero::is_zero) || bi.last().is_none_or(Zero::is_zero) {
            continue;
        }
        best = best.min(univariate_gcd_degree(ai, bi));
        found += 1;
        if best == 0 || found == 2 {
            break;
        }
    }
    best
}

/// Degree of the gcd of two dense univariate polynomials over the rationals.
fn univariate_gcd_degree(mut a: Vec<BigRational>, mut b: Vec<BigRational>) -> u32 {
    let trim = |p: &mut Vec<BigRational>| {
        while p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let lead = b.last().expect("nonempty").clone();
        while a.len() >= b.len() {
            let factor = a.last().expect("nonempty") / &lead;
            let shift = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                a[i + shift] -= &factor * c;
            }
            a.pop();
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    (a.len() - 1) as u32
}

fn content_in(p: &Poly, x: Symbol) -> Poly {
    let mut g = Poly::zero();
    for c in p.coeffs_in(x) {
        if c.is_zero() {
            continue;
        }
        g = gcd_inner(&g, &c);
        if g.as_constant().map(|v| v.abs().is_one()).unwrap_or(false) {
            return Poly::one();
        }
    }
    g.normalize_sign();
    g
}

fn primitive_part_in(p: &Poly, x: Symbol) -> Poly {
    let c = content_in(p, x);
    let mut out = p.exact_div(&c).expect("content divides");
    out.normalize_sign();
    out
}

fn pseudo_rem(a: &Poly, b: &Poly, x: Symbol) -> Poly {
    let db = b.degree_in(x);
    let bc = b.coeffs_in(x);
    let lcb = bc[db as usize].clone();
    let mut r = a.clone();
    while !r.is_zero() {
        let dr = r.degree_in(x);
        if dr < db {
            break;
        }
        let rc = r.coeffs_in(x);
        let lcr = rc[dr as usize].clone();
        let shift = Monomial::from_pairs(vec![(x, dr - db)]);
        r = &(&lcb * &r) - &(&lcr * &b.mul_monomial(&shift));
    }
    r
}

fn primitive_prs(a: Poly, b: Poly, x: Symbol) -> Poly {
    let (mut a, mut b) = if a.degree_in(x) >= b.degree_in(x) { (a, b) } else { (b, a) };
    loop {
        let r = pseudo_rem(&a, &b, x);
        if r.is_zero() {
            return primitive_part_in(&b, x);
        }
        if r.degree_in(x) == 0 {
            return Poly::one();
        }
        a = b;
        b = primitive_part_in(&r, x);
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl fmt::Display for Poly {
    /// Terms from the greatest monomial down, e.g. `t1 - t2` or `2*a0*t1^2 + 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

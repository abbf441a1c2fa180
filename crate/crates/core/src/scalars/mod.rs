//! Exact rational functions in reading symbols `a_j` and time symbols `t_i`.
//!
//! A [`Scalar`] is a reduced fraction of integer polynomials. The numerator
//! and denominator share no common factor over the integers, and the
//! denominator has a positive leading coefficient under the graded
//! lexicographic order, so equality is structural.

mod poly;
mod text;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use poly::{Monomial, Poly, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("symbol {0} has no value in the assignment")]
    UnboundSymbol(String),
    #[error("denominator vanishes at the given point")]
    PoleHit,
    #[error("malformed symbol name {0:?}")]
    BadSymbol(String),
    #[error("cannot parse scalar expression at byte {position}: {message}")]
    Parse { position: usize, message: String },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Scalar {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar { num: Poly::constant(BigInt::from(n)), den: Poly::one() }
    }

    pub fn from_bigint(n: BigInt) -> Scalar {
        Scalar { num: Poly::constant(n), den: Poly::one() }
    }

    pub fn from_rational(q: &BigRational) -> Scalar {
        Scalar::from_parts(Poly::constant(q.numer().clone()), Poly::constant(q.denom().clone()))
            .expect("rational denominators are nonzero")
    }

    /// `n / d` as an exact fraction.
    pub fn ratio(n: i64, d: i64) -> Scalar {
        Scalar::from_rational(&BigRational::new(n.into(), d.into()))
    }

    pub fn symbol(s: Symbol) -> Scalar {
        Scalar { num: Poly::var(s), den: Poly::one() }
    }

    pub fn time(i: u32) -> Scalar {
        Scalar::symbol(Symbol::time(i))
    }

    pub fn reading(j: u32) -> Scalar {
        Scalar::symbol(Symbol::reading(j))
    }

    pub fn from_poly(p: Poly) -> Scalar {
        Scalar { num: p, den: Poly::one() }
    }

    /// Builds and reduces `num / den`.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Scalar, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Scalar {
        if num.is_zero() {
            return Scalar::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        if den.normalize_sign() {
            num = -&num;
        }
        Scalar { num, den }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The rational value when no symbol occurs.
    pub fn as_rational(&self) -> Option<BigRational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(BigRational::new(n, d))
    }

    pub fn symbols(&self) -> std::collections::BTreeSet<Symbol> {
        let mut s = self.num.symbols();
        s.extend(self.den.symbols());
        s
    }

    pub fn inverse(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self * &rhs.inverse()?)
    }

    pub fn pow(&self, e: u32) -> Scalar {
        Scalar { num: self.num.pow(e), den: self.den.pow(e) }
    }

    pub fn eval(&self, assignment: &HashMap<Symbol, BigRational>) -> Result<BigRational, ScalarError> {
        let n = self.num.eval(assignment)?;
        let d = self.den.eval(assignment)?;
        if d.is_zero() {
            return Err(ScalarError::PoleHit);
        }
        Ok(n / d)
    }

    pub fn partial(&self, s: Symbol) -> Scalar {
        let dn = self.num.partial(s);
        let dd = self.den.partial(s);
        if dd.is_zero() {
            return Scalar::reduce(dn, self.den.clone());
        }
        let top = &(&dn * &self.den) - &(&self.num * &dd);
        Scalar::reduce(top, self.den.pow(2))
    }

    /// Replaces each mapped symbol by the given scalar.
    pub fn subs(&self, map: &HashMap<Symbol, Scalar>) -> Result<Scalar, ScalarError> {
        let n = subs_poly(&self.num, map);
        let d = subs_poly(&self.den, map);
        n.checked_div(&d)
    }

    /// Fully parenthesized text form, parsed back by [`Scalar::parse`].
    pub fn to_text(&self) -> String {
        text::render(self)
    }

    pub fn parse(input: &str) -> Result<Scalar, ScalarError> {
        text::parse(input)
    }
}

fn subs_poly(p: &Poly, map: &HashMap<Symbol, Scalar>) -> Scalar {
    let mut total = Scalar::zero();
    for (m, c) in p.terms() {
        let mut term = Scalar::from_bigint(c.clone());
        for &(s, e) in m.factors() {
            let base = map.get(&s).cloned().unwrap_or_else(|| Scalar::symbol(s));
            term = &term * &base.pow(e);
        }
        total = &total + &term;
    }
    total
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return Scalar::reduce(&self.num + &rhs.num, self.den.clone());
        }
        let g = Poly::gcd(&self.den, &rhs.den);
        let d1 = self.den.exact_div(&g).expect("gcd divides");
        let d2 = rhs.den.exact_div(&g).expect("gcd divides");
        let num = &(&self.num * &d2) + &(&rhs.num * &d1);
        let den = &(&d1 * &d2) * &g;
        Scalar::reduce(num, den)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar { num: &self.num * &rhs.num, den: Poly::one() };
        }
        let g1 = Poly::gcd(&self.num, &rhs.den);
        let g2 = Poly::gcd(&rhs.num, &self.den);
        let n1 = self.num.exact_div(&g1).expect("gcd divides");
        let d2 = rhs.den.exact_div(&g1).expect("gcd divides");
        let n2 = rhs.num.exact_div(&g2).expect("gcd divides");
        let d1 = self.den.exact_div(&g2).expect("gcd divides");
        let mut num = &n1 * &n2;
        let mut den = &d1 * &d2;
        if den.normalize_sign() {
            num = -&num;
        }
        Scalar { num, den }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar { (&self).$method(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar { (&self).$method(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::ops::AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::from_int(n)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            let simple = |p: &Poly| p.len() == 1 && !p.terms().any(|(_, c)| c.is_negative());
            let n = if simple(&self.num) || self.num.is_constant() {
                self.num.to_string()
            } else {
                format!("({})", self.num)
            };
            let d = if self.den.is_constant() || (self.den.len() == 1 && self.den.total_degree() == 1) {
                self.den.to_string()
            } else {
                format!("({})", self.den)
            };
            write!(f, "{n}/{d}")
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let s = String::deserialize(d)?;
        Scalar::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Convenience: `1 / (x - y)` for two scalars that differ.
pub fn inverse_difference(x: &Scalar, y: &Scalar) -> Scalar {
    (x - y).inverse().expect("distinct values")
}

impl One for Scalar {
    fn one() -> Scalar {
        Scalar::one()
    }
}

impl Zero for Scalar {
    fn zero() -> Scalar {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(i: u32) -> Scalar {
        Scalar::time(i)
    }

    #[test]
    fn addition_with_coprime_cubic_denominators_is_associative() {
        let p = |s: &str| Scalar::parse(s).unwrap();
        let a = p("(-3*a1*t1*t2 + a1*t1 + 3)/(-2*t1^2 - 3*a1)");
        let b = p("(-2*a1*t1*t2^2)/(3*a1*t1^2 - 2*t1 + 1)");
        let c = p("(a1*t1 - 3*t1*t2)/(-3*a1*t1^2*t2 - 2*a1*t1*t2 - 3*t1^2)");
        assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
    }

    #[test]
    fn derivative_of_a_product_with_a_repeated_factor() {
        let p = |s: &str| Scalar::parse(s).unwrap();
        let a = p("(-2*a1*t1^2 + t1^2*t2)/(4*a1*t1^2*t2^2 + a1*t2^2)");
        let b = p("(2*t1^2*t2^2 - a1*t1)/(2*t1^2*t2^2 + 2*a1*t1^2 - 2*a1*t2)");
        let s = Symbol::time(2);
        assert_eq!((&a * &b).partial(s), &(&a.partial(s) * &b) + &(&a * &b.partial(s)));
    }

    fn point(values: &[(u32, i64)]) -> HashMap<Symbol, BigRational> {
        values.iter().map(|&(i, v)| (Symbol::time(i), BigRational::from_integer(v.into()))).collect()
    }

    #[test]
    fn additive_and_multiplicative_inverses() {
        assert!((&(t(1) - t(2)) + &(t(2) - t(1))).is_zero());
        let d = t(1) - t(2);
        assert!((&d.inverse().unwrap() * &d).is_one());
    }

    #[test]
    fn three_term_partial_fraction_identity() {
        let (i, j, k) = (t(1), t(2), t(3));
        let a = (&(&i - &k) * &(&j - &k)).inverse().unwrap();
        let b = (&(&i - &j) * &(&j - &k)).inverse().unwrap();
        let c = (&(&i - &k) * &(&j - &i)).inverse().unwrap();
        assert!((a - b - c).is_zero());
    }

    #[test]
    fn eval_examples() {
        let x = (t(1) - t(2)).inverse().unwrap();
        assert_eq!(x.eval(&point(&[(1, 3), (2, 1)])).unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(matches!(t(1).eval(&point(&[(2, 5)])), Err(ScalarError::UnboundSymbol(_))));
        assert_eq!(x.eval(&point(&[(1, 2), (2, 2)])), Err(ScalarError::PoleHit));
    }

    #[test]
    fn eval_of_partial_fraction_terms() {
        let (i, j, k) = (t(1), t(2), t(3));
        let at = point(&[(1, 0), (2, 1), (3, 2)]);
        let a = (&(&i - &k) * &(&j - &k)).inverse().unwrap().eval(&at).unwrap();
        let b = (&(&i - &j) * &(&j - &k)).inverse().unwrap().eval(&at).unwrap();
        let c = (&(&i - &k) * &(&j - &i)).inverse().unwrap().eval(&at).unwrap();
        assert_eq!(a, BigRational::new(1.into(), 2.into()));
        assert_eq!(b, BigRational::from_integer(1.into()));
        assert_eq!(c, BigRational::new((-1).into(), 2.into()));
        assert!((a - b - c).is_zero());
    }

    #[test]
    fn partial_derivatives() {
        let d = t(1) - t(2);
        assert!(d.partial(Symbol::time(1)).is_one());
        let x = d.inverse().unwrap();
        assert_eq!(x.partial(Symbol::time(2)), d.pow(2).inverse().unwrap());
        assert!(x.partial(Symbol::time(3)).is_zero());
    }

    #[test]
    fn canonical_sign_and_content() {
        let x = Scalar::from_int(-2).checked_div(&(Scalar::from_int(4) * (t(2) - t(1)))).unwrap();
        let y = Scalar::ratio(1, 2).checked_div(&(t(1) - t(2))).unwrap();
        assert_eq!(x, y);
        assert!(y.denominator().leading().unwrap().1.is_positive());
        assert_eq!(Scalar::one().checked_div(&Scalar::zero()), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn substitution() {
        let x = (t(1) - t(2)).inverse().unwrap();
        let mut m = HashMap::new();
        m.insert(Symbol::time(2), Scalar::zero());
        assert_eq!(x.subs(&m).unwrap(), t(1).inverse().unwrap());
    }
}

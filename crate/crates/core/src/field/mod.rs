//! Exact arithmetic over ℚ and prime fields GF(p).
//!
//! Every [`FieldValue`] carries its [`FieldSpec`]. The fallible `try_*`
//! methods report [`Error::SpecMismatch`] when operands live in different
//! fields; the operator impls treat that as a programming error and panic.

mod modular;
mod rational;

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use modular::is_prime;
use rational::Rational;

/// The field all values of one computation live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct FieldSpec(Kind);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Rationals,
    Prime(u64),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type")]
enum SpecRepr {
    Q,
    Fp { p: u64 },
}

impl TryFrom<SpecRepr> for FieldSpec {
    type Error = Error;
    fn try_from(r: SpecRepr) -> Result<Self> {
        match r {
            SpecRepr::Q => Ok(FieldSpec::rationals()),
            SpecRepr::Fp { p } => FieldSpec::prime(p),
        }
    }
}

impl From<FieldSpec> for SpecRepr {
    fn from(s: FieldSpec) -> Self {
        match s.0 {
            Kind::Rationals => SpecRepr::Q,
            Kind::Prime(p) => SpecRepr::Fp { p },
        }
    }
}

impl FieldSpec {
    pub const fn rationals() -> Self {
        FieldSpec(Kind::Rationals)
    }

    pub fn prime(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(FieldSpec(Kind::Prime(p)))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self.0 {
            Kind::Rationals => 0,
            Kind::Prime(p) => p,
        }
    }

    pub fn is_rationals(&self) -> bool {
        self.0 == Kind::Rationals
    }

    pub fn zero(&self) -> FieldValue {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldValue {
        self.from_i64(1)
    }

    /// The image of the integer `n` under the canonical map ℤ → F.
    pub fn from_i64(&self, n: i64) -> FieldValue {
        let repr = match self.0 {
            Kind::Rationals => Repr::Q(Rational::from_i64(n)),
            Kind::Prime(p) => Repr::P((n as i128).rem_euclid(p as i128) as u64, p),
        };
        FieldValue(repr)
    }

    /// Parses `"num/den"` or an integer; over GF(p) the rational is reduced mod p.
    pub fn parse(&self, s: &str) -> Result<FieldValue> {
        let q = Rational::parse(s)
            .ok_or_else(|| Error::Parse(format!("not a field element: {s:?}")))?;
        match self.0 {
            Kind::Rationals => Ok(FieldValue(Repr::Q(q))),
            Kind::Prime(p) => q
                .residue(p)
                .map(|r| FieldValue(Repr::P(r, p)))
                .ok_or_else(|| Error::Parse(format!("{s:?} has a denominator divisible by {p}"))),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Kind::Rationals => write!(f, "Q"),
            Kind::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

/// `n · 1_F`; in GF(p) this is `n mod p`.
pub fn nat_embed(n: u64, spec: FieldSpec) -> FieldValue {
    match spec.0 {
        Kind::Rationals => match i64::try_from(n) {
            Ok(v) => spec.from_i64(v),
            Err(_) => FieldValue(Repr::Q(Rational::from_big(
                num_rational::BigRational::from_integer(n.into()),
            ))),
        },
        Kind::Prime(p) => FieldValue(Repr::P(n % p, p)),
    }
}

/// An exact element of ℚ or GF(p).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldValue(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Q(Rational),
    /// Residue in `[0, p)` and the modulus.
    P(u64, u64),
}

impl FieldValue {
    pub fn spec(&self) -> FieldSpec {
        match self.0 {
            Repr::Q(_) => FieldSpec::rationals(),
            Repr::P(_, p) => FieldSpec(Kind::Prime(p)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Q(q) => q.is_zero(),
            Repr::P(v, _) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Q(q) => q.is_one(),
            Repr::P(v, _) => *v == 1,
        }
    }

    fn check(&self, other: &FieldValue) -> Result<()> {
        match (&self.0, &other.0) {
            (Repr::Q(_), Repr::Q(_)) => Ok(()),
            (Repr::P(_, p), Repr::P(_, q)) if p == q => Ok(()),
            _ => Err(Error::SpecMismatch(
                self.spec().to_string(),
                other.spec().to_string(),
            )),
        }
    }

    pub fn try_add(&self, other: &FieldValue) -> Result<FieldValue> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &FieldValue) -> Result<FieldValue> {
        self.check(other)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn try_mul(&self, other: &FieldValue) -> Result<FieldValue> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn try_div(&self, other: &FieldValue) -> Result<FieldValue> {
        self.check(other)?;
        Ok(self.mul_unchecked(&other.inv()?))
    }

    pub fn neg(&self) -> FieldValue {
        FieldValue(match &self.0 {
            Repr::Q(q) => Repr::Q(q.neg()),
            Repr::P(v, p) => Repr::P(modular::sub(0, *v, *p), *p),
        })
    }

    pub fn inv(&self) -> Result<FieldValue> {
        match &self.0 {
            Repr::Q(q) => q
                .inv()
                .map(|r| FieldValue(Repr::Q(r)))
                .ok_or(Error::DivisionByZero),
            Repr::P(v, p) => modular::inv(*v, *p)
                .map(|r| FieldValue(Repr::P(r, *p)))
                .ok_or(Error::DivisionByZero),
        }
    }

    /// `self^e` with `0^0 = 1`.
    pub fn pow(&self, e: u64) -> FieldValue {
        FieldValue(match &self.0 {
            Repr::Q(q) => Repr::Q(q.pow(e)),
            Repr::P(v, p) => Repr::P(modular::pow(*v, e, *p), *p),
        })
    }

    /// Sign of a rational value; `None` in a prime field.
    pub fn signum(&self) -> Option<std::cmp::Ordering> {
        match &self.0 {
            Repr::Q(q) => Some(q.signum()),
            Repr::P(..) => None,
        }
    }

    fn add_unchecked(&self, other: &FieldValue) -> FieldValue {
        FieldValue(match (&self.0, &other.0) {
            (Repr::Q(a), Repr::Q(b)) => Repr::Q(a.add(b)),
            (Repr::P(a, p), Repr::P(b, _)) => Repr::P(modular::add(*a, *b, *p), *p),
            _ => unreachable!("checked by caller"),
        })
    }

    fn mul_unchecked(&self, other: &FieldValue) -> FieldValue {
        FieldValue(match (&self.0, &other.0) {
            (Repr::Q(a), Repr::Q(b)) => Repr::Q(a.mul(b)),
            (Repr::P(a, p), Repr::P(b, _)) => Repr::P(modular::mul(*a, *b, *p), *p),
            _ => unreachable!("checked by caller"),
        })
    }

    fn expect_same(&self, other: &FieldValue) {
        if let Err(e) = self.check(other) {
            panic!("{e}");
        }
    }
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Q(q) => write!(f, "{q}"),
            Repr::P(v, _) => write!(f, "{v}"),
        }
    }
}

impl fmt::Debug for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Q(q) => write!(f, "{q}"),
            Repr::P(v, p) => write!(f, "{v} (mod {p})"),
        }
    }
}

impl Serialize for FieldValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&FieldValue> for &FieldValue {
            type Output = FieldValue;
            fn $method(self, rhs: &FieldValue) -> FieldValue {
                self.expect_same(rhs);
                $body(self, rhs)
            }
        }
        impl $trait<FieldValue> for FieldValue {
            type Output = FieldValue;
            fn $method(self, rhs: FieldValue) -> FieldValue {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&FieldValue> for FieldValue {
            type Output = FieldValue;
            fn $method(self, rhs: &FieldValue) -> FieldValue {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, |a: &FieldValue, b: &FieldValue| a
    .add_unchecked(b));
binop!(Sub, sub, |a: &FieldValue, b: &FieldValue| a
    .add_unchecked(&b.neg()));
binop!(Mul, mul, |a: &FieldValue, b: &FieldValue| a
    .mul_unchecked(b));

impl Neg for &FieldValue {
    type Output = FieldValue;
    fn neg(self) -> FieldValue {
        FieldValue::neg(self)
    }
}

impl Neg for FieldValue {
    type Output = FieldValue;
    fn neg(self) -> FieldValue {
        FieldValue::neg(&self)
    }
}

impl AddAssign<&FieldValue> for FieldValue {
    fn add_assign(&mut self, rhs: &FieldValue) {
        self.expect_same(rhs);
        *self = self.add_unchecked(rhs);
    }
}

impl AddAssign<FieldValue> for FieldValue {
    fn add_assign(&mut self, rhs: FieldValue) {
        *self += &rhs;
    }
}

impl MulAssign<&FieldValue> for FieldValue {
    fn mul_assign(&mut self, rhs: &FieldValue) {
        self.expect_same(rhs);
        *self = self.mul_unchecked(rhs);
    }
}

/// Sums an iterator of values in `spec`.
pub fn sum<'a, I: IntoIterator<Item = &'a FieldValue>>(spec: FieldSpec, it: I) -> FieldValue {
    let mut acc = spec.zero();
    for v in it {
        acc += v;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> FieldValue {
        FieldSpec::rationals().parse(s).unwrap()
    }

    fn gf(p: u64, n: i64) -> FieldValue {
        FieldSpec::prime(p).unwrap().from_i64(n)
    }

    #[test]
    fn documented_examples() {
        assert_eq!(q("1/2") + q("1/3"), q("5/6"));
        assert_eq!(gf(5, 3) + gf(5, 4), gf(5, 2));
        assert_eq!(q("7/3") + q("0"), q("7/3"));
        assert_eq!(gf(5, 2).inv().unwrap(), gf(5, 3));
        assert_eq!(q("0").pow(0), q("1"));
        assert_eq!(gf(7, 0).pow(0), gf(7, 1));
        assert_eq!(q("2/3").pow(3), q("8/27"));
        assert!(nat_embed(4, FieldSpec::prime(2).unwrap()).is_zero());
        assert_eq!(nat_embed(4, FieldSpec::rationals()), q("4"));
        assert!(nat_embed(0, FieldSpec::prime(3).unwrap()).is_zero());
    }

    #[test]
    fn errors() {
        assert_eq!(q("0").inv(), Err(Error::DivisionByZero));
        assert_eq!(gf(3, 3).inv(), Err(Error::DivisionByZero));
        assert!(matches!(
            q("1").try_add(&gf(3, 1)),
            Err(Error::SpecMismatch(..))
        ));
        assert!(matches!(
            gf(5, 1).try_mul(&gf(3, 1)),
            Err(Error::SpecMismatch(..))
        ));
        assert_eq!(FieldSpec::prime(9), Err(Error::NotPrime(9)));
        assert!(FieldSpec::prime(5).unwrap().parse("1/5").is_err());
    }

    #[test]
    fn serialization() {
        assert_eq!(q("-4/6").to_string(), "-2/3");
        assert_eq!(q("12/4").to_string(), "3");
        assert_eq!(gf(5, -1).to_string(), "4");
        assert_eq!(FieldSpec::prime(5).unwrap().parse("1/2").unwrap(), gf(5, 3));
        let spec: FieldSpec = serde_json::from_str(r#"{"type":"Fp","p":7}"#).unwrap();
        assert_eq!(spec.characteristic(), 7);
        assert_eq!(
            serde_json::to_string(&spec).unwrap(),
            r#"{"type":"Fp","p":7}"#
        );
        assert_eq!(
            serde_json::to_string(&FieldSpec::rationals()).unwrap(),
            r#"{"type":"Q"}"#
        );
        assert!(serde_json::from_str::<FieldSpec>(r#"{"type":"Fp","p":8}"#).is_err());
    }

    #[test]
    fn large_values_stay_exact() {
        let two = q("2");
        let big = two.pow(200);
        assert_eq!(
            big.to_string(),
            "1606938044258990275541962092341162602522202993782792835301376"
        );
        let back = big.try_div(&two.pow(199)).unwrap();
        assert_eq!(back, two);
    }
}

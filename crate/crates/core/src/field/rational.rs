use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational in lowest terms with positive denominator.
///
/// Values whose numerator and denominator both lie in `-(2^63-1)..=2^63-1`
/// are always stored as `Small`; all others as `Big`. The representation is
/// therefore unique and the derived equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) enum Rational {
    Small(i64, i64),
    Big(Box<BigRational>),
}

const LIMIT: i128 = i64::MAX as i128;

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub(crate) const ZERO: Rational = Rational::Small(0, 1);
    pub(crate) const ONE: Rational = Rational::Small(1, 1);

    pub(crate) fn from_i64(n: i64) -> Self {
        if n == i64::MIN {
            Rational::from_big(BigRational::from_integer(BigInt::from(n)))
        } else {
            Rational::Small(n, 1)
        }
    }

    /// `n / d` for `d != 0`, with `|n|, |d| < 2^127`.
    fn from_i128(n: i128, d: i128) -> Self {
        debug_assert!(d != 0);
        let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
        let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
        let (n, d) = if g > 1 { (n / g, d / g) } else { (n, d) };
        if n.abs() <= LIMIT && d <= LIMIT {
            Rational::Small(n as i64, d as i64)
        } else {
            Rational::Big(Box::new(BigRational::new_raw(
                BigInt::from(n),
                BigInt::from(d),
            )))
        }
    }

    /// Takes a normalized big rational and demotes it when it fits.
    pub(crate) fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => Rational::Small(n, d),
            _ => Rational::Big(Box::new(r)),
        }
    }

    pub(crate) fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(b) => (**b).clone(),
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        matches!(self, Rational::Small(0, _))
    }

    pub(crate) fn add(&self, other: &Rational) -> Rational {
        match (self, other) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    return Rational::from_i128(*a as i128 + *c as i128, 1);
                }
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Rational::from_i128(a * d + c * b, b * d)
            }
            _ => Rational::from_big(self.to_big() + other.to_big()),
        }
    }

    pub(crate) fn neg(&self) -> Rational {
        match self {
            Rational::Small(n, d) => Rational::Small(-n, *d),
            Rational::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }

    pub(crate) fn mul(&self, other: &Rational) -> Rational {
        match (self, other) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if *a == 0 || *c == 0 {
                    return Rational::ZERO;
                }
                Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rational::from_big(self.to_big() * other.to_big()),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub(crate) fn inv(&self) -> Option<Rational> {
        match self {
            Rational::Small(0, _) => None,
            Rational::Small(n, d) => Some(Rational::from_i128(*d as i128, *n as i128)),
            Rational::Big(b) => Some(Rational::from_big(b.recip())),
        }
    }

    pub(crate) fn pow(&self, mut e: u64) -> Rational {
        let mut base = self.clone();
        let mut acc = Rational::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub(crate) fn parse(s: &str) -> Option<Rational> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let valid = |t: &str| {
            let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
            !digits.is_empty() && digits.bytes().all(|c| c.is_ascii_digit())
        };
        if !valid(n) || !valid(d) {
            return None;
        }
        let n: BigInt = n.parse().ok()?;
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rational::from_big(BigRational::new(n, d)))
    }

    /// Reduces into `GF(p)` when the denominator is invertible.
    pub(crate) fn residue(&self, p: u64) -> Option<u64> {
        let big = self.to_big();
        let pb = BigInt::from(p);
        let n = big.numer().mod_floor(&pb).to_u64()?;
        let d = big.denom().mod_floor(&pb).to_u64()?;
        if d == 0 {
            return None;
        }
        Some(super::modular::mul(n, super::modular::inv(d, p)?, p))
    }

    pub(crate) fn signum(&self) -> Ordering {
        match self {
            Rational::Small(n, _) => n.cmp(&0),
            Rational::Big(b) => {
                if b.is_negative() {
                    Ordering::Less
                } else if b.is_zero() {
                    Ordering::Equal
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    pub(crate) fn is_one(&self) -> bool {
        match self {
            Rational::Small(n, d) => *n == 1 && *d == 1,
            Rational::Big(b) => b.is_one(),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(b) if b.denom().is_one() => write!(f, "{}", b.numer()),
            Rational::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn small_and_big_paths_agree_near_the_boundary() {
        let edge = [i64::MAX, i64::MAX - 1, 1 << 62, 3, -7, -(i64::MAX)];
        for &a in &edge {
            for &b in &edge {
                let x = Rational::from_i64(a);
                let y = Rational::from_big(big(b, 5));
                assert_eq!(x.add(&y).to_big(), big(a, 1) + big(b, 5));
                assert_eq!(x.mul(&y).to_big(), big(a, 1) * big(b, 5));
                assert_eq!(
                    x.mul(&y).mul(&y).to_big(),
                    big(a, 1) * big(b, 5) * big(b, 5)
                );
            }
        }
    }

    #[test]
    fn representation_is_unique() {
        let huge = Rational::from_i64(i64::MAX).mul(&Rational::from_i64(4));
        let back = huge.mul(&Rational::from_i64(4).inv().unwrap());
        assert_eq!(back, Rational::from_i64(i64::MAX));
        assert!(matches!(back, Rational::Small(..)));
        assert!(matches!(Rational::from_i64(i64::MIN), Rational::Big(..)));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Rational::parse("1/0").is_none());
        assert!(Rational::parse("abc").is_none());
        assert!(Rational::parse("1//2").is_none());
        assert!(Rational::parse("").is_none());
        assert_eq!(Rational::parse("-4/6").unwrap(), Rational::Small(-2, 3));
        assert_eq!(Rational::parse("+5").unwrap(), Rational::Small(5, 1));
    }
}

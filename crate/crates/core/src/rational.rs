//! Exact rationals and the extended points `-inf`/`+inf` used as interval ends.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An exact rational number in lowest terms with a positive denominator.
///
/// Values whose numerator and denominator fit in `i64` are stored inline and combined
/// with `i128` intermediates; anything larger falls back to a big rational. The
/// representation is canonical, so derived equality and hashing are sound.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(i64, i64),
    Big(BigRational),
}

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Self::from_i128(numer as i128, denom as i128)
    }

    pub fn from_int(n: i64) -> Self {
        Rational(Repr::Small(n, 1))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    fn from_i128(n: i128, d: i128) -> Self {
        let g = n.gcd(&d);
        let (mut n, mut d) = (n / g, d / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(BigRational::new(
                BigInt::from(n),
                BigInt::from(d),
            ))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(r)),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    fn signum(&self) -> Ordering {
        match &self.0 {
            Repr::Small(n, _) => n.cmp(&0),
            Repr::Big(r) => r.numer().sign().cmp(&num_bigint::Sign::NoSign),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == Ordering::Equal
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(match &self.0 {
            Repr::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Repr::Big(r) => Self::from_big(r.recip()),
        })
    }

    pub fn midpoint(&self, other: &Self) -> Self {
        (self + other) / &Rational::from_int(2)
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid rational {s:?}"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rational::from_big(BigRational::new(n, d)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn add(x: &Rational, y: &Rational) -> Rational {
    match (&x.0, &y.0) {
        (Repr::Small(a, b), Repr::Small(c, d)) => {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            Rational::from_i128(a * d + c * b, b * d)
        }
        _ => Rational::from_big(x.to_big() + y.to_big()),
    }
}

fn mul(x: &Rational, y: &Rational) -> Rational {
    match (&x.0, &y.0) {
        (Repr::Small(a, b), Repr::Small(c, d)) => {
            Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
        }
        _ => Rational::from_big(x.to_big() * y.to_big()),
    }
}

fn sub(x: &Rational, y: &Rational) -> Rational {
    add(x, &-y)
}

fn div(x: &Rational, y: &Rational) -> Rational {
    assert!(!y.is_zero(), "division by zero");
    mul(x, &y.recip().unwrap())
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $f:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $f(self, rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $f(&self, &rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $f(&self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);
forward_binop!(Div, div, div);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => match n.checked_neg() {
                Some(m) => Rational(Repr::Small(m, *d)),
                None => Rational::from_i128(-(*n as i128), *d as i128),
            },
            Repr::Big(r) => Rational::from_big(-r),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

/// A point of the extended chain: a rational or one of the two infinities.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtPoint {
    NegInfinity,
    Finite(Rational),
    PosInfinity,
}

impl ExtPoint {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtPoint::Finite(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtPoint::Finite(_))
    }

    pub fn neg(&self) -> ExtPoint {
        match self {
            ExtPoint::NegInfinity => ExtPoint::PosInfinity,
            ExtPoint::PosInfinity => ExtPoint::NegInfinity,
            ExtPoint::Finite(q) => ExtPoint::Finite(-q),
        }
    }

    /// Compares with a finite point without cloning it.
    pub fn cmp_finite(&self, x: &Rational) -> Ordering {
        match self {
            ExtPoint::NegInfinity => Ordering::Less,
            ExtPoint::Finite(v) => v.cmp(x),
            ExtPoint::PosInfinity => Ordering::Greater,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            ExtPoint::NegInfinity => 0,
            ExtPoint::Finite(_) => 1,
            ExtPoint::PosInfinity => 2,
        }
    }
}

impl Ord for ExtPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtPoint::Finite(a), ExtPoint::Finite(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for ExtPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Rational> for ExtPoint {
    fn from(q: Rational) -> Self {
        ExtPoint::Finite(q)
    }
}

impl fmt::Display for ExtPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtPoint::NegInfinity => f.write_str("-inf"),
            ExtPoint::PosInfinity => f.write_str("+inf"),
            ExtPoint::Finite(q) => write!(f, "{q}"),
        }
    }
}

impl fmt::Debug for ExtPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "-inf" => Ok(ExtPoint::NegInfinity),
            "+inf" | "inf" => Ok(ExtPoint::PosInfinity),
            other => Ok(ExtPoint::Finite(other.parse()?)),
        }
    }
}

impl Serialize for ExtPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for `Rational::new`, used heavily in tests and examples.
pub fn q(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn overflow_falls_back_and_returns() {
        let max = Rational::from_int(i64::MAX);
        let doubled = &max * &Rational::from_int(2);
        assert_eq!(doubled.to_string(), "18446744073709551614");
        assert_eq!(&doubled / &Rational::from_int(2), max);
        let min = Rational::from_int(i64::MIN);
        assert_eq!((-&min).to_string(), "9223372036854775808");
        assert_eq!(-(-&min), min);
        let tiny = Rational::new(1, i64::MAX) * Rational::new(1, 3);
        assert!(tiny.is_positive() && tiny < Rational::new(1, i64::MAX));
    }

    #[test]
    fn big_and_small_forms_agree() {
        let parsed: Rational = "36893488147419103232/18446744073709551616".parse().unwrap();
        assert_eq!(parsed, Rational::from_int(2));
        let mut h1 = std::collections::hash_map::DefaultHasher::new();
        let mut h2 = std::collections::hash_map::DefaultHasher::new();
        std::hash::Hash::hash(&parsed, &mut h1);
        std::hash::Hash::hash(&Rational::from_int(2), &mut h2);
        assert_eq!(
            std::hash::Hasher::finish(&h1),
            std::hash::Hasher::finish(&h2)
        );
        let big: Rational = "100000000000000000000/3".parse().unwrap();
        assert!(big > Rational::from_int(i64::MAX));
        assert!(-&big < Rational::from_int(i64::MIN));
    }

    #[test]
    fn canonical_form() {
        assert_eq!(q(2, 4).to_string(), "1/2");
        assert_eq!(q(3, -6).to_string(), "-1/2");
        assert_eq!(q(4, 2).to_string(), "2");
        assert_eq!(q(0, 5).to_string(), "0");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
        assert_eq!("-6/4".parse::<Rational>().unwrap(), q(-3, 2));
    }

    #[test]
    fn ext_order() {
        let pts = [
            ExtPoint::NegInfinity,
            ExtPoint::Finite(q(-1000, 1)),
            ExtPoint::Finite(q(1, 3)),
            ExtPoint::PosInfinity,
        ];
        for w in pts.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert_eq!("+inf".parse::<ExtPoint>().unwrap(), ExtPoint::PosInfinity);
        assert_eq!(ExtPoint::NegInfinity.to_string(), "-inf");
    }

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    proptest! {
        #[test]
        fn matches_big_rational(a in any::<i64>(), b in 1..=i64::MAX, c in any::<i64>(), d in 1..=i64::MAX) {
            let (x, y) = (Rational::new(a, b), Rational::new(c, d));
            let (bx, by) = (big(a, b), big(c, d));
            prop_assert_eq!((&x + &y).to_string(), (&bx + &by).to_string());
            prop_assert_eq!((&x - &y).to_string(), (&bx - &by).to_string());
            prop_assert_eq!((&x * &y).to_string(), (&bx * &by).to_string());
            if c != 0 {
                prop_assert_eq!((&x / &y).to_string(), (&bx / &by).to_string());
            }
            prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
        }
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(n in any::<i64>(), d in 1i64..i64::MAX) {
            let x = q(n, d);
            prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
        }

        #[test]
        fn field_laws(a in -50i64..50, b in 1i64..20, c in -50i64..50, d in 1i64..20) {
            let x = q(a, b);
            let y = q(c, d);
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            if !y.is_zero() {
                prop_assert_eq!(&(&x / &y) * &y, x);
            }
        }
    }
}

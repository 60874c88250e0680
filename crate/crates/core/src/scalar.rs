//! Exact rational scalars.
//!
//! Every coordinate and every derived quantity (sums, differences, images of
//! pattern vertices) is a [`Scalar`]. Values that are integers fitting in an
//! `i64` stay on a machine-word fast path; everything else falls back to an
//! arbitrary-precision [`BigRational`]. The representation is canonical, so
//! structural equality and hashing coincide with value equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ScalarParseError;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Int(i64),
    /// Never an integer that fits in `i64`.
    Big(BigRational),
}

/// An exact rational number in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

impl Scalar {
    pub const ZERO: Scalar = Scalar(Repr::Int(0));
    pub const ONE: Scalar = Scalar(Repr::Int(1));

    pub fn from_int(value: i64) -> Self {
        Scalar(Repr::Int(value))
    }

    /// Builds `numer / denom`. Panics if `denom` is zero.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Self::from_big_ratio(BigInt::from(numer), BigInt::from(denom))
    }

    /// Builds `numer / denom` from big integers. Panics if `denom` is zero.
    pub fn from_big_ratio(numer: BigInt, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        Self::from_rational(BigRational::new(numer, denom))
    }

    pub fn from_rational(value: BigRational) -> Self {
        if value.is_integer() {
            if let Some(v) = value.numer().to_i64() {
                return Scalar(Repr::Int(v));
            }
        }
        Scalar(Repr::Big(value))
    }

    pub fn to_rational(&self) -> BigRational {
        match &self.0 {
            Repr::Int(v) => BigRational::from_integer(BigInt::from(*v)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Int(v) => BigInt::from(*v),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Int(_) => BigInt::one(),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self.0 {
            Repr::Int(v) => Some(v),
            Repr::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Int(0))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Int(_) => true,
            Repr::Big(r) => r.is_integer(),
        }
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Int(v) => v.signum() as i32,
            Repr::Big(r) => {
                if r.is_positive() {
                    1
                } else if r.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Scalar {
        &Scalar::ONE / self
    }

    /// Lossy conversion for reporting and timing fits only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Int(v) => *v as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::ZERO
    }
}

impl From<i64> for Scalar {
    fn from(value: i64) -> Self {
        Scalar::from_int(value)
    }
}

impl From<i32> for Scalar {
    fn from(value: i32) -> Self {
        Scalar::from_int(value as i64)
    }
}

impl From<BigRational> for Scalar {
    fn from(value: BigRational) -> Self {
        Scalar::from_rational(value)
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Int(a), Repr::Int(b)) => a.cmp(b),
            (Repr::Big(a), Repr::Big(b)) => a.cmp(b),
            _ => self.to_rational().cmp(&other.to_rational()),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Int(v) => write!(f, "{v}"),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Int(v) => match v.checked_neg() {
                Some(n) => Scalar(Repr::Int(n)),
                None => Scalar::from_rational(-self.to_rational()),
            },
            Repr::Big(r) => Scalar::from_rational(-r.clone()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

fn big_op(a: &Scalar, b: &Scalar, op: impl Fn(BigRational, BigRational) -> BigRational) -> Scalar {
    Scalar::from_rational(op(a.to_rational(), b.to_rational()))
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if let (Repr::Int(a), Repr::Int(b)) = (&self.0, &rhs.0) {
            if let Some(v) = a.checked_add(*b) {
                return Scalar(Repr::Int(v));
            }
        }
        big_op(self, rhs, |a, b| a + b)
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        if let (Repr::Int(a), Repr::Int(b)) = (&self.0, &rhs.0) {
            if let Some(v) = a.checked_sub(*b) {
                return Scalar(Repr::Int(v));
            }
        }
        big_op(self, rhs, |a, b| a - b)
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if let (Repr::Int(a), Repr::Int(b)) = (&self.0, &rhs.0) {
            if let Some(v) = a.checked_mul(*b) {
                return Scalar(Repr::Int(v));
            }
        }
        big_op(self, rhs, |a, b| a * b)
    }
}

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        if let (Repr::Int(a), Repr::Int(b)) = (&self.0, &rhs.0) {
            if let (Some(0), Some(q)) = (a.checked_rem(*b), a.checked_div(*b)) {
                return Scalar(Repr::Int(q));
            }
        }
        big_op(self, rhs, |a, b| a / b)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { self.$m(&rhs) }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::ZERO, |acc, x| acc + x)
    }
}

impl FromStr for Scalar {
    type Err = ScalarParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_scalar(s)
    }
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(s.as_bytes(), 10)
}

/// Parses an optionally signed integer, a finite decimal (`-1.25`) or a
/// fraction `p/q`. Decimals are converted exactly.
pub fn parse_scalar(token: &str) -> Result<Scalar, ScalarParseError> {
    let malformed = || ScalarParseError::Malformed(token.to_string());
    let (negative, body) = match token.as_bytes().first() {
        Some(b'-') => (true, &token[1..]),
        Some(b'+') => (false, &token[1..]),
        Some(_) => (false, token),
        None => return Err(malformed()),
    };

    let value = if let Some((p, q)) = body.split_once('/') {
        let numer = parse_digits(p).ok_or_else(malformed)?;
        let denom = parse_digits(q).ok_or_else(malformed)?;
        if denom.is_zero() {
            return Err(ScalarParseError::ZeroDenominator(token.to_string()));
        }
        Scalar::from_big_ratio(numer, denom)
    } else if let Some((int_part, frac_part)) = body.split_once('.') {
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(malformed());
        }
        let int = if int_part.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(int_part).ok_or_else(malformed)?
        };
        let (frac, scale) = if frac_part.is_empty() {
            (BigInt::zero(), BigInt::one())
        } else {
            let frac = parse_digits(frac_part).ok_or_else(malformed)?;
            (frac, num_traits::pow(BigInt::from(10), frac_part.len()))
        };
        Scalar::from_big_ratio(int * &scale + frac, scale)
    } else {
        if let Ok(v) = body.parse::<u64>() {
            if !body.starts_with('+') {
                if let Ok(v) = i64::try_from(v) {
                    return Ok(Scalar::from_int(if negative { -v } else { v }));
                }
            }
        }
        Scalar::from_rational(BigRational::from_integer(parse_digits(body).ok_or_else(malformed)?))
    };
    Ok(if negative { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_integers_decimals_and_fractions() {
        assert_eq!(parse_scalar("3").unwrap(), Scalar::from_int(3));
        assert_eq!(parse_scalar("1.25").unwrap(), Scalar::ratio(5, 4));
        assert_eq!(parse_scalar("-0.5").unwrap(), Scalar::ratio(-1, 2));
        assert_eq!(parse_scalar("+7").unwrap(), Scalar::from_int(7));
        assert_eq!(parse_scalar("6/4").unwrap(), Scalar::ratio(3, 2));
        assert_eq!(parse_scalar("-6/3").unwrap(), Scalar::from_int(-2));
        assert_eq!(parse_scalar(".5").unwrap(), Scalar::ratio(1, 2));
        assert_eq!(parse_scalar("2.").unwrap(), Scalar::from_int(2));
    }

    #[test]
    fn rejects_bad_tokens() {
        assert_eq!(
            parse_scalar("7/0"),
            Err(ScalarParseError::ZeroDenominator("7/0".into()))
        );
        for bad in ["", "-", "abc", "1e3", "1/2/3", "1.2.3", ".", "3/-4", "--1", "1 2"] {
            assert!(parse_scalar(bad).is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn big_values_stay_exact() {
        let big = parse_scalar("123456789012345678901234567890").unwrap();
        assert_eq!(big.as_i64(), None);
        assert_eq!(big.to_string(), "123456789012345678901234567890");
        let max = Scalar::from_int(i64::MAX);
        let sum = &max + &Scalar::ONE;
        assert_eq!(&sum - &Scalar::ONE, max);
        assert_eq!((&sum - &Scalar::ONE).as_i64(), Some(i64::MAX));
        assert_eq!(-Scalar::from_int(i64::MIN), &max + &Scalar::ONE);
    }

    #[test]
    fn division_canonicalizes() {
        let third = &Scalar::from_int(1) / &Scalar::from_int(3);
        assert_eq!(third.to_string(), "1/3");
        assert_eq!(&third * &Scalar::from_int(3), Scalar::ONE);
        assert_eq!((&third * &Scalar::from_int(3)).as_i64(), Some(1));
        assert_eq!(&Scalar::from_int(6) / &Scalar::from_int(-3), Scalar::from_int(-2));
    }

    proptest! {
        #[test]
        fn ordering_matches_rational(a in -1000i64..1000, b in 1i64..50, c in -1000i64..1000, e in 1i64..50) {
            let x = Scalar::ratio(a, b);
            let y = Scalar::ratio(c, e);
            prop_assert_eq!(x.cmp(&y), (a * e).cmp(&(c * b)));
            prop_assert_eq!(x == y, a * e == c * b);
        }

        #[test]
        fn display_round_trips(a in any::<i64>(), b in 1i64..1_000_000) {
            let x = Scalar::ratio(a, b);
            prop_assert_eq!(parse_scalar(&x.to_string()).unwrap(), x);
        }

        #[test]
        fn field_identities(a in any::<i64>(), b in any::<i64>(), c in 1i64..1000) {
            let x = Scalar::from_int(a);
            let y = Scalar::ratio(b, c);
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            if !y.is_zero() {
                prop_assert_eq!(&(&x * &y) / &y, x);
            }
        }
    }
}

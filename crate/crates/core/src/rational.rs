//! Exact rational numbers.
//!
//! [`Rational`] wraps [`num_rational::BigRational`], which keeps every value in
//! canonical form (positive denominator, coprime numerator and denominator)
//! after each arithmetic operation. The wrapper adds the textual format used
//! throughout the crate: `"p/q"` on output, and `"p/q"`, integers, or exact
//! decimals (`"2.9"`, `"1e-6"`) on input. Input is never routed through binary
//! floating point.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `num / den`. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Self {
        Rational(BigRational::new(num, den))
    }

    pub fn integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn pow(&self, exp: i32) -> Self {
        Rational(num_traits::Pow::pow(&self.0, exp))
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn min(self, other: Self) -> Self {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Self) -> Self {
        std::cmp::max(self, other)
    }

    /// Nearest `f64`. Values below the subnormal range round to zero.
    pub fn to_f64(&self) -> f64 {
        if let Some(v) = self.0.to_f64() {
            return v;
        }
        let l = self.ln_abs();
        self.signum() as f64 * l.exp()
    }

    /// Natural logarithm of `|self|`, accurate for magnitudes far outside the
    /// `f64` range. Returns `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_bigint(self.numer()) - ln_bigint(self.denom())
    }

    /// Rational enclosure `[lo, hi]` of `sqrt(self)` with `hi - lo <= width`.
    /// Exact when `self` is the square of a rational, in which case `lo == hi`.
    pub fn sqrt_enclosure(&self, width: &Rational) -> Option<(Rational, Rational)> {
        if self.is_negative() {
            return None;
        }
        let (p, q) = (self.numer(), self.denom());
        let (sp, sq) = (p.sqrt(), q.sqrt());
        if &(&sp * &sp) == p && &(&sq * &sq) == q {
            let r = Rational::from_bigints(sp, sq);
            return Some((r.clone(), r));
        }
        // sqrt(p/q) = sqrt(p*q) / q; scale by 2^k until 1/(q*2^k) <= width.
        let pq = p * q;
        let mut k: u64 = 0;
        loop {
            let scale = BigInt::one() << k;
            let step = Rational::from_bigints(BigInt::one(), q * &scale);
            if &step <= width {
                let root = (&pq * &scale * &scale).sqrt();
                let lo = Rational::from_bigints(root.clone(), q * &scale);
                let hi = Rational::from_bigints(root + 1, q * &scale);
                return Some((lo, hi));
            }
            k += 8;
        }
    }

    /// `10^-digits`.
    pub fn pow10_neg(digits: u32) -> Self {
        Rational::from_bigints(BigInt::one(), num_traits::pow(BigInt::from(10), digits as usize))
    }
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map(f64::abs).unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator: {s:?}")));
            }
            return Ok(Rational::from_bigints(p, q));
        }
        parse_decimal(s).ok_or_else(bad)
    }
}

/// Exact decimal parse: `[-+]digits[.digits][e[-+]digits]`.
fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = Rational::integer(10);
    let mut value = Rational::from_bigints(digits, BigInt::one()) * ten.pow(scale);
    if neg {
        value = -value;
    }
    Some(value)
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

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.0.is_integer() && self.0.numer() == &BigInt::from(*other)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.0.cmp(&BigRational::from_integer(BigInt::from(*other))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    #[test]
    fn canonical_after_arithmetic() {
        let a = Rational::new(6, -8);
        assert_eq!(a.numer(), &BigInt::from(-3));
        assert_eq!(a.denom(), &BigInt::from(4));
        let b = &a * &Rational::new(4, 3);
        assert_eq!(b, Rational::integer(-1));
        assert_eq!(b.numer().gcd(b.denom()), BigInt::one());
    }

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!("3/6".parse::<Rational>().unwrap(), Rational::new(1, 2));
        assert_eq!("-7".parse::<Rational>().unwrap(), Rational::integer(-7));
        assert_eq!("2.9".parse::<Rational>().unwrap(), Rational::new(29, 10));
        assert_eq!("1e-6".parse::<Rational>().unwrap(), Rational::new(1, 1_000_000));
        assert_eq!("-.25".parse::<Rational>().unwrap(), Rational::new(-1, 4));
        assert_eq!("1.5E2".parse::<Rational>().unwrap(), Rational::integer(150));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert!(".".parse::<Rational>().is_err());
        assert!("0.1x".parse::<Rational>().is_err());
    }

    #[test]
    fn display_is_always_p_over_q() {
        assert_eq!(Rational::integer(2).to_string(), "2/1");
        assert_eq!(Rational::new(-3, 9).to_string(), "-1/3");
    }

    #[test]
    fn serde_uses_string_form() {
        let r = Rational::new(5, 7);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, "\"5/7\"");
        let back: Rational = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn float_conversion_and_log_of_tiny_values() {
        assert_eq!(Rational::new(1, 4).to_f64(), 0.25);
        let tiny = Rational::new(1, 4).pow(600);
        let expected = -600.0 * 4f64.ln();
        assert!((tiny.ln_abs() - expected).abs() < 1e-9);
        assert_eq!(tiny.to_f64(), 0.0);
    }

    #[test]
    fn sqrt_enclosure_exact_and_irrational() {
        let (lo, hi) = Rational::new(9, 4).sqrt_enclosure(&Rational::new(1, 100)).unwrap();
        assert_eq!(lo, Rational::new(3, 2));
        assert_eq!(hi, lo);
        let w = Rational::pow10_neg(30);
        let (lo, hi) = Rational::integer(2).sqrt_enclosure(&w).unwrap();
        assert!(&hi - &lo <= w);
        assert!(&lo * &lo < Rational::integer(2));
        assert!(&hi * &hi > Rational::integer(2));
        assert!(Rational::integer(-1).sqrt_enclosure(&w).is_none());
    }

    proptest::proptest! {
        #[test]
        fn text_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
            let r = Rational::new(p, q);
            let back: Rational = r.to_string().parse().unwrap();
            proptest::prop_assert_eq!(back, r);
        }
    }
}

//! Exact arbitrary-precision signed rationals.
//!
//! `Rational` is the sole numeric type used by the core modules. Values are
//! kept in canonical form (lowest terms, positive denominator) after every
//! operation. Internally a word-sized fast path backs the common case and
//! arithmetic falls back to `num`'s big rationals on overflow, so all results
//! are exact regardless of magnitude.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Magnitude limit for the word-sized representation. Cross products of two
/// in-range values stay below 2^124, so sums and comparisons fit in i128.
const SMALL_LIM: u64 = 1 << 62;

#[derive(Clone, Debug)]
enum Repr {
    Small { num: i64, den: u64 },
    Big(Box<BigRational>),
}

/// Exact signed rational in canonical lowest terms with positive denominator.
#[derive(Clone, Debug)]
pub struct Rational(Repr);

fn gcd_u128(a: u128, b: u128) -> u128 {
    a.gcd(&b)
}

fn make_small_or_big(num: i128, den: u128) -> Rational {
    debug_assert!(den != 0);
    if num == 0 {
        return Rational(Repr::Small { num: 0, den: 1 });
    }
    let g = gcd_u128(num.unsigned_abs(), den);
    let n = num / g as i128;
    let d = den / g;
    if n.unsigned_abs() <= SMALL_LIM as u128 && d <= SMALL_LIM as u128 {
        Rational(Repr::Small {
            num: n as i64,
            den: d as u64,
        })
    } else {
        let br = BigRational::new(BigInt::from(n), BigInt::from(d as i128));
        Rational(Repr::Big(Box::new(br)))
    }
}

fn canonical_big(br: BigRational) -> Rational {
    // BigRational::new already reduced; demote when it fits the fast path.
    if let (Some(n), Some(d)) = (br.numer().to_i128(), br.denom().to_u128()) {
        if n.unsigned_abs() <= SMALL_LIM as u128 && d <= SMALL_LIM as u128 {
            return Rational(Repr::Small {
                num: n as i64,
                den: d as u64,
            });
        }
    }
    Rational(Repr::Big(Box::new(br)))
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small { num: 0, den: 1 })
    }

    pub fn one() -> Self {
        Rational(Repr::Small { num: 1, den: 1 })
    }

    /// `num / den` in canonical form. `den` must be nonzero.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let (n, d) = if den < 0 {
            (-(num as i128), (den as i128).unsigned_abs())
        } else {
            (num as i128, den as u128)
        };
        make_small_or_big(n, d)
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Repr::Small { num: n, den: 1 })
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        canonical_big(BigRational::new(num, den))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => {
                BigRational::new_raw(BigInt::from(*num), BigInt::from(*den))
            }
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small { num: 1, den: 1 })
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => *num < 0,
            Repr::Big(b) => b.numer().is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => *num > 0,
            Repr::Big(b) => b.numer().is_positive(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Integer value when the denominator is 1.
    pub fn to_integer(&self) -> Option<BigInt> {
        match &self.0 {
            Repr::Small { num, den: 1 } => Some(BigInt::from(*num)),
            Repr::Small { .. } => None,
            Repr::Big(b) => b.is_integer().then(|| b.numer().clone()),
        }
    }

    pub fn floor_int(&self) -> BigInt {
        self.to_big().floor().numer().clone()
    }

    pub fn ceil_int(&self) -> BigInt {
        self.to_big().ceil().numer().clone()
    }

    /// Nonnegative integer power, exact.
    pub fn pow_u64(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Rational::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Rounded double, for rendering only. Large magnitudes saturate to
    /// infinity, tiny ones flush toward zero, matching f64 semantics.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small { num, den } => *num as f64 / *den as f64,
            Repr::Big(b) => {
                let nf = big_to_f64(b.numer());
                let df = big_to_f64(b.denom());
                if nf.is_finite() && df.is_finite() && df != 0.0 {
                    nf / df
                } else {
                    // scale via bit lengths
                    let nb = b.numer().magnitude().bits() as i64;
                    let db = b.denom().magnitude().bits() as i64;
                    let sign = if b.numer().is_negative() { -1.0 } else { 1.0 };
                    let top_n = top_f64(b.numer().magnitude());
                    let top_d = top_f64(b.denom().magnitude());
                    let shift = (nb - 64) - (db - 64);
                    sign * (top_n / top_d) * pow2_f64(shift)
                }
            }
        }
    }

    /// Natural log as f64; requires a positive value. Robust for magnitudes
    /// far outside the f64 range (used by the decay diagnostics).
    pub fn ln_f64(&self) -> f64 {
        assert!(self.is_positive(), "ln of non-positive rational");
        match &self.0 {
            Repr::Small { num, den } => (*num as f64).ln() - (*den as f64).ln(),
            Repr::Big(b) => {
                ln_biguint(b.numer().magnitude()) - ln_biguint(b.denom().magnitude())
            }
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

fn top_f64(mag: &BigUint) -> f64 {
    let bits = mag.bits();
    if bits <= 64 {
        return mag.to_u64().unwrap_or(0) as f64;
    }
    let shifted: BigUint = mag >> (bits - 64);
    shifted.to_u64().unwrap_or(u64::MAX) as f64
}

fn pow2_f64(e: i64) -> f64 {
    if e > 2000 {
        f64::INFINITY
    } else if e < -2000 {
        0.0
    } else {
        (e as f64 * std::f64::consts::LN_2).exp()
    }
}

fn ln_biguint(mag: &BigUint) -> f64 {
    let bits = mag.bits();
    if bits <= 63 {
        return (mag.to_u64().unwrap() as f64).ln();
    }
    let top: BigUint = mag >> (bits - 63);
    (top.to_u64().unwrap() as f64).ln() + (bits - 63) as f64 * std::f64::consts::LN_2
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Rational {}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: n1, den: d1 }, Repr::Small { num: n2, den: d2 }) => {
                let lhs = *n1 as i128 * *d2 as i128;
                let rhs = *n2 as i128 * *d1 as i128;
                lhs.cmp(&rhs)
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl std::hash::Hash for Rational {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        // canonical form guarantees equal values share a representation
        match &self.0 {
            Repr::Small { num, den } => {
                state.write_u8(0);
                num.hash(state);
                den.hash(state);
            }
            Repr::Big(b) => {
                state.write_u8(1);
                b.numer().hash(state);
                b.denom().hash(state);
            }
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational::$method(self, rhs)
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational::$method(&self, &rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational::$method(&self, rhs)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational::$method(self, &rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Rational {
    fn add(lhs: &Rational, rhs: &Rational) -> Rational {
        match (&lhs.0, &rhs.0) {
            (Repr::Small { num: n1, den: d1 }, Repr::Small { num: n2, den: d2 }) => {
                let num = *n1 as i128 * *d2 as i128 + *n2 as i128 * *d1 as i128;
                let den = *d1 as u128 * *d2 as u128;
                make_small_or_big(num, den)
            }
            _ => canonical_big(lhs.to_big() + rhs.to_big()),
        }
    }

    fn sub(lhs: &Rational, rhs: &Rational) -> Rational {
        match (&lhs.0, &rhs.0) {
            (Repr::Small { num: n1, den: d1 }, Repr::Small { num: n2, den: d2 }) => {
                let num = *n1 as i128 * *d2 as i128 - *n2 as i128 * *d1 as i128;
                let den = *d1 as u128 * *d2 as u128;
                make_small_or_big(num, den)
            }
            _ => canonical_big(lhs.to_big() - rhs.to_big()),
        }
    }

    fn mul(lhs: &Rational, rhs: &Rational) -> Rational {
        match (&lhs.0, &rhs.0) {
            (Repr::Small { num: n1, den: d1 }, Repr::Small { num: n2, den: d2 }) => {
                let num = *n1 as i128 * *n2 as i128;
                let den = *d1 as u128 * *d2 as u128;
                make_small_or_big(num, den)
            }
            _ => canonical_big(lhs.to_big() * rhs.to_big()),
        }
    }

    fn div(lhs: &Rational, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        match (&lhs.0, &rhs.0) {
            (Repr::Small { num: n1, den: d1 }, Repr::Small { num: n2, den: d2 }) => {
                let num = *n1 as i128 * *d2 as i128 * if *n2 < 0 { -1 } else { 1 };
                let den = *d1 as u128 * n2.unsigned_abs() as u128;
                make_small_or_big(num, den)
            }
            _ => canonical_big(lhs.to_big() / rhs.to_big()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self.0 {
            Repr::Small { num, den } => Rational(Repr::Small { num: -num, den }),
            Repr::Big(b) => canonical_big(-*b),
        }
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -self.clone()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        if n <= i64::MAX as u64 {
            Rational::from_integer(n as i64)
        } else {
            Rational::from_big(BigInt::from(n), BigInt::from(1))
        }
    }
}

impl From<u32> for Rational {
    fn from(n: u32) -> Self {
        Rational::from_integer(n as i64)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_integer(n as i64)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_big(n, BigInt::from(1))
    }
}

impl fmt::Display for Rational {
    /// Canonical `p/q` form, lowest terms, `q > 0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p/q` and bare integers `p`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidSpec(format!("malformed rational {s:?}"));
        let s = s.trim();
        let (np, dp) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let num = BigInt::from_str(np).map_err(|_| bad())?;
        let den = match dp {
            Some(d) => BigInt::from_str(d).map_err(|_| bad())?,
            None => BigInt::from(1),
        };
        if den.is_zero() {
            return Err(Error::InvalidSpec(format!("zero denominator in {s:?}")));
        }
        Ok(Rational::from_big(num, den))
    }
}

impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Convenience constructor used throughout tests: `rat(1, 3)` is 1/3.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_form() {
        assert_eq!(rat(2, 4), rat(1, 2));
        assert_eq!(rat(-2, -4), rat(1, 2));
        assert_eq!(rat(2, -4), rat(-1, 2));
        assert_eq!(rat(0, -7), Rational::zero());
        assert_eq!(rat(1, 2).to_string(), "1/2");
        assert_eq!(rat(-3, 9).to_string(), "-1/3");
        assert_eq!(rat(5, 1).to_string(), "5/1");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["1/3", "-7/2", "0/1", "12345678901234567/987654321"] {
            let r: Rational = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        let r: Rational = "42".parse().unwrap();
        assert_eq!(r, rat(42, 1));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x/2".parse::<Rational>().is_err());
    }

    #[test]
    fn big_promotion_and_demotion() {
        let big = rat(1, 3).pow_u64(100); // way past the word-size fast path
        assert_eq!(big.numer(), BigInt::from(1));
        let back = &big * &rat(3, 1).pow_u64(100);
        assert!(back.is_one());
        assert!(matches!(back.0, Repr::Small { .. }));
    }

    #[test]
    fn ln_of_tiny_values() {
        let tiny = rat(1, 3).pow_u64(200);
        let expect = -200.0 * 3.0_f64.ln();
        assert!((tiny.ln_f64() - expect).abs() < 1e-6 * expect.abs());
    }

    #[test]
    fn f64_of_extreme_values() {
        assert_eq!(rat(1, 2).to_f64(), 0.5);
        let huge = rat(10, 1).pow_u64(400);
        assert_eq!(huge.to_f64(), f64::INFINITY);
        let tiny = rat(1, 10).pow_u64(400);
        assert_eq!(tiny.to_f64(), 0.0);
        let mid = rat(1, 3).pow_u64(50);
        let expect = (1.0f64 / 3.0).powi(50);
        assert!((mid.to_f64() - expect).abs() <= 1e-12 * expect);
    }

    fn arb_rat() -> impl Strategy<Value = Rational> {
        (any::<i64>(), 1i64..=i64::MAX).prop_map(|(n, d)| Rational::new(n % 100_000, d % 100_000 + 1))
    }

    proptest! {
        // exactness oracle: every op agrees with BigRational arithmetic
        #[test]
        fn matches_bigrational(a in arb_rat(), b in arb_rat()) {
            let (ba, bb) = (a.to_big(), b.to_big());
            prop_assert_eq!((&a + &b).to_big(), &ba + &bb);
            prop_assert_eq!((&a - &b).to_big(), &ba - &bb);
            prop_assert_eq!((&a * &b).to_big(), &ba * &bb);
            if !b.is_zero() {
                prop_assert_eq!((&a / &b).to_big(), &ba / &bb);
            }
            prop_assert_eq!(a.cmp(&b), ba.cmp(&bb));
        }

        #[test]
        fn field_identities(a in arb_rat(), b in arb_rat(), c in arb_rat()) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            if !a.is_zero() {
                prop_assert!((&a / &a).is_one());
            }
        }
    }
}

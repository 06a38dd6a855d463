//! Exact rational and dyadic-string arithmetic.
//!
//! Every comparison in the crate goes through [`Rational`]; nothing here
//! touches floating point.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LabError, Result};

/// Arbitrary-precision rational in canonical form (reduced, positive denominator).
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

/// `2^-k` as a rational.
pub fn two_pow_neg(k: u64) -> Rational {
    Rational::new_raw(BigInt::one(), pow2(k))
}

/// `2^e` for a possibly negative exponent.
pub fn two_pow(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(pow2(e as u64))
    } else {
        two_pow_neg(e.unsigned_abs())
    }
}

pub fn is_dyadic(q: &Rational) -> bool {
    q.denom().magnitude().count_ones() == 1
}

fn in_unit_interval(q: &Rational) -> bool {
    !q.is_negative() && q < &Rational::one()
}

/// `|q|`: length of the unique `sigma` ending in `1` with `q = 0.sigma`, and 0 for `q = 0`.
pub fn dyadic_length(q: &Rational) -> Result<u64> {
    if !in_unit_interval(q) {
        return Err(LabError::Domain(format!("{q} is outside [0,1)")));
    }
    if !is_dyadic(q) {
        return Err(LabError::Domain(format!("{q} is not dyadic")));
    }
    if q.is_zero() {
        return Ok(0);
    }
    // reduced with odd numerator, so the denominator is exactly 2^|q|
    Ok(q.denom().magnitude().bits() - 1)
}

/// `|q|` for dyadic `q` in `[0,1)`; every other rational is first mapped to
/// `truncate(max(q,0), precision)`, and `q >= 1` is charged the full precision.
pub fn effective_length(q: &Rational, precision: u64) -> u64 {
    if let Ok(len) = dyadic_length(q) {
        return len;
    }
    if q.is_negative() {
        0
    } else if q >= &Rational::one() {
        precision
    } else {
        truncate(q, precision)
            .map(|s| s.canonical().len() as u64)
            .unwrap_or(precision)
    }
}

/// Smallest integer `k` with `2^k >= x`, for `x > 0`.
pub fn ceil_log2(x: &Rational) -> Result<i64> {
    if !x.is_positive() {
        return Err(LabError::Domain(format!("log2 of non-positive {x}")));
    }
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    // start from the bit-length estimate and correct by at most a step each way
    let mut k = num.bits() as i64 - den.bits() as i64;
    while two_pow(k) < *x {
        k += 1;
    }
    while two_pow(k - 1) >= *x {
        k -= 1;
    }
    Ok(k)
}

/// Finite binary string.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    pub fn empty() -> Self {
        Bits(Vec::new())
    }

    /// The `width`-bit big-endian representation of `value`; `value < 2^width` is required.
    pub fn from_uint(value: &BigUint, width: usize) -> Self {
        debug_assert!(value.bits() as usize <= width);
        Bits((0..width).map(|i| value.bit((width - 1 - i) as u64)).collect())
    }

    pub fn to_uint(&self) -> BigUint {
        let mut v = BigUint::zero();
        for &b in &self.0 {
            v <<= 1u32;
            if b {
                v += 1u32;
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn is_proper_prefix_of(&self, other: &Bits) -> bool {
        self.len() < other.len() && other.0.starts_with(&self.0)
    }

    pub fn concat(&self, tail: &Bits) -> Bits {
        let mut v = self.0.clone();
        v.extend_from_slice(&tail.0);
        Bits(v)
    }

    /// `0.self` as a rational.
    pub fn fraction_value(&self) -> Rational {
        Rational::new(
            BigInt::from_biguint(Sign::Plus, self.to_uint()),
            pow2(self.len() as u64),
        )
    }

    /// All strings of length `n` in lexicographic order.
    pub fn all_of_length(n: usize) -> impl Iterator<Item = Bits> {
        assert!(n < 64, "enumeration of 2^{n} strings is out of range");
        (0u64..(1u64 << n)).map(move |k| Bits::from_uint(&BigUint::from(k), n))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Bits {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(LabError::Parse(format!("{s:?} is not a binary string"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A binary string `sigma` read as the dyadic rational `0.sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicString {
    pub bits: Bits,
}

impl DyadicString {
    pub fn value(&self) -> Rational {
        self.bits.fraction_value()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Same value with trailing zeros removed.
    pub fn canonical(&self) -> DyadicString {
        let end = self
            .bits
            .as_slice()
            .iter()
            .rposition(|&b| b)
            .map_or(0, |i| i + 1);
        DyadicString {
            bits: Bits::new(self.bits.as_slice()[..end].to_vec()),
        }
    }
}

impl fmt::Display for DyadicString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0.{}", self.bits)
    }
}

/// `x` cut to its first `n` binary digits: the `n`-bit string of `floor(x 2^n) 2^-n`.
pub fn truncate(x: &Rational, n: u64) -> Result<DyadicString> {
    if !in_unit_interval(x) {
        return Err(LabError::Domain(format!("cannot truncate {x} outside [0,1)")));
    }
    let scaled = (x.numer() << n).div_floor(x.denom());
    let magnitude = scaled
        .to_biguint()
        .expect("floor of a non-negative value is non-negative");
    Ok(DyadicString {
        bits: Bits::from_uint(&magnitude, n as usize),
    })
}

/// Partial sum `sum_{i<n, i in A} 2^-(i+1)` of `0.A(0)A(1)...`.
pub fn real_from_set(member: impl Fn(u64) -> bool, n: u64) -> Rational {
    let mut acc = BigInt::zero();
    for i in 0..n {
        acc <<= 1u32;
        if member(i) {
            acc += 1;
        }
    }
    Rational::new(acc, pow2(n))
}

/// Parses `"num/den"` or `"num"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || LabError::Parse(format!("{s:?} is not a rational of the form num/den"));
    let (num, den) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(LabError::Parse(format!("{s:?} has zero denominator")));
    }
    Ok(Rational::new(num, den))
}

pub fn to_u64(q: &BigInt) -> Option<u64> {
    q.to_u64()
}

/// Serde wire form of a rational: `{"num": "...", "den": "..."}` with decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct JsonRational(pub Rational);

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: String,
    den: String,
}

impl Serialize for JsonRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RationalRepr {
            num: self.0.numer().to_string(),
            den: self.0.denom().to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for JsonRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = RationalRepr::deserialize(deserializer)?;
        parse_rational(&format!("{}/{}", repr.num, repr.den))
            .map(JsonRational)
            .map_err(serde::de::Error::custom)
    }
}

impl From<Rational> for JsonRational {
    fn from(q: Rational) -> Self {
        JsonRational(q)
    }
}

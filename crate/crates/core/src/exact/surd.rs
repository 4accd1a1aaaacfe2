//! Finite sums `Σ q_m √m` over squarefree radicands `m` with rational `q_m`.
//!
//! Square roots of distinct squarefree integers are linearly independent over
//! the rationals, so the canonical term map is a unique representation: two
//! values are equal iff their maps are equal, and a value is zero iff the map
//! is empty. Signs are not a rational computation; they are decided by
//! integer interval enclosures refined until the interval excludes zero.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::rational::Rational;
use super::ExactError;

/// Default cap on the number of distinct primes under the radicals of a
/// divisor; each prime costs one conjugation, which can double the term count.
pub const DEFAULT_RADICAL_LIMIT: usize = 8;

/// Trial-division bound used when extracting the square part of a rational.
const SQRT_PRIME_BOUND: u64 = 10_000;

/// Exact element of the multi-quadratic field generated by square roots of
/// integers.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "SurdRepr", into = "SurdRepr")]
pub struct SurdValue {
    terms: BTreeMap<u64, Rational>,
}

/// Splits `m` into `(s, r)` with `m = s² r` and `r` squarefree.
pub fn square_split(m: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut r = 1u64;
    let mut rest = m;
    let mut p = 2u64;
    while p * p <= rest {
        let mut count = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            count += 1;
        }
        for _ in 0..count / 2 {
            s *= p;
        }
        if count % 2 == 1 {
            r *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (s, r * rest)
}

fn prime_factors(m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rest = m;
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            out.push(p);
            while rest.is_multiple_of(p) {
                rest /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        out.push(rest);
    }
    out
}

impl SurdValue {
    pub fn zero() -> Self {
        SurdValue { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut v = Self::zero();
        v.add_term(1, q);
        v
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `√m` for any nonnegative integer, with square factors pulled out.
    pub fn sqrt(m: u64) -> Self {
        Self::term(Rational::one(), m)
    }

    /// `q √m` for any nonnegative integer `m`.
    pub fn term(q: Rational, m: u64) -> Self {
        let mut v = Self::zero();
        if m == 0 {
            return v;
        }
        let (s, r) = square_split(m);
        v.add_term(r, q * Rational::from_integer(BigInt::from(s)));
        v
    }

    /// Builds a value from arbitrary `(radicand, coefficient)` pairs,
    /// reducing radicands and merging duplicates.
    pub fn from_terms<I: IntoIterator<Item = (u64, Rational)>>(terms: I) -> Self {
        let mut v = Self::zero();
        for (m, q) in terms {
            v += Self::term(q, m);
        }
        v
    }

    /// Square root of a nonnegative rational, if it is a single surd term.
    ///
    /// Fails when a cofactor with no prime below the trial bound is left that
    /// is not itself a perfect square.
    pub fn sqrt_rational(q: &Rational) -> Result<Self, ExactError> {
        if q.is_negative() {
            return Err(ExactError::NegativeSqrt);
        }
        if q.is_zero() {
            return Ok(Self::zero());
        }
        // √(a/b) = √(ab)/b
        let b = q.denom().clone();
        let mut rest = q.numer() * &b;
        let mut outside = BigInt::one();
        let mut inside = 1u64;
        let mut p = 2u64;
        let mut exhausted = false;
        while p <= SQRT_PRIME_BOUND {
            let bp = BigInt::from(p);
            if &bp * &bp > rest {
                exhausted = true;
                break;
            }
            let mut count = 0u32;
            loop {
                let (quot, rem) = rest.div_rem(&bp);
                if !rem.is_zero() {
                    break;
                }
                rest = quot;
                count += 1;
            }
            outside *= num_traits::pow(bp, (count / 2) as usize);
            if count % 2 == 1 {
                inside = inside.checked_mul(p).ok_or(ExactError::RadicandOverflow)?;
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if !rest.is_one() {
            if exhausted {
                // every factor below √rest was removed, so rest is prime
                let r = rest.to_u64().ok_or(ExactError::RadicandOverflow)?;
                inside = inside.checked_mul(r).ok_or(ExactError::RadicandOverflow)?;
            } else {
                let root = rest.sqrt();
                if &root * &root != rest {
                    return Err(ExactError::NotRepresentable);
                }
                outside *= root;
            }
        }
        Ok(Self::term(Rational::new(outside, b), inside))
    }

    fn add_term(&mut self, m: u64, q: Rational) {
        if q.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(q);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += q;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Terms in ascending radicand order; radicand 1 is the rational part.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(m, q)| (*m, q))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&m| m == 1)
    }

    /// The value as a rational, if it has no irrational part.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&1).cloned(),
            _ => None,
        }
    }

    /// Coefficient of `√m` (`m` squarefree), zero if absent.
    pub fn coefficient(&self, m: u64) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Distinct primes appearing under any radical.
    pub fn radical_primes(&self) -> Vec<u64> {
        let mut primes: Vec<u64> = self.terms.keys().flat_map(|&m| prime_factors(m)).collect();
        primes.sort_unstable();
        primes.dedup();
        primes
    }

    /// Multiplies by a rational.
    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        SurdValue { terms: self.terms.iter().map(|(m, c)| (*m, c * q)).collect() }
    }

    /// Re-canonicalizes the term map. Values built through the public API are
    /// already canonical, so this is the identity on them.
    pub fn canonical(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, q)| (*m, q.clone())))
    }

    fn add_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, q) in &other.terms {
            out.add_term(*m, q.clone());
        }
        out
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, p) in &self.terms {
            for (b, q) in &other.terms {
                // a, b squarefree: √a√b = g √((a/g)(b/g)), the latter squarefree
                let g = a.gcd(b);
                let rad = (a / g).checked_mul(b / g).expect("radicand overflow in surd product");
                out.add_term(rad, p * q * Rational::from_integer(BigInt::from(g)));
            }
        }
        out
    }

    /// Exact quotient with the default radical limit.
    pub fn checked_div(&self, divisor: &Self) -> Result<Self, ExactError> {
        self.div_with_limit(divisor, DEFAULT_RADICAL_LIMIT)
    }

    /// Exact quotient. The divisor is rationalized by multiplying through with
    /// the conjugate that flips the sign of one prime radical at a time.
    pub fn div_with_limit(&self, divisor: &Self, radical_limit: usize) -> Result<Self, ExactError> {
        if divisor.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if let Some(q) = divisor.as_rational() {
            return Ok(self.scale(&q.recip()));
        }
        let primes = divisor.radical_primes();
        if primes.len() > radical_limit {
            return Err(ExactError::RadicalLimit { limit: radical_limit, found: primes.len() });
        }
        let mut num = self.clone();
        let mut den = divisor.clone();
        while let Some(&p) = den.radical_primes().first() {
            let conj = SurdValue {
                terms: den.terms.iter().map(|(m, q)| (*m, if m % p == 0 { -q.clone() } else { q.clone() })).collect(),
            };
            num = num.mul_ref(&conj);
            den = den.mul_ref(&conj);
        }
        let q = den.as_rational().expect("conjugation leaves a rational divisor");
        Ok(num.scale(&q.recip()))
    }

    pub fn recip(&self) -> Result<Self, ExactError> {
        Self::one().checked_div(self)
    }

    pub fn square(&self) -> Self {
        self.mul_ref(self)
    }

    /// Integer bounds `(lo, hi)` with `lo ≤ self·2^bits ≤ hi`.
    pub fn enclosure(&self, bits: u32) -> (BigInt, BigInt) {
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (m, q) in &self.terms {
            let scaled = BigInt::from(*m) << (2 * bits as usize);
            let s_lo = scaled.sqrt();
            let s_hi = if &s_lo * &s_lo == scaled { s_lo.clone() } else { &s_lo + 1 };
            let (a, b) = (q.numer(), q.denom());
            let (x_lo, x_hi) = if a.is_negative() { (a * &s_hi, a * &s_lo) } else { (a * &s_lo, a * &s_hi) };
            lo += x_lo.div_floor(b);
            hi += x_hi.div_ceil(b);
        }
        (lo, hi)
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        if let Some(q) = self.as_rational() {
            return if q.is_positive() { 1 } else { -1 };
        }
        let mut bits = 64;
        loop {
            let (lo, hi) = self.enclosure(bits);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            bits *= 2;
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Rational approximation within `2^-bits`.
    pub fn approx_rational(&self, bits: u32) -> Rational {
        if let Some(q) = self.as_rational() {
            return q;
        }
        let (lo, hi) = self.enclosure(bits);
        Rational::new(lo + hi, BigInt::one() << (bits as usize + 1))
    }

    /// Nearest double, accurate to well below one ulp.
    pub fn to_f64(&self) -> f64 {
        if let Some(q) = self.as_rational() {
            return q.to_f64().unwrap_or(f64::NAN);
        }
        let mut bits = 96u32;
        loop {
            let (lo, hi) = self.enclosure(bits);
            let width = &hi - &lo;
            let tight = (width << 64usize) <= lo.abs().min(hi.abs());
            if tight || bits >= 8192 {
                return Rational::new(lo + hi, BigInt::one() << (bits as usize + 1)).to_f64().unwrap_or(f64::NAN);
            }
            bits += 96;
        }
    }

    /// Fixed-point decimal with `digits` places after the point, rounded half
    /// to even. Ties can only occur for rational values, which are rounded
    /// exactly; irrational values are refined until the rounding is certain.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let ten_d = num_traits::pow(BigInt::from(10), digits);
        let rounded = match self.as_rational() {
            Some(q) => round_half_even(&(q * Rational::from_integer(ten_d))),
            None => {
                let scaled = self.scale(&Rational::from_integer(ten_d));
                let mut bits = 64u32;
                loop {
                    let (lo, hi) = scaled.enclosure(bits);
                    let half = BigInt::one() << (bits as usize - 1);
                    let r_lo = (lo + &half) >> bits as usize;
                    let r_hi = (hi + &half) >> bits as usize;
                    if r_lo == r_hi {
                        break r_lo;
                    }
                    bits *= 2;
                }
            }
        };
        format_fixed(&rounded, digits)
    }
}

fn round_half_even(x: &Rational) -> BigInt {
    let fl = x.floor().to_integer();
    let frac = x - Rational::from_integer(fl.clone());
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    match frac.cmp(&half) {
        Ordering::Less => fl,
        Ordering::Greater => fl + 1,
        Ordering::Equal => {
            if fl.is_even() {
                fl
            } else {
                fl + 1
            }
        }
    }
}

fn format_fixed(value: &BigInt, digits: usize) -> String {
    let negative = value.sign() == Sign::Minus;
    let mut s = value.abs().to_string();
    if digits > 0 {
        if s.len() <= digits {
            s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
        }
        s.insert(s.len() - digits, '.');
    }
    if negative {
        format!("-{}", s)
    } else {
        s
    }
}

impl PartialOrd for SurdValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SurdValue {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl From<Rational> for SurdValue {
    fn from(q: Rational) -> Self {
        Self::from_rational(q)
    }
}

impl From<i64> for SurdValue {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&SurdValue> for &SurdValue {
            type Output = SurdValue;
            fn $method(self, rhs: &SurdValue) -> SurdValue {
                let f: fn(&SurdValue, &SurdValue) -> SurdValue = $body;
                f(self, rhs)
            }
        }
        impl $tr<SurdValue> for SurdValue {
            type Output = SurdValue;
            fn $method(self, rhs: SurdValue) -> SurdValue {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&SurdValue> for SurdValue {
            type Output = SurdValue;
            fn $method(self, rhs: &SurdValue) -> SurdValue {
                (&self).$method(rhs)
            }
        }
        impl $tr<SurdValue> for &SurdValue {
            type Output = SurdValue;
            fn $method(self, rhs: SurdValue) -> SurdValue {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_ref(b));
binop!(Sub, sub, |a, b| a.add_ref(&-b.clone()));
binop!(Mul, mul, |a, b| a.mul_ref(b));

impl Neg for SurdValue {
    type Output = SurdValue;
    fn neg(self) -> SurdValue {
        SurdValue { terms: self.terms.into_iter().map(|(m, q)| (m, -q)).collect() }
    }
}

impl Neg for &SurdValue {
    type Output = SurdValue;
    fn neg(self) -> SurdValue {
        -self.clone()
    }
}

impl AddAssign<&SurdValue> for SurdValue {
    fn add_assign(&mut self, rhs: &SurdValue) {
        for (m, q) in &rhs.terms {
            self.add_term(*m, q.clone());
        }
    }
}

impl AddAssign for SurdValue {
    fn add_assign(&mut self, rhs: SurdValue) {
        for (m, q) in rhs.terms {
            self.add_term(m, q);
        }
    }
}

impl SubAssign<&SurdValue> for SurdValue {
    fn sub_assign(&mut self, rhs: &SurdValue) {
        for (m, q) in &rhs.terms {
            self.add_term(*m, -q.clone());
        }
    }
}

impl MulAssign<&SurdValue> for SurdValue {
    fn mul_assign(&mut self, rhs: &SurdValue) {
        *self = self.mul_ref(rhs);
    }
}

impl Zero for SurdValue {
    fn zero() -> Self {
        SurdValue::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for SurdValue {
    fn one() -> Self {
        SurdValue::one()
    }
}

impl Sum for SurdValue {
    fn sum<I: Iterator<Item = SurdValue>>(iter: I) -> Self {
        iter.fold(SurdValue::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

impl<'a> Sum<&'a SurdValue> for SurdValue {
    fn sum<I: Iterator<Item = &'a SurdValue>>(iter: I) -> Self {
        iter.fold(SurdValue::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

impl fmt::Display for SurdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, q)) in self.terms.iter().enumerate() {
            let mag = q.abs();
            if k == 0 {
                if q.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if q.is_negative() { '-' } else { '+' })?;
            }
            match (*m, mag.is_one()) {
                (1, _) => write!(f, "{}", mag)?,
                (m, true) => write!(f, "sqrt({})", m)?,
                (m, false) => write!(f, "{}*sqrt({})", mag, m)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SurdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SurdValue({})", self)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    rad: u64,
    num: String,
    den: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurdRepr {
    terms: Vec<TermRepr>,
}

impl From<SurdValue> for SurdRepr {
    fn from(v: SurdValue) -> Self {
        SurdRepr {
            terms: v
                .terms
                .into_iter()
                .map(|(rad, q)| TermRepr { rad, num: q.numer().to_string(), den: q.denom().to_string() })
                .collect(),
        }
    }
}

impl TryFrom<SurdRepr> for SurdValue {
    type Error = ExactError;

    fn try_from(repr: SurdRepr) -> Result<Self, Self::Error> {
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            if t.rad == 0 {
                return Err(ExactError::Parse(format!("radicand must be positive, got {}", t.rad)));
            }
            let num: BigInt = t.num.parse().map_err(|_| ExactError::Parse(t.num.clone()))?;
            let den: BigInt = t.den.parse().map_err(|_| ExactError::Parse(t.den.clone()))?;
            if !den.is_positive() {
                return Err(ExactError::Parse(format!("denominator must be positive, got {}", den)));
            }
            terms.push((t.rad, Rational::new(num, den)));
        }
        Ok(SurdValue::from_terms(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};

    fn s(q: Rational, m: u64) -> SurdValue {
        SurdValue::term(q, m)
    }

    #[test]
    fn additive_inverse() {
        let x = s(int(2), 3);
        assert!((x.clone() + s(int(-2), 3)).is_zero());
        assert!((&x - &x).is_zero());
    }

    #[test]
    fn square_extraction() {
        assert_eq!(SurdValue::sqrt(3) * SurdValue::sqrt(3), SurdValue::from_integer(3));
        assert_eq!(SurdValue::sqrt(15) * SurdValue::sqrt(35), s(int(5), 21));
        assert_eq!(SurdValue::sqrt(12), s(int(2), 3));
        assert_eq!(SurdValue::sqrt(1), SurdValue::one());
        assert!(SurdValue::sqrt(0).is_zero());
    }

    #[test]
    fn division_examples() {
        let one = SurdValue::one();
        assert_eq!(one.checked_div(&SurdValue::sqrt(3)).unwrap(), s(rat(1, 3), 3));
        let a = SurdValue::one() + SurdValue::sqrt(3);
        assert_eq!(a.checked_div(&a).unwrap(), one);
        let expected = SurdValue::from_rational(rat(-1, 2)) + s(rat(1, 2), 3);
        assert_eq!(one.checked_div(&a).unwrap(), expected);
        assert_eq!(one.checked_div(&SurdValue::zero()), Err(ExactError::DivisionByZero));
    }

    #[test]
    fn division_multi_prime() {
        let d = SurdValue::from_integer(2) + SurdValue::sqrt(3) + s(rat(1, 2), 5) - SurdValue::sqrt(7);
        let x = s(int(3), 35) + SurdValue::from_integer(1);
        let q = x.checked_div(&d).unwrap();
        assert_eq!(q * d, x);
    }

    #[test]
    fn radical_limit_enforced() {
        let d = SurdValue::one() + SurdValue::sqrt(3) + SurdValue::sqrt(5);
        assert_eq!(SurdValue::one().div_with_limit(&d, 1), Err(ExactError::RadicalLimit { limit: 1, found: 2 }));
        assert!(SurdValue::one().div_with_limit(&d, 2).is_ok());
        // rational divisors never need conjugation
        assert!(SurdValue::sqrt(3).div_with_limit(&SurdValue::from_integer(2), 0).is_ok());
    }

    #[test]
    fn signs_of_near_cancelling_sums() {
        // √2 + √3 - √10 ≈ -0.0165
        let x = SurdValue::sqrt(2) + SurdValue::sqrt(3) - SurdValue::sqrt(10);
        assert_eq!(x.signum(), -1);
        // 1 - 99/70·... : √2 - 99/70 < 0 (99/70 = 1.41428…)
        let y = SurdValue::sqrt(2) - SurdValue::from_rational(rat(99, 70));
        assert_eq!(y.signum(), -1);
        let z = SurdValue::sqrt(2) - SurdValue::from_rational(rat(140, 99));
        assert_eq!(z.signum(), 1);
        assert!(SurdValue::sqrt(5) > SurdValue::from_integer(2));
        assert_eq!(SurdValue::zero().signum(), 0);
    }

    #[test]
    fn sqrt_of_rationals() {
        assert_eq!(SurdValue::sqrt_rational(&rat(3, 4)).unwrap(), s(rat(1, 2), 3));
        assert_eq!(SurdValue::sqrt_rational(&rat(1, 2)).unwrap(), s(rat(1, 2), 2));
        assert_eq!(SurdValue::sqrt_rational(&rat(49, 36)).unwrap(), SurdValue::from_rational(rat(7, 6)));
        assert_eq!(SurdValue::sqrt_rational(&int(-1)), Err(ExactError::NegativeSqrt));
        // a large prime cofactor is still resolved below the bound squared
        assert_eq!(SurdValue::sqrt_rational(&int(10007)).unwrap(), SurdValue::sqrt(10007));
    }

    #[test]
    fn floats_and_decimals() {
        assert!((SurdValue::sqrt(2).to_f64() - std::f64::consts::SQRT_2).abs() < 1e-16);
        assert_eq!(SurdValue::sqrt(2).to_decimal_string(5), "1.41421");
        assert_eq!(s(int(-1), 3).to_decimal_string(3), "-1.732");
        // ties: round half to even
        assert_eq!(SurdValue::from_rational(rat(1, 8)).to_decimal_string(2), "0.12");
        assert_eq!(SurdValue::from_rational(rat(3, 8)).to_decimal_string(2), "0.38");
        assert_eq!(SurdValue::from_rational(rat(-5, 2)).to_decimal_string(0), "-2");
        assert_eq!(SurdValue::from_rational(rat(1, 2)).to_decimal_string(4), "0.5000");
        assert_eq!(SurdValue::zero().to_decimal_string(2), "0.00");
        let long = SurdValue::sqrt(7).to_decimal_string(50);
        assert_eq!(long, "2.64575131106459059050161575363926042571025918308245");
    }

    #[test]
    fn display_and_json() {
        let x = SurdValue::from_rational(rat(-1, 2)) + s(rat(1, 2), 3);
        assert_eq!(x.to_string(), "-1/2 + 1/2*sqrt(3)");
        assert_eq!(s(rat(-1, 8), 7).to_string(), "-1/8*sqrt(7)");
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"terms":[{"rad":1,"num":"-1","den":"2"},{"rad":3,"num":"1","den":"2"}]}"#);
        let back: SurdValue = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        let bad = r#"{"terms":[{"rad":3,"num":"1","den":"0"}]}"#;
        assert!(serde_json::from_str::<SurdValue>(bad).is_err());
        // non-canonical input is reduced on the way in
        let raw = r#"{"terms":[{"rad":12,"num":"1","den":"2"}]}"#;
        assert_eq!(serde_json::from_str::<SurdValue>(raw).unwrap(), SurdValue::sqrt(3));
    }
}

//! Truncated Novikov series with non-negative rational exponents.
//!
//! A [`NSeries`] is a residue class modulo the ideal of terms with exponent
//! strictly greater than its cutoff `L`, so the `q^L` term itself is kept.
//! Coefficients and exponents are exact rationals throughout.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("cutoff mismatch: {0} vs {1}")]
    CutoffMismatch(Exponent, Exponent),
    #[error("series is not invertible: zero constant term")]
    NotInvertible,
    #[error("cannot evaluate at q = 1: series is truncated at {0}, not an exact polynomial")]
    NotExact(Exponent),
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("invalid rational: {0}")]
    InvalidRational(String),
    #[error("malformed series record: {0}")]
    Malformed(String),
}

/// A non-negative exact rational exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent(BigRational);

impl Exponent {
    pub fn zero() -> Self {
        Exponent(BigRational::zero())
    }

    pub fn from_int(k: u64) -> Self {
        Exponent(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn new(num: i64, den: i64) -> Result<Self, SeriesError> {
        if den == 0 {
            return Err(SeriesError::InvalidExponent(format!("{num}/{den}")));
        }
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Result<Self, SeriesError> {
        if r.is_negative() {
            return Err(SeriesError::InvalidExponent(r.to_string()));
        }
        Ok(Exponent(r))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The exponent as a machine integer when it is integral and small.
    pub fn as_u64(&self) -> Option<u64> {
        if self.0.is_integer() {
            self.0.to_integer().to_u64()
        } else {
            None
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// `self - other`, or `None` when the result would be negative.
    pub fn checked_sub(&self, other: &Exponent) -> Option<Exponent> {
        let d = &self.0 - &other.0;
        if d.is_negative() {
            None
        } else {
            Some(Exponent(d))
        }
    }

    /// Smallest integer `n` with `n * step >= self`; `step` must be positive.
    pub fn ceil_div(&self, step: &Exponent) -> u64 {
        assert!(!step.is_zero(), "ceil_div by zero step");
        (&self.0 / &step.0)
            .ceil()
            .to_integer()
            .to_u64()
            .expect("iteration bound overflow")
    }
}

impl std::ops::Add for &Exponent {
    type Output = Exponent;
    fn add(self, rhs: &Exponent) -> Exponent {
        Exponent(&self.0 + &rhs.0)
    }
}

impl std::ops::Add for Exponent {
    type Output = Exponent;
    fn add(self, rhs: Exponent) -> Exponent {
        Exponent(self.0 + rhs.0)
    }
}

impl std::iter::Sum for Exponent {
    fn sum<I: Iterator<Item = Exponent>>(iter: I) -> Self {
        iter.fold(Exponent::zero(), |a, b| a + b)
    }
}

impl<'a> std::iter::Sum<&'a Exponent> for Exponent {
    fn sum<I: Iterator<Item = &'a Exponent>>(iter: I) -> Self {
        iter.fold(Exponent::zero(), |a, b| &a + b)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Exponent {
    type Err = SeriesError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let r = parse_rational(s).map_err(|_| SeriesError::InvalidExponent(s.to_string()))?;
        Exponent::from_rational(r)
    }
}

/// Parses `"p"` or `"p/q"` into an exact rational; `q = 0` is rejected.
pub fn parse_rational(s: &str) -> Result<BigRational, SeriesError> {
    let s = s.trim();
    let bad = || SeriesError::InvalidRational(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
    }
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A Novikov series truncated above `cutoff`.
#[derive(Debug, Clone)]
pub struct NSeries {
    cutoff: Exponent,
    terms: BTreeMap<Exponent, BigRational>,
    exact: bool,
}

impl PartialEq for NSeries {
    fn eq(&self, other: &Self) -> bool {
        self.cutoff == other.cutoff && self.terms == other.terms
    }
}

impl Eq for NSeries {}

impl NSeries {
    pub fn zero(cutoff: Exponent) -> Self {
        NSeries { cutoff, terms: BTreeMap::new(), exact: true }
    }

    pub fn one(cutoff: Exponent) -> Self {
        Self::monomial(BigRational::one(), Exponent::zero(), cutoff)
    }

    /// `coeff * q^exp`, or zero when `exp` lies above the cutoff.
    pub fn monomial(coeff: BigRational, exp: Exponent, cutoff: Exponent) -> Self {
        let mut s = Self::zero(cutoff);
        if exp > s.cutoff {
            s.exact = false;
        } else if !coeff.is_zero() {
            s.terms.insert(exp, coeff);
        }
        s
    }

    /// Builds a series from arbitrary terms; like exponents are merged and
    /// terms above the cutoff are dropped.
    pub fn from_terms<I>(cutoff: Exponent, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, BigRational)>,
    {
        let mut s = Self::zero(cutoff);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// Polynomial with integer exponents `0..coeffs.len()`.
    pub fn from_int_coeffs(cutoff: Exponent, coeffs: &[i64]) -> Self {
        Self::from_terms(
            cutoff,
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| (Exponent::from_int(k as u64), BigRational::from_integer(c.into()))),
        )
    }

    fn add_term(&mut self, e: Exponent, c: BigRational) {
        if c.is_zero() {
            return;
        }
        if e > self.cutoff {
            self.exact = false;
            return;
        }
        match self.terms.entry(e) {
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

    pub fn cutoff(&self) -> &Exponent {
        &self.cutoff
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigRational)> {
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

    /// Whether the series is known to be a polynomial with its whole support
    /// represented below the cutoff.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn with_exact(mut self, exact: bool) -> Self {
        self.exact = exact;
        self
    }

    pub fn coeff(&self, e: &Exponent) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&Exponent::zero())
    }

    /// Smallest exponent carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<&Exponent> {
        self.terms.keys().next()
    }

    pub fn max_exponent(&self) -> Option<&Exponent> {
        self.terms.keys().next_back()
    }

    fn check_cutoff(&self, other: &NSeries) -> Result<(), SeriesError> {
        if self.cutoff != other.cutoff {
            return Err(SeriesError::CutoffMismatch(self.cutoff.clone(), other.cutoff.clone()));
        }
        Ok(())
    }

    pub fn add(&self, other: &NSeries) -> Result<NSeries, SeriesError> {
        self.check_cutoff(other)?;
        let mut out = self.clone();
        out.exact = self.exact && other.exact;
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &NSeries) -> Result<NSeries, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NSeries {
        NSeries {
            cutoff: self.cutoff.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            exact: self.exact,
        }
    }

    pub fn scale(&self, k: &BigRational) -> NSeries {
        if k.is_zero() {
            return NSeries { exact: self.exact, ..NSeries::zero(self.cutoff.clone()) };
        }
        NSeries {
            cutoff: self.cutoff.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
            exact: self.exact,
        }
    }

    pub fn mul(&self, other: &NSeries) -> Result<NSeries, SeriesError> {
        self.check_cutoff(other)?;
        let mut out = NSeries::zero(self.cutoff.clone());
        out.exact = self.exact && other.exact;
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if e > out.cutoff {
                    // `other` is sorted, so every later term is also above the cutoff.
                    out.exact = false;
                    break;
                }
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse modulo `q^{>cutoff}` by the geometric series on
    /// `1 - a/c0`.
    pub fn invert(&self) -> Result<NSeries, SeriesError> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let c0_inv = c0.recip();
        let one = NSeries::one(self.cutoff.clone());
        // r = 1 - a/c0 has strictly positive valuation.
        let r = one.sub(&self.scale(&c0_inv))?;
        let mut acc = one.clone();
        let mut power = one;
        loop {
            power = power.mul(&r)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        Ok(acc.scale(&c0_inv).with_exact(false))
    }

    /// Sum of the coefficients; only defined for exact polynomials.
    pub fn eval_at_one(&self) -> Result<BigRational, SeriesError> {
        if !self.exact {
            return Err(SeriesError::NotExact(self.cutoff.clone()));
        }
        Ok(self.terms.values().fold(BigRational::zero(), |a, c| a + c))
    }

    /// Substitutes `q -> -q`; every exponent must be an integer.
    pub fn substitute_neg_q(&self) -> Result<NSeries, SeriesError> {
        let mut out = self.clone();
        for (e, c) in out.terms.iter_mut() {
            let k = e.as_u64().ok_or_else(|| SeriesError::InvalidExponent(e.to_string()))?;
            if k % 2 == 1 {
                *c = -c.clone();
            }
        }
        Ok(out)
    }

    /// Reduces to a smaller cutoff.
    pub fn truncate(&self, cutoff: &Exponent) -> NSeries {
        let mut out = NSeries::zero(cutoff.clone());
        out.exact = self.exact && self.max_exponent().is_none_or(|m| m <= cutoff);
        for (e, c) in &self.terms {
            if e <= cutoff {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Serializes as `{"cutoff": [p, r], "terms": [[ep, er, cp, cr], ...]}`.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(e, c)| {
                json!([
                    int_json(e.numer()),
                    int_json(e.denom()),
                    int_json(c.numer()),
                    int_json(c.denom())
                ])
            })
            .collect();
        json!({
            "cutoff": [int_json(self.cutoff.numer()), int_json(self.cutoff.denom())],
            "terms": terms,
            "exact": self.exact,
        })
    }

    pub fn from_json(v: &Value) -> Result<NSeries, SeriesError> {
        let bad = |m: &str| SeriesError::Malformed(m.to_string());
        let cut = v.get("cutoff").and_then(Value::as_array).ok_or_else(|| bad("cutoff"))?;
        if cut.len() != 2 {
            return Err(bad("cutoff pair"));
        }
        let cutoff = Exponent::from_rational(ratio_from_json(&cut[0], &cut[1])?)?;
        let mut s = NSeries::zero(cutoff);
        let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("terms"))?;
        for t in terms {
            let q = t.as_array().filter(|q| q.len() == 4).ok_or_else(|| bad("term quadruple"))?;
            let e = Exponent::from_rational(ratio_from_json(&q[0], &q[1])?)?;
            let c = ratio_from_json(&q[2], &q[3])?;
            s.add_term(e, c);
        }
        s.exact = v.get("exact").and_then(Value::as_bool).unwrap_or(false);
        Ok(s)
    }
}

/// Integers that fit in an `i64` are emitted as JSON numbers, larger ones as
/// decimal strings.
pub(crate) fn int_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(k) => json!(k),
        None => json!(n.to_string()),
    }
}

pub(crate) fn int_from_json(v: &Value) -> Result<BigInt, SeriesError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| SeriesError::Malformed(format!("non-integer {n}"))),
        Value::String(s) => s.parse().map_err(|_| SeriesError::Malformed(s.clone())),
        other => Err(SeriesError::Malformed(other.to_string())),
    }
}

pub(crate) fn ratio_from_json(n: &Value, d: &Value) -> Result<BigRational, SeriesError> {
    let n = int_from_json(n)?;
    let d = int_from_json(d)?;
    if d.is_zero() {
        return Err(SeriesError::InvalidRational(format!("{n}/0")));
    }
    Ok(BigRational::new(n, d))
}

/// Renders as `3 - 6q + 12q^2`; rational exponents as `q^(p/r)` and
/// non-integer coefficients as `(p/r)q^k`.
impl fmt::Display for NSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let var = if e.is_zero() {
                String::new()
            } else if e.value().is_one() {
                "q".to_string()
            } else if e.is_integer() {
                format!("q^{}", e)
            } else {
                format!("q^({})", e)
            };
            if var.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{var}")?;
            } else if mag.is_integer() {
                write!(f, "{}{var}", mag.numer())?;
            } else {
                write!(f, "({}){var}", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl PartialOrd for NSeries {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self == other {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

//! A concrete nonarchimedean field at desk scale.
//!
//! Elements are finite Puiseux sums `sum c_q t^q` with rational coefficients
//! and rational exponents. The valuation of an element is its least exponent,
//! and `+inf` for zero. Finite sums are closed under `+`, `-` and `*`, which
//! is all the downstream code needs: every quantity it consumes is the
//! valuation of a difference or product of explicitly given elements.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::{parse_rational, serde_rat, Compact, Rat};

/// A valuation: an exact rational or `+inf`.
///
/// Variant order makes the derived `Ord` put every finite value below `+inf`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValQ {
    Finite(Rat),
    Infinity,
}

impl ValQ {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ValQ::Finite(q) => Some(q),
            ValQ::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ValQ::Infinity)
    }

    /// `min(self, other)`, cloned.
    pub fn min_with(&self, other: &ValQ) -> ValQ {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }
}

impl From<Rat> for ValQ {
    fn from(q: Rat) -> Self {
        ValQ::Finite(q)
    }
}

impl Add for ValQ {
    type Output = ValQ;

    fn add(self, rhs: ValQ) -> ValQ {
        match (self, rhs) {
            (ValQ::Finite(a), ValQ::Finite(b)) => ValQ::Finite(a + b),
            _ => ValQ::Infinity,
        }
    }
}

impl fmt::Display for ValQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValQ::Finite(q) => write!(f, "{}", Compact(q)),
            ValQ::Infinity => f.write_str("+inf"),
        }
    }
}

/// A finite Puiseux sum in the uniformizer `t`.
///
/// Canonical form: no zero coefficients are stored and exponents are kept in
/// increasing order, so structural equality is field equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PuiseuxElement {
    terms: BTreeMap<Rat, Rat>,
}

impl PuiseuxElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, Rat::zero())
    }

    /// `c * t^exp`.
    pub fn monomial(c: Rat, exp: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    /// `t^exp`.
    pub fn t_pow(exp: Rat) -> Self {
        Self::monomial(Rat::one(), exp)
    }

    /// Builds an element from `(exponent, coefficient)` pairs, merging
    /// repeated exponents and dropping zero coefficients.
    pub fn from_terms<I: IntoIterator<Item = (Rat, Rat)>>(terms: I) -> Self {
        let mut acc: BTreeMap<Rat, Rat> = BTreeMap::new();
        for (e, c) in terms {
            *acc.entry(e).or_insert_with(Rat::zero) += c;
        }
        acc.retain(|_, c| !c.is_zero());
        Self { terms: acc }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn valuation(&self) -> ValQ {
        match self.terms.keys().next() {
            Some(e) => ValQ::Finite(e.clone()),
            None => ValQ::Infinity,
        }
    }

    /// Lowest-order term, if any.
    pub fn leading_term(&self) -> Option<(&Rat, &Rat)> {
        self.terms.iter().next()
    }

    /// Drops every monomial of exponent `>= bound`. Two elements agree after
    /// truncation at `s` exactly when their difference has valuation `>= s`.
    pub fn truncate(&self, bound: &Rat) -> Self {
        Self {
            terms: self
                .terms
                .range(..bound.clone())
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, x)| (e.clone(), x * c))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &PuiseuxElement {
    type Output = PuiseuxElement;

    fn add(self, rhs: &PuiseuxElement) -> PuiseuxElement {
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            let slot = terms.entry(e.clone()).or_insert_with(Rat::zero);
            *slot += c;
            if slot.is_zero() {
                terms.remove(e);
            }
        }
        PuiseuxElement { terms }
    }
}

impl Add for PuiseuxElement {
    type Output = PuiseuxElement;

    fn add(self, rhs: PuiseuxElement) -> PuiseuxElement {
        &self + &rhs
    }
}

impl Neg for &PuiseuxElement {
    type Output = PuiseuxElement;

    fn neg(self) -> PuiseuxElement {
        PuiseuxElement {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c))
                .collect(),
        }
    }
}

impl Neg for PuiseuxElement {
    type Output = PuiseuxElement;

    fn neg(self) -> PuiseuxElement {
        -&self
    }
}

impl Sub for &PuiseuxElement {
    type Output = PuiseuxElement;

    fn sub(self, rhs: &PuiseuxElement) -> PuiseuxElement {
        self + &(-rhs)
    }
}

impl Sub for PuiseuxElement {
    type Output = PuiseuxElement;

    fn sub(self, rhs: PuiseuxElement) -> PuiseuxElement {
        &self - &rhs
    }
}

impl Mul for &PuiseuxElement {
    type Output = PuiseuxElement;

    fn mul(self, rhs: &PuiseuxElement) -> PuiseuxElement {
        let mut acc: BTreeMap<Rat, Rat> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                *acc.entry(ea + eb).or_insert_with(Rat::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        PuiseuxElement { terms: acc }
    }
}

impl Mul for PuiseuxElement {
    type Output = PuiseuxElement;

    fn mul(self, rhs: PuiseuxElement) -> PuiseuxElement {
        &self * &rhs
    }
}

impl From<Rat> for PuiseuxElement {
    fn from(c: Rat) -> Self {
        PuiseuxElement::constant(c)
    }
}

impl fmt::Display for PuiseuxElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let magnitude = c.abs();
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if e.is_zero() {
                write!(f, "{}", Compact(&magnitude))?;
                continue;
            }
            if !magnitude.is_one() {
                write!(f, "{}*", Compact(&magnitude))?;
            }
            f.write_str("t")?;
            if e.is_one() {
                continue;
            }
            if e.is_integer() && e.is_positive() {
                write!(f, "^{}", e.numer())?;
            } else {
                write!(f, "^({})", Compact(e))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse field element `{input}` at byte {pos}: {reason}")]
pub struct ParseElementError {
    pub input: String,
    pub pos: usize,
    pub reason: String,
}

impl FromStr for PuiseuxElement {
    type Err = ParseElementError;

    /// Accepts `c1*t^(p1/q1) + c2*t^(p2/q2) + ...`, bare constants, `t`,
    /// `t^n`, `t^(-p/q)` and a leading minus sign.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ElementParser::new(s).parse()
    }
}

struct ElementParser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ElementParser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn fail<T>(&self, reason: impl Into<String>) -> Result<T, ParseElementError> {
        Err(ParseElementError {
            input: self.src.to_string(),
            pos: self.pos,
            reason: reason.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse(mut self) -> Result<PuiseuxElement, ParseElementError> {
        let mut terms = Vec::new();
        let mut sign = if self.eat(b'-') {
            -Rat::one()
        } else {
            self.eat(b'+');
            Rat::one()
        };
        loop {
            let (exp, coeff) = self.term()?;
            terms.push((exp, coeff * &sign));
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    sign = Rat::one();
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -Rat::one();
                }
                Some(_) => return self.fail("expected `+`, `-` or end of input"),
            }
        }
        Ok(PuiseuxElement::from_terms(terms))
    }

    /// One unsigned term: `[coeff][*]t[^exp]` or `coeff`.
    fn term(&mut self) -> Result<(Rat, Rat), ParseElementError> {
        let coeff = match self.peek() {
            Some(b) if b.is_ascii_digit() => Some(self.rational()?),
            _ => None,
        };
        let has_star = self.eat(b'*');
        if self.peek() != Some(b't') {
            return match coeff {
                Some(c) if !has_star => Ok((Rat::zero(), c)),
                _ => self.fail("expected `t`"),
            };
        }
        self.pos += 1;
        let exp = if self.eat(b'^') {
            if self.eat(b'(') {
                let negative = self.eat(b'-');
                let e = self.rational()?;
                if !self.eat(b')') {
                    return self.fail("expected `)`");
                }
                if negative {
                    -e
                } else {
                    e
                }
            } else if self.eat(b'-') {
                -self.rational()?
            } else {
                self.rational()?
            }
        } else {
            Rat::one()
        };
        Ok((exp, coeff.unwrap_or_else(Rat::one)))
    }

    /// Unsigned `p` or `p/q`.
    fn rational(&mut self) -> Result<Rat, ParseElementError> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.bytes.len() && p.bytes[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.pos == start {
            return self.fail("expected a number");
        }
        if self.pos < self.bytes.len() && self.bytes[self.pos] == b'/' {
            self.pos += 1;
            let den_start = self.pos;
            digits(self);
            if self.pos == den_start {
                return self.fail("expected a denominator");
            }
        }
        match parse_rational(&self.src[start..self.pos]) {
            Ok(q) => Ok(q),
            Err(e) => self.fail(e.reason),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    #[serde(with = "serde_rat")]
    exp: Rat,
    #[serde(with = "serde_rat")]
    coeff: Rat,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ElementJson {
    Terms(Vec<TermJson>),
    Text(String),
}

/// Serialized as an array of `{"exp": "p/q", "coeff": "p/q"}`; a string in
/// the text format is also accepted on input.
impl Serialize for PuiseuxElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(e, c)| TermJson {
                exp: e.clone(),
                coeff: c.clone(),
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PuiseuxElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match ElementJson::deserialize(d)? {
            ElementJson::Terms(ts) => Ok(PuiseuxElement::from_terms(
                ts.into_iter().map(|t| (t.exp, t.coeff)),
            )),
            ElementJson::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

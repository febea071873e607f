//! Truncated formal Laurent series over `Z`, `Q` and `Z/n`.
//!
//! A [`LaurentSeries`] is a finite window of a series: every coefficient of
//! exponent `<= truncation` is known exactly, everything above is unknown.
//! Arithmetic only ever reports coefficients that are determined by the known
//! parts of its inputs, so values form an inverse system under
//! [`LaurentSeries::truncate`].
//!
//! [`LaurentPoly`] is the exact (untruncated) Laurent polynomial ring
//! `Q[t, t^-1]`, used for the relation matrices in [`crate::dtc`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("cannot truncate to {requested}: value is only known up to t^{available}")]
    TruncationIncrease { requested: i64, available: i64 },
    #[error("coefficient rings differ: {0} vs {1}")]
    RingMismatch(CoefficientRing, CoefficientRing),
    #[error("division by zero")]
    DivisionByZero,
    #[error("lowest coefficient {0} is not a unit in {1}")]
    NonUnitLeadingTerm(String, CoefficientRing),
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("coefficient {0} does not belong to {1}")]
    InvalidCoefficient(String, CoefficientRing),
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("unknown coefficient ring '{0}' (expected Z, Q or Z/n)")]
    UnknownRing(String),
}

/// Coefficient ring of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoefficientRing {
    Integers,
    Rationals,
    IntegersMod(u64),
}

impl CoefficientRing {
    pub fn integers_mod(n: u64) -> Result<Self, LaurentError> {
        if n < 2 {
            return Err(LaurentError::InvalidModulus(n));
        }
        Ok(CoefficientRing::IntegersMod(n))
    }

    /// Brings `c` into canonical form for this ring.
    fn normalize(&self, c: BigRational) -> Result<BigRational, LaurentError> {
        match *self {
            CoefficientRing::Rationals => Ok(c),
            CoefficientRing::Integers => {
                if c.is_integer() {
                    Ok(c)
                } else {
                    Err(LaurentError::InvalidCoefficient(c.to_string(), *self))
                }
            }
            CoefficientRing::IntegersMod(n) => {
                if !c.is_integer() {
                    return Err(LaurentError::InvalidCoefficient(c.to_string(), *self));
                }
                let m = BigInt::from(n);
                Ok(BigRational::from_integer(c.to_integer().mod_floor(&m)))
            }
        }
    }

    /// Canonical form of an element already known to lie in the ring
    /// (closed under ring operations).
    fn reduce(&self, c: BigRational) -> BigRational {
        match *self {
            CoefficientRing::IntegersMod(n) => {
                let m = BigInt::from(n);
                BigRational::from_integer(c.to_integer().mod_floor(&m))
            }
            _ => c,
        }
    }

    fn unit_inverse(&self, c: &BigRational) -> Option<BigRational> {
        if c.is_zero() {
            return None;
        }
        match *self {
            CoefficientRing::Rationals => Some(c.recip()),
            CoefficientRing::Integers => {
                if c.abs().is_one() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            CoefficientRing::IntegersMod(n) => {
                let m = BigInt::from(n);
                let a = c.to_integer().mod_floor(&m);
                let eg = a.extended_gcd(&m);
                if eg.gcd.is_one() {
                    Some(BigRational::from_integer(eg.x.mod_floor(&m)))
                } else {
                    None
                }
            }
        }
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientRing::Integers => write!(f, "Z"),
            CoefficientRing::Rationals => write!(f, "Q"),
            CoefficientRing::IntegersMod(n) => write!(f, "Z/{n}"),
        }
    }
}

impl FromStr for CoefficientRing {
    type Err = LaurentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "Z" | "ZZ" | "int" | "integers" => Ok(CoefficientRing::Integers),
            "Q" | "QQ" | "rat" | "rationals" => Ok(CoefficientRing::Rationals),
            _ => {
                let n = s
                    .strip_prefix("Z/")
                    .and_then(|n| n.trim().parse::<u64>().ok())
                    .ok_or_else(|| LaurentError::UnknownRing(s.to_string()))?;
                CoefficientRing::integers_mod(n)
            }
        }
    }
}

/// A truncated Laurent series `sum_{e <= truncation} c_e t^e`.
///
/// Canonical form: no leading or trailing zero coefficients. The zero series
/// stores no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    ring: CoefficientRing,
    valuation: i64,
    coefficients: Vec<BigRational>,
    truncation: i64,
}

impl LaurentSeries {
    pub fn zero(ring: CoefficientRing, truncation: i64) -> Self {
        LaurentSeries {
            ring,
            valuation: truncation + 1,
            coefficients: Vec::new(),
            truncation,
        }
    }

    pub fn one(ring: CoefficientRing, truncation: i64) -> Self {
        Self::monomial(ring, BigRational::one(), 0, truncation).expect("one belongs to every ring")
    }

    pub fn monomial(
        ring: CoefficientRing,
        c: BigRational,
        exponent: i64,
        truncation: i64,
    ) -> Result<Self, LaurentError> {
        Self::from_terms(ring, [(exponent, c)], truncation)
    }

    /// Builds a series from `(exponent, coefficient)` terms; repeated
    /// exponents are summed and terms above `truncation` are discarded.
    pub fn from_terms<I>(
        ring: CoefficientRing,
        terms: I,
        truncation: i64,
    ) -> Result<Self, LaurentError>
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        let mut terms: Vec<(i64, BigRational)> = terms
            .into_iter()
            .filter(|(e, _)| *e <= truncation)
            .map(|(e, c)| ring.normalize(c).map(|c| (e, c)))
            .collect::<Result<_, _>>()?;
        if terms.is_empty() {
            return Ok(Self::zero(ring, truncation));
        }
        terms.sort_by_key(|(e, _)| *e);
        let lo = terms[0].0;
        let hi = terms[terms.len() - 1].0;
        let mut coefficients = vec![BigRational::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            let slot = &mut coefficients[(e - lo) as usize];
            *slot = ring.reduce(&*slot + c);
        }
        Ok(Self::canonical(ring, lo, coefficients, truncation))
    }

    /// Integer-coefficient convenience constructor: `coeffs[i]` is the
    /// coefficient of `t^(valuation + i)`.
    pub fn from_ints(
        ring: CoefficientRing,
        valuation: i64,
        coeffs: &[i64],
        truncation: i64,
    ) -> Result<Self, LaurentError> {
        Self::from_terms(
            ring,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (valuation + i as i64, BigRational::from_integer(c.into()))),
            truncation,
        )
    }

    fn canonical(
        ring: CoefficientRing,
        mut valuation: i64,
        mut coefficients: Vec<BigRational>,
        truncation: i64,
    ) -> Self {
        let excess = (valuation + coefficients.len() as i64 - 1 - truncation).max(0) as usize;
        coefficients.truncate(coefficients.len().saturating_sub(excess));
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        let lead = coefficients.iter().take_while(|c| c.is_zero()).count();
        if lead == coefficients.len() {
            return Self::zero(ring, truncation);
        }
        coefficients.drain(..lead);
        valuation += lead as i64;
        LaurentSeries {
            ring,
            valuation,
            coefficients,
            truncation,
        }
    }

    pub fn ring(&self) -> CoefficientRing {
        self.ring
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `t`-adic valuation; `None` stands for the `+infinity` of the zero series.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.valuation)
    }

    /// Coefficient of `t^e`, or `None` when `e` is above the truncation.
    pub fn coefficient(&self, e: i64) -> Option<BigRational> {
        if e > self.truncation {
            return None;
        }
        let idx = e - self.valuation;
        if idx < 0 || idx >= self.coefficients.len() as i64 {
            Some(BigRational::zero())
        } else {
            Some(self.coefficients[idx as usize].clone())
        }
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> + '_ {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.valuation + i as i64, c))
    }

    pub fn truncate(&self, d: i64) -> Result<Self, LaurentError> {
        if d > self.truncation {
            return Err(LaurentError::TruncationIncrease {
                requested: d,
                available: self.truncation,
            });
        }
        Ok(Self::canonical(
            self.ring,
            self.valuation,
            self.coefficients.clone(),
            d,
        ))
    }

    fn check_ring(&self, other: &Self) -> Result<(), LaurentError> {
        if self.ring != other.ring {
            return Err(LaurentError::RingMismatch(self.ring, other.ring));
        }
        Ok(())
    }

    fn combine(&self, other: &Self, sign: i64) -> Result<Self, LaurentError> {
        self.check_ring(other)?;
        let truncation = self.truncation.min(other.truncation);
        let sign = BigRational::from_integer(sign.into());
        let terms = self
            .terms()
            .map(|(e, c)| (e, c.clone()))
            .chain(other.terms().map(|(e, c)| (e, c * &sign)));
        Self::from_terms(self.ring, terms, truncation)
    }

    pub fn add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LaurentError> {
        self.combine(other, -1)
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms().map(|(e, c)| (e, -c.clone()));
        Self::from_terms(self.ring, terms, self.truncation).expect("negation stays in the ring")
    }

    /// Product, known exactly up to
    /// `min(trunc(x) + val(y), trunc(y) + val(x))`.
    pub fn mul(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_ring(other)?;
        let mut truncation = self.truncation + other.truncation + 1;
        if let Some(v) = other.valuation() {
            truncation = truncation.min(self.truncation + v);
        }
        if let Some(v) = self.valuation() {
            truncation = truncation.min(other.truncation + v);
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ring, truncation));
        }
        let valuation = self.valuation + other.valuation;
        let len = (truncation - valuation + 1).max(0) as usize;
        let mut coefficients = vec![BigRational::zero(); len];
        for (i, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in other.coefficients.iter().enumerate().take(len - i) {
                coefficients[i + j] += a * b;
            }
        }
        let coefficients = coefficients
            .into_iter()
            .map(|c| self.ring.reduce(c))
            .collect();
        Ok(Self::canonical(
            self.ring,
            valuation,
            coefficients,
            truncation,
        ))
    }

    /// Multiplicative inverse; the result is known up to
    /// `truncation - 2 * valuation`.
    pub fn invert(&self) -> Result<Self, LaurentError> {
        let v = self.valuation().ok_or(LaurentError::DivisionByZero)?;
        let lead = &self.coefficients[0];
        let lead_inv = self
            .ring
            .unit_inverse(lead)
            .ok_or_else(|| LaurentError::NonUnitLeadingTerm(lead.to_string(), self.ring))?;
        let truncation = self.truncation - 2 * v;
        // unit part u = x / t^v is known up to t^(truncation(x) - v)
        let n = (self.truncation - v + 1) as usize;
        let mut inv: Vec<BigRational> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                inv.push(lead_inv.clone());
                continue;
            }
            let mut acc = BigRational::zero();
            for i in 1..=k.min(self.coefficients.len() - 1) {
                acc += &self.coefficients[i] * &inv[k - i];
            }
            inv.push(self.ring.reduce(-(acc * &lead_inv)));
        }
        Ok(Self::canonical(self.ring, -v, inv, truncation))
    }

    /// Parses the literal syntax `1 - t + 3*t^2` (see [`parse_terms`]).
    pub fn parse(text: &str, ring: CoefficientRing, truncation: i64) -> Result<Self, LaurentError> {
        Self::from_terms(ring, parse_terms(text)?, truncation)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms())
    }
}

fn write_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (i64, &'a BigRational)>,
) -> fmt::Result {
    let mut first = true;
    for (e, c) in terms {
        let negative = c.is_negative();
        let abs = c.abs();
        if first {
            if negative {
                write!(f, "-")?;
            }
        } else if negative {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        first = false;
        let coeff = if abs.is_integer() {
            abs.to_integer().to_string()
        } else {
            format!("{}/{}", abs.numer(), abs.denom())
        };
        match e {
            0 => write!(f, "{coeff}")?,
            _ => {
                if !abs.is_one() {
                    write!(f, "{coeff}*")?;
                }
                if e == 1 {
                    write!(f, "t")?;
                } else {
                    write!(f, "t^{e}")?;
                }
            }
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// Parses a sum of terms `c*t^e` into `(exponent, coefficient)` pairs.
///
/// Grammar (whitespace ignored): `series := ['+'|'-'] term (('+'|'-') term)*`,
/// `term := coeff ['*' mono] | mono`, `mono := 't' ['^' ['('] int [')']]`,
/// `coeff := int ['/' int]`.
pub fn parse_terms(text: &str) -> Result<Vec<(i64, BigRational)>, LaurentError> {
    let chars: Vec<(usize, char)> = text
        .char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .map(|(i, c)| (i + 1, c))
        .collect();
    let mut p = TermParser { chars, pos: 0 };
    let mut terms = Vec::new();
    if p.peek().is_none() {
        return Err(p.error("empty series"));
    }
    let mut sign = BigRational::one();
    match p.peek() {
        Some('-') => {
            sign = -sign;
            p.pos += 1;
        }
        Some('+') => p.pos += 1,
        _ => {}
    }
    loop {
        let (e, c) = p.term()?;
        terms.push((e, c * &sign));
        match p.peek() {
            None => break,
            Some('+') => sign = BigRational::one(),
            Some('-') => sign = -BigRational::one(),
            Some(other) => return Err(p.error(&format!("unexpected '{other}'"))),
        }
        p.pos += 1;
    }
    Ok(terms)
}

struct TermParser {
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl TermParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn column(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|&(i, _)| i)
            .or_else(|| self.chars.last().map(|&(i, _)| i + 1))
            .unwrap_or(1)
    }

    fn error(&self, message: &str) -> LaurentError {
        LaurentError::Parse {
            column: self.column(),
            message: message.to_string(),
        }
    }

    fn digits(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos]
            .iter()
            .map(|&(_, c)| c)
            .collect();
        s.parse().ok()
    }

    fn signed_int(&mut self) -> Result<i64, LaurentError> {
        let negative = match self.peek() {
            Some('-') => {
                self.pos += 1;
                true
            }
            Some('+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let n = self
            .digits()
            .and_then(|n| n.to_i64())
            .ok_or_else(|| self.error("expected exponent"))?;
        Ok(if negative { -n } else { n })
    }

    fn mono(&mut self) -> Result<i64, LaurentError> {
        if self.peek() != Some('t') {
            return Err(self.error("expected 't'"));
        }
        self.pos += 1;
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        if self.peek() == Some('(') {
            self.pos += 1;
            let e = self.signed_int()?;
            if self.peek() != Some(')') {
                return Err(self.error("expected ')'"));
            }
            self.pos += 1;
            Ok(e)
        } else {
            self.signed_int()
        }
    }

    fn term(&mut self) -> Result<(i64, BigRational), LaurentError> {
        if self.peek() == Some('t') {
            return Ok((self.mono()?, BigRational::one()));
        }
        let numer = self
            .digits()
            .ok_or_else(|| self.error("expected coefficient or 't'"))?;
        let mut c = BigRational::from_integer(numer);
        if self.peek() == Some('/') {
            self.pos += 1;
            let denom = self
                .digits()
                .ok_or_else(|| self.error("expected denominator"))?;
            if denom.is_zero() {
                return Err(self.error("zero denominator"));
            }
            c /= BigRational::from_integer(denom);
        }
        match self.peek() {
            Some('*') => {
                self.pos += 1;
                Ok((self.mono()?, c))
            }
            Some('t') => Ok((self.mono()?, c)),
            _ => Ok((0, c)),
        }
    }
}

/// An exact Laurent polynomial over `Q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    valuation: i64,
    coefficients: Vec<BigRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly {
            valuation: 0,
            coefficients: Vec::new(),
        }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_terms([(0, c)])
    }

    pub fn monomial(c: BigRational, e: i64) -> Self {
        Self::from_terms([(e, c)])
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigRational)>>(terms: I) -> Self {
        let terms: Vec<_> = terms.into_iter().collect();
        let Some(lo) = terms.iter().map(|(e, _)| *e).min() else {
            return Self::zero();
        };
        let hi = terms.iter().map(|(e, _)| *e).max().unwrap();
        let mut coefficients = vec![BigRational::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            coefficients[(e - lo) as usize] += c;
        }
        Self::canonical(lo, coefficients)
    }

    fn canonical(mut valuation: i64, mut coefficients: Vec<BigRational>) -> Self {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        let lead = coefficients.iter().take_while(|c| c.is_zero()).count();
        if lead == coefficients.len() {
            return Self::zero();
        }
        coefficients.drain(..lead);
        valuation += lead as i64;
        LaurentPoly {
            valuation,
            coefficients,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.valuation)
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn degree(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.valuation + self.coefficients.len() as i64 - 1)
    }

    pub fn coefficient(&self, e: i64) -> BigRational {
        let idx = e - self.valuation;
        if idx < 0 || idx >= self.coefficients.len() as i64 {
            BigRational::zero()
        } else {
            self.coefficients[idx as usize].clone()
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> + '_ {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.valuation + i as i64, c))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(
            self.terms()
                .map(|(e, c)| (e, c.clone()))
                .chain(other.terms().map(|(e, c)| (e, c.clone()))),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_terms(
            self.terms()
                .map(|(e, c)| (e, c.clone()))
                .chain(other.terms().map(|(e, c)| (e, -c.clone()))),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coefficients =
            vec![BigRational::zero(); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in other.coefficients.iter().enumerate() {
                coefficients[i + j] += a * b;
            }
        }
        Self::canonical(self.valuation + other.valuation, coefficients)
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly {
            valuation: self.valuation + k,
            coefficients: self.coefficients.clone(),
        }
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder in `Q[t, t^-1]`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        // long division from the top, on the polynomial parts
        let mut rem = self.coefficients.clone();
        let d = &divisor.coefficients;
        if rem.len() < d.len() {
            return None;
        }
        let lead = d.last().unwrap();
        let qlen = rem.len() - d.len() + 1;
        let mut quot = vec![BigRational::zero(); qlen];
        for k in (0..qlen).rev() {
            let c = &rem[k + d.len() - 1] / lead;
            if !c.is_zero() {
                for (j, dj) in d.iter().enumerate() {
                    rem[k + j] -= &c * dj;
                }
            }
            quot[k] = c;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::canonical(self.valuation - divisor.valuation, quot))
    }

    /// Value at `t = x` (`x` must be nonzero when negative exponents occur).
    pub fn evaluate(&self, x: &BigRational) -> BigRational {
        self.terms()
            .map(|(e, c)| {
                let p = if e >= 0 {
                    num_traits::pow(x.clone(), e as usize)
                } else {
                    num_traits::pow(x.recip(), (-e) as usize)
                };
                c * p
            })
            .fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn to_series(&self, truncation: i64) -> LaurentSeries {
        LaurentSeries::from_terms(
            CoefficientRing::Rationals,
            self.terms().map(|(e, c)| (e, c.clone())),
            truncation,
        )
        .expect("rationals accept every coefficient")
    }

    pub fn parse(text: &str) -> Result<Self, LaurentError> {
        Ok(Self::from_terms(parse_terms(text)?))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms())
    }
}

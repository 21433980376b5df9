// SPDX-License-Identifier: Apache-2.0

//! Exact rational scalars and the univariate tools used by identity checks.
//!
//! Every parameter of the model (spectral parameters, `t`, boundary constants,
//! site couplings) is an exact rational, so identities are checked by plain
//! equality. Scalars print and parse as `"p/q"` (or `"p"` when `q = 1`).

use std::collections::HashSet;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Numerators of random scalars are drawn from `[-RANDOM_NUMERATOR_BOUND, RANDOM_NUMERATOR_BOUND] \ {0}`.
pub const RANDOM_NUMERATOR_BOUND: i64 = 99;
/// Denominators of random scalars are drawn from `[1, RANDOM_DENOMINATOR_BOUND]`.
pub const RANDOM_DENOMINATOR_BOUND: i64 = 20;
/// Draws attempted before [`ScalarError::ExhaustedRange`] is reported.
const MAX_DRAWS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("sample points are not consistent with a polynomial of degree <= {max_degree}")]
    InconsistentSample { max_degree: usize },
    #[error("sample needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("sample has repeated abscissa {0}")]
    RepeatedAbscissa(Scalar),
    #[error("random range exhausted by the avoid set")]
    ExhaustedRange,
    #[error("`{0}` is not a rational of the form p or p/q")]
    Parse(String),
}

/// An element of the rational field, always stored in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, ScalarError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar(BigRational::new(numer.into(), denom)))
    }

    pub fn from_int(value: i64) -> Self {
        Scalar(BigRational::from_integer(value.into()))
    }

    /// `numer / denom` for small integers; panics on a zero denominator.
    pub fn frac(numer: i64, denom: i64) -> Self {
        Self::new(numer, denom).expect("zero denominator")
    }

    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Self, ScalarError> {
        if rhs.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar(&self.0 / &rhs.0))
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn pow(&self, exp: i64) -> Result<Self, ScalarError> {
        if exp < 0 {
            return self.inv()?.pow(-exp);
        }
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = exp as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc *= &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    /// Factorial `k!` as a scalar.
    pub fn factorial(k: usize) -> Self {
        let mut acc = BigInt::one();
        for i in 2..=k {
            acc *= i;
        }
        Scalar(BigRational::from_integer(acc))
    }
}

impl From<i64> for Scalar {
    fn from(value: i64) -> Self {
        Scalar::from_int(value)
    }
}

impl From<BigRational> for Scalar {
    fn from(value: BigRational) -> Self {
        Scalar(value)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_integer(text: &str, allow_sign: bool) -> Option<BigInt> {
    let digits = match text.strip_prefix('-') {
        Some(rest) if allow_sign => rest,
        _ => text,
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(text).ok()
}

impl FromStr for Scalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ScalarError::Parse(s.to_string());
        let (numer, denom) = match s.split_once('/') {
            Some((p, q)) => (
                parse_integer(p, true).ok_or_else(bad)?,
                parse_integer(q, false).ok_or_else(bad)?,
            ),
            None => (parse_integer(s, true).ok_or_else(bad)?, BigInt::one()),
        };
        if denom.is_zero() {
            return Err(bad());
        }
        Ok(Scalar(BigRational::new(numer, denom)))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar((&self.0).$method(rhs.0))
            }
        }
        impl $assign_trait<&Scalar> for Scalar {
            fn $assign_method(&mut self, rhs: &Scalar) {
                self.0.$assign_method(&rhs.0);
            }
        }
        impl $assign_trait<Scalar> for Scalar {
            fn $assign_method(&mut self, rhs: Scalar) {
                self.0.$assign_method(rhs.0);
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign);
forward_binop!(Sub, sub, SubAssign, sub_assign);
forward_binop!(Mul, mul, MulAssign, mul_assign);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |acc, x| acc * x)
    }
}

impl<'a> Product<&'a Scalar> for Scalar {
    fn product<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |acc, x| acc * x)
    }
}

/// Points `(x, y)` of a univariate function with pairwise-distinct abscissae.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnivariateSample {
    points: Vec<(Scalar, Scalar)>,
}

impl UnivariateSample {
    pub fn new(points: Vec<(Scalar, Scalar)>) -> Result<Self, ScalarError> {
        for (i, (x, _)) in points.iter().enumerate() {
            if points[..i].iter().any(|(other, _)| other == x) {
                return Err(ScalarError::RepeatedAbscissa(x.clone()));
            }
        }
        Ok(UnivariateSample { points })
    }

    /// Samples `f` at each abscissa.
    pub fn from_fn<E>(
        xs: impl IntoIterator<Item = Scalar>,
        mut f: impl FnMut(&Scalar) -> Result<Scalar, E>,
    ) -> Result<Result<Self, ScalarError>, E> {
        let mut points = Vec::new();
        for x in xs {
            let y = f(&x)?;
            points.push((x, y));
        }
        Ok(Self::new(points))
    }

    pub fn points(&self) -> &[(Scalar, Scalar)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Exact degree of the polynomial through the first `max_degree + 1` points.
///
/// The remaining points must lie on the same polynomial, otherwise the sample
/// is rejected with [`ScalarError::InconsistentSample`]. The zero polynomial
/// has degree `-1`.
pub fn interpolate_degree(sample: &UnivariateSample, max_degree: usize) -> Result<i64, ScalarError> {
    let needed = max_degree + 2;
    if sample.len() < needed {
        return Err(ScalarError::TooFewPoints { needed, got: sample.len() });
    }
    let (fit, rest) = sample.points.split_at(max_degree + 1);
    let xs: Vec<&Scalar> = fit.iter().map(|(x, _)| x).collect();

    // Newton divided differences, computed in place.
    let mut coeffs: Vec<Scalar> = fit.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..coeffs.len() {
        for i in (level..coeffs.len()).rev() {
            let num = &coeffs[i] - &coeffs[i - 1];
            let den = xs[i] - xs[i - level];
            coeffs[i] = num.checked_div(&den)?;
        }
    }

    let evaluate = |x: &Scalar| {
        let mut acc = coeffs[coeffs.len() - 1].clone();
        for k in (0..coeffs.len() - 1).rev() {
            acc = acc * (x - xs[k]) + &coeffs[k];
        }
        acc
    };
    if rest.iter().any(|(x, y)| &evaluate(x) != y) {
        return Err(ScalarError::InconsistentSample { max_degree });
    }

    // The k-th Newton basis polynomial has degree exactly k.
    Ok(coeffs
        .iter()
        .rposition(|c| !c.is_zero())
        .map_or(-1, |k| k as i64))
}

/// A nonzero rational `p/q` with `p`, `q` uniform in the documented ranges,
/// redrawn until it is outside `avoid`.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R, avoid: &[Scalar]) -> Result<Scalar, ScalarError> {
    let avoid: HashSet<&Scalar> = avoid.iter().collect();
    for _ in 0..MAX_DRAWS {
        let mut numer = rng.gen_range(-RANDOM_NUMERATOR_BOUND..RANDOM_NUMERATOR_BOUND);
        if numer >= 0 {
            numer += 1;
        }
        let denom = rng.gen_range(1..=RANDOM_DENOMINATOR_BOUND);
        let value = Scalar::frac(numer, denom);
        if !avoid.contains(&value) {
            return Ok(value);
        }
    }
    Err(ScalarError::ExhaustedRange)
}

/// `count` pairwise-distinct random scalars, none of them in `avoid`.
pub fn random_distinct<R: Rng + ?Sized>(
    rng: &mut R,
    count: usize,
    avoid: &[Scalar],
) -> Result<Vec<Scalar>, ScalarError> {
    let mut excluded = avoid.to_vec();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let value = random_scalar(rng, &excluded)?;
        excluded.push(value.clone());
        out.push(value);
    }
    Ok(out)
}

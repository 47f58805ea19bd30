//! Exact truncated power series and integer polynomials in one variable `t`.
//!
//! Molien series are carried as [`TruncatedSeries`] over big rationals so that
//! normalisation by 1/4 or 1/2 stays exact; a remainder after normalisation is
//! reported instead of rounded away. Rational Molien functions are recovered by
//! multiplying the series with a product of cyclotomic-type factors
//! `(1 - t^d)^mult` and checking that the product terminates.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Extra degrees checked beyond the expected numerator degree when
/// reconstructing a rational function.
pub const DEFAULT_SLACK: usize = 7;

/// Minimum number of degrees past the expected numerator degree that must be
/// available for [`reconstruct_numerator`] to accept its input.
pub const MIN_SLACK: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("coefficient of t^{degree} is not an integer: {value}")]
    NonIntegralCoefficient { degree: usize, value: BigRational },
    #[error("coefficient of t^{degree} is {value}, expected zero above degree {expected_deg}")]
    NonvanishingTail {
        degree: usize,
        expected_deg: usize,
        value: BigInt,
    },
    #[error("series known to order {order}, need at least {needed} to check the tail")]
    InsufficientOrder { order: usize, needed: usize },
    #[error("exact division by {divisor} failed at t^{degree}")]
    InexactDivision { degree: usize, divisor: BigInt },
}

/// Power series `c_0 + c_1 t + ... + c_order t^order + O(t^(order+1))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigRational::one();
        s
    }

    /// Builds a series from its coefficients; the order is `coeffs.len() - 1`.
    ///
    /// Panics on an empty coefficient list.
    pub fn from_rationals(coeffs: Vec<BigRational>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a truncated series needs at least one coefficient"
        );
        Self { coeffs }
    }

    pub fn from_integers<I, T>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        Self::from_rationals(
            coeffs
                .into_iter()
                .map(|c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, degree: usize) -> &BigRational {
        &self.coeffs[degree]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        Self {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    /// Cauchy product, truncated at the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = Self::zero(order);
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self {
            coeffs: (0..=order)
                .map(|k| &self.coeffs[k] + &other.coeffs[k])
                .collect(),
        }
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Multiplies in place by `(1 - sign * t^d)`.
    pub fn mul_binomial(&mut self, sign: i32, d: usize) {
        assert!(d >= 1);
        for m in (d..self.coeffs.len()).rev() {
            let prev = self.coeffs[m - d].clone();
            if sign > 0 {
                self.coeffs[m] -= prev;
            } else {
                self.coeffs[m] += prev;
            }
        }
    }

    /// Divides in place by `(1 - sign * t^d)` using `c_m += sign * c_{m-d}`.
    pub fn div_binomial(&mut self, sign: i32, d: usize) {
        assert!(d >= 1);
        for m in d..self.coeffs.len() {
            let prev = self.coeffs[m - d].clone();
            if sign > 0 {
                self.coeffs[m] += prev;
            } else {
                self.coeffs[m] -= prev;
            }
        }
    }

    /// Returns the coefficients as integers, failing on the first non-integral one.
    pub fn to_integers(&self) -> Result<Vec<BigInt>, SeriesError> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(degree, c)| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(SeriesError::NonIntegralCoefficient {
                        degree,
                        value: c.clone(),
                    })
                }
            })
            .collect()
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*t")?,
                _ => write!(f, "{c}*t^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.order() + 1)
    }
}

/// Dense integer polynomial, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

/// Which degree reflection a palindromic polynomial is symmetric under.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reflection {
    /// `p_k = p_{deg-k}`
    Symmetric,
    /// `p_k = -p_{deg-k}`
    Antisymmetric,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    /// Divides every coefficient by `d`, failing if any division leaves a remainder.
    pub fn div_exact(&self, d: &BigInt) -> Result<Self, SeriesError> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(degree, c)| {
                let (q, r) = c.div_rem(d);
                if r.is_zero() {
                    Ok(q)
                } else {
                    Err(SeriesError::InexactDivision {
                        degree,
                        divisor: d.clone(),
                    })
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::new)
    }

    pub fn is_palindromic(&self, reflection: Reflection) -> bool {
        let n = self.coeffs.len();
        (0..n).all(|k| {
            let mirror = &self.coeffs[n - 1 - k];
            match reflection {
                Reflection::Symmetric => self.coeffs[k] == *mirror,
                Reflection::Antisymmetric => self.coeffs[k] == -mirror,
            }
        })
    }

    /// Sum of the coefficients.
    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    pub fn to_series(&self, order: usize) -> TruncatedSeries {
        let mut s = TruncatedSeries::zero(order);
        for (k, c) in self.coeffs.iter().enumerate().take(order + 1) {
            s.coeffs[k] = BigRational::from_integer(c.clone());
        }
        s
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{mag}*t")?,
                (_, true) => write!(f, "t^{k}")?,
                (_, false) => write!(f, "{mag}*t^{k}")?,
            }
        }
        Ok(())
    }
}

/// `prod (1 - t^d)^mult` over a multiset of degrees.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CyclotomicDenominator {
    factors: BTreeMap<usize, usize>,
}

impl CyclotomicDenominator {
    pub fn new() -> Self {
        Self::default()
    }

    /// One factor `(1 - t^d)` per listed degree (repeats allowed).
    ///
    /// Panics on a zero degree.
    pub fn from_degrees(degrees: &[usize]) -> Self {
        let mut q = Self::new();
        for &d in degrees {
            q.push(d, 1);
        }
        q
    }

    pub fn push(&mut self, d: usize, mult: usize) {
        assert!(d >= 1, "factor degree must be positive");
        if mult > 0 {
            *self.factors.entry(d).or_insert(0) += mult;
        }
    }

    /// `(1-t^2)(1-t^3)(1-t^4)`, the denominator of the l=1 Molien function.
    pub fn ell1() -> Self {
        Self::from_degrees(&[2, 3, 4])
    }

    /// The 19-factor denominator shared by the l=2 rational Molien functions.
    pub fn q0() -> Self {
        Self::from_degrees(&[2, 3, 4, 4, 4, 5, 6, 6, 7, 7, 8, 8, 9, 9, 10, 10, 11, 12, 13])
    }

    /// Pairs `(d, mult)` in increasing `d`.
    pub fn factors(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.factors.iter().map(|(&d, &m)| (d, m))
    }

    /// Number of factors counted with multiplicity.
    pub fn count(&self) -> usize {
        self.factors.values().sum()
    }

    /// Total degree of the expanded product.
    pub fn degree(&self) -> usize {
        self.factors.iter().map(|(d, m)| d * m).sum()
    }

    /// Multiplies `s` by every factor of the product.
    pub fn apply(&self, s: &mut TruncatedSeries) {
        for (d, mult) in self.factors() {
            for _ in 0..mult {
                s.mul_binomial(1, d);
            }
        }
    }

    pub fn to_polynomial(&self) -> IntPolynomial {
        let mut s = TruncatedSeries::one(self.degree());
        self.apply(&mut s);
        IntPolynomial::new(s.to_integers().expect("integer product"))
    }
}

/// Taylor expansion of `1 / prod (1 - t^d)^mult` to the given order.
pub fn expand_reciprocal_denominator(q: &CyclotomicDenominator, order: usize) -> TruncatedSeries {
    let mut s = TruncatedSeries::one(order);
    for (d, mult) in q.factors() {
        for _ in 0..mult {
            s.div_binomial(1, d);
        }
    }
    s
}

/// Recovers the numerator `P = s * Q` of a rational function `P/Q` whose
/// expansion is `s`, checking integrality and that `P` vanishes strictly above
/// `expected_deg` up to `s.order()`.
pub fn reconstruct_numerator(
    s: &TruncatedSeries,
    q: &CyclotomicDenominator,
    expected_deg: usize,
) -> Result<IntPolynomial, SeriesError> {
    let needed = expected_deg + MIN_SLACK;
    if s.order() < needed {
        return Err(SeriesError::InsufficientOrder {
            order: s.order(),
            needed,
        });
    }
    let mut p = s.clone();
    q.apply(&mut p);
    let ints = p.to_integers()?;
    if let Some((degree, value)) = ints
        .iter()
        .enumerate()
        .skip(expected_deg + 1)
        .find(|(_, c)| !c.is_zero())
    {
        return Err(SeriesError::NonvanishingTail {
            degree,
            expected_deg,
            value: value.clone(),
        });
    }
    Ok(IntPolynomial::new(ints[..=expected_deg].to_vec()))
}

/// Series multiplication; the result is truncated at the smaller order.
pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> TruncatedSeries {
    a.mul(b)
}

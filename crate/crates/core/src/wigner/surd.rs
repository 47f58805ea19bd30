use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact real number `sign * sqrt(radicand)` with a nonnegative rational radicand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    sign: i8,
    radicand: BigRational,
}

impl Surd {
    /// Panics if `radicand` is negative or `sign` is not in {-1, 0, 1}.
    pub fn new(sign: i8, radicand: BigRational) -> Self {
        assert!(!radicand.is_negative(), "surd radicand must be nonnegative");
        assert!((-1..=1).contains(&sign));
        if sign == 0 || radicand.is_zero() {
            Self::zero()
        } else {
            Self { sign, radicand }
        }
    }

    pub fn zero() -> Self {
        Self {
            sign: 0,
            radicand: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Self {
            sign: 1,
            radicand: BigRational::one(),
        }
    }

    /// The rational `q` written as a surd.
    pub fn from_rational(q: &BigRational) -> Self {
        let sign = if q.is_zero() {
            0
        } else if q.is_negative() {
            -1
        } else {
            1
        };
        Self::new(sign, q * q)
    }

    /// `sign * sqrt(num / den)`.
    pub fn from_parts(sign: i8, num: i64, den: i64) -> Self {
        Self::new(sign, BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn radicand(&self) -> &BigRational {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Exact square; always equals the radicand.
    pub fn square(&self) -> BigRational {
        self.radicand.clone()
    }

    /// `sign * radicand`, i.e. `value * |value|`.
    pub fn signed_square(&self) -> BigRational {
        match self.sign {
            1 => self.radicand.clone(),
            -1 => -self.radicand.clone(),
            _ => BigRational::zero(),
        }
    }

    /// The value as a rational, when the radicand is a perfect square.
    pub fn to_rational(&self) -> Option<BigRational> {
        let n = self.radicand.numer().sqrt();
        let d = self.radicand.denom().sqrt();
        if &(&n * &n) == self.radicand.numer() && &(&d * &d) == self.radicand.denom() {
            Some(BigRational::new(n, d) * BigInt::from(self.sign))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.radicand.to_f64().unwrap_or(f64::NAN);
        f64::from(self.sign) * r.sqrt()
    }

    /// Multiplies by `(-1)^k`.
    pub fn with_phase(self, odd: bool) -> Self {
        if odd {
            -self
        } else {
            self
        }
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            sign: -self.sign,
            radicand: self.radicand,
        }
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        Surd::new(self.sign * rhs.sign, &self.radicand * &rhs.radicand)
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        &self * &rhs
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => {
                let minus = if s < 0 { "-" } else { "" };
                match self.to_rational() {
                    Some(q) => write!(f, "{q}"),
                    None => write!(f, "{minus}sqrt({})", self.radicand),
                }
            }
        }
    }
}

//! Power series in `t` whose coefficients are Laurent polynomials in one or two
//! unit-circle variables (`z`, or `z` and `w`).
//!
//! Integrals over the unit torus of a class function reduce to constant terms:
//! `(1/2πi)∮ f(z) dz/z` is the coefficient of `z^0`. The Molien integrands are
//! products of geometric factors `1/(1 - σ t^a z^b w^c)`, so the whole
//! computation is a chain of in-degree recurrences followed by a constant-term
//! read-out. Coefficients are stored densely over a square exponent box whose
//! half-width is set per `t`-degree by a [`CapPolicy`].

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::seriesring::TruncatedSeries;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("exponent {exponent:?} at t^{degree} exceeds the hard cap {cap}")]
    CapOverflow {
        degree: usize,
        exponent: [i64; 2],
        cap: i64,
    },
    #[error("series shapes differ: {0}")]
    ShapeMismatch(&'static str),
}

/// Number of unit-circle variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Circles {
    One,
    Two,
}

/// Geometric factor `(1 - sign * t^tpow * z^exps[0] * w^exps[1])`.
///
/// In the one-circle case only `exps[0]` is used and `exps[1]` must be zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub sign: i32,
    pub tpow: usize,
    pub exps: [i64; 2],
}

impl Factor {
    pub fn new(sign: i32, tpow: usize, exps: [i64; 2]) -> Self {
        assert!(sign == 1 || sign == -1, "factor sign must be +1 or -1");
        assert!(tpow >= 1, "every factor must carry a positive power of t");
        Self { sign, tpow, exps }
    }

    pub fn one_circle(sign: i32, tpow: usize, b: i64) -> Self {
        Self::new(sign, tpow, [b, 0])
    }

    pub fn two_circle(sign: i32, tpow: usize, b: i64, c: i64) -> Self {
        Self::new(sign, tpow, [b, c])
    }

    /// Largest exponent shift per unit of `t`-degree, rounded up.
    pub fn slope(&self) -> i64 {
        let a = self.tpow as i64;
        let b = self.exps[0].abs().max(self.exps[1].abs());
        (b + a - 1) / a
    }
}

/// Per-degree exponent bounds.
///
/// `hard(m) = slope * m + margin` is never legitimately exceeded by a product of
/// factors with the given slope; crossing it is an error. With a target order
/// `M`, coefficients at degree `m` are additionally pruned to
/// `slope * (M - m) + margin`: larger exponents cannot return to the `|e| <= 1`
/// window read by the Weyl factor before degree `M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CapPolicy {
    pub slope: i64,
    pub margin: i64,
    pub target: Option<usize>,
}

impl CapPolicy {
    pub const DEFAULT_MARGIN: i64 = 2;

    pub fn unpruned(slope: i64) -> Self {
        Self {
            slope,
            margin: Self::DEFAULT_MARGIN,
            target: None,
        }
    }

    pub fn pruned(slope: i64, target: usize) -> Self {
        Self {
            slope,
            margin: Self::DEFAULT_MARGIN,
            target: Some(target),
        }
    }

    /// Policy whose slope covers every factor in `factors`.
    pub fn for_factors(factors: &[Factor], target: Option<usize>) -> Self {
        let slope = factors.iter().map(Factor::slope).max().unwrap_or(0);
        Self {
            slope,
            margin: Self::DEFAULT_MARGIN,
            target,
        }
    }

    pub fn hard(&self, degree: usize) -> i64 {
        self.slope * degree as i64 + self.margin
    }

    pub fn bound(&self, degree: usize) -> i64 {
        let hard = self.hard(degree);
        match self.target {
            Some(target) if degree <= target => {
                hard.min(self.slope * (target - degree) as i64 + self.margin)
            }
            _ => hard,
        }
    }
}

/// Dense Laurent polynomial over the box `|e_i| <= bound`.
///
/// Storage is row-major: in the two-circle case rows index the `z` exponent and
/// columns the `w` exponent; in the one-circle case there is a single row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    circles: Circles,
    bound: i64,
    data: Vec<BigInt>,
}

impl LaurentPoly {
    pub fn zero(circles: Circles, bound: i64) -> Self {
        assert!(bound >= 0);
        let side = (2 * bound + 1) as usize;
        let len = match circles {
            Circles::One => side,
            Circles::Two => side * side,
        };
        Self {
            circles,
            bound,
            data: vec![BigInt::zero(); len],
        }
    }

    pub fn constant(circles: Circles, bound: i64, c: BigInt) -> Self {
        let mut p = Self::zero(circles, bound);
        *p.slot_mut([0, 0]).expect("origin is inside every box") = c;
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; repeated
    /// exponents accumulate.
    pub fn from_terms(
        circles: Circles,
        bound: i64,
        terms: &[([i64; 2], i64)],
    ) -> Result<Self, LaurentError> {
        let mut p = Self::zero(circles, bound);
        for &(e, c) in terms {
            let slot = p.slot_mut(e).ok_or(LaurentError::CapOverflow {
                degree: 0,
                exponent: e,
                cap: bound,
            })?;
            *slot += c;
        }
        Ok(p)
    }

    pub fn circles(&self) -> Circles {
        self.circles
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    fn side(&self) -> usize {
        (2 * self.bound + 1) as usize
    }

    fn rows(&self) -> usize {
        match self.circles {
            Circles::One => 1,
            Circles::Two => self.side(),
        }
    }

    fn row_bound(&self) -> i64 {
        match self.circles {
            Circles::One => 0,
            Circles::Two => self.bound,
        }
    }

    /// Maps user exponents to (row, column) exponents.
    fn to_grid(&self, e: [i64; 2]) -> Option<(i64, i64)> {
        match self.circles {
            Circles::One if e[1] != 0 => None,
            Circles::One => Some((0, e[0])),
            Circles::Two => Some((e[0], e[1])),
        }
    }

    fn grid_exponent(&self, row: i64, col: i64) -> [i64; 2] {
        match self.circles {
            Circles::One => [col, 0],
            Circles::Two => [row, col],
        }
    }

    fn index(&self, e: [i64; 2]) -> Option<usize> {
        let (r, c) = self.to_grid(e)?;
        let (rb, b) = (self.row_bound(), self.bound);
        if r.abs() > rb || c.abs() > b {
            return None;
        }
        Some(((r + rb) as usize) * self.side() + (c + b) as usize)
    }

    fn slot_mut(&mut self, e: [i64; 2]) -> Option<&mut BigInt> {
        let i = self.index(e)?;
        Some(&mut self.data[i])
    }

    /// Coefficient of `z^e[0] w^e[1]`; zero outside the stored box.
    pub fn get(&self, e: [i64; 2]) -> BigInt {
        self.index(e)
            .map(|i| self.data[i].clone())
            .unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.get([0, 0])
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Nonzero terms in row-major exponent order.
    pub fn terms(&self) -> Vec<([i64; 2], BigInt)> {
        let side = self.side() as i64;
        let rb = self.row_bound();
        self.data
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let i = i as i64;
                let row = i / side - rb;
                let col = i % side - self.bound;
                (self.grid_exponent(row, col), c.clone())
            })
            .collect()
    }

    /// Largest `|exponent|` among nonzero terms (0 for the zero polynomial).
    pub fn support_radius(&self) -> i64 {
        self.terms()
            .iter()
            .map(|(e, _)| e[0].abs().max(e[1].abs()))
            .max()
            .unwrap_or(0)
    }

    /// Copy re-boxed to `bound`; terms outside the new box are dropped.
    pub fn with_bound(&self, bound: i64) -> Self {
        let mut out = Self::zero(self.circles, bound);
        out.add_shifted(self, [0, 0], 1, i64::MAX, 0)
            .expect("unbounded cap cannot overflow");
        out
    }

    /// `self += sign * m * src` with `m = z^shift[0] w^shift[1]`.
    ///
    /// Terms landing outside this box are dropped when they are within `hard`,
    /// and reported as [`LaurentError::CapOverflow`] otherwise.
    pub fn add_shifted(
        &mut self,
        src: &LaurentPoly,
        shift: [i64; 2],
        sign: i32,
        hard: i64,
        degree: usize,
    ) -> Result<(), LaurentError> {
        if self.circles != src.circles {
            return Err(LaurentError::ShapeMismatch("circle count"));
        }
        let (sr, sc) = self.to_grid(shift).ok_or(LaurentError::ShapeMismatch(
            "one-circle shift in second variable",
        ))?;
        let reach = src.bound + sr.abs().max(sc.abs());
        if reach > hard {
            for (e, _) in src.terms() {
                let t = [e[0] + shift[0], e[1] + shift[1]];
                if t[0].abs().max(t[1].abs()) > hard {
                    return Err(LaurentError::CapOverflow {
                        degree,
                        exponent: t,
                        cap: hard,
                    });
                }
            }
        }

        let (b, rb) = (self.bound, self.row_bound());
        let (sb, srb) = (src.bound, src.row_bound());
        let col_lo = (-b).max(sc - sb);
        let col_hi = b.min(sc + sb);
        if col_lo > col_hi {
            return Ok(());
        }
        let width = (col_hi - col_lo + 1) as usize;
        let dst_off = (col_lo + b) as usize;
        let src_off = (col_lo - sc + sb) as usize;
        let side = self.side();
        let src_side = src.side();

        let update_row = |(i, row): (usize, &mut [BigInt])| {
            let r = i as i64 - rb;
            let src_r = r - sr;
            if src_r.abs() > srb {
                return;
            }
            let start = (src_r + srb) as usize * src_side + src_off;
            let src_row = &src.data[start..start + width];
            for (d, s) in row[dst_off..dst_off + width].iter_mut().zip(src_row) {
                if s.is_zero() {
                    continue;
                }
                if sign > 0 {
                    *d += s;
                } else {
                    *d -= s;
                }
            }
        };
        if self.rows() > 8 {
            self.data
                .par_chunks_mut(side)
                .enumerate()
                .for_each(update_row);
        } else {
            self.data.chunks_mut(side).enumerate().for_each(update_row);
        }
        Ok(())
    }

    /// Product with `(1 - z)(1 - 1/z)` per circle variable, i.e. with
    /// `(2 - z - 1/z)` or `(2 - z - 1/z)(2 - w - 1/w)`. The box grows by one.
    pub fn weyl(&self) -> Self {
        let grow = self.bound + 1;
        let one_var = |p: &LaurentPoly, axis: usize| {
            let mut out = LaurentPoly::zero(p.circles, grow);
            let mut up = [0, 0];
            up[axis] = 1;
            let down = [-up[0], -up[1]];
            for (shift, sign) in [([0, 0], 1), ([0, 0], 1), (up, -1), (down, -1)] {
                out.add_shifted(p, shift, sign, i64::MAX, 0)
                    .expect("uncapped");
            }
            out
        };
        match self.circles {
            Circles::One => one_var(self, 0),
            Circles::Two => one_var(&one_var(self, 0), 1),
        }
    }
}

/// Truncated power series in `t` with [`LaurentPoly`] coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries2 {
    circles: Circles,
    caps: CapPolicy,
    coeffs: Vec<LaurentPoly>,
}

impl LaurentSeries2 {
    /// The series `1 + O(t^(order+1))`.
    pub fn one(circles: Circles, order: usize, caps: CapPolicy) -> Self {
        let coeffs = (0..=order)
            .map(|m| {
                let bound = caps.bound(m);
                if m == 0 {
                    LaurentPoly::constant(circles, bound, BigInt::one())
                } else {
                    LaurentPoly::zero(circles, bound)
                }
            })
            .collect();
        Self {
            circles,
            caps,
            coeffs,
        }
    }

    /// Builds a series from per-degree term lists; `terms.len() - 1` is the order.
    pub fn from_terms(
        circles: Circles,
        caps: CapPolicy,
        terms: &[Vec<([i64; 2], i64)>],
    ) -> Result<Self, LaurentError> {
        let coeffs = terms
            .iter()
            .enumerate()
            .map(|(m, t)| {
                LaurentPoly::from_terms(circles, caps.bound(m), t).map_err(|e| match e {
                    LaurentError::CapOverflow { exponent, cap, .. } => LaurentError::CapOverflow {
                        degree: m,
                        exponent,
                        cap,
                    },
                    other => other,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            circles,
            caps,
            coeffs,
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn circles(&self) -> Circles {
        self.circles
    }

    pub fn caps(&self) -> CapPolicy {
        self.caps
    }

    pub fn coeff(&self, degree: usize) -> &LaurentPoly {
        &self.coeffs[degree]
    }

    fn check_factor(&self, f: &Factor) -> Result<(), LaurentError> {
        if self.circles == Circles::One && f.exps[1] != 0 {
            return Err(LaurentError::ShapeMismatch(
                "two-circle factor on one-circle series",
            ));
        }
        Ok(())
    }

    /// `self / (1 - σ t^a m)` via `c'_n = c_n + σ m c'_{n-a}`.
    pub fn divide_by_factor(&self, f: &Factor) -> Result<Self, LaurentError> {
        self.check_factor(f)?;
        let mut out = self.clone();
        for n in f.tpow..=self.order() {
            let (lo, hi) = out.coeffs.split_at_mut(n);
            hi[0].add_shifted(&lo[n - f.tpow], f.exps, f.sign, self.caps.hard(n), n)?;
        }
        Ok(out)
    }

    /// `self * (1 - σ t^a m)`.
    pub fn multiply_by_factor(&self, f: &Factor) -> Result<Self, LaurentError> {
        self.check_factor(f)?;
        let mut out = self.clone();
        for n in (f.tpow..=self.order()).rev() {
            let (lo, hi) = out.coeffs.split_at_mut(n);
            hi[0].add_shifted(&lo[n - f.tpow], f.exps, -f.sign, self.caps.hard(n), n)?;
        }
        Ok(out)
    }

    /// Multiplies every coefficient by the Weyl factor of each circle variable.
    pub fn multiply_weyl_factor(&self) -> Result<Self, LaurentError> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| {
                let grown = c.weyl();
                let hard = self.caps.hard(n);
                if grown.support_radius() > hard {
                    let (exponent, _) = grown
                        .terms()
                        .into_iter()
                        .find(|(e, _)| e[0].abs().max(e[1].abs()) > hard)
                        .expect("radius exceeds cap");
                    return Err(LaurentError::CapOverflow {
                        degree: n,
                        exponent,
                        cap: hard,
                    });
                }
                Ok(grown)
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            circles: self.circles,
            caps: self.caps,
            coeffs,
        })
    }

    /// Exponent-zero coefficient of every `t`-degree.
    pub fn constant_term(&self) -> TruncatedSeries {
        TruncatedSeries::from_rationals(
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.constant_term()))
                .collect(),
        )
    }
}

/// Streams `CT[ W · prod_i 1/(1 - σ_i t^{a_i} m_i) ]` degree by degree, where
/// `W` is the Weyl factor for the circle variables (or 1 when `weyl` is off).
///
/// Only the last `a_i` outputs of each division stage are retained, so memory
/// stays proportional to the number of factors times the exponent box.
pub fn streamed_constant_term(
    circles: Circles,
    factors: &[Factor],
    order: usize,
    weyl: bool,
) -> Result<TruncatedSeries, LaurentError> {
    if circles == Circles::One && factors.iter().any(|f| f.exps[1] != 0) {
        return Err(LaurentError::ShapeMismatch(
            "two-circle factor on one-circle series",
        ));
    }
    let caps = CapPolicy::for_factors(factors, Some(order));
    let mut history: Vec<VecDeque<LaurentPoly>> = factors
        .iter()
        .map(|f| VecDeque::with_capacity(f.tpow + 1))
        .collect();
    let mut out = Vec::with_capacity(order + 1);

    for n in 0..=order {
        let bound = caps.bound(n);
        let mut x = if n == 0 {
            LaurentPoly::constant(circles, bound, BigInt::one())
        } else {
            LaurentPoly::zero(circles, bound)
        };
        for (f, hist) in factors.iter().zip(history.iter_mut()) {
            if n >= f.tpow {
                let src = hist.front().expect("history holds degree n - a");
                x.add_shifted(src, f.exps, f.sign, caps.hard(n), n)?;
            }
            hist.push_back(x.clone());
            if hist.len() > f.tpow {
                hist.pop_front();
            }
        }
        let ct = if weyl {
            x.weyl().constant_term()
        } else {
            x.constant_term()
        };
        out.push(BigRational::from_integer(ct));
    }
    Ok(TruncatedSeries::from_rationals(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_ints(s: &TruncatedSeries) -> Vec<i64> {
        s.to_integers()
            .unwrap()
            .iter()
            .map(|c| i64::try_from(c).unwrap())
            .collect()
    }

    fn poly(circles: Circles, terms: &[([i64; 2], i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(circles, 6, terms).unwrap()
    }

    #[test]
    fn single_geometric_factor() {
        let s = LaurentSeries2::one(Circles::One, 3, CapPolicy::unpruned(1));
        let d = s.divide_by_factor(&Factor::one_circle(1, 1, 1)).unwrap();
        for m in 0..=3 {
            assert_eq!(d.coeff(m).terms(), vec![([m as i64, 0], BigInt::one())]);
        }
    }

    #[test]
    fn reciprocal_of_one_plus_t() {
        let s = LaurentSeries2::one(Circles::One, 2, CapPolicy::unpruned(0));
        let d = s.divide_by_factor(&Factor::one_circle(-1, 1, 0)).unwrap();
        assert_eq!(small_ints(&d.constant_term()), vec![1, -1, 1]);
    }

    #[test]
    fn two_geometric_factors_degree_two() {
        let s = LaurentSeries2::one(Circles::One, 2, CapPolicy::unpruned(1));
        let d = s
            .divide_by_factor(&Factor::one_circle(1, 1, 1))
            .unwrap()
            .divide_by_factor(&Factor::one_circle(1, 1, -1))
            .unwrap();
        let expect = poly(Circles::One, &[([2, 0], 1), ([0, 0], 1), ([-2, 0], 1)]);
        assert_eq!(d.coeff(2).terms(), expect.terms());
    }

    #[test]
    fn weyl_factor_on_constant_and_monomial() {
        let one = poly(Circles::One, &[([0, 0], 1)]).weyl();
        assert_eq!(
            one.terms(),
            vec![
                ([-1, 0], BigInt::from(-1)),
                ([0, 0], BigInt::from(2)),
                ([1, 0], BigInt::from(-1))
            ]
        );
        let z = poly(Circles::One, &[([1, 0], 1)]).weyl();
        assert_eq!(
            z.terms(),
            vec![
                ([0, 0], BigInt::from(-1)),
                ([1, 0], BigInt::from(2)),
                ([2, 0], BigInt::from(-1))
            ]
        );
    }

    #[test]
    fn two_circle_weyl_factor() {
        let w = poly(Circles::Two, &[([0, 0], 1)]).weyl();
        for a in -1..=1i64 {
            for b in -1..=1i64 {
                let fa = if a == 0 { 2 } else { -1 };
                let fb = if b == 0 { 2 } else { -1 };
                assert_eq!(w.get([a, b]), BigInt::from(fa * fb));
            }
        }
        assert_eq!(w.terms().len(), 9);
    }

    #[test]
    fn constant_term_reads_exponent_zero() {
        let caps = CapPolicy::unpruned(2);
        let s = LaurentSeries2::from_terms(
            Circles::One,
            caps,
            &[
                vec![([0, 0], 1)],
                vec![([1, 0], 1)],
                vec![([0, 0], 3), ([2, 0], 1)],
            ],
        )
        .unwrap();
        assert_eq!(small_ints(&s.constant_term()), vec![1, 0, 3]);
    }

    #[test]
    fn constant_term_of_conjugate_pair() {
        let s = LaurentSeries2::one(Circles::One, 4, CapPolicy::unpruned(1))
            .divide_by_factor(&Factor::one_circle(1, 1, 1))
            .unwrap()
            .divide_by_factor(&Factor::one_circle(1, 1, -1))
            .unwrap();
        assert_eq!(small_ints(&s.constant_term()), vec![1, 0, 1, 0, 1]);
    }

    #[test]
    fn cap_overflow_is_reported() {
        let s = LaurentSeries2::one(Circles::One, 3, CapPolicy::unpruned(1));
        let err = s
            .divide_by_factor(&Factor::one_circle(1, 1, 4))
            .unwrap_err();
        assert!(matches!(err, LaurentError::CapOverflow { degree: 1, .. }));
    }

    #[test]
    fn one_circle_rejects_second_variable() {
        let s = LaurentSeries2::one(Circles::One, 2, CapPolicy::unpruned(1));
        assert!(matches!(
            s.divide_by_factor(&Factor::two_circle(1, 1, 0, 1)),
            Err(LaurentError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn slope_rounds_up() {
        assert_eq!(Factor::one_circle(1, 2, 3).slope(), 2);
        assert_eq!(Factor::one_circle(1, 2, 1).slope(), 1);
        assert_eq!(Factor::two_circle(1, 1, -2, 1).slope(), 2);
        assert_eq!(Factor::one_circle(1, 1, 0).slope(), 0);
    }

    #[test]
    fn pruned_bounds_shrink_toward_target() {
        let caps = CapPolicy::pruned(2, 10);
        assert_eq!(caps.bound(0), 2);
        assert_eq!(caps.bound(3), 8);
        assert_eq!(caps.bound(5), 12);
        assert_eq!(caps.bound(9), 4);
        assert_eq!(caps.bound(10), 2);
    }
}

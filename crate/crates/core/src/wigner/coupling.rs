//! Exact Clebsch–Gordan coefficients and Wigner 3j symbols.
//!
//! Both are computed from the Racah closed-form sum in big-rational arithmetic
//! and returned as [`Surd`]s. Phases follow the Condon–Shortley convention.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::surd::Surd;
use super::WignerError;

/// A half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub fn from_int(n: i64) -> Self {
        Self(2 * n)
    }

    pub fn from_doubled(twice: i64) -> Self {
        Self(twice)
    }

    pub fn doubled(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Integer value; panics on a proper half-integer.
    pub fn as_int(self) -> i64 {
        assert!(self.is_integer(), "{self} is not an integer");
        self.0 / 2
    }

    pub fn abs(self) -> Self {
        Self(self.0.abs())
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Arguments of a 3j symbol `(j1 j2 j3; m1 m2 m3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThreeJKey {
    pub j: [HalfInt; 3],
    pub m: [HalfInt; 3],
}

impl ThreeJKey {
    pub fn new(j: [HalfInt; 3], m: [HalfInt; 3]) -> Self {
        Self { j, m }
    }

    /// Key with integer arguments.
    pub fn ints(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> Self {
        Self {
            j: [j1, j2, j3].map(HalfInt::from_int),
            m: [m1, m2, m3].map(HalfInt::from_int),
        }
    }

    /// Columns permuted so that column `i` of the result is column `perm[i]` of `self`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        Self {
            j: perm.map(|p| self.j[p]),
            m: perm.map(|p| self.m[p]),
        }
    }

    pub fn flipped(&self) -> Self {
        Self {
            j: self.j,
            m: self.m.map(|m| -m),
        }
    }

    pub fn validate(&self) -> Result<(), WignerError> {
        for (j, m) in self.j.iter().zip(&self.m) {
            check_spin(*j, *m)?;
        }
        Ok(())
    }

    /// `j1 + j2 + j3` is an integer.
    fn j_sum_is_integer(&self) -> bool {
        (self.j[0] + self.j[1] + self.j[2]).is_integer()
    }

    /// Representative of the 12-element symmetry class of column permutations
    /// and the overall sign flip, with the phase relating the two symbols.
    ///
    /// Returns `(canonical, odd)` with `self = (-1)^odd * canonical`.
    pub fn canonical(&self) -> (ThreeJKey, bool) {
        const PERMS: [([usize; 3], bool); 6] = [
            ([0, 1, 2], false),
            ([1, 2, 0], false),
            ([2, 0, 1], false),
            ([1, 0, 2], true),
            ([0, 2, 1], true),
            ([2, 1, 0], true),
        ];
        let big_j_odd =
            self.j_sum_is_integer() && (self.j[0] + self.j[1] + self.j[2]).as_int() % 2 != 0;
        let mut best = (*self, false);
        for (perm, odd_perm) in PERMS {
            for flip in [false, true] {
                let mut k = self.permuted(perm);
                if flip {
                    k = k.flipped();
                }
                let odd = big_j_odd && (odd_perm ^ flip);
                if k < best.0 {
                    best = (k, odd);
                }
            }
        }
        best
    }
}

impl fmt::Display for ThreeJKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} {} {}; {} {} {})",
            self.j[0], self.j[1], self.j[2], self.m[0], self.m[1], self.m[2]
        )
    }
}

fn check_spin(j: HalfInt, m: HalfInt) -> Result<(), WignerError> {
    if j.doubled() < 0 || !(j + m).is_integer() {
        return Err(WignerError::InvalidSpin { j, m });
    }
    Ok(())
}

fn factorial(n: i64) -> BigInt {
    debug_assert!(n >= 0);
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn triangle(j1: HalfInt, j2: HalfInt, j: HalfInt) -> bool {
    j >= (j1 - j2).abs() && j <= j1 + j2 && (j1 + j2 + j).is_integer()
}

/// `⟨j m | j1 m1; j2 m2⟩` by the Racah formula.
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<Surd, WignerError> {
    check_spin(j1, m1)?;
    check_spin(j2, m2)?;
    check_spin(j, m)?;
    if m1 + m2 != m || m1.abs() > j1 || m2.abs() > j2 || m.abs() > j || !triangle(j1, j2, j) {
        return Ok(Surd::zero());
    }
    let i = |h: HalfInt| h.as_int();
    let prefactor = BigRational::new(
        BigInt::from(i(j + j) + 1)
            * factorial(i(j1 + j2 - j))
            * factorial(i(j1 - j2 + j))
            * factorial(i(-j1 + j2 + j))
            * factorial(i(j + m))
            * factorial(i(j - m))
            * factorial(i(j1 - m1))
            * factorial(i(j1 + m1))
            * factorial(i(j2 - m2))
            * factorial(i(j2 + m2)),
        factorial(i(j1 + j2 + j) + 1),
    );

    let args = |k: i64| {
        [
            k,
            i(j1 + j2 - j) - k,
            i(j1 - m1) - k,
            i(j2 + m2) - k,
            i(j - j2 + m1) + k,
            i(j - j1 - m2) + k,
        ]
    };
    let mut sum = BigRational::zero();
    for k in 0..=i(j1 + j2 - j) {
        let a = args(k);
        if a.iter().any(|&x| x < 0) {
            continue;
        }
        let den: BigInt = a.iter().map(|&x| factorial(x)).product();
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let sign = if sum.is_zero() {
        0
    } else if sum.is_negative() {
        -1
    } else {
        1
    };
    Ok(Surd::new(sign, prefactor * &sum * &sum))
}

/// Wigner 3j symbol computed directly from its Clebsch–Gordan form, bypassing
/// the cache.
pub fn three_j_uncached(key: &ThreeJKey) -> Result<Surd, WignerError> {
    key.validate()?;
    let [j1, j2, j3] = key.j;
    let [m1, m2, m3] = key.m;
    if (m1 + m2 + m3).doubled() != 0 || !triangle(j1, j2, j3) {
        return Ok(Surd::zero());
    }
    let cg = clebsch_gordan(j1, m1, j2, m2, j3, -m3)?;
    let phase_odd = (j1 - j2 - m3).as_int().rem_euclid(2) == 1;
    let scale = Surd::new(
        1,
        BigRational::new(BigInt::one(), BigInt::from(j3.doubled() + 1)),
    );
    Ok((&cg * &scale).with_phase(phase_odd))
}

fn cache() -> &'static RwLock<HashMap<ThreeJKey, Surd>> {
    static CACHE: OnceLock<RwLock<HashMap<ThreeJKey, Surd>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Wigner 3j symbol, memoised on the symmetry-canonical key.
pub fn three_j(key: &ThreeJKey) -> Result<Surd, WignerError> {
    key.validate()?;
    let (canon, odd) = key.canonical();
    if let Some(v) = cache().read().expect("3j cache poisoned").get(&canon) {
        return Ok(v.clone().with_phase(odd));
    }
    let v = three_j_uncached(&canon)?;
    cache()
        .write()
        .expect("3j cache poisoned")
        .entry(canon)
        .or_insert_with(|| v.clone());
    Ok(v.with_phase(odd))
}

/// Unitary change of basis from `|j1 m1⟩|j2 m2⟩` to the coupled `|j m⟩` basis.
///
/// Rows are ordered by `j = |j1 - j2| ..= j1 + j2`, then `m = -j ..= j`; columns
/// by `m1` then `m2`, both ascending, matching the Kronecker product ordering.
#[derive(Clone, Debug)]
pub struct CgMatrix {
    pub j1: HalfInt,
    pub j2: HalfInt,
    pub rows: Vec<(HalfInt, HalfInt)>,
    pub cols: Vec<(HalfInt, HalfInt)>,
    pub entries: Vec<Vec<Surd>>,
}

fn spin_range(j: HalfInt) -> impl Iterator<Item = HalfInt> {
    (-j.doubled()..=j.doubled())
        .step_by(2)
        .map(HalfInt::from_doubled)
}

impl CgMatrix {
    pub fn new(j1: HalfInt, j2: HalfInt) -> Result<Self, WignerError> {
        check_spin(j1, j1)?;
        check_spin(j2, j2)?;
        let mut rows = Vec::new();
        let mut j = (j1 - j2).abs();
        while j <= j1 + j2 {
            rows.extend(spin_range(j).map(|m| (j, m)));
            j = j + HalfInt::from_int(1);
        }
        let cols: Vec<_> = spin_range(j1)
            .flat_map(|m1| spin_range(j2).map(move |m2| (m1, m2)))
            .collect();
        let entries = rows
            .iter()
            .map(|&(j, m)| {
                cols.iter()
                    .map(|&(m1, m2)| clebsch_gordan(j1, m1, j2, m2, j, m))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            j1,
            j2,
            rows,
            cols,
            entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        nalgebra::DMatrix::from_fn(n, n, |r, c| self.entries[r][c].to_f64())
    }

    /// Rows belonging to the block of total spin `j`.
    pub fn block_rows(&self, j: HalfInt) -> std::ops::Range<usize> {
        let start = self.rows.iter().position(|&(jj, _)| jj == j).unwrap_or(0);
        let len = self.rows.iter().filter(|&&(jj, _)| jj == j).count();
        start..start + len
    }

    /// Largest deviation of `C C^T` from the identity. Each entry is a sum of
    /// products of surds; terms are accumulated exactly when every product is
    /// rational and in floating point otherwise.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let products: Vec<Surd> = (0..n)
                    .map(|k| &self.entries[a][k] * &self.entries[b][k])
                    .collect();
                let expect = if a == b { 1.0 } else { 0.0 };
                let dev = match products
                    .iter()
                    .map(Surd::to_rational)
                    .collect::<Option<Vec<_>>>()
                {
                    Some(qs) => {
                        let total: BigRational = qs.into_iter().sum();
                        let target = if a == b {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        };
                        if total == target {
                            0.0
                        } else {
                            f64::INFINITY
                        }
                    }
                    None => (products.iter().map(Surd::to_f64).sum::<f64>() - expect).abs(),
                };
                worst = worst.max(dev);
            }
        }
        worst
    }
}

/// Every key with `j_i ≤ max_j` (half-integers included) that satisfies the
/// triangle and projection selection rules.
pub fn admissible_keys(max_j: HalfInt) -> Vec<ThreeJKey> {
    let top = max_j.doubled();
    let mut keys = Vec::new();
    for a in 0..=top {
        for b in 0..=top {
            for c in 0..=top {
                let j = [a, b, c].map(HalfInt::from_doubled);
                if !triangle(j[0], j[1], j[2]) {
                    continue;
                }
                for m1 in (-a..=a).step_by(2) {
                    for m2 in (-b..=b).step_by(2) {
                        let m3 = -m1 - m2;
                        if m3.abs() <= c && (m3 - c) % 2 == 0 {
                            keys.push(ThreeJKey::new(j, [m1, m2, m3].map(HalfInt::from_doubled)));
                        }
                    }
                }
            }
        }
    }
    keys
}

/// Keys for which a column permutation or the sign flip fails to reproduce
/// the symbol with phase `(-1)^{j1+j2+j3}` for odd operations, or for which
/// the cached and uncached values differ. All comparisons are exact.
pub fn symmetry_violations(keys: &[ThreeJKey]) -> Vec<ThreeJKey> {
    keys.iter()
        .filter(|key| {
            let v = |k: &ThreeJKey| three_j_uncached(k).expect("admissible key");
            let base = v(key);
            let odd = (key.j[0] + key.j[1] + key.j[2]).as_int().rem_euclid(2) == 1;
            let even_ok = [[1, 2, 0], [2, 0, 1]]
                .iter()
                .all(|&p| v(&key.permuted(p)) == base);
            let odd_ok = [[1, 0, 2], [0, 2, 1], [2, 1, 0]]
                .iter()
                .all(|&p| v(&key.permuted(p)) == base.clone().with_phase(odd));
            let flip_ok = v(&key.flipped()) == base.clone().with_phase(odd);
            let cache_ok = three_j(key).expect("admissible key") == base;
            !(even_ok && odd_ok && flip_ok && cache_ok)
        })
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n: i64) -> HalfInt {
        HalfInt::from_int(n)
    }

    #[test]
    fn special_case_j_zero() {
        let v = clebsch_gordan(h(2), h(1), h(2), h(-1), h(0), h(0)).unwrap();
        assert_eq!(v, Surd::from_parts(-1, 1, 5));
        let z = clebsch_gordan(h(2), h(1), h(2), h(1), h(0), h(0)).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn stretched_state() {
        let v = clebsch_gordan(h(2), h(2), h(2), h(2), h(4), h(4)).unwrap();
        assert_eq!(v, Surd::one());
    }

    #[test]
    fn invalid_spin_rejected() {
        let err = clebsch_gordan(h(1), HalfInt::from_doubled(1), h(1), h(0), h(1), h(0));
        assert!(matches!(err, Err(WignerError::InvalidSpin { .. })));
    }

    #[test]
    fn half_integer_couplings() {
        // (1/2 1/2 1; 1/2 -1/2 0) = sqrt(1/6)
        let half = HalfInt::from_doubled(1);
        let key = ThreeJKey::new([half, half, h(1)], [half, -half, h(0)]);
        assert_eq!(three_j(&key).unwrap(), Surd::from_parts(1, 1, 6));
    }

    #[test]
    fn canonical_phase_is_consistent() {
        let key = ThreeJKey::ints(2, 2, 1, 2, -2, 0);
        let (canon, odd) = key.canonical();
        let direct = three_j_uncached(&key).unwrap();
        assert_eq!(three_j_uncached(&canon).unwrap().with_phase(odd), direct);
    }

    #[test]
    fn cg_matrix_shape() {
        let c = CgMatrix::new(h(1), h(2)).unwrap();
        assert_eq!(c.dim(), 15);
        assert_eq!(c.rows.len(), 15);
        assert_eq!(c.block_rows(h(2)), 3..8);
    }
}

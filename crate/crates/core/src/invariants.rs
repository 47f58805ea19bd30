//! Order tensors, the `SO(3) ≀ Z₂` action on them, and the explicit
//! invariants of degree 2, 3 and 4.
//!
//! An order tensor is a complex `(2ℓ+1) × (2ℓ+1)` matrix `S_{mm'}` in the
//! spherical basis with `S*_{mm'} = (-1)^{m+m'} S_{-m,-m'}`; it carries
//! `(2ℓ+1)²` real parameters. `(g, h)` acts by `S ↦ D(g) S D(h)^†` and the
//! transposition by `(τS)_{mm'} = (-1)^{m+m'} S_{-m',-m}`.

use std::sync::OnceLock;

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::wigner::{reality_defect, three_j, wigner_d, Euler, ThreeJKey};

/// Tolerance on the reality condition for tensors built from raw entries.
pub const REALITY_TOL: f64 = 1e-12;
/// Largest imaginary part accepted for a quantity that is real in theory.
pub const IMAG_TOL: f64 = 1e-9;
/// Relative singular-value cutoff for numerical rank.
pub const RANK_CUTOFF: f64 = 1e-8;
/// Minimum factor by which singular values must clear the cutoff.
pub const RANK_GAP: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InvariantsError {
    #[error("only l = {expected} is supported here, got l = {got}")]
    UnsupportedEll { expected: usize, got: usize },
    #[error("matrix is {rows}x{cols}, expected a square matrix of odd size")]
    BadShape { rows: usize, cols: usize },
    #[error("reality condition violated by {defect:e}")]
    RealityViolation { defect: f64 },
    #[error("{what} has imaginary part {imag:e}")]
    NonRealResult { what: String, imag: f64 },
    #[error("supertensor index ({j}, {jp}) out of range 0..=4")]
    BadCoupling { j: usize, jp: usize },
    #[error("rank needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("numerical rank is ambiguous: singular values {above:e} and {below:e} around cutoff {cutoff:e}")]
    RankUnstable { above: f64, below: f64, cutoff: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderTensor {
    ell: usize,
    entries: DMatrix<Complex64>,
}

impl OrderTensor {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self, InvariantsError> {
        let (rows, cols) = entries.shape();
        if rows != cols || rows % 2 == 0 {
            return Err(InvariantsError::BadShape { rows, cols });
        }
        let defect = reality_defect(&entries);
        let scale = entries.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if defect > REALITY_TOL * scale {
            return Err(InvariantsError::RealityViolation { defect });
        }
        Ok(Self {
            ell: (rows - 1) / 2,
            entries,
        })
    }

    pub fn zero(ell: usize) -> Self {
        let n = 2 * ell + 1;
        Self {
            ell,
            entries: DMatrix::zeros(n, n),
        }
    }

    /// Gaussian entries projected onto the real subspace: each entry whose
    /// row-major index precedes its mirror `(-m,-m')` is drawn freely and the
    /// mirror is overwritten; the central entry is made real.
    pub fn random<R: Rng + ?Sized>(ell: usize, rng: &mut R) -> Self {
        let n = 2 * ell + 1;
        let mut s = DMatrix::<Complex64>::zeros(n, n);
        let mut draw = || -> f64 { rng.sample(StandardNormal) };
        for i in 0..n * n {
            let (r, c) = (i / n, i % n);
            let mirror = n * n - 1 - i;
            let z = Complex64::new(draw(), draw());
            if i < mirror {
                s[(r, c)] = z;
                let sign = if (r + c) % 2 == 0 { 1.0 } else { -1.0 };
                s[(n - 1 - r, n - 1 - c)] = z.conj() * sign;
            } else if i == mirror {
                s[(r, c)] = Complex64::new(z.re, 0.0);
            }
        }
        Self { ell, entries: s }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Entry `S_{m m'}` with `m, m' ∈ [-ℓ, ℓ]`.
    pub fn get(&self, m: i64, mp: i64) -> Complex64 {
        let l = self.ell as i64;
        self.entries[((m + l) as usize, (mp + l) as usize)]
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            ell: self.ell,
            entries: &self.entries * Complex64::new(lambda, 0.0),
        }
    }

    pub fn reality_defect(&self) -> f64 {
        reality_defect(&self.entries)
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.entries - &other.entries).norm()
    }
}

/// Deterministic random order tensor for a seed.
pub fn random_order_tensor(ell: usize, seed: u64) -> OrderTensor {
    OrderTensor::random(ell, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn act_gamma0(g: Euler, h: Euler, s: &OrderTensor) -> OrderTensor {
    let dg = wigner_d(s.ell, g).matrix;
    let dh = wigner_d(s.ell, h).matrix;
    OrderTensor {
        ell: s.ell,
        entries: dg * &s.entries * dh.adjoint(),
    }
}

pub fn act_tau(s: &OrderTensor) -> OrderTensor {
    let n = 2 * s.ell + 1;
    let entries = DMatrix::from_fn(n, n, |r, c| {
        let sign = if (r + c) % 2 == 0 { 1.0 } else { -1.0 };
        s.entries[(n - 1 - c, n - 1 - r)] * sign
    });
    OrderTensor {
        ell: s.ell,
        entries,
    }
}

/// `I₂ = ‖S‖²`.
pub fn inv2(s: &OrderTensor) -> f64 {
    s.entries.norm_squared()
}

fn require_ell2(s: &OrderTensor) -> Result<(), InvariantsError> {
    if s.ell == 2 {
        Ok(())
    } else {
        Err(InvariantsError::UnsupportedEll {
            expected: 2,
            got: s.ell,
        })
    }
}

fn real_part(z: Complex64, scale: f64, what: impl Into<String>) -> Result<f64, InvariantsError> {
    if z.im.abs() > IMAG_TOL * scale.max(1.0) {
        return Err(InvariantsError::NonRealResult {
            what: what.into(),
            imag: z.im,
        });
    }
    Ok(z.re)
}

/// `(2 2 j; m1 m2 k)` as `f64`, indexed `[j][m1+2][m2+2]` with `k = -m1-m2`.
type ThreeJTable = [[[f64; 5]; 5]; 5];

fn table() -> &'static ThreeJTable {
    static TABLE: OnceLock<ThreeJTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[[0.0; 5]; 5]; 5];
        for (j, tj) in t.iter_mut().enumerate() {
            for m1 in -2i64..=2 {
                for m2 in -2i64..=2 {
                    let k = -m1 - m2;
                    if k.abs() <= j as i64 {
                        let key = ThreeJKey::ints(2, 2, j as i64, m1, m2, k);
                        tj[(m1 + 2) as usize][(m2 + 2) as usize] =
                            three_j(&key).expect("valid spins").to_f64();
                    }
                }
            }
        }
        t
    })
}

fn w(j: usize, m1: i64, m2: i64) -> f64 {
    table()[j][(m1 + 2) as usize][(m2 + 2) as usize]
}

/// `I₃ = Σ (2 2 2; m₁ m₂ m₃)(2 2 2; m₁' m₂' m₃') S_{m₁m₁'} S_{m₂m₂'} S_{m₃m₃'}`.
pub fn inv3(s: &OrderTensor) -> Result<f64, InvariantsError> {
    require_ell2(s)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for m1 in -2i64..=2 {
        for m2 in -2i64..=2 {
            let m3 = -m1 - m2;
            if m3.abs() > 2 {
                continue;
            }
            let a = w(2, m1, m2);
            if a == 0.0 {
                continue;
            }
            for p1 in -2i64..=2 {
                for p2 in -2i64..=2 {
                    let p3 = -p1 - p2;
                    if p3.abs() > 2 {
                        continue;
                    }
                    let coef = a * w(2, p1, p2);
                    acc += s.get(m1, p1) * s.get(m2, p2) * s.get(m3, p3) * coef;
                }
            }
        }
    }
    real_part(acc, inv2(s).powf(1.5), "I3")
}

/// `U^{(j,j')}_{kk'}` for `k ∈ [-j, j]`, `k' ∈ [-j', j']`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperTensor {
    pub j: usize,
    pub jp: usize,
    entries: DMatrix<Complex64>,
}

impl SuperTensor {
    pub fn get(&self, k: i64, kp: i64) -> Complex64 {
        self.entries[((k + self.j as i64) as usize, (kp + self.jp as i64) as usize)]
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// `max |U*_{kk'} - (-1)^{k+k'} U_{-k,-k'}|`.
    pub fn conjugation_defect(&self) -> f64 {
        reality_defect(&self.entries)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn supertensor(s: &OrderTensor, j: usize, jp: usize) -> Result<SuperTensor, InvariantsError> {
    require_ell2(s)?;
    if j > 4 || jp > 4 {
        return Err(InvariantsError::BadCoupling { j, jp });
    }
    let entries = DMatrix::from_fn(2 * j + 1, 2 * jp + 1, |r, c| {
        let (k, kp) = (r as i64 - j as i64, c as i64 - jp as i64);
        let mut acc = Complex64::new(0.0, 0.0);
        for m1 in -2i64..=2 {
            let m2 = -m1 - k;
            if m2.abs() > 2 {
                continue;
            }
            let a = w(j, m1, m2);
            if a == 0.0 {
                continue;
            }
            for p1 in -2i64..=2 {
                let p2 = -p1 - kp;
                if p2.abs() > 2 {
                    continue;
                }
                acc += s.get(m1, p1) * s.get(m2, p2) * (a * w(jp, p1, p2));
            }
        }
        acc
    });
    Ok(SuperTensor { j, jp, entries })
}

/// `I₄^{(j,j')} = Σ (-1)^{k+k'} U_{kk'} U_{-k,-k'}`.
pub fn contract(u: &SuperTensor) -> Complex64 {
    let (j, jp) = (u.j as i64, u.jp as i64);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in -j..=j {
        for kp in -jp..=jp {
            let sign = if (k + kp) % 2 == 0 { 1.0 } else { -1.0 };
            acc += u.get(k, kp) * u.get(-k, -kp) * sign;
        }
    }
    acc
}

pub fn inv4(s: &OrderTensor, j: usize, jp: usize) -> Result<f64, InvariantsError> {
    let u = supertensor(s, j, jp)?;
    real_part(contract(&u), inv2(s).powi(2), format!("I4({j},{jp})"))
}

/// `I₄^{[j,j']}`, the part of `I₄^{(j,j')}` even under `j ↔ j'`.
pub fn inv4_sym(s: &OrderTensor, j: usize, jp: usize) -> Result<f64, InvariantsError> {
    Ok(0.5 * (inv4(s, j, jp)? + inv4(s, jp, j)?))
}

/// `I₄^{{j,j'}}`, the part of `I₄^{(j,j')}` odd under `j ↔ j'`.
pub fn inv4_skew(s: &OrderTensor, j: usize, jp: usize) -> Result<f64, InvariantsError> {
    Ok(0.5 * (inv4(s, j, jp)? - inv4(s, jp, j)?))
}

/// All 25 values `I₄^{(j,j')}`, `[j][j']`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuarticValues(pub [[f64; 5]; 5]);

impl QuarticValues {
    pub fn of(s: &OrderTensor) -> Result<Self, InvariantsError> {
        let mut v = [[0.0; 5]; 5];
        for (j, row) in v.iter_mut().enumerate() {
            for (jp, x) in row.iter_mut().enumerate() {
                *x = inv4(s, j, jp)?;
            }
        }
        Ok(Self(v))
    }

    pub fn get(&self, q: Quartic) -> f64 {
        let v = &self.0;
        match q {
            Quartic::Diag(j) => v[j][j],
            Quartic::Sym(j, jp) => 0.5 * (v[j][jp] + v[jp][j]),
            Quartic::Skew(j, jp) => 0.5 * (v[j][jp] - v[jp][j]),
        }
    }
}

/// A named quartic candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Quartic {
    Diag(usize),
    Sym(usize, usize),
    Skew(usize, usize),
}

impl Quartic {
    /// `+1` if the candidate is fixed by `τ`, `-1` if it changes sign.
    pub fn tau_parity(self) -> f64 {
        match self {
            Quartic::Skew(..) => -1.0,
            _ => 1.0,
        }
    }

    pub fn label(self) -> String {
        match self {
            Quartic::Diag(j) => format!("I4({j},{j})"),
            Quartic::Sym(j, jp) => format!("I4[{j},{jp}]"),
            Quartic::Skew(j, jp) => format!("I4{{{j},{jp}}}"),
        }
    }
}

const OFF_DIAGONAL: [(usize, usize); 4] = [(0, 2), (0, 4), (1, 3), (2, 4)];

/// The 13 candidates left after discarding `j + j'` odd.
pub fn quartic_candidates() -> Vec<Quartic> {
    (0..5)
        .map(Quartic::Diag)
        .chain(OFF_DIAGONAL.iter().map(|&(a, b)| Quartic::Sym(a, b)))
        .chain(OFF_DIAGONAL.iter().map(|&(a, b)| Quartic::Skew(a, b)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CandidateSubset {
    All13,
    TauInvariant,
}

impl CandidateSubset {
    pub fn members(self) -> Vec<Quartic> {
        let all = quartic_candidates();
        match self {
            CandidateSubset::All13 => all,
            CandidateSubset::TauInvariant => {
                all.into_iter().filter(|q| q.tau_parity() > 0.0).collect()
            }
        }
    }
}

/// Linear relations among the quartic candidates, as `(coefficient, term)`.
pub fn quartic_identities() -> Vec<Vec<(f64, Quartic)>> {
    use Quartic::*;
    let diag = |c: [f64; 4]| -> Vec<(f64, Quartic)> { (0..4).map(|j| (c[j], Diag(j))).collect() };
    let with = |mut v: Vec<(f64, Quartic)>, c: f64, q: Quartic| {
        v.push((c, q));
        v
    };
    vec![
        with(diag([4.0, 9.0, 5.0, -14.0]), -54.0, Diag(4)),
        with(diag([60.0, 9.0, 245.0, -784.0]), -280.0, Sym(0, 2)),
        with(diag([212.0, -909.0, 2695.0, -3136.0]), -1512.0, Sym(0, 4)),
        with(diag([100.0, 99.0, -1225.0, 784.0]), -1008.0, Sym(1, 3)),
        with(diag([220.0, -387.0, -535.0, 112.0]), -2160.0, Sym(2, 4)),
        vec![(5.0, Skew(0, 2)), (-9.0, Skew(0, 4))],
        vec![(5.0, Skew(0, 2)), (-6.0, Skew(1, 3))],
        vec![(7.0, Skew(0, 2)), (18.0, Skew(2, 4))],
    ]
}

/// The three skew relations with the sign of the second term reversed, which
/// is the form that holds for `U` and `I₄` as defined above.
pub fn skew_identities_reversed() -> Vec<Vec<(f64, Quartic)>> {
    use Quartic::*;
    vec![
        vec![(5.0, Skew(0, 2)), (9.0, Skew(0, 4))],
        vec![(5.0, Skew(0, 2)), (6.0, Skew(1, 3))],
        vec![(7.0, Skew(0, 2)), (-18.0, Skew(2, 4))],
    ]
}

/// Residual of one linear identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub absolute: f64,
    /// Largest `|coefficient × term|` in the combination.
    pub scale: f64,
}

impl IdentityResidual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.absolute
        } else {
            self.absolute / self.scale
        }
    }
}

pub fn identity_residuals(
    s: &OrderTensor,
    identities: &[Vec<(f64, Quartic)>],
) -> Result<Vec<IdentityResidual>, InvariantsError> {
    let vals = QuarticValues::of(s)?;
    Ok(identities
        .iter()
        .map(|terms| {
            let parts: Vec<f64> = terms.iter().map(|&(c, q)| c * vals.get(q)).collect();
            IdentityResidual {
                absolute: parts.iter().sum::<f64>().abs(),
                scale: parts.iter().map(|x| x.abs()).fold(0.0, f64::max),
            }
        })
        .collect())
}

/// Residuals of the eight relations of [`quartic_identities`].
pub fn verify_identities(s: &OrderTensor) -> Result<Vec<IdentityResidual>, InvariantsError> {
    identity_residuals(s, &quartic_identities())
}

/// Numerical rank of the columns of `m` after scaling each to unit norm.
pub fn numerical_rank(m: &DMatrix<f64>) -> Result<usize, InvariantsError> {
    let mut m = m.clone();
    for mut col in m.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col /= n;
        }
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    let cutoff = RANK_CUTOFF * top;
    let rank = sv.iter().take_while(|&&x| x > cutoff).count();
    let above = sv[rank - 1];
    let below = sv.get(rank).copied().unwrap_or(0.0);
    if above < RANK_GAP * cutoff || below * RANK_GAP > cutoff {
        return Err(InvariantsError::RankUnstable {
            above,
            below,
            cutoff,
        });
    }
    Ok(rank)
}

pub const MIN_RANK_SAMPLES: usize = 20;

/// Rank of the candidate quartics evaluated on `n_samples` random tensors.
pub fn degree4_rank(
    n_samples: usize,
    seed: u64,
    subset: CandidateSubset,
) -> Result<usize, InvariantsError> {
    if n_samples < MIN_RANK_SAMPLES {
        return Err(InvariantsError::TooFewSamples {
            min: MIN_RANK_SAMPLES,
            got: n_samples,
        });
    }
    let members = subset.members();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tensors: Vec<_> = (0..n_samples)
        .map(|_| OrderTensor::random(2, &mut rng))
        .collect();
    let mut m = DMatrix::zeros(n_samples, members.len());
    for (r, s) in tensors.iter().enumerate() {
        let vals = QuarticValues::of(s)?;
        for (c, &q) in members.iter().enumerate() {
            m[(r, c)] = vals.get(q);
        }
    }
    numerical_rank(&m)
}

/// Rank of the space spanned by the given invariant across random tensors.
pub fn value_rank<F>(
    ell: usize,
    n_samples: usize,
    seed: u64,
    f: F,
) -> Result<usize, InvariantsError>
where
    F: Fn(&OrderTensor) -> Result<f64, InvariantsError>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::zeros(n_samples, 1);
    for r in 0..n_samples {
        m[(r, 0)] = f(&OrderTensor::random(ell, &mut rng))?;
    }
    numerical_rank(&m)
}

/// `(tr AᵀA, det A, tr (AᵀA)²)`.
pub fn ell1_invariants(a: &Matrix3<f64>) -> (f64, f64, f64) {
    let b = a.transpose() * a;
    (b.trace(), a.determinant(), (b * b).trace())
}

/// `tr (AᵀA)³` from the characteristic polynomial of `B = AᵀA`:
/// `B³ = e₁B² - e₂B + e₃`, with `e₁ = i₂`, `e₂ = (i₂² - i₄)/2`, `e₃ = i₃²`.
pub fn cayley_hamilton_trace_cube(i2: f64, i3: f64, i4: f64) -> f64 {
    let e2 = 0.5 * (i2 * i2 - i4);
    i2 * i4 - e2 * i2 + 3.0 * i3 * i3
}

/// Relative gap between `tr (AᵀA)³` and its Cayley–Hamilton expression.
pub fn cayley_hamilton_residual(a: &Matrix3<f64>) -> f64 {
    let b = a.transpose() * a;
    let direct = (b * b * b).trace();
    let (i2, i3, i4) = ell1_invariants(a);
    (direct - cayley_hamilton_trace_cube(i2, i3, i4)).abs() / direct.abs().max(1.0)
}

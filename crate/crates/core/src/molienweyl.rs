//! Molien series of `SO(3) ≀ Z₂` acting on `L(V, V)` with `V = V^(ℓ)`, ℓ = 1, 2.
//!
//! The group splits into the subgroup `Γ₀ = SO(3) × SO(3)` and the coset
//! `Γ₁ = Γ₀ τ`. On `Γ₀` the Molien integrand is a class function of the two
//! rotation angles `θ, φ`, and on `Γ₁` it depends only on the angle `ψ` of the
//! product `MN`. Weyl integration turns each into a torus integral
//!
//! ```text
//! P_Γ₀(t) = 1/4 CT_{z,w} [ (2-z-1/z)(2-w-1/w) / ∏_{j,k} (1 - t z^j w^k) ]
//! P_Γ₁(t) = 1/2 CT_v     [ (2-v-1/v) / det(I - t D̃((M,N)τ)) ]
//! ```
//!
//! and `P_Γ = (P_Γ₀ + P_Γ₁) / 2`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

use crate::laurent::{streamed_constant_term, Circles, Factor, LaurentError};
use crate::seriesring::TruncatedSeries;
use crate::wigner::{rotation_angle, wigner_d, Euler, HalfInt};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MolienError {
    #[error("only l = 1 and l = 2 are supported, got {0}")]
    UnsupportedEll(usize),
    #[error("{group} l={ell}: coefficient of t^{degree} is {value}, not a nonnegative integer")]
    NormalizationFailure {
        group: &'static str,
        ell: usize,
        degree: usize,
        value: BigRational,
    },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Coset {
    Gamma0,
    Gamma1,
}

impl Coset {
    pub fn name(self) -> &'static str {
        match self {
            Coset::Gamma0 => "gamma0",
            Coset::Gamma1 => "gamma1",
        }
    }
}

/// Factorised `det(I - t D̃(g))` on one coset, plus the Weyl normalisation.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetSpec {
    pub ell: usize,
    pub coset: Coset,
    /// Factors free of circle variables, `(1 - σ t^a)`.
    pub scalar_prefactor: Vec<Factor>,
    pub circle_factors: Vec<Factor>,
    pub circles: Circles,
    pub normalization: BigRational,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn repeat(f: Factor, n: usize) -> impl Iterator<Item = Factor> {
    std::iter::repeat_n(f, n)
}

impl CosetSpec {
    pub fn new(ell: usize, coset: Coset) -> Result<Self, MolienError> {
        if !(1..=2).contains(&ell) {
            return Err(MolienError::UnsupportedEll(ell));
        }
        let spec = match coset {
            Coset::Gamma0 => {
                let l = ell as i64;
                let circle_factors = (-l..=l)
                    .flat_map(|j| (-l..=l).map(move |k| Factor::two_circle(1, 1, j, k)))
                    .collect();
                Self {
                    ell,
                    coset,
                    scalar_prefactor: Vec::new(),
                    circle_factors,
                    circles: Circles::Two,
                    normalization: rat(1, 4),
                }
            }
            Coset::Gamma1 => {
                let v = |sign, tpow, b| Factor::one_circle(sign, tpow, b);
                let (scalar_prefactor, circle_factors): (Vec<_>, Vec<_>) = if ell == 1 {
                    (
                        // (1-t)^2 (1+t)
                        repeat(v(1, 1, 0), 2)
                            .chain(repeat(v(-1, 1, 0), 1))
                            .collect(),
                        vec![v(1, 1, 1), v(1, 1, -1), v(1, 2, 1), v(1, 2, -1)],
                    )
                } else {
                    (
                        // (1-t)^3 (1+t)^2
                        repeat(v(1, 1, 0), 3)
                            .chain(repeat(v(-1, 1, 0), 2))
                            .collect(),
                        repeat(v(1, 2, 1), 2)
                            .chain(repeat(v(1, 2, -1), 2))
                            .chain(repeat(v(1, 1, 1), 2))
                            .chain(repeat(v(1, 1, -1), 2))
                            .chain([
                                v(-1, 1, 1),
                                v(-1, 1, -1),
                                v(1, 1, 2),
                                v(1, 1, -2),
                                v(1, 2, 3),
                                v(1, 2, -3),
                            ])
                            .collect(),
                    )
                };
                Self {
                    ell,
                    coset,
                    scalar_prefactor,
                    circle_factors,
                    circles: Circles::One,
                    normalization: rat(1, 2),
                }
            }
        };
        Ok(spec)
    }

    /// Total `t`-degree of the factor list; equals `(2ℓ+1)²`.
    pub fn t_degree(&self) -> usize {
        self.scalar_prefactor
            .iter()
            .chain(&self.circle_factors)
            .map(|f| f.tpow)
            .sum()
    }

    /// Evaluates the factorised determinant at `t` with circle variables on
    /// the unit circle at the given angles (`w` ignored for one circle).
    pub fn det_at(&self, t: f64, angles: [f64; 2]) -> Complex64 {
        self.scalar_prefactor
            .iter()
            .chain(&self.circle_factors)
            .map(|f| {
                let phase = f.exps[0] as f64 * angles[0]
                    + match self.circles {
                        Circles::Two => f.exps[1] as f64 * angles[1],
                        Circles::One => 0.0,
                    };
                Complex64::new(1.0, 0.0)
                    - Complex64::from_polar(f.sign as f64 * t.powi(f.tpow as i32), phase)
            })
            .product()
    }

    /// Molien series of this coset to the given order.
    pub fn series(&self, order: usize) -> Result<TruncatedSeries, MolienError> {
        let ct = streamed_constant_term(self.circles, &self.circle_factors, order, true)?;
        let mut s = ct.scale(&self.normalization);
        for f in &self.scalar_prefactor {
            s.div_binomial(f.sign, f.tpow);
        }
        check_counts(&s, self.coset.name(), self.ell)?;
        Ok(s)
    }
}

fn check_counts(s: &TruncatedSeries, group: &'static str, ell: usize) -> Result<(), MolienError> {
    for (degree, c) in s.coeffs().iter().enumerate() {
        if !c.is_integer() || c.is_negative() {
            return Err(MolienError::NormalizationFailure {
                group,
                ell,
                degree,
                value: c.clone(),
            });
        }
    }
    Ok(())
}

pub fn gamma0_series(ell: usize, order: usize) -> Result<TruncatedSeries, MolienError> {
    CosetSpec::new(ell, Coset::Gamma0)?.series(order)
}

pub fn gamma1_series(ell: usize, order: usize) -> Result<TruncatedSeries, MolienError> {
    CosetSpec::new(ell, Coset::Gamma1)?.series(order)
}

/// Molien series of the full wreath product, the mean of the two cosets.
pub fn full_series(ell: usize, order: usize) -> Result<TruncatedSeries, MolienError> {
    let (g0, g1) = rayon::join(|| gamma0_series(ell, order), || gamma1_series(ell, order));
    full_from_parts(ell, &g0?, &g1?)
}

/// `(g0 + g1) / 2`, checked to be a nonnegative integer series.
pub fn full_from_parts(
    ell: usize,
    g0: &TruncatedSeries,
    g1: &TruncatedSeries,
) -> Result<TruncatedSeries, MolienError> {
    let s = g0.add(g1).scale(&rat(1, 2));
    check_counts(&s, "full", ell)?;
    Ok(s)
}

/// Matrix of `D̃(g, h): A ↦ D(g) A D(h)^†` on row-major `vec(A)`.
pub fn gamma0_matrix(ell: usize, g: Euler, h: Euler) -> DMatrix<Complex64> {
    let dg = wigner_d(ell, g).matrix;
    let dh = wigner_d(ell, h).matrix;
    dg.kronecker(&dh.map(|z| z.conj()))
}

/// Matrix of the transposition `(τS)_{mm'} = (-1)^{m+m'} S_{-m',-m}`.
pub fn tau_matrix(ell: usize) -> DMatrix<Complex64> {
    let n = 2 * ell + 1;
    let mut t = DMatrix::zeros(n * n, n * n);
    for r in 0..n {
        for c in 0..n {
            let sign = if (r + c) % 2 == 0 { 1.0 } else { -1.0 };
            t[(r * n + c, (n - 1 - c) * n + (n - 1 - r))] = Complex64::new(sign, 0.0);
        }
    }
    t
}

/// Largest `|det(I - t D̃) - Π factors|` over the sampled group elements.
///
/// For `Γ₀` the factor list is evaluated at the rotation angles of `g` and
/// `h`; for `Γ₁` at the rotation angle of the product `gh`.
pub fn char_poly_check(
    ell: usize,
    coset: Coset,
    samples: &[(Euler, Euler)],
    t: f64,
) -> Result<f64, MolienError> {
    let spec = CosetSpec::new(ell, coset)?;
    let n = (2 * ell + 1).pow(2);
    let tau = tau_matrix(ell);
    let mut worst: f64 = 0.0;
    for &(g, h) in samples {
        let mut m = gamma0_matrix(ell, g, h);
        let angles = match coset {
            Coset::Gamma0 => [rotation_angle(&g.matrix()), rotation_angle(&h.matrix())],
            Coset::Gamma1 => {
                m = &m * &tau;
                [rotation_angle(&(g.matrix() * h.matrix())), 0.0]
            }
        };
        let direct =
            (DMatrix::<Complex64>::identity(n, n) - m * Complex64::new(t, 0.0)).determinant();
        worst = worst.max((direct - spec.det_at(t, angles)).norm());
    }
    Ok(worst)
}

/// Irreducible `SU(2) × SU(2)` labels of one dimension that descend to `SO(4)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelRow {
    pub dim: usize,
    /// Pairs `(ℓ₁, ℓ₂)` with `ℓ₁ ≤ ℓ₂`; the swapped pair is implied.
    pub labels: Vec<(HalfInt, HalfInt)>,
}

/// Labels `(ℓ₁, ℓ₂)` with `(2ℓ₁+1)(2ℓ₂+1) = n` and `ℓ₁ + ℓ₂ ∈ ℤ`, for every
/// `n ≤ max_dim` that has at least one.
pub fn su2_label_table(max_dim: usize) -> Vec<LabelRow> {
    (1..=max_dim)
        .filter_map(|dim| {
            let labels: Vec<_> = (1..=dim)
                .filter(|a| dim % a == 0 && a * a <= dim)
                .map(|a| (a, dim / a))
                .filter(|(a, b)| (a + b) % 2 == 0)
                .map(|(a, b)| {
                    (
                        HalfInt::from_doubled(a as i64 - 1),
                        HalfInt::from_doubled(b as i64 - 1),
                    )
                })
                .collect();
            (!labels.is_empty()).then_some(LabelRow { dim, labels })
        })
        .collect()
}

/// The coefficient list as decimal strings.
pub fn coefficient_strings(s: &TruncatedSeries) -> Vec<String> {
    s.coeffs()
        .iter()
        .map(|c| {
            if c.is_integer() {
                c.to_integer().to_string()
            } else {
                c.to_string()
            }
        })
        .collect()
}

impl CosetSpec {
    /// Whether every factor of `Γ₀` has the shape required by the Weyl box.
    pub fn is_well_formed(&self) -> bool {
        let l = self.ell as i64;
        match self.coset {
            Coset::Gamma0 => {
                self.circle_factors.len() == (2 * self.ell + 1).pow(2)
                    && self.circle_factors.iter().all(|f| {
                        f.sign == 1 && f.tpow == 1 && f.exps[0].abs() <= l && f.exps[1].abs() <= l
                    })
            }
            Coset::Gamma1 => self.circle_factors.iter().all(|f| f.exps[1] == 0),
        }
    }
}

//! Rotations in zyz Euler angles and the Wigner D matrices representing them.
//!
//! Convention: active rotations `R = Rz(alpha) Ry(beta) Rz(gamma)` and
//! `D^l_{m m'} = e^{-i m alpha} d^l_{m m'}(beta) e^{-i m' gamma}`, indices
//! running `-l..=l` and stored at offset `m + l`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use rand::Rng;

use super::coupling::{CgMatrix, HalfInt};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Euler {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

fn rz(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn ry(b: f64) -> Matrix3<f64> {
    let (s, c) = b.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

impl Euler {
    pub const IDENTITY: Euler = Euler {
        alpha: 0.0,
        beta: 0.0,
        gamma: 0.0,
    };

    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    /// Angles drawn uniformly from `[0, 2π) × [0, π] × [0, 2π)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            alpha: rng.gen_range(0.0..2.0 * PI),
            beta: rng.gen_range(0.0..=PI),
            gamma: rng.gen_range(0.0..2.0 * PI),
        }
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        rz(self.alpha) * ry(self.beta) * rz(self.gamma)
    }

    /// Euler angles of a proper rotation matrix.
    pub fn from_matrix(r: &Matrix3<f64>) -> Self {
        let beta = r[(2, 2)].clamp(-1.0, 1.0).acos();
        if beta.sin().abs() > 1e-12 {
            Self {
                alpha: r[(1, 2)].atan2(r[(0, 2)]),
                beta,
                gamma: r[(2, 1)].atan2(-r[(2, 0)]),
            }
        } else if r[(2, 2)] > 0.0 {
            // only alpha + gamma is determined
            Self {
                alpha: r[(1, 0)].atan2(r[(0, 0)]),
                beta: 0.0,
                gamma: 0.0,
            }
        } else {
            Self {
                alpha: (-r[(1, 0)]).atan2(-r[(0, 0)]),
                beta: PI,
                gamma: 0.0,
            }
        }
    }

    /// Angles of the product rotation `self * other`.
    pub fn compose(&self, other: &Euler) -> Euler {
        Euler::from_matrix(&(self.matrix() * other.matrix()))
    }

    pub fn inverse(&self) -> Euler {
        Euler::new(-self.gamma, -self.beta, -self.alpha)
    }
}

/// Rotation angle `psi` of a proper rotation, from `tr R = 1 + 2 cos psi`.
pub fn rotation_angle(r: &Matrix3<f64>) -> f64 {
    ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
}

/// Wigner rotation matrix of integer rank `ell`.
#[derive(Clone, Debug)]
pub struct WignerD {
    pub ell: usize,
    pub euler: Euler,
    pub matrix: DMatrix<Complex64>,
}

fn fact(n: i64) -> f64 {
    (2..=n).map(|k| k as f64).product()
}

/// Small-d matrix element `d^l_{m m'}(beta)`.
pub fn little_d(ell: i64, m: i64, mp: i64, beta: f64) -> f64 {
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let norm = (fact(ell + m) * fact(ell - m) * fact(ell + mp) * fact(ell - mp)).sqrt();
    let lo = 0.max(mp - m);
    let hi = (ell + mp).min(ell - m);
    (lo..=hi)
        .map(|k| {
            let sign = if (m - mp + k) % 2 == 0 { 1.0 } else { -1.0 };
            let den = fact(ell + mp - k) * fact(k) * fact(ell - m - k) * fact(m - mp + k);
            sign * norm / den
                * c.powi((2 * ell + mp - m - 2 * k) as i32)
                * s.powi((m - mp + 2 * k) as i32)
        })
        .sum()
}

/// `D^(ell)(alpha, beta, gamma)`.
pub fn wigner_d(ell: usize, euler: Euler) -> WignerD {
    let l = ell as i64;
    let n = 2 * ell + 1;
    let matrix = DMatrix::from_fn(n, n, |r, c| {
        let (m, mp) = (r as i64 - l, c as i64 - l);
        let phase =
            Complex64::from_polar(1.0, -(m as f64) * euler.alpha - (mp as f64) * euler.gamma);
        phase * little_d(l, m, mp, euler.beta)
    });
    WignerD { ell, euler, matrix }
}

impl WignerD {
    pub fn get(&self, m: i64, mp: i64) -> Complex64 {
        let l = self.ell as i64;
        self.matrix[((m + l) as usize, (mp + l) as usize)]
    }

    /// `max |D D^† - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.matrix.nrows();
        let prod = &self.matrix * self.matrix.adjoint();
        (prod - DMatrix::<Complex64>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `max |conj(D_{m m'}) - (-1)^{m+m'} D_{-m,-m'}|`.
    pub fn reality_error(&self) -> f64 {
        reality_defect(&self.matrix)
    }
}

/// `max |conj(A_{m m'}) - (-1)^{m+m'} A_{-m,-m'}|` for a matrix of odd
/// dimensions indexed from `-j` and `-j'`.
pub fn reality_defect(a: &DMatrix<Complex64>) -> f64 {
    let (rows, cols) = a.shape();
    let mut worst: f64 = 0.0;
    for r in 0..rows {
        for c in 0..cols {
            // m + m' has the parity of r + c shifted by (rows + cols)/2 - 1
            let parity = r + c + (rows + cols) / 2 - 1;
            let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
            let mirror = a[(rows - 1 - r, cols - 1 - c)] * sign;
            worst = worst.max((a[(r, c)].conj() - mirror).norm());
        }
    }
    worst
}

/// Columns are the spherical unit vectors `e_{-1}, e_0, e_{+1}` in Cartesian
/// components, `e_{±1} = ∓(x ± i y)/√2`, `e_0 = z`.
pub fn spherical_basis() -> DMatrix<Complex64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |y: f64| Complex64::new(0.0, y);
    DMatrix::from_row_slice(3, 3, &[re(r), z, re(-r), im(-r), z, im(-r), z, re(1.0), z])
}

/// Spherical components `S_{m m'} = e_m^† A e_{m'}` of a real 3×3 matrix.
pub fn cartesian_to_spherical(a: &Matrix3<f64>) -> DMatrix<Complex64> {
    let u = spherical_basis();
    let ac = DMatrix::from_fn(3, 3, |r, c| Complex64::new(a[(r, c)], 0.0));
    u.adjoint() * ac * u
}

/// Block-diagonalisation check for `C (D^{j1} ⊗ D^{j2}) C^T`.
///
/// Returns the largest entry outside the predicted blocks together with the
/// largest in-block deviation from directly computed `D^{(j)}`, maximised over
/// the sampled rotations.
pub fn cg_block_check(j1: usize, j2: usize, rotations: &[Euler]) -> f64 {
    let cg = CgMatrix::new(HalfInt::from_int(j1 as i64), HalfInt::from_int(j2 as i64))
        .expect("integer spins are valid");
    let c = cg.to_f64().map(|x| Complex64::new(x, 0.0));
    let n = cg.dim();
    let mut worst: f64 = 0.0;
    for &euler in rotations {
        let d1 = wigner_d(j1, euler).matrix;
        let d2 = wigner_d(j2, euler).matrix;
        let reduced = &c * d1.kronecker(&d2) * c.transpose();
        let mut predicted = DMatrix::<Complex64>::zeros(n, n);
        for j in j1.abs_diff(j2)..=j1 + j2 {
            let rows = cg.block_rows(HalfInt::from_int(j as i64));
            let dj = wigner_d(j, euler).matrix;
            predicted
                .view_mut((rows.start, rows.start), (rows.len(), rows.len()))
                .copy_from(&dj);
        }
        let dev = (reduced - predicted)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_rotation_gives_identity() {
        for ell in 0..=4 {
            let d = wigner_d(ell, Euler::IDENTITY);
            let n = 2 * ell + 1;
            let err = (&d.matrix - DMatrix::<Complex64>::identity(n, n))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-15);
        }
    }

    #[test]
    fn d1_middle_entry_is_cos_beta() {
        let beta = 0.73;
        let d = wigner_d(1, Euler::new(0.0, beta, 0.0));
        assert!((d.get(0, 0).re - beta.cos()).abs() < 1e-14);
    }

    #[test]
    fn rank_one_matches_spherical_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let e = Euler::random(&mut rng);
            let oracle = cartesian_to_spherical(&e.matrix());
            let d = wigner_d(1, e).matrix;
            let err = (oracle - d).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-12, "err = {err}");
        }
    }

    #[test]
    fn unitary_and_real_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for ell in 0..=4 {
            let d = wigner_d(ell, Euler::random(&mut rng));
            assert!(d.unitarity_error() < 1e-12);
            assert!(d.reality_error() < 1e-12);
        }
    }

    #[test]
    fn euler_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let e = Euler::random(&mut rng);
            let back = Euler::from_matrix(&e.matrix()).matrix();
            assert!((back - e.matrix()).abs().max() < 1e-12);
        }
        let flat = Euler::new(0.4, 0.0, 0.3);
        assert!(
            (Euler::from_matrix(&flat.matrix()).matrix() - flat.matrix())
                .abs()
                .max()
                < 1e-12
        );
        let down = Euler::new(0.4, PI, 0.3);
        assert!(
            (Euler::from_matrix(&down.matrix()).matrix() - down.matrix())
                .abs()
                .max()
                < 1e-12
        );
    }

    #[test]
    fn rotation_angle_of_axis_rotation() {
        assert!((rotation_angle(&rz(1.1)) - 1.1).abs() < 1e-12);
        assert!(rotation_angle(&Matrix3::identity()).abs() < 1e-12);
    }

    #[test]
    fn block_check_identity_and_mixed_ranks() {
        assert!(cg_block_check(2, 2, &[Euler::IDENTITY]) < 1e-13);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rots: Vec<_> = (0..5).map(|_| Euler::random(&mut rng)).collect();
        assert!(cg_block_check(1, 2, &rots) < 1e-9);
    }
}

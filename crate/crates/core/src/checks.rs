//! Batch verification suites with per-check residuals and pass/fail.
//!
//! Random inputs are drawn sequentially from one seeded generator, then
//! evaluated in parallel; aggregation is a max over an ordered list, so the
//! reports do not depend on the thread count.

use std::collections::BTreeMap;

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::golden;
use crate::invariants::{
    act_gamma0, act_tau, cayley_hamilton_residual, degree4_rank, inv2, inv3, quartic_candidates,
    value_rank, verify_identities, CandidateSubset, OrderTensor, QuarticValues,
};
use crate::molienweyl::{char_poly_check, full_series, gamma0_series, gamma1_series, Coset};
use crate::seriesring::TruncatedSeries;
use crate::wigner::{cg_block_check, CgMatrix, Euler, HalfInt};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn residual(
        name: impl Into<String>,
        samples: usize,
        max_residual: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            name: name.into(),
            samples,
            max_residual,
            tolerance,
            // NaN must fail
            pass: max_residual <= tolerance,
            detail: None,
        }
    }

    /// A check with no numeric residual; passes iff `ok`.
    pub fn exact(name: impl Into<String>, samples: usize, ok: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            samples,
            max_residual: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: ok,
            detail: Some(detail),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Suite {
    Series,
    Identities,
    Invariance,
    Rank,
    Charpoly,
    Blocks,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Series,
        Suite::Identities,
        Suite::Invariance,
        Suite::Rank,
        Suite::Charpoly,
        Suite::Blocks,
    ];
}

/// Named tolerances with defaults; unknown names fall back to `1e-8`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Tolerances(pub BTreeMap<String, f64>);

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        if let Some(&t) = self.0.get(name) {
            return t;
        }
        match name {
            "blocks" => 1e-9,
            "cayley_hamilton" => 1e-10,
            _ => 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub samples: usize,
    pub seed: u64,
    pub order: usize,
    pub tolerances: Tolerances,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            samples: 100,
            seed: 0,
            order: 20,
            tolerances: Tolerances::default(),
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Vec<Check> {
    match suite {
        Suite::Series => series_suite(cfg.order),
        Suite::Identities => identities_suite(cfg),
        Suite::Invariance => invariance_suite(cfg),
        Suite::Rank => rank_suite(cfg),
        Suite::Charpoly => charpoly_suite(cfg),
        Suite::Blocks => blocks_suite(cfg),
    }
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    // NaN propagates so that a broken evaluation fails
    it.into_iter().fold(0.0, |a, b| {
        if a.is_nan() || b.is_nan() {
            f64::NAN
        } else {
            a.max(b)
        }
    })
}

fn tensors(samples: usize, seed: u64) -> Vec<OrderTensor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| OrderTensor::random(2, &mut rng))
        .collect()
}

fn compare_prefix(
    name: &str,
    computed: &Result<TruncatedSeries, String>,
    expected: &[num_bigint::BigInt],
    order: usize,
) -> Check {
    let n = expected.len().min(order + 1);
    let detail;
    let ok = match computed.as_ref().map(|s| s.to_integers()) {
        Ok(Ok(c)) => match (0..n).find(|&k| c[k] != expected[k]) {
            None => {
                detail = format!("degrees 0..={} match", n - 1);
                true
            }
            Some(k) => {
                detail = format!("first mismatch at t^{k}: {} vs {}", c[k], expected[k]);
                false
            }
        },
        Ok(Err(e)) => {
            detail = e.to_string();
            false
        }
        Err(e) => {
            detail = e.clone();
            false
        }
    };
    Check::exact(name, n, ok, detail)
}

/// Molien series against the reference coefficient lists, to `order`.
pub fn series_suite(order: usize) -> Vec<Check> {
    let e =
        |r: Result<TruncatedSeries, crate::molienweyl::MolienError>| r.map_err(|e| e.to_string());
    let o1 = order.min(12);
    let o2 = order.min(20);
    vec![
        compare_prefix(
            "series l=1 gamma0",
            &e(gamma0_series(1, o1)),
            &golden::ell1_series(),
            o1,
        ),
        compare_prefix(
            "series l=1 gamma1",
            &e(gamma1_series(1, o1)),
            &golden::ell1_series(),
            o1,
        ),
        compare_prefix(
            "series l=2 gamma0",
            &e(gamma0_series(2, o2)),
            &golden::ell2_gamma0(),
            o2,
        ),
        compare_prefix(
            "series l=2 gamma1",
            &e(gamma1_series(2, o2)),
            &golden::ell2_gamma1(),
            o2,
        ),
        compare_prefix(
            "series l=2 full",
            &e(full_series(2, o2)),
            &golden::ell2_full(),
            o2,
        ),
    ]
}

/// The eight quartic identities, max relative residual per identity.
pub fn identities_suite(cfg: &SuiteConfig) -> Vec<Check> {
    let tol = cfg.tolerances.get("identities");
    let rows: Vec<Vec<f64>> = tensors(cfg.samples, cfg.seed)
        .par_iter()
        .map(|s| match verify_identities(s) {
            Ok(r) => r.iter().map(|x| x.relative()).collect(),
            Err(_) => vec![f64::NAN; 8],
        })
        .collect();
    (0..8)
        .map(|i| {
            Check::residual(
                format!("identity {}", i + 1),
                cfg.samples,
                max_of(rows.iter().map(|r| r[i])),
                tol,
            )
        })
        .collect()
}

/// Every invariant evaluated at `S` and at its transforms.
struct InvariantRow {
    names: Vec<String>,
    values: Vec<f64>,
    parity: Vec<f64>,
}

fn invariant_row(s: &OrderTensor) -> Result<InvariantRow, crate::invariants::InvariantsError> {
    let q = QuarticValues::of(s)?;
    let mut names = vec!["I2".to_string(), "I3".to_string()];
    let mut values = vec![inv2(s), inv3(s)?];
    let mut parity = vec![1.0, 1.0];
    for c in quartic_candidates() {
        names.push(c.label());
        values.push(q.get(c));
        parity.push(c.tau_parity());
    }
    Ok(InvariantRow {
        names,
        values,
        parity,
    })
}

/// `Γ₀`-invariance and `τ`-parity of `I₂`, `I₃` and the 13 quartic candidates.
pub fn invariance_suite(cfg: &SuiteConfig) -> Vec<Check> {
    let tol_g = cfg.tolerances.get("invariance");
    let tol_t = cfg.tolerances.get("tau");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let inputs: Vec<_> = (0..cfg.samples)
        .map(|_| {
            (
                OrderTensor::random(2, &mut rng),
                Euler::random(&mut rng),
                Euler::random(&mut rng),
            )
        })
        .collect();
    let names = invariant_row(&OrderTensor::zero(2))
        .expect("zero tensor")
        .names;
    let rows: Vec<Option<(Vec<f64>, Vec<f64>)>> = inputs
        .par_iter()
        .map(|(s, g, h)| {
            let base = invariant_row(s).ok()?;
            let moved = invariant_row(&act_gamma0(*g, *h, s)).ok()?;
            let flipped = invariant_row(&act_tau(s)).ok()?;
            let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1.0);
            let g_res = (0..base.values.len())
                .map(|i| rel(base.values[i], moved.values[i]))
                .collect();
            let t_res = (0..base.values.len())
                .map(|i| rel(base.values[i] * base.parity[i], flipped.values[i]))
                .collect();
            Some((g_res, t_res))
        })
        .collect();
    let col = |i: usize, tau: bool| {
        max_of(rows.iter().map(|r| match r {
            Some((g, t)) => {
                if tau {
                    t[i]
                } else {
                    g[i]
                }
            }
            None => f64::NAN,
        }))
    };
    let mut out = Vec::new();
    for (i, name) in names.iter().enumerate() {
        out.push(Check::residual(
            format!("gamma0 {name}"),
            cfg.samples,
            col(i, false),
            tol_g,
        ));
    }
    for (i, name) in names.iter().enumerate() {
        out.push(Check::residual(
            format!("tau {name}"),
            cfg.samples,
            col(i, true),
            tol_t,
        ));
    }
    out
}

/// Numerical ranks at degrees 2, 3 and 4, each on two disjoint seeds.
pub fn rank_suite(cfg: &SuiteConfig) -> Vec<Check> {
    let n = cfg.samples.max(crate::invariants::MIN_RANK_SAMPLES);
    let seeds = [cfg.seed, cfg.seed.wrapping_add(0x9E37_79B9_7F4A_7C15)];
    let mut out = Vec::new();
    let mut push =
        |name: String, got: Result<usize, crate::invariants::InvariantsError>, want: usize| {
            let (ok, detail) = match got {
                Ok(r) => (r == want, format!("rank {r}, expected {want}")),
                Err(e) => (false, e.to_string()),
            };
            out.push(Check::exact(name, n, ok, detail));
        };
    for (i, &seed) in seeds.iter().enumerate() {
        push(
            format!("degree 2 rank, seed {i}"),
            value_rank(2, n, seed, |s| Ok(inv2(s))),
            1,
        );
        push(
            format!("degree 3 rank, seed {i}"),
            value_rank(2, n, seed, inv3),
            1,
        );
        push(
            format!("degree 4 rank all13, seed {i}"),
            degree4_rank(n, seed, CandidateSubset::All13),
            5,
        );
        push(
            format!("degree 4 rank tau-invariant, seed {i}"),
            degree4_rank(n, seed, CandidateSubset::TauInvariant),
            4,
        );
    }
    out
}

/// Direct determinant against the factor lists, both cosets and ranks.
pub fn charpoly_suite(cfg: &SuiteConfig) -> Vec<Check> {
    let tol = cfg.tolerances.get("charpoly");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples: Vec<_> = (0..cfg.samples)
        .map(|_| (Euler::random(&mut rng), Euler::random(&mut rng)))
        .collect();
    let mut jobs = Vec::new();
    for ell in 1..=2 {
        for coset in [Coset::Gamma0, Coset::Gamma1] {
            for t in [0.2, 0.5] {
                jobs.push((ell, coset, t));
            }
        }
    }
    jobs.par_iter()
        .map(|&(ell, coset, t)| {
            let dev = char_poly_check(ell, coset, &samples, t).unwrap_or(f64::NAN);
            Check::residual(
                format!("charpoly l={ell} {} t={t}", coset.name()),
                cfg.samples,
                dev,
                tol,
            )
        })
        .collect()
}

/// Clebsch–Gordan block diagonalisation and orthonormality.
pub fn blocks_suite(cfg: &SuiteConfig) -> Vec<Check> {
    let tol = cfg.tolerances.get("blocks");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let rots: Vec<_> = (0..cfg.samples).map(|_| Euler::random(&mut rng)).collect();
    let mut out = Vec::new();
    for (j1, j2) in [(2, 2), (1, 2), (2, 4)] {
        out.push(Check::residual(
            format!("cg blocks {j1}x{j2}"),
            rots.len(),
            cg_block_check(j1, j2, &rots),
            tol,
        ));
    }
    for (a, b) in [(1, 1), (1, 4), (4, 4), (2, 3)] {
        let defect = CgMatrix::new(HalfInt::from_doubled(a), HalfInt::from_doubled(b))
            .map(|c| c.orthonormality_defect())
            .unwrap_or(f64::NAN);
        out.push(Check::residual(
            format!(
                "cg orthonormal {}x{}",
                HalfInt::from_doubled(a),
                HalfInt::from_doubled(b)
            ),
            1,
            defect,
            tol,
        ));
    }
    out
}

/// Cayley–Hamilton reduction of `tr (AᵀA)³` on Gaussian 3×3 matrices.
pub fn cayley_hamilton_check(cfg: &SuiteConfig) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mats: Vec<Matrix3<f64>> = (0..cfg.samples)
        .map(|_| Matrix3::from_fn(|_, _| rng.sample(StandardNormal)))
        .collect();
    let worst = max_of(mats.iter().map(cayley_hamilton_residual));
    Check::residual(
        "cayley-hamilton l=1",
        cfg.samples,
        worst,
        cfg.tolerances.get("cayley_hamilton"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig {
            samples: 20,
            seed: 1,
            order: 10,
            tolerances: Tolerances::default(),
        }
    }

    #[test]
    fn nan_fails() {
        assert!(!Check::residual("x", 1, f64::NAN, 1.0).pass);
        assert!(max_of([0.1, f64::NAN, 0.2]).is_nan());
    }

    #[test]
    fn tolerance_override() {
        let mut t = Tolerances::default();
        assert_eq!(t.get("blocks"), 1e-9);
        t.0.insert("blocks".into(), 1e-3);
        assert_eq!(t.get("blocks"), 1e-3);
    }

    #[test]
    fn suites_pass_except_printed_skew_identities() {
        let cfg = small();
        for suite in Suite::ALL {
            for c in run_suite(suite, &cfg) {
                let printed_skew =
                    ["identity 6", "identity 7", "identity 8"].contains(&c.name.as_str());
                assert_eq!(c.pass, !printed_skew, "{c:?}");
            }
        }
        assert!(cayley_hamilton_check(&cfg).pass);
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = small();
        assert_eq!(invariance_suite(&cfg), invariance_suite(&cfg));
    }
}

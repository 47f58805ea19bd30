//! Acceptance criteria 1 to 11, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`) so that every criterion is
//! evaluated and reported even when an earlier one fails; the process exits
//! with status 1 if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wreath_molien::checks::{
    cayley_hamilton_check, charpoly_suite, identities_suite, invariance_suite, Check, SuiteConfig,
};
use wreath_molien::golden;
use wreath_molien::invariants::{
    degree4_rank, identity_residuals, random_order_tensor, skew_identities_reversed,
    CandidateSubset,
};
use wreath_molien::molienweyl::{full_from_parts, gamma0_series, gamma1_series};
use wreath_molien::seriesring::{
    reconstruct_numerator, CyclotomicDenominator, IntPolynomial, Reflection, TruncatedSeries,
    DEFAULT_SLACK,
};
use wreath_molien::wigner::{
    admissible_keys, cg_block_check, symmetry_violations, three_j_uncached, Euler, HalfInt, Surd,
    ThreeJKey,
};

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, n: u32, ok: bool, title: &str, detail: String) {
        if !ok {
            self.failures += 1;
        }
        println!(
            "criterion {n:>2}: {}  {title}  [{detail}]",
            if ok { "PASS" } else { "FAIL" }
        );
    }
}

fn ints(s: &TruncatedSeries) -> Option<Vec<BigInt>> {
    s.to_integers().ok()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn first_mismatch(a: &[BigInt], b: &[BigInt]) -> Option<usize> {
    (0..a.len().max(b.len())).find(|&k| a.get(k) != b.get(k))
}

fn failed_checks(checks: &[Check]) -> Vec<String> {
    checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} ({:.2e})", c.name, c.max_residual))
        .collect()
}

fn worst(checks: &[Check]) -> f64 {
    checks.iter().map(|c| c.max_residual).fold(0.0, f64::max)
}

fn criterion_1(r: &mut Report) {
    let ((g0, g1, n0, n1), dt) = timed(|| {
        let g0 = gamma0_series(1, 12).ok().and_then(|s| ints(&s));
        let g1 = gamma1_series(1, 12).ok().and_then(|s| ints(&s));
        let q = CyclotomicDenominator::ell1();
        let num = |s: Result<TruncatedSeries, _>| {
            s.ok().and_then(|s| reconstruct_numerator(&s, &q, 0).ok())
        };
        (g0, g1, num(gamma0_series(1, 20)), num(gamma1_series(1, 20)))
    });
    let want = golden::ell1_series();
    let one = IntPolynomial::from_i64(&[1]);
    let ok = g0.as_ref() == Some(&want)
        && g1.as_ref() == Some(&want)
        && n0.as_ref() == Some(&one)
        && n1.as_ref() == Some(&one)
        && dt < Duration::from_secs(1);
    r.line(
        1,
        ok,
        "l=1 series and numerator 1 over (1-t^2)(1-t^3)(1-t^4)",
        format!(
            "numerators {:?} {:?}, {:.3} s",
            n0.map(|p| p.to_string()),
            n1.map(|p| p.to_string()),
            dt.as_secs_f64()
        ),
    );
}

fn series_criterion(
    r: &mut Report,
    n: u32,
    title: &str,
    got: Option<Vec<BigInt>>,
    want: Vec<BigInt>,
    limit: Option<Duration>,
    dt: Duration,
) {
    let (ok, detail) = match got {
        Some(g) => match first_mismatch(&g, &want) {
            None => (true, format!("t^0..t^20 match, last {}", g[20])),
            Some(k) => (false, format!("first mismatch at t^{k}")),
        },
        None => (false, "computation failed".into()),
    };
    let in_time = limit.is_none_or(|l| dt < l);
    r.line(
        n,
        ok && in_time,
        title,
        format!("{detail}, {:.3} s", dt.as_secs_f64()),
    );
}

fn criterion_5(r: &mut Report) -> Option<(IntPolynomial, IntPolynomial)> {
    let order = 113 + DEFAULT_SLACK;
    let q = CyclotomicDenominator::q0();
    let ((p0, p1), dt) = timed(|| {
        let (a, b) = rayon::join(|| gamma0_series(2, order), || gamma1_series(2, order));
        let p = |s: Result<TruncatedSeries, _>| -> Result<IntPolynomial, String> {
            let s = s.map_err(|e: wreath_molien::molienweyl::MolienError| e.to_string())?;
            reconstruct_numerator(&s, &q, 113).map_err(|e| e.to_string())
        };
        (p(a), p(b))
    });
    let degrees: Vec<usize> = q
        .factors()
        .flat_map(|(d, m)| std::iter::repeat_n(d, m))
        .collect();
    let q_ok = q.count() == 19
        && degrees == [2, 3, 4, 4, 4, 5, 6, 6, 7, 7, 8, 8, 9, 9, 10, 10, 11, 12, 13];
    let check = |p: &Result<IntPolynomial, String>, want: Vec<BigInt>, refl: Reflection| match p {
        Ok(p) => {
            let mismatch = first_mismatch(p.coeffs(), &want);
            let pal = p.is_palindromic(refl);
            (
                mismatch.is_none() && pal && p.degree() == Some(113),
                format!("mismatch {mismatch:?}, palindromic {pal}"),
            )
        }
        Err(e) => (false, e.clone()),
    };
    let (ok0, d0) = check(&p0, golden::p0(), Reflection::Symmetric);
    let (ok1, d1) = check(&p1, golden::p1(), Reflection::Antisymmetric);
    let ok = q_ok && ok0 && ok1 && dt < Duration::from_secs(600);
    r.line(
        5,
        ok,
        "P0, P1 from order-120 series over Q0 equal the reference, palindromic +1/-1",
        format!("P0: {d0}; P1: {d1}; {:.1} s", dt.as_secs_f64()),
    );
    match (p0, p1) {
        (Ok(a), Ok(b)) => Some((a, b)),
        _ => None,
    }
}

fn criterion_6(r: &mut Report, computed: Option<(IntPolynomial, IntPolynomial)>) {
    let (p0, p1, source) = match computed {
        Some((a, b)) => (a, b, "computed"),
        None => (
            IntPolynomial::new(golden::p0()),
            IntPolynomial::new(golden::p1()),
            "reference",
        ),
    };
    let half = p0.add(&p1).div_exact(&BigInt::from(2));
    let (ok, detail) = match half {
        Ok(h) => {
            let v = h.eval_at_one();
            (
                v == BigInt::from(726_963_024u64),
                format!(
                    "{source} (P0+P1)/2 at 1 = {v}, expected 726963024; P0(1) = {}, P1(1) = {}",
                    p0.eval_at_one(),
                    p1.eval_at_one()
                ),
            )
        }
        Err(e) => (false, e.to_string()),
    };
    r.line(6, ok, "secondary-invariant count", detail);
}

fn criterion_7(r: &mut Report) {
    let cfg = SuiteConfig {
        samples: 100,
        seed: 7,
        ..SuiteConfig::default()
    };
    let checks = charpoly_suite(&cfg);
    let ok = checks.len() == 8 && checks.iter().all(|c| c.pass && c.tolerance <= 1e-8);
    r.line(
        7,
        ok,
        "det(I - tD) against factor lists, l in {1,2}, both cosets, t in {0.2,0.5}",
        format!("max deviation {:.2e} over 100 samples each", worst(&checks)),
    );
}

fn criterion_8(r: &mut Report) {
    let keys = admissible_keys(HalfInt::from_int(4));
    let bad = symmetry_violations(&keys);
    let mut special_bad = 0;
    for a in 0..=8i64 {
        for m1 in (-a..=a).step_by(2) {
            for b in 0..=8i64 {
                for m2 in (-b..=b).step_by(2) {
                    let h = HalfInt::from_doubled;
                    let key = ThreeJKey::new([h(a), h(b), h(0)], [h(m1), h(m2), h(0)]);
                    let want = if a == b && m1 == -m2 {
                        let odd = ((a - m1) / 2) % 2 != 0;
                        Surd::from_parts(if odd { -1 } else { 1 }, 1, a + 1)
                    } else {
                        Surd::zero()
                    };
                    if three_j_uncached(&key).ok() != Some(want) {
                        special_bad += 1;
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rots: Vec<_> = (0..20).map(|_| Euler::random(&mut rng)).collect();
    let block = cg_block_check(2, 2, &rots);
    let ok = bad.is_empty() && special_bad == 0 && block < 1e-9;
    r.line(
        8,
        ok,
        "exact 3j symmetries for j <= 4, coupling-to-zero case, CG block check 2x2",
        format!(
            "{} keys, {} symmetry violations, {special_bad} special-case mismatches, block error {block:.2e}",
            keys.len(),
            bad.len()
        ),
    );
}

fn criterion_9(r: &mut Report) {
    let cfg = SuiteConfig {
        samples: 100,
        seed: 9,
        ..SuiteConfig::default()
    };
    let checks = invariance_suite(&cfg);
    let failed = failed_checks(&checks);
    // I2, I3 and 13 quartics, each under Γ₀ and under τ
    let ok = checks.len() == 30 && failed.is_empty();
    r.line(
        9,
        ok,
        "Gamma0 invariance and tau parity of I2, I3 and the 13 quartic candidates",
        format!(
            "max relative residual {:.2e}, failing {:?}",
            worst(&checks),
            failed
        ),
    );
}

fn criterion_10(r: &mut Report) {
    let cfg = SuiteConfig {
        samples: 100,
        seed: 10,
        ..SuiteConfig::default()
    };
    let checks = identities_suite(&cfg);
    let failed = failed_checks(&checks);
    let seeds = [1001u64, 2002];
    let ranks: Vec<_> = seeds
        .iter()
        .map(|&s| {
            (
                degree4_rank(100, s, CandidateSubset::All13),
                degree4_rank(100, s, CandidateSubset::TauInvariant),
            )
        })
        .collect();
    let ranks_ok = ranks.iter().all(|(a, b)| *a == Ok(5) && *b == Ok(4));
    let reversed = (0..100)
        .map(|i| random_order_tensor(2, 10_000 + i))
        .filter_map(|s| identity_residuals(&s, &skew_identities_reversed()).ok())
        .flatten()
        .map(|x| x.relative())
        .fold(0.0, f64::max);
    let ok = checks.len() == 8 && failed.is_empty() && ranks_ok;
    let rank_text: Vec<String> = ranks
        .iter()
        .map(|(a, b)| format!("{}/{}", fmt_rank(a), fmt_rank(b)))
        .collect();
    r.line(
        10,
        ok,
        "eight quartic identities; degree-4 rank 5 (all 13) and 4 (tau-invariant)",
        format!(
            "failing {failed:?}; ranks all13/tau per seed {rank_text:?}; skew relations with reversed sign hold to {reversed:.2e}"
        ),
    );
}

fn fmt_rank<E>(r: &Result<usize, E>) -> String {
    match r {
        Ok(n) => n.to_string(),
        Err(_) => "unstable".into(),
    }
}

fn criterion_11(r: &mut Report) {
    let cfg = SuiteConfig {
        samples: 100,
        seed: 11,
        ..SuiteConfig::default()
    };
    let c = cayley_hamilton_check(&cfg);
    r.line(
        11,
        c.pass && c.tolerance <= 1e-10,
        "Cayley-Hamilton reduction of tr((A^T A)^3) at l=1",
        format!(
            "max relative residual {:.2e} over 100 matrices",
            c.max_residual
        ),
    );
}

fn main() -> ExitCode {
    let mut r = Report { failures: 0 };
    criterion_1(&mut r);

    let (g0, dt0) = timed(|| gamma0_series(2, 20));
    let (g1, dt1) = timed(|| gamma1_series(2, 20));
    series_criterion(
        &mut r,
        2,
        "l=2 Gamma0 series to t^20",
        g0.as_ref().ok().and_then(ints),
        golden::ell2_gamma0(),
        Some(Duration::from_secs(30)),
        dt0,
    );
    series_criterion(
        &mut r,
        3,
        "l=2 Gamma1 series to t^20",
        g1.as_ref().ok().and_then(ints),
        golden::ell2_gamma1(),
        None,
        dt1,
    );
    let full = match (&g0, &g1) {
        (Ok(a), Ok(b)) => full_from_parts(2, a, b).ok().and_then(|s| ints(&s)),
        _ => None,
    };
    series_criterion(
        &mut r,
        4,
        "l=2 full series to t^20, integral mean of Gamma0 and Gamma1",
        full,
        golden::ell2_full(),
        None,
        dt0 + dt1,
    );

    let numerators = criterion_5(&mut r);
    criterion_6(&mut r, numerators);
    criterion_7(&mut r);
    criterion_8(&mut r);
    criterion_9(&mut r);
    criterion_10(&mut r);
    criterion_11(&mut r);

    println!("acceptance: {} of 11 criteria failed", r.failures);
    if r.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

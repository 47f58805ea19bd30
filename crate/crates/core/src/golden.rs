//! Reference coefficient lists shipped with the crate.

use num_bigint::BigInt;

const P0: &str = include_str!("../data/p0.txt");
const P1: &str = include_str!("../data/p1.txt");
const ELL1: &str = include_str!("../data/ell1_series.txt");
const ELL2_GAMMA0: &str = include_str!("../data/ell2_gamma0.txt");
const ELL2_GAMMA1: &str = include_str!("../data/ell2_gamma1.txt");
const ELL2_FULL: &str = include_str!("../data/ell2_full.txt");

/// Parses one integer per line, skipping blank lines and `#` comments.
pub fn parse_coefficients(text: &str) -> Result<Vec<BigInt>, String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse::<BigInt>()
                .map_err(|e| format!("bad coefficient {l:?}: {e}"))
        })
        .collect()
}

fn load(text: &str) -> Vec<BigInt> {
    parse_coefficients(text).expect("bundled data is well formed")
}

/// Numerator of the `Γ₀` Molien function over `Q₀`.
pub fn p0() -> Vec<BigInt> {
    load(P0)
}

/// Numerator of the `Γ₁` Molien function over `Q₀`.
pub fn p1() -> Vec<BigInt> {
    load(P1)
}

/// `ℓ = 1` Molien series, degrees 0 through 12.
pub fn ell1_series() -> Vec<BigInt> {
    load(ELL1)
}

pub fn ell2_gamma0() -> Vec<BigInt> {
    load(ELL2_GAMMA0)
}

pub fn ell2_gamma1() -> Vec<BigInt> {
    load(ELL2_GAMMA1)
}

pub fn ell2_full() -> Vec<BigInt> {
    load(ELL2_FULL)
}

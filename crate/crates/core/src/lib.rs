//! Molien series and low-degree invariants for the wreath product
//! SO(3) ≀ Z₂ acting on `L(V, V)` by `A ↦ D(g) A D(h)^*` and transposition.
//!
//! * [`seriesring`]: exact truncated series, integer polynomials, rational
//!   function reconstruction.
//! * [`laurent`]: series with Laurent-polynomial coefficients and the
//!   constant-term engine.
//! * [`molienweyl`]: Molien series of the two cosets via Weyl integration.
//! * [`wigner`]: Clebsch–Gordan / 3j coefficients as exact surds, Wigner D.
//! * [`invariants`]: order tensors, the group action, and the explicit
//!   invariants of degree 2, 3 and 4.
//! * [`checks`]: batch verification suites used by the CLI and the
//!   acceptance tests.
//! * [`cli`]: the `molien` command-line front end.

pub mod checks;
pub mod cli;
pub mod golden;
pub mod invariants;
pub mod laurent;
pub mod molienweyl;
pub mod seriesring;
pub mod wigner;

//! Angular-momentum coupling: exact Clebsch–Gordan and 3j values, Wigner D
//! matrices, and the block decomposition of tensor products.

mod coupling;
mod rotation;
mod surd;

use thiserror::Error;

pub use coupling::{
    admissible_keys, clebsch_gordan, symmetry_violations, three_j, three_j_uncached, CgMatrix,
    HalfInt, ThreeJKey,
};
pub use rotation::{
    cartesian_to_spherical, cg_block_check, little_d, reality_defect, rotation_angle,
    spherical_basis, wigner_d, Euler, WignerD,
};
pub use surd::Surd;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WignerError {
    #[error("invalid spin pair j = {j}, m = {m}: j must be nonnegative and j + m integral")]
    InvalidSpin { j: HalfInt, m: HalfInt },
}

//! Root systems, Weyl groups, weights and the affine Weyl group on the
//! complexified Cartan algebra.
//!
//! Cartan-valued data are stored in the simple coroot basis `e_i`, so the
//! coroot lattice is `Z^r`. Covectors (roots, weights) are stored by their
//! values on the `e_i`, which is the fundamental-weight basis.

mod affine;
mod reps;
mod rootsys;

pub use affine::{affine_weyl_reduce, orbit_distance, real_coordinates, AffineElement, Reduced};
pub use reps::{dynkin_index, level_k_weights, RepresentationWeights, Weight};
pub use rootsys::{build_root_system, Family, RootSystem, RootSystemJson, WEYL_ORDER_CAP};

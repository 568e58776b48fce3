//! Twisted Dolbeault operators on the torus: kernel dimensions, closed-form
//! spectra on the constant Cartan slice, ζ-regularized determinants and a
//! clutched operator for bundles with nonzero-degree summands.

mod clutched;
mod kernel;
mod operator;
mod relative;
mod slice;
mod zeta;

pub use clutched::{clutched_dbar, ClutchedDbar, SummandKernel, POINTS_PER_FLUX};
pub use kernel::{
    certified_count, kernel_dim, singular_values, KernelReport, GAP_RATIO, KERNEL_TOL,
};
pub use operator::{dbar_symbol, disc_modes, weight_value, MatrixRep, Potential, TwistedDolbeault};
pub use relative::{
    log_ratio_at, relative_det_truncated, relative_det_with_floor, truncated_log_det,
};
pub use slice::{adjoint_kernel, lattice_distance, lattice_roots, slice_spectrum};
pub use zeta::{
    epstein_derivative, exp_integral_e1, shifted_lattice_log_det, zeta_det_slice,
    zeta_det_slice_cut, DetMethod, EpsteinParts, ZetaDet,
};

//! Connections on the flat torus in a truncated Fourier basis.
//!
//! A connection on the trivial `SU(n)` bundle is stored through the
//! coefficients of its `(0,1)`-part. Products are evaluated on a
//! `(4M+1)²` collocation grid, on which the curvature and the Yang–Mills
//! gradient of a cutoff-`M` field are computed without aliasing.

mod connection;
mod curvature;
pub mod fourier;
mod gauge;
mod holonomy;

pub use connection::{ConnectionSnapshot, FourierConnection, MatrixField, Torus};
pub use curvature::{
    collocation_size, curvature, fundamental_field, hodge_star, kahler_metric, l2_pairing,
    moment_pairing, symplectic, yang_mills, ym_and_gradient,
};
pub use gauge::{
    cartan_slice, coroot_to_diagonal, dbar_field, diagonal_to_coroot, g_lambda, gauge_act,
    gauge_act_with_grid, GaugeTransformation, GridGauge,
};
pub use holonomy::{holonomy, slice_point_from_holonomies, Cycle};

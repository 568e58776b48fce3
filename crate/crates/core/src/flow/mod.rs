//! Yang–Mills gradient flow on the torus, stability classification and
//! the determinant monotonicity probe.

mod classify;
mod integrator;
mod probe;

pub use classify::{classify, classify_terminal, Stability, StabilityVerdict, Thresholds};
pub use integrator::{
    flow_run, flow_step, linear_fit, linear_propagate, FlowFailure, FlowOptions, FlowRecord,
    FlowStatus, FlowTrajectory,
};
pub use probe::{section_monotonicity_probe, ProbeOptions, ProbePoint, ProbeReport, ProbeVerdict};

use crate::gaugefield::{ym_and_gradient, FourierConnection, MatrixField};

/// `∇YM(A) = ∗d_A∗F_A` in `(0,1)`-coordinates.
pub fn ym_gradient(conn: &FourierConnection) -> MatrixField {
    ym_and_gradient(conn).1
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrator::FlowTrajectory;
use crate::error::Result;
use crate::gaugefield::{
    holonomy, slice_point_from_holonomies, yang_mills, Cycle, FourierConnection,
};
use crate::liealg::{affine_weyl_reduce, build_root_system, Family};
use crate::spectral::adjoint_kernel;

/// Truncation of the adjoint operator used for the regularity flag.
const REGULARITY_TRUNCATION: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Terminal YM below which the limit counts as flat.
    pub flat: f64,
    /// Largest accepted Frobenius norm of `[hol_u, hol_v]`.
    pub commutator: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            flat: 1e-6,
            commutator: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Semistable,
    Unstable,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub class: Stability,
    pub terminal_ym: f64,
    /// Reduced slice point in coroot coordinates, present iff semistable.
    pub alcove: Option<Vec<Complex64>>,
    pub commutator: Option<f64>,
    /// Certified `dim H⁰` of the adjoint bundle at the alcove point.
    pub adjoint_h0: Option<usize>,
    /// Whether `dim H⁰` attains the rank; `None` when no gap could be
    /// certified.
    pub regular: Option<bool>,
}

/// Verdict for the terminal point of a flow.
pub fn classify(traj: &FlowTrajectory, thresholds: &Thresholds) -> Result<StabilityVerdict> {
    classify_terminal(&traj.terminal, thresholds)
}

/// Stability class of a (nominal) flow limit: flat limits are projected
/// through their holonomies to the alcove.
pub fn classify_terminal(
    conn: &FourierConnection,
    thresholds: &Thresholds,
) -> Result<StabilityVerdict> {
    let ym = yang_mills(conn);
    if ym >= thresholds.flat {
        return Ok(StabilityVerdict {
            class: Stability::Unstable,
            terminal_ym: ym,
            alcove: None,
            commutator: None,
            adjoint_h0: None,
            regular: None,
        });
    }
    let hu = holonomy(conn, Cycle::U);
    let hv = holonomy(conn, Cycle::V);
    let comm = (&hu * &hv - &hv * &hu).norm();
    let w = slice_point_from_holonomies(&hu, &hv, conn.tau, thresholds.commutator)?;
    let rs = build_root_system(Family::A, conn.n() - 1)?;
    let alcove = affine_weyl_reduce(&rs, &w, conn.tau).representative;
    let kernel = adjoint_kernel(&rs, &alcove, conn.tau, REGULARITY_TRUNCATION).ok();
    Ok(StabilityVerdict {
        class: Stability::Semistable,
        terminal_ym: ym,
        commutator: Some(comm),
        adjoint_h0: kernel.as_ref().map(|k| k.h0),
        regular: kernel.map(|k| k.h0 == rs.rank),
        alcove: Some(alcove),
    })
}

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrator::{linear_fit, FlowTrajectory};
use crate::error::{LabError, Result};
use crate::spectral::{relative_det_with_floor, MatrixRep, TwistedDolbeault};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProbeOptions {
    /// Disc radius of the coarser finite section.
    pub truncation: usize,
    /// Number of stored snapshots to evaluate, spread evenly in `∫YM dt`.
    pub samples: usize,
    /// Relative non-decrease band on `log det`.
    pub band: f64,
    /// Largest extrapolation residual on `log det` before the probe is
    /// inconclusive.
    pub max_error: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            truncation: 8,
            samples: 10,
            band: 1e-6,
            max_error: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProbePoint {
    pub t: f64,
    pub ym: f64,
    /// `∫₀ᵗ YM dt` along the accepted steps.
    pub integrated_ym: f64,
    pub log_det: f64,
    pub error: f64,
    /// Smallest eigenvalue of the finer truncated `Δ`.
    pub lambda_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeVerdict {
    NonDecreasing,
    Decreasing,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeReport {
    pub points: Vec<ProbePoint>,
    pub verdict: ProbeVerdict,
    /// Largest decrease between consecutive points (negative if strictly
    /// increasing).
    pub worst_drop: f64,
    /// Fitted `c` in `Δ log det = c ∫YM dt`, with R².
    pub slope: Option<f64>,
    pub r2: Option<f64>,
    /// A near-zero eigenvalue appeared along the flow.
    pub collapse: bool,
}

/// Eigenvalues below this multiple of `2(π/τ₂)²` signal a kernel.
const COLLAPSE_FLOOR: f64 = 1e-6;

fn cumulative_ym(traj: &FlowTrajectory) -> Vec<f64> {
    let mut out = Vec::with_capacity(traj.records.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in traj.records.windows(2) {
        acc += 0.5 * (w[0].ym + w[1].ym) * (w[1].t - w[0].t);
        out.push(acc);
    }
    out
}

/// Snapshot positions closest to evenly spaced levels of `∫YM dt`.
fn pick_samples(traj: &FlowTrajectory, integ: &[f64], samples: usize) -> Vec<usize> {
    let total = *integ.last().unwrap_or(&0.0);
    let last = traj.snapshots.len() - 1;
    if total <= 0.0 || samples < 2 {
        return if last == 0 { vec![0] } else { vec![0, last] };
    }
    let mut picked: Vec<usize> = (0..samples)
        .map(|j| {
            let target = total * j as f64 / (samples - 1) as f64;
            (0..=last)
                .min_by(|&a, &b| {
                    let da = (integ[traj.snapshots[a].0] - target).abs();
                    let db = (integ[traj.snapshots[b].0] - target).abs();
                    da.total_cmp(&db)
                })
                .unwrap_or(0)
        })
        .collect();
    picked.push(last);
    picked.sort_unstable();
    picked.dedup();
    picked
}

/// Truncated relative determinant of `Δ^V_{A(t),z}` along a flow,
/// checked for non-decrease and regressed against `∫YM dt`.
pub fn section_monotonicity_probe(
    traj: &FlowTrajectory,
    rep: MatrixRep,
    z: Complex64,
    opts: &ProbeOptions,
) -> Result<ProbeReport> {
    let integ = cumulative_ym(traj);
    let tau = traj.terminal.tau;
    let floor = COLLAPSE_FLOOR * 2.0 * (PI / tau.im).powi(2);
    let mut points = Vec::new();
    let mut collapse = false;
    for s in pick_samples(traj, &integ, opts.samples) {
        let (idx, conn) = &traj.snapshots[s];
        let op = TwistedDolbeault::on_connection(conn, rep, z, opts.truncation)?;
        let reference = TwistedDolbeault::free(op.rank(), z, tau, opts.truncation);
        let (det, lmin) = match relative_det_with_floor(&op, &reference) {
            Ok(v) => v,
            Err(LabError::IllConditioned(_)) => {
                collapse = true;
                break;
            }
            Err(e) => return Err(e),
        };
        collapse |= lmin < floor;
        let rec = traj.records[*idx];
        points.push(ProbePoint {
            t: rec.t,
            ym: rec.ym,
            integrated_ym: integ[*idx],
            log_det: det.log_value,
            error: det.error,
            lambda_min: lmin,
        });
    }
    let inconclusive = points.is_empty() || points.iter().any(|p| p.error > opts.max_error);
    let mut worst_drop = f64::NEG_INFINITY;
    let mut violated = false;
    for w in points.windows(2) {
        let drop = w[0].log_det - w[1].log_det;
        worst_drop = worst_drop.max(drop);
        violated |= drop > opts.band * (1.0 + w[0].log_det.abs());
    }
    let (slope, r2) =
        if points.len() >= 3 && points.last().map(|p| p.integrated_ym > 0.0) == Some(true) {
            let l0 = points[0].log_det;
            let pts: Vec<(f64, f64)> = points
                .iter()
                .map(|p| (p.integrated_ym, p.log_det - l0))
                .collect();
            let (c, r2) = linear_fit(&pts);
            (Some(c), Some(r2))
        } else {
            (None, None)
        };
    let verdict = if inconclusive {
        ProbeVerdict::Inconclusive
    } else if violated {
        ProbeVerdict::Decreasing
    } else {
        ProbeVerdict::NonDecreasing
    };
    Ok(ProbeReport {
        points,
        verdict,
        worst_drop: if worst_drop.is_finite() {
            worst_drop
        } else {
            0.0
        },
        slope,
        r2,
        collapse,
    })
}

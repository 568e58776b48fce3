use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::{dbar_symbol, Potential, TwistedDolbeault};
use crate::error::{LabError, Result};

/// Default kernel threshold on singular values.
pub const KERNEL_TOL: f64 = 1e-8;
/// Required ratio between the smallest retained and the largest discarded
/// singular value.
pub const GAP_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelReport {
    pub h0: usize,
    pub h1: usize,
    /// Smallest retained singular value over the largest discarded one (or
    /// over `tol` when nothing is discarded).
    pub gap_ratio: f64,
    /// Lowest singular values of `∂̄` at the finer truncation.
    pub head: Vec<f64>,
    pub truncations: [usize; 2],
}

/// Counts singular values below `tol` and certifies the gap above them.
pub fn certified_count(sv: &[f64], tol: f64) -> Result<(usize, f64)> {
    let mut v = sv.to_vec();
    v.sort_by(f64::total_cmp);
    let below = v.iter().take_while(|&&x| x < tol).count();
    let retained = v.get(below).copied().unwrap_or(f64::INFINITY);
    let discarded = if below > 0 {
        v[below - 1].max(1e-300)
    } else {
        tol
    };
    let ratio = retained / discarded;
    if ratio < GAP_RATIO || retained < GAP_RATIO * tol {
        return Err(LabError::NoSpectralGap { below, ratio });
    }
    Ok((below, ratio))
}

/// Singular values of the truncated `∂̄` and of its adjoint.
pub fn singular_values(op: &TwistedDolbeault) -> (Vec<f64>, Vec<f64>) {
    match &op.potential {
        Potential::Slice { shifts } => {
            let mut v: Vec<f64> = op
                .modes()
                .iter()
                .flat_map(|&(m, n)| {
                    shifts.iter().map(move |s| {
                        std::f64::consts::SQRT_2 * dbar_symbol(op.tau, op.z + s, m, n).norm()
                    })
                })
                .collect();
            v.sort_by(f64::total_cmp);
            (v.clone(), v)
        }
        Potential::Dense { .. } => {
            let (d, da) = op.rectangular();
            (svals(d), svals(da))
        }
    }
}

fn svals(m: DMatrix<Complex64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.singular_values().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `(h⁰, h¹) = (dim ker ∂̄, dim ker ∂̄*)` at truncations `N` and `2N`, with
/// a certified gap, stability across truncations and the genus-one index
/// check `h⁰ − h¹ = 0`.
pub fn kernel_dim(op: &TwistedDolbeault, tol: f64) -> Result<KernelReport> {
    let n1 = op.truncation;
    let n2 = 2 * n1;
    let mut counts = Vec::new();
    let mut head = Vec::new();
    let mut ratio = f64::INFINITY;
    for n in [n1, n2] {
        let (sd, sa) = singular_values(&op.with_truncation(n));
        let (h0, r0) = certified_count(&sd, tol)?;
        let (h1, r1) = certified_count(&sa, tol)?;
        ratio = ratio.min(r0).min(r1);
        counts.push((h0, h1));
        head = sd.iter().take(8).copied().collect();
    }
    if counts[0].0 != counts[1].0 {
        return Err(LabError::RankUnstable {
            first: counts[0].0,
            second: counts[1].0,
        });
    }
    if counts[0].1 != counts[1].1 {
        return Err(LabError::RankUnstable {
            first: counts[0].1,
            second: counts[1].1,
        });
    }
    let (h0, h1) = counts[1];
    if h0 != h1 {
        return Err(LabError::NonzeroIndex(h0 as i64 - h1 as i64));
    }
    Ok(KernelReport {
        h0,
        h1,
        gap_ratio: ratio,
        head,
        truncations: [n1, n2],
    })
}

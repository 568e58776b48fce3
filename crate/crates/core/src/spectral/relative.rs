use std::f64::consts::PI;

use nalgebra::{DVector, Dyn, LU};
use num_complex::Complex64;

use super::operator::{dbar_symbol, Potential, TwistedDolbeault};
use super::zeta::{DetMethod, ZetaDet};
use crate::error::{LabError, Result};

/// Eigenvalues below this multiple of `2(π/τ₂)²` count as near zero.
const NEAR_ZERO: f64 = 1e-9;

/// `log det` of the truncated `Δ` with its smallest eigenvalue.
pub fn truncated_log_det(op: &TwistedDolbeault) -> Result<(f64, f64)> {
    let unit = 2.0 * (PI / op.tau.im).powi(2);
    let (ld, lmin) = match &op.potential {
        Potential::Slice { shifts } => {
            let mut ld = 0.0;
            let mut lmin = f64::INFINITY;
            for &(m, n) in &op.modes() {
                for s in shifts {
                    let l = 2.0 * dbar_symbol(op.tau, op.z + s, m, n).norm_sqr();
                    lmin = lmin.min(l);
                    ld += l.ln();
                }
            }
            (ld, lmin)
        }
        Potential::Dense { .. } => {
            let lu = op.section().lu();
            let u = lu.u();
            let ld: f64 = (0..u.nrows()).map(|i| 2.0 * u[(i, i)].norm().ln()).sum();
            if !ld.is_finite() {
                return Err(LabError::IllConditioned(0.0));
            }
            (ld, smallest_eigenvalue(&lu))
        }
    };
    if lmin < NEAR_ZERO * unit {
        return Err(LabError::IllConditioned(lmin));
    }
    Ok((ld, lmin))
}

/// Smallest eigenvalue of `S*S` by inverse iteration on an LU of `S`.
fn smallest_eigenvalue(lu: &LU<Complex64, Dyn, Dyn>) -> f64 {
    let l = lu.l();
    let u = lu.u();
    let n = u.nrows();
    let mut x = DVector::from_fn(n, |i, _| Complex64::from_polar(1.0, 0.7 * i as f64));
    x /= Complex64::new(x.norm(), 0.0);
    let mut est = 0.0;
    for _ in 0..30 {
        // S* = U* L* P, so S*⁻¹ x = P⁻¹ L*⁻¹ U*⁻¹ x.
        let Some(w) = u.ad_solve_upper_triangular(&x) else {
            return 0.0;
        };
        let Some(mut v) = l.ad_solve_lower_triangular(&w) else {
            return 0.0;
        };
        lu.p().inv_permute_rows(&mut v);
        let Some(y) = lu.solve(&v) else {
            return 0.0;
        };
        let ny = y.norm();
        let next = 1.0 / ny;
        x = y / Complex64::new(ny, 0.0);
        if (next - est).abs() < 1e-10 * next {
            est = next;
            break;
        }
        est = next;
    }
    est
}

/// Truncated log ratio at one radius, with the local counterterm
/// `(1/π)∫(|B_A|² − |B_ref|²)` that maps disc truncation to ζ-regularization.
pub fn log_ratio_at(op: &TwistedDolbeault, reference: &TwistedDolbeault) -> Result<f64> {
    Ok(log_ratio_with_floor(op, reference)?.0)
}

fn log_ratio_with_floor(op: &TwistedDolbeault, reference: &TwistedDolbeault) -> Result<(f64, f64)> {
    let (la, lmin) = truncated_log_det(op)?;
    let (lr, _) = truncated_log_det(reference)?;
    Ok((
        la - lr - (op.potential_energy() - reference.potential_energy()) / PI,
        lmin,
    ))
}

/// `det_ζ(Δ_A)/det_ζ(Δ_ref)` from finite sections at `N` and `⌈3N/2⌉`,
/// Richardson-extrapolated in `1/N`; the error is the extrapolation
/// residual.
pub fn relative_det_truncated(
    op: &TwistedDolbeault,
    reference: &TwistedDolbeault,
) -> Result<ZetaDet> {
    Ok(relative_det_with_floor(op, reference)?.0)
}

/// As [`relative_det_truncated`], also returning the smallest eigenvalue
/// of `Δ_A` at the finer truncation.
pub fn relative_det_with_floor(
    op: &TwistedDolbeault,
    reference: &TwistedDolbeault,
) -> Result<(ZetaDet, f64)> {
    if op.rank() != reference.rank() || op.tau != reference.tau {
        return Err(LabError::Shape(
            "reference operator differs in rank or modulus".into(),
        ));
    }
    let n1 = op.truncation;
    let n2 = (3 * n1).div_ceil(2);
    let (l1, _) = log_ratio_with_floor(op, &reference.with_truncation(n1))?;
    let (l2, lmin) = log_ratio_with_floor(&op.with_truncation(n2), &reference.with_truncation(n2))?;
    let r = n2 as f64 / n1 as f64;
    let lim = (r * l2 - l1) / (r - 1.0);
    let err = (lim - l2).abs();
    Ok((
        ZetaDet::from_log(lim, err, DetMethod::TruncatedRelative, None),
        lmin,
    ))
}

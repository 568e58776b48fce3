use num_complex::Complex64;

use super::kernel::{kernel_dim, KernelReport, KERNEL_TOL};
use super::operator::{dbar_symbol, disc_modes, weight_value, TwistedDolbeault};
use crate::error::Result;
use crate::liealg::{RepresentationWeights, RootSystem, Weight};

/// Spectrum of the weight-`λ` block of `Δ` at the slice point `w`:
/// `2(π/τ₂)²|τm − n + λ(w) + z|²` over the disc modes, sorted.
pub fn slice_spectrum(
    w: &[Complex64],
    weight: &Weight,
    z: Complex64,
    tau: Complex64,
    truncation: usize,
) -> Vec<f64> {
    let s = weight_value(&weight.to_f64(), w) + z;
    let mut ev: Vec<f64> = disc_modes(tau, truncation)
        .iter()
        .map(|&(m, n)| 2.0 * dbar_symbol(tau, s, m, n).norm_sqr())
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Distance from `x` to the period lattice `ℤ + τℤ`.
pub fn lattice_distance(x: Complex64, tau: Complex64) -> f64 {
    let b = x.im / tau.im;
    let mut best = f64::INFINITY;
    for db in [b.floor(), b.ceil()] {
        let rest = x - tau * db;
        for da in [rest.re.floor(), rest.re.ceil()] {
            best = best.min((rest - da).norm());
        }
    }
    best
}

/// Positive roots (by index) with `α(w)` on the period lattice.
pub fn lattice_roots(rs: &RootSystem, w: &[Complex64], tau: Complex64, tol: f64) -> Vec<usize> {
    rs.positive_covectors
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            let f: Vec<f64> = c.iter().map(|&x| x as f64).collect();
            lattice_distance(weight_value(&f, w), tau) < tol
        })
        .map(|(i, _)| i)
        .collect()
}

/// Certified `dim H⁰` of the adjoint bundle at a slice point (untwisted).
pub fn adjoint_kernel(
    rs: &RootSystem,
    w: &[Complex64],
    tau: Complex64,
    truncation: usize,
) -> Result<KernelReport> {
    let op = TwistedDolbeault::on_slice(
        rs,
        &RepresentationWeights::adjoint(rs),
        w,
        Complex64::new(0.0, 0.0),
        tau,
        truncation,
    )?;
    kernel_dim(&op, KERNEL_TOL)
}

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernel::{certified_count, KernelReport, GAP_RATIO};
use super::operator::check_tau;
use crate::error::{LabError, Result};

/// Minimum number of grid points per flux quantum.
pub const POINTS_PER_FLUX: f64 = 8.0;

/// Finite-difference `∂̄` on `⊕_i L_{d_i} ⊗ L_z` over an `N × N` grid.
///
/// Sections of `L_d` obey `ψ(u+1, v) = ψ(u, v)` and
/// `ψ(u, v+1) = e^{−πidτ(1+2v) − 2πidu} ψ(u, v)`. In Fourier modes along
/// `u` the multiplier sends `c_m` to `c_{m+d}`, so for `d ≠ 0` each residue
/// class of `m` mod `d` unfolds into one chain on the line, on which `∂̄ψ = 0`
/// reads `g′ = 2πi(τm(y) + z) g`. Chains carry Dirichlet ends; for `d = 0`
/// each mode is a periodic loop in `v`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClutchedDbar {
    pub degrees: Vec<i64>,
    pub z: [f64; 2],
    pub tau: [f64; 2],
    pub grid: usize,
}

/// Per-summand kernel counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummandKernel {
    pub degree: i64,
    pub h0: usize,
    pub h1: usize,
}

pub fn clutched_dbar(
    degrees: &[i64],
    z: Complex64,
    tau: Complex64,
    grid: usize,
) -> Result<ClutchedDbar> {
    check_tau(tau)?;
    if degrees.is_empty() || degrees.iter().sum::<i64>() != 0 {
        return Err(LabError::DegreeSum);
    }
    for &d in degrees {
        if d != 0 {
            let points = grid as f64 / d.unsigned_abs() as f64;
            if points < POINTS_PER_FLUX {
                return Err(LabError::Resolution { points });
            }
        }
    }
    if grid < 2 {
        return Err(LabError::Resolution {
            points: grid as f64,
        });
    }
    Ok(ClutchedDbar {
        degrees: degrees.to_vec(),
        z: [z.re, z.im],
        tau: [tau.re, tau.im],
        grid,
    })
}

/// Number of eigenvalues below `x` of the zero-diagonal symmetric
/// tridiagonal matrix with off-diagonal moduli `e`.
fn sturm_count(e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = -x;
    if q < 0.0 {
        count += 1;
    }
    for &b in e {
        let prev = if q == 0.0 { f64::MIN_POSITIVE } else { q };
        q = -x - b * b / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Bidiagonal chain operator: number of singular values below `t`.
fn chain_count(e: &[f64], t: f64) -> usize {
    let inside = sturm_count(e, t) - sturm_count(e, -t);
    (inside - 1) / 2
}

/// `k`-th smallest singular value (1-based) of a chain by bisection in
/// log scale.
fn chain_singular_value(e: &[f64], k: usize) -> f64 {
    let norm = e.iter().fold(0.0f64, |a, b| a.max(*b)) * 2.0 + 1.0;
    let (mut lo, mut hi) = (-700.0f64, norm.ln());
    if chain_count(e, lo.exp()) >= k {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chain_count(e, mid.exp()) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    hi.exp()
}

impl ClutchedDbar {
    fn tau_c(&self) -> Complex64 {
        Complex64::new(self.tau[0], self.tau[1])
    }

    fn z_c(&self) -> Complex64 {
        Complex64::new(self.z[0], self.z[1])
    }

    pub fn with_grid(&self, grid: usize) -> Self {
        ClutchedDbar {
            grid,
            ..self.clone()
        }
    }

    /// Mode range along `u`.
    fn mode_range(&self) -> (i64, i64) {
        let half = self.grid as i64 / 2;
        (-half, self.grid as i64 - half - 1)
    }

    /// Coefficient `a_m = 2πi(τm + z)` of `g′ = a g`, or its adjoint
    /// counterpart `−ā_m`.
    fn coefficient(&self, m: i64, adjoint: bool) -> Complex64 {
        let a = Complex64::new(0.0, 2.0 * PI) * (self.tau_c() * m as f64 + self.z_c());
        if adjoint {
            -a.conj()
        } else {
            a
        }
    }

    /// Off-diagonal moduli of the Golub–Kahan form of one chain.
    fn chain(&self, degree: i64, residue: i64, adjoint: bool) -> Vec<f64> {
        let (lo, hi) = self.mode_range();
        let n = self.grid;
        let h = 1.0 / n as f64;
        let ms: Vec<i64> = (lo..=hi)
            .filter(|m| (m - residue).rem_euclid(degree.abs()) == 0)
            .collect();
        let ms: Vec<i64> = if degree > 0 {
            ms
        } else {
            ms.into_iter().rev().collect()
        };
        let edges: Vec<Complex64> = ms
            .iter()
            .flat_map(|&m| std::iter::repeat_n(self.coefficient(m, adjoint), n))
            .collect();
        let l = edges.len();
        let mut e = Vec::with_capacity(2 * l - 2);
        for (j, a) in edges.iter().enumerate() {
            if j >= 1 {
                e.push((Complex64::new(1.0 / h, 0.0) + a * 0.5).norm());
            }
            if j + 1 < l {
                e.push((Complex64::new(1.0 / h, 0.0) - a * 0.5).norm());
            }
        }
        e
    }

    /// Singular values of the periodic loops of a degree-zero summand.
    fn loops(&self, adjoint: bool) -> Vec<f64> {
        let (lo, hi) = self.mode_range();
        let n = self.grid;
        let h = 1.0 / n as f64;
        let mut out = Vec::with_capacity(n * n);
        for m in lo..=hi {
            let a = self.coefficient(m, adjoint);
            let alpha = Complex64::new(1.0 / h, 0.0) - a * 0.5;
            let beta = -(Complex64::new(1.0 / h, 0.0) + a * 0.5);
            for k in 0..n {
                let w = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
                out.push((alpha * w + beta).norm());
            }
        }
        out
    }

    /// Certified kernel count for one summand (or its adjoint), with the
    /// gap ratio.
    fn count(&self, degree: i64, adjoint: bool, tol: f64) -> Result<(usize, f64)> {
        if degree == 0 {
            return certified_count(&self.loops(adjoint), tol);
        }
        let mut total = 0;
        let mut ratio = f64::INFINITY;
        for r in 0..degree.abs() {
            let e = self.chain(degree, r, adjoint);
            let below = chain_count(&e, tol);
            let retained = chain_singular_value(&e, below + 1);
            let discarded = if below > 0 {
                chain_singular_value(&e, below).max(1e-300)
            } else {
                tol
            };
            let rr = retained / discarded;
            if rr < GAP_RATIO || retained < GAP_RATIO * tol {
                return Err(LabError::NoSpectralGap { below, ratio: rr });
            }
            ratio = ratio.min(rr);
            total += below;
        }
        Ok((total, ratio))
    }

    /// `(h⁰, h¹)` of each summand at this grid.
    pub fn summand_kernels(&self, tol: f64) -> Result<Vec<(SummandKernel, f64)>> {
        self.degrees
            .iter()
            .map(|&d| {
                let (h0, r0) = self.count(d, false, tol)?;
                let (h1, r1) = self.count(d, true, tol)?;
                Ok((SummandKernel { degree: d, h0, h1 }, r0.min(r1)))
            })
            .collect()
    }

    /// Kernel dimensions of the direct sum at grids `N` and `2N`, with the
    /// same certification as the Fourier backends.
    pub fn kernel_dim(&self, tol: f64) -> Result<KernelReport> {
        let mut totals = Vec::new();
        let mut ratio = f64::INFINITY;
        for g in [self.grid, 2 * self.grid] {
            let ks = self.with_grid(g).summand_kernels(tol)?;
            let h0: usize = ks.iter().map(|k| k.0.h0).sum();
            let h1: usize = ks.iter().map(|k| k.0.h1).sum();
            ratio = ks.iter().fold(ratio, |a, k| a.min(k.1));
            totals.push((h0, h1));
        }
        if totals[0] != totals[1] {
            return Err(LabError::RankUnstable {
                first: totals[0].0,
                second: totals[1].0,
            });
        }
        let (h0, h1) = totals[0];
        if h0 != h1 {
            return Err(LabError::NonzeroIndex(h0 as i64 - h1 as i64));
        }
        Ok(KernelReport {
            h0,
            h1,
            gap_ratio: ratio,
            head: vec![],
            truncations: [self.grid, 2 * self.grid],
        })
    }
}

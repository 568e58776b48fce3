use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::{check_tau, weight_value};
use crate::error::{LabError, Result};
use crate::liealg::{RepresentationWeights, RootSystem};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponent at which lattice sums are cut off.
const CUT: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetMethod {
    Continuation,
    TruncatedRelative,
}

/// A ζ-regularized determinant, stored through its logarithm.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ZetaDet {
    pub value: f64,
    pub log_value: f64,
    /// Absolute error estimate on `log_value`.
    pub error: f64,
    pub method: DetMethod,
    /// `ζ(0)` of the spectrum (continuation only).
    pub zeta0: Option<f64>,
}

impl ZetaDet {
    pub(crate) fn from_log(
        log_value: f64,
        error: f64,
        method: DetMethod,
        zeta0: Option<f64>,
    ) -> Self {
        ZetaDet {
            value: log_value.exp(),
            log_value,
            error,
            method,
            zeta0,
        }
    }
}

/// Exponential integral `E₁(x) = Γ(0, x)` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 needs a positive argument, got {x}");
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        // Modified Lentz evaluation of the continued fraction.
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Continuation data for one shifted lattice `{|τm − n + s|²}`.
#[derive(Debug, Clone, Copy)]
pub struct EpsteinParts {
    /// `Z′(0)` of `Σ' |ω + s|^{−2σ}`.
    pub derivative: f64,
    /// Number of excluded zero modes (0 or 1).
    pub zero_modes: usize,
    pub tail: f64,
}

/// `Z′(0)` for `Z(σ) = Σ'_{ω ∈ ℤ + τℤ} |ω + s|^{−2σ}` by the
/// incomplete-gamma split at `t₀`.
pub fn epstein_derivative(tau: Complex64, s: Complex64, t0: f64, kernel_tol: f64) -> EpsteinParts {
    let t2 = tau.im;
    // Direct sum of E₁(t₀|ω+s|²) over |ω+s|² ≤ CUT/t₀.
    let r2 = CUT / t0;
    let r = r2.sqrt();
    let mut direct = 0.0;
    let mut zero_modes = 0;
    let mlo = ((-r - s.im) / t2).floor() as i64 - 1;
    let mhi = ((r - s.im) / t2).ceil() as i64 + 1;
    for m in mlo..=mhi {
        let re = tau.re * m as f64 + s.re;
        for n in ((re - r).floor() as i64 - 1)..=((re + r).ceil() as i64 + 1) {
            let x = (tau * m as f64 - n as f64 + s).norm_sqr();
            if x.sqrt() < kernel_tol {
                zero_modes += 1;
                continue;
            }
            if x <= r2 {
                direct += exp_integral_e1(t0 * x);
            }
        }
    }
    // Dual sum: ω* = (p, (q − pτ₁)/τ₂) with ⟨ω*, ω⟩ ∈ ℤ.
    let y2 = CUT * t0 / (PI * PI);
    let y = y2.sqrt();
    let mut dual = 0.0;
    let pmax = y.ceil() as i64 + 1;
    for p in -pmax..=pmax {
        let qc = p as f64 * tau.re;
        let qr = y * t2;
        for q in ((qc - qr).floor() as i64 - 1)..=((qc + qr).ceil() as i64 + 1) {
            if p == 0 && q == 0 {
                continue;
            }
            let wy = (q as f64 - p as f64 * tau.re) / t2;
            let k2 = (p * p) as f64 + wy * wy;
            if k2 > y2 {
                continue;
            }
            let phase = 2.0 * PI * (p as f64 * s.re + wy * s.im);
            let e = PI * PI * k2 / t0;
            dual += phase.cos() * (-e).exp() / (PI * PI * k2);
        }
    }
    let delta = zero_modes as f64;
    let f0 = direct - PI / (t2 * t0) + (PI / t2) * dual - delta * t0.ln();
    EpsteinParts {
        derivative: f0 - EULER_GAMMA * delta,
        zero_modes,
        tail: 4.0 * (-CUT).exp() * (1.0 + r2 * t0 + y2),
    }
}

/// `log det_ζ` of the spectrum `{c·|τm − n + s|²}` with an excluded zero
/// mode when `s` lies on the lattice; also returns `ζ(0)`.
pub fn shifted_lattice_log_det(
    tau: Complex64,
    s: Complex64,
    scale: f64,
    t0: f64,
) -> (f64, f64, usize, f64) {
    let parts = epstein_derivative(tau, s, t0, 1e-10);
    let delta = parts.zero_modes as f64;
    let zeta0 = -delta;
    // log det = −ζ′(0) with ζ(σ) = c^{−σ}Z(σ).
    let log_det = -(parts.derivative - zeta0 * scale.ln());
    (log_det, zeta0, parts.zero_modes, parts.tail)
}

/// `det_ζ Δ^V_{w,z}` on the constant Cartan slice by exact continuation,
/// with the spectrum `2(π/τ₂)²|τm − n + λ(w) + z|²` per weight.
pub fn zeta_det_slice(
    rs: &RootSystem,
    rep: &RepresentationWeights,
    w: &[Complex64],
    z: Complex64,
    tau: Complex64,
    exclude_kernel: bool,
) -> Result<ZetaDet> {
    zeta_det_slice_cut(rs, rep, w, z, tau, exclude_kernel, PI / tau.im)
}

/// As [`zeta_det_slice`] with an explicit split point `t₀`.
pub fn zeta_det_slice_cut(
    rs: &RootSystem,
    rep: &RepresentationWeights,
    w: &[Complex64],
    z: Complex64,
    tau: Complex64,
    exclude_kernel: bool,
    t0: f64,
) -> Result<ZetaDet> {
    check_tau(tau)?;
    if w.len() != rs.rank {
        return Err(LabError::Shape(format!(
            "slice point of length {} for rank {}",
            w.len(),
            rs.rank
        )));
    }
    let scale = 2.0 * (PI / tau.im).powi(2);
    let mut total = 0.0;
    let mut zeta0 = 0.0;
    let mut err = 0.0;
    let mut kernel = 0;
    let mut nearest = f64::INFINITY;
    for (wt, mult) in &rep.weights {
        let s = weight_value(&wt.to_f64(), w) + z;
        let (ld, z0, zm, tail) = shifted_lattice_log_det(tau, s, scale, t0);
        nearest = nearest.min(scale * super::slice::lattice_distance(s, tau).powi(2));
        kernel += zm * *mult as usize;
        total += *mult as f64 * ld;
        zeta0 += *mult as f64 * z0;
        err += *mult as f64 * (tail + 1e-15 * ld.abs().max(1.0));
    }
    if kernel > 0 && !exclude_kernel {
        return Err(LabError::KernelPresent(nearest));
    }
    Ok(ZetaDet::from_log(
        total,
        err,
        DetMethod::Continuation,
        Some(zeta0),
    ))
}

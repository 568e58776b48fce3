use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::LabError;
use crate::gaugefield::{kahler_metric, ym_and_gradient, FourierConnection, MatrixField};

/// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowOptions {
    pub t_max: f64,
    /// Stop once the Kähler norm of the gradient falls below this value.
    pub tol: f64,
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub h_min: f64,
    /// Allowed YM increase per accepted step.
    pub ym_slack: f64,
    /// Store every `stride`-th accepted connection (the final one always).
    pub stride: usize,
    pub max_steps: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            t_max: 3.0,
            tol: 1e-4,
            rtol: 1e-6,
            atol: 1e-10,
            h0: 1e-4,
            h_min: 1e-13,
            ym_slack: 1e-12,
            stride: 1,
            max_steps: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowStatus {
    Converged,
    TimeLimit,
    StepLimit,
}

/// One accepted step.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FlowRecord {
    pub t: f64,
    pub ym: f64,
    pub grad_norm: f64,
    pub step: f64,
}

#[derive(Debug, Clone)]
pub struct FlowTrajectory {
    pub records: Vec<FlowRecord>,
    /// Stored connections with the index of their record.
    pub snapshots: Vec<(usize, FourierConnection)>,
    pub rejected_error: usize,
    pub rejected_monotone: usize,
    pub status: FlowStatus,
    pub terminal: FourierConnection,
}

impl FlowTrajectory {
    pub fn final_record(&self) -> FlowRecord {
        *self.records.last().expect("nonempty trajectory")
    }

    /// Largest YM increase between consecutive accepted steps.
    pub fn max_increase(&self) -> f64 {
        self.records
            .windows(2)
            .map(|w| w[1].ym - w[0].ym)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Least-squares exponent `β` in `‖A(t) − A_end‖ ≈ c·t^{−β}` over the
    /// stored snapshots, with the fit's R².
    pub fn lojasiewicz_fit(&self) -> Option<(f64, f64)> {
        let tau = self.terminal.tau;
        let pts: Vec<(f64, f64)> = self
            .snapshots
            .iter()
            .filter_map(|(i, c)| {
                let t = self.records[*i].t;
                let mut d = c.a.clone();
                d.axpy(Complex64::new(-1.0, 0.0), &self.terminal.a);
                let dist = kahler_metric(tau, &d, &d).sqrt();
                (t > 0.0 && dist > 1e-12).then(|| (t.ln(), dist.ln()))
            })
            .collect();
        if pts.len() < 3 {
            return None;
        }
        let (slope, r2) = linear_fit(&pts);
        Some((-slope, r2))
    }
}

/// Slope and R² of an ordinary least-squares line.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    (slope, r2)
}

/// Failure carrying the partial trajectory.
#[derive(Debug, Clone)]
pub struct FlowFailure {
    pub error: LabError,
    pub partial: FlowTrajectory,
}

/// `exp(−sL)` for the linear part `L` of the gradient at `A = 0`.
///
/// On the pair `(a_k, (a_{−k})†)` with `z = τm − n` the operator is
/// `κ[[|z|², −z²], [−z̄², |z|²]]`, `κ = 4π²/τ₂²`: zero on pure gauge
/// modes and `2κ|z|²` on their complement.
pub fn linear_propagate(a: &MatrixField, tau: Complex64, s: f64) -> MatrixField {
    let kappa = 4.0 * PI * PI / (tau.im * tau.im);
    let n = a.n;
    let mut out = a.clone();
    for (m, k) in a.modes().collect::<Vec<_>>() {
        if m == 0 && k == 0 {
            continue;
        }
        let z = tau * m as f64 - k as f64;
        let c = 0.5 * (-2.0 * s * kappa * z.norm_sqr()).exp_m1();
        let ph = z / z.conj();
        let here = a.mode(m, k);
        let there = a.mode(-m, -k);
        let dst = out.mode_mut(m, k);
        for i in 0..n {
            for j in 0..n {
                let b = there[j * n + i].conj();
                dst[i * n + j] = here[i * n + j] + c * (here[i * n + j] - ph * b);
            }
        }
    }
    out
}

/// Nonlinear remainder `−∇YM(A) + L·A` with the YM value and the Kähler
/// norm of the gradient.
fn nonlinear(tau: Complex64, a: &MatrixField) -> (f64, MatrixField, f64) {
    let c = FourierConnection { tau, a: a.clone() };
    let (ym, g) = ym_and_gradient(&c);
    let gn = kahler_metric(tau, &g, &g).sqrt();
    let kappa = 4.0 * PI * PI / (tau.im * tau.im);
    let n = a.n;
    let mut out = g.scaled(Complex64::new(-1.0, 0.0));
    for (m, k) in a.modes().collect::<Vec<_>>() {
        let z = tau * m as f64 - k as f64;
        let here = a.mode(m, k);
        let there = a.mode(-m, -k);
        let dst = out.mode_mut(m, k);
        for i in 0..n {
            for j in 0..n {
                let b = there[j * n + i].conj();
                dst[i * n + j] += kappa * (z.norm_sqr() * here[i * n + j] - z * z * b);
            }
        }
    }
    (ym, out, gn)
}

struct Step {
    a: MatrixField,
    err: MatrixField,
    k7: MatrixField,
    ym: f64,
    grad_norm: f64,
}

/// One Lawson–Dormand–Prince step of size `h` with known `k1 = N(a)`.
fn lawson_step(tau: Complex64, a: &MatrixField, k1: &MatrixField, h: f64) -> Step {
    let mut ks: Vec<MatrixField> = vec![k1.clone()];
    for s in 1..7 {
        let mut y = linear_propagate(a, tau, C[s] * h);
        for (j, kj) in ks.iter().enumerate() {
            let w = if s < 6 { A[s][j] } else { B5[j] };
            if w != 0.0 {
                y.axpy(
                    Complex64::new(h * w, 0.0),
                    &linear_propagate(kj, tau, (C[s] - C[j]) * h),
                );
            }
        }
        let (ym, k, gn) = nonlinear(tau, &y);
        if s == 6 {
            let mut err = MatrixField::zeros(a.n, a.cutoff);
            ks.push(k.clone());
            for (j, kj) in ks.iter().enumerate() {
                let w = B5[j] - B4[j];
                if w != 0.0 {
                    err.axpy(
                        Complex64::new(h * w, 0.0),
                        &linear_propagate(kj, tau, (1.0 - C[j]) * h),
                    );
                }
            }
            return Step {
                a: y,
                err,
                k7: k,
                ym,
                grad_norm: gn,
            };
        }
        ks.push(k);
    }
    unreachable!()
}

/// A single fixed step of size `h` (no error control).
pub fn flow_step(conn: &FourierConnection, h: f64) -> FourierConnection {
    let k1 = nonlinear(conn.tau, &conn.a).1;
    let st = lawson_step(conn.tau, &conn.a, &k1, h);
    FourierConnection {
        tau: conn.tau,
        a: st.a,
    }
}

fn error_norm(err: &MatrixField, y0: &MatrixField, y1: &MatrixField, rtol: f64, atol: f64) -> f64 {
    let mut s = 0.0;
    for ((e, a), b) in err.data.iter().zip(&y0.data).zip(&y1.data) {
        let sc = atol + rtol * a.norm().max(b.norm());
        s += e.norm_sqr() / (sc * sc);
    }
    (s / err.data.len() as f64).sqrt()
}

/// Negative gradient flow `dA/dt = −∇YM(A)` by adaptive Dormand–Prince
/// in Lawson form (the linear part is propagated exactly), rejecting any
/// step that raises YM by more than the slack.
pub fn flow_run(
    a0: &FourierConnection,
    opts: &FlowOptions,
) -> Result<FlowTrajectory, Box<FlowFailure>> {
    let tau = a0.tau;
    let mut conn = a0.clone();
    let (mut ym, mut k1, gn0) = nonlinear(tau, &conn.a);
    let mut traj = FlowTrajectory {
        records: vec![FlowRecord {
            t: 0.0,
            ym,
            grad_norm: gn0,
            step: 0.0,
        }],
        snapshots: vec![(0, conn.clone())],
        rejected_error: 0,
        rejected_monotone: 0,
        status: FlowStatus::TimeLimit,
        terminal: conn.clone(),
    };
    let mut t = 0.0;
    let mut h = opts.h0;
    let mut accepted = 0usize;
    loop {
        let g = traj.final_record().grad_norm;
        if g < opts.tol {
            traj.status = FlowStatus::Converged;
            break;
        }
        if t >= opts.t_max {
            traj.status = FlowStatus::TimeLimit;
            break;
        }
        if accepted >= opts.max_steps {
            traj.status = FlowStatus::StepLimit;
            break;
        }
        if h < opts.h_min {
            traj.terminal = conn.clone();
            return Err(Box::new(FlowFailure {
                error: LabError::StepUnderflow { t },
                partial: traj,
            }));
        }
        let h_try = h.min(opts.t_max - t).max(opts.h_min);
        let Step {
            a: y5,
            err,
            k7,
            ym: ym_new,
            grad_norm,
        } = lawson_step(tau, &conn.a, &k1, h_try);
        let en = error_norm(&err, &conn.a, &y5, opts.rtol, opts.atol);
        if en > 1.0 || !en.is_finite() {
            traj.rejected_error += 1;
            let fac = if en.is_finite() {
                (0.9 * en.powf(-0.2)).max(0.2)
            } else {
                0.2
            };
            h = h_try * fac;
            continue;
        }
        if ym_new > ym + opts.ym_slack {
            traj.rejected_monotone += 1;
            h = h_try * 0.5;
            continue;
        }
        t += h_try;
        conn.a = y5;
        ym = ym_new;
        k1 = k7;
        accepted += 1;
        traj.records.push(FlowRecord {
            t,
            ym,
            grad_norm,
            step: h_try,
        });
        if accepted.is_multiple_of(opts.stride.max(1)) {
            traj.snapshots.push((traj.records.len() - 1, conn.clone()));
        }
        let fac = if en > 0.0 {
            (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = h_try * fac;
    }
    let last = traj.records.len() - 1;
    if traj.snapshots.last().map(|s| s.0) != Some(last) {
        traj.snapshots.push((last, conn.clone()));
    }
    traj.terminal = conn;
    Ok(traj)
}

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::connection::{FourierConnection, MatrixField};
use super::gauge::diagonal_to_coroot;
use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cycle {
    U,
    V,
}

/// Restriction of a component to the cycle through the origin, as a 1D
/// Fourier series `Σ_j c_j e^{2πi j s}`.
fn restrict(f: &MatrixField, cycle: Cycle) -> Vec<Vec<Complex64>> {
    let c = f.cutoff as i64;
    let e = f.n * f.n;
    (-c..=c)
        .map(|j| {
            let mut acc = vec![Complex64::new(0.0, 0.0); e];
            for l in -c..=c {
                let (m, n) = match cycle {
                    Cycle::U => (j, l),
                    Cycle::V => (l, j),
                };
                for (a, b) in acc.iter_mut().zip(f.mode(m, n)) {
                    *a += b;
                }
            }
            acc
        })
        .collect()
}

fn eval_series(series: &[Vec<Complex64>], s: f64, n: usize) -> DMatrix<Complex64> {
    let c = (series.len() / 2) as i64;
    let mut out = DMatrix::zeros(n, n);
    for (idx, coeff) in series.iter().enumerate() {
        let j = idx as i64 - c;
        let ph = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 * s);
        for a in 0..n {
            for b in 0..n {
                out[(a, b)] += coeff[a * n + b] * ph;
            }
        }
    }
    out
}

fn rk4(series: &[Vec<Complex64>], n: usize, steps: usize) -> DMatrix<Complex64> {
    let h = 1.0 / steps as f64;
    let mut u = DMatrix::<Complex64>::identity(n, n);
    for k in 0..steps {
        let s = k as f64 * h;
        let a0 = -eval_series(series, s, n);
        let a1 = -eval_series(series, s + 0.5 * h, n);
        let a2 = -eval_series(series, s + h, n);
        let k1 = &a0 * &u;
        let k2 = &a1 * (&u + &k1 * Complex64::new(0.5 * h, 0.0));
        let k3 = &a1 * (&u + &k2 * Complex64::new(0.5 * h, 0.0));
        let k4 = &a2 * (&u + &k3 * Complex64::new(h, 0.0));
        u += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4)
            * Complex64::new(h / 6.0, 0.0);
    }
    u
}

/// Path-ordered exponential of `−A` around a cycle through the origin:
/// solves `U′ = −A(γ′)U`, `U(0) = 1` by RK4 with step doubling until two
/// successive resolutions agree to 1e-13.
pub fn holonomy(conn: &FourierConnection, cycle: Cycle) -> DMatrix<Complex64> {
    let (au, av) = conn.real_components();
    let comp = match cycle {
        Cycle::U => au,
        Cycle::V => av,
    };
    let series = restrict(&comp, cycle);
    let n = conn.n();
    let mut steps = 32;
    let mut prev = rk4(&series, n, steps);
    while steps < 1 << 15 {
        steps *= 2;
        let next = rk4(&series, n, steps);
        let diff = (&next - &prev).norm();
        prev = next;
        if diff < 1e-13 {
            break;
        }
    }
    prev
}

/// Cartan point `w = a + τb` (coroot coordinates) of a commuting pair of
/// holonomies `hol_u = exp(−2πib)`, `hol_v = exp(2πia)`, up to the affine
/// Weyl group.
pub fn slice_point_from_holonomies(
    hol_u: &DMatrix<Complex64>,
    hol_v: &DMatrix<Complex64>,
    tau: Complex64,
    commutator_tol: f64,
) -> Result<Vec<Complex64>> {
    let comm = (hol_u * hol_v - hol_v * hol_u).norm();
    if comm > commutator_tol {
        return Err(LabError::NonCommuting(comm));
    }
    let n = hol_u.nrows();
    let mix = hol_u + hol_v * Complex64::new(std::f64::consts::PI, 0.0);
    let q = mix.schur().unpack().0;
    let du = q.adjoint() * hol_u * &q;
    let dv = q.adjoint() * hol_v * &q;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut b: Vec<f64> = (0..n).map(|j| -du[(j, j)].arg() / two_pi).collect();
    let mut a: Vec<f64> = (0..n).map(|j| dv[(j, j)].arg() / two_pi).collect();
    for v in [&mut a, &mut b] {
        let s: f64 = v.iter().sum();
        if (s - s.round()).abs() > 1e-6 {
            return Err(LabError::Invalid(format!("holonomy determinant phase {s}")));
        }
        v[n - 1] -= s.round();
    }
    let d: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x + tau * y).collect();
    Ok(diagonal_to_coroot(&d))
}

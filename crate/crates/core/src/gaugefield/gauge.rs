use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::connection::{check_group, FourierConnection, MatrixField};
use super::curvature::collocation_size;
use super::fourier::{small, Spectral};
use crate::error::{LabError, Result};

/// A gauge transformation of the trivial `SU(n)` (or `SL(n,C)`) bundle.
#[derive(Debug, Clone)]
pub enum GaugeTransformation {
    /// `g = exp(ξ)` for a Fourier field `ξ` (anti-hermitian for unitary `g`).
    Exponential(MatrixField),
    /// `g_λ(z) = exp((π/τ₂)(z λ̄ − z̄ λ))` with `λ = λ₁ − τλ₂`, both in the
    /// coroot lattice (coroot coordinates).
    Lattice {
        n: usize,
        l1: Vec<i64>,
        l2: Vec<i64>,
    },
    /// A constant matrix.
    Constant(DMatrix<Complex64>),
    /// Pointwise product `g h`; acting by it equals acting by `h`, then `g`.
    Product(Box<GaugeTransformation>, Box<GaugeTransformation>),
}

/// Diagonal entries of the Cartan element with coroot coordinates `c`.
pub fn coroot_to_diagonal<T>(c: &[T]) -> Vec<T>
where
    T: Copy + Default + std::ops::Sub<Output = T>,
{
    let n = c.len() + 1;
    (0..n)
        .map(|j| {
            let hi = if j < n - 1 { c[j] } else { T::default() };
            let lo = if j > 0 { c[j - 1] } else { T::default() };
            hi - lo
        })
        .collect()
}

/// Coroot coordinates of a traceless diagonal: cumulative sums.
pub fn diagonal_to_coroot(d: &[Complex64]) -> Vec<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    d[..d.len() - 1]
        .iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect()
}

/// The lattice gauge transformation for `λ ∈ Λ ⊕ τΛ` given in coroot
/// coordinates.
pub fn g_lambda(lambda: &[Complex64], tau: Complex64) -> Result<GaugeTransformation> {
    let mut l1 = Vec::new();
    let mut l2 = Vec::new();
    for x in lambda {
        let b = -x.im / tau.im;
        let a = x.re + tau.re * b;
        let (ra, rb) = (a.round(), b.round());
        if (a - ra).abs() > 1e-9 || (b - rb).abs() > 1e-9 {
            return Err(LabError::NotInLattice);
        }
        l1.push(ra as i64);
        l2.push(rb as i64);
    }
    let n = lambda.len() + 1;
    check_group(n)?;
    Ok(GaugeTransformation::Lattice { n, l1, l2 })
}

/// Values of `g`, `g⁻¹` and `∂_z̄ g` on an `N × N` grid.
pub struct GridGauge {
    pub g: Vec<Complex64>,
    pub ginv: Vec<Complex64>,
    pub dbar: Vec<Complex64>,
}

fn to_dmatrix(s: &[Complex64], n: usize) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(n, n, s)
}

fn write_dmatrix(m: &DMatrix<Complex64>, out: &mut [Complex64]) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = m[(i, j)];
        }
    }
}

/// `∂_z̄ = (∂_v − τ∂_u)/(−2iτ₂)` on coefficient fields.
pub fn dbar_field(f: &MatrixField, tau: Complex64) -> MatrixField {
    let mut d = f.dv();
    d.axpy(-tau, &f.du());
    d.scaled(Complex64::new(0.0, 0.5 / tau.im))
}

impl GaugeTransformation {
    pub fn identity(n: usize) -> Self {
        GaugeTransformation::Constant(DMatrix::identity(n, n))
    }

    pub fn n(&self) -> usize {
        match self {
            GaugeTransformation::Exponential(x) => x.n,
            GaugeTransformation::Lattice { n, .. } => *n,
            GaugeTransformation::Constant(m) => m.nrows(),
            GaugeTransformation::Product(a, _) => a.n(),
        }
    }

    /// Largest Fourier mode needed to represent the transformation's
    /// generator, used for the resolution check.
    fn generator_cutoff(&self) -> usize {
        match self {
            GaugeTransformation::Exponential(x) => x.cutoff,
            GaugeTransformation::Lattice { l1, l2, .. } => {
                let d1 = coroot_to_diagonal(l1);
                let d2 = coroot_to_diagonal(l2);
                d1.iter()
                    .chain(&d2)
                    .map(|x| x.unsigned_abs() as usize)
                    .max()
                    .unwrap_or(0)
            }
            GaugeTransformation::Constant(_) => 0,
            GaugeTransformation::Product(a, b) => a.generator_cutoff().max(b.generator_cutoff()),
        }
    }

    pub fn on_grid(&self, grid: usize, tau: Complex64) -> GridGauge {
        let n = self.n();
        let e = n * n;
        let pts = grid * grid;
        let zero = Complex64::new(0.0, 0.0);
        match self {
            GaugeTransformation::Exponential(xi) => {
                let spec = Spectral::cached(grid);
                let xg = spec.to_grid(&xi.data, xi.cutoff, e);
                let dg = spec.to_grid(&dbar_field(xi, tau).data, xi.cutoff, e);
                let mut out = GridGauge {
                    g: vec![zero; pts * e],
                    ginv: vec![zero; pts * e],
                    dbar: vec![zero; pts * e],
                };
                for p in 0..pts {
                    let x = to_dmatrix(&xg[p * e..(p + 1) * e], n);
                    let d = to_dmatrix(&dg[p * e..(p + 1) * e], n);
                    let mut block = DMatrix::zeros(2 * n, 2 * n);
                    block.view_mut((0, 0), (n, n)).copy_from(&x);
                    block.view_mut((n, n), (n, n)).copy_from(&x);
                    block.view_mut((0, n), (n, n)).copy_from(&d);
                    let ex = block.exp();
                    let g = ex.view((0, 0), (n, n)).into_owned();
                    let dbar = ex.view((0, n), (n, n)).into_owned();
                    let ginv = (-x).exp();
                    write_dmatrix(&g, &mut out.g[p * e..(p + 1) * e]);
                    write_dmatrix(&ginv, &mut out.ginv[p * e..(p + 1) * e]);
                    write_dmatrix(&dbar, &mut out.dbar[p * e..(p + 1) * e]);
                }
                out
            }
            GaugeTransformation::Lattice { l1, l2, .. } => {
                let d1 = coroot_to_diagonal(l1);
                let d2 = coroot_to_diagonal(l2);
                let lam: Vec<Complex64> = d1
                    .iter()
                    .zip(&d2)
                    .map(|(&a, &b)| a as f64 - tau * b as f64)
                    .collect();
                let mut out = GridGauge {
                    g: vec![zero; pts * e],
                    ginv: vec![zero; pts * e],
                    dbar: vec![zero; pts * e],
                };
                for a in 0..grid {
                    for b in 0..grid {
                        let (u, v) = (a as f64 / grid as f64, b as f64 / grid as f64);
                        let p = a * grid + b;
                        for j in 0..n {
                            let ph = 2.0 * PI * (d2[j] as f64 * u + d1[j] as f64 * v);
                            let g = Complex64::from_polar(1.0, ph);
                            out.g[p * e + j * n + j] = g;
                            out.ginv[p * e + j * n + j] = g.conj();
                            out.dbar[p * e + j * n + j] = -(PI / tau.im) * lam[j] * g;
                        }
                    }
                }
                out
            }
            GaugeTransformation::Constant(m) => {
                let inv = m.clone().try_inverse().expect("invertible constant gauge");
                let mut out = GridGauge {
                    g: vec![zero; pts * e],
                    ginv: vec![zero; pts * e],
                    dbar: vec![zero; pts * e],
                };
                for p in 0..pts {
                    write_dmatrix(m, &mut out.g[p * e..(p + 1) * e]);
                    write_dmatrix(&inv, &mut out.ginv[p * e..(p + 1) * e]);
                }
                out
            }
            GaugeTransformation::Product(a, b) => {
                let ga = a.on_grid(grid, tau);
                let gb = b.on_grid(grid, tau);
                let mut out = GridGauge {
                    g: vec![zero; pts * e],
                    ginv: vec![zero; pts * e],
                    dbar: vec![zero; pts * e],
                };
                let mut t1 = vec![zero; e];
                let mut t2 = vec![zero; e];
                for p in 0..pts {
                    let r = p * e..(p + 1) * e;
                    small::mul(&ga.g[r.clone()], &gb.g[r.clone()], &mut out.g[r.clone()], n);
                    small::mul(
                        &gb.ginv[r.clone()],
                        &ga.ginv[r.clone()],
                        &mut out.ginv[r.clone()],
                        n,
                    );
                    small::mul(&ga.dbar[r.clone()], &gb.g[r.clone()], &mut t1, n);
                    small::mul(&ga.g[r.clone()], &gb.dbar[r.clone()], &mut t2, n);
                    for ((o, x), y) in out.dbar[r].iter_mut().zip(&t1).zip(&t2) {
                        *o = x + y;
                    }
                }
                out
            }
        }
    }

    /// Value at the holonomy basepoint `z = 0`.
    pub fn at_origin(&self) -> DMatrix<Complex64> {
        match self {
            GaugeTransformation::Exponential(xi) => {
                let e = xi.n * xi.n;
                let mut x = vec![Complex64::new(0.0, 0.0); e];
                for chunk in xi.data.chunks(e) {
                    for (a, b) in x.iter_mut().zip(chunk) {
                        *a += b;
                    }
                }
                to_dmatrix(&x, xi.n).exp()
            }
            GaugeTransformation::Lattice { n, .. } => DMatrix::identity(*n, *n),
            GaugeTransformation::Constant(m) => m.clone(),
            GaugeTransformation::Product(a, b) => a.at_origin() * b.at_origin(),
        }
    }
}

/// `a ↦ g a g⁻¹ − (∂_z̄ g) g⁻¹` on the default collocation grid.
pub fn gauge_act(g: &GaugeTransformation, conn: &FourierConnection) -> Result<FourierConnection> {
    gauge_act_with_grid(g, conn, collocation_size(conn.cutoff()))
}

pub fn gauge_act_with_grid(
    g: &GaugeTransformation,
    conn: &FourierConnection,
    grid: usize,
) -> Result<FourierConnection> {
    let n = conn.n();
    if g.n() != n {
        return Err(LabError::Shape(format!(
            "gauge su({}) vs connection su({n})",
            g.n()
        )));
    }
    let m = conn.cutoff();
    let need = 2 * m.max(g.generator_cutoff()) + 1;
    if grid < need {
        return Err(LabError::Aliasing { grid, cutoff: m });
    }
    let e = n * n;
    let spec = Spectral::cached(grid);
    let ag = spec.to_grid(&conn.a.data, m, e);
    let gg = g.on_grid(grid, conn.tau);
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; ag.len()];
    let mut t1 = vec![zero; e];
    let mut t2 = vec![zero; e];
    for p in 0..grid * grid {
        let r = p * e..(p + 1) * e;
        small::mul(&gg.g[r.clone()], &ag[r.clone()], &mut t1, n);
        small::mul(&t1, &gg.ginv[r.clone()], &mut t2, n);
        small::mul(&gg.dbar[r.clone()], &gg.ginv[r.clone()], &mut t1, n);
        for ((o, x), y) in out[r].iter_mut().zip(&t2).zip(&t1) {
            *o = x - y;
        }
    }
    let mut a = MatrixField {
        n,
        cutoff: m,
        data: spec.to_modes(&out, m, e),
    };
    a.make_traceless();
    Ok(FourierConnection { tau: conn.tau, a })
}

/// The constant Cartan connection `(π/τ₂) w dz̄`, `w` in coroot
/// coordinates.
pub fn cartan_slice(w: &[Complex64], tau: Complex64, cutoff: usize) -> Result<FourierConnection> {
    let n = w.len() + 1;
    let mut conn = FourierConnection::zero(n, cutoff, tau)?;
    let d = coroot_to_diagonal(w);
    let s = PI / tau.im;
    let c = conn.a.mode_mut(0, 0);
    for j in 0..n {
        c[j * n + j] = d[j] * s;
    }
    Ok(conn)
}

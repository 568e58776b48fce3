use std::f64::consts::PI;

use num_complex::Complex64;

use super::connection::{FourierConnection, MatrixField};
use super::fourier::{small, Spectral};

/// Grid size used for products of cutoff-`M` fields.
pub fn collocation_size(cutoff: usize) -> usize {
    4 * cutoff + 1
}

/// Grid values of a connection and its curvature.
pub(crate) struct GridState {
    pub spec: Spectral,
    pub au: Vec<Complex64>,
    pub av: Vec<Complex64>,
    pub f_grid: Vec<Complex64>,
    pub f_modes: MatrixField,
}

fn pointwise_commutator_add(x: &[Complex64], y: &[Complex64], out: &mut [Complex64], n: usize) {
    let e = n * n;
    let mut tmp = vec![Complex64::new(0.0, 0.0); e];
    for ((xa, ya), oa) in x.chunks(e).zip(y.chunks(e)).zip(out.chunks_mut(e)) {
        small::commutator(xa, ya, &mut tmp, n);
        for (o, t) in oa.iter_mut().zip(&tmp) {
            *o += t;
        }
    }
}

/// `A_u = a − a†`, `A_v = τ̄a − τa†` and `∂_uA_v − ∂_vA_u = b − b†` with
/// `b = (τ̄∂_u − ∂_v)a`, all pointwise.
pub(crate) fn grid_state(conn: &FourierConnection) -> GridState {
    let n = conn.n();
    let m = conn.cutoff();
    let e = n * n;
    let tau = conn.tau;
    let spec = Spectral::cached(collocation_size(m));
    let b = conn
        .a
        .multiplied(|p, q| Complex64::new(0.0, 2.0 * PI) * (tau.conj() * p as f64 - q as f64));
    let a_grid = spec.to_grid(&conn.a.data, m, e);
    let b_grid = spec.to_grid(&b.data, m, e);
    let len = a_grid.len();
    let mut au = vec![Complex64::new(0.0, 0.0); len];
    let mut av = au.clone();
    let mut f_grid = au.clone();
    for p in (0..len).step_by(e) {
        for i in 0..n {
            for j in 0..n {
                let x = a_grid[p + i * n + j];
                let xd = a_grid[p + j * n + i].conj();
                au[p + i * n + j] = x - xd;
                av[p + i * n + j] = tau.conj() * x - tau * xd;
                f_grid[p + i * n + j] = b_grid[p + i * n + j] - b_grid[p + j * n + i].conj();
            }
        }
    }
    pointwise_commutator_add(&au, &av, &mut f_grid, n);
    let f_modes = MatrixField {
        n,
        cutoff: 2 * m,
        data: spec.to_modes(&f_grid, 2 * m, e),
    };
    GridState {
        spec,
        au,
        av,
        f_grid,
        f_modes,
    }
}

/// Fourier coefficients (cutoff `2M`) of `F_uv = ∂_uA_v − ∂_vA_u + [A_u, A_v]`,
/// with `F_A = F_uv du∧dv`.
pub fn curvature(conn: &FourierConnection) -> MatrixField {
    grid_state(conn).f_modes
}

/// `YM(A) = ∫ |F_A|² = (1/τ₂) Σ_k ‖F_k‖²` for the form `⟨X,Y⟩ = −tr(XY)`.
pub fn yang_mills(conn: &FourierConnection) -> f64 {
    curvature(conn).norm_sq() / conn.tau.im
}

/// Yang–Mills value and its gradient for the Kähler metric, in
/// `(0,1)`-coordinates: `(D_vF − τ D_uF)/τ₂²` projected to cutoff `M`.
pub fn ym_and_gradient(conn: &FourierConnection) -> (f64, MatrixField) {
    let n = conn.n();
    let m = conn.cutoff();
    let e = n * n;
    let st = grid_state(conn);
    let ym = st.f_modes.norm_sq() / conn.tau.im;
    let tau = conn.tau;
    let dirac = st
        .f_modes
        .multiplied(|p, q| Complex64::new(0.0, 2.0 * PI) * (q as f64 - tau * p as f64));
    let mut g = st.spec.to_grid(&dirac.data, 2 * m, e);
    let comb: Vec<Complex64> = st.av.iter().zip(&st.au).map(|(v, u)| v - tau * u).collect();
    pointwise_commutator_add(&comb, &st.f_grid, &mut g, n);
    let t2sq = tau.im * tau.im;
    for x in &mut g {
        *x /= t2sq;
    }
    let mut grad = MatrixField {
        n,
        cutoff: m,
        data: st.spec.to_modes(&g, m, e),
    };
    grad.make_traceless();
    (ym, grad)
}

/// `∫ ⟨X, Y⟩ du dv = Σ_k −tr(X_k Y_{−k})` (real part), for coefficient
/// fields of pointwise anti-hermitian functions.
pub fn l2_pairing(x: &MatrixField, y: &MatrixField) -> f64 {
    let n = x.n;
    let c = x.cutoff.min(y.cutoff) as i64;
    let mut s = 0.0;
    for m in -c..=c {
        for k in -c..=c {
            let a = x.mode(m, k);
            let b = y.mode(-m, -k);
            let mut tr = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    tr += a[i * n + j] * b[j * n + i];
                }
            }
            s -= tr.re;
        }
    }
    s
}

/// Moment map pairing `⟨μ(A), ξ⟩ = ∫ ⟨F_uv, ξ⟩ du dv`.
pub fn moment_pairing(conn: &FourierConnection, xi: &MatrixField) -> f64 {
    l2_pairing(&curvature(conn), xi)
}

/// Fundamental vector field `ξ^# = −d_Aξ` in `(0,1)`-coordinates,
/// projected to the cutoff of `A`.
pub fn fundamental_field(conn: &FourierConnection, xi: &MatrixField) -> MatrixField {
    let n = conn.n();
    let m = conn.cutoff();
    let e = n * n;
    assert!(xi.cutoff <= m, "xi cutoff above connection cutoff");
    let spec = Spectral::cached(collocation_size(m));
    let (au_c, av_c) = conn.real_components();
    let xi_m = xi.with_cutoff(m);
    let au = spec.to_grid(&au_c.data, m, e);
    let av = spec.to_grid(&av_c.data, m, e);
    let xg = spec.to_grid(&xi_m.data, m, e);
    let mut du = spec.to_grid(&xi_m.du().data, m, e);
    let mut dv = spec.to_grid(&xi_m.dv().data, m, e);
    pointwise_commutator_add(&au, &xg, &mut du, n);
    pointwise_commutator_add(&av, &xg, &mut dv, n);
    let du_c = MatrixField {
        n,
        cutoff: m,
        data: spec.to_modes(&du, m, e),
    }
    .scaled(Complex64::new(-1.0, 0.0));
    let dv_c = MatrixField {
        n,
        cutoff: m,
        data: spec.to_modes(&dv, m, e),
    }
    .scaled(Complex64::new(-1.0, 0.0));
    FourierConnection::from_real_components(conn.tau, &du_c, &dv_c)
}

/// `ω(a₁, a₂) = ∫ (⟨a₁_u, a₂_v⟩ − ⟨a₁_v, a₂_u⟩) du dv` for tangent vectors in
/// `(0,1)`-coordinates.
pub fn symplectic(tau: Complex64, a1: &MatrixField, a2: &MatrixField) -> f64 {
    let c1 = FourierConnection { tau, a: a1.clone() }.real_components();
    let c2 = FourierConnection { tau, a: a2.clone() }.real_components();
    l2_pairing(&c1.0, &c2.1) - l2_pairing(&c1.1, &c2.0)
}

/// Kähler metric `⟨a, b⟩ = ∫⟨a ∧ ∗b⟩ = 4τ₂ Σ_k Re tr(a_k† b_k)`.
pub fn kahler_metric(tau: Complex64, a: &MatrixField, b: &MatrixField) -> f64 {
    4.0 * tau.im * small::hs_inner(&a.data, &b.data).re
}

/// Hodge star on tangent vectors: multiplication by `i` on the
/// `(0,1)`-part.
pub fn hodge_star(a: &MatrixField) -> MatrixField {
    a.scaled(Complex64::new(0.0, 1.0))
}

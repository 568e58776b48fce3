use std::f64::consts::PI;

use cslab_core::gaugefield::*;
use cslab_core::liealg::{affine_weyl_reduce, build_root_system, Family};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_antihermitian_field(
    n: usize,
    cutoff: usize,
    amp: f64,
    r: &mut ChaCha8Rng,
) -> MatrixField {
    let mut f = MatrixField::random(n, cutoff, amp, 1.0, r);
    f.make_antihermitian();
    f.make_traceless();
    f
}

fn random_unitary_gauge(n: usize, amp: f64, r: &mut ChaCha8Rng) -> GaugeTransformation {
    GaugeTransformation::Exponential(random_antihermitian_field(n, 1, amp, r))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn flat_inputs_have_zero_curvature() {
    let tau = c(0.2, 1.1);
    let z = FourierConnection::zero(2, 3, tau).unwrap();
    assert_eq!(curvature(&z).norm_sq(), 0.0);
    let s = cartan_slice(&[c(0.3, -0.7), c(0.1, 0.4)], tau, 3).unwrap();
    assert!(curvature(&s).norm_sq() < 1e-24);
    assert!(yang_mills(&s) < 1e-24);
}

#[test]
fn constant_noncommuting_pair() {
    let tau = c(0.3, 0.9);
    let x = DMatrix::from_row_slice(
        2,
        2,
        &[c(0.0, 0.4), c(0.3, 0.1), c(-0.3, 0.1), c(0.0, -0.4)],
    );
    let y = DMatrix::from_row_slice(
        2,
        2,
        &[c(0.0, -0.2), c(-0.5, 0.7), c(0.5, 0.7), c(0.0, 0.2)],
    );
    // a = (τX − Y)/(2iτ₂)
    let a0 = (&x * tau - &y) * c(0.0, -0.5 / tau.im);
    let mut conn = FourierConnection::zero(2, 2, tau).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            conn.a.mode_mut(0, 0)[i * 2 + j] = a0[(i, j)];
        }
    }
    let f = curvature(&conn);
    let want = &x * &y - &y * &x;
    for i in 0..2 {
        for j in 0..2 {
            assert!((f.mode(0, 0)[i * 2 + j] - want[(i, j)]).norm() < 1e-13);
        }
    }
    assert!(f.norm_sq() - f.mode(0, 0).iter().map(|v| v.norm_sqr()).sum::<f64>() < 1e-24);
}

#[test]
fn single_abelian_mode_closed_form() {
    let tau = c(-0.2, 1.3);
    for (m, n) in [(1i64, 0i64), (0, 1), (2, -1), (1, 3)] {
        let mut conn = FourierConnection::zero(2, 3, tau).unwrap();
        let x = c(0.3, -0.2);
        conn.a.mode_mut(m, n)[0] = x;
        conn.a.mode_mut(m, n)[3] = -x;
        let p = tau * m as f64 - n as f64;
        let want = 8.0 * PI * PI / tau.im * p.norm_sqr() * 2.0 * x.norm_sqr();
        assert!(rel(yang_mills(&conn), want) < 1e-12);
    }
}

#[test]
fn ym_is_gauge_invariant_and_curvature_equivariant() {
    let mut r = rng(7);
    let tau = c(0.1, 1.05);
    for _ in 0..3 {
        let conn = FourierConnection::random(2, 10, tau, 0.3, 1.2, &mut r).unwrap();
        let g = random_unitary_gauge(2, 0.15, &mut r);
        let moved = gauge_act(&g, &conn).unwrap();
        assert!(rel(yang_mills(&conn), yang_mills(&moved)) < 1e-10);
        // F_{gA} = g F_A g⁻¹ pointwise
        let n_grid = collocation_size(10);
        let spec = fourier::Spectral::new(n_grid);
        let f0 = spec.to_grid(&curvature(&conn).data, 20, 4);
        let f1 = spec.to_grid(&curvature(&moved).data, 20, 4);
        let gg = g.on_grid(n_grid, tau);
        let mut worst: f64 = 0.0;
        for p in 0..n_grid * n_grid {
            let gm = DMatrix::from_row_slice(2, 2, &gg.g[p * 4..p * 4 + 4]);
            let gi = DMatrix::from_row_slice(2, 2, &gg.ginv[p * 4..p * 4 + 4]);
            let fm = DMatrix::from_row_slice(2, 2, &f0[p * 4..p * 4 + 4]);
            let want = gm * fm * gi;
            let got = DMatrix::from_row_slice(2, 2, &f1[p * 4..p * 4 + 4]);
            worst = worst.max((want - got).norm());
        }
        assert!(worst < 1e-9, "equivariance defect {worst}");
    }
}

#[test]
fn gauge_action_identity_constant_and_composition() {
    let mut r = rng(3);
    let tau = c(0.25, 0.95);
    let conn = FourierConnection::random(3, 8, tau, 0.3, 1.2, &mut r).unwrap();
    let id = gauge_act(&GaugeTransformation::identity(3), &conn).unwrap();
    assert!(id.a.max_abs_diff(&conn.a) < 1e-13);

    let slice = cartan_slice(&[c(0.2, 0.3), c(-0.4, 0.1)], tau, 4).unwrap();
    let t = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::from_polar(1.0, 0.3),
        Complex64::from_polar(1.0, -1.1),
        Complex64::from_polar(1.0, 0.8),
    ]));
    let moved = gauge_act(&GaugeTransformation::Constant(t), &slice).unwrap();
    assert!(moved.a.max_abs_diff(&slice.a) < 1e-13);

    let g = random_unitary_gauge(3, 0.15, &mut r);
    let h = random_unitary_gauge(3, 0.15, &mut r);
    let gh = GaugeTransformation::Product(Box::new(g.clone()), Box::new(h.clone()));
    let lhs = gauge_act(&gh, &conn).unwrap();
    let rhs = gauge_act(&g, &gauge_act(&h, &conn).unwrap()).unwrap();
    assert!(
        lhs.a.max_abs_diff(&rhs.a) < 1e-9,
        "{}",
        lhs.a.max_abs_diff(&rhs.a)
    );
}

#[test]
fn coarse_grid_rejected() {
    let tau = c(0.0, 1.0);
    let conn = FourierConnection::zero(2, 4, tau).unwrap();
    assert!(gauge_act_with_grid(&GaugeTransformation::identity(2), &conn, 7).is_err());
}

#[test]
fn lattice_gauge_translates_slice() {
    let mut r = rng(5);
    let tau = c(0.35, 1.15);
    for _ in 0..5 {
        let w: Vec<Complex64> = (0..2)
            .map(|_| c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
            .collect();
        let l1: Vec<i64> = (0..2).map(|_| r.random_range(-2..=2)).collect();
        let l2: Vec<i64> = (0..2).map(|_| r.random_range(-2..=2)).collect();
        let lam: Vec<Complex64> = l1
            .iter()
            .zip(&l2)
            .map(|(&a, &b)| a as f64 - tau * b as f64)
            .collect();
        let g = g_lambda(&lam, tau).unwrap();
        let moved = gauge_act(&g, &cartan_slice(&w, tau, 3).unwrap()).unwrap();
        let wl: Vec<Complex64> = w.iter().zip(&lam).map(|(a, b)| a + b).collect();
        let want = cartan_slice(&wl, tau, 3).unwrap();
        assert!(moved.a.max_abs_diff(&want.a) < 1e-9);
    }
    assert!(g_lambda(&[c(0.5, 0.0)], tau).is_err());
    let id = g_lambda(&[c(0.0, 0.0)], tau).unwrap();
    assert!((id.at_origin() - DMatrix::identity(2, 2)).norm() < 1e-15);
}

/// Closed form `exp((π/τ₂)(z λ̄ − z̄ λ))` evaluated independently.
fn g_lambda_formula(diag: &[Complex64], tau: Complex64, z: Complex64) -> Vec<Complex64> {
    diag.iter()
        .map(|l| ((PI / tau.im) * (z * l.conj() - z.conj() * l)).exp())
        .collect()
}

#[test]
fn lattice_gauge_is_periodic_and_unitary() {
    let tau = c(-0.4, 1.2);
    let lam = [c(1.0, 0.0) - tau * 2.0];
    let diag = coroot_to_diagonal(&lam);
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let z = r.random::<f64>() + tau * r.random::<f64>();
        let g0 = g_lambda_formula(&diag, tau, z);
        let g1 = g_lambda_formula(&diag, tau, z + 1.0);
        let g2 = g_lambda_formula(&diag, tau, z + tau);
        for j in 0..2 {
            worst = worst
                .max((g0[j] - g1[j]).norm())
                .max((g0[j] - g2[j]).norm());
            worst = worst.max((g0[j].norm() - 1.0).abs());
        }
    }
    assert!(worst < 1e-10);
    // grid values agree with the closed form
    let g = g_lambda(&lam, tau).unwrap();
    let grid = 9;
    let gg = g.on_grid(grid, tau);
    for a in 0..grid {
        for b in 0..grid {
            let z = a as f64 / grid as f64 + tau * (b as f64 / grid as f64);
            let f = g_lambda_formula(&diag, tau, z);
            let p = (a * grid + b) * 4;
            assert!((gg.g[p] - f[0]).norm() < 1e-12 && (gg.g[p + 3] - f[1]).norm() < 1e-12);
        }
    }
}

#[test]
fn hamiltonian_identity_by_finite_differences() {
    let mut r = rng(12);
    let tau = c(0.15, 1.1);
    for _ in 0..10 {
        let conn = FourierConnection::random(2, 4, tau, 0.4, 1.5, &mut r).unwrap();
        let xi = random_antihermitian_field(2, 3, 0.5, &mut r);
        let b = MatrixField::random(2, 4, 0.5, 1.5, &mut r);
        let h = 1e-5;
        let fd = (moment_pairing(&conn.tangent_add(&b, h), &xi)
            - moment_pairing(&conn.tangent_add(&b, -h), &xi))
            / (2.0 * h);
        let exact = symplectic(tau, &fundamental_field(&conn, &xi), &b);
        assert!(rel(fd, exact) < 1e-6, "fd {fd} vs {exact}");
    }
    // flat A pairs to zero with everything
    let s = cartan_slice(&[c(0.2, 0.1)], tau, 3).unwrap();
    let xi = random_antihermitian_field(2, 2, 0.5, &mut r);
    assert!(moment_pairing(&s, &xi).abs() < 1e-14);
}

#[test]
fn gradient_matches_finite_differences() {
    let mut r = rng(13);
    let tau = c(-0.1, 0.9);
    for _ in 0..10 {
        let conn = FourierConnection::random(2, 4, tau, 0.4, 1.5, &mut r).unwrap();
        let b = MatrixField::random(2, 4, 0.5, 1.5, &mut r);
        let (_, g) = ym_and_gradient(&conn);
        let h = 1e-5;
        let fd = (yang_mills(&conn.tangent_add(&b, h)) - yang_mills(&conn.tangent_add(&b, -h)))
            / (2.0 * h);
        let exact = kahler_metric(tau, &g, &b);
        assert!(rel(fd, exact) < 1e-5, "fd {fd} vs {exact}");
    }
}

#[test]
fn symplectic_and_kahler_structure() {
    let mut r = rng(14);
    let tau = c(0.3, 1.2);
    for _ in 0..20 {
        let a = MatrixField::random(3, 2, 1.0, 2.0, &mut r);
        let b = MatrixField::random(3, 2, 1.0, 2.0, &mut r);
        assert!(rel(symplectic(tau, &a, &b), -symplectic(tau, &b, &a)) < 1e-12);
        assert!(kahler_metric(tau, &a, &a) > 0.0);
        assert!(rel(kahler_metric(tau, &a, &b), kahler_metric(tau, &b, &a)) < 1e-12);
        assert!(
            rel(
                symplectic(tau, &a, &hodge_star(&a)),
                kahler_metric(tau, &a, &a)
            ) < 1e-12
        );
        assert!(
            rel(
                symplectic(tau, &a, &hodge_star(&b)),
                kahler_metric(tau, &a, &b)
            ) < 1e-10
        );
    }
}

#[test]
fn hodge_star_on_components() {
    let mut r = rng(15);
    let tau = c(0.45, 0.8);
    let torus = Torus::new(tau).unwrap();
    let a = MatrixField::random(2, 2, 1.0, 2.0, &mut r);
    let (au, av) = FourierConnection { tau, a: a.clone() }.real_components();
    let (su, sv) = FourierConnection {
        tau,
        a: hodge_star(&a),
    }
    .real_components();
    for i in 0..au.data.len() {
        let (x, y) = torus.hodge_star(au.data[i], av.data[i]);
        assert!((x - su.data[i]).norm() < 1e-12 && (y - sv.data[i]).norm() < 1e-12);
        let (x2, y2) = torus.hodge_star(x, y);
        assert!((x2 + au.data[i]).norm() < 1e-12 && (y2 + av.data[i]).norm() < 1e-12);
    }
}

#[test]
fn complexified_action_matches_star_of_fundamental_field() {
    let mut r = rng(16);
    let tau = c(0.2, 1.0);
    let conn = FourierConnection::random(2, 8, tau, 0.3, 1.2, &mut r).unwrap();
    let xi = random_antihermitian_field(2, 1, 0.5, &mut r);
    let want = hodge_star(&fundamental_field(&conn, &xi));
    let mut errs = Vec::new();
    for s in [1e-3, 1e-4] {
        let plus = gauge_act(
            &GaugeTransformation::Exponential(xi.scaled(c(0.0, s))),
            &conn,
        )
        .unwrap();
        let minus = gauge_act(
            &GaugeTransformation::Exponential(xi.scaled(c(0.0, -s))),
            &conn,
        )
        .unwrap();
        let mut d = plus.a.clone();
        d.axpy(c(-1.0, 0.0), &minus.a);
        let d = d.scaled(c(0.5 / s, 0.0));
        errs.push(d.max_abs_diff(&want));
    }
    assert!(errs[1] < 1e-7, "{errs:?}");
    assert!(errs[1] < errs[0] / 20.0 || errs[1] < 1e-10, "{errs:?}");
}

#[test]
fn holonomy_of_zero_and_slice_round_trip() {
    let tau = c(0.3, 1.1);
    let z = FourierConnection::zero(2, 3, tau).unwrap();
    assert!((holonomy(&z, Cycle::U) - DMatrix::identity(2, 2)).norm() < 1e-14);
    let rs = build_root_system(Family::A, 2).unwrap();
    let mut r = rng(17);
    for _ in 0..5 {
        let w: Vec<Complex64> = (0..2)
            .map(|_| c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
            .collect();
        let s = cartan_slice(&w, tau, 2).unwrap();
        let hu = holonomy(&s, Cycle::U);
        let hv = holonomy(&s, Cycle::V);
        let got = slice_point_from_holonomies(&hu, &hv, tau, 1e-8).unwrap();
        let a = affine_weyl_reduce(&rs, &w, tau).representative;
        let b = affine_weyl_reduce(&rs, &got, tau).representative;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-8);
        }
    }
}

#[test]
fn holonomy_gauge_covariance() {
    let mut r = rng(18);
    let tau = c(-0.2, 1.0);
    let conn = FourierConnection::random(2, 12, tau, 0.3, 1.2, &mut r).unwrap();
    let g = random_unitary_gauge(2, 0.2, &mut r);
    let moved = gauge_act(&g, &conn).unwrap();
    let g0 = g.at_origin();
    let g0i = g0.clone().try_inverse().unwrap();
    for cyc in [Cycle::U, Cycle::V] {
        let want = &g0 * holonomy(&conn, cyc) * &g0i;
        let got = holonomy(&moved, cyc);
        let err = (want - got).norm();
        assert!(err < 1e-9, "{cyc:?} {err}");
    }
}

#[test]
fn snapshot_round_trip_is_bit_exact() {
    let mut r = rng(19);
    let conn = FourierConnection::random(3, 2, c(0.1, 0.7), 1.0, 2.0, &mut r).unwrap();
    let js = serde_json::to_string(&conn.snapshot()).unwrap();
    let back = FourierConnection::from_snapshot(&serde_json::from_str(&js).unwrap()).unwrap();
    assert_eq!(back, conn);
    assert!(FourierConnection::zero(5, 1, c(0.0, 1.0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn real_components_round_trip(seed in 0u64..1000, tr in -0.5f64..0.5, ti in 0.5f64..2.0) {
        let mut r = rng(seed);
        let tau = c(tr, ti);
        let conn = FourierConnection::random(2, 2, tau, 1.0, 2.0, &mut r).unwrap();
        let (au, av) = conn.real_components();
        let back = FourierConnection::from_real_components(tau, &au, &av);
        prop_assert!(back.max_abs_diff(&conn.a) < 1e-12);
        // anti-hermitian reconstruction
        let adj = au.adjoint();
        let mut s = au.clone();
        s.axpy(c(1.0, 0.0), &adj);
        prop_assert!(s.norm_sq() < 1e-24);
    }

    #[test]
    fn ym_nonnegative(seed in 0u64..1000) {
        let mut r = rng(seed);
        let conn = FourierConnection::random(2, 3, c(0.0, 1.0), 0.5, 1.5, &mut r).unwrap();
        prop_assert!(yang_mills(&conn) >= 0.0);
    }
}

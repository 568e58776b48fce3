use std::f64::consts::PI;

use cslab_core::error::LabError;
use cslab_core::gaugefield::*;
use cslab_core::liealg::*;
use cslab_core::spectral::*;
use nalgebra::{DMatrix, DVector};
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

fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1e-300))
        .fold(0.0, f64::max)
}

#[test]
fn disc_modes_are_sorted_and_symmetric() {
    let tau = c(0.37, 0.85);
    let modes = disc_modes(tau, 5);
    let r2 = tau.im * 25.0;
    let norm = |&(m, n): &(i64, i64)| (tau * m as f64 - n as f64).norm_sqr();
    assert!(modes.windows(2).all(|w| norm(&w[0]) <= norm(&w[1])));
    assert!(modes.iter().all(|k| norm(k) <= r2 * (1.0 + 1e-12)));
    assert!(modes.iter().all(|&(m, n)| modes.contains(&(-m, -n))));
    let mut count = 0;
    for m in -20i64..=20 {
        for n in -40i64..=40 {
            if norm(&(m, n)) <= r2 {
                count += 1;
            }
        }
    }
    assert_eq!(count, modes.len());
}

#[test]
fn constants_span_the_untwisted_kernel() {
    let tau = c(0.2, 1.3);
    let ev = slice_spectrum(&[c(0.0, 0.0)], &Weight::zero(1), c(0.0, 0.0), tau, 4);
    assert_eq!(ev[0], 0.0);
    assert!(ev[1] > 1.0);
}

#[test]
fn slice_spectrum_is_the_shifted_lattice() {
    let tau = c(-0.3, 1.1);
    let w = [c(0.2, -0.4)];
    let z = c(0.05, 0.13);
    let lambda = Weight::from_ints(&[1]);
    let ev = slice_spectrum(&w, &lambda, z, tau, 3);
    let mut want: Vec<f64> = disc_modes(tau, 3)
        .iter()
        .map(|&(m, n)| {
            let x = tau * m as f64 - n as f64 + w[0] + z;
            2.0 * (PI / tau.im).powi(2) * x.norm_sqr()
        })
        .collect();
    want.sort_by(f64::total_cmp);
    assert!(max_rel(&ev, &want) < 1e-14);
}

#[test]
fn slice_spectrum_lattice_shift_invariance() {
    let tau = c(0.25, 0.95);
    let w = [c(0.17, 0.31)];
    let z = c(0.11, -0.07);
    let lambda = Weight::from_ints(&[1]);
    let big_n = 10;
    for (p, q) in [(1i64, 0i64), (0, 1), (-1, 2)] {
        let shift = c(p as f64, 0.0) + tau * q as f64;
        let a = slice_spectrum(&w, &lambda, z, tau, big_n);
        let b = slice_spectrum(&[w[0] + shift], &lambda, z, tau, big_n);
        // Only eigenvalues well inside both discs are comparable.
        let safe = tau.im.sqrt() * big_n as f64 - shift.norm() - 1.0;
        let bound = 2.0 * (PI / tau.im).powi(2) * safe * safe;
        let ka = a.iter().take_while(|&&x| x < bound).count();
        let kb = b.iter().take_while(|&&x| x < bound).count();
        assert_eq!(ka, kb);
        assert!(max_rel(&a[..ka], &b[..kb]) < 1e-12);
    }
}

fn random_slice_point(r: &mut ChaCha8Rng, rank: usize) -> Vec<Complex64> {
    (0..rank)
        .map(|_| c(r.random_range(-0.9..0.9), r.random_range(-0.9..0.9)))
        .collect()
}

#[test]
fn dense_matches_slice_closed_form() {
    let mut r = rng(3);
    let tau = c(0.2, 1.05);
    for (rank, rep) in [
        (1usize, MatrixRep::Defining),
        (2, MatrixRep::Defining),
        (1, MatrixRep::Adjoint),
        (2, MatrixRep::Adjoint),
    ] {
        let rs = build_root_system(Family::A, rank).unwrap();
        let weights = match rep {
            MatrixRep::Defining => RepresentationWeights::defining(&rs).unwrap(),
            MatrixRep::Adjoint => RepresentationWeights::adjoint(&rs),
        };
        for _ in 0..3 {
            let w = random_slice_point(&mut r, rank);
            let z = c(r.random_range(-0.5..0.5), r.random_range(-0.5..0.5));
            let conn = cartan_slice(&w, tau, 1).unwrap();
            let dense = TwistedDolbeault::on_connection(&conn, rep, z, 4).unwrap();
            let slice = TwistedDolbeault::on_slice(&rs, &weights, &w, z, tau, 4).unwrap();
            assert!(max_rel(&dense.spectrum(), &slice.spectrum()) < 1e-9);
        }
    }
}

#[test]
fn laplacian_is_the_square_of_the_section() {
    let mut r = rng(4);
    let tau = c(0.1, 0.9);
    let conn = FourierConnection::random(2, 2, tau, 0.4, 1.0, &mut r).unwrap();
    let op = TwistedDolbeault::on_connection(&conn, MatrixRep::Adjoint, c(0.2, 0.1), 3).unwrap();
    let s = op.section();
    let lap = op.laplacian();
    assert!((lap.adjoint() - &lap).norm() < 1e-12 * lap.norm());
    for _ in 0..5 {
        let psi = DVector::from_fn(s.ncols(), |_, _| {
            c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
        });
        let lhs = (&s * &psi).norm_squared();
        let rhs = psi.dotc(&(&lap * &psi));
        assert!(rhs.im.abs() < 1e-12 * lhs);
        assert!((lhs - rhs.re).abs() < 1e-12 * lhs);
    }
}

#[test]
fn rectangular_pair_restricts_to_section_and_its_adjoint() {
    let mut r = rng(5);
    let tau = c(0.0, 1.0);
    let conn = FourierConnection::random(2, 2, tau, 0.4, 1.0, &mut r).unwrap();
    let op = TwistedDolbeault::on_connection(&conn, MatrixRep::Defining, c(0.3, 0.2), 3).unwrap();
    let (d, da) = op.rectangular();
    let k = op.modes().len() * op.rank();
    let s = op.section();
    assert!((d.rows(0, k) - &s).norm() < 1e-14);
    assert!((-da.rows(0, k) - s.adjoint()).norm() < 1e-14);
}

#[test]
fn kernel_on_slice_examples() {
    let tau = c(0.15, 1.2);
    let rs = build_root_system(Family::A, 2).unwrap();
    let regular = [c(0.11, 0.23), c(0.31, 0.05)];
    let rep = adjoint_kernel(&rs, &regular, tau, 4).unwrap();
    assert_eq!((rep.h0, rep.h1), (2, 2));
    assert!(rep.gap_ratio >= GAP_RATIO);
    // α₁(w) = 2w₁ − w₂ lands on the lattice: one root pair.
    let wall = [c(0.3, 0.2), c(0.6, 0.4) - tau];
    assert_eq!(lattice_roots(&rs, &wall, tau, 1e-9).len(), 1);
    assert_eq!(adjoint_kernel(&rs, &wall, tau, 4).unwrap().h0, 4);
    let trivial = RepresentationWeights::trivial(&rs);
    let op = TwistedDolbeault::on_slice(&rs, &trivial, &regular, c(0.27, 0.19), tau, 4).unwrap();
    let k = kernel_dim(&op, KERNEL_TOL).unwrap();
    assert_eq!((k.h0, k.h1), (0, 0));
}

#[test]
fn dense_kernel_agrees_with_slice() {
    let tau = c(0.0, 1.0);
    let rs = build_root_system(Family::A, 1).unwrap();
    for (w, h0) in [(c(0.21, 0.37), 1usize), (c(0.5, 0.0), 3)] {
        let conn = cartan_slice(&[w], tau, 1).unwrap();
        let op =
            TwistedDolbeault::on_connection(&conn, MatrixRep::Adjoint, c(0.0, 0.0), 3).unwrap();
        let k = kernel_dim(&op, KERNEL_TOL).unwrap();
        assert_eq!(k.h0, h0);
        assert_eq!(k.h0, adjoint_kernel(&rs, &[w], tau, 3).unwrap().h0);
    }
}

#[test]
fn borderline_kernel_is_indeterminate() {
    let tau = c(0.0, 1.0);
    let rs = build_root_system(Family::A, 1).unwrap();
    // The root takes the value 2w, so the singular value sits near tol.
    let delta = KERNEL_TOL / (2f64.sqrt() * PI);
    let w = [c(0.5 * delta, 0.0)];
    assert!(matches!(
        adjoint_kernel(&rs, &w, tau, 3),
        Err(LabError::NoSpectralGap { .. })
    ));
}

#[test]
fn certified_count_rules() {
    assert_eq!(
        certified_count(&[0.0, 1e-12, 1.0, 2.0], 1e-8).unwrap(),
        (2, 1.0 / 1e-12)
    );
    assert_eq!(certified_count(&[0.5, 1.0], 1e-8).unwrap().0, 0);
    assert_eq!(certified_count(&[1e-9, 5e-9], 1e-8).unwrap().0, 2);
    assert!(certified_count(&[5e-9, 2e-8], 1e-8).is_err());
    assert!(certified_count(&[1e-9, 5e-8], 1e-8).is_err());
    assert!((certified_count(&[0.0, 1.0], 1e-8).unwrap().1 - 1e300).abs() < 1e285);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn regularity_criterion_on_slice(a0 in -0.9f64..0.9, a1 in -0.9f64..0.9, b0 in -0.9f64..0.9, b1 in -0.9f64..0.9, on_wall in 0usize..4) {
        let tau = c(0.1, 1.1);
        let rs = build_root_system(Family::A, 2).unwrap();
        let mut w = vec![c(a0, b0), c(a1, b1)];
        // Force α₁, α₂ or θ = α₁ + α₂ onto the lattice.
        match on_wall {
            1 => w[1] = w[0] * 2.0,
            2 => w[0] = w[1] * 2.0,
            3 => w[1] = -w[0] + tau,
            _ => {}
        }
        let roots = lattice_roots(&rs, &w, tau, 1e-9);
        if let Ok(k) = adjoint_kernel(&rs, &w, tau, 3) {
            prop_assert_eq!(k.h0 == rs.rank, roots.is_empty());
            prop_assert_eq!(k.h0, rs.rank + 2 * roots.len());
        }
    }
}

/// `E₁(x)` by composite Simpson quadrature of `∫₀¹ e^{−x/u}/u du`.
fn e1_quadrature(x: f64) -> f64 {
    let n = 200_000;
    let h = 1.0 / n as f64;
    let f = |u: f64| if u <= 0.0 { 0.0 } else { (-x / u).exp() / u };
    let mut s = f(0.0) + f(1.0);
    for i in 1..n {
        let u = i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(u);
    }
    s * h / 3.0
}

#[test]
fn exponential_integral_matches_quadrature() {
    for x in [0.05, 0.3, 0.99, 1.0, 1.7, 4.0, 12.0] {
        let a = exp_integral_e1(x);
        let b = e1_quadrature(x);
        assert!((a - b).abs() < 1e-9 * b.max(1e-3), "{x}: {a} vs {b}");
    }
}

#[test]
fn continuation_is_independent_of_split_point() {
    for tau in [c(0.0, 1.0), c(0.3, 1.1), c(-0.45, 0.8)] {
        let scale = 2.0 * (PI / tau.im).powi(2);
        for s in [c(0.0, 0.0), c(0.23, 0.41), c(-0.7, 0.15)] {
            let t0 = PI / tau.im;
            let a = shifted_lattice_log_det(tau, s, scale, t0).0;
            for f in [0.5, 2.0, 3.0] {
                let b = shifted_lattice_log_det(tau, s, scale, f * t0).0;
                assert!(
                    (a - b).abs() < 1e-11 * a.abs().max(1.0),
                    "{tau} {s}: {a} vs {b}"
                );
            }
        }
    }
}

#[test]
fn continuation_scaling_uses_zeta_at_zero() {
    let tau = c(0.2, 0.9);
    for s in [c(0.0, 0.0), c(0.31, -0.12)] {
        let (a, z0, _, _) = shifted_lattice_log_det(tau, s, 1.0, PI / tau.im);
        for cc in [0.3, 2.0, 17.0] {
            let (b, _, _, _) = shifted_lattice_log_det(tau, s, cc, PI / tau.im);
            assert!((b - (a + z0 * f64::ln(cc))).abs() < 1e-11);
        }
        let zeros = if s == c(0.0, 0.0) { -1.0 } else { 0.0 };
        assert_eq!(z0, zeros);
    }
}

#[test]
fn continuation_matches_disc_sums_with_local_term() {
    // Disc-truncated log ratio of two shifted lattices, minus the local
    // term, converges to the difference of continued values.
    for tau in [c(0.0, 1.0), c(0.3, 1.1)] {
        let scale = 2.0 * (PI / tau.im).powi(2);
        let z = c(0.31, 0.17);
        let s = c(0.23, 0.41);
        let zr = shifted_lattice_log_det(tau, z, scale, PI / tau.im).0;
        let zs = shifted_lattice_log_det(tau, s + z, scale, PI / tau.im).0;
        let big_n = 96;
        let r2 = tau.im * (big_n * big_n) as f64;
        let mut l = 0.0;
        for m in -(big_n as i64 + 2)..=(big_n as i64 + 2) {
            for n in -3 * big_n as i64..=3 * big_n as i64 {
                let w = tau * m as f64 - n as f64;
                if w.norm_sqr() <= r2 {
                    l += (w + s + z).norm_sqr().ln() - (w + z).norm_sqr().ln();
                }
            }
        }
        let local = (PI / tau.im) * ((s + z).norm_sqr() - z.norm_sqr());
        assert!(
            ((zs - zr) - (l - local)).abs() < 2e-3,
            "{tau}: {} vs {}",
            zs - zr,
            l - local
        );
    }
}

#[test]
fn zeta_det_slice_invariances() {
    let tau = c(0.2, 1.05);
    let mut r = rng(8);
    for rank in [1usize, 2] {
        let rs = build_root_system(Family::A, rank).unwrap();
        let rep = RepresentationWeights::adjoint(&rs);
        let z = c(0.13, 0.29);
        for _ in 0..3 {
            let w = random_slice_point(&mut r, rank);
            let base = zeta_det_slice(&rs, &rep, &w, z, tau, false).unwrap();
            assert!(base.value > 0.0 && base.error.is_finite());
            for i in 0..rank {
                for shift in [c(1.0, 0.0), tau] {
                    let mut w2 = w.clone();
                    w2[i] += shift;
                    let v = zeta_det_slice(&rs, &rep, &w2, z, tau, false).unwrap();
                    assert!((v.value - base.value).abs() < 1e-8 * base.value);
                }
            }
            let (a, b) = real_coordinates(&w, tau);
            for s in 0..rs.weyl_order() {
                let sa = rs.act(s, &a);
                let sb = rs.act(s, &b);
                let ws: Vec<Complex64> = sa
                    .iter()
                    .zip(&sb)
                    .map(|(x, y)| c(*x, 0.0) + tau * y)
                    .collect();
                let v = zeta_det_slice(&rs, &rep, &ws, z, tau, false).unwrap();
                assert!((v.value - base.value).abs() < 1e-8 * base.value);
            }
        }
    }
}

#[test]
fn zeta_det_slice_kernel_handling() {
    let tau = c(0.0, 1.0);
    let rs = build_root_system(Family::A, 1).unwrap();
    let rep = RepresentationWeights::adjoint(&rs);
    let w = [c(0.21, 0.37)];
    assert!(matches!(
        zeta_det_slice(&rs, &rep, &w, c(0.0, 0.0), tau, false),
        Err(LabError::KernelPresent(_))
    ));
    let v = zeta_det_slice(&rs, &rep, &w, c(0.0, 0.0), tau, true).unwrap();
    assert_eq!(v.zeta0, Some(-1.0));
}

#[test]
fn relative_det_of_reference_is_one() {
    let tau = c(0.0, 1.0);
    let z = c(0.31, 0.17);
    let free = TwistedDolbeault::free(2, z, tau, 6);
    let v = relative_det_truncated(&free, &free).unwrap();
    assert_eq!(v.log_value, 0.0);
    assert_eq!(v.value, 1.0);
}

#[test]
fn truncated_slice_ratio_matches_continuation() {
    let tau = c(0.0, 1.0);
    let z = c(0.31, 0.17);
    let rs = build_root_system(Family::A, 1).unwrap();
    let def = RepresentationWeights::defining(&rs).unwrap();
    let free = RepresentationWeights {
        weights: vec![(Weight::zero(1), 2)],
    };
    for w in [c(0.21, 0.37), c(-0.33, 0.08)] {
        let want = zeta_det_slice(&rs, &def, &[w], z, tau, false)
            .unwrap()
            .log_value
            - zeta_det_slice(&rs, &free, &[w], z, tau, false)
                .unwrap()
                .log_value;
        let op = TwistedDolbeault::on_slice(&rs, &def, &[w], z, tau, 12).unwrap();
        let got = relative_det_truncated(&op, &TwistedDolbeault::free(2, z, tau, 12)).unwrap();
        assert!(
            (got.log_value - want).abs() <= got.error.max(1e-4),
            "{w}: {} vs {want}",
            got.log_value
        );
        assert!((got.log_value - want).abs() < 1e-3);
    }
}

#[test]
fn truncated_ratio_is_invariant_under_constant_unitary_gauge() {
    let mut r = rng(9);
    let tau = c(0.0, 1.0);
    let z = c(0.31, 0.17);
    let conn = FourierConnection::random(2, 2, tau, 0.5, 1.0, &mut r).unwrap();
    let (s, t) = (0.4f64, -0.8f64);
    let u = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::from_polar(s.cos(), t),
            Complex64::from_polar(s.sin(), 0.3),
            -Complex64::from_polar(s.sin(), -0.3),
            Complex64::from_polar(s.cos(), -t),
        ],
    );
    let moved = gauge_act(&GaugeTransformation::Constant(u), &conn).unwrap();
    let free = TwistedDolbeault::free(2, z, tau, 6);
    let a = relative_det_truncated(
        &TwistedDolbeault::on_connection(&conn, MatrixRep::Defining, z, 6).unwrap(),
        &free,
    )
    .unwrap();
    let b = relative_det_truncated(
        &TwistedDolbeault::on_connection(&moved, MatrixRep::Defining, z, 6).unwrap(),
        &free,
    )
    .unwrap();
    assert!((a.log_value - b.log_value).abs() < 1e-8);
}

#[test]
fn truncated_ratio_of_gauge_transformed_slice_within_error() {
    let tau = c(0.0, 1.0);
    let z = c(0.31, 0.17);
    let w = [c(0.21, 0.37)];
    let rs = build_root_system(Family::A, 1).unwrap();
    let def = RepresentationWeights::defining(&rs).unwrap();
    let free_w = RepresentationWeights {
        weights: vec![(Weight::zero(1), 2)],
    };
    let want = zeta_det_slice(&rs, &def, &w, z, tau, false)
        .unwrap()
        .log_value
        - zeta_det_slice(&rs, &free_w, &w, z, tau, false)
            .unwrap()
            .log_value;
    let mut r = rng(3);
    let mut xi = MatrixField::random(2, 2, 0.4, 1.0, &mut r);
    xi.make_antihermitian();
    xi.make_traceless();
    let conn = gauge_act(
        &GaugeTransformation::Exponential(xi),
        &cartan_slice(&w, tau, 8).unwrap(),
    )
    .unwrap();
    let op = TwistedDolbeault::on_connection(&conn, MatrixRep::Defining, z, 8).unwrap();
    let got = relative_det_truncated(&op, &TwistedDolbeault::free(2, z, tau, 8)).unwrap();
    assert!((got.log_value - want).abs() <= got.error);
}

#[test]
fn relative_det_rejects_kernel() {
    let tau = c(0.0, 1.0);
    let z = c(0.31, 0.17);
    let conn = cartan_slice(&[-z], tau, 1).unwrap();
    let op = TwistedDolbeault::on_connection(&conn, MatrixRep::Defining, z, 4).unwrap();
    assert!(matches!(
        relative_det_truncated(&op, &TwistedDolbeault::free(2, z, tau, 4)),
        Err(LabError::IllConditioned(_))
    ));
}

#[test]
fn clutched_riemann_roch_counts() {
    let tau = c(0.0, 1.0);
    let generic = c(0.13, 0.29);
    let trivial = clutched_dbar(&[0], generic, tau, 16)
        .unwrap()
        .kernel_dim(KERNEL_TOL)
        .unwrap();
    assert_eq!((trivial.h0, trivial.h1), (0, 0));
    for (z, total) in [(generic, 2usize), (c(0.0, 0.0), 3)] {
        let op = clutched_dbar(&[2, 0, -2], z, tau, 64).unwrap();
        let ks = op.summand_kernels(KERNEL_TOL).unwrap();
        assert_eq!(
            ks[0].0,
            SummandKernel {
                degree: 2,
                h0: 2,
                h1: 0
            }
        );
        assert_eq!(
            ks[2].0,
            SummandKernel {
                degree: -2,
                h0: 0,
                h1: 2
            }
        );
        let rep = op.kernel_dim(KERNEL_TOL).unwrap();
        assert_eq!(rep.h0, total);
        assert_eq!(rep.h0, rep.h1);
    }
}

#[test]
fn clutched_input_checks() {
    let tau = c(0.0, 1.0);
    assert!(matches!(
        clutched_dbar(&[2, 0], c(0.0, 0.0), tau, 64),
        Err(LabError::DegreeSum)
    ));
    assert!(matches!(
        clutched_dbar(&[2, -2], c(0.0, 0.0), tau, 8),
        Err(LabError::Resolution { .. })
    ));
    assert!(matches!(
        clutched_dbar(&[1, -1], c(0.0, 0.0), c(0.0, -1.0), 16),
        Err(LabError::BadModulus(_))
    ));
}

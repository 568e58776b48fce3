use std::collections::HashMap;
use std::f64::consts::PI;

use cslab_core::error::LabError;
use cslab_core::flow::*;
use cslab_core::gaugefield::*;
use cslab_core::liealg::{affine_weyl_reduce, build_root_system, orbit_distance, Family};
use cslab_core::spectral::MatrixRep;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn diagonal_field(cutoff: usize, amp: f64, r: &mut ChaCha8Rng) -> MatrixField {
    let mut f = MatrixField::random(2, cutoff, amp, 1.0, r);
    for (m, n) in f.modes().collect::<Vec<_>>() {
        let b = f.mode_mut(m, n);
        b[1] = c(0.0, 0.0);
        b[2] = c(0.0, 0.0);
    }
    f.make_traceless();
    f
}

#[test]
fn flat_starts_are_stationary() {
    let tau = c(0.1, 1.2);
    for conn in [
        FourierConnection::zero(2, 4, tau).unwrap(),
        cartan_slice(&[c(0.23, -0.41)], tau, 4).unwrap(),
    ] {
        let tr = flow_run(&conn, &FlowOptions::default()).unwrap();
        assert_eq!(tr.records.len(), 1);
        assert_eq!(tr.status, FlowStatus::Converged);
        assert!(ym_gradient(&conn).norm_sq() < 1e-24);
    }
}

#[test]
fn gradient_is_the_kahler_gradient() {
    let mut r = rng(5);
    let tau = c(0.25, 0.8);
    for _ in 0..10 {
        let conn = FourierConnection::random(3, 3, tau, 0.3, 1.2, &mut r).unwrap();
        let dir = MatrixField::random(3, 3, 0.5, 1.2, &mut r);
        let g = ym_gradient(&conn);
        let h = 1e-5;
        let fd = (yang_mills(&conn.tangent_add(&dir, h)) - yang_mills(&conn.tangent_add(&dir, -h)))
            / (2.0 * h);
        assert!(rel(fd, kahler_metric(tau, &g, &dir)) < 1e-5);
    }
}

#[test]
fn abelian_single_mode_decays_at_the_linear_rate() {
    let tau = c(0.3, 1.1);
    for (m, n) in [(1i64, 0i64), (0, 1), (1, -2)] {
        let mut conn = FourierConnection::zero(2, 3, tau).unwrap();
        let b = conn.a.mode_mut(m, n);
        b[0] = c(0.02, -0.01);
        b[3] = c(-0.02, 0.01);
        // YM sees only the non-gauge half of (a_k, a_{-k}†), which decays
        // as exp(−2κ|τm − n|² t) with κ = 4π²/τ₂²; YM is quadratic in it.
        let w2 = (tau * m as f64 - n as f64).norm_sqr();
        let rate = 16.0 * PI * PI * w2 / (tau.im * tau.im);
        let (ym0, g) = ym_and_gradient(&conn);
        assert!(rel(kahler_metric(tau, &g, &g) / ym0, rate) < 1e-10);
        let opts = FlowOptions {
            t_max: 3.0 / rate,
            tol: 1e-14,
            ..Default::default()
        };
        let tr = flow_run(&conn, &opts).unwrap();
        for rec in &tr.records {
            assert!(rel(rec.ym, ym0 * (-rate * rec.t).exp()) < 1e-8);
        }
    }
}

#[test]
fn random_flow_is_monotone_and_converges() {
    let mut r = rng(11);
    let conn = FourierConnection::random(2, 4, c(0.0, 1.0), 0.5, 1.0, &mut r).unwrap();
    let tr = flow_run(&conn, &FlowOptions::default()).unwrap();
    assert_eq!(tr.status, FlowStatus::Converged);
    assert!(tr.max_increase() <= 1e-12);
    assert!(tr.final_record().ym < 1e-6);
    let (beta, _) = tr.lojasiewicz_fit().unwrap();
    assert!(beta.is_finite() && beta > 0.0);
}

#[test]
fn step_size_underflow_keeps_partial_trajectory() {
    let mut r = rng(12);
    let conn = FourierConnection::random(2, 3, c(0.0, 1.0), 0.5, 1.0, &mut r).unwrap();
    let opts = FlowOptions {
        h_min: 1e-2,
        h0: 1e-4,
        ..Default::default()
    };
    let err = flow_run(&conn, &opts).unwrap_err();
    assert!(matches!(err.error, LabError::StepUnderflow { .. }));
    assert_eq!(err.partial.records.len(), 1);
}

#[test]
fn snapshot_stride_keeps_the_last_state() {
    let mut r = rng(13);
    let conn = FourierConnection::random(2, 3, c(0.0, 1.0), 0.5, 1.0, &mut r).unwrap();
    let opts = FlowOptions {
        stride: 7,
        ..Default::default()
    };
    let tr = flow_run(&conn, &opts).unwrap();
    let last = tr.records.len() - 1;
    assert_eq!(tr.snapshots.last().unwrap().0, last);
    assert!(tr.snapshots.iter().all(|(i, _)| i % 7 == 0 || *i == last));
    assert_eq!(tr.snapshots.last().unwrap().1.a.data, tr.terminal.a.data);
}

#[test]
fn one_step_commutes_with_constant_unitary_gauge() {
    let mut r = rng(21);
    let tau = c(0.0, 1.0);
    let conn = FourierConnection::random(2, 4, tau, 0.5, 1.0, &mut r).unwrap();
    let (s, t) = (0.7f64, 1.9f64);
    let u = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::from_polar(s.cos(), t),
            c(s.sin(), 0.0),
            c(-s.sin(), 0.0),
            Complex64::from_polar(s.cos(), -t),
        ],
    );
    let g = GaugeTransformation::Constant(u);
    for h in [1e-4, 1e-3] {
        let a = gauge_act(&g, &flow_step(&conn, h)).unwrap();
        let b = flow_step(&gauge_act(&g, &conn).unwrap(), h);
        assert!(a.a.max_abs_diff(&b.a) < 1e-8);
    }
}

#[test]
fn classify_slice_returns_its_reduction() {
    let rs = build_root_system(Family::A, 1).unwrap();
    let tau = c(0.0, 1.0);
    for w in [c(0.21, 0.37), c(-0.8, 1.3), c(2.45, -0.15)] {
        let conn = cartan_slice(&[w], tau, 4).unwrap();
        let tr = flow_run(&conn, &FlowOptions::default()).unwrap();
        let v = classify(&tr, &Thresholds::default()).unwrap();
        assert_eq!(v.class, Stability::Semistable);
        let alcove = v.alcove.unwrap();
        let want = affine_weyl_reduce(&rs, &[w], tau).representative;
        assert!((alcove[0] - want[0]).norm() < 1e-8);
        assert_eq!(v.regular, Some(true));
        assert_eq!(v.adjoint_h0, Some(1));
    }
}

#[test]
fn classify_is_gauge_invariant() {
    let rs = build_root_system(Family::A, 1).unwrap();
    let tau = c(0.0, 1.0);
    let w = c(0.21, 0.37);
    let mut r = rng(31);
    let mut xi = MatrixField::random(2, 2, 0.3, 1.0, &mut r);
    xi.make_antihermitian();
    xi.make_traceless();
    let conn = gauge_act(
        &GaugeTransformation::Exponential(xi),
        &cartan_slice(&[w], tau, 6).unwrap(),
    )
    .unwrap();
    let tr = flow_run(&conn, &FlowOptions::default()).unwrap();
    let v = classify(&tr, &Thresholds::default()).unwrap();
    assert_eq!(v.class, Stability::Semistable);
    assert!(orbit_distance(&rs, &v.alcove.unwrap(), &[w], tau) < 1e-6);
}

#[test]
fn perturbed_regular_slice_keeps_its_alcove_point() {
    let rs = build_root_system(Family::A, 1).unwrap();
    let tau = c(0.0, 1.0);
    let w = c(0.21, 0.37);
    let run = |seed: u64| {
        let mut conn = cartan_slice(&[w], tau, 4).unwrap();
        conn.a.axpy(
            c(1.0, 0.0),
            &MatrixField::random(2, 4, 1e-5, 1.0, &mut rng(seed)),
        );
        conn.a.make_traceless();
        let tr = flow_run(&conn, &FlowOptions::default()).unwrap();
        classify(&tr, &Thresholds::default())
            .unwrap()
            .alcove
            .unwrap()
    };
    let (a, b) = (run(32), run(33));
    assert!(orbit_distance(&rs, &a, &b, tau) < 1e-4);
    assert!(orbit_distance(&rs, &a, &[w], tau) < 1e-4);
}

#[test]
fn large_terminal_ym_is_unstable() {
    let mut r = rng(41);
    let conn = FourierConnection::random(2, 3, c(0.0, 1.0), 0.5, 1.0, &mut r).unwrap();
    let v = classify_terminal(&conn, &Thresholds::default()).unwrap();
    assert_eq!(v.class, Stability::Unstable);
    assert!(v.alcove.is_none() && v.terminal_ym > 1e-6);
}

#[test]
fn non_commuting_holonomies_at_nominal_flat_point_fail() {
    let tau = c(0.0, 1.0);
    let mut conn = FourierConnection::zero(2, 1, tau).unwrap();
    let b = conn.a.mode_mut(0, 0);
    b[1] = c(0.3, 0.0);
    b[2] = c(0.0, 0.2);
    let loose = Thresholds {
        flat: 1e6,
        commutator: 1e-4,
    };
    assert!(matches!(
        classify_terminal(&conn, &loose),
        Err(LabError::NonCommuting(_))
    ));
}

/// `log det` of `S*S` for the scalar finite section of `∂̄ + f + (π/τ₂)z`
/// on the disc, from a Hermitian eigen-decomposition.
fn scalar_log_det(
    f: &HashMap<(i64, i64), Complex64>,
    z: Complex64,
    tau: Complex64,
    big_n: usize,
) -> f64 {
    let r2 = tau.im * (big_n * big_n) as f64;
    let lim = big_n as i64 + 2;
    let mut modes = Vec::new();
    for m in -lim..=lim {
        for n in -3 * lim..=3 * lim {
            if (tau * m as f64 - n as f64).norm_sqr() <= r2 * (1.0 + 1e-12) {
                modes.push((m, n));
            }
        }
    }
    let k = modes.len();
    let s = DMatrix::from_fn(k, k, |i, j| {
        let (mi, ni) = modes[i];
        let (mj, nj) = modes[j];
        let mut v = f.get(&(mi - mj, ni - nj)).copied().unwrap_or(c(0.0, 0.0));
        if i == j {
            v += (tau * mi as f64 - ni as f64 + z) * (PI / tau.im);
        }
        v * 2f64.sqrt()
    });
    (s.adjoint() * &s)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|x| x.ln())
        .sum()
}

/// Extrapolated relative log det for `diag(f, −f)` in the defining
/// representation.
fn abelian_oracle(conn: &FourierConnection, z: Complex64, big_n: usize) -> f64 {
    let tau = conn.tau;
    let zt = z * (PI / tau.im);
    let mut plus = HashMap::new();
    let mut minus = HashMap::new();
    for (m, n) in conn.a.modes() {
        let v = conn.a.mode(m, n)[0];
        if v != c(0.0, 0.0) {
            plus.insert((m, n), v);
            minus.insert((m, n), -v);
        }
    }
    let f0 = plus.get(&(0, 0)).copied().unwrap_or(c(0.0, 0.0));
    let mut energy: f64 = plus
        .iter()
        .filter(|(k, _)| **k != (0, 0))
        .map(|(_, v)| 2.0 * v.norm_sqr())
        .sum();
    energy += (f0 + zt).norm_sqr() + (zt - f0).norm_sqr() - 2.0 * zt.norm_sqr();
    let counter = tau.im * energy / PI;
    let empty = HashMap::new();
    let ratio = |n: usize| {
        scalar_log_det(&plus, z, tau, n) + scalar_log_det(&minus, z, tau, n)
            - 2.0 * scalar_log_det(&empty, z, tau, n)
            - counter
    };
    let n2 = (3 * big_n).div_ceil(2);
    let (l1, l2) = (ratio(big_n), ratio(n2));
    let q = n2 as f64 / big_n as f64;
    (q * l2 - l1) / (q - 1.0)
}

#[test]
fn abelian_probe_matches_dense_oracle_and_is_monotone() {
    let mut r = rng(51);
    let tau = c(0.0, 1.0);
    let z = c(0.31, 0.17);
    let conn = FourierConnection::from_field(tau, diagonal_field(4, 0.5, &mut r)).unwrap();
    let tr = flow_run(&conn, &FlowOptions::default()).unwrap();
    let opts = ProbeOptions {
        samples: 5,
        ..Default::default()
    };
    let rep = section_monotonicity_probe(&tr, MatrixRep::Defining, z, &opts).unwrap();
    assert_eq!(rep.verdict, ProbeVerdict::NonDecreasing);
    assert!(!rep.collapse);
    assert!(rep.slope.unwrap() > 0.0);
    for p in &rep.points {
        let idx = tr.records.iter().position(|x| x.t == p.t).unwrap();
        let snap = &tr.snapshots.iter().find(|s| s.0 == idx).unwrap().1;
        assert!((p.log_det - abelian_oracle(snap, z, opts.truncation)).abs() < 1e-8);
    }
}

#[test]
fn probe_on_flat_start_is_constant() {
    let tau = c(0.0, 1.0);
    let conn = cartan_slice(&[c(0.21, 0.37)], tau, 3).unwrap();
    let tr = flow_run(&conn, &FlowOptions::default()).unwrap();
    let rep = section_monotonicity_probe(
        &tr,
        MatrixRep::Defining,
        c(0.31, 0.17),
        &ProbeOptions::default(),
    )
    .unwrap();
    assert_eq!(rep.points.len(), 1);
    assert_eq!(rep.verdict, ProbeVerdict::NonDecreasing);
    assert_eq!(rep.worst_drop, 0.0);
    assert!(rep.slope.is_none());
}

#[test]
fn probe_flags_kernel_collapse() {
    // The defining weights shift z by ±w, so w = −z puts a constant section
    // in the kernel.
    let tau = c(0.0, 1.0);
    let z = c(0.31, 0.17);
    let conn = cartan_slice(&[-z], tau, 2).unwrap();
    let tr = flow_run(&conn, &FlowOptions::default()).unwrap();
    let rep =
        section_monotonicity_probe(&tr, MatrixRep::Defining, z, &ProbeOptions::default()).unwrap();
    assert!(rep.collapse);
}

#[test]
fn probe_reports_inconclusive_on_loose_truncation() {
    let mut r = rng(52);
    let conn = FourierConnection::random(2, 4, c(0.0, 1.0), 0.5, 1.0, &mut r).unwrap();
    let tr = flow_run(&conn, &FlowOptions::default()).unwrap();
    let opts = ProbeOptions {
        truncation: 2,
        samples: 3,
        max_error: 1e-6,
        ..Default::default()
    };
    let rep = section_monotonicity_probe(&tr, MatrixRep::Defining, c(0.31, 0.17), &opts).unwrap();
    assert_eq!(rep.verdict, ProbeVerdict::Inconclusive);
}

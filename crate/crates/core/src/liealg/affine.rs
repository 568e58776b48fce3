use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::rootsys::RootSystem;

const WALL_TOL: f64 = 1e-9;

/// Element `x ↦ σx + λ₁ + τλ₂` of the affine Weyl group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineElement {
    pub sigma: usize,
    pub shift_real: Vec<i64>,
    pub shift_tau: Vec<i64>,
}

impl AffineElement {
    pub fn identity(rank: usize) -> Self {
        AffineElement {
            sigma: 0,
            shift_real: vec![0; rank],
            shift_tau: vec![0; rank],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.sigma == 0
            && self.shift_real.iter().all(|&x| x == 0)
            && self.shift_tau.iter().all(|&x| x == 0)
    }

    pub fn apply(&self, rs: &RootSystem, w: &[Complex64], tau: Complex64) -> Vec<Complex64> {
        let re: Vec<f64> = w.iter().map(|z| z.re).collect();
        let im: Vec<f64> = w.iter().map(|z| z.im).collect();
        let sre = rs.act(self.sigma, &re);
        let sim = rs.act(self.sigma, &im);
        (0..rs.rank)
            .map(|i| {
                Complex64::new(sre[i], sim[i])
                    + self.shift_real[i] as f64
                    + tau * self.shift_tau[i] as f64
            })
            .collect()
    }
}

/// Result of an affine Weyl reduction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Reduced {
    pub representative: Vec<Complex64>,
    pub element: AffineElement,
}

/// Splits `w = a + τ b` with real `a`, `b`.
pub fn real_coordinates(w: &[Complex64], tau: Complex64) -> (Vec<f64>, Vec<f64>) {
    let b: Vec<f64> = w.iter().map(|z| z.im / tau.im).collect();
    let a: Vec<f64> = w.iter().zip(&b).map(|(z, bi)| z.re - tau.re * bi).collect();
    (a, b)
}

fn frac(x: f64) -> (f64, i64) {
    let fl = x.floor();
    let mut f = x - fl;
    let mut n = -(fl as i64);
    if f > 1.0 - WALL_TOL {
        f = 0.0;
        n -= 1;
    }
    (f, n)
}

fn lex_less(x: &[f64], y: &[f64]) -> bool {
    for (a, b) in x.iter().zip(y) {
        if (a - b).abs() > WALL_TOL {
            return a < b;
        }
    }
    false
}

/// Canonical representative of `w` modulo `(Λ ⊕ τΛ) ⋊ W`.
///
/// Each Weyl image is translated into the unit cube in both real
/// coordinates; the lexicographically smallest image wins, with ties at
/// tolerance 1e-9 resolved toward the earlier Weyl element.
pub fn affine_weyl_reduce(rs: &RootSystem, w: &[Complex64], tau: Complex64) -> Reduced {
    assert!(tau.im > 0.0, "Im tau must be positive");
    let (a, b) = real_coordinates(w, tau);
    let mut best: Option<(Vec<f64>, AffineElement)> = None;
    for s in 0..rs.weyl_order() {
        let sa = rs.act(s, &a);
        let sb = rs.act(s, &b);
        let mut key = Vec::with_capacity(2 * rs.rank);
        let mut sr = Vec::with_capacity(rs.rank);
        let mut st = Vec::with_capacity(rs.rank);
        for x in &sa {
            let (f, n) = frac(*x);
            key.push(f);
            sr.push(n);
        }
        for x in &sb {
            let (f, n) = frac(*x);
            key.push(f);
            st.push(n);
        }
        let better = match &best {
            None => true,
            Some((k, _)) => lex_less(&key, k),
        };
        if better {
            best = Some((
                key,
                AffineElement {
                    sigma: s,
                    shift_real: sr,
                    shift_tau: st,
                },
            ));
        }
    }
    let (key, element) = best.expect("nonempty Weyl group");
    let r = rs.rank;
    let representative = (0..r).map(|i| key[i] + tau * key[r + i]).collect();
    Reduced {
        representative,
        element,
    }
}

/// Distance between the affine Weyl orbits of two points, measured in the
/// real coordinates `(a, b)` with periodic wrap.
pub fn orbit_distance(rs: &RootSystem, w1: &[Complex64], w2: &[Complex64], tau: Complex64) -> f64 {
    let (a1, b1) = real_coordinates(w1, tau);
    let (a2, b2) = real_coordinates(w2, tau);
    let wrap = |x: f64| x - x.round();
    (0..rs.weyl_order())
        .map(|s| {
            let sa = rs.act(s, &a1);
            let sb = rs.act(s, &b1);
            let mut d2 = 0.0;
            for i in 0..rs.rank {
                d2 += wrap(sa[i] - a2[i]).powi(2) + wrap(sb[i] - b2[i]).powi(2);
            }
            d2.sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

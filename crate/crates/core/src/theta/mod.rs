//! Level-k theta functions on the complexified Cartan algebra.
//!
//! For a characteristic `μ` (an integral weight modulo `k` times the coroot
//! lattice) the series is
//! `θ_{μ,k}(z) = Σ_{γ ∈ Λ + C⁻¹μ/k} exp(πikτ⟨γ,γ⟩ + 2πik⟨γ,z⟩)`.

mod blocks;
mod character;

use std::collections::BTreeSet;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use blocks::{symmetrized_matrix, winv_dimension, BlockDimension, WinvOptions};
pub use character::{kac_weyl_character, leading_exponent};

use crate::error::{LabError, Result};
use crate::liealg::RootSystem;

/// Value of a section representative together with the hermitian weight.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SectionValue {
    pub value: Complex64,
    pub weight: f64,
}

impl SectionValue {
    pub fn norm_sq(&self) -> f64 {
        self.value.norm_sqr() * self.weight
    }
}

/// A characteristic: integral weight `mu` and shift `C⁻¹μ/k` reduced into
/// the unit cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Characteristic {
    pub mu: Vec<i64>,
    pub shift: Vec<Rational64>,
}

/// Basis of level-k theta functions at modulus τ.
#[derive(Debug, Clone)]
pub struct ThetaBasis {
    pub rs: RootSystem,
    pub level: u32,
    pub tau: Complex64,
    pub radius: usize,
    pub eps: f64,
    pub characteristics: Vec<Characteristic>,
    form: Vec<Vec<f64>>,
}

fn frac_rational(x: Rational64) -> Rational64 {
    x - x.floor()
}

/// Shift `C⁻¹μ/k` reduced modulo `Z^r`.
fn reduced_shift(rs: &RootSystem, mu: &[i64], k: u32) -> Vec<Rational64> {
    let r = rs.rank;
    let kk = Rational64::from_integer(i64::from(k));
    (0..r)
        .map(|i| {
            let s: Rational64 = (0..r)
                .map(|j| rs.form_inv[i][j] * Rational64::from_integer(mu[j]))
                .sum();
            frac_rational(s / kk)
        })
        .collect()
}

/// Characteristics `Z^r / kCZ^r` with representatives in the fundamental
/// parallelepiped, in a deterministic order.
pub fn characteristics(rs: &RootSystem, k: u32) -> Vec<Characteristic> {
    let r = rs.rank;
    let mut seen: BTreeSet<Vec<Rational64>> = BTreeSet::new();
    let mut stack = vec![vec![0i64; r]];
    seen.insert(reduced_shift(rs, &stack[0], k));
    while let Some(mu) = stack.pop() {
        for i in 0..r {
            let mut next = mu.clone();
            next[i] += 1;
            if seen.insert(reduced_shift(rs, &next, k)) {
                stack.push(next);
            }
        }
    }
    let kk = i64::from(k);
    seen.into_iter()
        .map(|shift| {
            let mu: Vec<i64> = (0..r)
                .map(|i| {
                    let s: Rational64 = (0..r)
                        .map(|j| Rational64::from_integer(rs.form[i][j]) * shift[j])
                        .sum::<Rational64>()
                        * Rational64::from_integer(kk);
                    assert!(s.is_integer());
                    s.to_integer()
                })
                .collect();
            Characteristic { mu, shift }
        })
        .collect()
}

fn smallest_form_eigenvalue(rs: &RootSystem) -> f64 {
    let r = rs.rank;
    let m = DMatrix::from_fn(r, r, |i, j| rs.form[i][j] as f64);
    m.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Smallest box half-width whose Gaussian tail is below `eps`.
fn required_radius(rs: &RootSystem, k: u32, tau: Complex64, eps: f64) -> usize {
    let a = PI * f64::from(k) * tau.im * smallest_form_eigenvalue(rs);
    let r = rs.rank as i32;
    for radius in 1..10_000usize {
        let mut tail = 0.0;
        for s in radius + 1..radius + 400 {
            let s = s as f64;
            let shell = 2.0 * f64::from(r) * (2.0 * s + 3.0).powi(r - 1);
            tail += shell * (-a * (s - 1.0).powi(2)).exp();
        }
        if tail < eps {
            return radius;
        }
    }
    usize::MAX
}

impl ThetaBasis {
    /// Basis with the truncation radius chosen from the tail bound and
    /// doubled.
    pub fn new(rs: &RootSystem, k: u32, tau: Complex64, eps: f64) -> Result<Self> {
        if tau.im <= 0.0 {
            return Err(LabError::BadModulus(tau.im));
        }
        if k == 0 {
            return Err(LabError::Invalid("theta basis needs level k >= 1".into()));
        }
        let radius = 2 * required_radius(rs, k, tau, eps);
        Self::with_radius(rs, k, tau, eps, radius)
    }

    pub fn with_radius(
        rs: &RootSystem,
        k: u32,
        tau: Complex64,
        eps: f64,
        radius: usize,
    ) -> Result<Self> {
        if tau.im <= 0.0 {
            return Err(LabError::BadModulus(tau.im));
        }
        let required = required_radius(rs, k, tau, eps);
        if radius < required {
            return Err(LabError::TruncationTooSmall {
                given: radius,
                required,
            });
        }
        let form = rs
            .form
            .iter()
            .map(|row| row.iter().map(|&x| x as f64).collect())
            .collect();
        Ok(ThetaBasis {
            rs: rs.clone(),
            level: k,
            tau,
            radius,
            eps,
            characteristics: characteristics(rs, k),
            form,
        })
    }

    pub fn len(&self) -> usize {
        self.characteristics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characteristics.is_empty()
    }

    fn pair_c(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let r = self.rs.rank;
        let mut s = Complex64::zero();
        for i in 0..r {
            for j in 0..r {
                s += x[i] * self.form[i][j] * y[j];
            }
        }
        s
    }

    fn pair_r(&self, x: &[f64], y: &[f64]) -> f64 {
        self.rs.pair(x, y)
    }

    /// `θ·√weight` for an arbitrary integral weight `mu` (not necessarily
    /// reduced), summed around the stationary point of the Gaussian.
    pub fn normalized_for_weight(&self, mu: &[i64], z: &[Complex64]) -> Complex64 {
        let r = self.rs.rank;
        let k = f64::from(self.level);
        let shift: Vec<f64> = (0..r)
            .map(|i| {
                let s: Rational64 = (0..r)
                    .map(|j| self.rs.form_inv[i][j] * Rational64::from_integer(mu[j]))
                    .sum();
                *s.numer() as f64 / *s.denom() as f64 / k
            })
            .collect();
        let imz: Vec<f64> = z.iter().map(|c| c.im).collect();
        let center: Vec<i64> = (0..r)
            .map(|i| (-imz[i] / self.tau.im - shift[i]).round() as i64)
            .collect();
        let offset = -PI * k * self.pair_r(&imz, &imz) / self.tau.im;
        let i_pi_k_tau = Complex64::new(0.0, PI * k) * self.tau;
        let two_pi_i_k = Complex64::new(0.0, 2.0 * PI * k);
        let rad = self.radius as i64;
        let mut total = Complex64::zero();
        let mut idx = vec![-rad; r];
        let mut gamma = vec![Complex64::zero(); r];
        loop {
            for i in 0..r {
                gamma[i] = Complex64::new((center[i] + idx[i]) as f64 + shift[i], 0.0);
            }
            let e = i_pi_k_tau * self.pair_c(&gamma, &gamma)
                + two_pi_i_k * self.pair_c(&gamma, z)
                + offset;
            total += e.exp();
            let mut d = 0;
            while d < r {
                idx[d] += 1;
                if idx[d] <= rad {
                    break;
                }
                idx[d] = -rad;
                d += 1;
            }
            if d == r {
                break;
            }
        }
        total
    }

    /// Raw holomorphic value `θ_{μ,k}(z)`.
    pub fn theta_eval(&self, which: usize, z: &[Complex64]) -> Result<Complex64> {
        let ch = self
            .characteristics
            .get(which)
            .ok_or_else(|| LabError::BadCharacteristic(vec![which as i64]))?;
        Ok(self.theta_eval_mu(&ch.mu, z))
    }

    pub fn theta_eval_mu(&self, mu: &[i64], z: &[Complex64]) -> Complex64 {
        self.normalized_for_weight(mu, z) / norm_weight(&self.rs, self.level, self.tau, z).sqrt()
    }

    pub fn section(&self, which: usize, z: &[Complex64]) -> Result<SectionValue> {
        Ok(SectionValue {
            value: self.theta_eval(which, z)?,
            weight: norm_weight(&self.rs, self.level, self.tau, z),
        })
    }

    /// Quasi-periodicity factor for `z ↦ z + τλ₀`.
    pub fn multiplier(&self, lambda0: &[i64], z: &[Complex64]) -> Complex64 {
        let k = f64::from(self.level);
        let l: Vec<Complex64> = lambda0
            .iter()
            .map(|&x| Complex64::new(x as f64, 0.0))
            .collect();
        let e = Complex64::new(0.0, -PI * k) * self.tau * self.pair_c(&l, &l)
            + Complex64::new(0.0, -2.0 * PI * k) * self.pair_c(&l, z);
        e.exp()
    }

    /// Index of the characteristic `σ·μ` (covector action) in the basis.
    pub fn permuted(&self, sigma: usize, which: usize) -> usize {
        let mu = &self.characteristics[which].mu;
        let moved = self.rs.act_covector(sigma, mu);
        let shift = reduced_shift(&self.rs, &moved, self.level);
        self.characteristics
            .iter()
            .position(|c| c.shift == shift)
            .expect("W permutes characteristics")
    }
}

/// Hermitian weight `exp(−(2πk/Im τ)⟨Im z, Im z⟩)`.
pub fn norm_weight(rs: &RootSystem, k: u32, tau: Complex64, z: &[Complex64]) -> f64 {
    let imz: Vec<f64> = z.iter().map(|c| c.im).collect();
    (-(2.0 * PI * f64::from(k) / tau.im) * rs.pair(&imz, &imz)).exp()
}

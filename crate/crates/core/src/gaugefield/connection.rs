use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// The flat torus `C/(Z + τZ)` with coordinates `z = u + τv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Torus {
    pub tau: Complex64,
}

impl Torus {
    pub fn new(tau: Complex64) -> Result<Self> {
        if tau.im <= 0.0 {
            return Err(LabError::BadModulus(tau.im));
        }
        Ok(Torus { tau })
    }

    pub fn area(&self) -> f64 {
        self.tau.im
    }

    /// Hodge star on a real 1-form given by its `(du, dv)` components.
    pub fn hodge_star<T>(&self, alpha_u: T, alpha_v: T) -> (T, T)
    where
        T: Copy
            + std::ops::Sub<Output = T>
            + std::ops::Mul<f64, Output = T>
            + std::ops::Neg<Output = T>,
    {
        let (t1, t2) = (self.tau.re, self.tau.im);
        let ax = alpha_u;
        let ay = (alpha_v - alpha_u * t1) * (1.0 / t2);
        (-ay, ax * t2 - ay * t1)
    }
}

/// Fourier coefficients of an `n × n` matrix-valued function, modes
/// `|m|,|n| ≤ cutoff`, row-major in `(m, n)` and then in matrix entries.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    pub n: usize,
    pub cutoff: usize,
    pub data: Vec<Complex64>,
}

impl MatrixField {
    pub fn zeros(n: usize, cutoff: usize) -> Self {
        let side = 2 * cutoff + 1;
        MatrixField {
            n,
            cutoff,
            data: vec![Complex64::new(0.0, 0.0); side * side * n * n],
        }
    }

    pub fn side(&self) -> usize {
        2 * self.cutoff + 1
    }

    pub fn mode_index(&self, m: i64, n: i64) -> usize {
        let c = self.cutoff as i64;
        ((m + c) as usize) * self.side() + (n + c) as usize
    }

    pub fn mode(&self, m: i64, n: i64) -> &[Complex64] {
        let e = self.n * self.n;
        let i = self.mode_index(m, n);
        &self.data[i * e..(i + 1) * e]
    }

    pub fn mode_mut(&mut self, m: i64, n: i64) -> &mut [Complex64] {
        let e = self.n * self.n;
        let i = self.mode_index(m, n);
        &mut self.data[i * e..(i + 1) * e]
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, i64)> {
        let c = self.cutoff as i64;
        (-c..=c).flat_map(move |m| (-c..=c).map(move |n| (m, n)))
    }

    /// Coefficients of the pointwise adjoint: `(f†)_k = (f_{-k})†`.
    pub fn adjoint(&self) -> MatrixField {
        let mut out = MatrixField::zeros(self.n, self.cutoff);
        let n = self.n;
        for (m, k) in self.modes() {
            let src = self.mode(-m, -k).to_vec();
            let dst = out.mode_mut(m, k);
            for i in 0..n {
                for j in 0..n {
                    dst[i * n + j] = src[j * n + i].conj();
                }
            }
        }
        out
    }

    /// Copies into a different cutoff, truncating or zero-padding.
    pub fn with_cutoff(&self, cutoff: usize) -> MatrixField {
        let mut out = MatrixField::zeros(self.n, cutoff);
        let c = cutoff.min(self.cutoff) as i64;
        for m in -c..=c {
            for k in -c..=c {
                out.mode_mut(m, k).copy_from_slice(self.mode(m, k));
            }
        }
        out
    }

    pub fn axpy(&mut self, alpha: Complex64, x: &MatrixField) {
        assert_eq!(self.data.len(), x.data.len());
        for (a, b) in self.data.iter_mut().zip(&x.data) {
            *a += alpha * b;
        }
    }

    pub fn scaled(&self, alpha: Complex64) -> MatrixField {
        MatrixField {
            n: self.n,
            cutoff: self.cutoff,
            data: self.data.iter().map(|x| x * alpha).collect(),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &MatrixField) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Removes the trace of every coefficient.
    pub fn make_traceless(&mut self) {
        let n = self.n;
        let e = n * n;
        for chunk in self.data.chunks_mut(e) {
            let t: Complex64 = (0..n).map(|i| chunk[i * n + i]).sum::<Complex64>() / n as f64;
            for i in 0..n {
                chunk[i * n + i] -= t;
            }
        }
    }

    /// Makes the represented function pointwise anti-hermitian:
    /// `f ↦ (f − f†)/2`.
    pub fn make_antihermitian(&mut self) {
        let adj = self.adjoint();
        for (a, b) in self.data.iter_mut().zip(&adj.data) {
            *a = (*a - b) * 0.5;
        }
    }

    /// Random traceless coefficients with Gaussian envelope
    /// `amplitude · exp(−|k|²/decay²)`.
    pub fn random<R: Rng>(
        n: usize,
        cutoff: usize,
        amplitude: f64,
        decay: f64,
        rng: &mut R,
    ) -> MatrixField {
        let mut f = MatrixField::zeros(n, cutoff);
        for (m, k) in f.modes().collect::<Vec<_>>() {
            let env = amplitude * (-((m * m + k * k) as f64) / (decay * decay)).exp();
            for x in f.mode_mut(m, k).iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *x = Complex64::new(re, im) * env;
            }
        }
        f.make_traceless();
        f
    }

    /// Directional derivatives `∂_u` and `∂_v` in coefficient space.
    pub fn du(&self) -> MatrixField {
        self.multiplied(|m, _| Complex64::new(0.0, 2.0 * PI * m as f64))
    }

    pub fn dv(&self) -> MatrixField {
        self.multiplied(|_, n| Complex64::new(0.0, 2.0 * PI * n as f64))
    }

    pub fn multiplied(&self, f: impl Fn(i64, i64) -> Complex64) -> MatrixField {
        let mut out = self.clone();
        let e = self.n * self.n;
        for (m, k) in self.modes().collect::<Vec<_>>() {
            let s = f(m, k);
            let i = self.mode_index(m, k);
            for x in &mut out.data[i * e..(i + 1) * e] {
                *x *= s;
            }
        }
        out
    }
}

/// The `(0,1)`-part `Σ a_{mn} φ_{mn} dz̄` of an `su(n)` connection on the
/// torus. The real connection is `A = a dz̄ − a† dz`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierConnection {
    pub tau: Complex64,
    pub a: MatrixField,
}

/// JSON snapshot of a connection.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConnectionSnapshot {
    pub group: String,
    pub modes: usize,
    pub tau: [f64; 2],
    /// Interleaved `re, im` over modes `(m, n)` from `-M` to `M`, then
    /// row-major matrix entries.
    pub coefficients: Vec<f64>,
}

impl FourierConnection {
    pub fn zero(n: usize, cutoff: usize, tau: Complex64) -> Result<Self> {
        check_group(n)?;
        Torus::new(tau)?;
        Ok(FourierConnection {
            tau,
            a: MatrixField::zeros(n, cutoff),
        })
    }

    pub fn from_field(tau: Complex64, mut a: MatrixField) -> Result<Self> {
        check_group(a.n)?;
        Torus::new(tau)?;
        a.make_traceless();
        Ok(FourierConnection { tau, a })
    }

    pub fn random<R: Rng>(
        n: usize,
        cutoff: usize,
        tau: Complex64,
        amplitude: f64,
        decay: f64,
        rng: &mut R,
    ) -> Result<Self> {
        check_group(n)?;
        Torus::new(tau)?;
        Ok(FourierConnection {
            tau,
            a: MatrixField::random(n, cutoff, amplitude, decay, rng),
        })
    }

    pub fn n(&self) -> usize {
        self.a.n
    }

    pub fn cutoff(&self) -> usize {
        self.a.cutoff
    }

    pub fn torus(&self) -> Torus {
        Torus { tau: self.tau }
    }

    /// Coefficients of the real components `A_u = a − a†` and
    /// `A_v = τ̄a − τa†`.
    pub fn real_components(&self) -> (MatrixField, MatrixField) {
        let adj = self.a.adjoint();
        let mut au = self.a.clone();
        au.axpy(Complex64::new(-1.0, 0.0), &adj);
        let mut av = self.a.scaled(self.tau.conj());
        av.axpy(-self.tau, &adj);
        (au, av)
    }

    /// Inverse of [`Self::real_components`]: `a = (τA_u − A_v)/(2iτ₂)`.
    pub fn from_real_components(tau: Complex64, au: &MatrixField, av: &MatrixField) -> MatrixField {
        let mut a = au.scaled(tau);
        a.axpy(Complex64::new(-1.0, 0.0), av);
        a.scaled(Complex64::new(0.0, -0.5 / tau.im))
    }

    pub fn tangent_add(&self, t: &MatrixField, s: f64) -> FourierConnection {
        let mut a = self.a.clone();
        a.axpy(Complex64::new(s, 0.0), t);
        FourierConnection { tau: self.tau, a }
    }

    pub fn snapshot(&self) -> ConnectionSnapshot {
        ConnectionSnapshot {
            group: format!("su{}", self.n()),
            modes: self.cutoff(),
            tau: [self.tau.re, self.tau.im],
            coefficients: self.a.data.iter().flat_map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn from_snapshot(s: &ConnectionSnapshot) -> Result<Self> {
        let n: usize = s
            .group
            .strip_prefix("su")
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| LabError::Invalid(format!("group {}", s.group)))?;
        check_group(n)?;
        let side = 2 * s.modes + 1;
        if s.coefficients.len() != 2 * side * side * n * n {
            return Err(LabError::Shape("coefficient array length".into()));
        }
        let data = s
            .coefficients
            .chunks(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        Ok(FourierConnection {
            tau: Complex64::new(s.tau[0], s.tau[1]),
            a: MatrixField {
                n,
                cutoff: s.modes,
                data,
            },
        })
    }
}

pub(crate) fn check_group(n: usize) -> Result<()> {
    if (2..=4).contains(&n) {
        Ok(())
    } else {
        Err(LabError::UnsupportedGroup(n))
    }
}

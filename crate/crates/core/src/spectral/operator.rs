use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::gaugefield::FourierConnection;
use crate::liealg::{RepresentationWeights, RootSystem};

/// Fourier modes `(m, n)` with `|τm − n|² ≤ τ₂ N²`, ordered by
/// `|τm − n|` and then lexicographically.
pub fn disc_modes(tau: Complex64, truncation: usize) -> Vec<(i64, i64)> {
    let r2 = tau.im * (truncation * truncation) as f64;
    let r = r2.sqrt();
    let mmax = (r / tau.im).floor() as i64;
    let mut out = Vec::new();
    for m in -mmax..=mmax {
        let re = tau.re * m as f64;
        let lo = (re - r).ceil() as i64 - 1;
        let hi = (re + r).floor() as i64 + 1;
        for n in lo..=hi {
            if (tau * m as f64 - n as f64).norm_sqr() <= r2 * (1.0 + 1e-12) {
                out.push((m, n));
            }
        }
    }
    let key = |&(m, n): &(i64, i64)| (tau * m as f64 - n as f64).norm_sqr();
    out.sort_by(|a, b| key(a).total_cmp(&key(b)).then(a.cmp(b)));
    out
}

/// Symbol of `∂_z̄` on `e^{2πi(mu + nv)}` plus the twist: `(π/τ₂)(τm − n + z)`.
pub fn dbar_symbol(tau: Complex64, z: Complex64, m: i64, n: i64) -> Complex64 {
    (tau * m as f64 - n as f64 + z) * (PI / tau.im)
}

/// Matrix representations of `su(n)` used by the dense backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixRep {
    Defining,
    Adjoint,
}

impl MatrixRep {
    pub fn dim(&self, n: usize) -> usize {
        match self {
            MatrixRep::Defining => n,
            MatrixRep::Adjoint => n * n - 1,
        }
    }

    /// Image of a complex `n × n` matrix.
    pub fn apply(&self, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        match self {
            MatrixRep::Defining => x.clone(),
            MatrixRep::Adjoint => {
                let basis = sl_basis(x.nrows());
                let d = basis.len();
                DMatrix::from_fn(d, d, |a, b| {
                    let c = x * &basis[b] - &basis[b] * x;
                    basis[a].adjoint().component_mul(&c.transpose()).sum()
                })
            }
        }
    }
}

/// Hilbert–Schmidt orthonormal basis of `sl(n, ℂ)`.
fn sl_basis(n: usize) -> Vec<DMatrix<Complex64>> {
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut e = DMatrix::zeros(n, n);
                e[(i, j)] = one;
                out.push(e);
            }
        }
    }
    for k in 1..n {
        let s = ((k * (k + 1)) as f64).sqrt();
        let mut h = DMatrix::zeros(n, n);
        for j in 0..k {
            h[(j, j)] = one / s;
        }
        h[(k, k)] = -one * (k as f64 / s);
        out.push(h);
    }
    out
}

/// How the `(0,1)`-potential enters the operator.
#[derive(Debug, Clone)]
pub enum Potential {
    /// Constant Cartan potential: one scalar shift `λ(w)` per weight.
    Slice { shifts: Vec<Complex64> },
    /// Fourier coefficients `ρ(a_k)` of a general potential.
    Dense {
        dim: usize,
        coeffs: HashMap<(i64, i64), DMatrix<Complex64>>,
    },
}

/// `∂̄ + ρ(a) + (π/τ₂)z` on `V`-valued functions, truncated to the disc of
/// radius `N`. Its Laplacian `Δ = ∂̄*∂̄` uses the form norm `|dz̄|² = 2`.
#[derive(Debug, Clone)]
pub struct TwistedDolbeault {
    pub tau: Complex64,
    pub z: Complex64,
    pub truncation: usize,
    pub potential: Potential,
}

impl TwistedDolbeault {
    /// Slice point `w` (coroot coordinates) in the representation with the
    /// given weights.
    pub fn on_slice(
        rs: &RootSystem,
        rep: &RepresentationWeights,
        w: &[Complex64],
        z: Complex64,
        tau: Complex64,
        truncation: usize,
    ) -> Result<Self> {
        if w.len() != rs.rank {
            return Err(LabError::Shape(format!(
                "slice point of length {} for rank {}",
                w.len(),
                rs.rank
            )));
        }
        check_tau(tau)?;
        let mut shifts = Vec::new();
        for (wt, mult) in &rep.weights {
            let s = weight_value(&wt.to_f64(), w);
            shifts.extend(std::iter::repeat_n(s, *mult as usize));
        }
        Ok(TwistedDolbeault {
            tau,
            z,
            truncation,
            potential: Potential::Slice { shifts },
        })
    }

    /// The free operator of rank `dim`, twisted by `z`.
    pub fn free(dim: usize, z: Complex64, tau: Complex64, truncation: usize) -> Self {
        TwistedDolbeault {
            tau,
            z,
            truncation,
            potential: Potential::Slice {
                shifts: vec![Complex64::new(0.0, 0.0); dim],
            },
        }
    }

    /// General connection in a matrix representation.
    pub fn on_connection(
        conn: &FourierConnection,
        rep: MatrixRep,
        z: Complex64,
        truncation: usize,
    ) -> Result<Self> {
        let n = conn.n();
        let mut coeffs = HashMap::new();
        for (m, k) in conn.a.modes() {
            let block = conn.a.mode(m, k);
            if block.iter().all(|x| x.norm() == 0.0) {
                continue;
            }
            let x = DMatrix::from_row_slice(n, n, block);
            coeffs.insert((m, k), rep.apply(&x));
        }
        Ok(TwistedDolbeault {
            tau: conn.tau,
            z,
            truncation,
            potential: Potential::Dense {
                dim: rep.dim(n),
                coeffs,
            },
        })
    }

    pub fn with_truncation(&self, truncation: usize) -> Self {
        TwistedDolbeault {
            truncation,
            ..self.clone()
        }
    }

    /// Fibre dimension of `V`.
    pub fn rank(&self) -> usize {
        match &self.potential {
            Potential::Slice { shifts } => shifts.len(),
            Potential::Dense { dim, .. } => *dim,
        }
    }

    pub fn modes(&self) -> Vec<(i64, i64)> {
        disc_modes(self.tau, self.truncation)
    }

    /// Mean of `|ρ(a) + (π/τ₂)z|²` times the area: `τ₂ Σ_k ‖ρ(a_k) + (π/τ₂)zδ_k‖²`.
    pub fn potential_energy(&self) -> f64 {
        let zt = self.z * (PI / self.tau.im);
        let s = match &self.potential {
            Potential::Slice { shifts } => shifts
                .iter()
                .map(|s| (s * (PI / self.tau.im) + zt).norm_sqr())
                .sum(),
            Potential::Dense { dim, coeffs } => {
                let mut s: f64 = coeffs
                    .iter()
                    .filter(|(k, _)| **k != (0, 0))
                    .map(|(_, b)| b.norm_squared())
                    .sum();
                let b0 = coeffs
                    .get(&(0, 0))
                    .cloned()
                    .unwrap_or_else(|| DMatrix::zeros(*dim, *dim))
                    + DMatrix::identity(*dim, *dim) * zt;
                s += b0.norm_squared();
                s
            }
        };
        self.tau.im * s
    }

    /// Truncated `Δ = S*S` for the finite section `S`, block index
    /// `mode * rank + component`.
    pub fn laplacian(&self) -> DMatrix<Complex64> {
        let s = self.section();
        s.adjoint() * s
    }

    /// Square finite section of `√2(∂̄ + B)` on the disc modes.
    pub fn section(&self) -> DMatrix<Complex64> {
        let modes = self.modes();
        let d = self.rank();
        let sq2 = std::f64::consts::SQRT_2;
        let mut out = DMatrix::zeros(modes.len() * d, modes.len() * d);
        match &self.potential {
            Potential::Slice { shifts } => {
                for (i, &(m, n)) in modes.iter().enumerate() {
                    for (c, s) in shifts.iter().enumerate() {
                        out[(i * d + c, i * d + c)] = dbar_symbol(self.tau, self.z + s, m, n) * sq2;
                    }
                }
            }
            Potential::Dense { coeffs, .. } => {
                for (i, &(mi, ni)) in modes.iter().enumerate() {
                    let sym = dbar_symbol(self.tau, self.z, mi, ni);
                    for c in 0..d {
                        out[(i * d + c, i * d + c)] += sym * sq2;
                    }
                    for (j, &(mj, nj)) in modes.iter().enumerate() {
                        if let Some(b) = coeffs.get(&(mi - mj, ni - nj)) {
                            for r in 0..d {
                                for c in 0..d {
                                    out[(i * d + r, j * d + c)] += b[(r, c)] * sq2;
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn rectangular(&self) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        let modes = self.modes();
        let d = self.rank();
        let sq2 = std::f64::consts::SQRT_2;
        let mut targets: Vec<(i64, i64)> = modes.clone();
        let mut index: HashMap<(i64, i64), usize> =
            modes.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let shifts: Vec<(i64, i64)> = match &self.potential {
            Potential::Slice { .. } => vec![],
            Potential::Dense { coeffs, .. } => {
                let mut v: Vec<_> = coeffs
                    .keys()
                    .flat_map(|&(p, q)| [(p, q), (-p, -q)])
                    .collect();
                v.sort();
                v.dedup();
                v
            }
        };
        for &(m, n) in &modes {
            for &(p, q) in &shifts {
                let t = (m + p, n + q);
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(t) {
                    e.insert(targets.len());
                    targets.push(t);
                }
            }
        }
        let rows = targets.len() * d;
        let cols = modes.len() * d;
        let mut dm = DMatrix::zeros(rows, cols);
        let mut da = DMatrix::zeros(rows, cols);
        for (j, &(m, n)) in modes.iter().enumerate() {
            match &self.potential {
                Potential::Slice { shifts } => {
                    for (c, s) in shifts.iter().enumerate() {
                        let sym = dbar_symbol(self.tau, self.z + s, m, n);
                        dm[(j * d + c, j * d + c)] = sym * sq2;
                        da[(j * d + c, j * d + c)] = -sym.conj() * sq2;
                    }
                }
                Potential::Dense { coeffs, .. } => {
                    let sym = dbar_symbol(self.tau, self.z, m, n);
                    for c in 0..d {
                        dm[(j * d + c, j * d + c)] += sym * sq2;
                        da[(j * d + c, j * d + c)] -= sym.conj() * sq2;
                    }
                    for &(p, q) in &shifts {
                        let i = index[&(m + p, n + q)];
                        let b = coeffs.get(&(p, q));
                        let bd = coeffs.get(&(-p, -q));
                        for r in 0..d {
                            for c in 0..d {
                                if let Some(b) = b {
                                    dm[(i * d + r, j * d + c)] += b[(r, c)] * sq2;
                                }
                                if let Some(bd) = bd {
                                    da[(i * d + r, j * d + c)] -= bd[(c, r)].conj() * sq2;
                                }
                            }
                        }
                    }
                }
            }
        }
        (dm, da)
    }

    /// Sorted eigenvalues of the truncated `Δ`.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = match &self.potential {
            Potential::Slice { shifts } => self
                .modes()
                .iter()
                .flat_map(|&(m, n)| {
                    shifts
                        .iter()
                        .map(move |s| 2.0 * dbar_symbol(self.tau, self.z + s, m, n).norm_sqr())
                })
                .collect(),
            Potential::Dense { .. } => self
                .section()
                .singular_values()
                .iter()
                .map(|s| s * s)
                .collect(),
        };
        ev.sort_by(f64::total_cmp);
        ev
    }
}

pub(crate) fn check_tau(tau: Complex64) -> Result<()> {
    if tau.im > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(LabError::BadModulus(tau.im))
    }
}

/// `λ(w) = Σ_i λ_i w_i` for `λ` in the fundamental basis and `w` in coroot
/// coordinates.
pub fn weight_value(lambda: &[f64], w: &[Complex64]) -> Complex64 {
    lambda.iter().zip(w).map(|(l, x)| x * *l).sum()
}

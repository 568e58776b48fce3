//! Separable discrete Fourier transforms between truncated mode arrays and
//! an `N × N` collocation grid, for fields with `ne` complex entries per
//! point.
//!
//! Mode arrays hold indices `-K..=K` per axis, row-major in `(m, n)`; grid
//! arrays hold points `(a, b) ↦ (u, v) = (a/N, b/N)`, row-major.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct Spectral {
    pub n: usize,
    kmax: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("n", &self.n).finish()
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    for a in 0..n {
        for b in 0..n {
            dst[b * n + a] = src[a * n + b];
        }
    }
}

impl Spectral {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Spectral {
            n,
            kmax: (n - 1) / 2,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    /// Shared instance per grid size for the current thread.
    pub fn cached(n: usize) -> Self {
        thread_local! {
            static CACHE: std::cell::RefCell<std::collections::HashMap<usize, Spectral>> =
                std::cell::RefCell::new(std::collections::HashMap::new());
        }
        CACHE.with(|c| {
            c.borrow_mut()
                .entry(n)
                .or_insert_with(|| Spectral::new(n))
                .clone()
        })
    }

    pub fn max_mode(&self) -> usize {
        self.kmax
    }

    fn wrap(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    fn rows(
        fft: &Arc<dyn Fft<f64>>,
        buf: &mut [Complex64],
        n: usize,
        rows: impl Iterator<Item = usize>,
        scratch: &mut [Complex64],
    ) {
        for r in rows {
            fft.process_with_scratch(&mut buf[r * n..(r + 1) * n], scratch);
        }
    }

    /// Evaluates modes `|m|,|n| ≤ k` on the grid.
    pub fn to_grid(&self, modes: &[Complex64], k: usize, ne: usize) -> Vec<Complex64> {
        assert!(
            k <= self.kmax,
            "cutoff {k} exceeds grid capacity {}",
            self.kmax
        );
        let nm = 2 * k + 1;
        let n = self.n;
        assert_eq!(modes.len(), nm * nm * ne);
        let zero = Complex64::new(0.0, 0.0);
        let mut out = vec![zero; n * n * ne];
        let mut buf = vec![zero; n * n];
        let mut tb = vec![zero; n * n];
        let mut scratch = vec![zero; self.inv.get_inplace_scratch_len()];
        let live: Vec<usize> = (0..nm).map(|mi| self.wrap(mi as i64 - k as i64)).collect();
        for e in 0..ne {
            buf.fill(zero);
            for (mi, &row) in live.iter().enumerate() {
                for ni in 0..nm {
                    buf[row * n + self.wrap(ni as i64 - k as i64)] = modes[(mi * nm + ni) * ne + e];
                }
            }
            Self::rows(&self.inv, &mut buf, n, live.iter().copied(), &mut scratch);
            transpose(&buf, &mut tb, n);
            Self::rows(&self.inv, &mut tb, n, 0..n, &mut scratch);
            for a in 0..n {
                for b in 0..n {
                    out[(a * n + b) * ne + e] = tb[b * n + a];
                }
            }
        }
        out
    }

    /// Fourier coefficients `|m|,|n| ≤ k` of a grid field.
    pub fn to_modes(&self, grid: &[Complex64], k: usize, ne: usize) -> Vec<Complex64> {
        assert!(
            k <= self.kmax,
            "cutoff {k} exceeds grid capacity {}",
            self.kmax
        );
        let nm = 2 * k + 1;
        let n = self.n;
        assert_eq!(grid.len(), n * n * ne);
        let zero = Complex64::new(0.0, 0.0);
        let scale = 1.0 / (n * n) as f64;
        let mut out = vec![zero; nm * nm * ne];
        let mut buf = vec![zero; n * n];
        let mut tb = vec![zero; n * n];
        let mut scratch = vec![zero; self.fwd.get_inplace_scratch_len()];
        let live: Vec<usize> = (0..nm).map(|ni| self.wrap(ni as i64 - k as i64)).collect();
        for e in 0..ne {
            for p in 0..n * n {
                buf[p] = grid[p * ne + e];
            }
            Self::rows(&self.fwd, &mut buf, n, 0..n, &mut scratch);
            transpose(&buf, &mut tb, n);
            Self::rows(&self.fwd, &mut tb, n, live.iter().copied(), &mut scratch);
            // tb[n_idx][m_idx]
            for mi in 0..nm {
                let col = self.wrap(mi as i64 - k as i64);
                for (ni, &row) in live.iter().enumerate() {
                    out[(mi * nm + ni) * ne + e] = tb[row * n + col] * scale;
                }
            }
        }
        out
    }
}

/// Small dense complex matrix kernels on row-major slices.
pub mod small {
    use num_complex::Complex64;

    #[inline]
    pub fn mul(a: &[Complex64], b: &[Complex64], out: &mut [Complex64], n: usize) {
        for i in 0..n {
            for j in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    s += a[i * n + k] * b[k * n + j];
                }
                out[i * n + j] = s;
            }
        }
    }

    /// `out = a b - b a`.
    #[inline]
    pub fn commutator(a: &[Complex64], b: &[Complex64], out: &mut [Complex64], n: usize) {
        for i in 0..n {
            for j in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    s += a[i * n + k] * b[k * n + j] - b[i * n + k] * a[k * n + j];
                }
                out[i * n + j] = s;
            }
        }
    }

    #[inline]
    pub fn adjoint(a: &[Complex64], out: &mut [Complex64], n: usize) {
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = a[j * n + i].conj();
            }
        }
    }

    pub fn trace(a: &[Complex64], n: usize) -> Complex64 {
        (0..n).map(|i| a[i * n + i]).sum()
    }

    /// `tr(a† b)`.
    pub fn hs_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }
}

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ThetaBasis;
use crate::error::{LabError, Result};
use crate::liealg::{level_k_weights, RootSystem};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WinvOptions {
    pub samples: Option<usize>,
    pub threshold: f64,
    pub seed: u64,
    pub eps: f64,
}

impl Default for WinvOptions {
    fn default() -> Self {
        WinvOptions {
            samples: None,
            threshold: 1e-8,
            seed: 0,
            eps: 1e-14,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockDimension {
    pub dimension: usize,
    pub characteristics: usize,
    pub singular_values: Vec<f64>,
    pub alcove_count: usize,
    pub threshold: f64,
    /// Ratio of the smallest retained to the largest discarded singular value.
    pub gap_ratio: f64,
}

fn sample_points(
    r: usize,
    tau: Complex64,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<Complex64>> {
    (0..count)
        .map(|_| {
            (0..r)
                .map(|_| {
                    let a: f64 = rng.random();
                    let b: f64 = rng.random();
                    a + tau * b
                })
                .collect()
        })
        .collect()
}

/// Evaluation matrix of Weyl-averaged theta functions, rows scaled by the
/// square root of the hermitian weight and columns normalized.
pub fn symmetrized_matrix(basis: &ThetaBasis, points: &[Vec<Complex64>]) -> DMatrix<Complex64> {
    let rs = &basis.rs;
    let nw = rs.weyl_order() as f64;
    let mut m = DMatrix::from_fn(points.len(), basis.len(), |s, c| {
        let z = &points[s];
        let mut acc = Complex64::new(0.0, 0.0);
        for sigma in 0..rs.weyl_order() {
            let re: Vec<f64> = z.iter().map(|x| x.re).collect();
            let im: Vec<f64> = z.iter().map(|x| x.im).collect();
            let sr = rs.act(sigma, &re);
            let si = rs.act(sigma, &im);
            let sz: Vec<Complex64> = sr
                .iter()
                .zip(&si)
                .map(|(a, b)| Complex64::new(*a, *b))
                .collect();
            acc += basis.normalized_for_weight(&basis.characteristics[c].mu, &sz);
        }
        acc / nw
    });
    for mut col in m.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col /= Complex64::new(n, 0.0);
        }
    }
    m
}

fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

fn rank_at(sv: &[f64], thr: f64) -> usize {
    sv.iter().filter(|&&s| s > thr).count()
}

/// Dimension of the Weyl-invariant level-k theta functions, measured as
/// a numerical rank.
pub fn winv_dimension(
    rs: &RootSystem,
    k: u32,
    tau: Complex64,
    opts: &WinvOptions,
) -> Result<BlockDimension> {
    if tau.im <= 0.0 {
        return Err(LabError::BadModulus(tau.im));
    }
    let alcove_count = level_k_weights(rs, k).len();
    if k == 0 {
        return Ok(BlockDimension {
            dimension: 1,
            characteristics: 1,
            singular_values: vec![1.0],
            alcove_count,
            threshold: opts.threshold,
            gap_ratio: f64::INFINITY,
        });
    }
    let basis = ThetaBasis::new(rs, k, tau, opts.eps)?;
    let n = basis.len();
    let required = 2 * n;
    let samples = opts.samples.unwrap_or(required + 4);
    if samples < required {
        return Err(LabError::TooFewSamples {
            given: samples,
            required,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let first = sample_points(rs.rank, tau, samples, &mut rng);
    let second = sample_points(rs.rank, tau, samples, &mut rng);
    let sv1 = singular_values(&symmetrized_matrix(&basis, &first));
    let sv2 = singular_values(&symmetrized_matrix(&basis, &second));
    let r1 = rank_at(&sv1, opts.threshold);
    let r2 = rank_at(&sv2, opts.threshold);
    if r1 != r2 {
        return Err(LabError::RankUnstable {
            first: r1,
            second: r2,
        });
    }
    let ranks: Vec<usize> = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6]
        .iter()
        .map(|&t| rank_at(&sv1, t))
        .collect();
    if ranks.iter().any(|&x| x != r1) {
        return Err(LabError::ThresholdSensitive(ranks));
    }
    let retained = if r1 > 0 { sv1[r1 - 1] } else { f64::INFINITY };
    let discarded = sv1.get(r1).copied().unwrap_or(0.0);
    let gap_ratio = if discarded > 0.0 {
        retained / discarded
    } else {
        f64::INFINITY
    };
    Ok(BlockDimension {
        dimension: r1,
        characteristics: n,
        singular_values: sv1,
        alcove_count,
        threshold: opts.threshold,
        gap_ratio,
    })
}

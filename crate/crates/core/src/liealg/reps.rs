use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::rootsys::{Family, RootSystem};
use crate::error::{LabError, Result};

/// A weight in the fundamental-weight basis: `coeffs[j] = λ(e_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight {
    pub coeffs: Vec<Rational64>,
}

impl Weight {
    pub fn from_ints(v: &[i64]) -> Self {
        Weight {
            coeffs: v.iter().map(|&x| Rational64::from_integer(x)).collect(),
        }
    }

    pub fn zero(rank: usize) -> Self {
        Weight {
            coeffs: vec![Rational64::zero(); rank],
        }
    }

    /// Pairing with a coroot-lattice vector.
    pub fn pair_coroot(&self, x: &[i64]) -> Rational64 {
        self.coeffs
            .iter()
            .zip(x)
            .map(|(c, &v)| c * Rational64::from_integer(v))
            .sum()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn is_dominant(&self) -> bool {
        self.coeffs.iter().all(|c| *c >= Rational64::zero())
    }

    pub fn to_ints(&self) -> Option<Vec<i64>> {
        self.is_integral()
            .then(|| self.coeffs.iter().map(|c| c.to_integer()).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| *c.numer() as f64 / *c.denom() as f64)
            .collect()
    }
}

/// Weight multiset of a finite-dimensional representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationWeights {
    pub weights: Vec<(Weight, u32)>,
}

impl RepresentationWeights {
    pub fn dim(&self) -> u32 {
        self.weights.iter().map(|(_, m)| m).sum()
    }

    pub fn trivial(rs: &RootSystem) -> Self {
        RepresentationWeights {
            weights: vec![(Weight::zero(rs.rank), 1)],
        }
    }

    pub fn adjoint(rs: &RootSystem) -> Self {
        let mut weights: Vec<(Weight, u32)> = rs
            .all_root_covectors()
            .iter()
            .map(|c| (Weight::from_ints(c), 1))
            .collect();
        weights.push((Weight::zero(rs.rank), rs.rank as u32));
        RepresentationWeights { weights }
    }

    /// Vector representation of a classical algebra: orbit of ω₁, plus
    /// a zero weight for odd orthogonal algebras.
    pub fn defining(rs: &RootSystem) -> Result<Self> {
        let r = rs.rank;
        let mut w1 = vec![0i64; r];
        w1[0] = 1;
        let mut weights: Vec<(Weight, u32)> = weyl_orbit(rs, &w1)
            .into_iter()
            .map(|v| (Weight::from_ints(&v), 1))
            .collect();
        match rs.family {
            Family::A | Family::C | Family::D => {}
            Family::B => weights.push((Weight::zero(r), 1)),
            _ => {
                return Err(LabError::Invalid(
                    "defining representation only for classical types".into(),
                ))
            }
        }
        Ok(RepresentationWeights { weights })
    }

    /// Checks invariance of the multiset under the simple reflections.
    pub fn is_weyl_invariant(&self, rs: &RootSystem) -> bool {
        let Some(base) = self.as_map() else {
            return false;
        };
        (0..rs.rank).all(|i| {
            let mut moved: BTreeMap<Vec<i64>, u32> = BTreeMap::new();
            for (lam, m) in &base {
                // s_i λ = λ - λ(e_i) α_i, with α_i(e_j) = cartan[j][i]
                let li = lam[i];
                let v: Vec<i64> = (0..rs.rank)
                    .map(|j| lam[j] - li * rs.cartan[j][i])
                    .collect();
                *moved.entry(v).or_default() += m;
            }
            moved == base
        })
    }

    fn as_map(&self) -> Option<BTreeMap<Vec<i64>, u32>> {
        let mut map = BTreeMap::new();
        for (w, m) in &self.weights {
            *map.entry(w.to_ints()?).or_default() += m;
        }
        Some(map)
    }
}

fn weyl_orbit(rs: &RootSystem, lam: &[i64]) -> Vec<Vec<i64>> {
    let mut seen = std::collections::BTreeSet::from([lam.to_vec()]);
    let mut stack = vec![lam.to_vec()];
    while let Some(v) = stack.pop() {
        for i in 0..rs.rank {
            let vi = v[i];
            let w: Vec<i64> = (0..rs.rank).map(|j| v[j] - vi * rs.cartan[j][i]).collect();
            if seen.insert(w.clone()) {
                stack.push(w);
            }
        }
    }
    seen.into_iter().collect()
}

/// Dynkin index `d_V = ½ Σ mult·λ(θ∨)²`, cross-checked at every simple
/// coroot where it reads `Σ mult·λ(e_i)² / ⟨e_i,e_i⟩`.
pub fn dynkin_index(rs: &RootSystem, rep: &RepresentationWeights) -> Result<Rational64> {
    if !rep.is_weyl_invariant(rs) {
        return Err(LabError::NotWeylInvariant);
    }
    let at = |x: &[i64]| -> Rational64 {
        rep.weights
            .iter()
            .map(|(w, m)| {
                let p = w.pair_coroot(x);
                p * p * Rational64::from_integer(i64::from(*m))
            })
            .sum()
    };
    let theta_norm = Rational64::from_integer(2);
    let value = at(&rs.highest_coroot) / theta_norm;
    for i in 0..rs.rank {
        let mut e = vec![0i64; rs.rank];
        e[i] = 1;
        let alt = at(&e) / Rational64::from_integer(rs.form[i][i]);
        if alt != value {
            return Err(LabError::DynkinMismatch(format!(
                "theta gives {value}, coroot {i} gives {alt}"
            )));
        }
    }
    Ok(value)
}

/// Dominant integral weights with `λ(θ∨) ≤ k`, in lexicographic order.
pub fn level_k_weights(rs: &RootSystem, k: u32) -> Vec<Weight> {
    let marks = rs.comarks();
    let mut out = Vec::new();
    let mut cur = vec![0i64; rs.rank];
    fn rec(i: usize, budget: i64, marks: &[i64], cur: &mut Vec<i64>, out: &mut Vec<Weight>) {
        if i == marks.len() {
            out.push(Weight::from_ints(cur));
            return;
        }
        let mut v = 0;
        while v * marks[i] <= budget {
            cur[i] = v;
            rec(i + 1, budget - v * marks[i], marks, cur, out);
            v += 1;
        }
        cur[i] = 0;
    }
    rec(0, i64::from(k), marks, &mut cur, &mut out);
    out
}

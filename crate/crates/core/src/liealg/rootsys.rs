use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Largest Weyl group enumerated explicitly.
pub const WEYL_ORDER_CAP: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Family {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "E" => Ok(Family::E),
            "F" => Ok(Family::F),
            "G" => Ok(Family::G),
            _ => Err(LabError::Invalid(format!("unknown family {s}"))),
        }
    }
}

/// A root system of a simple Lie algebra with its Weyl group.
///
/// `cartan[i][j] = α_j(e_i)`. The normalized form on the Cartan algebra is
/// `form[i][j] = ⟨e_i, e_j⟩ = cartan[i][j] * d_j`, where `d_j = ⟨e_j,e_j⟩/2`
/// is 1 on long simple roots.
#[derive(Debug, Clone)]
pub struct RootSystem {
    pub family: Family,
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    pub sym: Vec<i64>,
    pub form: Vec<Vec<i64>>,
    pub form_inv: Vec<Vec<Rational64>>,
    /// Positive roots as coefficients over the simple roots.
    pub positive_roots: Vec<Vec<i64>>,
    /// Positive roots as covectors: values on the simple coroots.
    pub positive_covectors: Vec<Vec<i64>>,
    pub highest_root: Vec<i64>,
    /// θ∨ in the coroot basis.
    pub highest_coroot: Vec<i64>,
    pub dual_coxeter: i64,
    /// Weyl group elements acting on coroot coordinates; identity first.
    pub weyl: Vec<Vec<Vec<i64>>>,
    weyl_index: HashMap<Vec<i64>, usize>,
}

fn classical_order(family: Family, r: usize) -> u64 {
    let fact = |n: usize| (1..=n as u64).product::<u64>();
    match family {
        Family::A => fact(r + 1),
        Family::B | Family::C => (1u64 << r) * fact(r),
        Family::D => (1u64 << (r - 1)) * fact(r),
        Family::E => match r {
            6 => 51_840,
            7 => 2_903_040,
            _ => 696_729_600,
        },
        Family::F => 1152,
        Family::G => 12,
    }
}

fn cartan_matrix(family: Family, r: usize) -> Result<(Vec<Vec<i64>>, Vec<i64>)> {
    let bad = || LabError::InvalidType {
        family: family.letter(),
        rank: r,
    };
    let valid = match family {
        Family::A => r >= 1,
        Family::B | Family::C => r >= 2,
        Family::D => r >= 4,
        Family::E => (6..=8).contains(&r),
        Family::F => r == 4,
        Family::G => r == 2,
    };
    if !valid {
        return Err(bad());
    }
    let mut a = vec![vec![0i64; r]; r];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |i: usize, j: usize| {
        a[i][j] = -1;
        a[j][i] = -1;
    };
    let mut d = vec![1i64; r];
    match family {
        Family::A | Family::B | Family::C => {
            for i in 0..r - 1 {
                link(i, i + 1);
            }
        }
        Family::D => {
            for i in 0..r - 2 {
                link(i, i + 1);
            }
            link(r - 3, r - 1);
        }
        Family::E => {
            link(0, 2);
            link(1, 3);
            for i in 2..r - 1 {
                link(i, i + 1);
            }
        }
        Family::F => {
            link(0, 1);
            link(1, 2);
            link(2, 3);
        }
        Family::G => link(0, 1),
    }
    match family {
        Family::B => {
            // last simple root short
            a[r - 1][r - 2] = -2;
            d[r - 1] = 2;
        }
        Family::C => {
            // last simple root long, the others short
            a[r - 2][r - 1] = -2;
            for di in d.iter_mut().take(r - 1) {
                *di = 2;
            }
        }
        Family::F => {
            a[2][1] = -2;
            d[2] = 2;
            d[3] = 2;
        }
        Family::G => {
            a[1][0] = -3;
            d[1] = 3;
        }
        _ => {}
    }
    Ok((a, d))
}

/// Exact inverse of an integer matrix over the rationals.
pub(crate) fn rational_inverse(m: &[Vec<i64>]) -> Vec<Vec<Rational64>> {
    let n = m.len();
    let mut aug: Vec<Vec<Rational64>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational64> =
                m[i].iter().map(|&x| Rational64::from_integer(x)).collect();
            row.extend((0..n).map(|j| {
                if i == j {
                    Rational64::one()
                } else {
                    Rational64::zero()
                }
            }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&i| !aug[i][col].is_zero())
            .expect("singular matrix");
        aug.swap(col, piv);
        let p = aug[col][col];
        for x in aug[col].iter_mut() {
            *x /= p;
        }
        for i in 0..n {
            if i != col && !aug[i][col].is_zero() {
                let f = aug[i][col];
                for j in 0..2 * n {
                    let v = aug[col][j];
                    aug[i][j] -= f * v;
                }
            }
        }
    }
    aug.into_iter().map(|row| row[n..].to_vec()).collect()
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn flatten(m: &[Vec<i64>]) -> Vec<i64> {
    m.iter().flatten().copied().collect()
}

/// Builds the root system of type `family` and rank `rank`.
pub fn build_root_system(family: Family, rank: usize) -> Result<RootSystem> {
    let (cartan, sym) = cartan_matrix(family, rank)?;
    let order = classical_order(family, rank);
    if order > WEYL_ORDER_CAP {
        return Err(LabError::WeylGroupTooLarge {
            family: family.letter(),
            rank,
            order,
            cap: WEYL_ORDER_CAP,
        });
    }
    let r = rank;
    let form: Vec<Vec<i64>> = (0..r)
        .map(|i| (0..r).map(|j| cartan[i][j] * sym[j]).collect())
        .collect();
    for i in 0..r {
        for j in 0..r {
            assert_eq!(form[i][j], form[j][i], "Cartan matrix not symmetrizable");
        }
    }
    let form_inv = rational_inverse(&form);

    // positive roots by root strings
    let mut roots: Vec<Vec<i64>> = (0..r)
        .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut index: HashMap<Vec<i64>, usize> = roots
        .iter()
        .enumerate()
        .map(|(k, v)| (v.clone(), k))
        .collect();
    let mut head = 0;
    while head < roots.len() {
        let beta = roots[head].clone();
        head += 1;
        for i in 0..r {
            let pairing: i64 = (0..r).map(|j| beta[j] * cartan[i][j]).sum();
            let mut p = 0;
            let mut down = beta.clone();
            loop {
                down[i] -= 1;
                if index.contains_key(&down) {
                    p += 1;
                } else {
                    break;
                }
            }
            if p - pairing > 0 {
                let mut up = beta.clone();
                up[i] += 1;
                if !index.contains_key(&up) {
                    index.insert(up.clone(), roots.len());
                    roots.push(up);
                }
            }
        }
    }
    roots.sort_by_key(|v| {
        (
            v.iter().sum::<i64>(),
            v.iter().map(|x| -x).collect::<Vec<_>>(),
        )
    });
    let covectors: Vec<Vec<i64>> = roots
        .iter()
        .map(|beta| {
            (0..r)
                .map(|i| (0..r).map(|j| beta[j] * cartan[i][j]).sum())
                .collect()
        })
        .collect();
    let highest_root = roots.last().expect("nonempty").clone();
    let highest_coroot: Vec<i64> = highest_root
        .iter()
        .zip(&sym)
        .map(|(&c, &d)| {
            assert_eq!(c % d, 0);
            c / d
        })
        .collect();
    let dual_coxeter = 1 + highest_coroot.iter().sum::<i64>();

    // Weyl group by closure over simple reflections
    let gens: Vec<Vec<Vec<i64>>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    (0..r)
                        .map(|k| i64::from(j == k) - if j == i { cartan[k][i] } else { 0 })
                        .collect()
                })
                .collect()
        })
        .collect();
    let identity: Vec<Vec<i64>> = (0..r)
        .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut weyl = vec![identity.clone()];
    let mut weyl_index = HashMap::new();
    weyl_index.insert(flatten(&identity), 0usize);
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        for g in &gens {
            let m = mat_mul(g, &weyl[k]);
            let key = flatten(&m);
            if let std::collections::hash_map::Entry::Vacant(e) = weyl_index.entry(key) {
                e.insert(weyl.len());
                queue.push_back(weyl.len());
                weyl.push(m);
            }
        }
    }
    assert_eq!(weyl.len() as u64, order, "Weyl group order mismatch");

    Ok(RootSystem {
        family,
        rank,
        cartan,
        sym,
        form,
        form_inv,
        positive_roots: roots,
        positive_covectors: covectors,
        highest_root,
        highest_coroot,
        dual_coxeter,
        weyl,
        weyl_index,
    })
}

/// Serializable snapshot of a root system.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RootSystemJson {
    pub family: Family,
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    pub form: Vec<Vec<i64>>,
    pub positive_roots: Vec<Vec<i64>>,
    pub highest_coroot: Vec<i64>,
    pub dual_coxeter: i64,
    pub weyl: Vec<Vec<Vec<i64>>>,
}

impl RootSystem {
    pub fn weyl_order(&self) -> usize {
        self.weyl.len()
    }

    /// Index of a matrix in the Weyl list, if it is an element.
    pub fn weyl_position(&self, m: &[Vec<i64>]) -> Option<usize> {
        self.weyl_index.get(&flatten(m)).copied()
    }

    pub fn compose(&self, a: usize, b: usize) -> usize {
        let m = mat_mul(&self.weyl[a], &self.weyl[b]);
        self.weyl_position(&m).expect("closure")
    }

    /// Inverse through form invariance: `σ⁻¹ = C⁻¹ σᵀ C`.
    pub fn inverse(&self, a: usize) -> usize {
        let r = self.rank;
        let s = &self.weyl[a];
        let m: Vec<Vec<i64>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        let mut acc = Rational64::zero();
                        for k in 0..r {
                            for l in 0..r {
                                acc += self.form_inv[i][k]
                                    * Rational64::from_integer(s[l][k] * self.form[l][j]);
                            }
                        }
                        assert!(acc.is_integer());
                        acc.to_integer()
                    })
                    .collect()
            })
            .collect();
        self.weyl_position(&m).expect("inverse exists")
    }

    /// Determinant sign of a Weyl element.
    pub fn sign(&self, a: usize) -> i64 {
        let m: Vec<Vec<Rational64>> = self.weyl[a]
            .iter()
            .map(|row| row.iter().map(|&x| Rational64::from_integer(x)).collect())
            .collect();
        let det = rational_det(m);
        if det > Rational64::zero() {
            1
        } else {
            -1
        }
    }

    /// `⟨x, y⟩` for coroot-coordinate vectors.
    pub fn pair(&self, x: &[f64], y: &[f64]) -> f64 {
        let r = self.rank;
        let mut s = 0.0;
        for i in 0..r {
            for j in 0..r {
                s += x[i] * self.form[i][j] as f64 * y[j];
            }
        }
        s
    }

    /// Applies Weyl element `a` to a real coroot-coordinate vector.
    pub fn act(&self, a: usize, x: &[f64]) -> Vec<f64> {
        self.weyl[a]
            .iter()
            .map(|row| row.iter().zip(x).map(|(&m, &v)| m as f64 * v).sum())
            .collect()
    }

    pub fn act_int(&self, a: usize, x: &[i64]) -> Vec<i64> {
        self.weyl[a]
            .iter()
            .map(|row| row.iter().zip(x).map(|(&m, &v)| m * v).sum())
            .collect()
    }

    /// Action on covectors given by their values on the coroots:
    /// `(σλ)(x) = λ(σ⁻¹x)`.
    pub fn act_covector(&self, a: usize, lam: &[i64]) -> Vec<i64> {
        let inv = &self.weyl[self.inverse(a)];
        let r = self.rank;
        (0..r)
            .map(|j| (0..r).map(|k| lam[k] * inv[k][j]).sum())
            .collect()
    }

    /// Comarks: coefficients of θ∨ over the simple coroots.
    pub fn comarks(&self) -> &[i64] {
        &self.highest_coroot
    }

    /// Weyl vector ρ in the fundamental basis (all ones).
    pub fn rho(&self) -> Vec<i64> {
        vec![1; self.rank]
    }

    /// Form on covectors, `λᵀ C⁻¹ μ`, exactly.
    pub fn covector_pair(&self, lam: &[Rational64], mu: &[Rational64]) -> Rational64 {
        let r = self.rank;
        let mut s = Rational64::zero();
        for i in 0..r {
            for j in 0..r {
                s += lam[i] * self.form_inv[i][j] * mu[j];
            }
        }
        s
    }

    /// All roots as covectors, positive first then negative.
    pub fn all_root_covectors(&self) -> Vec<Vec<i64>> {
        let mut v = self.positive_covectors.clone();
        v.extend(
            self.positive_covectors
                .iter()
                .map(|c| c.iter().map(|x| -x).collect::<Vec<_>>()),
        );
        v
    }

    pub fn determinant(&self) -> i64 {
        let m: Vec<Vec<Rational64>> = self
            .form
            .iter()
            .map(|row| row.iter().map(|&x| Rational64::from_integer(x)).collect())
            .collect();
        rational_det(m).to_integer()
    }

    pub fn to_json(&self) -> RootSystemJson {
        RootSystemJson {
            family: self.family,
            rank: self.rank,
            cartan: self.cartan.clone(),
            form: self.form.clone(),
            positive_roots: self.positive_roots.clone(),
            highest_coroot: self.highest_coroot.clone(),
            dual_coxeter: self.dual_coxeter,
            weyl: self.weyl.clone(),
        }
    }
}

fn rational_det(mut m: Vec<Vec<Rational64>>) -> Rational64 {
    let n = m.len();
    let mut det = Rational64::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return Rational64::zero();
        };
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for i in col + 1..n {
            let f = m[i][col] / p;
            for j in col..n {
                let v = m[col][j];
                m[i][j] -= f * v;
            }
        }
    }
    det
}

use num_complex::Complex64;
use num_rational::Rational64;

use super::{norm_weight, ThetaBasis};
use crate::error::{LabError, Result};
use crate::liealg::{RootSystem, Weight};

/// Weyl-antisymmetrized normalized theta series `Σ_σ sgn(σ) θ_{σμ,K}·√w_K`.
fn antisymmetrized(basis: &ThetaBasis, mu: &[i64], z: &[Complex64]) -> Complex64 {
    let rs = &basis.rs;
    (0..rs.weyl_order())
        .map(|s| basis.normalized_for_weight(&rs.act_covector(s, mu), z) * rs.sign(s) as f64)
        .sum()
}

/// Kac–Weyl character `A_{λ+ρ,k+h∨}(z) / A_{ρ,h∨}(z)`.
pub fn kac_weyl_character(
    rs: &RootSystem,
    lambda: &Weight,
    k: u32,
    tau: Complex64,
    z: &[Complex64],
) -> Result<Complex64> {
    let lam = lambda
        .to_ints()
        .ok_or(LabError::NotLevelWeight { level: k })?;
    let level: i64 = lam.iter().zip(rs.comarks()).map(|(a, b)| a * b).sum();
    if lam.iter().any(|&x| x < 0) || level > i64::from(k) {
        return Err(LabError::NotLevelWeight { level: k });
    }
    let hv = rs.dual_coxeter as u32;
    let eps = 1e-15;
    let num_basis = ThetaBasis::new(rs, k + hv, tau, eps)?;
    let den_basis = ThetaBasis::new(rs, hv, tau, eps)?;
    let rho = rs.rho();
    let shifted: Vec<i64> = lam.iter().zip(&rho).map(|(a, b)| a + b).collect();
    let num = antisymmetrized(&num_basis, &shifted, z);
    let den = antisymmetrized(&den_basis, &rho, z);
    if den.norm() < 1e-12 {
        return Err(LabError::SingularPoint(den.norm()));
    }
    Ok(num / den / norm_weight(rs, k, tau, z).sqrt())
}

/// Exponent `m_λ = |λ+ρ|²/(2(k+h∨)) − |ρ|²/(2h∨)` of the leading power of
/// `q = e^{2πiτ}`.
pub fn leading_exponent(rs: &RootSystem, lambda: &Weight, k: u32) -> Rational64 {
    let rho: Vec<Rational64> = rs.rho().iter().map(|&x| x.into()).collect();
    let lr: Vec<Rational64> = lambda.coeffs.iter().zip(&rho).map(|(a, b)| a + b).collect();
    let hv = Rational64::from_integer(rs.dual_coxeter);
    let kk = Rational64::from_integer(i64::from(k));
    let two = Rational64::from_integer(2);
    rs.covector_pair(&lr, &lr) / (two * (kk + hv)) - rs.covector_pair(&rho, &rho) / (two * hv)
}

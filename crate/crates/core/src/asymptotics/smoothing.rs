//! Regularised curvature `κ̄_ε` solving `−ε²C_ε κ̄'' + κ̄ = κ` on the periodic
//! parameter circle.

use serde::{Deserialize, Serialize};

use super::profile::TrialProfile;
use crate::curve::{Curve, CurveKind};
use crate::error::{Error, Result};
use crate::mapped::check_regular;
use crate::numerics::tridiag::cyclic_thomas;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothedCurvature {
    /// `κ̄_ε` at `s_i = i / N`.
    pub kappa_bar: Vec<f64>,
    /// `C̃_ε(s_i)`.
    pub c_tilde: Vec<f64>,
    /// `C_ε = max_s C̃_ε(s)`.
    pub c_eps: f64,
    pub eps: f64,
    /// Largest residual of the discrete equation.
    pub residual: f64,
}

/// `C̃_ε(s) = B⁻¹ ℓ⁻² ∫ ζ² / (1 − εtκ(s)) dt`.
pub fn c_tilde(profile: &TrialProfile, ell: f64, eps: f64, kappa: f64) -> f64 {
    profile.integrate(|t, z, _| z * z / (1.0 - eps * t * kappa)) / (profile.b * ell * ell)
}

/// Solves `−a u'' + u = f` on `N` periodic nodes of spacing `1/N` with the
/// fourth-order compact stencil `(−aδ² + 1 + h²δ²/12) u = (1 + h²δ²/12) f`.
/// Constants are fixed points and the mean is preserved exactly.
pub fn solve_screened(f: &[f64], a: f64) -> Result<(Vec<f64>, f64)> {
    let n = f.len();
    if n < 3 {
        return Err(Error::TooFewPoints { got: n, need: 3 });
    }
    if !(a >= 0.0) {
        return Err(Error::InvalidArgument(format!("screening coefficient {a}")));
    }
    let h = 1.0 / n as f64;
    let off = -a / (h * h) + 1.0 / 12.0;
    let diag = 2.0 * a / (h * h) + 1.0 - 2.0 / 12.0;
    // solve for u − f₀ so constant input is reproduced bit for bit
    let shift = f[0];
    let g: Vec<f64> = f.iter().map(|v| v - shift).collect();
    let rhs: Vec<f64> = (0..n)
        .map(|i| g[i] + (g[(i + 1) % n] - 2.0 * g[i] + g[(i + n - 1) % n]) / 12.0)
        .collect();
    let mut u = cyclic_thomas(&vec![off; n], &vec![diag; n], &vec![off; n], &rhs)?;
    let scale = rhs.iter().chain(f).fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let residual = (0..n)
        .map(|i| (off * (u[(i + 1) % n] + u[(i + n - 1) % n]) + diag * u[i] - rhs[i]).abs())
        .fold(0.0, f64::max)
        / scale;
    for v in &mut u {
        *v += shift;
    }
    Ok((u, residual))
}

/// `κ̄_ε` at the curve samples.
pub fn smooth_curvature(curve: &Curve, eps: f64, profile: &TrialProfile) -> Result<SmoothedCurvature> {
    let kappa = curve.curvatures();
    smooth_curvature_values(curve, eps, profile, &kappa)
}

/// `κ̄_ε` for curvature values given on `N` uniform periodic nodes.
pub fn smooth_curvature_values(
    curve: &Curve,
    eps: f64,
    profile: &TrialProfile,
    kappa: &[f64],
) -> Result<SmoothedCurvature> {
    if curve.kind() != CurveKind::Closed {
        return Err(Error::InvalidArgument("κ̄ needs a closed curve".into()));
    }
    check_regular(curve, eps)?;
    let ell = curve.length();
    let c_tilde: Vec<f64> = kappa.iter().map(|&k| c_tilde(profile, ell, eps, k)).collect();
    let c_eps = c_tilde.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (kappa_bar, residual) = solve_screened(kappa, eps * eps * c_eps)?;
    if residual > 1e-10 {
        return Err(Error::NoConvergence { iterations: 1, residual });
    }
    Ok(SmoothedCurvature { kappa_bar, c_tilde, c_eps, eps, residual })
}

#[cfg(test)]
mod tests {
    use super::super::profile::{zeta_profile, ProfileKind};
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constants_are_fixed_points() {
        let (u, _) = solve_screened(&[0.7; 50], 0.3).unwrap();
        assert!(u.iter().all(|&v| v == 0.7));
    }

    #[test]
    fn fourier_modes_are_damped() {
        let n = 512;
        let a = 2e-4;
        for k in [1, 3] {
            let f: Vec<f64> = (0..n).map(|i| (2.0 * PI * k as f64 * i as f64 / n as f64).cos()).collect();
            let (u, _) = solve_screened(&f, a).unwrap();
            let damp = 1.0 / (1.0 + a * 4.0 * PI * PI * (k * k) as f64);
            for (ui, fi) in u.iter().zip(&f) {
                assert!((ui - damp * fi).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn flat_limit_constant() {
        let p = zeta_profile(ProfileKind::Exact).unwrap();
        assert!((c_tilde(&p, 1.0, 0.1, 0.0) - 2.0 / 21.0).abs() < 1e-14);
    }
}

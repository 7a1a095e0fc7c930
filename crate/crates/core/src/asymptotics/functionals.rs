//! The rescaled norm functional `G_ε`, the curvature functional `G₀`, and
//! the bulk-plus-caps evaluation for straight-ended open curves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{elastica_energy, Curve, Radius};
use crate::end_cap::alpha_constant;
use crate::error::{Error, Result};
use crate::mapped::{solve_bulk_open, solve_closed, ParamGrid};
use crate::system::{has_transverse_crossing, system_metrics, CurveSystem};

/// `G_ε = ε⁻⁵‖1‖² − (2/3)ε⁻²ℓ(Γ)`, or `+∞` when `ρ(Γ) < ε` or the system has
/// a transverse crossing. Tubes are then disjoint and the norm is summed
/// over the members.
pub fn g_eps(system: &CurveSystem, eps: f64) -> Result<f64> {
    g_eps_with(system, eps, ParamGrid::default_size(eps))
}

pub fn g_eps_with(system: &CurveSystem, eps: f64, grid: (usize, usize)) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("ε = {eps}")));
    }
    let metrics = match system_metrics(system) {
        Ok(m) => m,
        Err(Error::SelfIntersecting { .. }) => return Ok(f64::INFINITY),
        Err(e) => return Err(e),
    };
    if let Radius::Finite(r) = metrics.rho {
        if r < eps {
            return Ok(f64::INFINITY);
        }
    }
    if has_transverse_crossing(system) {
        return Ok(f64::INFINITY);
    }
    let norms = system
        .curves()
        .par_iter()
        .map(|c| solve_closed(c, eps, grid).map(|(_, r)| r.norm_sq))
        .collect::<Result<Vec<f64>>>()?;
    let norm: f64 = norms.iter().sum();
    Ok(norm / eps.powi(5) - 2.0 / 3.0 * metrics.length / (eps * eps))
}

/// `G₀ = (2/45) Σ ℓ(γ_i) ∫_{γ_i} κ²`, or `+∞` with a transverse crossing.
pub fn g_zero(system: &CurveSystem) -> f64 {
    if has_transverse_crossing(system) {
        return f64::INFINITY;
    }
    2.0 / 45.0 * system.curves().iter().map(|c| c.length() * elastica_energy(c)).sum::<f64>()
}

/// `(2/45) Σ ∫_{γ_i} κ²`, the `ε⁵` coefficient of the closed-curve expansion.
pub fn g_zero_line(system: &CurveSystem) -> f64 {
    if has_transverse_crossing(system) {
        return f64::INFINITY;
    }
    2.0 / 45.0 * system.curves().iter().map(elastica_energy).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpenNorm {
    pub eps: f64,
    /// Bulk contribution over `s ∈ (η, 1 − η)`.
    pub bulk: f64,
    /// Contribution of one cap, `ε⁴((2/3)L + 3π/16 + ∫ψ_L)`.
    pub cap: f64,
    /// Truncation length `L = ηℓ/ε`.
    pub l: f64,
    /// `3π/16 + ∫ψ_L`, Richardson-extrapolated.
    pub alpha_l: f64,
    pub total: f64,
}

/// `‖1‖²` of the tube around a straight-ended open curve as the bulk solve
/// plus two end caps, each solved at its own truncation length.
pub fn open_curve_norm(curve: &Curve, eps: f64, grid: (usize, usize), cap_h: f64) -> Result<OpenNorm> {
    let eta = curve.eta().ok_or(Error::MissingEta)?;
    let l = eta * curve.length() / eps;
    let (bulk, cap) = rayon::join(|| solve_bulk_open(curve, eps, grid), || alpha_constant(cap_h, l));
    let (_, bulk) = bulk?;
    let alpha_l = cap?.alpha;
    let cap = eps.powi(4) * (2.0 / 3.0 * l + alpha_l);
    Ok(OpenNorm { eps, bulk: bulk.integral, cap, l, alpha_l, total: bulk.integral + 2.0 * cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::generators::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_g_zero_normalisations() {
        let sys = CurveSystem::single(circle(1.0, 512).unwrap()).unwrap();
        assert!((g_zero(&sys) - 8.0 * PI * PI / 45.0).abs() < 1e-6);
        assert!((g_zero_line(&sys) - 4.0 * PI / 45.0).abs() < 1e-6);
    }

    #[test]
    fn thin_system_is_infinite() {
        let a = circle_at([0.0, 0.0], 1.0, 256, 0.0).unwrap();
        let b = circle_at([2.1, 0.0], 1.0, 256, 0.0).unwrap();
        let sys = CurveSystem::new(vec![a, b]).unwrap();
        assert_eq!(g_eps_with(&sys, 0.1, (64, 17)).unwrap(), f64::INFINITY);
    }
}

//! Explicit trial fields for the variational characterisation.

use serde::{Deserialize, Serialize};

use super::profile::TrialProfile;
use super::smoothing::smooth_curvature_values;
use crate::curve::Curve;
use crate::error::Result;
use crate::mapped::{xeps_evaluate, MappedField, ParamGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    /// Discrete `𝒳_ε` of the assembled trial field.
    pub value: f64,
    /// `(2/3)ε³ℓ + Bε⁵ℓ∫(2κκ̄ − κ̄² − ε²C̃κ̄'²)`, the exact value of the
    /// trial field, by the trapezoidal rule in `s`.
    pub closed_form: f64,
    /// `(2/3)ε³ℓ + Bε⁵ℓ∫(κ̄² + ε²C_εκ̄'²)`.
    pub reduced_bound: f64,
    pub c_eps: f64,
}

/// Field `(ε²/2)(1 − t²) + ε³κ̄(s)ζ(t)` on a closed grid, with its discrete
/// `𝒳_ε` and the corresponding closed forms.
pub fn trial_lower_bound(
    curve: &Curve,
    eps: f64,
    profile: &TrialProfile,
    grid: (usize, usize),
) -> Result<LowerBound> {
    let pg = ParamGrid::closed(grid.0, grid.1)?;
    let kappa: Vec<f64> = (0..pg.ns).map(|i| curve.curvature_at(pg.s(i))).collect();
    let sm = smooth_curvature_values(curve, eps, profile, &kappa)?;
    let eps2 = eps * eps;
    let eps3 = eps2 * eps;
    let mut values = Vec::with_capacity(pg.node_count());
    for kb in &sm.kappa_bar {
        for j in 0..pg.nt {
            let t = pg.t(j);
            values.push(0.5 * eps2 * (1.0 - t * t) + eps3 * kb * profile.zeta(t));
        }
    }
    let field = MappedField { grid: pg, values };
    let value = xeps_evaluate(curve, eps, &field)?;

    let n = pg.ns;
    let h = pg.hs();
    let kb = &sm.kappa_bar;
    let (mut exact, mut reduced) = (0.0, 0.0);
    for i in 0..n {
        let d = (kb[(i + 1) % n] - kb[(i + n - 1) % n]) / (2.0 * h);
        exact += 2.0 * kappa[i] * kb[i] - kb[i] * kb[i] - eps2 * sm.c_tilde[i] * d * d;
        reduced += kb[i] * kb[i] + eps2 * sm.c_eps * d * d;
    }
    let ell = curve.length();
    let lead = 2.0 / 3.0 * eps3 * ell;
    let scale = profile.b * eps3 * eps2 * ell / n as f64;
    Ok(LowerBound {
        value,
        closed_form: lead + scale * exact,
        reduced_bound: lead + scale * reduced,
        c_eps: sm.c_eps,
    })
}

/// `(ε²/2)(1 − t²) + (ε³/6)κt(1 − t²) + (ε⁴/24)κ²(−3t⁴ + 2t² + 1)`.
pub fn upper_profile_value(eps: f64, kappa: f64, t: f64) -> f64 {
    let e2 = eps * eps;
    let q = 1.0 - t * t;
    0.5 * e2 * q + e2 * eps / 6.0 * kappa * t * q + e2 * e2 / 24.0 * kappa * kappa * (-3.0 * t.powi(4) + 2.0 * t * t + 1.0)
}

/// The upper trial profile sampled on `grid`.
pub fn trial_upper_profile(curve: &Curve, eps: f64, grid: ParamGrid) -> MappedField {
    let mut f = MappedField::from_fn(grid, |s, t| upper_profile_value(eps, curve.curvature_at(s), t));
    // each factor vanishes at t = ±1; pin the rows against rounding
    let nt = grid.nt;
    for i in 0..grid.columns() {
        f.values[i * nt] = 0.0;
        f.values[i * nt + nt - 1] = 0.0;
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_profile_centre_value() {
        let eps: f64 = 0.1;
        let v = upper_profile_value(eps, 1.0, 0.0);
        assert!((v - (0.005 + eps.powi(4) / 24.0)).abs() < 1e-18);
        assert_eq!(upper_profile_value(eps, 3.0, 1.0), 0.0);
        assert_eq!(upper_profile_value(eps, 0.0, 0.5), 0.5 * eps * eps * 0.75);
    }
}

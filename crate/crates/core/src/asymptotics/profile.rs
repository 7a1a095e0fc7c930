//! Odd transverse profiles `ζ` with `∫ζ'² = ∫tζ = B`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quadrature::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ProfileKind {
    /// `ζ̃(t) = t(1 − t²)/6`.
    Exact,
    /// `c · ζ̃(t) · χ(t)` with a smooth cutoff vanishing on `|t| ≥ 1 − δ`.
    Mollified { delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialProfile {
    pub kind: ProfileKind,
    /// `B = ∫ζ'² = ∫tζ`.
    pub b: f64,
    /// ζ vanishes on `[1 − δ, 1]` (zero for the exact profile).
    pub support_margin: f64,
    /// Rescaling factor applied to `ζ̃χ`.
    scale: f64,
}

fn smootherstep(x: f64) -> (f64, f64) {
    let x = x.clamp(0.0, 1.0);
    (x * x * x * (x * (6.0 * x - 15.0) + 10.0), 30.0 * x * x * (x - 1.0) * (x - 1.0))
}

impl TrialProfile {
    /// `(χ, χ')` at `t`.
    fn cutoff(&self, t: f64) -> (f64, f64) {
        match self.kind {
            ProfileKind::Exact => (1.0, 0.0),
            ProfileKind::Mollified { delta } => {
                let a = t.abs();
                let (s, ds) = smootherstep((a - (1.0 - 2.0 * delta)) / delta);
                (1.0 - s, -ds / delta * t.signum())
            }
        }
    }

    pub fn zeta(&self, t: f64) -> f64 {
        self.scale * t * (1.0 - t * t) / 6.0 * self.cutoff(t).0
    }

    pub fn dzeta(&self, t: f64) -> f64 {
        let (c, dc) = self.cutoff(t);
        self.scale * ((1.0 - 3.0 * t * t) / 6.0 * c + t * (1.0 - t * t) / 6.0 * dc)
    }

    /// Breakpoints in `[−1, 1]` between which ζ is polynomial.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            ProfileKind::Exact => vec![-1.0, 1.0],
            ProfileKind::Mollified { delta } => {
                let (a, b) = (1.0 - 2.0 * delta, 1.0 - delta);
                vec![-1.0, -b, -a, a, b, 1.0]
            }
        }
    }

    /// `∫ g(t, ζ, ζ') dt` over `[−1, 1]`, exact for polynomial integrands of
    /// degree below 32 on each piece.
    pub fn integrate<F: Fn(f64, f64, f64) -> f64>(&self, g: F) -> f64 {
        let gl = GaussLegendre::new(16);
        gl.integrate_pieces(&self.breakpoints(), |t| g(t, self.zeta(t), self.dzeta(t)))
    }

    pub fn grad_sq(&self) -> f64 {
        self.integrate(|_, _, dz| dz * dz)
    }

    pub fn moment(&self) -> f64 {
        self.integrate(|t, z, _| t * z)
    }

    pub fn l2_sq(&self) -> f64 {
        self.integrate(|_, z, _| z * z)
    }
}

pub fn zeta_profile(kind: ProfileKind) -> Result<TrialProfile> {
    match kind {
        ProfileKind::Exact => Ok(TrialProfile { kind, b: 2.0 / 45.0, support_margin: 0.0, scale: 1.0 }),
        ProfileKind::Mollified { delta } => {
            if !(delta > 0.0 && delta <= 0.2) {
                return Err(Error::InvalidArgument(format!("mollifier width δ = {delta} outside (0, 0.2]")));
            }
            let raw = TrialProfile { kind, b: 0.0, support_margin: delta, scale: 1.0 };
            let (p, q) = (raw.grad_sq(), raw.moment());
            // c²P = cQ fixes c = Q/P and B = Q²/P
            let scale = q / p;
            Ok(TrialProfile { kind, b: q * q / p, support_margin: delta, scale })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_profile_constants() {
        let p = zeta_profile(ProfileKind::Exact).unwrap();
        assert!((p.grad_sq() - 2.0 / 45.0).abs() < 1e-15);
        assert!((p.moment() - 2.0 / 45.0).abs() < 1e-15);
        assert!((p.l2_sq() - 4.0 / 945.0).abs() < 1e-15);
        assert_eq!(p.zeta(1.0), 0.0);
        assert_eq!(p.zeta(-0.3), -p.zeta(0.3));
    }

    #[test]
    fn mollified_profile_is_compactly_supported() {
        let p = zeta_profile(ProfileKind::Mollified { delta: 0.05 }).unwrap();
        assert!((p.grad_sq() - p.moment()).abs() < 1e-10);
        assert!((p.b - p.grad_sq()).abs() < 1e-12);
        assert!((p.b - 2.0 / 45.0).abs() <= 5.0 * 0.05);
        assert_eq!(p.zeta(0.96), 0.0);
        assert!((p.zeta(0.4) + p.zeta(-0.4)).abs() < 1e-16);
        assert!(zeta_profile(ProfileKind::Mollified { delta: 0.3 }).is_err());
    }
}

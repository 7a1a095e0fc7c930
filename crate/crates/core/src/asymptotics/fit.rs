//! Weighted least-squares fits of the small-ε development.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted condition number of the column-scaled design.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `ε³` term subtracted, basis `{ε⁵, ε⁶}`.
    Closed,
    /// `ε³` term subtracted, basis `{ε⁴, ε⁵, ε⁶}`.
    Open,
    /// Basis `{ε³, ε⁵, ε⁶}` with the leading coefficient free.
    ClosedFreeLeading,
    /// Basis `{ε³, ε⁴, ε⁵, ε⁶}` with the leading coefficient free.
    OpenFreeLeading,
}

impl FitModel {
    pub fn powers(self) -> &'static [i32] {
        match self {
            FitModel::Closed => &[5, 6],
            FitModel::Open => &[4, 5, 6],
            FitModel::ClosedFreeLeading => &[3, 5, 6],
            FitModel::OpenFreeLeading => &[3, 4, 5, 6],
        }
    }

    fn subtracts_leading(self) -> bool {
        matches!(self, FitModel::Closed | FitModel::Open)
    }

    /// Power of the weight `ε^{-p}`.
    fn weight_power(self) -> i32 {
        if self.subtracts_leading() {
            5
        } else {
            3
        }
    }
}

/// Geometric data of the curve behind the records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub length: f64,
    /// `∫_γ κ²`.
    pub elastica: f64,
    /// End-cap constant, for open curves.
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub power: i32,
    pub coefficient: f64,
    pub std_error: f64,
    pub target: Option<f64>,
    pub relative_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFit {
    pub model: FitModel,
    pub records: Vec<(f64, f64)>,
    pub meta: CurveMeta,
    pub terms: Vec<Term>,
    pub condition: f64,
    /// Largest unweighted fit residual.
    pub max_residual: f64,
    /// Smallest retained term `|c_k ε^k|` at the smallest ε.
    pub smallest_term: f64,
}

impl ExpansionFit {
    pub fn coefficient(&self, power: i32) -> Option<f64> {
        self.terms.iter().find(|t| t.power == power).map(|t| t.coefficient)
    }

    pub fn term(&self, power: i32) -> Option<&Term> {
        self.terms.iter().find(|t| t.power == power)
    }

    /// Fit residual within ten times the smallest retained term.
    pub fn residual_ok(&self) -> bool {
        self.max_residual <= 10.0 * self.smallest_term
    }

    /// `norm_sq − (2/3)ε³ℓ` for every record.
    pub fn excess(&self) -> Vec<(f64, f64)> {
        self.records
            .iter()
            .map(|&(e, v)| (e, v - 2.0 / 3.0 * e.powi(3) * self.meta.length))
            .collect()
    }
}

fn target(power: i32, meta: &CurveMeta) -> Option<f64> {
    match power {
        3 => Some(2.0 / 3.0 * meta.length),
        4 => meta.alpha.map(|a| 2.0 * a),
        5 => Some(2.0 / 45.0 * meta.elastica),
        6 => None,
        _ => None,
    }
}

pub fn fit_expansion(records: &[(f64, f64)], meta: CurveMeta, model: FitModel) -> Result<ExpansionFit> {
    let mut eps: Vec<f64> = records.iter().map(|r| r.0).collect();
    if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) || records.iter().any(|r| !r.1.is_finite()) {
        return Err(Error::InvalidArgument("records need positive finite ε and finite values".into()));
    }
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    if eps.len() < 5 {
        return Err(Error::InvalidArgument(format!("{} distinct ε values, need at least 5", eps.len())));
    }
    let span = eps[eps.len() - 1] / eps[0];
    if span < 4.0 - 1e-12 {
        return Err(Error::InvalidArgument(format!("ε values span a factor {span:.3}, need at least 4")));
    }
    let powers = model.powers();
    let (n, p) = (records.len(), powers.len());
    let lead = |e: f64| if model.subtracts_leading() { 2.0 / 3.0 * meta.length * e.powi(3) } else { 0.0 };

    let mut a = DMatrix::<f64>::zeros(n, p);
    let mut y = DVector::<f64>::zeros(n);
    for (i, &(e, v)) in records.iter().enumerate() {
        let w = e.powi(-model.weight_power());
        for (j, &k) in powers.iter().enumerate() {
            a[(i, j)] = w * e.powi(k);
        }
        y[i] = w * (v - lead(e));
    }
    let scale: Vec<f64> = (0..p).map(|j| a.column(j).norm()).collect();
    for (j, s) in scale.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned(condition));
    }
    let z = svd.solve(&y, 0.0).map_err(|e| Error::SingularSystem(e.to_string()))?;
    let resid = &y - &a * &z;
    let dof = n.saturating_sub(p);
    let sigma2 = if dof > 0 { resid.norm_squared() / dof as f64 } else { 0.0 };
    let v = svd.v_t.as_ref().expect("requested V").transpose();
    let mut terms = Vec::with_capacity(p);
    for (j, &k) in powers.iter().enumerate() {
        let var: f64 = (0..p).map(|m| (v[(j, m)] / svd.singular_values[m]).powi(2)).sum::<f64>() * sigma2;
        let coefficient = z[j] / scale[j];
        let tgt = target(k, &meta);
        terms.push(Term {
            power: k,
            coefficient,
            std_error: var.sqrt() / scale[j],
            target: tgt,
            relative_gap: tgt.filter(|t| *t != 0.0).map(|t| (coefficient - t) / t),
        });
    }
    let max_residual = records
        .iter()
        .map(|&(e, v)| {
            let model_v: f64 = lead(e) + terms.iter().map(|t| t.coefficient * e.powi(t.power)).sum::<f64>();
            (v - model_v).abs()
        })
        .fold(0.0, f64::max);
    let smallest_term = terms
        .iter()
        .map(|t| (t.coefficient * eps[0].powi(t.power)).abs())
        .fold(f64::INFINITY, f64::min);
    Ok(ExpansionFit {
        model,
        records: records.to_vec(),
        meta,
        terms,
        condition,
        max_residual,
        smallest_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> CurveMeta {
        CurveMeta { length: 1.0, elastica: 40.0, alpha: Some(0.14) }
    }

    #[test]
    fn leading_term_only_gives_zero_coefficients() {
        let recs: Vec<(f64, f64)> = (0..6)
            .map(|k| {
                let e = 0.01 * 1.5f64.powi(k);
                (e, 2.0 / 3.0 * e.powi(3))
            })
            .collect();
        let f = fit_expansion(&recs, meta(), FitModel::Open).unwrap();
        for t in &f.terms {
            assert!(t.coefficient.abs() < 1e-12, "{t:?}");
        }
    }

    #[test]
    fn synthetic_polynomial_is_recovered() {
        let recs: Vec<(f64, f64)> = (0..7)
            .map(|k| {
                let e = 0.01 * 1.4f64.powi(k);
                (e, 2.0 / 3.0 * e.powi(3) + 0.28 * e.powi(4) + 1.7 * e.powi(5) - 3.0 * e.powi(6))
            })
            .collect();
        let f = fit_expansion(&recs, meta(), FitModel::Open).unwrap();
        assert!((f.coefficient(4).unwrap() - 0.28).abs() < 1e-9);
        assert!((f.coefficient(5).unwrap() - 1.7).abs() < 1e-7);
        let g = fit_expansion(&recs, meta(), FitModel::OpenFreeLeading).unwrap();
        assert!((g.coefficient(3).unwrap() - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn narrow_or_short_schedules_are_rejected() {
        let recs: Vec<(f64, f64)> = (0..5).map(|k| (0.01 + 0.001 * k as f64, 1.0)).collect();
        assert!(fit_expansion(&recs, meta(), FitModel::Closed).is_err());
        assert!(fit_expansion(&recs[..3], meta(), FitModel::Closed).is_err());
    }
}

//! Tridiagonal and cyclic tridiagonal solvers.
//!
//! The cyclic variant reduces the periodic system to two ordinary Thomas
//! solves through a rank-one (Sherman-Morrison) correction.

use crate::error::{Error, Result};

/// Solves `a[i] x[i-1] + b[i] x[i] + c[i] x[i+1] = d[i]` with `a[0]` and
/// `c[n-1]` ignored.
pub fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n || c.len() != n || d.len() != n {
        return Err(Error::InvalidArgument("tridiagonal band lengths differ".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut beta = b[0];
    if beta == 0.0 {
        return Err(Error::SingularSystem("zero pivot in Thomas sweep".into()));
    }
    cp[0] = c[0] / beta;
    dp[0] = d[0] / beta;
    for i in 1..n {
        beta = b[i] - a[i] * cp[i - 1];
        if beta == 0.0 {
            return Err(Error::SingularSystem("zero pivot in Thomas sweep".into()));
        }
        cp[i] = c[i] / beta;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / beta;
    }
    let mut x = dp;
    for i in (0..n - 1).rev() {
        x[i] -= cp[i] * x[i + 1];
    }
    Ok(x)
}

/// Solves the periodic system where `a[0]` couples row 0 to `x[n-1]` and
/// `c[n-1]` couples row `n-1` to `x[0]`.
pub fn cyclic_thomas(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n || c.len() != n || d.len() != n {
        return Err(Error::InvalidArgument("tridiagonal band lengths differ".into()));
    }
    match n {
        0 => return Ok(Vec::new()),
        1 => {
            let diag = a[0] + b[0] + c[0];
            if diag == 0.0 {
                return Err(Error::SingularSystem("1x1 cyclic system".into()));
            }
            return Ok(vec![d[0] / diag]);
        }
        2 => {
            // both off-diagonal couplings land on the same entry
            let (m00, m01) = (b[0], a[0] + c[0]);
            let (m10, m11) = (a[1] + c[1], b[1]);
            let det = m00 * m11 - m01 * m10;
            if det == 0.0 {
                return Err(Error::SingularSystem("2x2 cyclic system".into()));
            }
            return Ok(vec![(d[0] * m11 - m01 * d[1]) / det, (m00 * d[1] - m10 * d[0]) / det]);
        }
        _ => {}
    }
    let alpha = c[n - 1];
    let beta = a[0];
    let gamma = -b[0];
    let mut bb = b.to_vec();
    bb[0] = b[0] - gamma;
    bb[n - 1] = b[n - 1] - alpha * beta / gamma;
    let x = thomas(a, &bb, c, d)?;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = thomas(a, &bb, c, &u)?;
    let denom = 1.0 + z[0] + beta * z[n - 1] / gamma;
    if denom == 0.0 {
        return Err(Error::SingularSystem("Sherman-Morrison denominator vanished".into()));
    }
    let fact = (x[0] + beta * x[n - 1] / gamma) / denom;
    Ok(x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect())
}

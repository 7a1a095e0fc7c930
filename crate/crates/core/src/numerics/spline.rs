//! Scalar cubic splines on a strictly increasing knot sequence.

use super::tridiag::{cyclic_thomas, thomas};
use crate::error::{Error, Result};

/// End condition for a cubic spline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplineEnds {
    /// Periodic with the given period; `values` hold one period without a
    /// duplicated endpoint.
    Periodic { period: f64 },
    /// First derivative prescribed at both ends.
    Clamped { start: f64, end: f64 },
}

/// Cubic spline stored by knot values and second derivatives.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
    periodic: Option<f64>,
}

impl CubicSpline {
    pub fn new(knots: &[f64], values: &[f64], ends: SplineEnds) -> Result<Self> {
        let n = knots.len();
        if n != values.len() {
            return Err(Error::InvalidArgument("knot/value length mismatch".into()));
        }
        if n < 3 {
            return Err(Error::TooFewPoints { got: n, need: 3 });
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::DegenerateInput("spline knots not strictly increasing".into()));
        }
        match ends {
            SplineEnds::Periodic { period } => {
                if knots[n - 1] - knots[0] >= period {
                    return Err(Error::DegenerateInput("period shorter than knot span".into()));
                }
                let h: Vec<f64> = (0..n)
                    .map(|i| {
                        if i + 1 < n {
                            knots[i + 1] - knots[i]
                        } else {
                            knots[0] + period - knots[n - 1]
                        }
                    })
                    .collect();
                let mut a = vec![0.0; n];
                let mut b = vec![0.0; n];
                let mut c = vec![0.0; n];
                let mut d = vec![0.0; n];
                for i in 0..n {
                    let hp = h[(i + n - 1) % n];
                    let hn = h[i];
                    let yp = values[(i + n - 1) % n];
                    let yn = values[(i + 1) % n];
                    a[i] = hp / 6.0;
                    b[i] = (hp + hn) / 3.0;
                    c[i] = hn / 6.0;
                    d[i] = (yn - values[i]) / hn - (values[i] - yp) / hp;
                }
                let second = cyclic_thomas(&a, &b, &c, &d)?;
                Ok(CubicSpline {
                    knots: knots.to_vec(),
                    values: values.to_vec(),
                    second,
                    periodic: Some(period),
                })
            }
            SplineEnds::Clamped { start, end } => {
                let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
                let mut a = vec![0.0; n];
                let mut b = vec![0.0; n];
                let mut c = vec![0.0; n];
                let mut d = vec![0.0; n];
                b[0] = h[0] / 3.0;
                c[0] = h[0] / 6.0;
                d[0] = (values[1] - values[0]) / h[0] - start;
                for i in 1..n - 1 {
                    a[i] = h[i - 1] / 6.0;
                    b[i] = (h[i - 1] + h[i]) / 3.0;
                    c[i] = h[i] / 6.0;
                    d[i] = (values[i + 1] - values[i]) / h[i] - (values[i] - values[i - 1]) / h[i - 1];
                }
                a[n - 1] = h[n - 2] / 6.0;
                b[n - 1] = h[n - 2] / 3.0;
                d[n - 1] = end - (values[n - 1] - values[n - 2]) / h[n - 2];
                let second = thomas(&a, &b, &c, &d)?;
                Ok(CubicSpline {
                    knots: knots.to_vec(),
                    values: values.to_vec(),
                    second,
                    periodic: None,
                })
            }
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of polynomial segments.
    pub fn segments(&self) -> usize {
        match self.periodic {
            Some(_) => self.knots.len(),
            None => self.knots.len() - 1,
        }
    }

    /// Parameter interval of segment `i`.
    pub fn segment_bounds(&self, i: usize) -> (f64, f64) {
        let n = self.knots.len();
        let lo = self.knots[i];
        let hi = if i + 1 < n {
            self.knots[i + 1]
        } else {
            self.knots[0] + self.periodic.expect("segment index out of range")
        };
        (lo, hi)
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let x = match self.periodic {
            Some(p) => {
                let x0 = self.knots[0];
                x0 + (x - x0).rem_euclid(p)
            }
            None => x,
        };
        let last_seg = self.segments() - 1;
        let idx = match self.knots.partition_point(|&k| k <= x) {
            0 => 0,
            k => (k - 1).min(last_seg),
        };
        (idx, x)
    }

    fn coeffs(&self, i: usize) -> (f64, f64, f64, f64, f64, f64) {
        let n = self.knots.len();
        let j = (i + 1) % n;
        let (lo, hi) = self.segment_bounds(i);
        (lo, hi - lo, self.values[i], self.values[j], self.second[i], self.second[j])
    }

    /// Value, first and second derivative at `x`.
    pub fn eval_all(&self, x: f64) -> (f64, f64, f64) {
        let (i, x) = self.locate(x);
        let (lo, h, y0, y1, m0, m1) = self.coeffs(i);
        let a = (lo + h - x) / h;
        let b = (x - lo) / h;
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d = (y1 - y0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        let dd = a * m0 + b * m1;
        (v, d, dd)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_all(x).0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.eval_all(x).1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn periodic_spline_reproduces_sine() {
        let n = 128;
        let knots: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        let vals: Vec<f64> = knots.iter().map(|s| (2.0 * PI * s).sin()).collect();
        let sp = CubicSpline::new(&knots, &vals, SplineEnds::Periodic { period: 1.0 }).unwrap();
        for k in 0..500 {
            let x = -0.3 + 1.7 * k as f64 / 500.0;
            assert!((sp.eval(x) - (2.0 * PI * x).sin()).abs() < 1e-7);
            assert!((sp.derivative(x) - 2.0 * PI * (2.0 * PI * x).cos()).abs() < 1e-4);
        }
    }

    #[test]
    fn clamped_spline_is_exact_on_cubics() {
        let knots: Vec<f64> = (0..9).map(|i| (i as f64).powf(1.3)).collect();
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x - 0.1 * x * x * x;
        let df = |x: f64| -2.0 + x - 0.3 * x * x;
        let vals: Vec<f64> = knots.iter().map(|&x| f(x)).collect();
        let ends = SplineEnds::Clamped { start: df(knots[0]), end: df(knots[8]) };
        let sp = CubicSpline::new(&knots, &vals, ends).unwrap();
        for k in 0..=100 {
            let x = knots[8] * k as f64 / 100.0;
            assert!((sp.eval(x) - f(x)).abs() < 1e-10);
        }
    }
}

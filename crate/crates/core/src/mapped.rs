//! The functional `𝒳_ε` and its maximiser in tube coordinates `(s, t)`.
//!
//! In `t` the field is continuous piecewise quadratic over pairs of grid
//! intervals; in `s` it is discretised by conservative differences with the
//! trapezoidal rule. Assembly and evaluation share one quadrature, so at the
//! discrete optimum `𝒳_h(f) = ∫ f dμ` up to the solver tolerance.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::curve::{Curve, CurveKind, Radius};
use crate::error::{Error, Result};
use crate::numerics::quadrature::GaussLegendre;
use crate::numerics::sparse::{pcg, TripletBuilder};

/// Largest admissible `ε / ρ`.
pub const REGULARITY_MARGIN: f64 = 0.95;

const GAUSS_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    /// Intervals in `s` (periodic nodes for closed curves, `ns + 1` nodes otherwise).
    pub ns: usize,
    /// Nodes in `t` over `[−1, 1]`, odd.
    pub nt: usize,
    /// Parameter range in `s`.
    pub s_range: (f64, f64),
    pub periodic: bool,
}

impl ParamGrid {
    pub fn closed(ns: usize, nt: usize) -> Result<Self> {
        Self::check(ns, nt)?;
        Ok(ParamGrid { ns, nt, s_range: (0.0, 1.0), periodic: true })
    }

    /// Grid over the bulk `s ∈ [η, 1 − η]` of an open curve.
    pub fn bulk(eta: f64, ns: usize, nt: usize) -> Result<Self> {
        Self::check(ns, nt)?;
        if !(eta > 0.0 && eta < 0.5) {
            return Err(Error::InvalidArgument(format!("η = {eta}")));
        }
        Ok(ParamGrid { ns, nt, s_range: (eta, 1.0 - eta), periodic: false })
    }

    fn check(ns: usize, nt: usize) -> Result<()> {
        if ns < 8 || nt < 5 || nt % 2 == 0 {
            return Err(Error::InvalidArgument(format!("grid {ns}×{nt}: need Ns ≥ 8 and odd Nt ≥ 5")));
        }
        Ok(())
    }

    /// `Ns = max(256, 8/ε rounded up to a power of two)`, `Nt = 65`.
    pub fn default_size(eps: f64) -> (usize, usize) {
        let target = (8.0 / eps).ceil().max(1.0) as usize;
        (target.next_power_of_two().max(256), 65)
    }

    /// Number of `s` node columns.
    pub fn columns(&self) -> usize {
        if self.periodic {
            self.ns
        } else {
            self.ns + 1
        }
    }

    pub fn node_count(&self) -> usize {
        self.columns() * self.nt
    }

    pub fn hs(&self) -> f64 {
        (self.s_range.1 - self.s_range.0) / self.ns as f64
    }

    pub fn ht(&self) -> f64 {
        2.0 / (self.nt - 1) as f64
    }

    pub fn s(&self, i: usize) -> f64 {
        self.s_range.0 + i as f64 * self.hs()
    }

    pub fn t(&self, j: usize) -> f64 {
        -1.0 + j as f64 * self.ht()
    }

    /// Trapezoidal weight of column `i`.
    fn column_weight(&self, i: usize) -> f64 {
        if !self.periodic && (i == 0 || i == self.ns) {
            0.5 * self.hs()
        } else {
            self.hs()
        }
    }

    fn index(&self, i: usize, j: usize) -> usize {
        i * self.nt + j
    }
}

/// Nodal values on a `ParamGrid`, stored column by column in `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappedField {
    pub grid: ParamGrid,
    pub values: Vec<f64>,
}

impl MappedField {
    pub fn zeros(grid: ParamGrid) -> Self {
        MappedField { grid, values: vec![0.0; grid.node_count()] }
    }

    pub fn from_fn<F: FnMut(f64, f64) -> f64>(grid: ParamGrid, mut f: F) -> Self {
        let mut values = Vec::with_capacity(grid.node_count());
        for i in 0..grid.columns() {
            let s = grid.s(i);
            for j in 0..grid.nt {
                values.push(f(s, grid.t(j)));
            }
        }
        MappedField { grid, values }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn column(&self, i: usize) -> &[f64] {
        let nt = self.grid.nt;
        &self.values[i * nt..(i + 1) * nt]
    }

    /// Largest `|f|` on the rows `t = ±1`.
    pub fn boundary_trace(&self) -> f64 {
        (0..self.grid.columns())
            .map(|i| self.get(i, 0).abs().max(self.get(i, self.grid.nt - 1).abs()))
            .fold(0.0, f64::max)
    }

    /// Discrete `L²((s, t))` distance, using the same quadrature as `𝒳_h`.
    pub fn l2_distance(&self, other: &MappedField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::InvalidArgument("fields live on different grids".into()));
        }
        let q = TQuadrature::new(self.grid);
        let mut acc = 0.0;
        for i in 0..self.grid.columns() {
            let (a, b) = (self.column(i), other.column(i));
            let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            acc += self.grid.column_weight(i) * q.integrate_product(&d, &d, |_| 1.0);
        }
        Ok(acc.sqrt())
    }
}

/// Quadratic elements in `t` with a Gauss rule per element.
#[derive(Debug, Clone)]
struct TQuadrature {
    nt: usize,
    /// `(t, weight, [N_a], [N_a'])` for every element and Gauss point.
    points: Vec<Vec<(f64, f64, [f64; 3], [f64; 3])>>,
}

impl TQuadrature {
    fn new(grid: ParamGrid) -> Self {
        let gl = GaussLegendre::new(GAUSS_POINTS);
        let elems = (grid.nt - 1) / 2;
        let len = 2.0 * grid.ht();
        let points = (0..elems)
            .map(|e| {
                let mid = grid.t(2 * e + 1);
                gl.nodes
                    .iter()
                    .zip(&gl.weights)
                    .map(|(&x, &w)| {
                        let n = [0.5 * x * (x - 1.0), 1.0 - x * x, 0.5 * x * (x + 1.0)];
                        let dx = 2.0 / len;
                        let dn = [(x - 0.5) * dx, -2.0 * x * dx, (x + 0.5) * dx];
                        (mid + 0.5 * len * x, 0.5 * len * w, n, dn)
                    })
                    .collect()
            })
            .collect();
        TQuadrature { nt: grid.nt, points }
    }

    /// `∫ u v ρ(t) dt` for nodal vectors `u`, `v`.
    fn integrate_product<W: Fn(f64) -> f64>(&self, u: &[f64], v: &[f64], rho: W) -> f64 {
        let mut acc = 0.0;
        for (e, pts) in self.points.iter().enumerate() {
            let k = 2 * e;
            for &(t, w, n, _) in pts {
                let uu = n[0] * u[k] + n[1] * u[k + 1] + n[2] * u[k + 2];
                let vv = n[0] * v[k] + n[1] * v[k + 1] + n[2] * v[k + 2];
                acc += w * rho(t) * uu * vv;
            }
        }
        acc
    }

    /// `∫ u ρ(t) dt`.
    fn integrate<W: Fn(f64) -> f64>(&self, u: &[f64], rho: W) -> f64 {
        let mut acc = 0.0;
        for (e, pts) in self.points.iter().enumerate() {
            let k = 2 * e;
            for &(t, w, n, _) in pts {
                acc += w * rho(t) * (n[0] * u[k] + n[1] * u[k + 1] + n[2] * u[k + 2]);
            }
        }
        acc
    }

    /// `∫ (u')² ρ(t) dt`.
    fn integrate_grad2<W: Fn(f64) -> f64>(&self, u: &[f64], rho: W) -> f64 {
        let mut acc = 0.0;
        for (e, pts) in self.points.iter().enumerate() {
            let k = 2 * e;
            for &(t, w, _, d) in pts {
                let g = d[0] * u[k] + d[1] * u[k + 1] + d[2] * u[k + 2];
                acc += w * rho(t) * g * g;
            }
        }
        acc
    }

    /// Element matrices `∫ N_a N_b ρ` (mass) or `∫ N_a' N_b' ρ` (stiffness),
    /// scattered into `add(row, col, value)` with nodal offsets.
    fn scatter<W: Fn(f64) -> f64, A: FnMut(usize, usize, f64)>(&self, stiffness: bool, rho: W, mut add: A) {
        for (e, pts) in self.points.iter().enumerate() {
            let mut m = [[0.0; 3]; 3];
            for &(t, w, n, d) in pts {
                let basis = if stiffness { d } else { n };
                let r = w * rho(t);
                for a in 0..3 {
                    for b in 0..3 {
                        m[a][b] += r * basis[a] * basis[b];
                    }
                }
            }
            for a in 0..3 {
                for b in 0..3 {
                    add(2 * e + a, 2 * e + b, m[a][b]);
                }
            }
        }
        debug_assert!(2 * self.points.len() + 1 == self.nt);
    }

    /// `∫ N_a ρ` for every node.
    fn load<W: Fn(f64) -> f64>(&self, rho: W) -> Vec<f64> {
        let mut b = vec![0.0; self.nt];
        for (e, pts) in self.points.iter().enumerate() {
            for &(t, w, n, _) in pts {
                for a in 0..3 {
                    b[2 * e + a] += w * rho(t) * n[a];
                }
            }
        }
        b
    }
}

/// Curvature at columns and half-columns of a grid.
struct Coefficients {
    eps: f64,
    ell: f64,
    kappa: Vec<f64>,
    kappa_half: Vec<f64>,
}

impl Coefficients {
    fn new(curve: &Curve, eps: f64, grid: ParamGrid) -> Result<Self> {
        check_regular(curve, eps)?;
        match (curve.kind(), grid.periodic) {
            (CurveKind::Closed, true) | (CurveKind::Open, false) => {}
            _ => return Err(Error::InvalidArgument("grid does not match the curve kind".into())),
        }
        let kappa: Vec<f64> = (0..grid.columns()).map(|i| curve.curvature_at(grid.s(i))).collect();
        let halves = grid.ns;
        let kappa_half = (0..halves)
            .map(|i| 0.5 * (kappa[i] + kappa[(i + 1) % kappa.len()]))
            .collect();
        for &k in &kappa {
            if 1.0 - eps * k.abs() < 1.0 - REGULARITY_MARGIN {
                return Err(Error::TubeNotRegular { eps, limit: REGULARITY_MARGIN / k.abs() });
            }
        }
        Ok(Coefficients { eps, ell: curve.length(), kappa, kappa_half })
    }

    fn measure(&self, k: f64) -> impl Fn(f64) -> f64 {
        let (eps, ell) = (self.eps, self.ell);
        move |t| eps * ell * (1.0 - eps * t * k)
    }

    fn normal_weight(&self, k: f64) -> impl Fn(f64) -> f64 {
        let (eps, ell) = (self.eps, self.ell);
        move |t| (1.0 / eps - t * k) * ell
    }

    fn tangential_weight(&self, k: f64) -> impl Fn(f64) -> f64 {
        let (eps, ell) = (self.eps, self.ell);
        move |t| eps / ((1.0 - eps * t * k) * ell)
    }
}

/// Errors unless `ε ≤ 0.95 ρ`.
pub fn check_regular(curve: &Curve, eps: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("ε = {eps}")));
    }
    let rho = curve.rho()?;
    if !rho.admits(eps, REGULARITY_MARGIN) {
        let limit = match rho {
            Radius::Finite(r) => REGULARITY_MARGIN * r,
            Radius::Unbounded => f64::INFINITY,
        };
        return Err(Error::TubeNotRegular { eps, limit });
    }
    Ok(())
}

/// Evaluates the discrete `𝒳_ε(f)`.
pub fn xeps_evaluate(curve: &Curve, eps: f64, f: &MappedField) -> Result<f64> {
    let grid = f.grid;
    let co = Coefficients::new(curve, eps, grid)?;
    let q = TQuadrature::new(grid);
    let mut total = 0.0;
    for i in 0..grid.columns() {
        let u = f.column(i);
        let k = co.kappa[i];
        let w = grid.column_weight(i);
        total += w * (2.0 * q.integrate(u, co.measure(k)) - q.integrate_grad2(u, co.normal_weight(k)));
    }
    let hs = grid.hs();
    for h in 0..grid.ns {
        let (a, b) = (f.column(h), f.column((h + 1) % grid.columns()));
        let d: Vec<f64> = b.iter().zip(a).map(|(x, y)| (x - y) / hs).collect();
        total -= hs * q.integrate_product(&d, &d, co.tangential_weight(co.kappa_half[h]));
    }
    Ok(total)
}

/// Measure-weighted integral `∫ f dμ` with `dμ = εℓ(1 − εtκ) ds dt`.
pub fn measure_integral(curve: &Curve, eps: f64, f: &MappedField) -> Result<f64> {
    let grid = f.grid;
    let co = Coefficients::new(curve, eps, grid)?;
    let q = TQuadrature::new(grid);
    Ok((0..grid.columns())
        .map(|i| grid.column_weight(i) * q.integrate(f.column(i), co.measure(co.kappa[i])))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MappedClosed,
    MappedBulk,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    /// `𝒳_h` at the discrete solution.
    pub norm_sq: f64,
    /// `∫ f dμ` at the discrete solution.
    pub integral: f64,
    pub ns: usize,
    pub nt: usize,
    /// Final relative residual of the linear solve.
    pub residual: f64,
    pub iterations: usize,
    pub method: Method,
    #[serde(skip)]
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub rel_tol: f64,
    /// Iteration cap is `cap_factor · √(unknowns)`.
    pub cap_factor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { rel_tol: 1e-10, cap_factor: 50.0 }
    }
}

/// Maximises `𝒳_h` over fields equal to `dirichlet` on the fixed nodes.
fn solve(
    curve: &Curve,
    eps: f64,
    grid: ParamGrid,
    fixed: impl Fn(usize, usize) -> Option<f64>,
    opts: SolverOptions,
) -> Result<(MappedField, f64, usize)> {
    let co = Coefficients::new(curve, eps, grid)?;
    let q = TQuadrature::new(grid);
    let nt = grid.nt;
    let cols = grid.columns();

    let mut free = vec![usize::MAX; grid.node_count()];
    let mut g = vec![0.0; grid.node_count()];
    let mut nfree = 0;
    for i in 0..cols {
        for j in 0..nt {
            let p = grid.index(i, j);
            match fixed(i, j) {
                Some(v) => g[p] = v,
                None => {
                    free[p] = nfree;
                    nfree += 1;
                }
            }
        }
    }

    let mut rhs = vec![0.0; nfree];
    let mut tb = TripletBuilder::with_capacity(nfree, 15 * nfree);
    let mut add = |p: usize, qn: usize, v: f64, rhs: &mut [f64]| {
        let (fp, fq) = (free[p], free[qn]);
        if fp == usize::MAX {
            return;
        }
        if fq == usize::MAX {
            rhs[fp] -= v * g[qn];
        } else {
            tb.add(fp, fq, v);
        }
    };

    for i in 0..cols {
        let w = grid.column_weight(i);
        let k = co.kappa[i];
        let load = q.load(co.measure(k));
        for (j, l) in load.iter().enumerate() {
            let p = grid.index(i, j);
            if free[p] != usize::MAX {
                rhs[free[p]] += w * l;
            }
        }
        q.scatter(true, co.normal_weight(k), |a, b, v| {
            add(grid.index(i, a), grid.index(i, b), w * v, &mut rhs)
        });
    }
    let hs = grid.hs();
    for h in 0..grid.ns {
        let (i0, i1) = (h, (h + 1) % cols);
        q.scatter(false, co.tangential_weight(co.kappa_half[h]), |a, b, v| {
            let v = v / hs;
            add(grid.index(i0, a), grid.index(i0, b), v, &mut rhs);
            add(grid.index(i1, a), grid.index(i1, b), v, &mut rhs);
            add(grid.index(i0, a), grid.index(i1, b), -v, &mut rhs);
            add(grid.index(i1, a), grid.index(i0, b), -v, &mut rhs);
        });
    }
    let a = tb.build();

    // strip profile as the initial guess
    let mut x = vec![0.0; nfree];
    for i in 0..cols {
        for j in 0..nt {
            let p = grid.index(i, j);
            if free[p] != usize::MAX {
                let t = grid.t(j);
                x[free[p]] = 0.5 * eps * eps * (1.0 - t * t);
            }
        }
    }
    let cap = (opts.cap_factor * (nfree as f64).sqrt()).ceil() as usize;
    let stats = pcg(&a, &rhs, &mut x, opts.rel_tol, cap)?;

    let mut values = g;
    for (p, v) in values.iter_mut().enumerate() {
        if free[p] != usize::MAX {
            *v = x[free[p]];
        }
    }
    Ok((MappedField { grid, values }, stats.relative_residual, stats.iterations))
}

/// Solves the mapped problem on a closed curve.
pub fn solve_closed(curve: &Curve, eps: f64, grid: (usize, usize)) -> Result<(MappedField, NormResult)> {
    solve_closed_with(curve, eps, grid, SolverOptions::default())
}

pub fn solve_closed_with(
    curve: &Curve,
    eps: f64,
    grid: (usize, usize),
    opts: SolverOptions,
) -> Result<(MappedField, NormResult)> {
    if curve.kind() != CurveKind::Closed {
        return Err(Error::InvalidArgument("solve_closed needs a closed curve".into()));
    }
    let start = Instant::now();
    let pg = ParamGrid::closed(grid.0, grid.1)?;
    let last = pg.nt - 1;
    let (field, residual, iterations) =
        solve(curve, eps, pg, |_, j| (j == 0 || j == last).then_some(0.0), opts)?;
    let norm_sq = xeps_evaluate(curve, eps, &field)?;
    let integral = measure_integral(curve, eps, &field)?;
    Ok((
        field,
        NormResult {
            norm_sq,
            integral,
            ns: pg.ns,
            nt: pg.nt,
            residual,
            iterations,
            method: Method::MappedClosed,
            wall_seconds: start.elapsed().as_secs_f64(),
        },
    ))
}

/// Solves on the bulk `s ∈ (η, 1 − η)` of a straight-ended open curve with
/// the strip profile `(ε²/2)(1 − t²)` prescribed at both `s`-ends. The
/// returned contribution is `∫ u dμ` over the bulk.
pub fn solve_bulk_open(curve: &Curve, eps: f64, grid: (usize, usize)) -> Result<(MappedField, NormResult)> {
    solve_bulk_open_with(curve, eps, grid, SolverOptions::default())
}

pub fn solve_bulk_open_with(
    curve: &Curve,
    eps: f64,
    grid: (usize, usize),
    opts: SolverOptions,
) -> Result<(MappedField, NormResult)> {
    let eta = curve.eta().ok_or(Error::MissingEta)?;
    let start = Instant::now();
    let pg = ParamGrid::bulk(eta, grid.0, grid.1)?;
    let last = pg.nt - 1;
    let (field, residual, iterations) = solve(
        curve,
        eps,
        pg,
        |i, j| {
            if j == 0 || j == last {
                Some(0.0)
            } else if i == 0 || i == pg.ns {
                let t = pg.t(j);
                Some(0.5 * eps * eps * (1.0 - t * t))
            } else {
                None
            }
        },
        opts,
    )?;
    let norm_sq = xeps_evaluate(curve, eps, &field)?;
    let integral = measure_integral(curve, eps, &field)?;
    Ok((
        field,
        NormResult {
            norm_sq,
            integral,
            ns: pg.ns,
            nt: pg.nt,
            residual,
            iterations,
            method: Method::MappedBulk,
            wall_seconds: start.elapsed().as_secs_f64(),
        },
    ))
}

/// Exact `∫ u` for `−Δu = 1` on the annulus `R − ε < r < R + ε` with zero
/// boundary values.
pub fn circle_annulus_oracle(r: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < r && r.is_finite()) {
        return Err(Error::BadRadii { r, eps });
    }
    let (a, b) = (r - eps, r + eps);
    let log_ratio = (2.0 * eps / a).ln_1p();
    // b² − a² = 4Rε, b⁴ − a⁴ = 4Rε(b² + a²)
    let diff2 = 4.0 * r * eps;
    let diff4 = diff2 * (a * a + b * b);
    Ok(std::f64::consts::PI / 8.0 * (diff4 - diff2 * diff2 / log_ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::generators::*;
    use std::f64::consts::PI;

    #[test]
    fn strip_profile_scores_exactly_two_thirds() {
        let c = ellipse(1.0, 0.7, 256).unwrap();
        let eps = 0.05;
        let grid = ParamGrid::closed(128, 17).unwrap();
        let f = MappedField::from_fn(grid, |_, t| 0.5 * eps * eps * (1.0 - t * t));
        let x = xeps_evaluate(&c, eps, &f).unwrap();
        let target = 2.0 / 3.0 * eps.powi(3) * c.length();
        assert!((x - target).abs() < 1e-13 * target.max(1.0), "{x} vs {target}");
    }

    #[test]
    fn zero_field_scores_zero() {
        let c = circle(1.0, 128).unwrap();
        let f = MappedField::zeros(ParamGrid::closed(64, 17).unwrap());
        assert_eq!(xeps_evaluate(&c, 0.1, &f).unwrap(), 0.0);
    }

    #[test]
    fn oracle_matches_small_eps_expansion() {
        let eps: f64 = 0.05;
        let v = circle_annulus_oracle(1.0, eps).unwrap();
        let approx = 4.0 * PI / 3.0 * eps.powi(3) + 4.0 * PI / 45.0 * eps.powi(5);
        assert!((v - approx).abs() < 1e-9);
        let s = circle_annulus_oracle(2.0, 2.0 * eps).unwrap();
        assert!((s / v - 16.0).abs() < 1e-10);
        assert!(matches!(circle_annulus_oracle(1.0, 1.0), Err(Error::BadRadii { .. })));
    }

    #[test]
    fn wide_tubes_are_rejected() {
        let c = circle(1.0, 128).unwrap();
        assert!(matches!(solve_closed(&c, 0.96, (64, 17)), Err(Error::TubeNotRegular { .. })));
    }

    #[test]
    fn straight_bulk_reproduces_strip_solution() {
        let c = segment(1.0, 257).unwrap().with_straight_ends(0.1);
        // a segment is straight everywhere, so any η is admissible
        let c = c.unwrap();
        let eps = 0.03;
        let (f, r) = solve_bulk_open(&c, eps, (64, 17)).unwrap();
        let exact = MappedField::from_fn(f.grid, |_, t| 0.5 * eps * eps * (1.0 - t * t));
        assert!(f.l2_distance(&exact).unwrap() < 1e-12);
        let target = 2.0 / 3.0 * eps.powi(3) * 0.8;
        assert!((r.integral - target).abs() < 1e-12 * target.max(1e-3));
    }
}

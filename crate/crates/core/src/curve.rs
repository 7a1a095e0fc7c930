//! Plane curves sampled proportionally to arclength, their frames, and
//! global quantities (length, elastica energy, global radius of curvature).
//!
//! Closed curves live on the periodic parameter domain `[0, 1)` with samples
//! at `s_j = j / N`; open curves on `[0, 1]` with `s_j = j / (N - 1)`. The
//! normal is the anticlockwise rotation of the unit tangent, and curvature is
//! signed so that a counterclockwise closed curve has `ℓ ∫ κ ds = +2π`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quadrature::GaussLegendre;
use crate::numerics::spline::{CubicSpline, SplineEnds};

pub type Point = [f64; 2];

/// Minimum sample count for a stored curve.
pub const MIN_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Closed,
    Open,
}

/// How `resample_arclength` interpolates between input points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResampleMode {
    /// Periodic (closed) or clamped (open) cubic spline through the input.
    Spline,
    /// The input polygon itself.
    Polygonal,
}

/// Global radius of curvature; straight curves have no finite bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Radius {
    Finite(f64),
    Unbounded,
}

impl Radius {
    pub fn min(self, other: Radius) -> Radius {
        match (self, other) {
            (Radius::Finite(a), Radius::Finite(b)) => Radius::Finite(a.min(b)),
            (Radius::Finite(a), Radius::Unbounded) | (Radius::Unbounded, Radius::Finite(a)) => Radius::Finite(a),
            (Radius::Unbounded, Radius::Unbounded) => Radius::Unbounded,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Radius::Finite(r) => Some(r),
            Radius::Unbounded => None,
        }
    }

    /// True when a tube of half-width `eps` fits within `margin · ρ`.
    pub fn admits(self, eps: f64, margin: f64) -> bool {
        match self {
            Radius::Finite(r) => eps <= margin * r,
            Radius::Unbounded => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameSample {
    pub s: f64,
    pub tangent: Point,
    pub normal: Point,
    pub curvature: f64,
}

/// Anticlockwise rotation by a right angle.
#[inline]
pub fn rotate(v: Point) -> Point {
    [-v[1], v[0]]
}

#[inline]
pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[derive(Debug)]
struct Interp {
    x: CubicSpline,
    y: CubicSpline,
    kappa: CubicSpline,
}

#[derive(Debug)]
pub struct Curve {
    samples: Vec<Point>,
    kind: CurveKind,
    length: f64,
    eta: Option<f64>,
    reoriented: bool,
    frames: Vec<FrameSample>,
    interp: Interp,
    radius: OnceLock<Result<Radius>>,
}

impl Clone for Curve {
    fn clone(&self) -> Self {
        Curve::assemble(self.samples.clone(), self.kind, self.length, self.eta, self.reoriented)
            .expect("cloning a valid curve")
    }
}

impl Curve {
    /// Wraps samples that are already uniform in arclength.
    pub fn from_uniform_samples(samples: Vec<Point>, kind: CurveKind, length: f64) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(Error::TooFewPoints { got: samples.len(), need: MIN_SAMPLES });
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::DegenerateInput(format!("length {length}")));
        }
        let mut samples = samples;
        let mut reoriented = false;
        if kind == CurveKind::Closed && signed_area(&samples) < 0.0 {
            samples[1..].reverse();
            reoriented = true;
        }
        Curve::assemble(samples, kind, length, None, reoriented)
    }

    fn assemble(samples: Vec<Point>, kind: CurveKind, length: f64, eta: Option<f64>, reoriented: bool) -> Result<Self> {
        let frames = compute_frames(&samples, kind, length);
        let n = samples.len();
        let params: Vec<f64> = (0..n).map(|j| param(j, n, kind)).collect();
        let comp = |k: usize| -> Vec<f64> { samples.iter().map(|p| p[k]).collect() };
        let kap: Vec<f64> = frames.iter().map(|f| f.curvature).collect();
        let interp = match kind {
            CurveKind::Closed => {
                let ends = SplineEnds::Periodic { period: 1.0 };
                Interp {
                    x: CubicSpline::new(&params, &comp(0), ends)?,
                    y: CubicSpline::new(&params, &comp(1), ends)?,
                    kappa: CubicSpline::new(&params, &kap, ends)?,
                }
            }
            CurveKind::Open => {
                let h = 1.0 / (n - 1) as f64;
                let slope = |v: &[f64]| -> SplineEnds {
                    SplineEnds::Clamped { start: one_sided_first(v, 0, h), end: one_sided_first(v, n - 1, h) }
                };
                let (xs, ys) = (comp(0), comp(1));
                Interp {
                    x: CubicSpline::new(&params, &xs, slope(&xs))?,
                    y: CubicSpline::new(&params, &ys, slope(&ys))?,
                    kappa: CubicSpline::new(&params, &kap, slope(&kap))?,
                }
            }
        };
        Ok(Curve { samples, kind, length, eta, reoriented, frames, interp, radius: OnceLock::new() })
    }

    /// Marks an open curve as straight-ended with bands `[0, 2η]` and
    /// `[1 − 2η, 1]`, validating that the second derivative vanishes there.
    pub fn with_straight_ends(self, eta: f64) -> Result<Self> {
        if self.kind != CurveKind::Open || !(eta > 0.0 && 4.0 * eta < 1.0) {
            return Err(Error::MissingEta);
        }
        let n = self.samples.len();
        let h = 1.0 / (n - 1) as f64;
        let tol = 1e-8 * self.length * self.length;
        // skip samples whose stencil reaches outside the band
        let reach = 2.0 * h + 1e-12;
        for (j, f) in self.frames.iter().enumerate() {
            let s = f.s;
            let in_band = s <= 2.0 * eta - reach || s >= 1.0 - 2.0 * eta + reach;
            if in_band {
                let dd = second_derivative(&self.samples, j, self.kind);
                if dd[0].hypot(dd[1]) >= tol {
                    return Err(Error::MissingEta);
                }
            }
        }
        let mut c = self;
        c.eta = Some(eta);
        Ok(c)
    }

    pub fn samples(&self) -> &[Point] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn eta(&self) -> Option<f64> {
        self.eta
    }

    /// True when a clockwise closed input was reversed on construction.
    pub fn reoriented(&self) -> bool {
        self.reoriented
    }

    /// Parameter step between consecutive samples.
    pub fn param_step(&self) -> f64 {
        match self.kind {
            CurveKind::Closed => 1.0 / self.samples.len() as f64,
            CurveKind::Open => 1.0 / (self.samples.len() - 1) as f64,
        }
    }

    /// Arclength between consecutive samples.
    pub fn spacing(&self) -> f64 {
        self.length * self.param_step()
    }

    pub fn param(&self, j: usize) -> f64 {
        param(j, self.samples.len(), self.kind)
    }

    pub fn frames(&self) -> &[FrameSample] {
        &self.frames
    }

    pub fn curvatures(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.curvature).collect()
    }

    /// Curvature at an arbitrary parameter, by spline through the samples.
    pub fn curvature_at(&self, s: f64) -> f64 {
        self.interp.kappa.eval(s)
    }

    /// Position, unit tangent, normal and curvature at an arbitrary parameter.
    pub fn frame_at(&self, s: f64) -> (Point, FrameSample) {
        let (x, dx, _) = self.interp.x.eval_all(s);
        let (y, dy, _) = self.interp.y.eval_all(s);
        let norm = dx.hypot(dy);
        let tangent = [dx / norm, dy / norm];
        (
            [x, y],
            FrameSample { s, tangent, normal: rotate(tangent), curvature: self.curvature_at(s) },
        )
    }

    /// Largest relative deviation of `|γ'|` from `ℓ` at the samples, with
    /// `γ'` taken from the interpolating spline.
    pub fn arclength_defect(&self) -> f64 {
        (0..self.samples.len())
            .map(|j| {
                let s = self.param(j);
                let d = self.interp.x.derivative(s).hypot(self.interp.y.derivative(s));
                (d / self.length - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Scales the curve about the origin.
    pub fn scaled(&self, lambda: f64) -> Result<Curve> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("scale factor {lambda}")));
        }
        let samples = self.samples.iter().map(|p| [lambda * p[0], lambda * p[1]]).collect();
        Curve::assemble(samples, self.kind, lambda * self.length, self.eta, self.reoriented)
    }

    /// Cached global radius of curvature.
    pub fn rho(&self) -> Result<Radius> {
        self.radius.get_or_init(|| global_radius(self)).clone()
    }
}

fn param(j: usize, n: usize, kind: CurveKind) -> f64 {
    match kind {
        CurveKind::Closed => j as f64 / n as f64,
        CurveKind::Open => j as f64 / (n - 1) as f64,
    }
}

fn signed_area(p: &[Point]) -> f64 {
    let n = p.len();
    0.5 * (0..n).map(|i| cross(p[i], p[(i + 1) % n])).sum::<f64>()
}

fn one_sided_first(v: &[f64], j: usize, h: f64) -> f64 {
    let n = v.len();
    if j == 0 {
        (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h)
    } else {
        debug_assert_eq!(j, n - 1);
        -(-25.0 * v[n - 1] + 48.0 * v[n - 2] - 36.0 * v[n - 3] + 16.0 * v[n - 4] - 3.0 * v[n - 5]) / (12.0 * h)
    }
}

/// Fourth-order finite-difference stencils on the sample sequence.
fn stencil(samples: &[Point], j: usize, kind: CurveKind, first: &[f64; 5], second: &[f64; 5], offset: isize) -> (Point, Point) {
    let n = samples.len() as isize;
    let mut d1 = [0.0; 2];
    let mut d2 = [0.0; 2];
    for k in 0..5 {
        let idx = j as isize + k as isize + offset;
        let idx = match kind {
            CurveKind::Closed => idx.rem_euclid(n),
            CurveKind::Open => idx,
        } as usize;
        for c in 0..2 {
            d1[c] += first[k] * samples[idx][c];
            d2[c] += second[k] * samples[idx][c];
        }
    }
    (d1, d2)
}

fn derivatives(samples: &[Point], j: usize, kind: CurveKind) -> (Point, Point) {
    let n = samples.len();
    let h = param(1, n, kind);
    const C1: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
    const C2: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];
    const F1_0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    const F2_0: [f64; 5] = [35.0, -104.0, 114.0, -56.0, 11.0];
    const F1_1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
    const F2_1: [f64; 5] = [11.0, -20.0, 6.0, 4.0, -1.0];
    let (d1, d2) = match kind {
        CurveKind::Closed => stencil(samples, j, kind, &C1, &C2, -2),
        CurveKind::Open => {
            if j == 0 {
                stencil(samples, 0, kind, &F1_0, &F2_0, 0)
            } else if j == 1 {
                stencil(samples, 0, kind, &F1_1, &F2_1, 0)
            } else if j == n - 1 || j == n - 2 {
                // mirrored one-sided stencils
                let (f1, f2) = if j == n - 1 { (F1_0, F2_0) } else { (F1_1, F2_1) };
                let r1: [f64; 5] = std::array::from_fn(|k| -f1[4 - k]);
                let r2: [f64; 5] = std::array::from_fn(|k| f2[4 - k]);
                stencil(samples, n - 5, kind, &r1, &r2, 0)
            } else {
                stencil(samples, j, kind, &C1, &C2, -2)
            }
        }
    };
    let s1 = 1.0 / (12.0 * h);
    let s2 = 1.0 / (12.0 * h * h);
    ([d1[0] * s1, d1[1] * s1], [d2[0] * s2, d2[1] * s2])
}

fn second_derivative(samples: &[Point], j: usize, kind: CurveKind) -> Point {
    derivatives(samples, j, kind).1
}

fn compute_frames(samples: &[Point], kind: CurveKind, length: f64) -> Vec<FrameSample> {
    let n = samples.len();
    (0..n)
        .map(|j| {
            let (d1, d2) = derivatives(samples, j, kind);
            let norm = d1[0].hypot(d1[1]);
            let tangent = [d1[0] / norm, d1[1] / norm];
            let normal = rotate(tangent);
            let curvature = (d2[0] * normal[0] + d2[1] * normal[1]) / (length * length);
            FrameSample { s: param(j, n, kind), tangent, normal, curvature }
        })
        .collect()
}

/// Resamples a point sequence to `n` points uniformly spaced in arclength
/// along the periodic (closed) or clamped (open) cubic spline through it.
pub fn resample_arclength(points: &[Point], n: usize, kind: CurveKind) -> Result<Curve> {
    resample_with(points, n, kind, ResampleMode::Spline)
}

pub fn resample_with(points: &[Point], n: usize, kind: CurveKind, mode: ResampleMode) -> Result<Curve> {
    if n < MIN_SAMPLES {
        return Err(Error::TooFewPoints { got: n, need: MIN_SAMPLES });
    }
    let pts = dedup_points(points, kind);
    if pts.len() < 4 {
        if points.len() < 4 {
            return Err(Error::TooFewPoints { got: points.len(), need: 4 });
        }
        return Err(Error::DegenerateInput("fewer than 4 distinct points".into()));
    }
    let path: Box<dyn ArcPath> = match mode {
        ResampleMode::Spline => Box::new(SplinePath::new(&pts, kind)?),
        ResampleMode::Polygonal => Box::new(PolygonPath::new(&pts, kind)),
    };
    let total = path.total_length();
    if !(total > 0.0) {
        return Err(Error::DegenerateInput("zero total length".into()));
    }
    let count = match kind {
        CurveKind::Closed => n,
        CurveKind::Open => n - 1,
    };
    let samples: Vec<Point> = (0..n).map(|j| path.point_at_arclength(total * j as f64 / count as f64)).collect();
    Curve::from_uniform_samples(samples, kind, total)
}

fn dedup_points(points: &[Point], kind: CurveKind) -> Vec<Point> {
    let scale = points.iter().fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs())).max(1.0);
    let tol = 1e-12 * scale;
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for &p in points {
        if out.last().is_none_or(|&q| dist(p, q) > tol) {
            out.push(p);
        }
    }
    if kind == CurveKind::Closed {
        while out.len() > 1 && dist(out[0], *out.last().unwrap()) <= tol {
            out.pop();
        }
    }
    out
}

trait ArcPath {
    fn total_length(&self) -> f64;
    fn point_at_arclength(&self, sigma: f64) -> Point;
}

struct PolygonPath {
    pts: Vec<Point>,
    cum: Vec<f64>,
}

impl PolygonPath {
    fn new(pts: &[Point], kind: CurveKind) -> Self {
        let mut pts = pts.to_vec();
        if kind == CurveKind::Closed {
            pts.push(pts[0]);
        }
        let mut cum = vec![0.0];
        for w in pts.windows(2) {
            cum.push(cum.last().unwrap() + dist(w[0], w[1]));
        }
        PolygonPath { pts, cum }
    }
}

impl ArcPath for PolygonPath {
    fn total_length(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    fn point_at_arclength(&self, sigma: f64) -> Point {
        let k = self.cum.partition_point(|&c| c <= sigma).clamp(1, self.cum.len() - 1) - 1;
        let seg = self.cum[k + 1] - self.cum[k];
        let t = ((sigma - self.cum[k]) / seg).clamp(0.0, 1.0);
        let (a, b) = (self.pts[k], self.pts[k + 1]);
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }
}

struct SplinePath {
    x: CubicSpline,
    y: CubicSpline,
    /// Cumulative arclength at segment starts, plus the total.
    cum: Vec<f64>,
    gl: GaussLegendre,
}

impl SplinePath {
    fn new(pts: &[Point], kind: CurveKind) -> Result<Self> {
        let m = pts.len();
        let mut u = vec![0.0];
        for w in pts.windows(2) {
            u.push(u.last().unwrap() + dist(w[0], w[1]));
        }
        let xs: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p[1]).collect();
        let (x, y) = match kind {
            CurveKind::Closed => {
                let period = u[m - 1] + dist(pts[m - 1], pts[0]);
                let ends = SplineEnds::Periodic { period };
                (CubicSpline::new(&u, &xs, ends)?, CubicSpline::new(&u, &ys, ends)?)
            }
            CurveKind::Open => {
                let ex = end_slopes(&u, &xs);
                let ey = end_slopes(&u, &ys);
                (CubicSpline::new(&u, &xs, ex)?, CubicSpline::new(&u, &ys, ey)?)
            }
        };
        let gl = GaussLegendre::new(16);
        let mut cum = vec![0.0];
        for i in 0..x.segments() {
            let (lo, hi) = x.segment_bounds(i);
            let piece = gl.integrate(lo, hi, |t| x.derivative(t).hypot(y.derivative(t)));
            cum.push(cum.last().unwrap() + piece);
        }
        Ok(SplinePath { x, y, cum, gl })
    }

    fn speed(&self, t: f64) -> f64 {
        self.x.derivative(t).hypot(self.y.derivative(t))
    }
}

/// End slopes from the quadratic through the three nearest knots.
fn end_slopes(u: &[f64], v: &[f64]) -> SplineEnds {
    let quad_slope = |x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64, at: f64| -> f64 {
        let d01 = (y1 - y0) / (x1 - x0);
        let d12 = (y2 - y1) / (x2 - x1);
        let d012 = (d12 - d01) / (x2 - x0);
        d01 + d012 * ((at - x0) + (at - x1))
    };
    let m = u.len();
    SplineEnds::Clamped {
        start: quad_slope(u[0], u[1], u[2], v[0], v[1], v[2], u[0]),
        end: quad_slope(u[m - 3], u[m - 2], u[m - 1], v[m - 3], v[m - 2], v[m - 1], u[m - 1]),
    }
}

impl ArcPath for SplinePath {
    fn total_length(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    fn point_at_arclength(&self, sigma: f64) -> Point {
        let segs = self.x.segments();
        let i = self.cum.partition_point(|&c| c <= sigma).clamp(1, segs) - 1;
        let (lo, hi) = self.x.segment_bounds(i);
        let target = sigma - self.cum[i];
        let piece = self.cum[i + 1] - self.cum[i];
        let mut t = lo + (hi - lo) * (target / piece).clamp(0.0, 1.0);
        for _ in 0..50 {
            let g = self.gl.integrate(lo, t, |v| self.speed(v)) - target;
            let step = g / self.speed(t);
            t = (t - step).clamp(lo, hi);
            if step.abs() < 1e-15 * (hi - lo).max(1.0) {
                break;
            }
        }
        [self.x.eval(t), self.y.eval(t)]
    }
}

/// Frames with curvature from fourth-order centred differences.
pub fn curvature_profile(curve: &Curve) -> &[FrameSample] {
    curve.frames()
}

/// Trapezoidal quadrature of `∫_γ κ² = ℓ ∫ κ(s)² ds`.
pub fn elastica_energy(curve: &Curve) -> f64 {
    let k2: Vec<f64> = curve.frames.iter().map(|f| f.curvature * f.curvature).collect();
    curve.length * trapezoid(&k2, curve.kind)
}

/// `ℓ ∫ κ ds`, equal to the turning angle (`2π` for a simple closed
/// counterclockwise curve).
pub fn total_turning(curve: &Curve) -> f64 {
    curve.length * trapezoid(&curve.curvatures(), curve.kind)
}

/// Trapezoidal rule over the unit parameter interval.
pub fn trapezoid(values: &[f64], kind: CurveKind) -> f64 {
    let n = values.len();
    match kind {
        CurveKind::Closed => values.iter().sum::<f64>() / n as f64,
        CurveKind::Open => {
            let inner: f64 = values[1..n - 1].iter().sum();
            (inner + 0.5 * (values[0] + values[n - 1])) / (n - 1) as f64
        }
    }
}

/// Radius of the circle through `y` that is tangent to direction `tangent` at `x`.
#[inline]
pub fn point_tangent_radius(x: Point, tangent: Point, y: Point) -> f64 {
    let d = [y[0] - x[0], y[1] - x[1]];
    let c = cross(tangent, d).abs();
    let d2 = d[0] * d[0] + d[1] * d[1];
    if c == 0.0 {
        if d2 == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        d2 / (2.0 * c)
    }
}

/// Minimum point-tangent radius with `x` from `a` and `y` from `b`, skipping
/// pairs whose chord exceeds twice the running best. `skip_same` excludes
/// identical indices when `a` and `b` are the same curve.
pub(crate) fn min_pairwise_radius(a: &Curve, b: &Curve, skip_same: bool, mut best: f64) -> f64 {
    for (i, (x, fx)) in a.samples.iter().zip(&a.frames).enumerate() {
        for (j, y) in b.samples.iter().enumerate() {
            if skip_same && i == j {
                continue;
            }
            let d = dist(*x, *y);
            if d > 2.0 * best {
                continue;
            }
            let r = point_tangent_radius(*x, fx.tangent, *y);
            if r < best {
                best = r;
            }
        }
    }
    best
}

/// Global radius of curvature: the smaller of the least local radius of
/// curvature and the least pairwise point-tangent radius.
pub fn global_radius(curve: &Curve) -> Result<Radius> {
    let flat = 1e-12 / curve.length;
    let local = curve
        .frames
        .iter()
        .map(|f| f.curvature.abs())
        .filter(|k| *k > flat)
        .fold(0.0f64, f64::max);
    let local = if local > 0.0 { 1.0 / local } else { f64::INFINITY };
    let best = min_pairwise_radius(curve, curve, true, local);
    let floor = curve.spacing();
    if best < floor {
        return Err(Error::SelfIntersecting { radius: best, floor });
    }
    Ok(if best.is_finite() { Radius::Finite(best) } else { Radius::Unbounded })
}

/// Point and Jacobian determinant of the tube map `Ψ_ε(s, t) = γ(s) + εtν(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubePoint {
    pub point: Point,
    pub jacobian_det: f64,
}

pub fn tube_map(curve: &Curve, eps: f64, s: f64, t: f64) -> Result<TubePoint> {
    let rho = curve.rho()?;
    if !rho.admits(eps, 1.0) {
        return Err(Error::TubeNotRegular { eps, limit: rho.finite().unwrap_or(f64::INFINITY) });
    }
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} outside [-1, 1]")));
    }
    let (p, f) = frame_at_sample_or_spline(curve, s);
    Ok(TubePoint {
        point: [p[0] + eps * t * f.normal[0], p[1] + eps * t * f.normal[1]],
        jacobian_det: eps * curve.length * (1.0 - eps * t * f.curvature),
    })
}

fn frame_at_sample_or_spline(curve: &Curve, s: f64) -> (Point, FrameSample) {
    let n = curve.len();
    let pos = match curve.kind {
        CurveKind::Closed => s.rem_euclid(1.0) * n as f64,
        CurveKind::Open => s * (n - 1) as f64,
    };
    let j = pos.round();
    if (pos - j).abs() < 1e-9 {
        let j = (j as usize) % n;
        return (curve.samples[j], curve.frames[j]);
    }
    curve.frame_at(s)
}

/// Built-in curve generators.
pub mod generators {
    use super::*;

    pub fn circle(radius: f64, n: usize) -> Result<Curve> {
        circle_at([0.0, 0.0], radius, n, 0.0)
    }

    /// Circle with a given centre, starting at angle `phase`.
    pub fn circle_at(center: Point, radius: f64, n: usize, phase: f64) -> Result<Curve> {
        if !(radius > 0.0) {
            return Err(Error::DegenerateInput(format!("radius {radius}")));
        }
        let samples = (0..n)
            .map(|j| {
                let th = phase + 2.0 * PI * j as f64 / n as f64;
                [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
            })
            .collect();
        Curve::from_uniform_samples(samples, CurveKind::Closed, 2.0 * PI * radius)
    }

    /// Circle traversed `turns` times as a single closed curve.
    pub fn multiply_covered_circle(radius: f64, turns: usize, n: usize) -> Result<Curve> {
        let samples = (0..n)
            .map(|j| {
                let th = 2.0 * PI * turns as f64 * j as f64 / n as f64;
                [radius * th.cos(), radius * th.sin()]
            })
            .collect();
        Curve::from_uniform_samples(samples, CurveKind::Closed, 2.0 * PI * radius * turns as f64)
    }

    /// Ellipse with semi-axes `a` (x) and `b` (y), resampled to arclength.
    pub fn ellipse(a: f64, b: f64, n: usize) -> Result<Curve> {
        let dense = (16 * n).max(4096);
        let pts: Vec<Point> = (0..dense)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / dense as f64;
                [a * th.cos(), b * th.sin()]
            })
            .collect();
        resample_arclength(&pts, n, CurveKind::Closed)
    }

    /// Lemniscate of Gerono `(sin φ, sin φ cos φ)`; its node at the origin is
    /// a right-angle transverse crossing.
    pub fn figure_eight(scale: f64, n: usize) -> Result<Curve> {
        let dense = (16 * n).max(4096);
        let pts: Vec<Point> = (0..dense)
            .map(|j| {
                let p = 2.0 * PI * j as f64 / dense as f64;
                [scale * p.sin(), scale * p.sin() * p.cos()]
            })
            .collect();
        resample_arclength(&pts, n, CurveKind::Closed)
    }

    /// Circle of radius `radius` displaced along its normal by
    /// `amplitude · sin(2πk s)`, then resampled to arclength.
    pub fn perturbed_circle(radius: f64, amplitude: f64, k: u32, phase: f64, n: usize) -> Result<Curve> {
        let dense = (16 * n).max(4096);
        let pts: Vec<Point> = (0..dense)
            .map(|j| {
                let s = j as f64 / dense as f64;
                let th = 2.0 * PI * s;
                // inward normal of the counterclockwise circle
                let r = radius - amplitude * (2.0 * PI * k as f64 * s + phase).sin();
                [r * th.cos(), r * th.sin()]
            })
            .collect();
        resample_arclength(&pts, n, CurveKind::Closed)
    }

    /// Open curve of the given length made of two straight pieces of
    /// parameter length `2η` joined by a bump whose curvature follows a
    /// raised cosine with total turning angle `turning`.
    pub fn straight_ended(length: f64, eta: f64, turning: f64, n: usize) -> Result<Curve> {
        if !(eta > 0.0 && 4.0 * eta < 1.0) {
            return Err(Error::InvalidArgument(format!("η = {eta} must lie in (0, 1/4)")));
        }
        let a = 2.0 * eta * length;
        let w = length - 2.0 * a;
        let theta = move |sig: f64| -> f64 {
            if sig <= a {
                0.0
            } else if sig >= a + w {
                turning
            } else {
                let x = sig - a;
                turning / w * (x - w / (2.0 * PI) * (2.0 * PI * x / w).sin())
            }
        };
        let gl = GaussLegendre::new(12);
        let mut samples = Vec::with_capacity(n);
        let mut pos = [0.0, 0.0];
        let mut prev = 0.0;
        samples.push(pos);
        for j in 1..n {
            let sig = length * j as f64 / (n - 1) as f64;
            // split at the bump edges so each piece is smooth
            let mut edges = vec![prev];
            for e in [a, a + w] {
                if e > prev && e < sig {
                    edges.push(e);
                }
            }
            edges.push(sig);
            pos[0] += gl.integrate_pieces(&edges, |x| theta(x).cos());
            pos[1] += gl.integrate_pieces(&edges, |x| theta(x).sin());
            samples.push(pos);
            prev = sig;
        }
        Curve::from_uniform_samples(samples, CurveKind::Open, length)?.with_straight_ends(eta)
    }

    /// Exact curvature of the straight-ended generator at arclength `sigma`.
    pub fn straight_ended_curvature(length: f64, eta: f64, turning: f64, sigma: f64) -> f64 {
        let a = 2.0 * eta * length;
        let w = length - 2.0 * a;
        if sigma <= a || sigma >= a + w {
            0.0
        } else {
            turning / w * (1.0 - (2.0 * PI * (sigma - a) / w).cos())
        }
    }

    /// Straight segment from the origin along the x-axis.
    pub fn segment(length: f64, n: usize) -> Result<Curve> {
        let samples = (0..n).map(|j| [length * j as f64 / (n - 1) as f64, 0.0]).collect();
        Curve::from_uniform_samples(samples, CurveKind::Open, length)
    }
}

#[cfg(test)]
mod tests {
    use super::generators::*;
    use super::*;

    #[test]
    fn circle_frames() {
        let c = circle(1.0, 256).unwrap();
        for f in c.frames() {
            assert!((f.curvature - 1.0).abs() < 1e-6);
            let nn = f.normal[0].hypot(f.normal[1]);
            assert!((nn - 1.0).abs() < 1e-15);
            assert!((f.normal[0] * f.tangent[0] + f.normal[1] * f.tangent[1]).abs() < 1e-15);
        }
        assert!((total_turning(&c) - 2.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let pts: Vec<Point> = (0..64)
            .map(|j| {
                let th = -2.0 * PI * j as f64 / 64.0;
                [th.cos(), th.sin()]
            })
            .collect();
        let c = resample_arclength(&pts, 128, CurveKind::Closed).unwrap();
        assert!(c.reoriented());
        assert!((total_turning(&c) - 2.0 * PI).abs() < 1e-5);
    }

    #[test]
    fn too_few_points_and_degenerate_input() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(matches!(resample_arclength(&pts, 64, CurveKind::Closed), Err(Error::TooFewPoints { .. })));
        let pts = [[1.0, 1.0]; 10];
        assert!(matches!(resample_arclength(&pts, 64, CurveKind::Closed), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn square_in_polygonal_mode() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let c = resample_with(&pts, 64, CurveKind::Closed, ResampleMode::Polygonal).unwrap();
        assert!((c.length() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn segment_has_unbounded_radius_and_flat_tube() {
        let c = segment(2.0, 64).unwrap();
        assert_eq!(global_radius(&c).unwrap(), Radius::Unbounded);
        let tp = tube_map(&c, 0.3, 0.37, 0.8).unwrap();
        assert!((tp.jacobian_det - 0.3 * 2.0).abs() < 1e-14);
    }

    #[test]
    fn straight_ended_bands_are_validated() {
        let c = straight_ended(1.0, 0.2, 0.5, 1025).unwrap();
        assert_eq!(c.eta(), Some(0.2));
        let bent = circle(1.0, 64).unwrap();
        assert!(matches!(bent.with_straight_ends(0.1), Err(Error::MissingEta)));
    }

    #[test]
    fn tube_map_rejects_wide_tubes() {
        let c = circle(1.0, 128).unwrap();
        assert!(matches!(tube_map(&c, 1.2, 0.0, 0.0), Err(Error::TubeNotRegular { .. })));
    }
}

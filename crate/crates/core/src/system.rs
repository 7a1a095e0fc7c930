//! Finite systems of closed curves: length and global radius, multiplicity
//! of trace points, crossing classification, and trace equivalence.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::curve::{dist, min_pairwise_radius, Curve, CurveKind, Point, Radius};
use crate::error::{Error, Result};

/// Default angle below which a crossing counts as tangential.
pub const DEFAULT_ANGLE_TOL: f64 = 0.05;

/// Uniform bucket grid from cells to `(curve, sample)` pairs.
#[derive(Debug, Clone)]
pub struct TraceIndex {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<(usize, usize)>>,
}

impl TraceIndex {
    fn build(curves: &[Curve], cell: f64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<(usize, usize)>> = HashMap::new();
        for (c, curve) in curves.iter().enumerate() {
            for (j, p) in curve.samples().iter().enumerate() {
                buckets.entry(Self::key(cell, *p)).or_default().push((c, j));
            }
        }
        TraceIndex { cell, buckets }
    }

    fn key(cell: f64, p: Point) -> (i64, i64) {
        ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64)
    }

    /// Calls `f` for every indexed sample within `radius` of `p` (plus some
    /// extra candidates from the surrounding cells).
    fn for_near<F: FnMut(usize, usize)>(&self, p: Point, radius: f64, mut f: F) {
        let (kx, ky) = Self::key(self.cell, p);
        let r = (radius / self.cell).ceil() as i64;
        for dx in -r..=r {
            for dy in -r..=r {
                if let Some(v) = self.buckets.get(&(kx + dx, ky + dy)) {
                    for &(c, j) in v {
                        f(c, j);
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct CurveSystem {
    curves: Vec<Curve>,
    index: TraceIndex,
}

impl CurveSystem {
    pub fn new(curves: Vec<Curve>) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::InvalidArgument("a curve system needs at least one curve".into()));
        }
        if curves.iter().any(|c| c.kind() != CurveKind::Closed) {
            return Err(Error::InvalidArgument("curve systems hold closed curves only".into()));
        }
        let cell = default_dist_tol(&curves);
        let index = TraceIndex::build(&curves, cell);
        Ok(CurveSystem { curves, index })
    }

    pub fn single(curve: Curve) -> Result<Self> {
        CurveSystem::new(vec![curve])
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    /// Number of curves `#Γ`.
    pub fn count(&self) -> usize {
        self.curves.len()
    }

    /// `ℓ(Γ) = Σ ℓ(γ_i)`, summed in index order.
    pub fn length(&self) -> f64 {
        self.curves.iter().map(Curve::length).sum()
    }

    pub fn max_spacing(&self) -> f64 {
        self.curves.iter().map(Curve::spacing).fold(0.0, f64::max)
    }

    /// Scales every member about the origin.
    pub fn scaled(&self, lambda: f64) -> Result<CurveSystem> {
        CurveSystem::new(self.curves.iter().map(|c| c.scaled(lambda)).collect::<Result<_>>()?)
    }
}

/// Twice the largest sample spacing.
pub fn default_dist_tol(curves: &[Curve]) -> f64 {
    2.0 * curves.iter().map(Curve::spacing).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemMetrics {
    pub length: f64,
    pub rho: Radius,
}

/// Total length and global radius of curvature of the union trace.
pub fn system_metrics(system: &CurveSystem) -> Result<SystemMetrics> {
    let mut rho = Radius::Unbounded;
    for c in &system.curves {
        rho = rho.min(c.rho()?);
    }
    let mut best = rho.finite().unwrap_or(f64::INFINITY);
    for (a, ca) in system.curves.iter().enumerate() {
        for (b, cb) in system.curves.iter().enumerate() {
            if a != b {
                best = best.min(cross_radius(ca, cb, best));
            }
        }
    }
    if best.is_finite() {
        rho = Radius::Finite(best);
    }
    Ok(SystemMetrics { length: system.length(), rho })
}

/// Pairwise radius across two distinct curves; coincident sample points are
/// skipped because a circle needs three distinct points.
fn cross_radius(a: &Curve, b: &Curve, best: f64) -> f64 {
    let coincident = 1e-12 * a.length().max(b.length());
    let any_coincident = a
        .samples()
        .iter()
        .any(|x| b.samples().iter().any(|y| dist(*x, *y) <= coincident));
    if !any_coincident {
        return min_pairwise_radius(a, b, false, best);
    }
    let mut best = best;
    for (x, fx) in a.samples().iter().zip(a.frames()) {
        for y in b.samples() {
            let d = dist(*x, *y);
            if d <= coincident || d > 2.0 * best {
                continue;
            }
            best = best.min(crate::curve::point_tangent_radius(*x, fx.tangent, *y));
        }
    }
    best
}

/// Number of parameter-connected preimage clusters within `tol` of `point`.
pub fn multiplicity_at(system: &CurveSystem, point: Point, tol: f64) -> usize {
    let mut hits: Vec<Vec<usize>> = vec![Vec::new(); system.curves.len()];
    system.index.for_near(point, tol, |c, j| {
        if dist(system.curves[c].samples()[j], point) <= tol {
            hits[c].push(j);
        }
    });
    hits.iter_mut()
        .enumerate()
        .map(|(c, idx)| {
            idx.sort_unstable();
            idx.dedup();
            count_clusters(idx, system.curves[c].len(), system.curves[c].kind())
        })
        .sum()
}

fn count_clusters(sorted: &[usize], n: usize, kind: CurveKind) -> usize {
    if sorted.is_empty() {
        return 0;
    }
    let present = |i: usize| sorted.binary_search(&i).is_ok();
    sorted
        .iter()
        .filter(|&&i| match (i, kind) {
            (0, CurveKind::Open) => true,
            (0, CurveKind::Closed) => !present(n - 1),
            _ => !present(i - 1),
        })
        .count()
        // a closed curve covered entirely is one cluster with no start
        .max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossingKind {
    Tangent,
    Transverse,
}

/// One near-coincidence of the trace with itself or another member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub location: Point,
    /// `((curve, s), (curve, s))` of the closest sample pair.
    pub pairs: ((usize, f64), (usize, f64)),
    pub classification: CrossingKind,
    /// Angle between the two tangents, in `[0, π]`.
    pub angle: f64,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    a: (usize, usize),
    b: (usize, usize),
    d: f64,
}

fn cyclic_gap(i: usize, j: usize, n: usize, kind: CurveKind) -> usize {
    let g = i.abs_diff(j);
    match kind {
        CurveKind::Closed => g.min(n - g),
        CurveKind::Open => g,
    }
}

/// Reports every near-coincidence closer than `dist_tol`, merged into one
/// report per contact region, classified by the angle between tangents.
pub fn detect_transverse_crossings(system: &CurveSystem, dist_tol: f64, angle_tol: f64) -> Vec<CrossingReport> {
    let curves = &system.curves;
    let window = |c: usize| -> usize { (2.0 * dist_tol / curves[c].spacing()).ceil() as usize + 1 };
    let mut cands: Vec<Candidate> = Vec::new();
    for (c, curve) in curves.iter().enumerate() {
        for (i, p) in curve.samples().iter().enumerate() {
            system.index.for_near(*p, dist_tol, |c2, j| {
                if (c2, j) <= (c, i) {
                    return;
                }
                if c2 == c && cyclic_gap(i, j, curve.len(), curve.kind()) <= window(c) {
                    return;
                }
                let d = dist(*p, curves[c2].samples()[j]);
                if d < dist_tol {
                    cands.push(Candidate { a: (c, i), b: (c2, j), d });
                }
            });
        }
    }
    // union-find over candidates adjacent in both parameters
    let mut parent: Vec<usize> = (0..cands.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let near = |x: (usize, usize), y: (usize, usize)| -> bool {
        x.0 == y.0 && cyclic_gap(x.1, y.1, curves[x.0].len(), curves[x.0].kind()) <= window(x.0)
    };
    for u in 0..cands.len() {
        for v in (u + 1)..cands.len() {
            let (p, q) = (cands[u], cands[v]);
            if (near(p.a, q.a) && near(p.b, q.b)) || (near(p.a, q.b) && near(p.b, q.a)) {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru.max(rv)] = ru.min(rv);
                }
            }
        }
    }
    let mut best: HashMap<usize, Candidate> = HashMap::new();
    for u in 0..cands.len() {
        let r = find(&mut parent, u);
        let e = best.entry(r).or_insert(cands[u]);
        if cands[u].d < e.d {
            *e = cands[u];
        }
    }
    let mut reports: Vec<CrossingReport> = best
        .into_values()
        .map(|cand| {
            let (ca, ia) = cand.a;
            let (cb, ib) = cand.b;
            let fa = curves[ca].frames()[ia];
            let fb = curves[cb].frames()[ib];
            let dot = (fa.tangent[0] * fb.tangent[0] + fa.tangent[1] * fb.tangent[1]).clamp(-1.0, 1.0);
            let angle = dot.acos();
            let classification = if angle < angle_tol || (std::f64::consts::PI - angle) < angle_tol {
                CrossingKind::Tangent
            } else {
                CrossingKind::Transverse
            };
            let pa = curves[ca].samples()[ia];
            let pb = curves[cb].samples()[ib];
            CrossingReport {
                location: [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])],
                pairs: ((ca, fa.s), (cb, fb.s)),
                classification,
                angle,
            }
        })
        .collect();
    reports.sort_by(|x, y| {
        x.location[0]
            .total_cmp(&y.location[0])
            .then(x.location[1].total_cmp(&y.location[1]))
    });
    reports
}

/// True when the system has no transverse crossing at the default tolerances.
pub fn has_transverse_crossing(system: &CurveSystem) -> bool {
    let tol = default_dist_tol(&system.curves);
    detect_transverse_crossings(system, tol, DEFAULT_ANGLE_TOL)
        .iter()
        .any(|r| r.classification == CrossingKind::Transverse)
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

/// One-sided distance from the samples of `from` to the polyline trace of
/// `to`, or `None` when some sample has no trace point within `reach`.
fn directed_hausdorff(from: &CurveSystem, to: &CurveSystem, reach: f64) -> Option<f64> {
    let mut worst = 0.0f64;
    for curve in &from.curves {
        for p in curve.samples() {
            let mut best = f64::INFINITY;
            to.index.for_near(*p, reach, |c, j| {
                let tc = &to.curves[c];
                let n = tc.len();
                let s = tc.samples();
                best = best.min(point_segment_distance(*p, s[j], s[(j + 1) % n]));
                best = best.min(point_segment_distance(*p, s[(j + n - 1) % n], s[j]));
            });
            if !best.is_finite() || best > reach {
                return None;
            }
            worst = worst.max(best);
        }
    }
    Some(worst)
}

/// Same trace (Hausdorff distance below `tol`) and same multiplicity at
/// every sample of either system.
pub fn systems_equivalent(a: &CurveSystem, b: &CurveSystem, tol: f64) -> bool {
    let reach = tol + a.max_spacing().max(b.max_spacing());
    let h_ab = directed_hausdorff(a, b, reach);
    let h_ba = directed_hausdorff(b, a, reach);
    match (h_ab, h_ba) {
        (Some(x), Some(y)) if x.max(y) < tol => {}
        _ => return false,
    }
    let mtol = 2.0 * a.max_spacing().max(b.max_spacing()) + tol;
    let probes = a.curves.iter().chain(&b.curves).flat_map(|c| c.samples().iter());
    for p in probes {
        if multiplicity_at(a, *p, mtol) != multiplicity_at(b, *p, mtol) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::generators::*;

    #[test]
    fn single_circle_metrics() {
        let sys = CurveSystem::single(circle(1.5, 256).unwrap()).unwrap();
        let m = system_metrics(&sys).unwrap();
        assert!((m.length - 3.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((m.rho.finite().unwrap() - 1.5).abs() < 1e-4);
    }

    #[test]
    fn multiplicity_on_and_off_trace() {
        let sys = CurveSystem::single(circle(1.0, 512).unwrap()).unwrap();
        let tol = 2.0 * sys.max_spacing();
        assert_eq!(multiplicity_at(&sys, [0.0, 1.0], tol), 1);
        assert_eq!(multiplicity_at(&sys, [0.0, 1.1], tol), 0);
    }

    #[test]
    fn closed_cluster_wraps_around_index_zero() {
        assert_eq!(count_clusters(&[0, 1, 7], 8, CurveKind::Closed), 1);
        assert_eq!(count_clusters(&[0, 1, 7], 8, CurveKind::Open), 2);
        assert_eq!(count_clusters(&[2, 3, 5], 8, CurveKind::Closed), 2);
    }

    #[test]
    fn open_curves_are_rejected() {
        let seg = segment(1.0, 32).unwrap();
        assert!(CurveSystem::single(seg).is_err());
    }
}

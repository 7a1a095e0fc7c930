//! The end-cap problem on `ω_L = (−L, 0)×(−1, 1) ∪ B(0, 1)`: ψ harmonic,
//! `ψ = −(1 − y²)/2` on the cap arc and `ψ = 0` on the rest of the boundary.
//! The universal constant is `α = ∫ψ + 3π/16`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curve::Point;
use crate::error::{Error, Result};
use crate::numerics::quadrature::GaussLegendre;
use crate::numerics::sparse::{pcg, TripletBuilder};

/// `∫ φ` over the right half disc, with `φ = (1 − y²)/2`.
pub const CAP_PHI_INTEGRAL: f64 = 3.0 * PI / 16.0;

pub const DEFAULT_L: f64 = 10.0;
pub const DEFAULT_H: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryTag {
    StripSide,
    Truncation,
    CapArc,
}

#[derive(Debug, Clone)]
pub struct CapDomain {
    pub l: f64,
    pub h: f64,
    pub nodes: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub tags: Vec<Option<BoundaryTag>>,
    /// Rows per unit length in `y`; the strip has `2k + 1` node rows.
    k: usize,
    /// Intervals in `x` across the strip.
    nx: usize,
}

impl CapDomain {
    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| tri_area(&self.nodes, t)).sum()
    }

    /// Largest edge length over all triangles.
    pub fn max_diameter(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(a, b)| {
                let (p, q) = (self.nodes[a], self.nodes[b]);
                (p[0] - q[0]).hypot(p[1] - q[1])
            })
            .fold(0.0, f64::max)
    }

    /// Mesh scale `1/k` (radial and `y` step).
    pub fn step(&self) -> f64 {
        1.0 / self.k as f64
    }

    fn rect_index(&self, ix: usize, iy: usize) -> usize {
        ix * (2 * self.k + 1) + iy
    }
}

fn tri_area(nodes: &[Point], t: &[usize; 3]) -> f64 {
    let (a, b, c) = (nodes[t[0]], nodes[t[1]], nodes[t[2]]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs()
}

/// Structured triangulation of the strip joined to concentric half rings in
/// the cap, with every edge no longer than `h`.
pub fn build_cap_domain(l: f64, h: f64) -> Result<CapDomain> {
    if !(l >= 2.0 && l.is_finite()) {
        return Err(Error::MeshFailure(format!("truncation length {l} below 2")));
    }
    if !(h > 0.0 && h <= 0.1) {
        return Err(Error::MeshFailure(format!("mesh size {h} outside (0, 0.1]")));
    }
    // cell diagonals and ring-stitching edges stay below 1.5/k
    let k = (1.5 / h).ceil() as usize;
    let nx = (l * k as f64).ceil() as usize;
    let dx = l / nx as f64;
    let rows = 2 * k + 1;

    let mut nodes = Vec::with_capacity((nx + 1) * rows + 4 * k * k);
    let mut tags = Vec::with_capacity(nodes.capacity());
    for ix in 0..=nx {
        let x = -l + ix as f64 * dx;
        for iy in 0..rows {
            let y = -1.0 + iy as f64 / k as f64;
            let tag = if iy == 0 || iy == rows - 1 {
                if ix == 0 {
                    Some(BoundaryTag::Truncation)
                } else if ix == nx {
                    Some(BoundaryTag::CapArc)
                } else {
                    Some(BoundaryTag::StripSide)
                }
            } else if ix == 0 {
                Some(BoundaryTag::Truncation)
            } else {
                None
            };
            nodes.push([if ix == nx { 0.0 } else { x }, y]);
            tags.push(tag);
        }
    }
    let mut dom = CapDomain { l, h, nodes, triangles: Vec::new(), tags, k, nx };

    let mut tris = Vec::with_capacity(2 * nx * 2 * k + 8 * k * k);
    for ix in 0..nx {
        for iy in 0..rows - 1 {
            let a = dom.rect_index(ix, iy);
            let b = dom.rect_index(ix + 1, iy);
            let c = dom.rect_index(ix + 1, iy + 1);
            let d = dom.rect_index(ix, iy + 1);
            if (ix + iy) % 2 == 0 {
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            } else {
                tris.push([a, b, d]);
                tris.push([b, c, d]);
            }
        }
    }

    // half rings r = j/k, angles from −π/2 to π/2; their ends are strip nodes
    let centre = dom.rect_index(nx, k);
    let mut prev: Vec<usize> = vec![centre];
    let mut prev_angles: Vec<f64> = vec![0.0];
    for j in 1..=k {
        let r = j as f64 / k as f64;
        let m = ((PI * j as f64).ceil() as usize).max(2);
        let mut ring = Vec::with_capacity(m + 1);
        let mut angles = Vec::with_capacity(m + 1);
        for q in 0..=m {
            let th = -0.5 * PI + PI * q as f64 / m as f64;
            angles.push(th);
            if q == 0 {
                ring.push(dom.rect_index(nx, k - j));
            } else if q == m {
                ring.push(dom.rect_index(nx, k + j));
            } else {
                dom.nodes.push([r * th.cos(), r * th.sin()]);
                dom.tags.push((j == k).then_some(BoundaryTag::CapArc));
                ring.push(dom.nodes.len() - 1);
            }
        }
        if prev.len() == 1 {
            for q in 0..m {
                tris.push([centre, ring[q], ring[q + 1]]);
            }
        } else {
            let (mut a, mut b) = (0usize, 0usize);
            let (ma, mb) = (prev.len() - 1, m);
            while a < ma || b < mb {
                let advance_outer = b < mb && (a == ma || angles[b + 1] <= prev_angles[a + 1]);
                if advance_outer {
                    tris.push([prev[a], ring[b], ring[b + 1]]);
                    b += 1;
                } else {
                    tris.push([prev[a], ring[b], prev[a + 1]]);
                    a += 1;
                }
            }
        }
        prev = ring;
        prev_angles = angles;
    }
    dom.triangles = tris;

    if dom.triangles.iter().any(|t| tri_area(&dom.nodes, t) <= 0.0) {
        return Err(Error::MeshFailure("degenerate triangle".into()));
    }
    Ok(dom)
}

/// Boundary value of ψ at a tagged node.
fn boundary_value(tag: BoundaryTag, p: Point) -> f64 {
    match tag {
        BoundaryTag::CapArc => -0.5 * (1.0 - p[1] * p[1]),
        BoundaryTag::StripSide | BoundaryTag::Truncation => 0.0,
    }
}

#[derive(Debug, Clone)]
pub struct CapSolution {
    pub domain: CapDomain,
    pub psi: Vec<f64>,
    pub integral_psi: f64,
    pub alpha_estimate: f64,
    pub iterations: usize,
}

impl CapSolution {
    /// `max_y |ψ(x, y)|` along the vertical line at `x` inside the strip,
    /// interpolating linearly between node columns.
    pub fn max_abs_on_line(&self, x: f64) -> f64 {
        let d = &self.domain;
        let pos = ((x + d.l) / d.l * d.nx as f64).clamp(0.0, d.nx as f64);
        let i0 = (pos.floor() as usize).min(d.nx - 1);
        let w = pos - i0 as f64;
        (0..2 * d.k + 1)
            .map(|iy| {
                let a = self.psi[d.rect_index(i0, iy)];
                let b = self.psi[d.rect_index(i0 + 1, iy)];
                ((1.0 - w) * a + w * b).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Piecewise-linear finite-element solve of the cap problem.
pub fn solve_cap_psi(domain: &CapDomain) -> Result<CapSolution> {
    let n = domain.nodes.len();
    let mut fixed = vec![None; n];
    let mut free = vec![usize::MAX; n];
    let mut nfree = 0;
    for (p, tag) in domain.tags.iter().enumerate() {
        match tag {
            Some(t) => fixed[p] = Some(boundary_value(*t, domain.nodes[p])),
            None => {
                free[p] = nfree;
                nfree += 1;
            }
        }
    }
    if nfree == 0 {
        return Err(Error::SingularSystem("no interior nodes".into()));
    }
    let mut rhs = vec![0.0; nfree];
    let mut tb = TripletBuilder::with_capacity(nfree, 7 * nfree);
    for t in &domain.triangles {
        let p: Vec<Point> = t.iter().map(|&i| domain.nodes[i]).collect();
        let area = tri_area(&domain.nodes, t);
        let b = [p[1][1] - p[2][1], p[2][1] - p[0][1], p[0][1] - p[1][1]];
        let c = [p[2][0] - p[1][0], p[0][0] - p[2][0], p[1][0] - p[0][0]];
        for a in 0..3 {
            let fa = free[t[a]];
            if fa == usize::MAX {
                continue;
            }
            for q in 0..3 {
                let v = (b[a] * b[q] + c[a] * c[q]) / (4.0 * area);
                match fixed[t[q]] {
                    Some(g) => rhs[fa] -= v * g,
                    None => tb.add(fa, free[t[q]], v),
                }
            }
        }
    }
    let a = tb.build();
    let mut x = vec![0.0; nfree];
    let cap = 50 * ((nfree as f64).sqrt().ceil() as usize).max(20);
    let stats = pcg(&a, &rhs, &mut x, 1e-11, cap)?;
    let psi: Vec<f64> = (0..n)
        .map(|p| fixed[p].unwrap_or_else(|| x[free[p]]))
        .collect();
    let integral_psi: f64 = domain
        .triangles
        .iter()
        .map(|t| tri_area(&domain.nodes, t) * (psi[t[0]] + psi[t[1]] + psi[t[2]]) / 3.0)
        .sum();
    Ok(CapSolution {
        domain: domain.clone(),
        psi,
        integral_psi,
        alpha_estimate: integral_psi + CAP_PHI_INTEGRAL,
        iterations: stats.iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub alpha: f64,
    pub error_budget: f64,
    /// Estimates on the coarse and fine mesh.
    pub coarse: f64,
    pub fine: f64,
    pub l: f64,
    pub h: f64,
}

/// Richardson extrapolation over meshes `h` and `h/2` at fixed `L`. The
/// budget adds the extrapolation correction and the truncation bound `4e^{−L}`.
pub fn alpha_constant(h: f64, l: f64) -> Result<AlphaEstimate> {
    let (coarse_dom, fine_dom) = rayon::join(|| build_cap_domain(l, h), || build_cap_domain(l, 0.5 * h));
    let (coarse_dom, fine_dom) = (coarse_dom?, fine_dom?);
    let (coarse, fine) = rayon::join(|| solve_cap_psi(&coarse_dom), || solve_cap_psi(&fine_dom));
    let (coarse, fine) = (coarse?, fine?);
    let ratio = coarse_dom.step() / fine_dom.step();
    let correction = (fine.alpha_estimate - coarse.alpha_estimate) / (ratio * ratio - 1.0);
    Ok(AlphaEstimate {
        alpha: fine.alpha_estimate + correction,
        error_budget: correction.abs() + 4.0 * (-l).exp(),
        coarse: coarse.alpha_estimate,
        fine: fine.alpha_estimate,
        l,
        h,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayStation {
    pub x: f64,
    pub max_abs_psi: f64,
    pub bound: f64,
    pub margin: f64,
}

/// Compares `max_y |ψ(x, ·)|` with `4e^{−|x|}` at `x = −1, −2, …, −⌊L⌋ + 1`.
pub fn decay_check(solution: &CapSolution) -> Vec<DecayStation> {
    let last = solution.domain.l.floor() as i64 - 1;
    (1..=last)
        .map(|m| {
            let x = -(m as f64);
            let max_abs_psi = solution.max_abs_on_line(x);
            let bound = 4.0 * x.abs().neg_exp();
            DecayStation { x, max_abs_psi, bound, margin: bound - max_abs_psi }
        })
        .collect()
}

trait NegExp {
    fn neg_exp(self) -> f64;
}

impl NegExp for f64 {
    fn neg_exp(self) -> f64 {
        (-self).exp()
    }
}

/// Modes `c·e^{kx}cos(ky)` of the comparison function.
pub const COMPARISON_MODES: [(f64, f64); 4] = [
    (-0.112, 0.5 * PI),
    (0.0019, 1.5 * PI),
    (-0.00008, 2.5 * PI),
    (-0.056, 1.0),
];

pub fn comparison_psi(x: f64, y: f64) -> f64 {
    COMPARISON_MODES.iter().map(|&(c, k)| c * (k * x).exp() * (k * y).cos()).sum()
}

/// `Δψ̃` from the analytic second derivatives of each mode.
pub fn comparison_laplacian(x: f64, y: f64) -> f64 {
    COMPARISON_MODES
        .iter()
        .map(|&(c, k)| {
            let m = c * (k * x).exp() * (k * y).cos();
            k * k * m - k * k * m
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// `∫ψ̃` over the half-infinite strip, in closed form.
    pub strip_integral: f64,
    /// `∫ψ̃` over the right half disc.
    pub cap_integral: f64,
    pub integral: f64,
    /// `3π/16 + ∫ψ̃`.
    pub lower_bound: f64,
    pub positive: bool,
}

pub fn comparison_bound() -> ComparisonReport {
    // ∫_{−∞}^0 e^{kx} dx · ∫_{−1}^1 cos(ky) dy = (1/k)(2 sin k / k)
    let strip_integral: f64 = COMPARISON_MODES
        .iter()
        .map(|&(c, k)| c * 2.0 * k.sin() / (k * k))
        .sum();
    let gl = GaussLegendre::new(48);
    let cap_integral = gl.integrate(0.0, 1.0, |r| {
        r * gl.integrate(-0.5 * PI, 0.5 * PI, |th| comparison_psi(r * th.cos(), r * th.sin()))
    });
    let integral = strip_integral + cap_integral;
    let lower_bound = CAP_PHI_INTEGRAL + integral;
    ComparisonReport { strip_integral, cap_integral, integral, lower_bound, positive: lower_bound > 0.0 }
}

/// Smallest `ψ − ψ̃` over boundary nodes, using the exact boundary data of ψ.
pub fn boundary_comparison(domain: &CapDomain) -> f64 {
    domain
        .tags
        .iter()
        .zip(&domain.nodes)
        .filter_map(|(t, p)| t.map(|t| boundary_value(t, *p) - comparison_psi(p[0], p[1])))
        .fold(f64::INFINITY, f64::min)
}

use serde::{Deserialize, Serialize};

use super::grid::{morphological_close, OccupancyGrid};
use super::plan::{rings_simple, signed_area, FloorPlan, Provenance};
use super::extract_boundary;
use crate::geometry::exact::Snap;
use crate::geometry::{convex_hull, point_segment_distance, Point2};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimplificationMethod {
    DouglasPeucker,
    Rectilinear,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplificationConfig {
    pub tolerance: f64,
    pub closing_radius: usize,
    pub method: SimplificationMethod,
}

impl Default for SimplificationConfig {
    fn default() -> Self {
        SimplificationConfig { tolerance: 0.1, closing_radius: 2, method: SimplificationMethod::Rectilinear }
    }
}

/// Largest distance from a vertex of `input` to the boundary of `output`.
pub fn hausdorff_to_ring(input: &[Point2], output: &[Point2]) -> f64 {
    let m = output.len();
    input
        .iter()
        .map(|&p| (0..m).map(|i| point_segment_distance(p, output[i], output[(i + 1) % m])).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

fn is_simple_ring(ring: &[Point2]) -> bool {
    ring.len() >= 3 && rings_simple(&[ring.iter().map(|&p| Snap::of(p)).collect()]).is_ok()
}

fn dp_chain(pts: &[Point2], tol: f64, keep: &mut Vec<bool>, lo: usize, hi: usize) {
    if hi <= lo + 1 {
        return;
    }
    let (a, b) = (pts[lo], pts[hi % pts.len()]);
    let mut best = (0.0, lo);
    for k in lo + 1..hi {
        let d = point_segment_distance(pts[k], a, b);
        if d > best.0 {
            best = (d, k);
        }
    }
    if best.0 > tol {
        keep[best.1] = true;
        dp_chain(pts, tol, keep, lo, best.1);
        dp_chain(pts, tol, keep, best.1, hi);
    }
}

/// Douglas-Peucker on a closed ring, split at two mutually far vertices.
pub fn simplify_douglas_peucker(polyline: &[Point2], tolerance: f64) -> Result<FloorPlan> {
    if polyline.len() < 3 {
        return Err(Error::Simplification("ring needs at least 3 vertices".into()));
    }
    if !(tolerance >= 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tolerance} is negative")));
    }
    if tolerance == 0.0 {
        return finish(polyline.to_vec(), Provenance::DouglasPeucker);
    }
    let n = polyline.len();
    let far = |from: Point2| (0..n).max_by(|&i, &j| from.dist2(polyline[i]).total_cmp(&from.dist2(polyline[j]))).unwrap();
    let a = far(polyline[0]);
    let b = far(polyline[a]);
    let pts: Vec<Point2> = (0..n).map(|k| polyline[(a + k) % n]).collect();
    let bi = (b + n - a) % n;
    let mut keep = vec![false; n];
    keep[0] = true;
    keep[bi] = true;
    dp_chain(&pts, tolerance, &mut keep, 0, bi);
    dp_chain(&pts, tolerance, &mut keep, bi, n);
    let out: Vec<Point2> = pts.iter().zip(&keep).filter(|(_, &k)| k).map(|(&p, _)| p).collect();
    if out.len() < 3 {
        return Err(Error::Simplification(format!("only {} vertices left", out.len())));
    }
    finish(out, Provenance::DouglasPeucker)
}

fn finish(ring: Vec<Point2>, prov: Provenance) -> Result<FloorPlan> {
    if !is_simple_ring(&ring) {
        return Err(Error::Simplification("result is self-intersecting".into()));
    }
    FloorPlan::new(ring, vec![], prov).map_err(|e| Error::Simplification(e.to_string()))
}

/// Orientation in `[0, π/2)` of the minimum-area bounding rectangle.
pub fn rectilinear_frame(ring: &[Point2]) -> f64 {
    let hull = convex_hull(ring);
    let m = hull.len();
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..m {
        let e = hull[(i + 1) % m] - hull[i];
        if e.norm2() == 0.0 {
            continue;
        }
        let ang = e.angle().rem_euclid(std::f64::consts::FRAC_PI_2);
        let (lox, hix, loy, hiy) = hull.iter().map(|p| p.rotate(-ang)).fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), p| (a.min(p.x), b.max(p.x), c.min(p.y), d.max(p.y)),
        );
        let area = (hix - lox) * (hiy - loy);
        if area < best.0 * (1.0 - 1e-12) {
            best = (area, ang);
        }
    }
    let a = best.1;
    if (a - std::f64::consts::FRAC_PI_2).abs() < 1e-12 {
        0.0
    } else {
        a
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Axis {
    H,
    V,
}

/// A maximal group of consecutive edges of one axis; `verts` are the
/// input vertices it spans.
struct Run {
    axis: Axis,
    verts: Vec<Point2>,
}

impl Run {
    fn coord(&self, p: Point2) -> f64 {
        match self.axis {
            Axis::H => p.y,
            Axis::V => p.x,
        }
    }
}

fn axis_of(a: Point2, b: Point2) -> Axis {
    let d = b - a;
    if d.x.abs() >= d.y.abs() {
        Axis::H
    } else {
        Axis::V
    }
}

/// Split runs whose level spread exceeds `2·tol` and insert connectors so
/// axes keep alternating.
fn build_runs(ring: &[Point2], tol: f64) -> Vec<(Axis, f64)> {
    let n = ring.len();
    let axes: Vec<Axis> = (0..n).map(|i| axis_of(ring[i], ring[(i + 1) % n])).collect();
    let start = (0..n).find(|&i| axes[i] != axes[(i + n - 1) % n]).unwrap_or(0);
    let mut runs: Vec<Run> = Vec::new();
    for k in 0..n {
        let i = (start + k) % n;
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        match runs.last_mut() {
            Some(r) if r.axis == axes[i] => {
                r.verts.push(b);
            }
            _ => runs.push(Run { axis: axes[i], verts: vec![a, b] }),
        }
    }
    let mut levels: Vec<(Axis, f64)> = Vec::new();
    for r in &runs {
        let other = if r.axis == Axis::H { Axis::V } else { Axis::H };
        let c0 = r.coord(r.verts[0]);
        let (mut lo, mut hi) = (c0, c0);
        for k in 1..r.verts.len() {
            let c = r.coord(r.verts[k]);
            if c.max(hi) - c.min(lo) > 2.0 * tol {
                let joint = r.verts[k - 1];
                levels.push((r.axis, 0.5 * (lo + hi)));
                levels.push((other, if other == Axis::H { joint.y } else { joint.x }));
                let cj = r.coord(joint);
                lo = cj.min(c);
                hi = cj.max(c);
            } else {
                lo = lo.min(c);
                hi = hi.max(c);
            }
        }
        levels.push((r.axis, 0.5 * (lo + hi)));
    }
    // Adjacent equal axes can appear at the wrap-around; fold them.
    let mut merged: Vec<(Axis, f64)> = Vec::new();
    for l in levels {
        match merged.last_mut() {
            Some(m) if m.0 == l.0 => m.1 = 0.5 * (m.1 + l.1),
            _ => merged.push(l),
        }
    }
    while merged.len() > 1 && merged[0].0 == merged[merged.len() - 1].0 {
        let l = merged.pop().unwrap();
        merged[0].1 = 0.5 * (merged[0].1 + l.1);
    }
    merged
}

/// Corners of the alternating-axis polygon given by run levels.
fn corners(levels: &[(Axis, f64)]) -> Vec<Point2> {
    let m = levels.len();
    (0..m)
        .map(|i| {
            let (a, la) = levels[i];
            let (_, lb) = levels[(i + 1) % m];
            match a {
                Axis::H => Point2::new(lb, la),
                Axis::V => Point2::new(la, lb),
            }
        })
        .collect()
}

fn drop_degenerate(ring: Vec<Point2>) -> Vec<Point2> {
    let mut out: Vec<Point2> = ring;
    loop {
        let n = out.len();
        if n < 4 {
            return out;
        }
        let mut changed = false;
        let mut keep = Vec::with_capacity(n);
        for i in 0..n {
            let p = out[(i + n - 1) % n];
            let q = out[i];
            let r = out[(i + 1) % n];
            if q.dist(r) < 1e-12 || ((q - p).cross(r - q)).abs() < 1e-18 {
                changed = true;
                continue;
            }
            keep.push(q);
        }
        out = keep;
        if !changed {
            return out;
        }
    }
}

/// Axis-aligned approximation of a ring in the frame of its minimum-area
/// bounding rectangle. Every input vertex ends up within `tolerance` of the
/// output boundary; short staircase steps are collapsed greedily.
pub fn simplify_rectilinear(polyline: &[Point2], tolerance: f64) -> Result<FloorPlan> {
    if polyline.len() < 3 {
        return Err(Error::Simplification("ring needs at least 3 vertices".into()));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tolerance} must be positive")));
    }
    let theta = rectilinear_frame(polyline);
    let local: Vec<Point2> = polyline.iter().map(|p| p.rotate(-theta)).collect();
    let levels = build_runs(&local, tolerance);
    if levels.len() < 4 {
        return Err(Error::RectilinearFit { best_deviation: f64::INFINITY });
    }
    let mut ring = drop_degenerate(corners(&levels));
    if signed_area(&ring) < 0.0 {
        ring.reverse();
    }
    ring = collapse_steps(ring, &local, tolerance);
    let dev = hausdorff_to_ring(&local, &ring);
    if dev > tolerance * (1.0 + 1e-9) || ring.len() < 4 || !is_simple_ring(&ring) {
        return Err(Error::RectilinearFit { best_deviation: dev });
    }
    let world: Vec<Point2> = ring.iter().map(|p| p.rotate(theta)).collect();
    FloorPlan::new(world, vec![], Provenance::Rectilinear).map_err(|e| Error::Simplification(e.to_string()))
}

/// Greedily remove the shortest edge joining two same-direction parallel
/// edges while the deviation bound and simplicity survive.
fn collapse_steps(mut ring: Vec<Point2>, input: &[Point2], tol: f64) -> Vec<Point2> {
    loop {
        let n = ring.len();
        if n <= 4 {
            return ring;
        }
        let mut cands: Vec<(f64, usize)> = (0..n)
            .map(|i| (ring[i].dist(ring[(i + 1) % n]), i))
            .filter(|&(l, _)| l < 2.0 * tol)
            .collect();
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut applied = false;
        'cand: for (_, i) in cands {
            let p0 = ring[(i + n - 1) % n];
            let p1 = ring[i];
            let p2 = ring[(i + 1) % n];
            let p3 = ring[(i + 2) % n];
            let d0 = p1 - p0;
            let d2 = p3 - p2;
            if d0.dot(d2) <= 0.0 || d0.cross(d2).abs() > 1e-9 * d0.norm() * d2.norm() {
                continue;
            }
            let horizontal = d0.x.abs() >= d0.y.abs();
            let la = if horizontal { p1.y } else { p1.x };
            let lb = if horizontal { p2.y } else { p2.x };
            for level in [la, lb, 0.5 * (la + lb)] {
                let set = |p: Point2| if horizontal { Point2::new(p.x, level) } else { Point2::new(level, p.y) };
                let mut next: Vec<Point2> = Vec::with_capacity(n - 2);
                for k in 0..n {
                    if k == i || k == (i + 1) % n {
                        continue;
                    }
                    if k == (i + n - 1) % n || k == (i + 2) % n {
                        next.push(set(ring[k]));
                    } else {
                        next.push(ring[k]);
                    }
                }
                let next = drop_degenerate(next);
                if next.len() >= 4 && is_simple_ring(&next) && hausdorff_to_ring(input, &next) <= tol {
                    ring = next;
                    applied = true;
                    break 'cand;
                }
            }
        }
        if !applied {
            return ring;
        }
    }
}

/// Occupancy grid to floor plan: close, trace, simplify the largest outer
/// contour and every hole contour inside it.
pub fn vectorize(grid: &OccupancyGrid, cfg: &SimplificationConfig) -> Result<FloorPlan> {
    let closed = morphological_close(grid, cfg.closing_radius);
    let contours = extract_boundary(&closed)?;
    let simplify = |r: &[Point2]| match cfg.method {
        SimplificationMethod::DouglasPeucker => simplify_douglas_peucker(r, cfg.tolerance),
        SimplificationMethod::Rectilinear => simplify_rectilinear(r, cfg.tolerance),
    };
    let outer = simplify(&contours[0])?;
    let mut plan = outer.clone();
    for c in contours.iter().skip(1).filter(|c| signed_area(c) < 0.0) {
        match simplify(c).and_then(|h| plan.with_holes(vec![h.outer().to_vec()])) {
            Ok(p) => plan = p,
            Err(e) => log::warn!("dropping obstacle contour with {} vertices: {e}", c.len()),
        }
    }
    Ok(plan)
}

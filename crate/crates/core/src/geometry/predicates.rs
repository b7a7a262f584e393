use super::exact::{self, Snap};
use super::Point2;
use crate::{Error, FloorPlan, Result};

/// Point-in-region test; boundary points count as inside.
pub fn contains(plan: &FloorPlan, p: Point2) -> bool {
    exact::ring_contains(plan.snapped_rings(), Snap::of(p), 1)
}

/// True iff the open segment `ab` stays inside the closed region.
///
/// Touching a vertex or running along a wall is allowed; crossing a wall or
/// passing through exterior space is not.
pub fn segment_clear(plan: &FloorPlan, a: Point2, b: Point2) -> bool {
    let sa = Snap::of(a);
    let sb = Snap::of(b);
    if sa == sb {
        return true;
    }
    let (lx, hx) = (sa.x.min(sb.x), sa.x.max(sb.x));
    let (ly, hy) = (sa.y.min(sb.y), sa.y.max(sb.y));
    let mut cuts = vec![sa, sb];
    for e in plan.edges() {
        if e.sa.x.max(e.sb.x) < lx || e.sa.x.min(e.sb.x) > hx || e.sa.y.max(e.sb.y) < ly || e.sa.y.min(e.sb.y) > hy {
            continue;
        }
        if exact::proper_cross(sa, sb, e.sa, e.sb) {
            return false;
        }
        if exact::in_open_segment(sa, sb, e.sa) {
            cuts.push(e.sa);
        }
    }
    let (dx, dy) = ((sb.x - sa.x) as i128, (sb.y - sa.y) as i128);
    cuts.sort_by_key(|c| (c.x - sa.x) as i128 * dx + (c.y - sa.y) as i128 * dy);
    cuts.dedup();
    let rings = plan.snapped_rings();
    cuts.windows(2).all(|w| exact::ring_contains(rings, w[0].sum(w[1]), 2))
}

/// Lamp at `u` lights `v`: the segment is clear and `v` is outside the
/// shadow disk of radius `shadow_radius`.
pub fn visible(plan: &FloorPlan, u: Point2, v: Point2, shadow_radius: f64) -> Result<bool> {
    if !(shadow_radius >= 0.0) {
        return Err(Error::InvalidParameter(format!("shadow radius {shadow_radius} is negative")));
    }
    Ok(u.dist(v) > shadow_radius && segment_clear(plan, u, v))
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let l2 = ab.norm2();
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / l2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayHit {
    pub edge: usize,
    /// Distance along the (unit) ray direction.
    pub t: f64,
}

const PARAM_TOL: f64 = 1e-9;

/// All boundary edges hit first by the ray `o + t·dir`, `dir` a unit vector.
///
/// Several edges tie when the ray meets a vertex. Rays that only graze a
/// vertex and continue inside the room do not stop there.
pub fn first_hits(plan: &FloorPlan, o: Point2, dir: Point2) -> Vec<RayHit> {
    let mut hits: Vec<RayHit> = Vec::new();
    for (i, e) in plan.edges().iter().enumerate() {
        let ev = e.b - e.a;
        let denom = dir.cross(ev);
        if denom.abs() <= 1e-14 * e.len {
            continue;
        }
        let w = e.a - o;
        let t = w.cross(ev) / denom;
        let s = w.cross(dir) / denom;
        if t <= 1e-12 || s < -PARAM_TOL || s > 1.0 + PARAM_TOL {
            continue;
        }
        if s < PARAM_TOL || s > 1.0 - PARAM_TOL {
            let step = 1e-7 * t.max(1.0);
            let after = o + dir * (t + step);
            let before = o + dir * (t - step).max(0.0);
            if contains(plan, after) && contains(plan, before) && plan.boundary_distance(after) > 0.5 * step {
                continue;
            }
        }
        hits.push(RayHit { edge: i, t });
    }
    let tmin = hits.iter().map(|h| h.t).fold(f64::INFINITY, f64::min);
    hits.retain(|h| h.t <= tmin * (1.0 + 1e-9) + 1e-12);
    hits
}

/// Nearest boundary hit of a ray, if any.
pub fn ray_cast(plan: &FloorPlan, o: Point2, dir: Point2) -> Option<RayHit> {
    first_hits(plan, o, dir).into_iter().next()
}

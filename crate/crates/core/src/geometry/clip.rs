//! Small convex-polygon helpers used by the cell bounds.

use super::{point_segment_distance, Point2};

pub fn polygon_area(ring: &[Point2]) -> f64 {
    crate::floorplan::signed_area(ring)
}

pub fn polygon_centroid(ring: &[Point2]) -> Point2 {
    let n = ring.len();
    let o = ring[0];
    let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let p = ring[i] - o;
        let q = ring[(i + 1) % n] - o;
        let c = p.cross(q);
        a2 += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    if a2.abs() < 1e-18 {
        let s = ring.iter().fold(Point2::default(), |s, &p| s + p);
        return s * (1.0 / n as f64);
    }
    o + Point2::new(cx / (3.0 * a2), cy / (3.0 * a2))
}

/// Clip a convex polygon to the half-plane `(p - a)·n >= 0`.
pub fn clip_convex(poly: &[Point2], a: Point2, n: Point2) -> Vec<Point2> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let m = poly.len();
    for i in 0..m {
        let p = poly[i];
        let q = poly[(i + 1) % m];
        let fp = (p - a).dot(n);
        let fq = (q - a).dot(n);
        if fp >= 0.0 {
            out.push(p);
        }
        if (fp >= 0.0) != (fq >= 0.0) {
            let t = fp / (fp - fq);
            out.push(p.lerp(q, t));
        }
    }
    out
}

/// Counterclockwise convex hull without collinear points.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| a.dist2(*b) < 1e-24);
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: Point2, a: Point2, b: Point2| (a - o).cross(b - o);
    let mut lower: Vec<Point2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Whether segment `ab` reaches more than `tol` into the interior of the
/// counterclockwise convex polygon `hull`.
pub fn intrudes_open_interior(hull: &[Point2], a: Point2, b: Point2, tol: f64) -> bool {
    let m = hull.len();
    if m < 3 {
        return false;
    }
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let d = b - a;
    for i in 0..m {
        let p = hull[i];
        let q = hull[(i + 1) % m];
        let e = q - p;
        let l = e.norm();
        if l == 0.0 {
            continue;
        }
        // f(t) = offset of a + t·d to the left of pq, minus tol; need f > 0.
        let f0 = e.cross(a - p) / l - tol;
        let df = e.cross(d) / l;
        if df.abs() < 1e-300 {
            if f0 <= 0.0 {
                return false;
            }
            continue;
        }
        let tz = -f0 / df;
        if df > 0.0 {
            t0 = t0.max(tz);
        } else {
            t1 = t1.min(tz);
        }
        if t0 >= t1 {
            return false;
        }
    }
    t1 - t0 > 1e-12
}

/// Distance from `p` to a counterclockwise convex polygon, zero inside.
pub fn distance_to_convex(p: Point2, poly: &[Point2]) -> f64 {
    let m = poly.len();
    let mut inside = true;
    let mut best = f64::INFINITY;
    for i in 0..m {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        if (b - a).cross(p - a) < 0.0 {
            inside = false;
        }
        best = best.min(point_segment_distance(p, a, b));
    }
    if inside && m >= 3 {
        0.0
    } else {
        best
    }
}

/// Closest point of a convex polygon's boundary to `p`.
pub fn nearest_on_convex(p: Point2, poly: &[Point2]) -> Point2 {
    let m = poly.len();
    let mut best = (f64::INFINITY, poly[0]);
    for i in 0..m {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        let ab = b - a;
        let l2 = ab.norm2();
        let t = if l2 > 0.0 { ((p - a).dot(ab) / l2).clamp(0.0, 1.0) } else { 0.0 };
        let q = a + ab * t;
        let d = p.dist2(q);
        if d < best.0 {
            best = (d, q);
        }
    }
    best.1
}

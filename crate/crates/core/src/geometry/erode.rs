use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{clip_convex, contains, Bbox, Point2};
use crate::FloorPlan;

/// Points of the plan at least `robot_radius` away from every wall.
///
/// The region is kept implicit: membership is decided against the original
/// boundary, so it is exact for any radius and handles splits into several
/// components without polygon offsetting.
#[derive(Clone, Debug)]
pub struct GuardRegion {
    plan: FloorPlan,
    robot_radius: f64,
}

pub fn erode(plan: &FloorPlan, radius: f64) -> GuardRegion {
    GuardRegion { plan: plan.clone(), robot_radius: radius.max(0.0) }
}

const CLEARANCE_TOL: f64 = 1e-12;

impl GuardRegion {
    pub fn plan(&self) -> &FloorPlan {
        &self.plan
    }

    pub fn robot_radius(&self) -> f64 {
        self.robot_radius
    }

    pub fn contains(&self, p: Point2) -> bool {
        contains(&self.plan, p)
            && (self.robot_radius == 0.0 || self.plan.boundary_distance(p) >= self.robot_radius - CLEARANCE_TOL)
    }

    /// Signed clearance: distance to the boundary, negative outside the plan.
    pub fn clearance(&self, p: Point2) -> f64 {
        let d = self.plan.boundary_distance(p);
        if contains(&self.plan, p) {
            d
        } else {
            -d
        }
    }

    /// A convex polygon containing `poly ∩ region`, cut back from each wall
    /// whose span covers the polygon. Empty when the two are disjoint.
    pub fn clip_convex_superset(&self, poly: &[Point2]) -> Vec<Point2> {
        let r = self.robot_radius - CLEARANCE_TOL;
        let mut k = poly.to_vec();
        if r <= 0.0 {
            return k;
        }
        for e in self.plan.edges() {
            if k.len() < 3 {
                return Vec::new();
            }
            let dir = (e.b - e.a) * (1.0 / e.len);
            // Inside the slab over the edge with |offset| < r means within r
            // of the wall itself.
            let spanned = k.iter().all(|&p| {
                let s = (p - e.a).dot(dir);
                (0.0..=e.len).contains(&s) && e.line_offset(p) > -r
            });
            if spanned {
                k = clip_convex(&k, e.a + e.normal * r, e.normal);
            }
        }
        if k.len() < 3 {
            Vec::new()
        } else {
            k
        }
    }

    /// Bounding box of the region; it lies inside the plan's box inset by the radius.
    pub fn bbox(&self) -> Bbox {
        self.plan.bbox().inset(self.robot_radius)
    }

    /// Largest clearance of any point in the plan and a point attaining it,
    /// to within `precision`.
    pub fn max_clearance(&self, precision: f64) -> (f64, Point2) {
        pole_of_inaccessibility(self, precision, None)
    }

    pub fn is_empty(&self) -> bool {
        let b = self.bbox();
        if b.width() < 0.0 || b.height() < 0.0 {
            return true;
        }
        if self.robot_radius == 0.0 {
            return false;
        }
        let (best, _) = pole_of_inaccessibility(self, 1e-9, Some(self.robot_radius));
        best < self.robot_radius - CLEARANCE_TOL
    }
}

struct Cell {
    c: Point2,
    h: f64,
    d: f64,
    max: f64,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.max == o.max
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> Ordering {
        self.max.total_cmp(&o.max)
    }
}

fn pole_of_inaccessibility(g: &GuardRegion, precision: f64, stop_at: Option<f64>) -> (f64, Point2) {
    let b = g.plan.bbox();
    let size = b.width().max(b.height());
    let h = size / 2.0;
    let mk = |c: Point2, h: f64| {
        let d = g.clearance(c);
        Cell { c, h, d, max: d + h * std::f64::consts::SQRT_2 }
    };
    let mut heap = BinaryHeap::new();
    let mut x = b.min.x;
    while x < b.max.x {
        let mut y = b.min.y;
        while y < b.max.y {
            heap.push(mk(Point2::new(x + h, y + h), h));
            y += size;
        }
        x += size;
    }
    let mut best = mk(b.min.mid(b.max), 0.0);
    while let Some(cell) = heap.pop() {
        if cell.d > best.d {
            best = Cell { c: cell.c, h: cell.h, d: cell.d, max: cell.max };
        }
        if stop_at.is_some_and(|t| best.d >= t - CLEARANCE_TOL) {
            break;
        }
        if cell.max - best.d <= precision {
            continue;
        }
        let h2 = cell.h / 2.0;
        for (dx, dy) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
            heap.push(mk(Point2::new(cell.c.x + dx * h2, cell.c.y + dy * h2), h2));
        }
    }
    (best.d, best.c)
}

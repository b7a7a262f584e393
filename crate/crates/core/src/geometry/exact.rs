//! Integer predicates on the 1e-9 m snapping lattice.

use super::Point2;

const SCALE: f64 = 1e9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Snap {
    pub x: i64,
    pub y: i64,
}

impl Snap {
    pub fn of(p: Point2) -> Snap {
        Snap {
            x: (p.x * SCALE).round() as i64,
            y: (p.y * SCALE).round() as i64,
        }
    }

    pub fn scaled(self, k: i64) -> Snap {
        Snap { x: self.x * k, y: self.y * k }
    }

    pub fn sum(self, o: Snap) -> Snap {
        Snap { x: self.x + o.x, y: self.y + o.y }
    }
}

/// Sign of the cross product (b - a) x (c - a).
pub(crate) fn orient(a: Snap, b: Snap, c: Snap) -> i32 {
    let v = (b.x - a.x) as i128 * (c.y - a.y) as i128 - (b.y - a.y) as i128 * (c.x - a.x) as i128;
    v.signum() as i32
}

/// c lies on the closed segment ab.
pub(crate) fn on_segment(a: Snap, b: Snap, c: Snap) -> bool {
    orient(a, b, c) == 0
        && c.x >= a.x.min(b.x)
        && c.x <= a.x.max(b.x)
        && c.y >= a.y.min(b.y)
        && c.y <= a.y.max(b.y)
}

/// c lies strictly inside the open segment ab.
pub(crate) fn in_open_segment(a: Snap, b: Snap, c: Snap) -> bool {
    on_segment(a, b, c) && c != a && c != b
}

/// Segments ab and cd cross at a single point interior to both.
pub(crate) fn proper_cross(a: Snap, b: Snap, c: Snap, d: Snap) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    o1 * o2 < 0 && o3 * o4 < 0
}

/// Closed segments ab and cd share at least one point.
pub(crate) fn segments_touch(a: Snap, b: Snap, c: Snap, d: Snap) -> bool {
    if proper_cross(a, b, c, d) {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

/// Crossing-parity containment against a set of rings, coordinates of the
/// rings multiplied by `k` first. Points on an edge count as inside.
pub(crate) fn ring_contains(rings: &[Vec<Snap>], p: Snap, k: i64) -> bool {
    let mut inside = false;
    for ring in rings {
        let n = ring.len();
        for i in 0..n {
            let a = ring[i].scaled(k);
            let b = ring[(i + 1) % n].scaled(k);
            if on_segment(a, b, p) {
                return true;
            }
            if (a.y > p.y) != (b.y > p.y) {
                let o = orient(a, b, p);
                let right = if b.y > a.y { o > 0 } else { o < 0 };
                if right {
                    inside = !inside;
                }
            }
        }
    }
    inside
}

use super::exact::{self, Snap};
use super::{segment_clear, Point2};
use crate::{Error, FloorPlan, Result};

/// Counterclockwise triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triangle {
    pub a: Point2,
    pub b: Point2,
    pub c: Point2,
}

impl Triangle {
    pub fn vertices(&self) -> [Point2; 3] {
        [self.a, self.b, self.c]
    }

    pub fn area(&self) -> f64 {
        0.5 * (self.b - self.a).cross(self.c - self.a)
    }

    pub fn centroid(&self) -> Point2 {
        Point2::new((self.a.x + self.b.x + self.c.x) / 3.0, (self.a.y + self.b.y + self.c.y) / 3.0)
    }

    /// Halve the triangle through the midpoint of its longest edge.
    pub fn bisect(&self) -> (Triangle, Triangle) {
        let (a, b, c) = (self.a, self.b, self.c);
        let lab = a.dist2(b);
        let lbc = b.dist2(c);
        let lca = c.dist2(a);
        if lab >= lbc && lab >= lca {
            let m = a.mid(b);
            (Triangle { a, b: m, c }, Triangle { a: m, b, c })
        } else if lbc >= lca {
            let m = b.mid(c);
            (Triangle { a, b, c: m }, Triangle { a, b: m, c })
        } else {
            let m = c.mid(a);
            (Triangle { a, b, c: m }, Triangle { a: m, b, c })
        }
    }
}

/// Interior cone test at vertex `v` with ring neighbours `prev`, `next`
/// (room on the left): direction to `q` lies strictly inside the room angle.
fn in_cone(prev: Snap, v: Snap, next: Snap, q: Snap) -> bool {
    if exact::orient(prev, v, next) >= 0 {
        exact::orient(v, q, prev) > 0 && exact::orient(q, v, next) > 0
    } else {
        !(exact::orient(v, q, next) >= 0 && exact::orient(q, v, prev) >= 0)
    }
}

struct Ring {
    pts: Vec<Point2>,
    snaps: Vec<Snap>,
}

fn bridge_holes(plan: &FloorPlan) -> Result<Ring> {
    let mut pts: Vec<Point2> = plan.outer().to_vec();
    let mut ring: Vec<usize> = (0..pts.len()).collect();
    let mut holes: Vec<Vec<usize>> = Vec::new();
    for h in plan.holes() {
        let base = pts.len();
        pts.extend_from_slice(h);
        holes.push((base..base + h.len()).collect());
    }
    let snaps: Vec<Snap> = pts.iter().map(|&p| Snap::of(p)).collect();
    let key = |h: &Vec<usize>| h.iter().map(|&i| snaps[i]).max_by_key(|s| (s.x, s.y)).unwrap();
    holes.sort_by_key(|h| std::cmp::Reverse(key(h)));
    let mut bridges: Vec<(Snap, Snap)> = Vec::new();
    for (hi, hole) in holes.iter().enumerate() {
        let mpos = (0..hole.len()).max_by_key(|&k| (snaps[hole[k]].x, snaps[hole[k]].y)).unwrap();
        let m = snaps[hole[mpos]];
        let hn = hole.len();
        let (hprev, hnext) = (snaps[hole[(mpos + hn - 1) % hn]], snaps[hole[(mpos + 1) % hn]]);
        let mut order: Vec<usize> = (0..ring.len()).collect();
        order.sort_by(|&x, &y| {
            let dx = pts[ring[x]].dist2(pts[hole[mpos]]);
            let dy = pts[ring[y]].dist2(pts[hole[mpos]]);
            dx.total_cmp(&dy).then(x.cmp(&y))
        });
        let rn = ring.len();
        let mut chosen = None;
        'cand: for k in order {
            let p = snaps[ring[k]];
            if p == m {
                continue;
            }
            let (rp, rx) = (snaps[ring[(k + rn - 1) % rn]], snaps[ring[(k + 1) % rn]]);
            if !in_cone(rp, p, rx, m) || !in_cone(hprev, m, hnext, p) {
                continue;
            }
            let mut segs: Vec<(Snap, Snap)> = (0..rn).map(|i| (snaps[ring[i]], snaps[ring[(i + 1) % rn]])).collect();
            for h in &holes[hi..] {
                segs.extend((0..h.len()).map(|i| (snaps[h[i]], snaps[h[(i + 1) % h.len()]])));
            }
            segs.extend(bridges.iter().copied());
            for &(c, d) in &segs {
                if exact::proper_cross(p, m, c, d) || exact::in_open_segment(p, m, c) || exact::in_open_segment(p, m, d) {
                    continue 'cand;
                }
            }
            if !segment_clear(plan, pts[ring[k]], pts[hole[mpos]]) {
                continue;
            }
            chosen = Some(k);
            break;
        }
        let k = chosen.ok_or_else(|| Error::Degenerate("no bridge from hole to outer boundary".into()))?;
        bridges.push((snaps[ring[k]], m));
        let mut spliced: Vec<usize> = ring[..=k].to_vec();
        spliced.extend((0..=hn).map(|j| hole[(mpos + j) % hn]));
        spliced.extend_from_slice(&ring[k..]);
        ring = spliced;
    }
    Ok(Ring { pts: ring.iter().map(|&i| pts[i]).collect(), snaps: ring.iter().map(|&i| snaps[i]).collect() })
}

/// Ear-clipping triangulation of the plan, holes joined through bridges.
pub fn triangulate(plan: &FloorPlan) -> Result<Vec<Triangle>> {
    let ring = bridge_holes(plan)?;
    let n = ring.pts.len();
    let s = &ring.snaps;
    let mut prev: Vec<usize> = (0..n).map(|i| (i + n - 1) % n).collect();
    let mut next: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let mut alive = vec![true; n];
    let mut left = n;
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    let mut stall = 0;
    while left > 2 {
        let (p, q) = (prev[i], next[i]);
        let remove = |i: usize, prev: &mut Vec<usize>, next: &mut Vec<usize>, alive: &mut Vec<bool>| {
            let (p, q) = (prev[i], next[i]);
            next[p] = q;
            prev[q] = p;
            alive[i] = false;
        };
        if s[p] == s[i] || s[q] == s[i] {
            remove(i, &mut prev, &mut next, &mut alive);
            left -= 1;
            i = q;
            stall = 0;
            continue;
        }
        let o = exact::orient(s[p], s[i], s[q]);
        if o == 0 {
            // collinear: drop the middle vertex or the tip of a zero-width spike
            remove(i, &mut prev, &mut next, &mut alive);
            left -= 1;
            i = q;
            stall = 0;
            continue;
        }
        if o > 0 && is_ear(s, &prev, &next, &alive, p, i, q) {
            out.push(Triangle { a: ring.pts[p], b: ring.pts[i], c: ring.pts[q] });
            remove(i, &mut prev, &mut next, &mut alive);
            left -= 1;
            i = q;
            stall = 0;
            continue;
        }
        i = q;
        stall += 1;
        if stall > left {
            return Err(Error::Degenerate(format!("ear clipping stalled with {left} vertices left")));
        }
    }
    Ok(out)
}

fn is_ear(s: &[Snap], prev: &[usize], next: &[usize], alive: &[bool], p: usize, i: usize, q: usize) -> bool {
    let (a, b, c) = (s[p], s[i], s[q]);
    let inside_angle = |x: Snap, y: Snap, z: Snap, t: Snap| exact::orient(x, y, t) > 0 && exact::orient(x, z, t) < 0;
    for j in 0..s.len() {
        if !alive[j] || j == p || j == i || j == q {
            continue;
        }
        let v = s[j];
        let (jp, jn) = (s[prev[j]], s[next[j]]);
        if exact::proper_cross(a, c, v, jn) {
            return false;
        }
        let corner = if v == a {
            Some((a, b, c))
        } else if v == b {
            Some((b, c, a))
        } else if v == c {
            Some((c, a, b))
        } else {
            None
        };
        match corner {
            Some((x, y, z)) => {
                if inside_angle(x, y, z, jp) || inside_angle(x, y, z, jn) {
                    return false;
                }
            }
            None => {
                if exact::orient(a, b, v) >= 0 && exact::orient(b, c, v) >= 0 && exact::orient(c, a, v) >= 0 {
                    return false;
                }
            }
        }
    }
    true
}

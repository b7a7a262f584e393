use serde::{Deserialize, Serialize};

use crate::geometry::exact::{self, Snap};
use crate::geometry::{point_segment_distance, Bbox, Point2};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    #[default]
    RawContour,
    DouglasPeucker,
    Rectilinear,
}

/// One boundary edge. The room interior lies to the left of `a -> b`.
#[derive(Clone, Debug)]
pub struct Edge {
    pub a: Point2,
    pub b: Point2,
    /// Unit normal pointing into the room.
    pub normal: Point2,
    pub len: f64,
    pub ring: usize,
    pub(crate) sa: Snap,
    pub(crate) sb: Snap,
}

impl Edge {
    /// Signed distance of `p` from the edge's supporting line, positive on
    /// the room side.
    pub fn line_offset(&self, p: Point2) -> f64 {
        (p - self.a).dot(self.normal)
    }
}

/// The region to disinfect: a simple outer ring with optional holes.
#[derive(Clone, Debug)]
pub struct FloorPlan {
    outer: Vec<Point2>,
    holes: Vec<Vec<Point2>>,
    provenance: Provenance,
    edges: Vec<Edge>,
    snapped: Vec<Vec<Snap>>,
    bbox: Bbox,
}

#[derive(Serialize, Deserialize)]
struct PlanDoc {
    outer: Vec<Point2>,
    #[serde(default)]
    holes: Vec<Vec<Point2>>,
}

pub(crate) fn signed_area(ring: &[Point2]) -> f64 {
    let n = ring.len();
    let mut s = 0.0;
    for i in 0..n {
        s += ring[i].cross(ring[(i + 1) % n]);
    }
    s * 0.5
}

fn clean_ring(ring: &[Point2]) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::with_capacity(ring.len());
    for &p in ring {
        if out.last().map_or(true, |q| Snap::of(*q) != Snap::of(p)) {
            out.push(p);
        }
    }
    while out.len() > 1 && Snap::of(out[0]) == Snap::of(*out.last().unwrap()) {
        out.pop();
    }
    out
}

/// Check that a set of rings has no crossings, touchings or spikes.
pub(crate) fn rings_simple(rings: &[Vec<Snap>]) -> std::result::Result<(), String> {
    let mut segs: Vec<(Snap, Snap, usize, usize)> = Vec::new();
    for (ri, ring) in rings.iter().enumerate() {
        let n = ring.len();
        for i in 0..n {
            segs.push((ring[i], ring[(i + 1) % n], ri, i));
        }
    }
    for (ri, ring) in rings.iter().enumerate() {
        let n = ring.len();
        for i in 0..n {
            let p = ring[(i + n - 1) % n];
            let q = ring[i];
            let r = ring[(i + 1) % n];
            if exact::orient(p, q, r) == 0 && (r.x - q.x) * (p.x - q.x) + (r.y - q.y) * (p.y - q.y) > 0 {
                return Err(format!("ring {ri} folds back at vertex {i}"));
            }
        }
    }
    for i in 0..segs.len() {
        let (a, b, ra, ia) = segs[i];
        let (lo_x, hi_x) = (a.x.min(b.x), a.x.max(b.x));
        for &(c, d, rc, ic) in &segs[i + 1..] {
            if c.x.max(d.x) < lo_x || c.x.min(d.x) > hi_x {
                continue;
            }
            let adjacent = ra == rc && {
                let n = rings[ra].len();
                (ia + 1) % n == ic || (ic + 1) % n == ia
            };
            if adjacent {
                // Consecutive edges meet at their shared vertex; folds are rejected above.
                continue;
            }
            if exact::segments_touch(a, b, c, d) {
                return Err(format!("edges {ia} of ring {ra} and {ic} of ring {rc} intersect"));
            }
        }
    }
    Ok(())
}

impl FloorPlan {
    /// Build and validate a plan. Ring orientation is normalized (outer
    /// counterclockwise, holes clockwise) and repeated vertices are removed.
    pub fn new(outer: Vec<Point2>, holes: Vec<Vec<Point2>>, provenance: Provenance) -> Result<FloorPlan> {
        let mut outer = clean_ring(&outer);
        if outer.len() < 3 {
            return Err(Error::InvalidPlan("outer ring needs at least 3 vertices".into()));
        }
        if outer.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidPlan("non-finite coordinate".into()));
        }
        let a = signed_area(&outer);
        if a.abs() < 1e-12 {
            return Err(Error::InvalidPlan("outer ring has zero area".into()));
        }
        if a < 0.0 {
            outer.reverse();
        }
        let mut hs = Vec::with_capacity(holes.len());
        for (i, h) in holes.into_iter().enumerate() {
            let mut h = clean_ring(&h);
            if h.len() < 3 || h.iter().any(|p| !p.is_finite()) {
                return Err(Error::InvalidPlan(format!("hole {i} is degenerate")));
            }
            let a = signed_area(&h);
            if a.abs() < 1e-12 {
                return Err(Error::InvalidPlan(format!("hole {i} has zero area")));
            }
            if a > 0.0 {
                h.reverse();
            }
            hs.push(h);
        }
        let snapped: Vec<Vec<Snap>> = std::iter::once(&outer)
            .chain(hs.iter())
            .map(|r| r.iter().map(|&p| Snap::of(p)).collect())
            .collect();
        rings_simple(&snapped).map_err(Error::InvalidPlan)?;
        let outer_only = [snapped[0].clone()];
        for (i, h) in snapped[1..].iter().enumerate() {
            if !exact::ring_contains(&outer_only, h[0], 1) {
                return Err(Error::InvalidPlan(format!("hole {i} lies outside the outer ring")));
            }
            for (j, g) in snapped[1..].iter().enumerate() {
                if i != j && exact::ring_contains(std::slice::from_ref(g), h[0], 1) {
                    return Err(Error::InvalidPlan(format!("hole {i} lies inside hole {j}")));
                }
            }
        }
        let mut edges = Vec::new();
        for (ri, ring) in std::iter::once(&outer).chain(hs.iter()).enumerate() {
            let n = ring.len();
            for i in 0..n {
                let a = ring[i];
                let b = ring[(i + 1) % n];
                let d = b - a;
                let len = d.norm();
                edges.push(Edge {
                    a,
                    b,
                    normal: Point2::new(-d.y / len, d.x / len),
                    len,
                    ring: ri,
                    sa: snapped[ri][i],
                    sb: snapped[ri][(i + 1) % n],
                });
            }
        }
        let bbox = Bbox::of(outer.iter().copied()).unwrap();
        Ok(FloorPlan { outer, holes: hs, provenance, edges, snapped, bbox })
    }

    /// Convenience constructor for a plan without holes.
    pub fn polygon(outer: &[(f64, f64)]) -> Result<FloorPlan> {
        FloorPlan::new(outer.iter().map(|&(x, y)| Point2::new(x, y)).collect(), vec![], Provenance::RawContour)
    }

    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> FloorPlan {
        FloorPlan::polygon(&[(x0, y0), (x1, y0), (x1, y1), (x0, y1)]).expect("valid rectangle")
    }

    pub fn from_json(text: &str) -> Result<FloorPlan> {
        let doc: PlanDoc = serde_json::from_str(text)?;
        FloorPlan::new(doc.outer, doc.holes, Provenance::RawContour)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PlanDoc { outer: self.outer.clone(), holes: self.holes.clone() })
            .expect("plan serializes")
    }

    pub fn with_holes(&self, holes: Vec<Vec<Point2>>) -> Result<FloorPlan> {
        let mut all = self.holes.clone();
        all.extend(holes);
        FloorPlan::new(self.outer.clone(), all, self.provenance)
    }

    pub fn outer(&self) -> &[Point2] {
        &self.outer
    }

    pub fn holes(&self) -> &[Vec<Point2>] {
        &self.holes
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn bbox(&self) -> Bbox {
        self.bbox
    }

    pub(crate) fn snapped_rings(&self) -> &[Vec<Snap>] {
        &self.snapped
    }

    pub fn rings(&self) -> impl Iterator<Item = &[Point2]> {
        std::iter::once(self.outer.as_slice()).chain(self.holes.iter().map(|h| h.as_slice()))
    }

    pub fn vertices(&self) -> impl Iterator<Item = Point2> + '_ {
        self.rings().flat_map(|r| r.iter().copied())
    }

    pub fn vertex_count(&self) -> usize {
        self.rings().map(|r| r.len()).sum()
    }

    /// Area of the outer ring minus the holes.
    pub fn area(&self) -> f64 {
        self.rings().map(signed_area).sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges.iter().map(|e| e.len).sum()
    }

    /// Euclidean distance from `p` to the nearest boundary edge.
    pub fn boundary_distance(&self, p: Point2) -> f64 {
        self.edges.iter().map(|e| point_segment_distance(p, e.a, e.b)).fold(f64::INFINITY, f64::min)
    }

    /// Vertices whose interior angle exceeds 180 degrees.
    pub fn reflex_vertices(&self) -> Vec<Point2> {
        let mut out = Vec::new();
        for (ri, ring) in self.snapped.iter().enumerate() {
            let n = ring.len();
            let pts: &[Point2] = if ri == 0 { &self.outer } else { &self.holes[ri - 1] };
            for i in 0..n {
                if exact::orient(ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]) < 0 {
                    out.push(pts[i]);
                }
            }
        }
        out
    }

    /// Intervals of x where the line at height `y` lies inside the plan.
    pub fn horizontal_slice(&self, y: f64) -> Vec<(f64, f64)> {
        let mut xs: Vec<f64> = Vec::new();
        for e in &self.edges {
            let (ya, yb) = (e.a.y, e.b.y);
            if (ya > y) != (yb > y) {
                let t = (y - ya) / (yb - ya);
                xs.push(e.a.x + t * (e.b.x - e.a.x));
            }
        }
        xs.sort_by(|a, b| a.total_cmp(b));
        xs.chunks_exact(2).map(|c| (c[0], c[1])).filter(|c| c.1 > c.0).collect()
    }
}

use std::f64::consts::{PI, TAU};

use super::{distance_to_convex, polygon_centroid, ray_cast, Point2};
use crate::{Error, FloorPlan, Result};

/// Angular interval seen from the fan origin in which one wall is hit first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sector {
    pub start: f64,
    pub end: f64,
    pub edge: usize,
}

/// The visibility polygon of a point, stored as angular sectors each tagged
/// with the wall that bounds it.
#[derive(Clone, Debug)]
pub struct VisibilityFan {
    origin: Point2,
    sectors: Vec<Sector>,
}

fn wrap_pi(a: f64) -> f64 {
    let mut a = a % TAU;
    if a > PI {
        a -= TAU;
    } else if a <= -PI {
        a += TAU;
    }
    a
}

impl VisibilityFan {
    pub fn new(plan: &FloorPlan, origin: Point2) -> Result<VisibilityFan> {
        let mut angs: Vec<f64> = plan
            .vertices()
            .filter(|v| v.dist(origin) > 1e-12)
            .map(|v| (v - origin).angle())
            .collect();
        angs.sort_by(|a, b| a.total_cmp(b));
        angs.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        if angs.is_empty() {
            angs.push(0.0);
        }
        let n = angs.len();
        let mut sectors: Vec<Sector> = Vec::with_capacity(n);
        for i in 0..n {
            let a = angs[i];
            let b = if i + 1 < n { angs[i + 1] } else { angs[0] + TAU };
            if b - a < 1e-15 {
                continue;
            }
            let mid = 0.5 * (a + b);
            let hit = ray_cast(plan, origin, Point2::from_angle(mid)).ok_or(Error::RayEscaped(origin.x, origin.y))?;
            match sectors.last_mut() {
                Some(last) if last.edge == hit.edge => last.end = b,
                _ => sectors.push(Sector { start: a, end: b, edge: hit.edge }),
            }
        }
        if sectors.len() > 1 && sectors[0].edge == sectors[sectors.len() - 1].edge {
            let last = sectors.pop().unwrap();
            sectors[0].start = last.start - TAU;
        }
        Ok(VisibilityFan { origin, sectors })
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    /// Sector containing direction `angle`.
    pub fn sector_at(&self, angle: f64) -> &Sector {
        let a0 = self.sectors[0].start;
        let a = a0 + (angle - a0).rem_euclid(TAU);
        let i = self.sectors.partition_point(|s| s.end <= a);
        &self.sectors[i.min(self.sectors.len() - 1)]
    }

    /// Angular interval spanned by a convex region, as `(lo, hi)` with
    /// `hi - lo <= 2π`. The full circle when the origin touches the region.
    pub fn wedge_of(&self, region: &[Point2]) -> (f64, f64) {
        wedge_of(self.origin, region)
    }

    /// Pieces of `[lo, hi]` (with `hi - lo <= 2π`) split at sector
    /// boundaries, as `(sector, piece_lo, piece_hi)`.
    pub fn overlaps(&self, lo: f64, hi: f64) -> Vec<(Sector, f64, f64)> {
        let a0 = self.sectors[0].start;
        let lo2 = a0 + (lo - a0).rem_euclid(TAU);
        let hi2 = hi + (lo2 - lo);
        let mut out = Vec::new();
        for off in [0.0, TAU] {
            for s in &self.sectors {
                let (ss, se) = (s.start + off, s.end + off);
                if ss > hi2 {
                    return out;
                }
                let a = ss.max(lo2);
                let b = se.min(hi2);
                if a <= b {
                    out.push((*s, a, b));
                }
            }
        }
        out
    }
}

pub(crate) fn wedge_of(origin: Point2, region: &[Point2]) -> (f64, f64) {
    if region.len() >= 3 && distance_to_convex(origin, region) <= 1e-12 {
        return (-PI, PI);
    }
    let base = (polygon_centroid(region) - origin).angle();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &p in region {
        let r = wrap_pi((p - origin).angle() - base);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    (base + lo, base + hi)
}

//! Point-lamp dose-rate model and certified per-region bounds.
//!
//! A lamp at planar position `u`, mounted halfway between floor and ceiling,
//! delivers `P·cos(α) / (d² + h²)` per second to a lit point `v` at planar
//! distance `d`. Rates are in µW/cm² per second of dwell.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::floorplan::Edge;
use crate::geometry::{
    contains, convex_hull, distance_to_convex, first_hits, intrudes_open_interior, polygon_centroid,
    segment_clear, Point2, VisibilityFan,
};
use crate::{Error, FloorPlan, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IncidenceMode {
    /// Incidence of the ray on the wall it reaches after passing the target.
    #[default]
    WallExtended,
    /// Incidence on the floor at the target.
    FloorNormal,
    /// Pure inverse-square falloff.
    None,
}

impl std::str::FromStr for IncidenceMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wall-extended" => Ok(IncidenceMode::WallExtended),
            "floor-normal" => Ok(IncidenceMode::FloorNormal),
            "none" => Ok(IncidenceMode::None),
            _ => Err(Error::InvalidParameter(format!("unknown incidence mode '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LightConfig {
    /// Calibration constant in µW·m²/cm².
    pub power: f64,
    /// Half the floor-to-ceiling distance, meters.
    pub half_height: f64,
    pub shadow_radius: f64,
    pub incidence: IncidenceMode,
}

impl Default for LightConfig {
    fn default() -> Self {
        LightConfig { power: 10.0, half_height: 1.35, shadow_radius: 0.3, incidence: IncidenceMode::WallExtended }
    }
}

impl LightConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.power > 0.0) || !self.power.is_finite() {
            return Err(Error::InvalidParameter(format!("power {} must be positive", self.power)));
        }
        if !(self.half_height >= 0.0) {
            return Err(Error::InvalidParameter(format!("half height {} is negative", self.half_height)));
        }
        if !(self.shadow_radius >= 0.0) {
            return Err(Error::InvalidParameter(format!("shadow radius {} is negative", self.shadow_radius)));
        }
        Ok(())
    }
}

/// Square grid cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub center: Point2,
    pub half_width: f64,
}

impl GridCell {
    pub fn new(center: Point2, half_width: f64) -> Self {
        GridCell { center, half_width }
    }

    /// Corners counterclockwise from the lower left.
    pub fn corners(&self) -> Vec<Point2> {
        let (c, h) = (self.center, self.half_width);
        vec![
            Point2::new(c.x - h, c.y - h),
            Point2::new(c.x + h, c.y - h),
            Point2::new(c.x + h, c.y + h),
            Point2::new(c.x - h, c.y + h),
        ]
    }

    pub fn contains(&self, p: Point2) -> bool {
        (p.x - self.center.x).abs() <= self.half_width && (p.y - self.center.y).abs() <= self.half_width
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoseRequirement {
    /// Required dose in µW·s/cm².
    pub r: f64,
}

impl Default for DoseRequirement {
    fn default() -> Self {
        DoseRequirement { r: 120600.0 }
    }
}

impl DoseRequirement {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("dose requirement {r} must be positive")));
        }
        Ok(DoseRequirement { r })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Exact,
    Pessimistic,
    Optimistic,
}

/// A point that must be disinfected, with the grid cell it stands for.
///
/// `region` is the part of the cell certified to lie in the room as a
/// convex polygon, or `None` when the cell could not be reduced to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub point: Point2,
    pub cell: GridCell,
    pub region: Option<Vec<Point2>>,
}

fn wall_factor(e: &Edge, o: Point2, dir: Point2, h: f64) -> f64 {
    let c = -e.normal.dot(dir);
    if c <= 0.0 {
        return 0.0;
    }
    if h == 0.0 {
        return c.min(1.0);
    }
    let q = e.line_offset(o).max(0.0);
    let d = q / c;
    (d * c / (d * d + h * h).sqrt()).clamp(0.0, 1.0)
}

/// Cosine of the angle between the lamp ray and the surface normal used by
/// the active incidence rule.
pub fn incidence_cos(plan: &FloorPlan, u: Point2, v: Point2, cfg: &LightConfig) -> Result<f64> {
    let d = v - u;
    let dn = d.norm();
    match cfg.incidence {
        IncidenceMode::None => Ok(1.0),
        IncidenceMode::FloorNormal => {
            let h = cfg.half_height;
            Ok(if h == 0.0 { 0.0 } else { h / (dn * dn + h * h).sqrt() })
        }
        IncidenceMode::WallExtended => {
            if dn == 0.0 {
                return Err(Error::InvalidParameter("incidence undefined for coincident points".into()));
            }
            let dir = d * (1.0 / dn);
            let hits = first_hits(plan, u, dir);
            if hits.is_empty() {
                return Err(Error::RayEscaped(u.x, u.y));
            }
            // At a vertex, walls met from behind do not receive the ray.
            let front: Vec<&Edge> =
                hits.iter().map(|hit| &plan.edges()[hit.edge]).filter(|e| e.normal.dot(dir) < 0.0).collect();
            Ok(front.iter().map(|e| wall_factor(e, u, dir, cfg.half_height)).reduce(f64::min).unwrap_or(0.0))
        }
    }
}

/// Dose rate at `v` from a lamp at `u`; zero when `v` is hidden or in the
/// lamp's shadow.
pub fn dose_rate(plan: &FloorPlan, u: Point2, v: Point2, cfg: &LightConfig) -> f64 {
    let d2 = u.dist2(v);
    if d2.sqrt() <= cfg.shadow_radius || d2 == 0.0 || !segment_clear(plan, u, v) {
        return 0.0;
    }
    let c = incidence_cos(plan, u, v, cfg).unwrap_or(0.0);
    cfg.power * c / (d2 + cfg.half_height * cfg.half_height)
}

/// 3D dose rate on a wall at height `z`, planar distance `D` and planar
/// incidence angle `theta`.
pub fn wall_dose_at_height(d: f64, theta: f64, z: f64, cfg: &LightConfig) -> Result<f64> {
    let h = cfg.half_height;
    if !(d > 0.0) {
        return Err(Error::InvalidParameter(format!("wall distance {d} must be positive")));
    }
    if !(0.0..=2.0 * h).contains(&z) {
        return Err(Error::InvalidParameter(format!("height {z} outside [0, {}]", 2.0 * h)));
    }
    let dz = h - z;
    Ok(cfg.power * d * theta.cos() / (d * d + dz * dz).powf(1.5))
}

/// Lower bound of the incidence factor over directions in `[lo, hi]` from
/// the fan origin.
fn incidence_lower(plan: &FloorPlan, fan: &VisibilityFan, wedge: (f64, f64), dmax2: f64, cfg: &LightConfig) -> f64 {
    let h = cfg.half_height;
    match cfg.incidence {
        IncidenceMode::None => 1.0,
        IncidenceMode::FloorNormal => {
            if h == 0.0 {
                0.0
            } else {
                h / (dmax2 + h * h).sqrt()
            }
        }
        IncidenceMode::WallExtended => {
            let o = fan.origin();
            let mut m = 1.0f64;
            for (s, lo, hi) in fan.overlaps(wedge.0, wedge.1) {
                let e = &plan.edges()[s.edge];
                m = m.min(wall_factor(e, o, Point2::from_angle(lo), h));
                m = m.min(wall_factor(e, o, Point2::from_angle(hi), h));
            }
            m
        }
    }
}

const INTRUSION_TOL: f64 = 1e-9;

/// `region` seen from `o` without any wall inside their convex hull.
fn region_unobstructed(plan: &FloorPlan, o: Point2, region: &[Point2]) -> bool {
    let mut pts = region.to_vec();
    pts.push(o);
    let hull = convex_hull(&pts);
    let (mut lx, mut ly, mut hx, mut hy) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in &hull {
        lx = lx.min(p.x);
        ly = ly.min(p.y);
        hx = hx.max(p.x);
        hy = hy.max(p.y);
    }
    let blocked = plan.edges().iter().any(|e| {
        e.a.x.max(e.b.x) > lx
            && e.a.x.min(e.b.x) < hx
            && e.a.y.max(e.b.y) > ly
            && e.a.y.min(e.b.y) < hy
            && intrudes_open_interior(&hull, e.a, e.b, INTRUSION_TOL)
    });
    !blocked && contains(plan, polygon_centroid(region))
}

/// Certified lower bound on the dose rate from the fan origin over a closed
/// convex region (counterclockwise vertices).
///
/// Zero unless every point of the region is lit: no wall may enter the hull
/// of the region and the lamp, and with a shadow the region must lie
/// outside the shadow disk. Otherwise the farthest vertex fixes the distance
/// term, and the incidence factor is minimized over the angular wedge the
/// region occupies, which is exact per wall because the factor is unimodal
/// in direction.
pub fn pessimistic_region_rate(plan: &FloorPlan, fan: &VisibilityFan, region: &[Point2], cfg: &LightConfig) -> f64 {
    if region.len() < 3 {
        return 0.0;
    }
    let u = fan.origin();
    if cfg.shadow_radius > 0.0 && distance_to_convex(u, region) <= cfg.shadow_radius {
        return 0.0;
    }
    if !region_unobstructed(plan, u, region) {
        return 0.0;
    }
    let dmax2 = region.iter().map(|p| p.dist2(u)).fold(0.0, f64::max);
    let c = incidence_lower(plan, fan, fan.wedge_of(region), dmax2, cfg);
    cfg.power * c / (dmax2 + cfg.half_height * cfg.half_height)
}

/// Certified lower bound of `dose_rate(u, p)` over the whole square `cell`.
pub fn pessimistic_cell_rate(plan: &FloorPlan, u: Point2, cell: &GridCell, cfg: &LightConfig) -> Result<f64> {
    let fan = VisibilityFan::new(plan, u)?;
    Ok(pessimistic_region_rate(plan, &fan, &cell.corners(), cfg))
}

/// Whether some point of the convex `region` is visible from the fan origin.
pub fn region_partly_visible(plan: &FloorPlan, fan: &VisibilityFan, region: &[Point2]) -> bool {
    let o = fan.origin();
    if distance_to_convex(o, region) <= 1e-12 {
        return true;
    }
    let (lo, hi) = fan.wedge_of(region);
    for (s, a, b) in fan.overlaps(lo, hi) {
        if b <= a {
            continue;
        }
        let e = &plan.edges()[s.edge];
        // Clip the region to the sector wedge and to the near side of its wall.
        let mut part = region.to_vec();
        let da = Point2::from_angle(a);
        let db = Point2::from_angle(b);
        part = crate::geometry::clip_convex(&part, o, Point2::new(-da.y, da.x));
        part = crate::geometry::clip_convex(&part, o, Point2::new(db.y, -db.x));
        if part.iter().any(|&p| e.line_offset(p) > 1e-12) {
            return true;
        }
    }
    false
}

/// Certified upper bound on `dose_rate(p, v)` over lamp positions `p` in
/// the convex polygon `sq`, with `fan` centered at `v`.
pub fn optimistic_rate_with_fan(plan: &FloorPlan, fan: &VisibilityFan, sq: &[Point2], cfg: &LightConfig) -> f64 {
    let v = fan.origin();
    if sq.len() < 3 || !region_partly_visible(plan, fan, sq) {
        return 0.0;
    }
    let h = cfg.half_height;
    let dmin = distance_to_convex(v, sq);
    let s = cfg.shadow_radius;
    let deff2 = (dmin * dmin).max(s * s);
    let dmax = sq.iter().map(|p| p.dist(v)).fold(0.0, f64::max);
    let c = match cfg.incidence {
        IncidenceMode::None => 1.0,
        IncidenceMode::FloorNormal => {
            if h == 0.0 {
                0.0
            } else {
                h / (deff2 + h * h).sqrt()
            }
        }
        IncidenceMode::WallExtended => {
            let (lo, hi) = fan.wedge_of(sq);
            let (lo, hi) = if hi - lo >= std::f64::consts::TAU - 1e-12 {
                (lo, hi)
            } else {
                (lo + std::f64::consts::PI, hi + std::f64::consts::PI)
            };
            let mut best = 0.0f64;
            for (sec, a, b) in fan.overlaps(lo, hi) {
                // A boundary ray takes the smaller factor of its two walls.
                if b - a < 1e-12 && hi - lo > 1e-12 {
                    continue;
                }
                let e = &plan.edges()[sec.edge];
                let cosv = |phi: f64| -e.normal.dot(Point2::from_angle(phi));
                let psi = (e.normal * -1.0).angle();
                let k = ((a - psi) / std::f64::consts::TAU).ceil();
                let inside = psi + k * std::f64::consts::TAU <= b;
                let cmax = if inside { 1.0 } else { cosv(a).max(cosv(b)).max(0.0) };
                // With the lamp at planar distance d from v along a direction
                // of cosine c, the factor (d c + q) / sqrt((d + q/c)^2 + h^2)
                // grows in both d and c.
                let q = e.line_offset(v).max(0.0);
                let f = if cmax <= 0.0 {
                    0.0
                } else if h == 0.0 {
                    cmax
                } else {
                    let dw = dmax + q / cmax;
                    (dmax * cmax + q) / (dw * dw + h * h).sqrt()
                };
                best = best.max(f);
            }
            best.min(1.0)
        }
    };
    if deff2 + h * h == 0.0 {
        return f64::INFINITY;
    }
    cfg.power * c / (deff2 + h * h)
}

/// Certified upper bound of `dose_rate(p, v)` over `p` in `cell`.
pub fn optimistic_cell_rate(plan: &FloorPlan, cell: &GridCell, v: Point2, cfg: &LightConfig) -> Result<f64> {
    let fan = VisibilityFan::new(plan, v)?;
    Ok(optimistic_rate_with_fan(plan, &fan, &cell.corners(), cfg))
}

/// Dense guards × targets rate matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrradianceMatrix {
    pub guards: Vec<Point2>,
    pub targets: Vec<Point2>,
    /// Row-major, `rates[g * targets.len() + t]`.
    pub rates: Vec<f64>,
    pub kind: BoundKind,
}

impl IrradianceMatrix {
    pub fn from_rows(guards: Vec<Point2>, targets: Vec<Point2>, rows: Vec<Vec<f64>>, kind: BoundKind) -> Self {
        let rates = rows.into_iter().flatten().collect();
        IrradianceMatrix { guards, targets, rates, kind }
    }

    pub fn n_guards(&self) -> usize {
        self.guards.len()
    }

    pub fn n_targets(&self) -> usize {
        self.targets.len()
    }

    pub fn rate(&self, g: usize, t: usize) -> f64 {
        self.rates[g * self.targets.len() + t]
    }

    pub fn row(&self, g: usize) -> &[f64] {
        let n = self.targets.len();
        &self.rates[g * n..(g + 1) * n]
    }

    /// Whether target `t` receives light from some guard.
    pub fn target_seen(&self, t: usize) -> bool {
        (0..self.n_guards()).any(|g| self.rate(g, t) > 0.0)
    }

    /// Keep only the listed target columns.
    pub fn select_targets(&self, keep: &[usize]) -> IrradianceMatrix {
        let mut rates = Vec::with_capacity(self.n_guards() * keep.len());
        for g in 0..self.n_guards() {
            let row = self.row(g);
            rates.extend(keep.iter().map(|&t| row[t]));
        }
        IrradianceMatrix {
            guards: self.guards.clone(),
            targets: keep.iter().map(|&t| self.targets[t]).collect(),
            rates,
            kind: self.kind,
        }
    }

    /// Accumulated dose at each target for a dwell vector.
    pub fn dose(&self, dwell: &[f64]) -> Vec<f64> {
        let n = self.n_targets();
        let mut out = vec![0.0; n];
        for (g, &t) in dwell.iter().enumerate() {
            if t == 0.0 {
                continue;
            }
            for (o, &r) in out.iter_mut().zip(self.row(g)) {
                *o += t * r;
            }
        }
        out
    }
}

/// Rate matrix of the given kind between guard cells and targets.
///
/// Exact rates connect guard centers to target points; pessimistic rates
/// bound each target's certified region from the guard center; optimistic
/// rates bound the target point from anywhere in the guard cell.
pub fn build_matrix(
    plan: &FloorPlan,
    guards: &[GridCell],
    targets: &[Target],
    cfg: &LightConfig,
    kind: BoundKind,
) -> Result<IrradianceMatrix> {
    cfg.validate()?;
    let gpts: Vec<Point2> = guards.iter().map(|g| g.center).collect();
    let tpts: Vec<Point2> = targets.iter().map(|t| t.point).collect();
    let rows: Vec<Vec<f64>> = match kind {
        BoundKind::Exact => gpts
            .par_iter()
            .map(|&u| tpts.iter().map(|&v| dose_rate(plan, u, v, cfg)).collect())
            .collect(),
        BoundKind::Pessimistic => gpts
            .par_iter()
            .map(|&u| {
                let fan = VisibilityFan::new(plan, u)?;
                Ok(targets
                    .iter()
                    .map(|t| t.region.as_ref().map_or(0.0, |r| pessimistic_region_rate(plan, &fan, r, cfg)))
                    .collect())
            })
            .collect::<Result<_>>()?,
        BoundKind::Optimistic => {
            let patches: Vec<Vec<Point2>> = guards.iter().map(|g| g.corners()).collect();
            return build_optimistic_matrix(plan, gpts, &patches, targets, cfg);
        }
    };
    Ok(IrradianceMatrix::from_rows(gpts, tpts, rows, kind))
}

/// Optimistic matrix for guards standing anywhere in convex `patches`,
/// labelled by `centers`.
pub fn build_optimistic_matrix(
    plan: &FloorPlan,
    centers: Vec<Point2>,
    patches: &[Vec<Point2>],
    targets: &[Target],
    cfg: &LightConfig,
) -> Result<IrradianceMatrix> {
    cfg.validate()?;
    let tpts: Vec<Point2> = targets.iter().map(|t| t.point).collect();
    let cols: Vec<Vec<f64>> = tpts
        .par_iter()
        .map(|&v| {
            let fan = VisibilityFan::new(plan, v)?;
            Ok(patches.iter().map(|g| optimistic_rate_with_fan(plan, &fan, g, cfg)).collect())
        })
        .collect::<Result<_>>()?;
    let rows = (0..centers.len()).map(|g| cols.iter().map(|c| c[g]).collect()).collect();
    Ok(IrradianceMatrix::from_rows(centers, tpts, rows, BoundKind::Optimistic))
}

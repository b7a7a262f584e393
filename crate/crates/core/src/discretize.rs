//! Guard and target grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{
    clip_convex, contains, intrudes_open_interior, nearest_on_convex, polygon_area, polygon_centroid, Bbox,
    GuardRegion, Point2,
};
use crate::irradiance::{build_matrix, BoundKind, GridCell, IrradianceMatrix, LightConfig, Target};
use crate::{Error, FloorPlan, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationConfig {
    pub epsilon: f64,
    pub robot_radius: f64,
}

impl DiscretizationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!("epsilon {} must be positive", self.epsilon)));
        }
        if !(self.robot_radius >= 0.0) {
            return Err(Error::InvalidParameter(format!("robot radius {} is negative", self.robot_radius)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TargetSet {
    pub targets: Vec<Target>,
    /// Targets removed because no guard reaches them.
    pub dropped: Vec<Target>,
    pub dropped_fraction: f64,
}

impl TargetSet {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn points(&self) -> Vec<Point2> {
        self.targets.iter().map(|t| t.point).collect()
    }

    /// Kept plus dropped.
    pub fn total(&self) -> usize {
        self.targets.len() + self.dropped.len()
    }
}

/// Lattice cell indices `lo..hi` along one axis covering `[a, b]`.
fn span(a: f64, b: f64, anchor: f64, eps: f64) -> std::ops::Range<i64> {
    let lo = ((a - anchor) / eps + 1e-9).floor() as i64;
    let hi = ((b - anchor) / eps - 1e-9).ceil() as i64;
    lo..hi.max(lo)
}

fn lattice(anchor: Point2, cover: Bbox, eps: f64) -> Vec<GridCell> {
    let mut out = Vec::new();
    for j in span(cover.min.y, cover.max.y, anchor.y, eps) {
        for i in span(cover.min.x, cover.max.x, anchor.x, eps) {
            let c = Point2::new(anchor.x + (i as f64 + 0.5) * eps, anchor.y + (j as f64 + 0.5) * eps);
            out.push(GridCell::new(c, 0.5 * eps));
        }
    }
    out
}

/// Candidate lamp stops: centers of the grid cells anchored at the guard
/// region's bounding-box corner that lie inside the region.
pub fn build_guard_grid(region: &GuardRegion, eps: f64) -> Vec<GridCell> {
    let b = region.bbox();
    if !(eps > 0.0) || b.width() < 0.0 || b.height() < 0.0 {
        return Vec::new();
    }
    let cells = lattice(b.min, b, eps);
    let keep: Vec<bool> = cells.par_iter().map(|c| region.contains(c.center)).collect();
    cells.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c).collect()
}

/// Cells on the guard lattice that may contain a point of the guard region:
/// a superset of the cells meeting it. Used to bound any placement in the
/// region, not just grid centers.
pub fn build_guard_cover(region: &GuardRegion, eps: f64) -> Vec<GridCell> {
    let b = region.bbox();
    if !(eps > 0.0) || b.width() < 0.0 || b.height() < 0.0 {
        return Vec::new();
    }
    let grown = b.inset(-eps);
    let cells = lattice(b.min, grown, eps);
    let half_diag = 0.5 * eps * std::f64::consts::SQRT_2;
    let r = region.robot_radius();
    let keep: Vec<bool> = cells.par_iter().map(|c| region.clearance(c.center) >= r - half_diag - 1e-12).collect();
    cells.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c).collect()
}

/// Convex part of `cell` certified inside the plan, if any.
fn cell_region(plan: &FloorPlan, cell: &GridCell) -> Option<Vec<Point2>> {
    let sq = cell.corners();
    let crossing: Vec<_> = plan.edges().iter().filter(|e| intrudes_open_interior(&sq, e.a, e.b, 1e-9)).collect();
    let mut k = sq.clone();
    for e in &crossing {
        k = clip_convex(&k, e.a, e.normal);
        if k.len() < 3 {
            return None;
        }
    }
    if polygon_area(&k) < 1e-9 * cell.half_width * cell.half_width {
        return None;
    }
    if !crossing.is_empty() && plan.edges().iter().any(|e| intrudes_open_interior(&k, e.a, e.b, 1e-9)) {
        return None;
    }
    if !contains(plan, polygon_centroid(&k)) {
        return None;
    }
    Some(k)
}

/// Sample point and certified region for one lattice cell, or `None` when
/// the cell does not meet the plan.
fn classify(plan: &FloorPlan, cell: GridCell) -> Option<Target> {
    let c = cell.center;
    let region = cell_region(plan, &cell);
    let point = match &region {
        Some(k) if crate::geometry::distance_to_convex(c, k) == 0.0 && contains(plan, c) && plan.boundary_distance(c) > 1e-9 => c,
        Some(k) => {
            let q = nearest_on_convex(c, k);
            q.lerp(polygon_centroid(k), 1e-6)
        }
        None => {
            if !contains(plan, c) {
                return None;
            }
            if plan.boundary_distance(c) > 1e-9 {
                c
            } else {
                // On a wall: step off it into the room.
                let d = 1e-6 * cell.half_width;
                [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
                    .iter()
                    .map(|&(x, y)| c + Point2::new(x, y) * d)
                    .find(|&p| contains(plan, p) && plan.boundary_distance(p) > 1e-9)?
            }
        }
    };
    Some(Target { point, cell, region })
}

/// Target cells of the plan on a lattice anchored at its bounding-box
/// corner. Cells cut by a wall keep their in-room convex part as certified
/// region and a sample point moved inside it.
pub fn build_target_grid(plan: &FloorPlan, eps: f64) -> TargetSet {
    if !(eps > 0.0) {
        return TargetSet::default();
    }
    let b = plan.bbox();
    let cells = lattice(b.min, b, eps);
    let targets: Vec<Target> = cells.into_par_iter().filter_map(|c| classify(plan, c)).collect();
    TargetSet { targets, dropped: Vec::new(), dropped_fraction: 0.0 }
}

/// Split the targets by whether the matrix gives them any light; returns the
/// reduced target set and matrix.
pub fn filter_with_matrix(matrix: &IrradianceMatrix, targets: &TargetSet) -> Result<(TargetSet, IrradianceMatrix)> {
    if matrix.n_guards() == 0 {
        return Err(Error::Degenerate("no guard positions".into()));
    }
    let mut keep = Vec::new();
    let mut out = TargetSet { targets: Vec::new(), dropped: targets.dropped.clone(), dropped_fraction: 0.0 };
    for (i, t) in targets.targets.iter().enumerate() {
        if matrix.target_seen(i) {
            keep.push(i);
            out.targets.push(t.clone());
        } else {
            out.dropped.push(t.clone());
        }
    }
    if out.targets.is_empty() {
        return Err(Error::Degenerate("every target is unreachable".into()));
    }
    out.dropped_fraction = out.dropped.len() as f64 / out.total() as f64;
    Ok((out, matrix.select_targets(&keep)))
}

/// Remove targets that no guard lights under pessimistic rates.
pub fn filter_unseen_targets(
    plan: &FloorPlan,
    guards: &[GridCell],
    targets: &TargetSet,
    cfg: &LightConfig,
) -> Result<TargetSet> {
    if guards.is_empty() {
        return Err(Error::Degenerate("no guard positions".into()));
    }
    let m = build_matrix(plan, guards, &targets.targets, cfg, BoundKind::Pessimistic)?;
    Ok(filter_with_matrix(&m, targets)?.0)
}

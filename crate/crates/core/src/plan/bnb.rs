use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{plan_exact, Algorithm, WaypointSolution};
use crate::discretize::TargetSet;
use crate::geometry::{triangulate, Point2, Triangle, VisibilityFan};
use crate::irradiance::{dose_rate, pessimistic_region_rate, region_partly_visible, DoseRequirement, GridCell, LightConfig};
use crate::{Error, FloorPlan, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BnbConfig {
    pub max_splits: usize,
    pub min_triangle_area: f64,
    pub gap_tolerance: f64,
}

impl BnbConfig {
    pub fn for_epsilon(eps: f64) -> Self {
        BnbConfig { max_splits: 100_000, min_triangle_area: eps * eps / 100.0, gap_tolerance: 0.01 }
    }
}

#[derive(Clone, Debug)]
pub struct DimmestPoint {
    pub point: Point2,
    pub dose: f64,
    /// Certified minimum dose over the retained triangles.
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub converged: bool,
    pub splits: usize,
    /// Area given up as uncoverable: unlit triangles and slivers below the
    /// size floor.
    pub discarded_area: f64,
    pub retained: Vec<Triangle>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BnbReport {
    pub base_total_dwell: f64,
    pub scale: f64,
    pub dimmest_point: Point2,
    pub dimmest_dose: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub converged: bool,
    pub splits: usize,
    pub discarded_area: f64,
    pub retained_triangles: usize,
}

struct Node {
    tri: Triangle,
    lb: f64,
    ub: f64,
    id: usize,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    // Reversed so the max-heap pops the smallest lower bound first.
    fn cmp(&self, o: &Self) -> Ordering {
        o.lb.total_cmp(&self.lb).then(o.id.cmp(&self.id))
    }
}

struct Eval {
    lb: f64,
    ub: f64,
    lit: bool,
}

fn evaluate(plan: &FloorPlan, fans: &[VisibilityFan], dwell: &[f64], tri: &Triangle, cfg: &LightConfig) -> Eval {
    let verts = tri.vertices();
    let mut lb = 0.0;
    let mut lit = false;
    for (fan, &t) in fans.iter().zip(dwell) {
        let r = pessimistic_region_rate(plan, fan, &verts, cfg);
        lb += t * r;
        lit |= r > 0.0 || region_partly_visible(plan, fan, &verts);
    }
    let c = tri.centroid();
    let ub = fans.iter().zip(dwell).map(|(f, &t)| t * dose_rate(plan, f.origin(), c, cfg)).sum();
    Eval { lb, ub, lit }
}

const BATCH: usize = 64;

/// Locate the least-dosed point of the plan under the given stops by
/// branch and bound over a triangulation refined by longest-edge bisection.
///
/// A triangle's lower bound sums each stop's dwell times its pessimistic
/// rate over the triangle; its upper bound is the dose at its centroid.
pub fn find_dimmest_point(
    plan: &FloorPlan,
    waypoints: &[(Point2, f64)],
    cfg: &LightConfig,
    bnb: &BnbConfig,
) -> Result<DimmestPoint> {
    let fans: Vec<VisibilityFan> =
        waypoints.iter().map(|&(p, _)| VisibilityFan::new(plan, p)).collect::<Result<_>>()?;
    let dwell: Vec<f64> = waypoints.iter().map(|w| w.1).collect();
    let mut heap = BinaryHeap::new();
    let mut discarded = 0.0;
    let mut next_id = 0usize;
    let initial = triangulate(plan)?;
    let evals: Vec<Eval> = initial.par_iter().map(|t| evaluate(plan, &fans, &dwell, t, cfg)).collect();
    for (tri, e) in initial.into_iter().zip(evals) {
        if !e.lit {
            discarded += tri.area();
            continue;
        }
        heap.push(Node { tri, lb: e.lb, ub: e.ub, id: next_id });
        next_id += 1;
    }
    // Lit slivers at the size floor stop splitting but keep counting.
    let mut frozen: Vec<Node> = Vec::new();
    let mut splits = 0usize;
    let mut converged = false;
    loop {
        let frozen_lb = frozen.iter().map(|n| n.lb).fold(f64::INFINITY, f64::min);
        let l = heap.peek().map_or(f64::INFINITY, |n| n.lb).min(frozen_lb);
        let u = heap.iter().chain(&frozen).map(|n| n.ub).fold(f64::INFINITY, f64::min);
        if l.is_finite() && l > 0.0 && u - l <= bnb.gap_tolerance * u {
            converged = true;
            break;
        }
        if heap.is_empty() || splits >= bnb.max_splits {
            break;
        }
        let mut batch = Vec::with_capacity(BATCH);
        let blocking = (1.0 - bnb.gap_tolerance) * u;
        while batch.len() < BATCH {
            if !batch.is_empty() && heap.peek().is_some_and(|n| n.lb > 0.0 && n.lb >= blocking) {
                break;
            }
            match heap.pop() {
                Some(n) if n.tri.area() < bnb.min_triangle_area => {
                    if n.lb > 0.0 {
                        frozen.push(n);
                    } else {
                        log::trace!("discarding sliver of area {:.3e}", n.tri.area());
                        discarded += n.tri.area();
                    }
                }
                Some(n) => batch.push(n),
                None => break,
            }
        }
        let children: Vec<Triangle> = batch
            .iter()
            .flat_map(|n| {
                let (a, b) = n.tri.bisect();
                [a, b]
            })
            .collect();
        splits += batch.len();
        let evals: Vec<Eval> = children.par_iter().map(|t| evaluate(plan, &fans, &dwell, t, cfg)).collect();
        for (tri, e) in children.into_iter().zip(evals) {
            if !e.lit {
                discarded += tri.area();
                continue;
            }
            heap.push(Node { tri, lb: e.lb, ub: e.ub, id: next_id });
            next_id += 1;
        }
    }
    let mut nodes = heap.into_vec();
    nodes.append(&mut frozen);
    nodes.sort_by(|a, b| a.lb.total_cmp(&b.lb).then(a.id.cmp(&b.id)));
    let lower = nodes.iter().map(|n| n.lb).fold(f64::INFINITY, f64::min);
    let best = nodes.iter().min_by(|a, b| a.ub.total_cmp(&b.ub).then(a.id.cmp(&b.id)));
    let (point, dose) = best.map_or((Point2::default(), 0.0), |n| (n.tri.centroid(), n.ub));
    Ok(DimmestPoint {
        point,
        dose,
        lower_bound: if lower.is_finite() { lower } else { 0.0 },
        upper_bound: dose,
        converged,
        splits,
        discarded_area: discarded,
        retained: nodes.into_iter().map(|n| n.tri).collect(),
    })
}

/// Exact-rate plan on the target points, scaled up until the certified
/// minimum dose over the whole (retained) room reaches the requirement.
pub fn plan_branch_and_bound(
    plan: &FloorPlan,
    guards: &[GridCell],
    targets: &TargetSet,
    cfg: &LightConfig,
    req: &DoseRequirement,
    bnb: &BnbConfig,
) -> Result<WaypointSolution> {
    let base = plan_exact(plan, guards, targets, cfg, req)?;
    let dim = find_dimmest_point(plan, &base.waypoints(), cfg, bnb)?;
    if !(dim.lower_bound > 0.0) {
        return Err(Error::Uncoverable(format!(
            "certified minimum dose is zero near ({:.3}, {:.3})",
            dim.point.x, dim.point.y
        )));
    }
    if !dim.converged {
        log::warn!("branch and bound stopped after {} splits without meeting the gap", dim.splits);
    }
    let scale = (req.r / dim.lower_bound).max(1.0);
    let mut sol = base.scaled(scale);
    let area = plan.area();
    sol.algorithm = Algorithm::BranchAndBound;
    sol.coverage_percent = (100.0 * (area - dim.discarded_area) / area).clamp(0.0, 100.0);
    sol.certified = dim.retained.iter().map(|t| t.vertices().to_vec()).collect();
    sol.bnb = Some(BnbReport {
        base_total_dwell: base.total_dwell,
        scale,
        dimmest_point: dim.point,
        dimmest_dose: dim.dose * scale,
        lower_bound: dim.lower_bound * scale,
        upper_bound: dim.upper_bound * scale,
        converged: dim.converged,
        splits: dim.splits,
        discarded_area: dim.discarded_area,
        retained_triangles: dim.retained.len(),
    });
    Ok(sol)
}

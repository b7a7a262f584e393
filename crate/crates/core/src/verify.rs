//! Independent check of a plan on a fine grid, using only
//! [`dose_rate`](crate::irradiance::dose_rate) and the raw geometry.

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{contains, Point2};
use crate::irradiance::{dose_rate, wall_dose_at_height, DoseRequirement, LightConfig};
use crate::plan::{Algorithm, WaypointSolution};
use crate::{FloorPlan, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoseField {
    pub spacing: f64,
    pub points: Vec<Point2>,
    pub dose: Vec<f64>,
}

impl DoseField {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x_m,y_m,dose")?;
        for (p, d) in self.points.iter().zip(&self.dose) {
            writeln!(w, "{:.6},{:.6},{:.6}", p.x, p.y, d)?;
        }
        Ok(())
    }
}

/// Centers of the `spacing` lattice anchored at the plan's bounding-box
/// corner that lie inside the plan.
pub fn fine_grid(plan: &FloorPlan, spacing: f64) -> Vec<Point2> {
    let b = plan.bbox();
    let nx = (b.width() / spacing - 1e-9).ceil().max(0.0) as usize;
    let ny = (b.height() / spacing - 1e-9).ceil().max(0.0) as usize;
    let cand: Vec<Point2> = (0..ny)
        .flat_map(|j| {
            (0..nx).map(move |i| Point2::new(b.min.x + (i as f64 + 0.5) * spacing, b.min.y + (j as f64 + 0.5) * spacing))
        })
        .collect();
    let keep: Vec<bool> = cand.par_iter().map(|&p| contains(plan, p)).collect();
    cand.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect()
}

/// Dose at every fine-grid point from stops with dwell times.
pub fn accumulate_dose(plan: &FloorPlan, waypoints: &[(Point2, f64)], cfg: &LightConfig, spacing: f64) -> DoseField {
    let points = fine_grid(plan, spacing);
    let dose = dose_at(plan, waypoints, cfg, &points);
    DoseField { spacing, points, dose }
}

pub fn dose_at(plan: &FloorPlan, waypoints: &[(Point2, f64)], cfg: &LightConfig, points: &[Point2]) -> Vec<f64> {
    points
        .par_iter()
        .map(|&v| {
            waypoints.iter().fold(0.0, |acc, &(u, t)| if t > 0.0 { acc + t * dose_rate(plan, u, v, cfg) } else { acc })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeCheck {
    /// Fine points lying in certified regions.
    pub checked_points: usize,
    pub failures: usize,
    /// Smallest dose over requirement among checked points.
    pub worst_ratio: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub algorithm: Algorithm,
    pub spacing: f64,
    pub requirement: f64,
    pub light: LightConfig,
    pub fine_points: usize,
    /// Percent of all fine points reaching the requirement.
    pub coverage_percent: f64,
    /// Same, over fine points in cells of targets the plan kept.
    pub kept_coverage_percent: f64,
    pub min_dose: f64,
    pub dimmest_point: Point2,
    pub undisinfected_area: f64,
    pub guarantee: Option<GuaranteeCheck>,
}

impl VerificationReport {
    /// True unless a guarantee check ran and failed.
    pub fn guarantee_ok(&self) -> bool {
        self.guarantee.as_ref().map_or(true, |g| g.passed)
    }
}

/// Relative slack allowed below the requirement inside certified regions.
pub const GUARANTEE_SLACK: f64 = 1e-6;

fn in_convex(p: Point2, poly: &[Point2]) -> bool {
    let m = poly.len();
    (0..m).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        let e = b - a;
        e.cross(p - a) >= -1e-12 * e.norm()
    })
}

/// Bucket convex regions by the fine cells their bounding boxes touch.
struct RegionIndex<'a> {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<&'a [Point2]>>,
}

impl<'a> RegionIndex<'a> {
    fn new(regions: &'a [Vec<Point2>], cell: f64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<&[Point2]>> = HashMap::new();
        for r in regions {
            let b = crate::geometry::Bbox::of(r.iter().copied()).unwrap();
            let (i0, j0) = ((b.min.x / cell).floor() as i64, (b.min.y / cell).floor() as i64);
            let (i1, j1) = ((b.max.x / cell).floor() as i64, (b.max.y / cell).floor() as i64);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    buckets.entry((i, j)).or_default().push(r);
                }
            }
        }
        RegionIndex { cell, buckets }
    }

    fn covers(&self, p: Point2) -> bool {
        let k = ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64);
        self.buckets.get(&k).is_some_and(|v| v.iter().any(|r| in_convex(p, r)))
    }
}

/// Evaluate a solution on the fine grid.
///
/// When the solution carries certified regions, every fine point inside
/// one must receive the requirement (up to [`GUARANTEE_SLACK`]).
pub fn verify_plan(
    plan: &FloorPlan,
    solution: &WaypointSolution,
    cfg: &LightConfig,
    req: &DoseRequirement,
    spacing: f64,
) -> VerificationReport {
    let field = accumulate_dose(plan, &solution.waypoints(), cfg, spacing);
    report_for(plan, solution, cfg, req, &field)
}

pub fn report_for(
    _plan: &FloorPlan,
    solution: &WaypointSolution,
    cfg: &LightConfig,
    req: &DoseRequirement,
    field: &DoseField,
) -> VerificationReport {
    let r = req.r;
    let n = field.points.len();
    let ok = |d: f64| d >= r;
    let covered = field.dose.iter().filter(|&&d| ok(d)).count();
    let (mut min_dose, mut dimmest) = (f64::INFINITY, Point2::default());
    for (p, &d) in field.points.iter().zip(&field.dose) {
        if d < min_dose {
            min_dose = d;
            dimmest = *p;
        }
    }
    let kept_cells: Vec<_> = solution.targets.targets.iter().map(|t| t.cell).collect();
    let (kept_n, kept_ok) = if kept_cells.is_empty() {
        (n, covered)
    } else {
        let cell_regions: Vec<Vec<Point2>> = kept_cells.iter().map(|c| c.corners()).collect();
        let idx = RegionIndex::new(&cell_regions, kept_cells[0].half_width * 2.0);
        let flags: Vec<(bool, bool)> = field
            .points
            .par_iter()
            .zip(&field.dose)
            .map(|(&p, &d)| {
                let k = idx.covers(p);
                (k, k && ok(d))
            })
            .collect();
        (flags.iter().filter(|f| f.0).count(), flags.iter().filter(|f| f.1).count())
    };
    let guarantee = if solution.certified.is_empty() {
        None
    } else {
        let idx = RegionIndex::new(&solution.certified, 4.0 * field.spacing);
        let checked: Vec<f64> = field
            .points
            .par_iter()
            .zip(&field.dose)
            .filter(|(&p, _)| idx.covers(p))
            .map(|(_, &d)| d / r)
            .collect();
        let failures = checked.iter().filter(|&&q| q < 1.0 - GUARANTEE_SLACK).count();
        Some(GuaranteeCheck {
            checked_points: checked.len(),
            failures,
            worst_ratio: checked.iter().cloned().fold(f64::INFINITY, f64::min),
            passed: failures == 0,
        })
    };
    let pct = |a: usize, b: usize| if b == 0 { 0.0 } else { 100.0 * a as f64 / b as f64 };
    VerificationReport {
        algorithm: solution.algorithm,
        spacing: field.spacing,
        requirement: r,
        light: *cfg,
        fine_points: n,
        coverage_percent: pct(covered, n),
        kept_coverage_percent: pct(kept_ok, kept_n),
        min_dose: if min_dose.is_finite() { min_dose } else { 0.0 },
        dimmest_point: dimmest,
        undisinfected_area: (n - covered) as f64 * field.spacing * field.spacing,
        guarantee,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallCheck {
    pub samples: usize,
    /// Violating `(D, theta, z)` triples.
    pub violations: Vec<(f64, f64, f64)>,
    pub passed: bool,
}

/// Random search for a wall point lit less than the wall's foot.
pub fn check_wall_sufficiency(samples: usize, cfg: &LightConfig, seed: u64) -> Result<WallCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = cfg.half_height;
    let mut violations = Vec::new();
    for _ in 0..samples {
        let d: f64 = rng.gen_range(1e-3..20.0);
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
        let z: f64 = rng.gen_range(0.0..=2.0 * h);
        let base = wall_dose_at_height(d, theta, 0.0, cfg)?;
        let at = wall_dose_at_height(d, theta, z, cfg)?;
        if at < base * (1.0 - 1e-12) {
            violations.push((d, theta, z));
        }
    }
    Ok(WallCheck { samples, passed: violations.is_empty(), violations })
}

//! Dwell-time planning: the covering LP and the algorithms built on it.

mod bnb;
pub mod lp;

pub use bnb::{find_dimmest_point, plan_branch_and_bound, BnbConfig, BnbReport, DimmestPoint};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretize::{filter_with_matrix, TargetSet};
use crate::geometry::{GuardRegion, Point2};
use crate::irradiance::{build_matrix, build_optimistic_matrix, dose_rate, BoundKind, DoseRequirement, GridCell, IrradianceMatrix, LightConfig};
use crate::{Error, FloorPlan, Result};

/// Dwell below this many seconds is treated as no stop at all.
pub const DWELL_FLOOR: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Naive,
    Pessimistic,
    BranchAndBound,
    LowerBound,
    Exact,
    TwoStop,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::Pessimistic => "pessimistic",
            Algorithm::BranchAndBound => "branch-and-bound",
            Algorithm::LowerBound => "lower-bound",
            Algorithm::Exact => "exact",
            Algorithm::TwoStop => "two-stop",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    pub rates: IrradianceMatrix,
    pub requirement: DoseRequirement,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WaypointSolution {
    pub algorithm: Algorithm,
    pub bound_kind: BoundKind,
    pub guards: Vec<Point2>,
    /// Seconds per guard.
    pub dwell: Vec<f64>,
    pub total_dwell: f64,
    /// Guards with dwell above [`DWELL_FLOOR`].
    pub active: Vec<usize>,
    /// Targets the solution accounts for (covered cells, lit targets).
    pub coverage_targets: usize,
    pub total_targets: usize,
    /// Percent of the room the algorithm itself claims.
    pub coverage_percent: f64,
    /// Convex regions whose every point is guaranteed the required dose.
    #[serde(skip)]
    pub certified: Vec<Vec<Point2>>,
    /// Targets behind the solution: kept ones and dropped ones.
    #[serde(skip)]
    pub targets: TargetSet,
    pub bnb: Option<BnbReport>,
}

impl WaypointSolution {
    pub fn waypoints(&self) -> Vec<(Point2, f64)> {
        self.active.iter().map(|&g| (self.guards[g], self.dwell[g])).collect()
    }

    /// Same solution with every dwell multiplied by `k`.
    pub fn scaled(&self, k: f64) -> WaypointSolution {
        let mut s = self.clone();
        s.dwell.iter_mut().for_each(|d| *d *= k);
        s.total_dwell = s.dwell.iter().sum();
        s
    }
}

fn active_of(dwell: &[f64]) -> Vec<usize> {
    (0..dwell.len()).filter(|&g| dwell[g] > DWELL_FLOOR).collect()
}

/// Unit-requirement covering LP `min Σt : A t ≥ 1, t ≥ 0` solved through its
/// dual, returning the primal vector and the certified relative gap.
pub(crate) fn solve_unit(m: &IrradianceMatrix) -> Result<(Vec<f64>, f64)> {
    let (ng, nt) = (m.n_guards(), m.n_targets());
    if ng == 0 || nt == 0 {
        return Err(Error::Degenerate("empty rate matrix".into()));
    }
    if let Some(v) = (0..nt).find(|&v| !m.target_seen(v)) {
        return Err(Error::Infeasible(format!("target {v} receives no light")));
    }
    let rows: Vec<usize> = (0..ng).filter(|&g| m.row(g).iter().any(|&r| r > 0.0)).collect();
    let row_scale: Vec<f64> = rows.iter().map(|&g| 1.0 / m.row(g).iter().cloned().fold(0.0, f64::max)).collect();
    let mut colmax = vec![0.0f64; nt];
    for (k, &g) in rows.iter().enumerate() {
        for (c, &r) in colmax.iter_mut().zip(m.row(g)) {
            *c = c.max(r * row_scale[k]);
        }
    }
    let col_scale: Vec<f64> = colmax.iter().map(|&c| 1.0 / c).collect();
    let mut a = Vec::with_capacity(rows.len() * nt);
    for (k, &g) in rows.iter().enumerate() {
        a.extend(m.row(g).iter().zip(&col_scale).map(|(&r, &cs)| r * row_scale[k] * cs));
    }
    let res = lp::maximize(&a, rows.len(), nt, &row_scale, &col_scale)?;
    let mut t = vec![0.0; ng];
    for (k, &g) in rows.iter().enumerate() {
        t[g] = res.duals[k] * row_scale[k];
    }
    let cover = m.dose(&t);
    let min_ratio = cover.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min_ratio > 0.5) {
        return Err(Error::Numerical(format!("primal recovery failed (coverage ratio {min_ratio:.3e})")));
    }
    if min_ratio < 1.0 {
        t.iter_mut().for_each(|x| *x /= min_ratio);
    }
    let y: Vec<f64> = res.y.iter().zip(&col_scale).map(|(a, b)| a * b).collect();
    let load = (0..ng).map(|g| m.row(g).iter().zip(&y).map(|(a, b)| a * b).sum::<f64>()).fold(0.0, f64::max);
    let dual_obj: f64 = y.iter().sum::<f64>() / load.max(1.0);
    let primal: f64 = t.iter().sum();
    let gap = (primal - dual_obj) / primal;
    log::debug!("lp {}x{}: {} pivots, objective {primal:.6e}, gap {gap:.2e}", ng, nt, res.pivots);
    Ok((t, gap))
}

pub const LP_GAP: f64 = 1e-6;

/// Minimum total dwell meeting the requirement at every target.
pub fn solve_lp(problem: &LpProblem) -> Result<WaypointSolution> {
    let m = &problem.rates;
    let r = problem.requirement.r;
    let (t, gap) = solve_unit(m)?;
    if gap > LP_GAP {
        return Err(Error::Numerical(format!("optimality gap {gap:.2e} above {LP_GAP:.0e}")));
    }
    let mut dwell: Vec<f64> = t.iter().map(|x| x * r).collect();
    apply_dwell_floor(m, &mut dwell, r);
    let total_dwell = dwell.iter().sum();
    Ok(WaypointSolution {
        algorithm: Algorithm::Exact,
        bound_kind: m.kind,
        guards: m.guards.clone(),
        active: active_of(&dwell),
        dwell,
        total_dwell,
        coverage_targets: m.n_targets(),
        total_targets: m.n_targets(),
        coverage_percent: 100.0,
        certified: Vec::new(),
        targets: TargetSet::default(),
        bnb: None,
    })
}

/// Zero micro-stops and rescale so every target still meets `r`; keep the
/// original dwell if some target would lose all light.
fn apply_dwell_floor(m: &IrradianceMatrix, dwell: &mut [f64], r: f64) {
    if !dwell.iter().any(|&d| d > 0.0 && d <= DWELL_FLOOR) {
        return;
    }
    let mut trial: Vec<f64> = dwell.iter().map(|&d| if d <= DWELL_FLOOR { 0.0 } else { d }).collect();
    let dose = m.dose(&trial);
    let min = dose.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return;
    }
    if min < r {
        trial.iter_mut().for_each(|d| *d *= r / min);
    }
    dwell.copy_from_slice(&trial);
}

fn percent(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        100.0 * a as f64 / b as f64
    }
}

/// Guaranteed plan: every kept target cell receives the requirement at
/// every point, using pessimistic rates.
pub fn plan_pessimistic(
    plan: &FloorPlan,
    guards: &[GridCell],
    targets: &TargetSet,
    cfg: &LightConfig,
    req: &DoseRequirement,
) -> Result<WaypointSolution> {
    let m = build_matrix(plan, guards, &targets.targets, cfg, BoundKind::Pessimistic)?;
    let (kept, m) = filter_with_matrix(&m, targets)?;
    let mut sol = solve_lp(&LpProblem { rates: m, requirement: *req })?;
    sol.algorithm = Algorithm::Pessimistic;
    sol.coverage_targets = kept.targets.len();
    sol.total_targets = kept.total();
    sol.coverage_percent = percent(sol.coverage_targets, sol.total_targets);
    sol.certified = kept.targets.iter().filter_map(|t| t.region.clone()).collect();
    sol.targets = kept;
    Ok(sol)
}

/// Minimum-time plan for the target points under exact rates. Guarantees
/// nothing between grid points.
pub fn plan_exact(
    plan: &FloorPlan,
    guards: &[GridCell],
    targets: &TargetSet,
    cfg: &LightConfig,
    req: &DoseRequirement,
) -> Result<WaypointSolution> {
    let m = build_matrix(plan, guards, &targets.targets, cfg, BoundKind::Exact)?;
    let (kept, m) = filter_with_matrix(&m, targets)?;
    let mut sol = solve_lp(&LpProblem { rates: m, requirement: *req })?;
    sol.coverage_targets = kept.targets.len();
    sol.total_targets = kept.total();
    sol.coverage_percent = percent(sol.coverage_targets, sol.total_targets);
    sol.targets = kept;
    Ok(sol)
}

/// Certificate, not a plan: with optimistic rates from whole guard cells,
/// no placement in the guard region can light the kept targets faster.
///
/// `guard_cells` should cover the guard region. The LP runs over the kept
/// targets of `targets`; coverage also counts dropped targets that some
/// cell could still light.
pub fn plan_lower_bound(
    plan: &FloorPlan,
    region: &GuardRegion,
    guard_cells: &[GridCell],
    targets: &TargetSet,
    cfg: &LightConfig,
    req: &DoseRequirement,
) -> Result<WaypointSolution> {
    let (centers, patches): (Vec<Point2>, Vec<Vec<Point2>>) = guard_cells
        .iter()
        .map(|c| (c.center, region.clip_convex_superset(&c.corners())))
        .filter(|(_, k)| k.len() >= 3)
        .unzip();
    let m = build_optimistic_matrix(plan, centers.clone(), &patches, &targets.targets, cfg)?;
    let (kept, m) = filter_with_matrix(&m, targets)?;
    let mut sol = solve_lp(&LpProblem { rates: m, requirement: *req })?;
    let readmitted = if targets.dropped.is_empty() {
        0
    } else {
        let d = build_optimistic_matrix(plan, centers, &patches, &targets.dropped, cfg)?;
        (0..d.n_targets()).filter(|&t| d.target_seen(t)).count()
    };
    sol.algorithm = Algorithm::LowerBound;
    sol.coverage_targets = kept.targets.len() + readmitted;
    sol.total_targets = targets.total();
    sol.coverage_percent = percent(sol.coverage_targets, sol.total_targets);
    sol.targets = kept;
    Ok(sol)
}

/// Middle of the longest piece of the horizontal line halving the plan's
/// bounding box.
pub fn bisector_midpoint(plan: &FloorPlan) -> Option<Point2> {
    let b = plan.bbox();
    let y = 0.5 * (b.min.y + b.max.y);
    plan.horizontal_slice(y)
        .into_iter()
        .max_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0)))
        .map(|(x0, x1)| Point2::new(0.5 * (x0 + x1), y))
}

/// Single stop at the bisector midpoint, staying until the dimmest lit
/// target has its dose. Snaps to the nearest guard-grid point when the
/// midpoint lies outside the guard region.
pub fn plan_naive(
    plan: &FloorPlan,
    cfg: &LightConfig,
    req: &DoseRequirement,
    targets: &TargetSet,
    region: &GuardRegion,
    grid: &[GridCell],
) -> Result<WaypointSolution> {
    let mut p = bisector_midpoint(plan).ok_or_else(|| Error::Degenerate("bisector misses the plan".into()))?;
    if !region.contains(p) {
        let best = grid
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.center.dist2(p).total_cmp(&b.1.center.dist2(p)).then(a.0.cmp(&b.0)))
            .ok_or_else(|| Error::Degenerate("bisector midpoint unusable and no guard grid".into()))?;
        p = best.1.center;
    }
    let all: Vec<_> = targets.targets.iter().chain(&targets.dropped).collect();
    let rates: Vec<f64> = all.par_iter().map(|t| dose_rate(plan, p, t.point, cfg)).collect();
    let lit = rates.iter().filter(|&&r| r > 0.0).count();
    let min = rates.iter().cloned().filter(|&r| r > 0.0).fold(f64::INFINITY, f64::min);
    if lit == 0 {
        return Err(Error::Degenerate("no target visible from the naive stop".into()));
    }
    let dwell = req.r / min;
    Ok(WaypointSolution {
        algorithm: Algorithm::Naive,
        bound_kind: BoundKind::Exact,
        guards: vec![p],
        dwell: vec![dwell],
        total_dwell: dwell,
        active: vec![0],
        coverage_targets: lit,
        total_targets: all.len(),
        coverage_percent: percent(lit, all.len()),
        certified: Vec::new(),
        targets: targets.clone(),
        bnb: None,
    })
}

/// Best plan restricted to exactly two stops, by exhaustive search over
/// guard pairs with rates of the given kind.
pub fn plan_two_stop(
    plan: &FloorPlan,
    guards: &[GridCell],
    targets: &TargetSet,
    cfg: &LightConfig,
    req: &DoseRequirement,
    kind: BoundKind,
) -> Result<WaypointSolution> {
    let m = build_matrix(plan, guards, &targets.targets, cfg, kind)?;
    let (kept, m) = filter_with_matrix(&m, targets)?;
    let ng = m.n_guards();
    let nt = m.n_targets();
    let pairs: Vec<(usize, usize)> = (0..ng).flat_map(|i| (i + 1..ng).map(move |j| (i, j))).collect();
    let scored: Vec<Option<(f64, usize, usize, f64, f64)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (ri, rj) = (m.row(i), m.row(j));
            if (0..nt).any(|v| ri[v] <= 0.0 && rj[v] <= 0.0) {
                return None;
            }
            let (ti, tj) = two_var_cover(ri, rj);
            Some((ti + tj, i, j, ti, tj))
        })
        .collect();
    let best = scored
        .into_iter()
        .flatten()
        .min_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))))
        .ok_or_else(|| Error::Infeasible("no pair of stops lights every target".into()))?;
    let mut dwell = vec![0.0; ng];
    dwell[best.1] = best.3 * req.r;
    dwell[best.2] = best.4 * req.r;
    let total_dwell = dwell.iter().sum();
    Ok(WaypointSolution {
        algorithm: Algorithm::TwoStop,
        bound_kind: kind,
        guards: m.guards.clone(),
        active: active_of(&dwell),
        dwell,
        total_dwell,
        coverage_targets: kept.targets.len(),
        total_targets: kept.total(),
        coverage_percent: percent(kept.targets.len(), kept.total()),
        certified: if kind == BoundKind::Pessimistic {
            kept.targets.iter().filter_map(|t| t.region.clone()).collect()
        } else {
            Vec::new()
        },
        targets: kept,
        bnb: None,
    })
}

/// `min a + b` with `a·x_v + b·y_v ≥ 1` for all v: the best split
/// `λ = a/(a+b)` maximizes the lower envelope `min_v (y_v + λ(x_v − y_v))`,
/// a concave piecewise-linear function, whose breakpoints are scanned.
fn two_var_cover(x: &[f64], y: &[f64]) -> (f64, f64) {
    let env = |l: f64| x.iter().zip(y).map(|(&a, &b)| b + l * (a - b)).fold(f64::INFINITY, f64::min);
    let mut cands = vec![0.0, 1.0];
    // The maximum sits at an endpoint or where the minimizing line changes;
    // a golden-section search on the concave envelope finds it.
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (env(c), env(d));
    for _ in 0..200 {
        if fc < fd {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = env(d);
        } else {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = env(c);
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    cands.push(0.5 * (lo + hi));
    let (l, f) = cands
        .into_iter()
        .map(|l| (l, env(l)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let total = 1.0 / f;
    (l * total, (1.0 - l) * total)
}

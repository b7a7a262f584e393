//! Visiting order of the stops and the executable plan.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{GeodesicGraph, Point2};
use crate::plan::{Algorithm, WaypointSolution};
use crate::verify::VerificationReport;
use crate::{Error, FloorPlan, Result};

pub const DEFAULT_SPEED: f64 = 0.3;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Route {
    /// Visiting order as indices into the solution's active stops.
    pub order: Vec<usize>,
    /// Polyline from each stop to the next.
    pub legs: Vec<Vec<Point2>>,
    pub travel_length: f64,
    pub travel_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stop {
    pub x: f64,
    pub y: f64,
    pub dwell: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DisinfectionPlan {
    pub algorithm: Algorithm,
    /// Stops in visiting order.
    pub stops: Vec<Stop>,
    pub route: Route,
    pub total_dwell: f64,
    pub travel_time: f64,
    pub total_time: f64,
    /// Travel time over total time.
    pub travel_ratio: f64,
    pub coverage_percent: f64,
    pub speed: f64,
}

struct Paths {
    dist: Vec<Vec<f64>>,
    paths: Vec<Vec<Vec<Point2>>>,
}

fn geodesic_table(plan: &FloorPlan, points: &[Point2]) -> Result<Paths> {
    let g = GeodesicGraph::new(plan);
    let vis: Vec<Vec<(usize, f64)>> = points.par_iter().map(|&p| g.visible_nodes(plan, p)).collect();
    let n = points.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let legs: Vec<(Vec<Point2>, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (points[i], points[j]);
            if crate::geometry::segment_clear(plan, a, b) {
                Ok((vec![a, b], a.dist(b)))
            } else {
                g.join(a, b, &vis[i], &vis[j])
            }
        })
        .collect::<Result<_>>()?;
    let mut dist = vec![vec![0.0; n]; n];
    let mut paths = vec![vec![Vec::new(); n]; n];
    for (i, p) in points.iter().enumerate() {
        paths[i][i] = vec![*p];
    }
    for (&(i, j), (path, d)) in pairs.iter().zip(legs) {
        dist[i][j] = d;
        dist[j][i] = d;
        let mut rev = path.clone();
        rev.reverse();
        paths[i][j] = path;
        paths[j][i] = rev;
    }
    Ok(Paths { dist, paths })
}

/// Symmetric matrix of shortest in-room path lengths.
pub fn pairwise_geodesics(plan: &FloorPlan, points: &[Point2]) -> Result<Vec<Vec<f64>>> {
    Ok(geodesic_table(plan, points)?.dist)
}

pub fn tour_length(d: &[Vec<f64>], order: &[usize], closed: bool) -> f64 {
    let mut s: f64 = order.windows(2).fold(0.0, |acc, w| acc + d[w[0]][w[1]]);
    if closed && order.len() > 1 {
        s += d[order[order.len() - 1]][order[0]];
    }
    s
}

/// Tours of at most this many stops are solved exactly.
pub const EXACT_TOUR_LIMIT: usize = 12;

/// Tour from `start` visiting every node once. Open unless `closed`.
///
/// Small instances are solved exactly by dynamic programming over subsets;
/// larger ones take a nearest-neighbour tour improved by 2-opt and Or-opt
/// moves until neither shortens it.
pub fn solve_tsp(d: &[Vec<f64>], start: usize, closed: bool) -> Vec<usize> {
    let n = d.len();
    if n == 0 {
        return Vec::new();
    }
    if n <= EXACT_TOUR_LIMIT {
        return held_karp(d, start, closed);
    }
    let mut order = vec![start];
    let mut used = vec![false; n];
    used[start] = true;
    for _ in 1..n {
        let last = *order.last().unwrap();
        let next = (0..n)
            .filter(|&j| !used[j])
            .min_by(|&a, &b| d[last][a].total_cmp(&d[last][b]).then(a.cmp(&b)))
            .unwrap();
        used[next] = true;
        order.push(next);
    }
    loop {
        two_opt(d, &mut order, closed);
        if !or_opt(d, &mut order, closed) {
            return order;
        }
    }
}

fn held_karp(d: &[Vec<f64>], start: usize, closed: bool) -> Vec<usize> {
    let n = d.len();
    let full = 1usize << n;
    let mut cost = vec![f64::INFINITY; full * n];
    let mut prev = vec![usize::MAX; full * n];
    cost[(1 << start) * n + start] = 0.0;
    for mask in 0..full {
        if mask & (1 << start) == 0 {
            continue;
        }
        for j in 0..n {
            let c = cost[mask * n + j];
            if !c.is_finite() {
                continue;
            }
            for k in 0..n {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next = (mask | 1 << k) * n + k;
                if c + d[j][k] < cost[next] {
                    cost[next] = c + d[j][k];
                    prev[next] = j;
                }
            }
        }
    }
    let last = full - 1;
    let end = (0..n)
        .min_by(|&a, &b| {
            let ca = cost[last * n + a] + if closed { d[a][start] } else { 0.0 };
            let cb = cost[last * n + b] + if closed { d[b][start] } else { 0.0 };
            ca.total_cmp(&cb).then(a.cmp(&b))
        })
        .unwrap();
    let mut order = Vec::with_capacity(n);
    let (mut mask, mut j) = (last, end);
    while j != usize::MAX {
        order.push(j);
        let p = prev[mask * n + j];
        mask &= !(1 << j);
        j = p;
    }
    order.reverse();
    order
}

/// One improving relocation of a run of up to three stops, possibly
/// reversed; the start stays first.
fn or_opt(d: &[Vec<f64>], order: &mut Vec<usize>, closed: bool) -> bool {
    let n = order.len();
    let base = tour_length(d, order, closed);
    for k in 1..=3.min(n.saturating_sub(2)) {
        for i in 1..=n - k {
            let seg: Vec<usize> = order[i..i + k].to_vec();
            let rest: Vec<usize> = order[..i].iter().chain(&order[i + k..]).copied().collect();
            for at in 1..=rest.len() {
                if at == i {
                    continue;
                }
                for rev in [false, true] {
                    let mut cand = rest.clone();
                    let mut s = seg.clone();
                    if rev {
                        s.reverse();
                    }
                    cand.splice(at..at, s);
                    if tour_length(d, &cand, closed) < base - 1e-9 {
                        *order = cand;
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn two_opt(d: &[Vec<f64>], order: &mut [usize], closed: bool) {
    let n = order.len();
    if n < 3 {
        return;
    }
    let edge = |o: &[usize], a: usize, b: usize| -> f64 {
        if b == n {
            if closed {
                d[o[a]][o[0]]
            } else {
                0.0
            }
        } else {
            d[o[a]][o[b]]
        }
    };
    loop {
        let mut improved = false;
        'outer: for i in 1..n - 1 {
            for j in i + 1..n {
                let before = edge(order, i - 1, i) + edge(order, j, j + 1);
                let after = d[order[i - 1]][order[j]] + if j + 1 == n {
                    if closed {
                        d[order[i]][order[0]]
                    } else {
                        0.0
                    }
                } else {
                    d[order[i]][order[j + 1]]
                };
                if after < before - 1e-9 {
                    order[i..=j].reverse();
                    improved = true;
                    break 'outer;
                }
            }
        }
        if !improved {
            return;
        }
    }
}

/// Order the active stops of a solution and build the travel legs.
///
/// The tour starts at the active stop nearest to `entry`, or at the first
/// active stop without one.
pub fn plan_route(
    plan: &FloorPlan,
    solution: &WaypointSolution,
    entry: Option<Point2>,
    speed: f64,
    closed: bool,
) -> Result<Route> {
    if !(speed > 0.0) {
        return Err(Error::InvalidParameter(format!("speed {speed} must be positive")));
    }
    let pts: Vec<Point2> = solution.active.iter().map(|&g| solution.guards[g]).collect();
    if pts.is_empty() {
        return Ok(Route::default());
    }
    let table = geodesic_table(plan, &pts)?;
    let start = entry.map_or(0, |e| {
        (0..pts.len()).min_by(|&a, &b| pts[a].dist2(e).total_cmp(&pts[b].dist2(e)).then(a.cmp(&b))).unwrap()
    });
    let order = solve_tsp(&table.dist, start, closed);
    let mut hops: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0], w[1])).collect();
    if closed && order.len() > 1 {
        hops.push((order[order.len() - 1], order[0]));
    }
    let legs: Vec<Vec<Point2>> = hops.iter().map(|&(a, b)| table.paths[a][b].clone()).collect();
    let travel_length = tour_length(&table.dist, &order, closed);
    Ok(Route { order, legs, travel_length, travel_time: travel_length / speed })
}

/// Combine dwell times and route into the plan handed to the robot.
pub fn assemble_plan(
    _plan: &FloorPlan,
    solution: &WaypointSolution,
    route: &Route,
    speed: f64,
    verification: &VerificationReport,
) -> Result<DisinfectionPlan> {
    let k = solution.active.len();
    let mut seen = vec![false; k];
    if route.order.len() != k || route.order.iter().any(|&i| i >= k || std::mem::replace(&mut seen[i], true)) {
        return Err(Error::RouteMismatch(format!("{} route nodes for {k} active stops", route.order.len())));
    }
    let stops: Vec<Stop> = route
        .order
        .iter()
        .map(|&i| {
            let g = solution.active[i];
            Stop { x: solution.guards[g].x, y: solution.guards[g].y, dwell: solution.dwell[g] }
        })
        .collect();
    let total_dwell = stops.iter().fold(0.0, |acc, s| acc + s.dwell);
    let total_time = total_dwell + route.travel_time;
    Ok(DisinfectionPlan {
        algorithm: solution.algorithm,
        stops,
        route: route.clone(),
        total_dwell,
        travel_time: route.travel_time,
        total_time,
        travel_ratio: if total_time > 0.0 { route.travel_time / total_time } else { 0.0 },
        coverage_percent: verification.coverage_percent,
        speed,
    })
}

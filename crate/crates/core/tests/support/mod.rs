//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uvplan::corpus;
use uvplan::discretize::{build_guard_cover, build_target_grid};
use uvplan::geometry::{contains, erode, GeodesicGraph, Point2};
use uvplan::irradiance::{
    build_matrix, build_optimistic_matrix, dose_rate, optimistic_cell_rate, BoundKind, GridCell, IncidenceMode,
    LightConfig,
};
use uvplan::FloorPlan;

pub fn random_point(plan: &FloorPlan, rng: &mut ChaCha8Rng) -> Point2 {
    let b = plan.bbox();
    loop {
        let q = Point2::new(rng.gen_range(b.min.x..b.max.x), rng.gen_range(b.min.y..b.max.y));
        if contains(plan, q) {
            return q;
        }
    }
}

/// Shortest paths on the lattice of free cell centers, with moves to any
/// node within `K` cells along a primitive direction whose segment stays
/// in free cells.
pub struct GridOracle {
    s: f64,
    w: usize,
    h: usize,
    origin: Point2,
    free: Vec<bool>,
    moves: Vec<(i64, i64, f64)>,
}

const K: i64 = 6;

impl GridOracle {
    pub fn new(plan: &FloorPlan, s: f64) -> Self {
        let b = plan.bbox();
        let w = (b.width() / s).round() as usize;
        let h = (b.height() / s).round() as usize;
        let origin = b.min;
        let mut free = vec![false; w * h];
        for j in 0..h {
            for i in 0..w {
                let c = Point2::new(origin.x + (i as f64 + 0.5) * s, origin.y + (j as f64 + 0.5) * s);
                free[j * w + i] = contains(plan, c);
            }
        }
        let gcd = |mut a: i64, mut b: i64| {
            while b != 0 {
                (a, b) = (b, a % b);
            }
            a.abs()
        };
        let moves = (-K..=K)
            .flat_map(|dx| (-K..=K).map(move |dy| (dx, dy)))
            .filter(|&(dx, dy)| (dx, dy) != (0, 0) && gcd(dx, dy) == 1)
            .map(|(dx, dy)| (dx, dy, s * ((dx * dx + dy * dy) as f64).sqrt()))
            .collect();
        GridOracle { s, w, h, origin, free, moves }
    }

    pub fn cell_of(&self, q: Point2) -> Option<usize> {
        let i = ((q.x - self.origin.x) / self.s).floor();
        let j = ((q.y - self.origin.y) / self.s).floor();
        if i < 0.0 || j < 0.0 || i as usize >= self.w || j as usize >= self.h {
            return None;
        }
        let k = j as usize * self.w + i as usize;
        self.free[k].then_some(k)
    }

    pub fn center(&self, k: usize) -> Point2 {
        Point2::new(
            self.origin.x + ((k % self.w) as f64 + 0.5) * self.s,
            self.origin.y + ((k / self.w) as f64 + 0.5) * self.s,
        )
    }

    fn move_ok(&self, from: usize, dx: i64, dy: i64) -> Option<usize> {
        let (i, j) = ((from % self.w) as i64, (from / self.w) as i64);
        let (ti, tj) = (i + dx, j + dy);
        if ti < 0 || tj < 0 || ti >= self.w as i64 || tj >= self.h as i64 {
            return None;
        }
        let steps = 8 * dx.abs().max(dy.abs());
        let a = self.center(from);
        let d = Point2::new(dx as f64 * self.s, dy as f64 * self.s);
        for k in 0..steps {
            let t = (k as f64 + 0.5) / steps as f64;
            self.cell_of(a + d * t)?;
        }
        Some(tj as usize * self.w + ti as usize)
    }

    pub fn dijkstra(&self, src: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.w * self.h];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Reverse((0u64, src)));
        while let Some(Reverse((bits, u))) = heap.pop() {
            let du = f64::from_bits(bits);
            if du > dist[u] {
                continue;
            }
            for &(dx, dy, len) in &self.moves {
                if let Some(v) = self.move_ok(u, dx, dy) {
                    let nd = du + len;
                    if nd < dist[v] {
                        dist[v] = nd;
                        heap.push(Reverse((nd.to_bits(), v)));
                    }
                }
            }
        }
        dist
    }
}

#[derive(Debug, Default)]
pub struct GeodesicStats {
    pub pairs: usize,
    /// Pairs where the lattice path exceeds the geodesic by more than two
    /// lattice diagonals.
    pub too_far: usize,
    /// Pairs where the geodesic is longer than a feasible lattice path.
    pub too_long: usize,
    pub worst_excess: f64,
}

/// Compare geodesic distances with lattice shortest paths at spacing `s`.
pub fn geodesic_stats(plan: &FloorPlan, seed: u64, sources: usize, per_source: usize, s: f64) -> GeodesicStats {
    let oracle = GridOracle::new(plan, s);
    let graph = GeodesicGraph::new(plan);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = 2.0 * s * std::f64::consts::SQRT_2;
    let mut st = GeodesicStats::default();
    let mut done = 0;
    while done < sources {
        let a = random_point(plan, &mut rng);
        let Some(na) = oracle.cell_of(a) else { continue };
        done += 1;
        let dist = oracle.dijkstra(na);
        let mut k = 0;
        while k < per_source {
            let b = random_point(plan, &mut rng);
            let Some(nb) = oracle.cell_of(b) else { continue };
            k += 1;
            let grid = a.dist(oracle.center(na)) + dist[nb] + oracle.center(nb).dist(b);
            let g = graph.distance(plan, a, b).unwrap();
            st.pairs += 1;
            st.worst_excess = st.worst_excess.max(grid - g);
            if g > grid + 1e-9 || g < a.dist(b) - 1e-12 {
                st.too_long += 1;
            }
            if grid - g > tol {
                st.too_far += 1;
            }
        }
    }
    st
}

#[derive(Debug, Default)]
pub struct BoundStats {
    pub pessimistic_cells: usize,
    pub optimistic_cells: usize,
    pub samples: usize,
    pub pessimistic_violations: usize,
    pub optimistic_violations: usize,
    /// Pessimistic bounds that were positive, to show the check has teeth.
    pub positive_pessimistic: usize,
}

fn random_light(rng: &mut ChaCha8Rng) -> LightConfig {
    let incidence = [IncidenceMode::WallExtended, IncidenceMode::FloorNormal, IncidenceMode::None][rng.gen_range(0..3)];
    LightConfig {
        power: rng.gen_range(1.0..20.0),
        half_height: [1.35, 0.5, 0.0][rng.gen_range(0..3)],
        shadow_radius: [0.0, 0.3][rng.gen_range(0..2)],
        incidence,
    }
}

fn in_convex(p: Point2, poly: &[Point2]) -> bool {
    let m = poly.len();
    (0..m).all(|i| (poly[(i + 1) % m] - poly[i]).cross(p - poly[i]) > 0.0)
}

fn sample_in(poly: &[Point2], rng: &mut ChaCha8Rng, n: usize, keep: impl Fn(Point2) -> bool) -> Vec<Point2> {
    let (mut lx, mut ly, mut hx, mut hy) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in poly {
        lx = lx.min(p.x);
        ly = ly.min(p.y);
        hx = hx.max(p.x);
        hy = hy.max(p.y);
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..50 * n {
        if out.len() == n {
            break;
        }
        let p = Point2::new(rng.gen_range(lx..=hx), rng.gen_range(ly..=hy));
        if in_convex(p, poly) && keep(p) {
            out.push(p);
        }
    }
    out
}

/// Check certified cell bounds against `dose_rate` at `samples` random
/// points per cell, over `cells` random cells of each bound kind.
pub fn bound_stats(seed: u64, cells: usize, samples: usize) -> BoundStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = BoundStats::default();
    let mut room = 0u64;
    while st.pessimistic_cells < cells || st.optimistic_cells < cells {
        let plan = corpus::random_rectilinear(seed.wrapping_mul(1000) + room, 8, 0.5);
        room += 1;
        let eps = [0.25, 0.5, 0.75, 1.0][rng.gen_range(0..4)];
        let targets = build_target_grid(&plan, eps).targets;
        let region = erode(&plan, 0.3);
        let cover = build_guard_cover(&region, eps);
        for _ in 0..10 {
            let cfg = random_light(&mut rng);
            if st.pessimistic_cells < cells {
                let t = &targets[rng.gen_range(0..targets.len())];
                if let Some(reg) = &t.region {
                    // Lamps near the cell give the bound something to prove.
                    let u = loop {
                        let u = random_point(&plan, &mut rng);
                        if rng.gen_bool(0.3) || u.dist(t.cell.center) < 3.0 {
                            break u;
                        }
                    };
                    let m = build_matrix(&plan, &[GridCell::new(u, 0.5 * eps)], &[t.clone()], &cfg, BoundKind::Pessimistic)
                        .unwrap();
                    let bound = m.rate(0, 0);
                    st.pessimistic_cells += 1;
                    if bound > 0.0 {
                        st.positive_pessimistic += 1;
                    }
                    for p in sample_in(reg, &mut rng, samples, |_| true) {
                        st.samples += 1;
                        if dose_rate(&plan, u, p, &cfg) < bound * (1.0 - 1e-9) {
                            st.pessimistic_violations += 1;
                        }
                    }
                }
            }
            if st.optimistic_cells < cells && !cover.is_empty() {
                let c = cover[rng.gen_range(0..cover.len())];
                let t = &targets[rng.gen_range(0..targets.len())];
                let v = t.point;
                // Whole cell against any in-room lamp position.
                let whole = optimistic_cell_rate(&plan, &c, v, &cfg).unwrap();
                for p in sample_in(&c.corners(), &mut rng, samples / 2, |p| contains(&plan, p)) {
                    st.samples += 1;
                    if dose_rate(&plan, p, v, &cfg) > whole * (1.0 + 1e-9) {
                        st.optimistic_violations += 1;
                    }
                }
                // Clipped patch against guard-region positions.
                let patch = region.clip_convex_superset(&c.corners());
                if patch.len() >= 3 {
                    let m = build_optimistic_matrix(&plan, vec![c.center], &[patch.clone()], &[t.clone()], &cfg).unwrap();
                    let bound = m.rate(0, 0);
                    for p in sample_in(&patch, &mut rng, samples - samples / 2, |p| region.contains(p)) {
                        st.samples += 1;
                        if dose_rate(&plan, p, v, &cfg) > bound * (1.0 + 1e-9) {
                            st.optimistic_violations += 1;
                        }
                    }
                }
                st.optimistic_cells += 1;
            }
        }
    }
    st
}

/// `min Σt  s.t.  Σ_g rates[g][v]·t_g ≥ r for every target v, t ≥ 0`, by
/// enumerating every basic solution. `None` when infeasible.
pub fn lp_enumerate(rates: &[Vec<f64>], r: f64) -> Option<f64> {
    let ng = rates.len();
    let nt = rates[0].len();
    // Constraint rows: targets then `t_g ≥ 0`.
    let row = |k: usize| -> (Vec<f64>, f64) {
        if k < nt {
            ((0..ng).map(|g| rates[g][k]).collect(), r)
        } else {
            let mut e = vec![0.0; ng];
            e[k - nt] = 1.0;
            (e, 0.0)
        }
    };
    let mut best: Option<f64> = None;
    let total = nt + ng;
    let mut pick: Vec<usize> = (0..ng).collect();
    loop {
        let (a, b): (Vec<Vec<f64>>, Vec<f64>) = pick.iter().map(|&k| row(k)).unzip();
        if let Some(t) = solve_dense(a, b) {
            let feasible = t.iter().all(|&x| x >= -1e-9 * r)
                && (0..nt).all(|v| (0..ng).map(|g| rates[g][v] * t[g]).sum::<f64>() >= r * (1.0 - 1e-9));
            if feasible {
                let obj: f64 = t.iter().sum();
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
        // Next combination in lexicographic order.
        let mut i = ng;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < total - ng + i {
                break;
            }
        }
        pick[i] += 1;
        for j in i + 1..ng {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for i in 0..n {
            if i != c {
                let f = a[i][c] / a[c][c];
                for k in c..n {
                    a[i][k] -= f * a[c][k];
                }
                b[i] -= f * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Random rate table (`ng` rows of `nt`), every target lit by some guard.
pub fn random_rates(rng: &mut ChaCha8Rng, ng: usize, nt: usize) -> Vec<Vec<f64>> {
    let mut m: Vec<Vec<f64>> =
        (0..ng).map(|_| (0..nt).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.01..5.0) }).collect()).collect();
    for v in 0..nt {
        if (0..ng).all(|g| m[g][v] == 0.0) {
            m[rng.gen_range(0..ng)][v] = rng.gen_range(0.01..5.0);
        }
    }
    m
}

/// Shortest tour from `start` over all orders of the other nodes.
pub fn brute_force_tour(d: &[Vec<f64>], start: usize, closed: bool) -> f64 {
    fn go(d: &[Vec<f64>], last: usize, left: &mut Vec<usize>, acc: f64, start: usize, closed: bool, best: &mut f64) {
        if left.is_empty() {
            let total = if closed { acc + d[last][start] } else { acc };
            *best = best.min(total);
            return;
        }
        for i in 0..left.len() {
            let next = left.swap_remove(i);
            go(d, next, left, acc + d[last][next], start, closed, best);
            left.push(next);
            let n = left.len();
            left.swap(i, n - 1);
        }
    }
    let mut left: Vec<usize> = (0..d.len()).filter(|&i| i != start).collect();
    let mut best = f64::INFINITY;
    go(d, start, &mut left, 0.0, start, closed, &mut best);
    best
}

use rayon::prelude::*;

use super::{segment_clear, Point2};
use crate::{Error, FloorPlan, Result};

/// Visibility graph over the plan's reflex vertices with all-pairs shortest
/// paths. Shortest paths inside a polygon bend only at reflex vertices, so
/// convex vertices never need to be nodes.
#[derive(Clone, Debug)]
pub struct GeodesicGraph {
    nodes: Vec<Point2>,
    dist: Vec<Vec<f64>>,
    pred: Vec<Vec<usize>>,
}

const NONE: usize = usize::MAX;

impl GeodesicGraph {
    pub fn new(plan: &FloorPlan) -> GeodesicGraph {
        let nodes = plan.reflex_vertices();
        let n = nodes.len();
        let adj: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            0.0
                        } else if segment_clear(plan, nodes[i], nodes[j]) {
                            nodes[i].dist(nodes[j])
                        } else {
                            f64::INFINITY
                        }
                    })
                    .collect()
            })
            .collect();
        let (dist, pred): (Vec<_>, Vec<_>) = (0..n).into_par_iter().map(|s| dijkstra(&adj, s)).unzip();
        GeodesicGraph { nodes, dist, pred }
    }

    pub fn nodes(&self) -> &[Point2] {
        &self.nodes
    }

    /// Nodes visible from `p` with their Euclidean distances.
    pub fn visible_nodes(&self, plan: &FloorPlan, p: Point2) -> Vec<(usize, f64)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, &v)| segment_clear(plan, p, v))
            .map(|(i, &v)| (i, p.dist(v)))
            .collect()
    }

    fn best_via(&self, va: &[(usize, f64)], vb: &[(usize, f64)]) -> (f64, usize, usize) {
        let mut best = (f64::INFINITY, NONE, NONE);
        for &(i, di) in va {
            for &(j, dj) in vb {
                let d = di + self.dist[i][j] + dj;
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        best
    }

    pub fn distance(&self, plan: &FloorPlan, a: Point2, b: Point2) -> Result<f64> {
        Ok(self.path_with_length(plan, a, b)?.1)
    }

    /// Shortest path polyline from `a` to `b`, endpoints included.
    pub fn path(&self, plan: &FloorPlan, a: Point2, b: Point2) -> Result<Vec<Point2>> {
        Ok(self.path_with_length(plan, a, b)?.0)
    }

    fn path_with_length(&self, plan: &FloorPlan, a: Point2, b: Point2) -> Result<(Vec<Point2>, f64)> {
        if segment_clear(plan, a, b) {
            return Ok((vec![a, b], a.dist(b)));
        }
        let va = self.visible_nodes(plan, a);
        let vb = self.visible_nodes(plan, b);
        self.join(a, b, &va, &vb)
    }

    pub(crate) fn join(
        &self,
        a: Point2,
        b: Point2,
        va: &[(usize, f64)],
        vb: &[(usize, f64)],
    ) -> Result<(Vec<Point2>, f64)> {
        let (d, i, j) = self.best_via(va, vb);
        if !d.is_finite() {
            return Err(Error::Unreachable(a.x, a.y, b.x, b.y));
        }
        let mut hops = vec![j];
        let mut k = j;
        while k != i {
            k = self.pred[i][k];
            hops.push(k);
        }
        let mut path = vec![a];
        path.extend(hops.iter().rev().map(|&h| self.nodes[h]));
        path.push(b);
        Ok((path, d))
    }
}

fn dijkstra(adj: &[Vec<f64>], s: usize) -> (Vec<f64>, Vec<usize>) {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NONE; n];
    let mut done = vec![false; n];
    dist[s] = 0.0;
    pred[s] = s;
    for _ in 0..n {
        let mut u = NONE;
        for v in 0..n {
            if !done[v] && dist[v].is_finite() && (u == NONE || dist[v] < dist[u]) {
                u = v;
            }
        }
        if u == NONE {
            break;
        }
        done[u] = true;
        for v in 0..n {
            let nd = dist[u] + adj[u][v];
            if !done[v] && nd < dist[v] {
                dist[v] = nd;
                pred[v] = u;
            }
        }
    }
    (dist, pred)
}

/// Length of the shortest path between two points inside the plan.
pub fn geodesic_distance(plan: &FloorPlan, a: Point2, b: Point2) -> Result<f64> {
    if segment_clear(plan, a, b) {
        return Ok(a.dist(b));
    }
    GeodesicGraph::new(plan).distance(plan, a, b)
}

use std::collections::HashMap;

use super::grid::OccupancyGrid;
use super::signed_area;
use crate::geometry::Point2;
use crate::{Error, Result};

type V = (i64, i64);

/// Trace the boundary of the free cells along cell edges.
///
/// Free cells are 4-connected. Outer contours come back counterclockwise and
/// hole contours clockwise, all in world meters; collinear lattice vertices
/// are merged and rings smaller than four cells are dropped. The
/// largest-area outer contour is first, then the other outer contours by
/// decreasing area, then holes by decreasing area.
pub fn extract_boundary(grid: &OccupancyGrid) -> Result<Vec<Vec<Point2>>> {
    if grid.free_count() == 0 {
        return Err(Error::EmptyRegion);
    }
    let mut out_edges: HashMap<V, Vec<V>> = HashMap::new();
    let mut order: Vec<(V, V)> = Vec::new();
    let mut push = |a: V, b: V| {
        out_edges.entry(a).or_default().push(b);
        order.push((a, b));
    };
    for row in 0..grid.height as i64 {
        for col in 0..grid.width as i64 {
            if !grid.is_free(col, row) {
                continue;
            }
            let (i, j) = (col, row);
            if !grid.is_free(col, row - 1) {
                push((i, j), (i + 1, j));
            }
            if !grid.is_free(col + 1, row) {
                push((i + 1, j), (i + 1, j + 1));
            }
            if !grid.is_free(col, row + 1) {
                push((i + 1, j + 1), (i, j + 1));
            }
            if !grid.is_free(col - 1, row) {
                push((i, j + 1), (i, j));
            }
        }
    }
    let mut used: HashMap<(V, V), bool> = order.iter().map(|&e| (e, false)).collect();
    let mut rings: Vec<Vec<V>> = Vec::new();
    for &(a0, b0) in &order {
        if used[&(a0, b0)] {
            continue;
        }
        let mut ring = vec![a0];
        let (mut a, mut b) = (a0, b0);
        loop {
            *used.get_mut(&(a, b)).unwrap() = true;
            if b == a0 {
                break;
            }
            ring.push(b);
            let d = (b.0 - a.0, b.1 - a.1);
            let cands = &out_edges[&b];
            // At a saddle vertex take the leftmost turn so diagonal cells stay apart.
            let pick = cands
                .iter()
                .copied()
                .filter(|c| !used[&(b, *c)])
                .max_by_key(|c| {
                    let e = (c.0 - b.0, c.1 - b.1);
                    let cross = d.0 * e.1 - d.1 * e.0;
                    let dot = d.0 * e.0 + d.1 * e.1;
                    if cross > 0 {
                        2
                    } else if dot > 0 {
                        1
                    } else {
                        0
                    }
                })
                .expect("crack boundary is closed");
            a = b;
            b = pick;
        }
        rings.push(merge_collinear(ring));
    }
    let min_area = 4.0 * grid.resolution * grid.resolution;
    let mut world: Vec<(f64, Vec<Point2>)> = rings
        .into_iter()
        .map(|r| r.into_iter().map(|(i, j)| grid.corner(i, j)).collect::<Vec<_>>())
        .map(|r| (signed_area(&r), r))
        .filter(|(a, _)| a.abs() >= min_area)
        .collect();
    world.sort_by(|x, y| (y.0 > 0.0).cmp(&(x.0 > 0.0)).then(y.0.abs().total_cmp(&x.0.abs())));
    if world.first().map_or(true, |w| w.0 <= 0.0) {
        return Err(Error::EmptyRegion);
    }
    Ok(world.into_iter().map(|(_, r)| r).collect())
}

fn merge_collinear(ring: Vec<V>) -> Vec<V> {
    let n = ring.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let p = ring[(k + n - 1) % n];
        let q = ring[k];
        let r = ring[(k + 1) % n];
        let cross = (q.0 - p.0) * (r.1 - q.1) - (q.1 - p.1) * (r.0 - q.0);
        if cross != 0 {
            out.push(q);
        }
    }
    out
}

//! Dense primal simplex for `max cᵀy  s.t.  A y ≤ b, y ≥ 0` with `b ≥ 0`.
//!
//! The slack basis is feasible, so no phase one is needed. Pivoting uses the
//! largest reduced cost with lowest-index ties and falls back to Bland's rule
//! after a run of degenerate pivots, which rules out cycling.

use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct LpResult {
    pub y: Vec<f64>,
    /// Optimal multipliers of the `A y ≤ b` rows.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

const DEGENERATE_RUN: usize = 50;
const PIVOT_TOL: f64 = 1e-12;
const COST_TOL: f64 = 1e-11;

/// `a` is row-major `m × n`.
pub fn maximize(a: &[f64], m: usize, n: usize, b: &[f64], c: &[f64]) -> Result<LpResult> {
    assert_eq!(a.len(), m * n);
    let w = n + m + 1;
    let mut t = vec![0.0; m * w];
    for i in 0..m {
        t[i * w..i * w + n].copy_from_slice(&a[i * n..(i + 1) * n]);
        t[i * w + n + i] = 1.0;
        t[i * w + w - 1] = b[i];
    }
    let mut z = vec![0.0; w];
    for j in 0..n {
        z[j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut degenerate = 0usize;
    let mut pivots = 0usize;
    let max_pivots = 50 * (m + n) + 1000;
    let mut col = vec![0.0; m];
    loop {
        let bland = degenerate >= DEGENERATE_RUN;
        let mut enter = usize::MAX;
        let mut best = -COST_TOL;
        for j in 0..w - 1 {
            if z[j] < best {
                enter = j;
                if bland {
                    break;
                }
                best = z[j];
            }
        }
        if enter == usize::MAX {
            break;
        }
        let mut leave = usize::MAX;
        let mut ratio = f64::INFINITY;
        for i in 0..m {
            let e = t[i * w + enter];
            if e > PIVOT_TOL {
                let r = t[i * w + w - 1] / e;
                if r < ratio - 1e-15 || (r <= ratio + 1e-15 && leave != usize::MAX && basis[i] < basis[leave]) {
                    ratio = r;
                    leave = i;
                }
            }
        }
        if leave == usize::MAX {
            return Err(Error::Infeasible("dual unbounded: some target is never lit".into()));
        }
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Numerical(format!("no convergence after {pivots} pivots")));
        }
        if ratio <= 1e-15 {
            degenerate += 1;
        } else {
            degenerate = 0;
        }
        let p = t[leave * w + enter];
        let inv = 1.0 / p;
        for v in &mut t[leave * w..(leave + 1) * w] {
            *v *= inv;
        }
        t[leave * w + enter] = 1.0;
        for i in 0..m {
            col[i] = t[i * w + enter];
        }
        let (head, rest) = t.split_at_mut(leave * w);
        let (prow, tail) = rest.split_at_mut(w);
        let prow: &[f64] = prow;
        let update = |row: &mut [f64], f: f64| {
            for (x, &pv) in row.iter_mut().zip(prow) {
                *x -= f * pv;
            }
        };
        for (i, row) in head.chunks_exact_mut(w).enumerate() {
            if col[i] != 0.0 {
                update(row, col[i]);
                row[enter] = 0.0;
            }
        }
        for (k, row) in tail.chunks_exact_mut(w).enumerate() {
            let i = leave + 1 + k;
            if col[i] != 0.0 {
                update(row, col[i]);
                row[enter] = 0.0;
            }
        }
        let f = z[enter];
        update(&mut z, f);
        z[enter] = 0.0;
        basis[leave] = enter;
    }
    let mut y = vec![0.0; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            y[bv] = t[i * w + w - 1].max(0.0);
        }
    }
    let duals: Vec<f64> = (0..m).map(|i| z[n + i].max(0.0)).collect();
    let objective = y.iter().zip(c).map(|(a, b)| a * b).sum();
    Ok(LpResult { y, duals, objective, pivots })
}

//! Dense two-phase simplex for small equality-form programs
//! `max c'x  s.t.  Ax = b, x >= 0`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const PRICE_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-12;
const PHASE_ONE_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const STALL_LIMIT: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Basic columns, one per constraint row (redundant rows excluded).
    pub basis: Vec<usize>,
    pub pivots: usize,
}

struct Tableau {
    rows: usize,
    width: usize,
    /// Row-major constraint rows with the right-hand side in the last column.
    t: Vec<f64>,
    /// Reduced costs `c_j - z_j`; the last entry holds `-objective`.
    obj: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * (self.width + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let stride = self.width + 1;
        let p = self.at(r, c);
        for v in &mut self.t[r * stride..(r + 1) * stride] {
            *v /= p;
        }
        let prow: Vec<f64> = self.t[r * stride..(r + 1) * stride].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.at(i, c);
            if f != 0.0 {
                for (v, pv) in self.t[i * stride..(i + 1) * stride].iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Runs simplex iterations over columns `< allowed`.
    fn optimize(&mut self, allowed: usize) -> Result<()> {
        let mut stalled = 0;
        loop {
            let bland = stalled >= STALL_LIMIT;
            let mut enter = None;
            let mut best = PRICE_TOL;
            for j in 0..allowed {
                if self.obj[j] > best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = self.obj[j];
                }
            }
            let Some(c) = enter else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, c);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r) / a;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio || (ratio == lratio && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(Error::UnboundedLp);
            };
            if ratio <= 0.0 {
                stalled += 1;
            } else {
                stalled = 0;
            }
            self.pivot(r, c);
        }
    }
}

/// Maximizes `c'x` subject to `a x = b`, `x >= 0`. `a` is given row by row.
pub fn maximize(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m, "one right-hand side per row");
    assert!(
        a.iter().all(|r| r.len() == n),
        "rows must match the cost vector"
    );

    let width = n + m;
    let stride = width + 1;
    let mut t = vec![0.0; m * stride];
    for (r, (row, &rhs)) in a.iter().zip(b).enumerate() {
        let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
        for (j, &v) in row.iter().enumerate() {
            t[r * stride + j] = sign * v;
        }
        t[r * stride + n + r] = 1.0;
        t[r * stride + width] = sign * rhs;
    }
    // phase one: maximize -sum(artificials)
    let mut obj = vec![0.0; stride];
    for r in 0..m {
        for j in 0..n {
            obj[j] += t[r * stride + j];
        }
        obj[width] += t[r * stride + width];
    }
    let mut tab = Tableau {
        rows: m,
        width,
        t,
        obj,
        basis: (n..n + m).collect(),
        pivots: 0,
    };
    tab.optimize(n)?;
    if tab.obj[width] > PHASE_ONE_TOL {
        return Err(Error::InfeasibleLp);
    }

    // drive zero-level artificials out of the basis; leftover rows are redundant
    let mut redundant = vec![false; m];
    for (r, red) in redundant.iter_mut().enumerate() {
        if tab.basis[r] >= n {
            match (0..n).find(|&j| tab.at(r, j).abs() > PIVOT_TOL) {
                Some(j) => tab.pivot(r, j),
                None => *red = true,
            }
        }
    }

    // phase two
    let mut obj = vec![0.0; stride];
    obj[..n].copy_from_slice(c);
    for r in 0..m {
        let cb = if tab.basis[r] < n {
            c[tab.basis[r]]
        } else {
            0.0
        };
        if cb != 0.0 {
            for (j, o) in obj.iter_mut().enumerate() {
                *o -= cb * tab.at(r, j);
            }
        }
    }
    tab.obj = obj;
    tab.optimize(n)?;

    let mut x = vec![0.0; n];
    let mut basis = Vec::with_capacity(m);
    for (r, _) in redundant.iter().enumerate().filter(|(_, &red)| !red) {
        let j = tab.basis[r];
        x[j] = tab.rhs(r).max(0.0);
        basis.push(j);
    }
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    Ok(LpSolution {
        x,
        value,
        basis,
        pivots: tab.pivots,
    })
}

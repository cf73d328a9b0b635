//! Brute-force garbling oracle: the agent's best garbling of a policy over a
//! barycentric lattice on the support's convex hull, solved as an LP.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lp::maximize;
use crate::policy::InformationPolicy;
use crate::quadratic::{agent_value, QuadraticModel};
use crate::simplex::Belief;

/// Lattice resolution used when callers do not pick one.
pub const DEFAULT_GRID: usize = 60;
/// Columns with less mass than this are dropped from the reported garbling.
const MASS_FLOOR: f64 = 1e-14;
const DEDUP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Ic,
    NotIc,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub best_value: f64,
    pub full_attention_value: f64,
    /// `best_value - full_attention_value`.
    pub gap: f64,
    /// Single-grid verdict at the default tolerance.
    pub verdict: Verdict,
    pub best_garbling: InformationPolicy,
    pub grid_resolution: usize,
    pub columns: usize,
}

/// `1e-6 * (1 + |full attention value|)`.
pub fn default_tolerance(full_attention_value: f64) -> f64 {
    1e-6 * (1.0 + full_attention_value.abs())
}

/// All `lambda` with entries in `{0, 1/grid, ..., 1}` summing to one.
fn lattice(n: usize, grid: usize) -> Vec<Vec<f64>> {
    fn rec(n: usize, left: usize, grid: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() + 1 == n {
            cur.push(left);
            out.push(cur.iter().map(|&k| k as f64 / grid as f64).collect());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(n, left - k, grid, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, grid, grid, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Lattice points plus the prior and every pairwise conditional mean.
fn candidate_coordinates(p: &InformationPolicy, grid: usize) -> Vec<Vec<f64>> {
    let n = p.len();
    let w = p.weights();
    let mut pts = lattice(n, grid);
    let mut extra = vec![w.to_vec()];
    for i in 0..n {
        for j in (i + 1)..n {
            let mut l = vec![0.0; n];
            l[i] = w[i] / (w[i] + w[j]);
            l[j] = w[j] / (w[i] + w[j]);
            extra.push(l);
        }
    }
    for e in extra {
        let dup = pts
            .iter()
            .any(|q| q.iter().zip(&e).all(|(a, b)| (a - b).abs() <= DEDUP_TOL));
        if !dup {
            pts.push(e);
        }
    }
    pts
}

fn combine(p: &InformationPolicy, lambda: &[f64]) -> Belief {
    let k = p.support()[0].len();
    let mut v = vec![0.0; k];
    for (b, &l) in p.support().iter().zip(lambda) {
        for (o, x) in v.iter_mut().zip(b.iter()) {
            *o += l * x;
        }
    }
    Belief::new(v).expect("convex combination of beliefs")
}

/// Agent's best garbling of `p` over the lattice of resolution `grid`.
pub fn best_garbling_lp(
    p: &InformationPolicy,
    m: &QuadraticModel,
    grid: usize,
) -> Result<OracleReport> {
    if grid == 0 {
        return Err(Error::OutOfRange(0.0));
    }
    if !p.is_nonredundant() {
        return Err(Error::RedundantPolicy);
    }
    let coords = candidate_coordinates(p, grid);
    let beliefs: Vec<Belief> = coords.iter().map(|l| combine(p, l)).collect();
    let values: Vec<f64> = beliefs.iter().map(|b| agent_value(b, m)).collect();
    // barycentric form of Bayes plausibility: sum_g x_g lambda_g = weights
    let rows: Vec<Vec<f64>> = (0..p.len())
        .map(|i| coords.iter().map(|l| l[i]).collect())
        .collect();
    let sol = maximize(&rows, p.weights(), &values)?;

    let full_attention_value: f64 = p.iter().map(|(b, w)| w * agent_value(b, m)).sum();
    let mut support = Vec::new();
    let mut weights = Vec::new();
    for &g in &sol.basis {
        if sol.x[g] > MASS_FLOOR {
            support.push(beliefs[g].clone());
            weights.push(sol.x[g]);
        }
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let best_garbling = InformationPolicy::from_parts(support, weights)?;
    let gap = sol.value - full_attention_value;
    let verdict = if gap <= default_tolerance(full_attention_value) {
        Verdict::Ic
    } else {
        Verdict::NotIc
    };
    Ok(OracleReport {
        best_value: sol.value,
        full_attention_value,
        gap,
        verdict,
        best_garbling,
        grid_resolution: grid,
        columns: coords.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub verdict: Verdict,
    pub tol: f64,
    pub coarse: OracleReport,
    /// Report at twice the resolution; its lattice contains the coarse one.
    pub fine: OracleReport,
}

/// IC verdict from the oracle at `grid` and `2 * grid`. Disagreement between
/// the two resolutions, or a gap that moves by more than `tol`, is reported
/// as inconclusive.
pub fn ic_via_oracle(
    p: &InformationPolicy,
    m: &QuadraticModel,
    grid: usize,
    tol: Option<f64>,
) -> Result<OracleCheck> {
    let coarse = best_garbling_lp(p, m, grid)?;
    let fine = best_garbling_lp(p, m, 2 * grid)?;
    let tol = tol.unwrap_or_else(|| default_tolerance(coarse.full_attention_value));
    let coarse_ok = coarse.gap <= tol;
    let fine_ok = fine.gap <= tol;
    let verdict = match (coarse_ok, fine_ok) {
        (true, true) if (fine.gap - coarse.gap).abs() <= tol => Verdict::Ic,
        (false, false) => Verdict::NotIc,
        _ => Verdict::Inconclusive,
    };
    Ok(OracleCheck {
        verdict,
        tol,
        coarse,
        fine,
    })
}

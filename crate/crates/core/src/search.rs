//! Numerical check of the closed-form optimum: exhaustive search over the
//! two-parameter family of critical-slope policies and over binary slopes.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ic::{order_ic, slope_cutoff};
use crate::optimal3::{binary_policy, prior_variance, solve, OptimalOutcome, Regime};
use crate::policy::InformationPolicy;
use crate::quadratic::{expected_principal_payoff, QuadraticModel};
use crate::simplex::{az_to_belief, barycentric, belief_to_az, AzPoint, Belief, StateSpace};

const WEIGHT_FLOOR: f64 = 1e-12;
const DEGENERATE_TOL: f64 = 1e-12;
/// Payoffs within this of the maximum count as ties for the argmax.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Candidate {
    Feasible(InformationPolicy),
    Infeasible(&'static str),
}

impl Candidate {
    pub fn feasible(self) -> Option<InformationPolicy> {
        match self {
            Candidate::Feasible(p) => Some(p),
            Candidate::Infeasible(_) => None,
        }
    }
}

/// The three points `t1, t2, t3` for slope `s`: `t1` on the left edge,
/// `t2` one critical step up from it, `t3` on the right edge.
pub fn t_points(a1: f64, a2: f64, s: f64) -> [AzPoint; 3] {
    let r = 2.0 * s / (1.0 - s);
    [
        AzPoint::new(a1, 1.0 + a1),
        AzPoint::new(a2, 1.0 + (1.0 - s) * a1 + s * a2),
        AzPoint::new(-a1 - r * a2, 1.0 + a1 + r * a2),
    ]
}

/// Weights `(p1, p2, p3)` of the three points, or `None` when the closed
/// form is singular (`t2` coincides with `t1` or `t3`).
pub fn t_weights(a1: f64, a2: f64, s: f64, prior: &Belief) -> Option<[f64; 3]> {
    let mu0 = prior[1];
    let a_mu = prior[2] - prior[0];
    let d23 = a1 * (1.0 - s) + a2 * (1.0 + s);
    let d12 = a2 - a1;
    if d23.abs() <= DEGENERATE_TOL || d12.abs() <= DEGENERATE_TOL {
        return None;
    }
    let p2 = (a1 * (a1 + 1.0 - mu0) * (1.0 - s) + a2 * (2.0 * a1 + 1.0 - mu0 - a_mu) * s)
        / (-s * d12 * d23);
    let p3 = (1.0 - s) * (s * a_mu + (1.0 - s) * a1 + (1.0 - mu0)) / (-2.0 * s * d23);
    Some([1.0 - p2 - p3, p2, p3])
}

/// Second moment of the induced action, `E[a^2]`, which is affine in `a2`.
pub fn affine_second_moment(a1: f64, a2: f64, s: f64, prior: &Belief) -> f64 {
    let mu0 = prior[1];
    let a_mu = prior[2] - prior[0];
    a1 * a1
        - (a1 * a1 + (1.0 - mu0) * a1) / s
        - (2.0 * a1 + (1.0 - mu0) / (1.0 - s) + (2.0 * s - 1.0) / (1.0 - s) * a_mu) * a2
}

/// Feasible `a2` interval for a given `a1`; the upper end collapses `t2`
/// onto `t3`.
pub fn a2_range(a1: f64, s: f64) -> (f64, f64) {
    let lo = a1.max(-(1.0 + a1) * (1.0 - s) / (2.0 * s));
    let hi = -a1 * (1.0 - s) / (1.0 + s);
    (lo, hi)
}

/// `a2` that places `t3` at a given right-edge action `a_r` (weight of `t2`
/// then vanishes when the prior lies on the segment `t1 t3`).
pub fn binary_a2(a_left: f64, a_right: f64, s: f64) -> f64 {
    -(a_left + a_right) * (1.0 - s) / (2.0 * s)
}

pub fn candidate_policy(a1: f64, a2: f64, kappa: f64, prior: &Belief) -> Result<Candidate> {
    if !(kappa > 0.5 && kappa < 2.0) {
        return Err(Error::KappaOutOfRange(kappa));
    }
    if prior.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: prior.len(),
        });
    }
    if prior.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::BoundaryPrior);
    }
    let s = slope_cutoff(kappa)?.ok_or(Error::KappaOutOfRange(kappa))?;
    if !(-1.0 - 1e-12..=1e-12).contains(&a1) {
        return Ok(Candidate::Infeasible("a1 outside [-1, 0]"));
    }
    let t = t_points(a1, a2, s);
    let (points, weights): (Vec<AzPoint>, Vec<f64>) = match t_weights(a1, a2, s, prior) {
        Some(w) => {
            if w.iter().any(|&x| x < -WEIGHT_FLOOR) {
                return Ok(Candidate::Infeasible("negative weight"));
            }
            t.iter()
                .zip(w)
                .filter(|(_, x)| *x > WEIGHT_FLOOR)
                .map(|(p, x)| (*p, x))
                .unzip()
        }
        None => {
            // binary collapse: the two distinct points must carry the prior
            let pair = if (a2 - a1).abs() <= DEGENERATE_TOL {
                [t[0], t[2]]
            } else {
                [t[0], t[1]]
            };
            if !pair.iter().all(AzPoint::in_region) {
                return Ok(Candidate::Infeasible("point outside the belief region"));
            }
            let bs: Vec<Belief> = pair
                .iter()
                .map(|p| az_to_belief(*p))
                .collect::<Result<_>>()?;
            match barycentric(prior, &bs) {
                Ok(Some(l)) if l.iter().all(|&x| x > WEIGHT_FLOOR) => (pair.to_vec(), l),
                Err(Error::DegenerateVertices) => {
                    return Ok(Candidate::Infeasible("all points coincide"))
                }
                Err(e) => return Err(e),
                _ => return Ok(Candidate::Infeasible("prior not on the collapsed segment")),
            }
        }
    };
    if !points.iter().all(AzPoint::in_region) {
        return Ok(Candidate::Infeasible("point outside the belief region"));
    }
    let beliefs: Vec<Belief> = points
        .iter()
        .map(|p| az_to_belief(*p))
        .collect::<Result<_>>()?;
    let total: f64 = weights.iter().sum();
    let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
    Ok(match InformationPolicy::new(beliefs, weights, prior) {
        Ok(p) => Candidate::Feasible(p),
        Err(_) => Candidate::Infeasible("not Bayes-plausible"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Points per axis of the `(a1, a2)` grid.
    pub grid: usize,
    /// Points on the binary slope grid.
    pub slope_grid: usize,
    pub tol: f64,
    /// Add the closed-form parameters to the grids.
    pub inject_closed_form: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            grid: 200,
            slope_grid: 200,
            tol: 1e-6,
            inject_closed_form: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CandidateKind {
    Ternary { a1: f64, a2: f64 },
    Binary { s_tilde: f64 },
    FullDisclosure,
    NoDisclosure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scored {
    pub kind: CandidateKind,
    pub payoff: f64,
    pub injected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub kappa: f64,
    pub closed_form: OptimalOutcome,
    /// Parameters describing the closed-form policy in the search families.
    pub targets: Vec<CandidateKind>,
    pub best: Scored,
    /// Best candidate that was not injected.
    pub best_grid: Option<Scored>,
    pub scored: usize,
    pub infeasible: usize,
    /// Family candidates that failed `order_ic`; nonzero means a formula bug.
    pub ic_failures: usize,
    pub max_affine_residual: f64,
    /// Largest gap between the direct payoff and the affine `E[a^2]` formula.
    pub max_formula_gap: f64,
    pub neg_slope_max: Option<f64>,
    pub pos_slope_max: Option<f64>,
    pub a1_step: f64,
    pub slope_step: f64,
    pub payoff_ok: bool,
    pub argmax_ok: bool,
    pub slope_sign_ok: bool,
    pub affine_ok: bool,
}

impl SearchReport {
    pub fn passed(&self) -> bool {
        self.payoff_ok
            && self.argmax_ok
            && self.slope_sign_ok
            && self.affine_ok
            && self.ic_failures == 0
    }

    /// `best.payoff - closed_form.payoff`; positive means the search won.
    pub fn gap(&self) -> f64 {
        self.best.payoff - self.closed_form.payoff
    }
}

/// Affine-fit tolerance for a single `a1` row.
pub const AFFINE_TOL: f64 = 1e-8;

/// Searches the candidate families and compares with [`solve`].
pub fn verify_closed_form(
    prior: &Belief,
    kappa: f64,
    opts: &SearchOptions,
) -> Result<SearchReport> {
    let closed = solve(prior, kappa)?;
    verify_against(prior, kappa, &closed, opts)
}

struct Search<'a> {
    model: QuadraticModel,
    prior: &'a Belief,
    scored: usize,
    infeasible: usize,
    ic_failures: usize,
    best: Option<Scored>,
    best_grid: Option<Scored>,
}

impl Search<'_> {
    /// Scores `p` if it is IC. `family` marks candidates that are IC by
    /// construction.
    fn score(
        &mut self,
        p: &InformationPolicy,
        kind: CandidateKind,
        injected: bool,
        family: bool,
    ) -> Option<f64> {
        match order_ic(p, &self.model) {
            Ok(r) if r.ic => {}
            _ => {
                if family {
                    self.ic_failures += 1;
                }
                return None;
            }
        }
        let payoff = expected_principal_payoff(p, &self.model).direct;
        self.scored += 1;
        let s = Scored {
            kind,
            payoff,
            injected,
        };
        let better = |cur: &Option<Scored>| match cur {
            None => true,
            Some(b) => {
                payoff > b.payoff + TIE_TOL
                    || (injected && !b.injected && payoff >= b.payoff - TIE_TOL)
            }
        };
        if better(&self.best) {
            self.best = Some(s);
        }
        if !injected && better(&self.best_grid) {
            self.best_grid = Some(s);
        }
        Some(payoff)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| {
        if i == n - 1 {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    })
}

/// Like [`verify_closed_form`] against a given closed-form outcome.
pub fn verify_against(
    prior: &Belief,
    kappa: f64,
    closed: &OptimalOutcome,
    opts: &SearchOptions,
) -> Result<SearchReport> {
    // search in the a_mu >= 0 frame
    let flip = prior[2] - prior[0] < 0.0;
    let canon = if flip { prior.reflect() } else { prior.clone() };
    let closed_canon = if flip {
        closed.mirrored()
    } else {
        closed.clone()
    };
    let model = QuadraticModel::new(StateSpace::three(), canon.clone(), kappa)?;
    let mu0 = canon[1];
    let a_mu = canon[2] - canon[0];
    let mut search = Search {
        model,
        prior: &canon,
        scored: 0,
        infeasible: 0,
        ic_failures: 0,
        best: None,
        best_grid: None,
    };

    let none = InformationPolicy::no_information(search.prior);
    search.score(&none, CandidateKind::NoDisclosure, false, false);
    let full = InformationPolicy::full_disclosure(search.prior)?;
    search.score(&full, CandidateKind::FullDisclosure, false, false);

    let targets = closed_targets(&closed_canon, kappa, &canon)?;
    let two_d = kappa > 0.5 && kappa < 2.0;
    let mut max_affine_residual: f64 = 0.0;
    let mut max_formula_gap: f64 = 0.0;
    let (mut neg_max, mut pos_max) = (None::<f64>, None::<f64>);
    let mut a1_step = 0.0;
    let mut slope_step = 0.0;
    let v = prior_variance(&canon);

    if two_d {
        let s = slope_cutoff(kappa)?.expect("kappa < 2");
        a1_step = 1.0 / (opts.grid.max(2) - 1) as f64;
        for a1 in linspace(-1.0, 0.0, opts.grid) {
            let (lo, hi) = a2_range(a1, s);
            if lo > hi {
                continue;
            }
            let mut row: Vec<(f64, f64)> = Vec::new();
            for a2 in linspace(lo, hi, opts.grid) {
                match candidate_policy(a1, a2, kappa, &canon)? {
                    Candidate::Feasible(p) => {
                        let kind = CandidateKind::Ternary { a1, a2 };
                        if let Some(payoff) = search.score(&p, kind, false, true) {
                            row.push((a2, payoff));
                            if t_weights(a1, a2, s, &canon).is_some() {
                                let formula =
                                    affine_second_moment(a1, a2, s, &canon) - a_mu * a_mu - v;
                                max_formula_gap = max_formula_gap.max((formula - payoff).abs());
                            }
                        }
                    }
                    Candidate::Infeasible(_) => search.infeasible += 1,
                }
            }
            max_affine_residual = max_affine_residual.max(affine_residual(&row));
        }

        let lo = -s.min(mu0 / (1.0 - a_mu));
        let hi = s.min(mu0 / (1.0 + a_mu));
        slope_step = (hi - lo) / (opts.slope_grid.max(2) - 1) as f64;
        for st in linspace(lo, hi, opts.slope_grid).chain(core::iter::once(0.0)) {
            let p = binary_policy(&canon, st)?;
            if let Some(payoff) =
                search.score(&p, CandidateKind::Binary { s_tilde: st }, false, true)
            {
                if st < 0.0 {
                    neg_max = Some(neg_max.map_or(payoff, |m| m.max(payoff)));
                } else if st > 0.0 {
                    pos_max = Some(pos_max.map_or(payoff, |m| m.max(payoff)));
                }
            }
        }
    } else if kappa <= 2.0 {
        // orthogonal policy
        let p = binary_policy(&canon, 0.0)?;
        search.score(&p, CandidateKind::Binary { s_tilde: 0.0 }, false, false);
    }

    if opts.inject_closed_form {
        for t in &targets {
            let policy = match *t {
                CandidateKind::Ternary { a1, a2 } if two_d => {
                    candidate_policy(a1, a2, kappa, &canon)?.feasible()
                }
                CandidateKind::Binary { s_tilde } => binary_policy(&canon, s_tilde).ok(),
                CandidateKind::FullDisclosure => Some(full.clone()),
                CandidateKind::NoDisclosure => Some(none.clone()),
                _ => None,
            };
            if let Some(p) = policy {
                let payoff = search.score(&p, *t, true, false);
                if let (CandidateKind::Binary { s_tilde }, Some(v)) = (*t, payoff) {
                    if s_tilde < 0.0 {
                        neg_max = Some(neg_max.map_or(v, |m| m.max(v)));
                    }
                }
            }
        }
    }

    let best = search.best.expect("no disclosure is always scored");
    let payoff_ok =
        closed.payoff >= best.payoff - opts.tol && (closed.payoff - best.payoff).abs() <= opts.tol;
    let argmax_ok = best.injected
        || targets
            .iter()
            .any(|t| near(&best.kind, t, opts.grid, slope_step, kappa));
    let slope_sign_ok = match (neg_max, pos_max) {
        (Some(n), Some(p)) => n >= p - opts.tol,
        (None, Some(_)) => false,
        _ => true,
    };
    Ok(SearchReport {
        kappa,
        closed_form: closed.clone(),
        targets,
        best,
        best_grid: search.best_grid,
        scored: search.scored,
        infeasible: search.infeasible,
        ic_failures: search.ic_failures,
        max_affine_residual,
        max_formula_gap,
        neg_slope_max: neg_max,
        pos_slope_max: pos_max,
        a1_step,
        slope_step,
        payoff_ok,
        argmax_ok,
        slope_sign_ok,
        affine_ok: max_affine_residual <= AFFINE_TOL,
    })
}

/// Candidate parameters that reproduce the closed-form policy, including
/// the mirror-image binary when it is feasible and ties.
fn closed_targets(
    closed: &OptimalOutcome,
    kappa: f64,
    prior: &Belief,
) -> Result<Vec<CandidateKind>> {
    let mut out = Vec::new();
    match closed.regime {
        Regime::FullRevelation => out.push(CandidateKind::FullDisclosure),
        Regime::NoDisclosure => out.push(CandidateKind::NoDisclosure),
        Regime::Downplaying => {
            let apex = belief_to_az(&closed.policy.support()[1]);
            out.push(CandidateKind::Ternary {
                a1: -1.0,
                a2: apex.a,
            });
        }
        Regime::SeparatingExaggeration | Regime::Exaggeration => {
            let st = closed.slope_used.unwrap_or(0.0);
            out.push(CandidateKind::Binary { s_tilde: st });
            let (lo, hi) = crate::optimal3::binary_slope_range(prior)?;
            let twin = -st;
            let twin_ok = twin >= lo - 1e-12 && twin <= hi + 1e-12 && twin != st;
            if twin_ok {
                out.push(CandidateKind::Binary { s_tilde: twin });
            }
            if let Some(s) = slope_cutoff(kappa)?.filter(|_| kappa > 0.5 && kappa < 2.0) {
                let mut slopes = vec![st];
                if twin_ok {
                    slopes.push(twin);
                }
                for sl in slopes {
                    let p = binary_policy(prior, sl)?;
                    let pts: Vec<AzPoint> = p.support().iter().map(belief_to_az).collect();
                    let (l, r) = (pts[0], pts[1]);
                    out.push(CandidateKind::Ternary {
                        a1: l.a,
                        a2: binary_a2(l.a, r.a, s),
                    });
                    if (sl - s).abs() <= 1e-12 {
                        out.push(CandidateKind::Ternary {
                            a1: l.a,
                            a2: a2_range(l.a, s).1,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

fn near(
    best: &CandidateKind,
    target: &CandidateKind,
    grid: usize,
    slope_step: f64,
    kappa: f64,
) -> bool {
    let a1_step = 1.0 / (grid.max(2) - 1) as f64;
    let eps = 1e-12;
    match (best, target) {
        (CandidateKind::Ternary { a1, a2 }, CandidateKind::Ternary { a1: x, a2: y }) => {
            let s = slope_cutoff(kappa).ok().flatten().unwrap_or(0.0);
            let (lo, hi) = a2_range(*a1, s);
            let a2_step = (hi - lo).abs() / (grid.max(2) - 1) as f64;
            (a1 - x).abs() <= a1_step + eps && (a2 - y).abs() <= a2_step.max(a1_step) + eps
        }
        (CandidateKind::Binary { s_tilde }, CandidateKind::Binary { s_tilde: t }) => {
            (s_tilde - t).abs() <= slope_step + eps
        }
        (CandidateKind::FullDisclosure, CandidateKind::FullDisclosure) => true,
        (CandidateKind::NoDisclosure, CandidateKind::NoDisclosure) => true,
        _ => false,
    }
}

/// Largest residual of the least-squares line through `(x, y)` pairs.
pub fn affine_residual(points: &[(f64, f64)]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    points
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).abs())
        .fold(0.0, f64::max)
}

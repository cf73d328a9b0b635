//! Quadratic payoffs and attention costs.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::policy::InformationPolicy;
use crate::simplex::{Belief, StateSpace};

/// Smallest eigenvalue accepted for a PSD input before it is rejected.
pub const PSD_FLOOR: f64 = -1e-10;
/// Slack used when comparing choice and psychological distances.
pub const CONVEXITY_SLACK: f64 = 1e-12;
/// Allowed gap between the two expressions of the expected payoff.
pub const DECOMPOSITION_TOL: f64 = 1e-9;

/// Parameters of the generalized model
/// `u(a, theta) = gamma_theta - (a - theta)' G (a - theta)` and
/// `c(nu) = nu' pi + (nu - mu)' P (nu - mu)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralParams {
    /// `J x J` action weight matrix.
    pub gamma_mat: DMatrix<f64>,
    /// `K x K` cost matrix.
    pub pi_mat: DMatrix<f64>,
    /// Per-state payoff shift.
    pub gamma: Vec<f64>,
    /// Linear cost term.
    pub pi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
enum Payoffs {
    Main { kappa: f64 },
    General(GeneralParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticModel {
    space: StateSpace,
    prior: Belief,
    payoffs: Payoffs,
    psd_clamped: bool,
}

impl QuadraticModel {
    /// Main model with cost `kappa * ||nu - mu||^2`.
    pub fn new(space: StateSpace, prior: Belief, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::NonPositiveKappa(kappa));
        }
        check_prior(&space, &prior)?;
        Ok(Self {
            space,
            prior,
            payoffs: Payoffs::Main { kappa },
            psd_clamped: false,
        })
    }

    pub fn general(space: StateSpace, prior: Belief, params: GeneralParams) -> Result<Self> {
        check_prior(&space, &prior)?;
        let (j, k) = (space.dim(), space.len());
        if params.gamma_mat.shape() != (j, j) {
            return Err(Error::InvalidModel(format!(
                "Gamma must be {j}x{j}, got {:?}",
                params.gamma_mat.shape()
            )));
        }
        if params.pi_mat.shape() != (k, k) {
            return Err(Error::InvalidModel(format!(
                "Pi must be {k}x{k}, got {:?}",
                params.pi_mat.shape()
            )));
        }
        if params.gamma.len() != k || params.pi.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: if params.gamma.len() != k {
                    params.gamma.len()
                } else {
                    params.pi.len()
                },
            });
        }
        if params
            .gamma
            .iter()
            .chain(&params.pi)
            .any(|x| !x.is_finite())
        {
            return Err(Error::InvalidModel("non-finite vector entry".into()));
        }
        let (gamma_mat, c1) = psd_project(params.gamma_mat)?;
        let (pi_mat, c2) = psd_project(params.pi_mat)?;
        Ok(Self {
            space,
            prior,
            payoffs: Payoffs::General(GeneralParams {
                gamma_mat,
                pi_mat,
                gamma: params.gamma,
                pi: params.pi,
            }),
            psd_clamped: c1 || c2,
        })
    }

    /// Same model with a different cost parameter (main model only).
    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(self.space.clone(), self.prior.clone(), kappa)
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn prior(&self) -> &Belief {
        &self.prior
    }

    /// Cost parameter of the main model; `None` for a general model.
    pub fn kappa(&self) -> Option<f64> {
        match self.payoffs {
            Payoffs::Main { kappa } => Some(kappa),
            Payoffs::General(_) => None,
        }
    }

    pub fn general_params(&self) -> Option<&GeneralParams> {
        match &self.payoffs {
            Payoffs::Main { .. } => None,
            Payoffs::General(g) => Some(g),
        }
    }

    pub fn is_general(&self) -> bool {
        matches!(self.payoffs, Payoffs::General(_))
    }

    /// True when a slightly indefinite matrix was projected onto the PSD cone.
    pub fn psd_clamped(&self) -> bool {
        self.psd_clamped
    }

    /// Equivalent general model: `Gamma = I`, `Pi = kappa I`, no linear terms.
    pub fn to_general(&self) -> Self {
        match &self.payoffs {
            Payoffs::General(_) => self.clone(),
            Payoffs::Main { kappa } => {
                let (j, k) = (self.space.dim(), self.space.len());
                Self {
                    space: self.space.clone(),
                    prior: self.prior.clone(),
                    payoffs: Payoffs::General(GeneralParams {
                        gamma_mat: DMatrix::identity(j, j),
                        pi_mat: DMatrix::identity(k, k) * *kappa,
                        gamma: vec![0.0; k],
                        pi: vec![0.0; k],
                    }),
                    psd_clamped: false,
                }
            }
        }
    }

    /// Squared action-space norm of `v` (weighted by `Gamma` in the general model).
    fn action_sq(&self, v: &[f64]) -> f64 {
        match &self.payoffs {
            Payoffs::Main { .. } => v.iter().map(|x| x * x).sum(),
            Payoffs::General(g) => quad_form(&g.gamma_mat, v),
        }
    }
}

fn check_prior(space: &StateSpace, prior: &Belief) -> Result<()> {
    space.check_belief(prior)?;
    if prior.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::InvalidBelief("prior must have full support".into()));
    }
    Ok(())
}

fn quad_form(m: &DMatrix<f64>, v: &[f64]) -> f64 {
    let x = DVector::from_column_slice(v);
    (x.transpose() * m * &x)[(0, 0)]
}

/// Symmetrizes `m` and clamps eigenvalues in `[PSD_FLOOR, 0)` to zero.
fn psd_project(m: DMatrix<f64>) -> Result<(DMatrix<f64>, bool)> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidModel("non-finite matrix entry".into()));
    }
    let scale = m.iter().fold(1.0f64, |s, x| s.max(x.abs()));
    let asym = (&m - m.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::InvalidModel(format!(
            "matrix is not symmetric (gap {asym:.3e})"
        )));
    }
    let sym = (&m + m.transpose()) * 0.5;
    let eig = sym.clone().symmetric_eigen();
    let min = eig.eigenvalues.min();
    if min < PSD_FLOOR {
        return Err(Error::NotPsd(min));
    }
    if min >= 0.0 {
        return Ok((sym, false));
    }
    let clamped = eig.eigenvalues.map(|x| x.max(0.0));
    let rebuilt =
        &eig.eigenvectors * DMatrix::from_diagonal(&clamped) * eig.eigenvectors.transpose();
    Ok(((&rebuilt + rebuilt.transpose()) * 0.5, true))
}

/// `E_nu theta`, one entry per action coordinate.
pub fn optimal_action(nu: &Belief, m: &QuadraticModel) -> Vec<f64> {
    m.space.mean(nu)
}

/// Double-double accumulator so differences of nearby values stay accurate.
#[derive(Debug, Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    const ZERO: Dd = Dd(0.0, 0.0);

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd(s, (a - (s - bb)) + (b - bb))
    }

    fn prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd(p, libm::fma(a, b, -p))
    }

    fn add(self, o: Dd) -> Dd {
        let Dd(s, e) = Dd::two_sum(self.0, o.0);
        let e = e + self.1 + o.1;
        let hi = s + e;
        Dd(hi, e - (hi - s))
    }

    fn mul(self, o: Dd) -> Dd {
        let Dd(p, e) = Dd::prod(self.0, o.0);
        let e = e + self.0 * o.1 + self.1 * o.0;
        let hi = p + e;
        Dd(hi, e - (hi - p))
    }

    fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }

    fn value(self) -> f64 {
        self.0 + self.1
    }
}

/// Main-model `U_P(nu) = |E theta|^2 - E|theta|^2`.
fn main_principal(nu: &Belief, space: &StateSpace) -> Dd {
    let mut second = Dd::ZERO;
    let mut mean_sq = Dd::ZERO;
    for j in 0..space.dim() {
        let mut a = Dd::ZERO;
        for (i, &w) in nu.iter().enumerate() {
            let t = space.state(i)[j];
            a = a.add(Dd::prod(w, t));
            second = second.add(Dd::prod(w, t).mul(Dd(t, 0.0)));
        }
        mean_sq = mean_sq.add(a.mul(a));
    }
    mean_sq.add(second.neg())
}

fn main_cost(nu: &Belief, prior: &Belief, kappa: f64) -> Dd {
    let mut total = Dd::ZERO;
    for (&x, &m) in nu.iter().zip(prior.iter()) {
        let d = Dd::two_sum(x, -m);
        total = total.add(d.mul(d));
    }
    total.mul(Dd(kappa, 0.0))
}

/// `E_nu[gamma_theta - (a* - theta)' G (a* - theta)]`; in the main model this
/// is minus the variance of `theta` under `nu`.
pub fn principal_value(nu: &Belief, m: &QuadraticModel) -> f64 {
    let g = match &m.payoffs {
        Payoffs::Main { .. } => return main_principal(nu, &m.space).value(),
        Payoffs::General(g) => g,
    };
    let a = optimal_action(nu, m);
    let mut total = 0.0;
    for (i, &w) in nu.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let d: Vec<f64> = a.iter().zip(m.space.state(i)).map(|(x, t)| x - t).collect();
        total += w * (g.gamma[i] - m.action_sq(&d));
    }
    total
}

pub fn attention_cost(nu: &Belief, m: &QuadraticModel) -> f64 {
    match &m.payoffs {
        Payoffs::Main { kappa } => main_cost(nu, &m.prior, *kappa).value(),
        Payoffs::General(g) => {
            let d: Vec<f64> = nu.iter().zip(m.prior.iter()).map(|(a, b)| a - b).collect();
            let linear: f64 = nu.iter().zip(&g.pi).map(|(a, b)| a * b).sum();
            linear + quad_form(&g.pi_mat, &d)
        }
    }
}

pub fn agent_value(nu: &Belief, m: &QuadraticModel) -> f64 {
    match &m.payoffs {
        Payoffs::Main { kappa } => main_principal(nu, &m.space)
            .add(main_cost(nu, &m.prior, *kappa).neg())
            .value(),
        Payoffs::General(_) => principal_value(nu, m) - attention_cost(nu, m),
    }
}

pub fn choice_distance(nu: &Belief, nup: &Belief, m: &QuadraticModel) -> f64 {
    let a = optimal_action(nu, m);
    let b = optimal_action(nup, m);
    let d: Vec<f64> = b.iter().zip(&a).map(|(x, y)| x - y).collect();
    libm::sqrt(m.action_sq(&d).max(0.0))
}

pub fn psychological_distance(nu: &Belief, nup: &Belief, m: &QuadraticModel) -> f64 {
    let d: Vec<f64> = nup.iter().zip(nu.iter()).map(|(x, y)| x - y).collect();
    match &m.payoffs {
        Payoffs::Main { kappa } => libm::sqrt(*kappa) * libm::sqrt(d.iter().map(|x| x * x).sum()),
        Payoffs::General(g) => libm::sqrt(quad_form(&g.pi_mat, &d).max(0.0)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convexity {
    Convex,
    StrictlyConcave,
}

/// Shape of the agent's value on the segment between two beliefs. Ties count
/// as convex.
pub fn segment_convexity(nu: &Belief, nup: &Belief, m: &QuadraticModel) -> Convexity {
    if choice_distance(nu, nup, m) + CONVEXITY_SLACK >= psychological_distance(nu, nup, m) {
        Convexity::Convex
    } else {
        Convexity::StrictlyConcave
    }
}

/// Expected principal payoff, computed directly and through the variance
/// decomposition `E_mu gamma + Var_p[a*] - Var_mu[theta]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffBreakdown {
    pub direct: f64,
    pub action_variance: f64,
    pub prior_variance: f64,
    pub decomposition: f64,
}

impl PayoffBreakdown {
    pub fn gap(&self) -> f64 {
        (self.direct - self.decomposition).abs()
    }
}

pub fn expected_principal_payoff(p: &InformationPolicy, m: &QuadraticModel) -> PayoffBreakdown {
    let direct: f64 = p.iter().map(|(b, w)| w * principal_value(b, m)).sum();
    let center = optimal_action(m.prior(), m);
    let spread = |a: &[f64]| {
        let d: Vec<f64> = a.iter().zip(&center).map(|(x, c)| x - c).collect();
        m.action_sq(&d)
    };
    let action_variance: f64 = p
        .iter()
        .map(|(b, w)| w * spread(&optimal_action(b, m)))
        .sum();
    let prior_variance: f64 = m
        .prior
        .iter()
        .enumerate()
        .map(|(i, &w)| w * spread(m.space.state(i)))
        .sum();
    let shift = match &m.payoffs {
        Payoffs::Main { .. } => 0.0,
        Payoffs::General(g) => m.prior.iter().zip(&g.gamma).map(|(a, b)| a * b).sum(),
    };
    let out = PayoffBreakdown {
        direct,
        action_variance,
        prior_variance,
        decomposition: shift + action_variance - prior_variance,
    };
    debug_assert!(out.gap() <= DECOMPOSITION_TOL * (1.0 + direct.abs()));
    out
}

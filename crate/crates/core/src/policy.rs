//! Information policies: finite-support distributions over beliefs whose mean
//! is the prior.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quadratic::QuadraticModel;
use crate::simplex::{affinely_independent, barycentric, Belief, StateSpace, NEGATIVE_SLACK};

/// Tolerance on the weight sum after renormalization.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Maximum Bayes-plausibility residual (infinity norm).
pub const BAYES_TOL: f64 = 1e-9;
/// Support beliefs closer than this (infinity norm) count as duplicates.
pub const DISTINCT_TOL: f64 = 1e-10;
/// Induced actions closer than this are treated as tied.
pub const ACTION_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct InformationPolicy {
    support: Vec<Belief>,
    weights: Vec<f64>,
}

impl InformationPolicy {
    /// Checks weights, distinctness, and Bayes plausibility against `prior`.
    pub fn new(support: Vec<Belief>, weights: Vec<f64>, prior: &Belief) -> Result<Self> {
        let policy = Self::from_parts(support, weights)?;
        if policy.support.iter().any(|b| b.len() != prior.len()) {
            return Err(Error::DimensionMismatch {
                expected: prior.len(),
                got: policy
                    .support
                    .iter()
                    .map(|b| b.len())
                    .find(|&l| l != prior.len())
                    .unwrap_or(0),
            });
        }
        let residual = policy.bayes_residual(prior);
        if !(residual <= BAYES_TOL) {
            return Err(Error::NotBayesPlausible { residual });
        }
        Ok(policy)
    }

    /// Validates everything except Bayes plausibility.
    pub(crate) fn from_parts(support: Vec<Belief>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != weights.len() {
            return Err(Error::MalformedPolicy);
        }
        let k = support[0].len();
        if let Some(bad) = support.iter().find(|b| b.len() != k) {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: bad.len(),
            });
        }
        for (index, &value) in weights.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveWeight { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > crate::simplex::NORMALIZE_TOL {
            return Err(Error::WeightSum { sum });
        }
        let weights: Vec<f64> = if (sum - 1.0).abs() > WEIGHT_SUM_TOL / 4.0 {
            weights.iter().map(|w| w / sum).collect()
        } else {
            weights
        };
        for i in 0..support.len() {
            for j in (i + 1)..support.len() {
                if support[i].max_abs_diff(&support[j]) <= DISTINCT_TOL {
                    return Err(Error::DuplicateBelief(i, j));
                }
            }
        }
        Ok(Self { support, weights })
    }

    /// The no-information policy `delta_mu`.
    pub fn no_information(prior: &Belief) -> Self {
        Self {
            support: vec![prior.clone()],
            weights: vec![1.0],
        }
    }

    /// Full disclosure: one Dirac per state, weighted by the prior.
    pub fn full_disclosure(prior: &Belief) -> Result<Self> {
        let n = prior.len();
        let support = (0..n).map(|i| Belief::dirac(n, i)).collect();
        Self::new(support, prior.to_vec(), prior)
    }

    pub fn support(&self) -> &[Belief] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Belief, f64)> {
        self.support.iter().zip(self.weights.iter().copied())
    }

    /// Expected belief `sum_i w_i nu_i`.
    pub fn mean(&self) -> Vec<f64> {
        let k = self.support[0].len();
        let mut out = vec![0.0; k];
        for (b, w) in self.iter() {
            for (o, p) in out.iter_mut().zip(b.iter()) {
                *o += w * p;
            }
        }
        out
    }

    pub fn bayes_residual(&self, prior: &Belief) -> f64 {
        self.mean()
            .iter()
            .zip(prior.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_nonredundant(&self) -> bool {
        affinely_independent(&self.support)
    }

    /// Mirrors every support belief (swaps the first and last state).
    pub fn reflect(&self) -> Self {
        Self {
            support: self.support.iter().map(Belief::reflect).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Replaces support points `i` and `j` by their conditional mean.
    pub fn pool(&self, i: usize, j: usize) -> Self {
        let (wi, wj) = (self.weights[i], self.weights[j]);
        let total = wi + wj;
        let merged: Vec<f64> = self.support[i]
            .iter()
            .zip(self.support[j].iter())
            .map(|(a, b)| (wi * a + wj * b) / total)
            .collect();
        let mut support = Vec::with_capacity(self.len() - 1);
        let mut weights = Vec::with_capacity(self.len() - 1);
        for (n, (b, w)) in self.iter().enumerate() {
            if n != i && n != j {
                support.push(b.clone());
                weights.push(w);
            }
        }
        support.push(Belief::new(merged).expect("convex combination of beliefs"));
        weights.push(total);
        Self { support, weights }
    }
}

/// Checks a policy against the model's state space and prior.
pub fn validate_policy(
    support: Vec<Belief>,
    weights: Vec<f64>,
    model: &QuadraticModel,
) -> Result<InformationPolicy> {
    for b in &support {
        model.space().check_belief(b)?;
    }
    InformationPolicy::new(support, weights, model.prior())
}

/// A policy with its support sorted by induced action.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionOrder {
    pub policy: InformationPolicy,
    pub actions: Vec<f64>,
    /// `order[n]` is the input index of the `n`-th sorted support point.
    pub order: Vec<usize>,
    /// Sorted positions `n` where `actions[n]` and `actions[n + 1]` tie.
    pub ties: Vec<usize>,
}

impl ActionOrder {
    pub fn has_ties(&self) -> bool {
        !self.ties.is_empty()
    }
}

/// Stable sort of the support by `E_nu theta`; equal actions keep their input
/// order and are flagged.
pub fn sort_by_action(p: &InformationPolicy, space: &StateSpace) -> Result<ActionOrder> {
    if space.dim() != 1 {
        return Err(Error::NotScalar);
    }
    let raw: Vec<f64> = p.support.iter().map(|b| space.scalar_mean(b)).collect();
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));
    let actions: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let ties = actions
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[1] - w[0]).abs() <= ACTION_TIE_TOL)
        .map(|(n, _)| n)
        .collect();
    let policy = InformationPolicy {
        support: order.iter().map(|&i| p.support[i].clone()).collect(),
        weights: order.iter().map(|&i| p.weights[i]).collect(),
    };
    Ok(ActionOrder {
        policy,
        actions,
        order,
        ties,
    })
}

/// Normalized consecutive belief differences of an action-sorted policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    pub steps: Vec<Vec<f64>>,
}

impl Direction {
    /// Largest componentwise gap, or `None` when the step counts differ.
    pub fn max_abs_diff(&self, other: &Direction) -> Option<f64> {
        if self.steps.len() != other.steps.len() {
            return None;
        }
        Some(
            self.steps
                .iter()
                .zip(&other.steps)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
                .fold(0.0, f64::max),
        )
    }
}

pub fn direction(p: &InformationPolicy, space: &StateSpace) -> Result<Direction> {
    if p.len() < 2 {
        return Err(Error::MalformedPolicy);
    }
    if !p.is_nonredundant() {
        return Err(Error::RedundantPolicy);
    }
    let sorted = sort_by_action(p, space)?;
    if let Some(&n) = sorted.ties.first() {
        return Err(Error::AmbiguousDirection(
            sorted.order[n],
            sorted.order[n + 1],
        ));
    }
    let steps = sorted
        .policy
        .support
        .windows(2)
        .map(|w| {
            let d: Vec<f64> = w[1].iter().zip(w[0].iter()).map(|(a, b)| a - b).collect();
            let norm = libm::sqrt(d.iter().map(|x| x * x).sum());
            d.into_iter().map(|x| x / norm).collect()
        })
        .collect();
    Ok(Direction { steps })
}

/// True iff `q` is a garbling of the nonredundant policy `p`: every support
/// point of `q` lies in the convex hull of `supp(p)` and both policies share
/// the same mean.
pub fn is_garbling_feasible(q: &InformationPolicy, p: &InformationPolicy) -> Result<bool> {
    if !p.is_nonredundant() {
        return Err(Error::RedundantPolicy);
    }
    let same_mean = q
        .mean()
        .iter()
        .zip(p.mean())
        .all(|(a, b)| (a - b).abs() <= BAYES_TOL);
    if !same_mean {
        return Ok(false);
    }
    for b in &q.support {
        if b.len() != p.support[0].len() {
            return Ok(false);
        }
        if barycentric(b, &p.support)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which extreme (by induced action) of the support to stretch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Low,
    High,
}

/// Mean-preserving spread with the same direction: the chosen extreme support
/// point `v` is pushed to `w + (1 + eps)(v - w)`, where `w` is its neighbor,
/// and the weight of `v` is split between the stretched point and `w`.
pub fn spread_along_direction(
    p: &InformationPolicy,
    end: End,
    eps: f64,
    model: &QuadraticModel,
) -> Result<InformationPolicy> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::OutOfRange(eps));
    }
    // validates size, nonredundancy and ties
    direction(p, model.space())?;
    let sorted = sort_by_action(p, model.space())?.policy;
    let n = sorted.len();
    let (ext, nb) = match end {
        End::Low => (0, 1),
        End::High => (n - 1, n - 2),
    };
    let v = &sorted.support[ext];
    let w = &sorted.support[nb];
    if !v.is_interior(NEGATIVE_SLACK) {
        return Err(Error::NotInterior);
    }
    let stretched: Vec<f64> = w
        .iter()
        .zip(v.iter())
        .map(|(wk, vk)| wk + (1.0 + eps) * (vk - wk))
        .collect();
    if stretched.iter().any(|&x| x < -NEGATIVE_SLACK) {
        return Err(Error::EpsilonTooLarge(eps));
    }
    let stretched = Belief::new(stretched).map_err(|_| Error::EpsilonTooLarge(eps))?;
    let wv = sorted.weights[ext];
    let mut support = sorted.support.clone();
    let mut weights = sorted.weights.clone();
    support[ext] = stretched;
    weights[ext] = wv / (1.0 + eps);
    weights[nb] += wv * eps / (1.0 + eps);
    InformationPolicy::new(support, weights, model.prior())
}

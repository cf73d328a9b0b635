//! Incentive compatibility of information policies.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::policy::{sort_by_action, InformationPolicy};
use crate::quadratic::{choice_distance, psychological_distance, QuadraticModel};
use crate::simplex::belief_to_az;

/// Absolute slack on `choice - psych` so binding pairs count as IC.
pub const IC_SLACK: f64 = 1e-12;

/// `s*(kappa) = sqrt((2 - kappa) / (3 kappa))`, or `None` when `kappa > 2`.
pub fn slope_cutoff(kappa: f64) -> Result<Option<f64>> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::NonPositiveKappa(kappa));
    }
    if kappa > 2.0 {
        return Ok(None);
    }
    Ok(Some(libm::sqrt((2.0 - kappa) / (3.0 * kappa))))
}

/// One compared pair; indices refer to the input policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCheck {
    pub i: usize,
    pub j: usize,
    pub choice: f64,
    pub psych: f64,
}

impl PairCheck {
    pub fn margin(&self) -> f64 {
        self.choice - self.psych
    }

    pub fn holds(&self) -> bool {
        self.margin() >= -IC_SLACK
    }

    /// Equal induced actions: never IC.
    pub fn is_tie(&self) -> bool {
        self.choice <= crate::policy::ACTION_TIE_TOL
    }
}

/// Three-state restatement of one consecutive pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeCheck {
    /// `|dz / da|`, infinite for equal actions.
    pub slope: f64,
    pub cutoff: Option<f64>,
}

impl SlopeCheck {
    pub fn holds(&self) -> bool {
        match self.cutoff {
            Some(c) => self.slope <= c + IC_SLACK * (1.0 + c),
            None => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcReport {
    pub ic: bool,
    pub pairs: Vec<PairCheck>,
    pub violations: Vec<PairCheck>,
    /// Present for the main model on `{-1, 0, 1}`.
    pub slope_form: Option<Vec<SlopeCheck>>,
    /// Consecutive-pair verdict, reported by the all-pairs check for scalar actions.
    pub consecutive_ic: Option<bool>,
}

impl IcReport {
    fn from_pairs(pairs: Vec<PairCheck>) -> Self {
        let violations: Vec<PairCheck> = pairs.iter().copied().filter(|c| !c.holds()).collect();
        Self {
            ic: violations.is_empty(),
            pairs,
            violations,
            slope_form: None,
            consecutive_ic: None,
        }
    }

    pub fn min_margin(&self) -> Option<f64> {
        self.pairs.iter().map(PairCheck::margin).reduce(f64::min)
    }

    pub fn slope_form_ic(&self) -> Option<bool> {
        self.slope_form
            .as_ref()
            .map(|s| s.iter().all(SlopeCheck::holds))
    }
}

/// Consecutive-pair check after sorting the support by induced action.
pub fn order_ic(p: &InformationPolicy, m: &QuadraticModel) -> Result<IcReport> {
    if !p.is_nonredundant() {
        return Err(Error::RedundantPolicy);
    }
    let sorted = sort_by_action(p, m.space())?;
    let support = sorted.policy.support();
    let pairs: Vec<PairCheck> = (1..support.len())
        .map(|n| PairCheck {
            i: sorted.order[n - 1],
            j: sorted.order[n],
            choice: choice_distance(&support[n - 1], &support[n], m),
            psych: psychological_distance(&support[n - 1], &support[n], m),
        })
        .collect();
    let mut report = IcReport::from_pairs(pairs);
    if let (Some(kappa), true) = (m.kappa(), m.space().is_three_state()) {
        let cutoff = slope_cutoff(kappa)?;
        report.slope_form = Some(
            support
                .windows(2)
                .map(|w| {
                    let (x, y) = (belief_to_az(&w[0]), belief_to_az(&w[1]));
                    let da = (y.a - x.a).abs();
                    let dz = (y.z - x.z).abs();
                    let slope = if da <= crate::policy::ACTION_TIE_TOL {
                        f64::INFINITY
                    } else {
                        dz / da
                    };
                    SlopeCheck { slope, cutoff }
                })
                .collect(),
        );
    }
    Ok(report)
}

/// All-pairs check in the general model. A main model is converted first.
pub fn pairwise_ic_general(p: &InformationPolicy, m: &QuadraticModel) -> Result<IcReport> {
    if !p.is_nonredundant() {
        return Err(Error::RedundantPolicy);
    }
    let g = m.to_general();
    let support = p.support();
    let mut pairs = Vec::new();
    for i in 0..support.len() {
        for j in (i + 1)..support.len() {
            pairs.push(PairCheck {
                i,
                j,
                choice: choice_distance(&support[i], &support[j], &g),
                psych: psychological_distance(&support[i], &support[j], &g),
            });
        }
    }
    let mut report = IcReport::from_pairs(pairs);
    if g.space().dim() == 1 {
        report.consecutive_ic = Some(order_ic(p, &g)?.ic);
    }
    Ok(report)
}

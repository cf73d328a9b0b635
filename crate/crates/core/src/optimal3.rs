//! Closed-form optimal attention outcomes for states `{-1, 0, 1}`.
//!
//! Beliefs are written in the `(a, z)` chart: `a = E theta`, `z = nu(0)`.
//! Formulas are derived for `a_mu >= 0`; other priors are mirrored first.

use alloc::vec;

use crate::error::{Error, Result};
use crate::ic::slope_cutoff;
use crate::policy::InformationPolicy;
use crate::simplex::{az_to_belief, belief_to_az, AzPoint, Belief};

/// Relative distance to `k2` at which both optimal families coexist.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

/// `(mu_{-1}, mu_0, mu_1)` of an interior prior on `{-1, 0, 1}`.
fn parts(prior: &Belief) -> Result<(f64, f64, f64)> {
    if prior.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: prior.len(),
        });
    }
    if prior.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::BoundaryPrior);
    }
    Ok((prior[0], prior[1], prior[2]))
}

/// `V_mu theta`.
pub fn prior_variance(prior: &Belief) -> f64 {
    let a = prior[2] - prior[0];
    prior[0] + prior[2] - a * a
}

pub fn thresholds(prior: &Belief) -> Result<Thresholds> {
    let (lo, mu0, hi) = parts(prior)?;
    let abs_a = (hi - lo).abs();
    let r2 = (1.0 - abs_a + mu0) / (1.0 - abs_a);
    let r3 = mu0 / (1.0 - abs_a);
    Ok(Thresholds {
        k1: 0.5,
        k2: 2.0 / (0.75 * r2 * r2 + 1.0),
        k3: 2.0 / (3.0 * r3 * r3 + 1.0),
        k4: 2.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    FullRevelation,
    Downplaying,
    SeparatingExaggeration,
    Exaggeration,
    NoDisclosure,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::FullRevelation => "FullRevelation",
            Regime::Downplaying => "Downplaying",
            Regime::SeparatingExaggeration => "SeparatingExaggeration",
            Regime::Exaggeration => "Exaggeration",
            Regime::NoDisclosure => "NoDisclosure",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Regime::FullRevelation,
            Regime::Downplaying,
            Regime::SeparatingExaggeration,
            Regime::Exaggeration,
            Regime::NoDisclosure,
        ]
        .into_iter()
        .find(|r| r.name() == s)
    }
}

/// Signal parameters of the optimal outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Signal {
    /// `P(message 0 | theta)` for the extreme states. Full revelation is
    /// `(0, 0)` and no disclosure is `(1, 1)`.
    Downplaying { pi_minus1: f64, pi_plus1: f64 },
    /// Share of the `theta = 0` mass sent to the low message.
    Exaggeration { pi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalOutcome {
    pub regime: Regime,
    pub policy: InformationPolicy,
    pub signal: Signal,
    /// `sum_i w_i U_P(nu_i)`.
    pub payoff: f64,
    pub degenerate: bool,
    pub reflected: bool,
    pub s_star: Option<f64>,
    /// Slope `dz/da` of the binding segments (signed for binary policies).
    pub slope_used: Option<f64>,
}

impl OptimalOutcome {
    /// The outcome for the mirrored prior (states `-1` and `1` swapped).
    pub fn mirrored(&self) -> Self {
        let policy = self.policy.reflect();
        let signal = match self.signal {
            Signal::Downplaying {
                pi_minus1,
                pi_plus1,
            } => Signal::Downplaying {
                pi_minus1: pi_plus1,
                pi_plus1: pi_minus1,
            },
            Signal::Exaggeration { .. } => exaggeration_signal(&policy),
        };
        Self {
            regime: self.regime,
            policy,
            signal,
            payoff: self.payoff,
            degenerate: self.degenerate,
            reflected: !self.reflected,
            s_star: self.s_star,
            slope_used: self.slope_used.map(|s| {
                if self.regime == Regime::Downplaying {
                    s
                } else {
                    -s
                }
            }),
        }
    }
}

/// Share of `theta = 0` mass on negative-action beliefs.
fn exaggeration_signal(policy: &InformationPolicy) -> Signal {
    let (mut neg, mut pos) = (0.0, 0.0);
    for (b, w) in policy.iter() {
        let a = b[2] - b[0];
        if a < 0.0 {
            neg += w * b[1];
        } else if a > 0.0 {
            pos += w * b[1];
        }
    }
    let pi = if neg + pos > 0.0 {
        neg / (neg + pos)
    } else {
        0.0
    };
    Signal::Exaggeration { pi }
}

fn canonical(prior: &Belief) -> Result<(Belief, bool)> {
    let (lo, _, hi) = parts(prior)?;
    Ok(if hi - lo < 0.0 {
        (prior.reflect(), true)
    } else {
        (prior.clone(), false)
    })
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::NonPositiveKappa(kappa));
    }
    Ok(())
}

/// Runs `f` on the canonical (`a_mu >= 0`) prior and maps the result back.
fn with_reflection(
    prior: &Belief,
    f: impl FnOnce(&Belief) -> Result<OptimalOutcome>,
) -> Result<OptimalOutcome> {
    let (canon, flip) = canonical(prior)?;
    let out = f(&canon)?;
    Ok(if flip { out.mirrored() } else { out })
}

fn full_revelation(prior: &Belief, kappa: f64) -> Result<OptimalOutcome> {
    Ok(OptimalOutcome {
        regime: Regime::FullRevelation,
        policy: InformationPolicy::full_disclosure(prior)?,
        signal: Signal::Downplaying {
            pi_minus1: 0.0,
            pi_plus1: 0.0,
        },
        payoff: 0.0,
        degenerate: false,
        reflected: false,
        s_star: slope_cutoff(kappa)?,
        slope_used: None,
    })
}

fn no_disclosure(prior: &Belief, kappa: f64) -> Result<OptimalOutcome> {
    Ok(OptimalOutcome {
        regime: Regime::NoDisclosure,
        policy: InformationPolicy::no_information(prior),
        signal: Signal::Downplaying {
            pi_minus1: 1.0,
            pi_plus1: 1.0,
        },
        payoff: -prior_variance(prior),
        degenerate: false,
        reflected: false,
        s_star: slope_cutoff(kappa)?,
        slope_used: None,
    })
}

/// Support `{delta_-1, nu(0, s), delta_1}` with both slopes equal to `s`.
/// `prior` must have `a_mu >= 0`.
fn downplaying_canonical(prior: &Belief, kappa: f64, k2: f64) -> Result<OptimalOutcome> {
    let (lo, mu0, hi) = parts(prior)?;
    let a_mu = hi - lo;
    let s = slope_cutoff(kappa)?.ok_or(Error::KappaOutOfRange(kappa))?;
    let p2 = mu0 / s;
    let weights = vec![(1.0 - p2 - a_mu) / 2.0, p2, (1.0 - p2 + a_mu) / 2.0];
    if let Some(&w) = weights.iter().find(|&&w| !(0.0..=1.0).contains(&w)) {
        return Err(Error::WeightOutOfRange(w));
    }
    let support = vec![
        Belief::dirac(3, 0),
        az_to_belief(AzPoint::new(0.0, s))?,
        Belief::dirac(3, 2),
    ];
    let policy = InformationPolicy::new(support, weights, prior)?;
    let pooled = p2 - mu0;
    Ok(OptimalOutcome {
        regime: Regime::Downplaying,
        policy,
        signal: Signal::Downplaying {
            pi_minus1: pooled / (2.0 * lo),
            pi_plus1: pooled / (2.0 * hi),
        },
        payoff: -mu0 * (1.0 - s) / s,
        degenerate: (kappa - k2).abs() <= DEGENERACY_TOL * k2.max(1.0),
        reflected: false,
        s_star: Some(s),
        slope_used: Some(s),
    })
}

/// Binary policy with one belief on each side edge, on the line of slope
/// `s_tilde` through the prior. Any interior prior is accepted.
pub fn binary_policy(prior: &Belief, s_tilde: f64) -> Result<InformationPolicy> {
    let (lo, mu0, hi) = parts(prior)?;
    let a_mu = hi - lo;
    check_binary_slope(mu0, a_mu, s_tilde)?;
    let base = 1.0 - mu0 + s_tilde * a_mu;
    let left = if s_tilde == mu0 / (1.0 + a_mu) {
        Belief::dirac(3, 0)
    } else {
        az_to_belief(AzPoint::new(
            -base / (1.0 - s_tilde),
            (mu0 - s_tilde * (1.0 + a_mu)) / (1.0 - s_tilde),
        ))?
    };
    let right = if s_tilde == -mu0 / (1.0 - a_mu) {
        Belief::dirac(3, 2)
    } else {
        az_to_belief(AzPoint::new(
            base / (1.0 + s_tilde),
            (mu0 + s_tilde * (1.0 - a_mu)) / (1.0 + s_tilde),
        ))?
    };
    let w_left = (1.0 - s_tilde) / 2.0 * (1.0 - mu0 - a_mu) / base;
    let w_right = (1.0 + s_tilde) / 2.0 * (1.0 - mu0 + a_mu) / base;
    InformationPolicy::new(vec![left, right], vec![w_left, w_right], prior)
}

/// Feasible binary slopes are `[-mu0 / (1 - a_mu), mu0 / (1 + a_mu)]`.
pub fn binary_slope_range(prior: &Belief) -> Result<(f64, f64)> {
    let (lo, mu0, hi) = parts(prior)?;
    let a_mu = hi - lo;
    Ok((-mu0 / (1.0 - a_mu), mu0 / (1.0 + a_mu)))
}

fn check_binary_slope(mu0: f64, a_mu: f64, s: f64) -> Result<()> {
    let (lo, hi) = (-mu0 / (1.0 - a_mu), mu0 / (1.0 + a_mu));
    let slack = 1e-12;
    if !s.is_finite() || s < lo - slack || s > hi + slack || s * s >= 1.0 {
        return Err(Error::InfeasibleSlope(s));
    }
    Ok(())
}

/// `((1 - mu0)^2 - a_mu^2) / (1 - s^2) - V_mu theta`.
pub fn binary_payoff(prior: &Belief, s_tilde: f64) -> Result<f64> {
    let (lo, mu0, hi) = parts(prior)?;
    let a_mu = hi - lo;
    check_binary_slope(mu0, a_mu, s_tilde)?;
    let spread = (1.0 - mu0) * (1.0 - mu0) - a_mu * a_mu;
    Ok(spread / (1.0 - s_tilde * s_tilde) - prior_variance(prior))
}

fn exaggeration_canonical(prior: &Belief, kappa: f64, k3: f64) -> Result<OptimalOutcome> {
    let (lo, mu0, hi) = parts(prior)?;
    let a_mu = hi - lo;
    let s = slope_cutoff(kappa)?.ok_or(Error::KappaOutOfRange(kappa))?;
    let separating_slope = mu0 / (1.0 - a_mu);
    let s_tilde = -s.min(separating_slope);
    let policy = binary_policy(prior, s_tilde)?;
    let signal = exaggeration_signal(&policy);
    Ok(OptimalOutcome {
        regime: if kappa <= k3 {
            Regime::SeparatingExaggeration
        } else {
            Regime::Exaggeration
        },
        policy,
        signal,
        payoff: binary_payoff(prior, s_tilde)?,
        degenerate: false,
        reflected: false,
        s_star: Some(s),
        slope_used: Some(s_tilde),
    })
}

/// Downplaying outcome; requires `kappa` in `(k1, k2]`.
pub fn downplaying_policy(prior: &Belief, kappa: f64) -> Result<OptimalOutcome> {
    check_kappa(kappa)?;
    let t = thresholds(prior)?;
    let tol = DEGENERACY_TOL * t.k2.max(1.0);
    if !(kappa > t.k1 && kappa <= t.k2 + tol) {
        return Err(Error::OutOfRegime {
            kappa,
            regime: "Downplaying requires kappa in (k1, k2]",
        });
    }
    with_reflection(prior, |p| downplaying_canonical(p, kappa, t.k2))
}

/// Separating or interior exaggeration; requires `kappa` in `[k2, k4]`.
pub fn exaggeration_policy(prior: &Belief, kappa: f64) -> Result<OptimalOutcome> {
    check_kappa(kappa)?;
    let t = thresholds(prior)?;
    let tol = DEGENERACY_TOL * t.k2.max(1.0);
    if !(kappa >= t.k2 - tol && kappa <= t.k4) {
        return Err(Error::OutOfRegime {
            kappa,
            regime: "Exaggeration requires kappa in [k2, k4]",
        });
    }
    let mut out = with_reflection(prior, |p| exaggeration_canonical(p, kappa, t.k3))?;
    out.degenerate = (kappa - t.k2).abs() <= tol;
    Ok(out)
}

/// Optimal attention outcome for `prior` and cost `kappa`.
pub fn solve(prior: &Belief, kappa: f64) -> Result<OptimalOutcome> {
    let t = thresholds(prior)?;
    solve_with_thresholds(prior, kappa, &t)
}

/// Same as [`solve`] but dispatches on the given thresholds.
pub fn solve_with_thresholds(prior: &Belief, kappa: f64, t: &Thresholds) -> Result<OptimalOutcome> {
    check_kappa(kappa)?;
    parts(prior)?;
    with_reflection(prior, |p| {
        if kappa <= t.k1 {
            full_revelation(p, kappa)
        } else if kappa <= t.k2 {
            downplaying_canonical(p, kappa, t.k2)
        } else if kappa <= t.k4 {
            exaggeration_canonical(p, kappa, t.k3)
        } else {
            no_disclosure(p, kappa)
        }
    })
}

/// Largest `a1` for which the ternary family through `(1, 0)` keeps a
/// nonnegative middle weight: `-(1 - mu0 - a_mu) / (1 + mu0 - a_mu)`.
pub fn ternary_a1_max(prior: &Belief) -> Result<f64> {
    let (lo, mu0, hi) = parts(prior)?;
    let a = (hi - lo).abs();
    Ok(-(1.0 - mu0 - a) / (1.0 + mu0 - a))
}

fn ternary_setup(prior: &Belief, kappa: f64, a1: f64) -> Result<(Belief, f64)> {
    check_kappa(kappa)?;
    let t = thresholds(prior)?;
    if !(kappa > t.k1 && kappa < t.k4) {
        return Err(Error::KappaOutOfRange(kappa));
    }
    let hi = ternary_a1_max(prior)?;
    if !(a1 >= -1.0 - 1e-12 && a1 <= hi + 1e-12) {
        return Err(Error::OutOfRange(a1));
    }
    let s = slope_cutoff(kappa)?.ok_or(Error::KappaOutOfRange(kappa))?;
    Ok((canonical(prior)?.0, s))
}

/// Ternary policy with critical slopes, left belief at `a1` on the left
/// edge and right belief at `delta_1`, for an `a_mu >= 0` prior (mirrored
/// otherwise).
pub fn ternary_policy(prior: &Belief, kappa: f64, a1: f64) -> Result<InformationPolicy> {
    let (canon, s) = ternary_setup(prior, kappa, a1)?;
    let a2 = -(1.0 - s) * (1.0 + a1) / (2.0 * s);
    let p = match crate::search::candidate_policy(a1, a2, kappa, &canon)? {
        crate::search::Candidate::Feasible(p) => p,
        crate::search::Candidate::Infeasible(_) => return Err(Error::OutOfRange(a1)),
    };
    Ok(if canon.probs() == prior.probs() {
        p
    } else {
        p.reflect()
    })
}

/// Closed-form principal payoff of [`ternary_policy`].
pub fn ternary_payoff(prior: &Belief, kappa: f64, a1: f64) -> Result<f64> {
    let (canon, s) = ternary_setup(prior, kappa, a1)?;
    let (lo, mu0, hi) = (canon[0], canon[1], canon[2]);
    let a_mu = hi - lo;
    let bracket =
        a1 * (1.0 - a_mu + mu0 - 2.0 * s * (1.0 - a_mu)) + 1.0 - mu0 - a_mu + 2.0 * s * a_mu;
    Ok(-a_mu * a_mu + bracket / (2.0 * s) - prior_variance(&canon))
}

/// `(a, z)` coordinates of each support belief of an outcome.
pub fn outcome_points(out: &OptimalOutcome) -> alloc::vec::Vec<AzPoint> {
    out.policy.support().iter().map(belief_to_az).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ic::order_ic;
    use crate::quadratic::{expected_principal_payoff, QuadraticModel};
    use crate::simplex::StateSpace;
    use alloc::vec::Vec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn b(p: &[f64]) -> Belief {
        Belief::new(p.to_vec()).unwrap()
    }

    fn direct_payoff(out: &OptimalOutcome, prior: &Belief) -> f64 {
        let m = QuadraticModel::new(StateSpace::three(), prior.clone(), 1.0).unwrap();
        expected_principal_payoff(&out.policy, &m).direct
    }

    fn check_outcome(out: &OptimalOutcome, prior: &Belief, kappa: f64) {
        let m = QuadraticModel::new(StateSpace::three(), prior.clone(), kappa).unwrap();
        let r = order_ic(&out.policy, &m).unwrap();
        assert!(
            r.ic,
            "{:?} at kappa {kappa} fails IC: {:?}",
            out.regime, r.violations
        );
        assert!((out.payoff - expected_principal_payoff(&out.policy, &m).direct).abs() <= 1e-10);
        assert!(out.policy.bayes_residual(prior) <= 1e-12);
        match out.signal {
            Signal::Downplaying {
                pi_minus1,
                pi_plus1,
            } => {
                assert!((0.0..=1.0).contains(&pi_minus1));
                assert!((0.0..=1.0).contains(&pi_plus1));
            }
            Signal::Exaggeration { pi } => assert!((0.0..=1.0).contains(&pi)),
        }
        if matches!(out.regime, Regime::Downplaying | Regime::Exaggeration) {
            for pair in &r.pairs {
                assert!(pair.margin().abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn threshold_examples() {
        let t = thresholds(&Belief::uniform(3)).unwrap();
        assert_eq!(t.k1, 0.5);
        assert_eq!(t.k4, 2.0);
        assert_abs_diff_eq!(t.k2, 6.0 / 7.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.k3, 1.5, epsilon = 1e-12);

        let t = thresholds(&b(&[0.2, 0.5, 0.3])).unwrap();
        assert_abs_diff_eq!(
            t.k2,
            2.0 / (0.75 * (1.4f64 / 0.9).powi(2) + 1.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            t.k3,
            2.0 / (3.0 * (0.5f64 / 0.9).powi(2) + 1.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(t.k2, 27.0 / 38.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.k3, 27.0 / 26.0, epsilon = 1e-12);

        assert_eq!(thresholds(&b(&[0.0, 0.5, 0.5])), Err(Error::BoundaryPrior));
    }

    #[test]
    fn downplaying_example() {
        let mu = Belief::uniform(3);
        let out = downplaying_policy(&mu, 0.6).unwrap();
        let z = 7f64.sqrt() / 3.0;
        let apex = belief_to_az(&out.policy.support()[1]);
        assert_abs_diff_eq!(apex.a, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(apex.z, z, epsilon = 1e-15);
        let w = out.policy.weights();
        assert_abs_diff_eq!(w[0], 0.31101, epsilon = 1e-5);
        assert_abs_diff_eq!(w[1], 1.0 / 7f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(w[1], 0.37798, epsilon = 5e-5);
        assert_abs_diff_eq!(w[2], w[0], epsilon = 1e-15);
        let Signal::Downplaying {
            pi_minus1,
            pi_plus1,
        } = out.signal
        else {
            panic!("wrong signal")
        };
        assert_abs_diff_eq!(
            pi_minus1,
            1.5 * (1.0 / 7f64.sqrt() - 1.0 / 3.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(pi_minus1, 0.06697, epsilon = 5e-5);
        assert_eq!(pi_minus1, pi_plus1);
        check_outcome(&out, &mu, 0.6);
        assert_abs_diff_eq!(out.payoff, direct_payoff(&out, &mu), epsilon = 1e-12);
    }

    #[test]
    fn downplaying_near_k1_is_full_disclosure() {
        let mu = b(&[0.25, 0.35, 0.4]);
        let out = downplaying_policy(&mu, 0.5 + 1e-12).unwrap();
        let Signal::Downplaying {
            pi_minus1,
            pi_plus1,
        } = out.signal
        else {
            panic!()
        };
        assert!(pi_minus1 < 1e-9 && pi_plus1 < 1e-9);
        assert!(out.payoff.abs() < 1e-9);
    }

    #[test]
    fn regime_errors() {
        let mu = Belief::uniform(3);
        assert!(matches!(
            downplaying_policy(&mu, 0.4),
            Err(Error::OutOfRegime { .. })
        ));
        assert!(matches!(
            downplaying_policy(&mu, 1.0),
            Err(Error::OutOfRegime { .. })
        ));
        assert!(matches!(
            exaggeration_policy(&mu, 0.7),
            Err(Error::OutOfRegime { .. })
        ));
        assert!(matches!(
            exaggeration_policy(&mu, 2.1),
            Err(Error::OutOfRegime { .. })
        ));
        assert_eq!(solve(&mu, 0.0), Err(Error::NonPositiveKappa(0.0)));
        assert_eq!(solve(&b(&[0.5, 0.5, 0.0]), 1.0), Err(Error::BoundaryPrior));
    }

    #[test]
    fn separating_exaggeration_example() {
        let mu = Belief::uniform(3);
        let out = exaggeration_policy(&mu, 1.0).unwrap();
        assert_eq!(out.regime, Regime::SeparatingExaggeration);
        let pts = outcome_points(&out);
        assert_abs_diff_eq!(pts[0].a, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(pts[0].z, 0.5, epsilon = 1e-15);
        assert_eq!(out.policy.support()[1], Belief::dirac(3, 2));
        assert_abs_diff_eq!(out.policy.weights()[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.policy.weights()[1], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.payoff, -1.0 / 6.0, epsilon = 1e-15);
        assert_eq!(out.signal, Signal::Exaggeration { pi: 1.0 });
        check_outcome(&out, &mu, 1.0);
    }

    #[test]
    fn interior_exaggeration_example() {
        let mu = Belief::uniform(3);
        let out = exaggeration_policy(&mu, 1.8).unwrap();
        assert_eq!(out.regime, Regime::Exaggeration);
        assert_abs_diff_eq!(
            out.slope_used.unwrap(),
            -1.0 / (3.0 * 3f64.sqrt()),
            epsilon = 1e-15
        );
        let pts = outcome_points(&out);
        assert_abs_diff_eq!(pts[0].a, -0.5591, epsilon = 1e-4);
        assert_abs_diff_eq!(pts[0].z, 0.44093, epsilon = 1e-5);
        assert_abs_diff_eq!(pts[1].a, 0.8256, epsilon = 1e-4);
        assert_abs_diff_eq!(pts[1].z, 0.17446, epsilon = 1e-5);
        // the low belief carries the larger weight
        assert_abs_diff_eq!(out.policy.weights()[0], 0.596225, epsilon = 1e-6);
        assert_abs_diff_eq!(out.policy.weights()[1], 0.403775, epsilon = 1e-6);
        assert_abs_diff_eq!(out.payoff, -8.0 / 39.0, epsilon = 1e-14);
        assert_abs_diff_eq!(direct_payoff(&out, &mu), -8.0 / 39.0, epsilon = 1e-14);
        check_outcome(&out, &mu, 1.8);
    }

    #[test]
    fn orthogonal_policy_at_k4() {
        let mu = b(&[0.2, 0.5, 0.3]);
        let out = solve(&mu, 2.0).unwrap();
        assert_eq!(out.slope_used, Some(0.0));
        for p in outcome_points(&out) {
            assert_abs_diff_eq!(p.z, 0.5, epsilon = 1e-15);
        }
        check_outcome(&out, &mu, 2.0);
    }

    #[test]
    fn solve_examples() {
        let mu = Belief::uniform(3);
        let out = solve(&mu, 0.3).unwrap();
        assert_eq!(out.regime, Regime::FullRevelation);
        assert_eq!(out.payoff, 0.0);
        check_outcome(&out, &mu, 0.3);
        let out = solve(&mu, 3.0).unwrap();
        assert_eq!(out.regime, Regime::NoDisclosure);
        assert_abs_diff_eq!(out.payoff, -2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(out.s_star, None);
        check_outcome(&out, &mu, 3.0);
    }

    #[test]
    fn reflected_solve() {
        let mu = b(&[0.3, 0.5, 0.2]);
        let mirror = b(&[0.2, 0.5, 0.3]);
        let a = solve(&mu, 1.0).unwrap();
        let c = solve(&mirror, 1.0).unwrap();
        assert!(a.reflected);
        assert!(!c.reflected);
        assert_eq!(a.payoff, c.payoff);
        assert_eq!(a, c.mirrored());
        assert_eq!(a.signal, Signal::Exaggeration { pi: 0.0 });
        check_outcome(&a, &mu, 1.0);
    }

    #[test]
    fn degenerate_at_k2() {
        let mu = Belief::uniform(3);
        let k2 = thresholds(&mu).unwrap().k2;
        let d = solve(&mu, k2).unwrap();
        assert_eq!(d.regime, Regime::Downplaying);
        assert!(d.degenerate);
        let e = exaggeration_policy(&mu, k2).unwrap();
        assert_eq!(e.regime, Regime::SeparatingExaggeration);
        assert!(e.degenerate);
        assert_abs_diff_eq!(d.payoff, e.payoff, epsilon = 1e-9);
        assert!(!solve(&mu, k2 * 1.01).unwrap().degenerate);
        // the decimal 6/7 may sit an ulp away from the computed threshold
        for k in [6.0 / 7.0, k2 * (1.0 - 1e-15), k2 * (1.0 + 1e-15)] {
            assert!(downplaying_policy(&mu, k).unwrap().degenerate);
            assert!(exaggeration_policy(&mu, k).unwrap().degenerate);
        }
    }

    #[test]
    fn binary_payoff_examples() {
        let mu = Belief::uniform(3);
        assert_abs_diff_eq!(
            binary_payoff(&mu, 0.0).unwrap(),
            -2.0 / 9.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            binary_payoff(&mu, -1.0 / 3.0).unwrap(),
            -1.0 / 6.0,
            epsilon = 1e-15
        );
        assert!(matches!(
            binary_payoff(&mu, -0.6),
            Err(Error::InfeasibleSlope(_))
        ));
        let prior = b(&[0.2, 0.5, 0.3]);
        let (lo, _) = binary_slope_range(&prior).unwrap();
        let mut last = f64::NEG_INFINITY;
        for i in 0..=20 {
            let s = lo * i as f64 / 20.0;
            let v = binary_payoff(&prior, s).unwrap();
            assert!(v > last);
            last = v;
            let p = binary_policy(&prior, s).unwrap();
            let m = QuadraticModel::new(StateSpace::three(), prior.clone(), 1.0).unwrap();
            assert_abs_diff_eq!(v, expected_principal_payoff(&p, &m).direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn ternary_payoff_examples() {
        let mu = Belief::uniform(3);
        let d = downplaying_policy(&mu, 0.6).unwrap();
        assert_abs_diff_eq!(
            ternary_payoff(&mu, 0.6, -1.0).unwrap(),
            d.payoff,
            epsilon = 1e-10
        );

        for prior in [Belief::uniform(3), b(&[0.2, 0.5, 0.3]), b(&[0.1, 0.3, 0.6])] {
            for kappa in [0.6, 0.8, 1.0] {
                let end = ternary_a1_max(&prior).unwrap();
                let (lo, _) = binary_slope_range(&prior).unwrap();
                assert_abs_diff_eq!(
                    ternary_payoff(&prior, kappa, end).unwrap(),
                    binary_payoff(&prior, lo).unwrap(),
                    epsilon = 1e-12
                );
                let x = -0.9 * 0.5 + end * 0.5;
                let y = -0.7 * 0.5 + end * 0.5;
                let mid = ternary_payoff(&prior, kappa, (x + y) / 2.0).unwrap();
                let avg = (ternary_payoff(&prior, kappa, x).unwrap()
                    + ternary_payoff(&prior, kappa, y).unwrap())
                    / 2.0;
                assert_abs_diff_eq!(mid, avg, epsilon = 1e-14);
            }
        }
        assert!(matches!(
            ternary_payoff(&mu, 0.6, -0.2),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            ternary_payoff(&mu, 0.4, -1.0),
            Err(Error::KappaOutOfRange(_))
        ));
    }

    #[test]
    fn ternary_policy_matches_payoff() {
        for prior in [Belief::uniform(3), b(&[0.2, 0.5, 0.3]), b(&[0.3, 0.5, 0.2])] {
            let kappa = 0.65;
            let m = QuadraticModel::new(StateSpace::three(), prior.clone(), kappa).unwrap();
            let end = ternary_a1_max(&prior).unwrap();
            for i in 0..=10 {
                let a1 = -1.0 + (end + 1.0) * i as f64 / 10.0;
                let p = ternary_policy(&prior, kappa, a1).unwrap();
                assert!(order_ic(&p, &m).unwrap().ic);
                assert_abs_diff_eq!(
                    expected_principal_payoff(&p, &m).direct,
                    ternary_payoff(&prior, kappa, a1).unwrap(),
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn threshold_ordering_boundaries() {
        // ordering holds even for skewed priors
        for prior in [
            b(&[0.01, 0.01, 0.98]),
            b(&[0.45, 0.1, 0.45]),
            b(&[0.001, 0.998, 0.001]),
        ] {
            let t = thresholds(&prior).unwrap();
            assert!(t.k1 < t.k2 && t.k2 < t.k3 && t.k3 < t.k4, "{t:?}");
        }
    }

    /// Payoff on either side of each threshold, stepping `h` away.
    fn jump_at(prior: &Belief, k: f64, h: f64) -> f64 {
        (solve(prior, k + h).unwrap().payoff - solve(prior, k - h).unwrap().payoff).abs()
    }

    #[test]
    fn payoff_continuous_at_inner_thresholds() {
        for prior in [Belief::uniform(3), b(&[0.2, 0.5, 0.3]), b(&[0.5, 0.2, 0.3])] {
            let t = thresholds(&prior).unwrap();
            for k in [t.k1, t.k2, t.k3] {
                assert!(jump_at(&prior, k, 1e-3) <= 1e-2);
                assert!(jump_at(&prior, k, 1e-8) <= 1e-6);
            }
        }
    }

    #[test]
    fn payoff_jumps_at_k4() {
        // above k4 only the uninformative policy is IC, so the value drops by
        // the action variance of the orthogonal policy
        for prior in [Belief::uniform(3), b(&[0.2, 0.5, 0.3])] {
            let a = prior[2] - prior[0];
            let expected = (1.0 - prior[1]).powi(2) - a * a;
            let jump =
                solve(&prior, 2.0).unwrap().payoff - solve(&prior, 2.0 + 1e-12).unwrap().payoff;
            assert_abs_diff_eq!(jump, expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn payoff_weakly_decreasing() {
        for prior in [Belief::uniform(3), b(&[0.2, 0.5, 0.3]), b(&[0.6, 0.3, 0.1])] {
            let vals: Vec<f64> = (1..=600)
                .map(|i| solve(&prior, i as f64 * 0.005).unwrap().payoff)
                .collect();
            for w in vals.windows(2) {
                assert!(w[1] <= w[0] + 1e-12);
            }
        }
    }

    fn interior_prior() -> impl Strategy<Value = Belief> {
        (0.02f64..1.0, 0.02f64..1.0, 0.02f64..1.0).prop_map(|(x, y, z)| {
            let s = x + y + z;
            Belief::new(vec![x / s, y / s, z / s]).unwrap()
        })
    }

    proptest! {
        #[test]
        fn solve_invariants(prior in interior_prior(), kappa in 0.05f64..3.0) {
            let out = solve(&prior, kappa).unwrap();
            check_outcome(&out, &prior, kappa);
            prop_assert!(out.payoff >= -prior_variance(&prior) - 1e-12);
            let t = thresholds(&prior).unwrap();
            prop_assert!(t.k1 < t.k2 && t.k2 < t.k3 && t.k3 < t.k4);
        }

        #[test]
        fn reflection_is_exact(prior in interior_prior(), kappa in 0.05f64..3.0) {
            let mirror = prior.reflect();
            let a = solve(&prior, kappa).unwrap();
            let b = solve(&mirror, kappa).unwrap();
            prop_assert_eq!(a.payoff, b.payoff);
            prop_assert_eq!(&b, &a.mirrored());
        }
    }
}

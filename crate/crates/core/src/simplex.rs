//! Beliefs over a finite ordered state set and the geometry of the belief
//! simplex: validation, the three-state `(a, z)` chart, barycentric
//! coordinates, and affine independence.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Sum deviation beyond which a probability vector is rejected instead of
/// renormalized.
pub const NORMALIZE_TOL: f64 = 1e-9;
/// Entries down to `-NEGATIVE_SLACK` are treated as rounding and clamped to 0.
pub const NEGATIVE_SLACK: f64 = 1e-12;
/// Slack on the closed inequalities defining the `(a, z)` region.
pub const REGION_SLACK: f64 = 1e-12;
/// Residual threshold for barycentric solves.
pub const BARYCENTRIC_TOL: f64 = 1e-9;
/// Relative singular-value threshold for the affine independence test.
pub const RANK_TOL: f64 = 1e-10;

/// A finite set of states, either scalars (strictly increasing) or vectors of
/// a common dimension (pairwise distinct). Stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    values: Vec<f64>,
    dim: usize,
}

impl StateSpace {
    pub fn scalar(states: &[f64]) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::InvalidStateSpace(format!(
                "need at least 2 states, got {}",
                states.len()
            )));
        }
        if states.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidStateSpace("non-finite state".into()));
        }
        if states.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStateSpace(
                "scalar states must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            values: states.to_vec(),
            dim: 1,
        })
    }

    pub fn vector(states: &[Vec<f64>]) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::InvalidStateSpace(format!(
                "need at least 2 states, got {}",
                states.len()
            )));
        }
        let dim = states[0].len();
        if dim == 0 {
            return Err(Error::InvalidStateSpace("zero-dimensional states".into()));
        }
        let mut values = Vec::with_capacity(dim * states.len());
        for s in states {
            if s.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.len(),
                });
            }
            if s.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidStateSpace("non-finite state".into()));
            }
            values.extend_from_slice(s);
        }
        for i in 0..states.len() {
            for j in (i + 1)..states.len() {
                if states[i] == states[j] {
                    return Err(Error::InvalidStateSpace(format!(
                        "states {i} and {j} coincide"
                    )));
                }
            }
        }
        if dim == 1 {
            let flat: Vec<f64> = values.clone();
            if flat.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidStateSpace(
                    "scalar states must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self { values, dim })
    }

    /// The evenly spaced three-state space `{-1, 0, 1}`.
    pub fn three() -> Self {
        Self {
            values: vec![-1.0, 0.0, 1.0],
            dim: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Dimension `J` of each state.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    /// State values when the space is scalar.
    pub fn scalars(&self) -> Option<&[f64]> {
        (self.dim == 1).then_some(&self.values[..])
    }

    pub fn is_three_state(&self) -> bool {
        self.values == [-1.0, 0.0, 1.0]
    }

    /// Expected state `E_nu theta`, componentwise.
    pub fn mean(&self, probs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (k, p) in probs.iter().enumerate() {
            for (o, s) in out.iter_mut().zip(self.state(k)) {
                *o += p * s;
            }
        }
        out
    }

    /// Expected state for a scalar space. Callers must check `dim() == 1`.
    pub fn scalar_mean(&self, probs: &[f64]) -> f64 {
        debug_assert_eq!(self.dim, 1);
        probs.iter().zip(&self.values).map(|(p, s)| p * s).sum()
    }

    pub(crate) fn check_belief(&self, b: &Belief) -> Result<()> {
        if b.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: b.len(),
            });
        }
        Ok(())
    }
}

/// A probability vector over the states, in state order.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief(Vec<f64>);

impl Belief {
    /// Validates and (if needed) renormalizes a probability vector.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let mut probs = probs;
        if probs.is_empty() {
            return Err(Error::InvalidBelief("empty probability vector".into()));
        }
        for (i, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidBelief(format!("entry {i} is not finite")));
            }
            if *p < 0.0 {
                if *p < -NEGATIVE_SLACK {
                    return Err(Error::InvalidBelief(format!("entry {i} is negative ({p})")));
                }
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        let dev = (sum - 1.0).abs();
        if dev > NORMALIZE_TOL {
            return Err(Error::InvalidBelief(format!("entries sum to {sum}")));
        }
        // leave exact-to-rounding vectors untouched
        if dev > 4.0 * f64::EPSILON {
            probs.iter_mut().for_each(|p| *p /= sum);
        }
        Ok(Self(probs))
    }

    pub fn dirac(len: usize, index: usize) -> Self {
        let mut v = vec![0.0; len];
        v[index] = 1.0;
        Self(v)
    }

    pub fn uniform(len: usize) -> Self {
        Self(vec![1.0 / len as f64; len])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// True when every entry exceeds `tol`.
    pub fn is_interior(&self, tol: f64) -> bool {
        self.0.iter().all(|&p| p > tol)
    }

    pub fn max_abs_diff(&self, other: &Belief) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn euclidean_distance(&self, other: &Belief) -> f64 {
        libm::sqrt(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (a - b) * (a - b))
                .sum(),
        )
    }

    /// Swaps the probabilities of the first and last state.
    pub fn reflect(&self) -> Belief {
        let mut v = self.0.clone();
        let n = v.len();
        v.swap(0, n - 1);
        Belief(v)
    }
}

impl Deref for Belief {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Coordinates of a three-state belief: induced action `a` and the
/// probability `z` of state 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AzPoint {
    pub a: f64,
    pub z: f64,
}

impl AzPoint {
    pub const fn new(a: f64, z: f64) -> Self {
        Self { a, z }
    }

    /// Membership in the closed region `0 <= z <= 1`, `|a| <= 1 - z`.
    pub fn in_region(&self) -> bool {
        self.a.is_finite()
            && self.z.is_finite()
            && self.z >= -REGION_SLACK
            && self.z <= 1.0 + REGION_SLACK
            && self.a.abs() <= 1.0 - self.z + REGION_SLACK
    }

    /// On the left edge `co{(0,1), (-1,0)}` (no mass on state 1).
    pub fn on_left_edge(&self, tol: f64) -> bool {
        self.in_region() && (self.z - (1.0 + self.a)).abs() <= tol && self.a <= tol
    }

    /// On the right edge `co{(0,1), (1,0)}` (no mass on state -1).
    pub fn on_right_edge(&self, tol: f64) -> bool {
        self.in_region() && (self.z - (1.0 - self.a)).abs() <= tol && self.a >= -tol
    }

    /// On the bottom edge `co{(-1,0), (1,0)}` (no mass on state 0).
    pub fn on_bottom_edge(&self, tol: f64) -> bool {
        self.in_region() && self.z.abs() <= tol
    }

    pub fn is_interior(&self, tol: f64) -> bool {
        self.z > tol && self.z < 1.0 - tol && self.a.abs() < 1.0 - self.z - tol
    }

    pub fn reflect(&self) -> AzPoint {
        AzPoint::new(-self.a, self.z)
    }
}

fn require_three(space: &StateSpace) -> Result<()> {
    if space.is_three_state() {
        Ok(())
    } else {
        Err(Error::WrongStateSpace)
    }
}

/// Maps `(a, z)` to `(nu_{-1}, nu_0, nu_1) = ((1-z-a)/2, z, (1-z+a)/2)`.
pub fn belief_from_az(space: &StateSpace, point: AzPoint) -> Result<Belief> {
    require_three(space)?;
    az_to_belief(point)
}

pub(crate) fn az_to_belief(point: AzPoint) -> Result<Belief> {
    if !point.in_region() {
        return Err(Error::OutOfSimplex {
            a: point.a,
            z: point.z,
        });
    }
    let AzPoint { a, z } = point;
    let z = z.clamp(0.0, 1.0);
    let lo = ((1.0 - z - a) / 2.0).max(0.0);
    let hi = ((1.0 - z + a) / 2.0).max(0.0);
    Belief::new(vec![lo, z, hi])
}

pub fn az_from_belief(space: &StateSpace, b: &Belief) -> Result<AzPoint> {
    require_three(space)?;
    space.check_belief(b)?;
    Ok(belief_to_az(b))
}

pub(crate) fn belief_to_az(b: &Belief) -> AzPoint {
    AzPoint::new(b[2] - b[0], b[1])
}

/// Rank test on the difference vectors `v_i - v_1`, with singular values
/// below `RANK_TOL` times the largest one treated as zero.
pub fn affinely_independent(beliefs: &[Belief]) -> bool {
    if beliefs.len() <= 1 {
        return !beliefs.is_empty();
    }
    let k = beliefs[0].len();
    let n = beliefs.len() - 1;
    if n > k || beliefs.iter().any(|b| b.len() != k) {
        return false;
    }
    let diffs = DMatrix::from_fn(k, n, |r, c| beliefs[c + 1][r] - beliefs[0][r]);
    let sv = diffs.svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return false;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * max).count() == n
}

/// Barycentric weights of `b` relative to affinely independent `vertices`.
///
/// Returns `Ok(None)` when `b` lies outside the convex hull, either off the
/// affine hull (residual above `BARYCENTRIC_TOL`) or with a weight below
/// `-BARYCENTRIC_TOL`.
pub fn barycentric(b: &Belief, vertices: &[Belief]) -> Result<Option<Vec<f64>>> {
    if vertices.is_empty() || vertices.len() > b.len() {
        return Err(Error::DegenerateVertices);
    }
    if vertices.iter().any(|v| v.len() != b.len()) {
        return Err(Error::DimensionMismatch {
            expected: b.len(),
            got: vertices
                .iter()
                .map(|v| v.len())
                .find(|&l| l != b.len())
                .unwrap_or(0),
        });
    }
    if !affinely_independent(vertices) {
        return Err(Error::DegenerateVertices);
    }
    let k = b.len();
    let n = vertices.len();
    // rows: the k coordinates plus the sum-to-one row
    let a = DMatrix::from_fn(k + 1, n, |r, c| if r < k { vertices[c][r] } else { 1.0 });
    let rhs = DVector::from_fn(k + 1, |r, _| if r < k { b[r] } else { 1.0 });
    let svd = a.clone().svd(true, true);
    let lambda = match svd.solve(&rhs, 1e-14) {
        Ok(x) => x,
        Err(_) => return Err(Error::DegenerateVertices),
    };
    let residual = (&a * &lambda - &rhs).amax();
    if residual > BARYCENTRIC_TOL || lambda.iter().any(|&l| l < -BARYCENTRIC_TOL) {
        return Ok(None);
    }
    let mut out: Vec<f64> = lambda.iter().map(|&l| l.max(0.0)).collect();
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|l| *l /= sum);
    Ok(Some(out))
}

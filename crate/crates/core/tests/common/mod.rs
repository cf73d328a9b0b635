#![allow(dead_code)]

use attn_core::policy::sort_by_action;
use attn_core::{Belief, InformationPolicy, StateSpace};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed_a77e;

/// Seed from `ATTN_SEED`, falling back to a fixed value.
pub fn seed() -> u64 {
    std::env::var("ATTN_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed());
    r.set_stream(stream);
    r
}

/// Flat Dirichlet draw with every entry at least `floor`.
pub fn belief(rng: &mut ChaCha8Rng, k: usize, floor: f64) -> Belief {
    loop {
        let raw: Vec<f64> = (0..k).map(|_| -rng.gen_range(1e-12f64..1.0).ln()).collect();
        let s: f64 = raw.iter().sum();
        let v: Vec<f64> = raw.iter().map(|x| x / s).collect();
        if v.iter().all(|&x| x >= floor) {
            return Belief::new(v).unwrap();
        }
    }
}

/// Random nonredundant policy on `{-1, 0, 1}` with `n` support points and
/// weights drawn from `[0.05, 1]`; the prior is its mean.
pub fn policy(rng: &mut ChaCha8Rng, n: usize) -> (InformationPolicy, Belief) {
    loop {
        let pts: Vec<Belief> = (0..n).map(|_| belief(rng, 3, 0.0)).collect();
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..=1.0)).collect();
        let s: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / s).collect();
        let mut mean = vec![0.0; 3];
        for (p, wi) in pts.iter().zip(&w) {
            for k in 0..3 {
                mean[k] += wi * p[k];
            }
        }
        let Ok(prior) = Belief::new(mean) else {
            continue;
        };
        let Ok(p) = InformationPolicy::new(pts, w, &prior) else {
            continue;
        };
        if !p.is_nonredundant() {
            continue;
        }
        match sort_by_action(&p, &StateSpace::three()) {
            Ok(o) if !o.has_ties() => return (p, prior),
            _ => continue,
        }
    }
}

/// Largest kappa at which every consecutive pair still satisfies the order
/// condition.
pub fn critical_kappa(p: &InformationPolicy) -> f64 {
    let o = sort_by_action(p, &StateSpace::three()).unwrap();
    let s = o.policy.support();
    (0..s.len() - 1)
        .map(|n| {
            let da = o.actions[n + 1] - o.actions[n];
            let d2: f64 = s[n + 1]
                .iter()
                .zip(s[n].iter())
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            da * da / d2
        })
        .fold(f64::INFINITY, f64::min)
}

/// Kappa in `(lo, hi)`, below the policy's critical value on even draws and
/// above it on odd ones when possible.
pub fn split_kappa(rng: &mut ChaCha8Rng, crit: f64, below: bool, lo: f64, hi: f64) -> f64 {
    let (a, b) = if below && crit > lo {
        (lo, crit.min(hi))
    } else if crit < hi {
        (crit.max(lo), hi)
    } else {
        (lo, hi)
    };
    rng.gen_range(a..b)
}

mod common;

use attn_core::optimal3::{solve, thresholds, Regime};
use attn_core::search::{verify_closed_form, SearchOptions};
use rand::Rng;

#[test]
fn search_confirms_closed_form_on_random_priors() {
    let mut rng = common::rng(5);
    let opts = SearchOptions {
        grid: 40,
        slope_grid: 40,
        ..SearchOptions::default()
    };
    for _ in 0..6 {
        let prior = common::belief(&mut rng, 3, 0.05);
        let t = thresholds(&prior).unwrap();
        for kappa in [
            0.5 * (t.k1 + t.k2),
            0.5 * (t.k2 + t.k3),
            0.5 * (t.k3 + t.k4),
            rng.gen_range(0.55..1.95),
        ] {
            let r = verify_closed_form(&prior, kappa, &opts).unwrap();
            assert!(r.passed(), "prior {prior:?} kappa {kappa}: {r:?}");
        }
    }
}

#[test]
fn regimes_follow_thresholds_and_payoff_decreases() {
    let mut rng = common::rng(6);
    for _ in 0..50 {
        let prior = common::belief(&mut rng, 3, 0.02);
        let t = thresholds(&prior).unwrap();
        assert!(t.k1 < t.k2 && t.k2 < t.k3 && t.k3 < t.k4);
        let mut last = f64::INFINITY;
        let mut seen = Vec::new();
        for i in 0..=120 {
            let kappa = 0.1 + 2.4 * i as f64 / 120.0;
            let out = solve(&prior, kappa).unwrap();
            assert!(out.payoff <= last + 1e-12);
            last = out.payoff;
            if seen.last() != Some(&out.regime) {
                seen.push(out.regime);
            }
        }
        // regimes narrower than a grid step may be skipped
        let widths = [1.0, t.k2 - t.k1, t.k3 - t.k2, t.k4 - t.k3, 1.0];
        let expected: Vec<Regime> = [
            Regime::FullRevelation,
            Regime::Downplaying,
            Regime::SeparatingExaggeration,
            Regime::Exaggeration,
            Regime::NoDisclosure,
        ]
        .into_iter()
        .zip(widths)
        .filter(|&(_, w)| w > 2.4 / 120.0)
        .map(|(r, _)| r)
        .collect();
        assert!(seen
            .iter()
            .all(|r| !expected.contains(r) || seen.contains(r)));
        assert!(
            expected.iter().all(|r| seen.contains(r)),
            "{seen:?} vs {expected:?}"
        );
        let order = |r: &Regime| *r as usize;
        assert!(seen.windows(2).all(|w| order(&w[0]) < order(&w[1])));
    }
}

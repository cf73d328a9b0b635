mod common;

use attn_core::ic::order_ic;
use attn_core::oracle::{best_garbling_lp, ic_via_oracle, Verdict};
use attn_core::policy::is_garbling_feasible;
use attn_core::{Belief, InformationPolicy, QuadraticModel, StateSpace};

#[test]
fn order_check_matches_oracle() {
    let mut rng = common::rng(1);
    let (mut compared, mut near) = (0, 0);
    for n in 0..60 {
        let (p, prior) = common::policy(&mut rng, 2 + n % 2);
        let kappa = common::split_kappa(&mut rng, common::critical_kappa(&p), n % 4 < 2, 0.1, 2.5);
        let m = QuadraticModel::new(StateSpace::three(), prior, kappa).unwrap();
        let order = order_ic(&p, &m).unwrap();
        if order.pairs.iter().any(|c| c.margin().abs() <= 1e-3) {
            near += 1;
            continue;
        }
        let check = ic_via_oracle(&p, &m, 30, None).unwrap();
        let oracle_ic = match check.verdict {
            Verdict::Ic => true,
            Verdict::NotIc => false,
            Verdict::Inconclusive => panic!("inconclusive oracle on instance {n}: {check:?}"),
        };
        assert_eq!(
            order.ic, oracle_ic,
            "instance {n}, kappa {kappa}, policy {p:?}"
        );
        compared += 1;
    }
    assert!(
        compared >= 40,
        "only {compared} clear instances ({near} near-binding)"
    );
}

#[test]
fn full_disclosure_boundary() {
    let prior = Belief::uniform(3);
    let full = InformationPolicy::full_disclosure(&prior).unwrap();
    for (kappa, ic) in [(0.4, true), (0.5, true), (0.6, false)] {
        let m = QuadraticModel::new(StateSpace::three(), prior.clone(), kappa).unwrap();
        assert_eq!(order_ic(&full, &m).unwrap().ic, ic);
        let r = best_garbling_lp(&full, &m, 60).unwrap();
        if ic {
            assert!(r.gap <= 1e-8, "kappa {kappa}: gap {}", r.gap);
        } else {
            assert!(r.gap > 1e-3, "kappa {kappa}: gap {}", r.gap);
        }
    }
}

#[test]
fn best_garbling_is_a_garbling() {
    let mut rng = common::rng(2);
    for n in 0..20 {
        let (p, prior) = common::policy(&mut rng, 3);
        let kappa = common::split_kappa(&mut rng, common::critical_kappa(&p), n % 2 == 0, 0.1, 2.5);
        let m = QuadraticModel::new(StateSpace::three(), prior.clone(), kappa).unwrap();
        let r = best_garbling_lp(&p, &m, 20).unwrap();
        assert!(r.best_garbling.bayes_residual(&prior) <= 1e-9);
        assert!(is_garbling_feasible(&r.best_garbling, &p).unwrap());
        assert!(r.best_value >= r.full_attention_value - 1e-12);
    }
}

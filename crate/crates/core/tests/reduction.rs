mod common;

use attn_core::ic::{order_ic, pairwise_ic_general};
use attn_core::quadratic::{agent_value, choice_distance, psychological_distance};
use attn_core::{QuadraticModel, StateSpace};
use rand::Rng;

#[test]
fn general_path_reproduces_main_model() {
    let mut rng = common::rng(3);
    for _ in 0..200 {
        let (p, prior) = common::policy(&mut rng, 3);
        let kappa = rng.gen_range(0.1..2.5);
        let main = QuadraticModel::new(StateSpace::three(), prior, kappa).unwrap();
        let general = main.to_general();
        assert!(general.is_general());
        let s = p.support();
        for b in s {
            assert!((agent_value(b, &main) - agent_value(b, &general)).abs() <= 1e-12);
        }
        for i in 0..s.len() {
            for j in 0..s.len() {
                let c = (choice_distance(&s[i], &s[j], &main)
                    - choice_distance(&s[i], &s[j], &general))
                .abs();
                let d = (psychological_distance(&s[i], &s[j], &main)
                    - psychological_distance(&s[i], &s[j], &general))
                .abs();
                assert!(c <= 1e-12 && d <= 1e-12);
            }
        }
        let a = order_ic(&p, &main).unwrap();
        let b = pairwise_ic_general(&p, &general).unwrap();
        if a.pairs.iter().all(|c| c.margin().abs() > 1e-12) {
            assert_eq!(b.consecutive_ic, Some(a.ic));
        }
    }
}

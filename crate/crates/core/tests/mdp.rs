mod common;

use mdpsynth::evaluation::{chain_value, md_value};
use mdpsynth::mdp::dot::to_dot;
use mdpsynth::mdp::json::{mdp_from_json, mdp_to_json};
use mdpsynth::mdp::product;
use mdpsynth::values::{objective_value, value_bounds, Backend};
use mdpsynth::{MdStrategy, Objective, StatePredicate, Transducer};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip_is_identity(seed in any::<u64>()) {
        let m = common::random_mdp(seed, 6, &[0, 1, 2]);
        let text = mdp_to_json(&m);
        let back = mdp_from_json(&text).unwrap();
        prop_assert_eq!(back.ids(), m.ids());
        for i in 0..m.len() {
            prop_assert_eq!(back.kind(i), m.kind(i));
            prop_assert_eq!(back.color(i), m.color(i));
            prop_assert_eq!(back.succ(i), m.succ(i));
            prop_assert_eq!(back.probs(i), m.probs(i));
        }
        prop_assert_eq!(mdp_to_json(&back), text);
    }

    #[test]
    fn md_transducer_product_has_the_md_value(seed in any::<u64>()) {
        let m = common::random_mdp(seed, 5, &[1, 2, 3]);
        let choice: Vec<Option<usize>> = (0..m.len()).map(|i| m.is_controller(i).then(|| *m.succ(i).last().unwrap())).collect();
        let sigma = MdStrategy::from_indices(&m, &choice);
        let obj = Objective::Parity([1, 2, 3].into());
        let direct = md_value(&m, &sigma, &obj).unwrap();
        let p = product(&m, &Transducer::from_md(&sigma), 10_000).unwrap();
        let via = chain_value(&p.chain, &obj).unwrap();
        let start = p.index_of(0, m.initial_id()).unwrap();
        prop_assert_eq!(&via.as_exact().unwrap()[start], &direct.as_exact().unwrap()[m.initial()]);
    }

    #[test]
    fn wide_truncation_of_a_finite_mdp_is_exact(seed in any::<u64>()) {
        let m = common::random_mdp(seed, 5, &[0, 1]);
        let obj = Objective::Reach(StatePredicate::color(1));
        let exact = objective_value(&m, &obj, Backend::Exact).unwrap();
        let b = value_bounds(&m, &obj, m.len() + 1, Some(m.len()), Backend::Exact).unwrap();
        for (k, id) in b.ids.iter().enumerate() {
            let (lo, hi) = b.exact(k).unwrap();
            prop_assert_eq!(lo, hi);
            prop_assert_eq!(lo, exact.exact_by_id(id).unwrap());
        }
    }
}

#[test]
fn dot_marks_kinds_and_colors() {
    let m = common::random_mdp(3, 4, &[0, 1]);
    let dot = to_dot(&m);
    let boxes = dot.matches("shape=box").count();
    let circles = dot.matches("shape=circle").count();
    assert_eq!(boxes, m.controller_count());
    assert_eq!(boxes + circles, m.len());
    assert_eq!(dot.matches("\\ncol ").count(), m.len());
}

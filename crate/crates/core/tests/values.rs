mod common;

use mdpsynth::evaluation::{chain_value, md_value, winning_bsccs};
use mdpsynth::rational::ratio;
use mdpsynth::values::{
    chain_reach_exact, is_end_component, mec_decomposition, optimal_reach, parity_value, reach_value, safety_value,
    safety_value_with, Backend, Chain, Mode,
};
use mdpsynth::{MdStrategy, MdpBuilder, Objective, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bellman_consistency(seed in any::<u64>()) {
        let m = common::random_mdp(seed, 6, &[0, 1]);
        let target: Vec<bool> = (0..m.len()).map(|i| m.color(i) == 1).collect();
        for mode in [Mode::Max, Mode::Min] {
            let v = optimal_reach(&m, &target, mode).unwrap().values;
            for i in 0..m.len() {
                if target[i] {
                    prop_assert!(v[i].is_one());
                } else if m.is_controller(i) {
                    let succ = m.succ(i).iter().map(|&j| v[j].clone());
                    let best = match mode {
                        Mode::Max => succ.max(),
                        Mode::Min => succ.min(),
                    };
                    prop_assert_eq!(&v[i], &best.unwrap());
                } else {
                    let avg: Rational = m.succ(i).iter().zip(m.probs(i)).map(|(&j, p)| p * &v[j]).sum();
                    prop_assert_eq!(&v[i], &avg);
                }
            }
        }
    }

    #[test]
    fn safety_complements_min_reach(seed in any::<u64>()) {
        let m = common::random_mdp(seed, 6, &[0, 1]);
        let avoid: Vec<bool> = (0..m.len()).map(|i| m.color(i) == 1).collect();
        let safe = safety_value(&m, &avoid).unwrap();
        let min = optimal_reach(&m, &avoid, Mode::Min).unwrap().values;
        for i in 0..m.len() {
            prop_assert_eq!(&safe.as_exact().unwrap()[i] + &min[i], Rational::one());
        }
    }

    #[test]
    fn float_backend_agrees(seed in any::<u64>()) {
        let m = common::random_mdp(seed, 6, &[0, 1]);
        let target: Vec<bool> = (0..m.len()).map(|i| m.color(i) == 1).collect();
        let exact = reach_value(&m, &target, Mode::Max, Backend::Exact).unwrap();
        let float = reach_value(&m, &target, Mode::Max, Backend::Float).unwrap();
        for i in 0..m.len() {
            prop_assert!((exact.f64(i) - float.f64(i)).abs() <= 1e-6);
        }
        let safe = safety_value_with(&m, &target, Backend::Float).unwrap();
        let safe_exact = safety_value(&m, &target).unwrap();
        for i in 0..m.len() {
            prop_assert!((safe.f64(i) - safe_exact.f64(i)).abs() <= 1e-6);
        }
    }

    #[test]
    fn mecs_are_end_components(seed in any::<u64>()) {
        let m = common::random_mdp(seed, 8, &[0, 1, 2]);
        let mecs = mec_decomposition(&m);
        let mut seen = vec![false; m.len()];
        for mec in &mecs {
            prop_assert!(is_end_component(&m, mec));
            for &i in mec {
                prop_assert!(!seen[i]);
                seen[i] = true;
            }
        }
    }

    #[test]
    fn parity_on_chains_matches_bottom_components(seed in any::<u64>(), n in 2usize..9) {
        let c = common::random_chain(seed, n, &[1, 2, 3]);
        let v = parity_value(&c).unwrap();
        let chain = Chain::of(&c).unwrap();
        let colors = [1u32, 2, 3].into_iter().collect();
        let win = winning_bsccs(&c, &Objective::Parity(colors)).unwrap();
        let direct = chain.reach(&win).unwrap();
        prop_assert_eq!(v.as_exact().unwrap(), &direct[..]);
    }

    #[test]
    fn md_parity_is_reach_of_winning_bsccs(seed in any::<u64>()) {
        let m = common::random_mdp(seed, 5, &[0, 1, 2]);
        let sigma = MdStrategy::from_indices(&m, &(0..m.len()).map(|i| m.is_controller(i).then(|| m.succ(i)[0])).collect::<Vec<_>>());
        let obj = Objective::parity012();
        let v = md_value(&m, &sigma, &obj).unwrap();
        let chain = mdpsynth::mdp::fix_md_total(&m, &sigma).unwrap();
        let win = winning_bsccs(&chain, &obj).unwrap();
        let r = chain_value(&chain, &Objective::Reach(mdpsynth::StatePredicate::states(
            (0..chain.len()).filter(|&i| win[i]).map(|i| chain.id(i).clone()),
        ))).unwrap();
        prop_assert_eq!(v.as_exact().unwrap(), r.as_exact().unwrap());
    }
}

#[test]
fn half_split_chain() {
    let mut b = MdpBuilder::new();
    b.random("s", 0).random("t", 0).random("d", 0);
    b.prob_edge("s", "t", ratio(1, 2)).prob_edge("s", "d", ratio(1, 2));
    b.prob_edge("t", "t", ratio(1, 1)).prob_edge("d", "d", ratio(1, 1));
    b.initial("s");
    let c = b.build().unwrap();
    let t: Vec<bool> = (0..c.len()).map(|i| c.id(i).as_str() == "t").collect();
    let v = chain_reach_exact(&c, &t).unwrap();
    assert_eq!(v[c.index_of(&"s".into()).unwrap()], ratio(1, 2));
}

#[test]
fn buchi_half() {
    let mut b = MdpBuilder::new();
    b.random("s", 1).controller("g", 2).controller("l", 1);
    b.prob_edge("s", "g", ratio(1, 2)).prob_edge("s", "l", ratio(1, 2));
    b.edge("g", "g").edge("l", "l").initial("s");
    let m = b.build().unwrap();
    let v = parity_value(&m).unwrap();
    assert_eq!(v.exact_by_id(&"s".into()).unwrap(), &ratio(1, 2));
}

#[test]
fn target_has_value_one_and_avoided_zero() {
    let m = common::random_mdp(7, 5, &[0, 1]);
    let t: Vec<bool> = (0..m.len()).map(|i| m.color(i) == 1).collect();
    let r = reach_value(&m, &t, Mode::Max, Backend::Exact).unwrap();
    let s = safety_value(&m, &t).unwrap();
    for i in (0..m.len()).filter(|&i| t[i]) {
        assert!(r.as_exact().unwrap()[i].is_one());
        assert!(s.as_exact().unwrap()[i].is_zero());
    }
}

mod common;

use mdpsynth::evaluation::md_value;
use mdpsynth::gallery;
use mdpsynth::rational::ratio;
use mdpsynth::synthesis::{
    argmax_strategy, as_buchi_md, as_parity012_md, as_reach_md, conditioned_mdp, eps_optimal_cobuchi_md,
    eps_optimal_reach_md, is_almost_sure, optimal_parity_md, safe_set, sigma_opt_av, uniform_as_glue, ReachOptions,
};
use mdpsynth::values::{parity_value, safety_value, Chain};
use mdpsynth::{Error, FiniteMdp, MdStrategy, MdpBuilder, Objective, Rational, StatePredicate};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn idx(m: &FiniteMdp, s: &str) -> usize {
    m.index_of(&s.into()).unwrap()
}

fn mask(m: &FiniteMdp, states: &[&str]) -> Vec<bool> {
    (0..m.len()).map(|i| states.contains(&m.id(i).as_str())).collect()
}

/// `s` random: half to the winning loop `t`, half to the losing loop `u`.
fn half_toy() -> FiniteMdp {
    let mut b = MdpBuilder::new();
    b.random("s", 0).controller("t", 2).controller("u", 1);
    b.prob_edge("s", "t", ratio(1, 2)).prob_edge("s", "u", ratio(1, 2));
    b.edge("t", "t").edge("u", "u").initial("s");
    b.build().unwrap()
}

fn all_values_one(m: &FiniteMdp) -> bool {
    parity_value(m).unwrap().as_exact().unwrap().iter().all(|v| v.is_one())
}

#[test]
fn opt_av_prefers_safe_sink_then_smaller_id() {
    let mut b = MdpBuilder::new();
    b.controller("s", 0).controller("good", 0).controller("bad", 1).controller("a", 0).controller("b", 0);
    b.edge("s", "good").edge("s", "bad").edge("good", "good").edge("bad", "bad");
    b.edge("a", "good").edge("a", "b").edge("b", "b");
    b.initial("s");
    let m = b.build().unwrap();
    let avoid = mask(&m, &["bad"]);
    let sigma = sigma_opt_av(&m, &avoid).unwrap();
    assert_eq!(sigma.get(&"s".into()).unwrap().as_str(), "good");
    // Both successors of `a` have value 1; the smaller id wins.
    assert_eq!(sigma.get(&"a".into()).unwrap().as_str(), "b");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn argmax_ignores_positive_scaling(seed in any::<u64>(), num in 1i64..7, den in 1i64..7) {
        let m = common::random_mdp(seed, 6, &[0, 1]);
        let avoid: Vec<bool> = (0..m.len()).map(|i| m.color(i) == 1).collect();
        let v = safety_value(&m, &avoid).unwrap().as_exact().unwrap().to_vec();
        let scaled: Vec<Rational> = v.iter().map(|x| x * ratio(num, den)).collect();
        prop_assert_eq!(argmax_strategy(&m, &v), argmax_strategy(&m, &scaled));
    }

    #[test]
    fn safe_sets_are_nested(seed in any::<u64>()) {
        let m = common::random_mdp(seed, 6, &[0, 1]);
        let all = safe_set(&m, &Rational::zero()).unwrap();
        prop_assert!(all.iter().all(|b| *b));
        let low = safe_set(&m, &ratio(1, 3)).unwrap();
        let high = safe_set(&m, &ratio(2, 3)).unwrap();
        for i in 0..m.len() {
            prop_assert!(!high[i] || low[i]);
        }
    }

    #[test]
    fn optimal_guarantee_is_the_value(seed in any::<u64>()) {
        let m = common::random_mdp(seed, 6, &[0, 1, 2]);
        let r = optimal_parity_md(&m).unwrap();
        let v = parity_value(&m).unwrap();
        let achieved = md_value(&m, &r.strategy, &Objective::parity012()).unwrap();
        for i in 0..m.len() {
            prop_assert_eq!(&r.guarantee[m.id(i)], &v.as_exact().unwrap()[i]);
            prop_assert_eq!(&achieved.as_exact().unwrap()[i], &v.as_exact().unwrap()[i]);
        }
    }

    #[test]
    fn optimal_strategies_preserve_value(seed in any::<u64>()) {
        let m = common::random_mdp(seed, 6, &[0, 1, 2]);
        let r = optimal_parity_md(&m).unwrap();
        let v = parity_value(&m).unwrap().as_exact().unwrap().to_vec();
        let choice = r.strategy.to_indices(&m).unwrap();
        for i in (0..m.len()).filter(|&i| v[i] > Rational::zero()) {
            if m.is_controller(i) {
                prop_assert_eq!(&v[choice[i].unwrap()], &v[i]);
            } else {
                let avg: Rational = m.succ(i).iter().zip(m.probs(i)).map(|(&j, p)| p * &v[j]).sum();
                prop_assert_eq!(&avg, &v[i]);
            }
        }
    }

    #[test]
    fn almost_sure_reach_wins_its_region(seed in any::<u64>()) {
        let m = common::random_mdp(seed, 6, &[0, 1]);
        let target: Vec<bool> = (0..m.len()).map(|i| m.color(i) == 1).collect();
        let r = as_reach_md(&m, &target).unwrap();
        let choice = r.strategy.to_indices(&m).unwrap();
        let full: Vec<Option<usize>> =
            (0..m.len()).map(|i| choice[i].or_else(|| m.is_controller(i).then(|| m.succ(i)[0]))).collect();
        let v = Chain::induced(&m, &full).unwrap().reach(&target).unwrap();
        for i in (0..m.len()).filter(|&i| r.winning[i]) {
            prop_assert!(v[i].is_one());
        }
    }

    #[test]
    fn conditioned_distributions_sum_to_one(seed in any::<u64>()) {
        let m = common::random_mdp(seed, 6, &[0, 1, 2]);
        let v = parity_value(&m).unwrap().as_exact().unwrap().to_vec();
        if v.iter().all(|x| x.is_zero()) {
            return Ok(());
        }
        let c = conditioned_mdp(&m, &Objective::parity012(), &v).unwrap();
        prop_assert!(c.mdp.validate().is_ok());
        for i in (0..c.mdp.len()).filter(|&i| !c.mdp.is_controller(i)) {
            prop_assert!(c.mdp.probs(i).iter().sum::<Rational>().is_one());
        }
    }
}

#[test]
fn conditioned_half_toy() {
    let m = half_toy();
    let v = parity_value(&m).unwrap().as_exact().unwrap().to_vec();
    assert_eq!(v[idx(&m, "s")], ratio(1, 2));
    let c = conditioned_mdp(&m, &Objective::parity012(), &v).unwrap();
    assert!(c.mdp.index_of(&"u".into()).is_none());
    let (s, t) = (idx(&c.mdp, "s"), idx(&c.mdp, "t"));
    assert_eq!(c.mdp.prob(s, t), ratio(1, 1));
}

#[test]
fn conditioning_all_ones_changes_nothing() {
    let mut b = MdpBuilder::new();
    b.random("a", 2).random("b", 0);
    b.prob_edge("a", "b", ratio(1, 3)).prob_edge("a", "a", ratio(2, 3)).prob_edge("b", "a", ratio(1, 1));
    b.initial("a");
    let m = b.build().unwrap();
    let c = conditioned_mdp(&m, &Objective::parity012(), &[Rational::one(), Rational::one()]).unwrap();
    assert_eq!(c.mdp, m);
}

#[test]
fn conditioning_rejects_wrong_values() {
    let m = half_toy();
    let mut v = parity_value(&m).unwrap().as_exact().unwrap().to_vec();
    v[idx(&m, "s")] = ratio(1, 3);
    let err = conditioned_mdp(&m, &Objective::parity012(), &v).unwrap_err();
    assert!(matches!(err, Error::InconsistentValues { .. }), "{err}");
}

#[test]
fn half_toy_optimum_is_half() {
    let m = half_toy();
    let r = optimal_parity_md(&m).unwrap();
    assert_eq!(r.guarantee[&"s".into()], ratio(1, 2));
}

#[test]
fn glue_of_two_components() {
    let mut b = MdpBuilder::new();
    b.controller("a", 2).controller("a2", 1).controller("b", 2).controller("b2", 1);
    b.edge("a", "a").edge("a", "a2").edge("a2", "a");
    b.edge("b", "b2").edge("b", "b").edge("b2", "b");
    b.initial("a");
    let m = b.build().unwrap();
    let mut calls = 0;
    let sigma = uniform_as_glue(&m, &mut |_, i| {
        calls += 1;
        Ok(if i == 0 {
            MdStrategy::from_pairs([("a", "a2"), ("a2", "a")])
        } else {
            MdStrategy::from_pairs([("b", "b"), ("b2", "b")])
        })
    })
    .unwrap();
    // `b` keeps its self-loop, so `b2` is outside its plays and gets a call.
    assert_eq!(calls, 3);
    assert_eq!(sigma.get(&"a".into()).unwrap().as_str(), "a2");
    assert_eq!(sigma.get(&"b".into()).unwrap().as_str(), "b");
    assert!(is_almost_sure(&m, &sigma, &Objective::buchi()).unwrap());
}

#[test]
fn buchi_cycle_feeding_color_two() {
    let mut b = MdpBuilder::new();
    b.controller("x", 1).controller("y", 1).random("z", 1).controller("g", 2);
    b.edge("x", "y").edge("x", "x").edge("y", "z").edge("g", "x");
    b.prob_edge("z", "g", ratio(1, 2)).prob_edge("z", "x", ratio(1, 2));
    b.initial("x");
    let m = b.build().unwrap();
    let sigma = as_buchi_md(&m).unwrap();
    assert_eq!(sigma.get(&"x".into()).unwrap().as_str(), "y");
    assert!(is_almost_sure(&m, &sigma, &Objective::buchi()).unwrap());
}

#[test]
fn almost_sure_constructions_on_random_winning_instances() {
    let (mut buchi, mut p012) = (0, 0);
    for seed in 0..3000u64 {
        let m = common::random_mdp(seed, 5, &[1, 2]);
        if all_values_one(&m) {
            let sigma = as_buchi_md(&m).unwrap();
            assert!(is_almost_sure(&m, &sigma, &Objective::buchi()).unwrap(), "seed {seed}");
            buchi += 1;
        }
        let m = common::random_mdp(seed, 5, &[0, 1, 2]);
        if all_values_one(&m) {
            let sigma = as_parity012_md(&m).unwrap();
            assert!(is_almost_sure(&m, &sigma, &Objective::parity012()).unwrap(), "seed {seed}");
            p012 += 1;
        }
    }
    assert!(buchi >= 20 && p012 >= 20, "only {buchi} Büchi and {p012} parity instances");
}

#[test]
fn almost_sure_needs_value_one() {
    let err = as_buchi_md(&half_toy()).unwrap_err();
    assert!(matches!(err, Error::Precondition { .. }));
}

#[test]
fn gamblers_ruin_reach_is_within_eps() {
    let e = gallery::gamblers_ruin(ratio(3, 5)).unwrap();
    let r =
        eps_optimal_reach_md(e.mdp.as_ref(), &StatePredicate::states(["0"]), &ratio(1, 100), ReachOptions::default())
            .unwrap();
    let g = mdpsynth::rational::to_f64(&r.guarantee[&"1".into()]);
    assert!((g - 2.0 / 3.0).abs() <= 0.01, "guarantee {g}");
    assert!(!r.notes.is_empty());
}

#[test]
fn cobuchi_on_color_zero_is_certain() {
    let mut b = MdpBuilder::new();
    b.controller("a", 0).random("b", 0);
    b.edge("a", "b").edge("a", "a").prob_edge("b", "a", ratio(1, 1)).initial("a");
    let m = b.build().unwrap();
    let r = eps_optimal_cobuchi_md(&m, &ratio(1, 2), ReachOptions::default()).unwrap();
    assert!(r.result.guarantee.values().all(|g| g.is_one()));
    assert!(eps_optimal_cobuchi_md(&m, &ratio(0, 1), ReachOptions::default()).is_err());
}

#[test]
fn finite_reach_is_exact() {
    let m = half_toy();
    let r = eps_optimal_reach_md(&m, &StatePredicate::states(["t"]), &ratio(1, 1), ReachOptions::default()).unwrap();
    assert_eq!(r.guarantee[&"s".into()], ratio(1, 2));
}

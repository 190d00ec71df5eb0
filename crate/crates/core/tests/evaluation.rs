mod common;

use mdpsynth::evaluation::{borel_cantelli_sum, fr_futility, md_value, simulate, Event, FutilityOptions, SimConfig};
use mdpsynth::gallery;
use mdpsynth::mdp::{Strategy, Transducer};
use mdpsynth::rational::{pow2_inv, ratio};
use mdpsynth::{MdStrategy, MdpBuilder, Objective, Rational, StateId, StatePredicate};
use num_traits::{One, Zero};

fn fig2a_config(seed: u64, episodes: u64) -> SimConfig {
    SimConfig {
        horizon: 500,
        episodes,
        seed,
        events: vec![Event::AnchorCycles { anchor: "s:0".into(), target: "t".into(), max_cycles: 4 }],
        track: vec!["t".into()],
    }
}

#[test]
fn simulation_is_reproducible() {
    let e = gallery::fig2a_parity123();
    let sigma = e.strategy("sigma_h").unwrap();
    let a = simulate(e.mdp.as_ref(), sigma, &fig2a_config(9, 2000)).unwrap();
    let b = simulate(e.mdp.as_ref(), sigma, &fig2a_config(9, 2000)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let c = simulate(e.mdp.as_ref(), sigma, &fig2a_config(10, 2000)).unwrap();
    assert_ne!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&c).unwrap());
    assert_eq!(a.event("E_0").unwrap().frequency, 1.0);
    assert!(a.visits[&StateId::new("t")] > 0);
}

#[test]
fn fig3a_sigma_2_rarely_reaches_t() {
    let e = gallery::fig3a_safety();
    let config = SimConfig {
        horizon: 1000,
        episodes: 4_000,
        seed: 5,
        events: vec![Event::Reach { name: "t".into(), target: StatePredicate::states(["t"]) }],
        track: vec![],
    };
    let r = simulate(e.mdp.as_ref(), e.strategy("sigma_2").unwrap(), &config).unwrap();
    let f = r.event("t").unwrap();
    assert!(f.frequency <= 0.25 + 3.0 * f.std_error.max((0.25f64 * 0.75 / 4_000.0).sqrt()));
}

#[test]
fn invalid_strategies_abort_episodes() {
    let e = gallery::fig2a_parity123();
    let bad = Strategy::Md(MdStrategy::from_pairs([("s:0", "r:5")]));
    let config = SimConfig { horizon: 10, episodes: 3, seed: 1, events: vec![], track: vec![] };
    let r = simulate(e.mdp.as_ref(), &bad, &config).unwrap();
    assert_eq!(r.aborted, 3);
    assert!(r.diagnostics[0].contains("r:5"));
}

#[test]
fn md_value_matches_monte_carlo() {
    for seed in [1u64, 2, 3, 4] {
        let m = common::random_mdp(seed, 5, &[0, 1]);
        let choice: Vec<Option<usize>> = (0..m.len()).map(|i| m.is_controller(i).then(|| m.succ(i)[0])).collect();
        let sigma = MdStrategy::from_indices(&m, &choice);
        let target = StatePredicate::Colors([1].into());
        let exact = md_value(&m, &sigma, &Objective::Reach(target.clone())).unwrap();
        let want = exact.f64(m.initial());
        let config = SimConfig {
            horizon: 400,
            episodes: 20_000,
            seed,
            events: vec![Event::Reach { name: "hit".into(), target }],
            track: vec![],
        };
        let r = simulate(&m, &Strategy::Md(sigma), &config).unwrap();
        let f = r.event("hit").unwrap();
        let sd = (want * (1.0 - want) / 20_000.0).sqrt();
        assert!((f.frequency - want).abs() <= 4.0 * sd + 1e-3, "seed {seed}: {} vs {want}", f.frequency);
    }
}

#[test]
fn borel_cantelli_partial_sums_climb_to_the_limit() {
    for (entry, name) in [
        (gallery::fig2a_parity123(), "sigma_h"),
        (gallery::fig3b_cobuchi(), "sigma_h"),
        (gallery::fig3a_safety(), "sigma_3"),
        (gallery::fig2b_buchi(), "sigma_2"),
        (gallery::fig4_one_counter(), "sigma_h"),
    ] {
        let bc = borel_cantelli_sum(&entry, name, 20).unwrap();
        let mut sum = Rational::zero();
        for t in &bc.terms {
            assert!(*t >= Rational::zero());
            sum += t;
            assert!(sum <= bc.limit, "{}/{name}", entry.name);
        }
        assert!(bc.event_sum <= bc.partial_sum);
    }
    let fig4 = borel_cantelli_sum(&gallery::fig4_one_counter(), "sigma_h", 6).unwrap();
    let expect: Vec<Rational> = (0..6).map(pow2_inv).collect();
    assert_eq!(fig4.terms, expect);
    assert!(borel_cantelli_sum(&gallery::fig2a_parity123(), "nope", 3).is_err());
}

#[test]
fn futility_of_single_rungs_on_fig3a() {
    let e = gallery::fig3a_safety();
    for j in 1..=5u32 {
        let md = MdStrategy::from_pairs([("s".to_string(), format!("r:{j}"))]);
        let cert = fr_futility(&e, &Transducer::from_md(&md), FutilityOptions::default()).unwrap();
        assert_eq!(cert.c, pow2_inv(j));
        assert!(cert.conclusion.contains("reached almost surely"));
    }
}

#[test]
fn futility_of_mixed_rungs_on_fig2a() {
    let mut t = Transducer::new(["low", "high"]).unwrap();
    t.on_choice(0, "s:0".into(), vec![("r:0".into(), ratio(1, 2)), ("s:1".into(), ratio(1, 2))]);
    t.on_choice(1, "s:0".into(), vec![("s:1".into(), ratio(1, 1))]);
    t.default_choice(0, vec![(0, ratio(1, 1))]);
    t.default_choice(1, vec![(0, ratio(1, 1))]);
    t.on_update(0, "t".into(), vec![(0, ratio(1, 2)), (1, ratio(1, 2))]);
    let cert = fr_futility(&gallery::fig2a_parity123(), &t, FutilityOptions::default()).unwrap();
    assert!(cert.c >= ratio(1, 2));
    assert_eq!(cert.modes.len(), 2);
}

#[test]
fn futility_on_fig3b_and_unknown_entries() {
    let md = MdStrategy::from_pairs([("s", "r:2")]);
    let t = Transducer::from_md(&md);
    let cert = fr_futility(&gallery::fig3b_cobuchi(), &t, FutilityOptions::default()).unwrap();
    assert_eq!(cert.c, ratio(1, 4));
    assert!(fr_futility(&gallery::fig4_one_counter(), &t, FutilityOptions::default()).is_err());
}

#[test]
fn chain_values_of_two_bottom_components() {
    let mut b = MdpBuilder::new();
    b.random("s", 0).random("even", 2).random("odd", 1);
    b.prob_edge("s", "even", ratio(1, 2)).prob_edge("s", "odd", ratio(1, 2));
    b.prob_edge("even", "even", ratio(1, 1)).prob_edge("odd", "odd", ratio(1, 1));
    b.initial("s");
    let m = b.build().unwrap();
    let v = md_value(&m, &MdStrategy::new(), &Objective::parity012()).unwrap();
    assert_eq!(v.exact_by_id(&"s".into()).unwrap(), &ratio(1, 2));
    let recolored = m.recolor(|_, _| 2);
    let v = md_value(&recolored, &MdStrategy::new(), &Objective::parity012()).unwrap();
    assert!(v.as_exact().unwrap().iter().all(|x| x.is_one()));
}

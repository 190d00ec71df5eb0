//! The twelve acceptance criteria.

use std::collections::BTreeMap;

use mdpsynth::evaluation::{borel_cantelli_sum, fr_futility, md_value, simulate, Event, FutilityOptions, SimConfig};
use mdpsynth::gallery;
use mdpsynth::mdp::Strategy;
use mdpsynth::mdp::{accepts, product, MdpBuilder, Transducer};
use mdpsynth::rational::{self, pow2_inv, ratio};
use mdpsynth::synthesis::{
    conditioned_mdp, eps_optimal_cobuchi_md, nonzero_colors, opt_av_safety, optimal_parity_md, safe_set_from,
    sigma_opt_av, ReachOptions,
};
use mdpsynth::values::{safety_value, value_bounds, Backend};
use mdpsynth::{FiniteMdp, Lasso, MdStrategy, Objective, Rational, StateId, StatePredicate};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::gen::{self, GenParams};
use crate::oracle::{self, Explicit, Goal};

pub type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: mdpsynth::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn fmt(r: &Rational) -> String {
    rational::format(r)
}

/// Random {0,1}-colored instances shared by criteria 7, 8 and 9.
pub fn cobuchi_instances() -> Vec<FiniteMdp> {
    gen::instances(7000, 200, &GenParams::new(6, &[0, 1]))
}

/// 1. Borel–Cantelli limits and partial sums at K = 60.
pub fn borel_cantelli() -> Check {
    let k = 60;
    let tol = pow2_inv(58);
    let mut cases = vec![
        (gallery::fig2a_parity123(), "sigma_h".to_string(), rational::int(2)),
        (gallery::fig3b_cobuchi(), "sigma_h".to_string(), Rational::one()),
    ];
    for n in 1..=10 {
        cases.push((gallery::fig3a_safety(), format!("sigma_{n}"), pow2_inv(n)));
    }
    for (entry, name, limit) in &cases {
        let bc = lib(borel_cantelli_sum(entry, name, k))?;
        ensure(bc.limit == *limit, || format!("{}/{name}: limit {} != {}", entry.name, fmt(&bc.limit), fmt(limit)))?;
        let diff = &bc.limit - &bc.partial_sum;
        ensure(diff >= Rational::zero() && diff <= tol, || {
            format!("{}/{name}: limit - partial = {}", entry.name, fmt(&diff))
        })?;
    }
    Ok(format!("{} series: limits exact, partial sums at K={k} within 2^-58", cases.len()))
}

/// 2. Every "pick r_j" loses surely; sigma_n stays safe with 1 - 2^-n.
pub fn safety_dichotomy() -> Check {
    let entry = gallery::fig3a_safety();
    for j in 1..=10 {
        let Strategy::Md(md) = lib(entry.strategy(&format!("pick_r{j}")))? else {
            return Err(format!("pick_r{j} is not MD"));
        };
        let t = Transducer::from_md(md);
        let prod = lib(product(entry.mdp.as_ref(), &t, 64))?;
        let target: Vec<bool> = prod.pairs.iter().map(|(_, s)| s.as_str() == "t").collect();
        let x = Explicit::of(&prod.chain);
        let v = oracle::chain_reach(&x.rows(&vec![0; x.len()]), &target);
        let init = prod.chain.initial();
        ensure(v[init].is_one(), || format!("pick_r{j}: P(F t) = {}", fmt(&v[init])))?;
    }
    for n in 1..=10u32 {
        let bc = lib(borel_cantelli_sum(&entry, &format!("sigma_{n}"), 60))?;
        let lower = bc.safety_lower_bound.ok_or("no safety bound")?;
        let bound = Rational::one() - pow2_inv(n);
        ensure(lower >= bound, || format!("sigma_{n}: lower bound {} < {}", fmt(&lower), fmt(&bound)))?;
    }
    Ok("pick_r1..10 reach t with probability 1; sigma_1..10 safe with at least 1 - 2^-n".into())
}

/// Twenty transducers on fig2a with memory at most 3.
pub fn fig2a_transducers() -> Vec<Transducer> {
    let mut out = vec![Transducer::from_md(&MdStrategy::from_pairs([("s:0", "r:0")]))];
    let mut rng = gen::rng(3);
    let splits = [ratio(1, 2), ratio(1, 3), ratio(2, 3), ratio(1, 4), ratio(3, 4), ratio(1, 5)];
    let watched = ["s:0", "s:1", "s:2", "r:0", "r:1", "t"];
    while out.len() < 20 {
        let modes = rng.gen_range(1..=3usize);
        let names: Vec<String> = (0..modes).map(|m| format!("m{m}")).collect();
        let mut t = Transducer::new(names).expect("modes");
        for m in 0..modes {
            let p = splits.choose(&mut rng).unwrap().clone();
            t.default_choice(m, vec![(0, p.clone()), (1, Rational::one() - p)]);
            for s in watched {
                if modes > 1 && rng.gen_bool(0.5) {
                    let a = rng.gen_range(0..modes);
                    let b = (a + 1) % modes;
                    let q = splits.choose(&mut rng).unwrap().clone();
                    t.on_update(m, StateId::new(s), vec![(a, q.clone()), (b, Rational::one() - q)]);
                }
            }
            if rng.gen_bool(0.3) {
                t.on_choice(m, StateId::new("s:1"), vec![(StateId::new("r:1"), Rational::one())]);
            }
        }
        out.push(t);
    }
    out
}

/// 3. Finite-memory futility on fig2a.
pub fn fr_futility_suite() -> Check {
    let entry = gallery::fig2a_parity123();
    let opts = FutilityOptions { node_cap: 512 };
    let mut smallest: Option<Rational> = None;
    for (i, t) in fig2a_transducers().iter().enumerate() {
        let cert = lib(fr_futility(&entry, t, opts))?;
        ensure(cert.c > Rational::zero(), || format!("transducer {i}: c = 0"))?;
        ensure(cert.conclusion.contains("value 0"), || format!("transducer {i}: {}", cert.conclusion))?;
        if i == 0 {
            ensure(cert.c.is_one(), || format!("pick r_0: c = {}", fmt(&cert.c)))?;
        }
        if smallest.as_ref().is_none_or(|s| cert.c < *s) {
            smallest = Some(cert.c);
        }
    }
    let c = rational::to_f64(&smallest.unwrap());
    Ok(format!("20 transducers certified, c = 1 for pick r_0, smallest c ≈ {c:.6}"))
}

fn compare(label: &str, i: usize, state: &StateId, got: &Rational, want: &Rational) -> Result<(), String> {
    ensure(got == want, || format!("{label} instance {i}, state {state}: {} != {}", fmt(got), fmt(want)))
}

/// 4. σ_opt-av is uniformly optimal for Safety(Col != 0).
pub fn opt_av_optimality() -> Check {
    let mdps = gen::instances(4000, 200, &GenParams::new(8, &[0, 1]));
    let mut strategies = 0u128;
    for (i, m) in mdps.iter().enumerate() {
        let avoid = nonzero_colors(m);
        let sigma = lib(sigma_opt_av(m, &avoid))?;
        let obj = Objective::Safety(StatePredicate::NotColors([0].into()));
        let achieved = lib(md_value(m, &sigma, &obj))?;
        let values = lib(safety_value(m, &avoid))?;
        let x = Explicit::of(m);
        strategies += x.strategy_count();
        let best = oracle::brute_force(&x, &Goal::Safety(avoid.clone()));
        let (a, v) = (lib(achieved.exact_or_err())?, lib(values.exact_or_err())?);
        for s in 0..m.len() {
            compare("achieved vs value", i, m.id(s), &a[s], &v[s])?;
            compare("value vs brute force", i, m.id(s), &v[s], &best[s])?;
        }
    }
    Ok(format!("200 instances, {strategies} MD strategies enumerated"))
}

/// The MDP of criterion 5: `s` chooses between `a` (value 1/2) and `b`
/// (value 2/3); `g` wins and `l` loses.
pub fn cylinder_mdp() -> FiniteMdp {
    let mut b = MdpBuilder::new();
    b.controller("s", 0).random("a", 0).random("b", 0).controller("g", 2).controller("l", 1);
    b.edge("s", "a").edge("s", "b").edge("g", "g").edge("l", "l");
    b.prob_edge("a", "g", ratio(1, 2)).prob_edge("a", "l", ratio(1, 2));
    b.prob_edge("b", "s", ratio(1, 4)).prob_edge("b", "g", ratio(1, 2)).prob_edge("b", "l", ratio(1, 4));
    b.initial("s").declare_colors([0, 1, 2]);
    b.build().expect("valid")
}

/// 5. Cylinder identity of the conditioned MDP.
pub fn cylinder_identity() -> Check {
    let m = cylinder_mdp();
    let obj = Objective::parity012();
    let synth = lib(optimal_parity_md(&m))?;
    let val: Vec<Rational> = (0..m.len()).map(|i| synth.guarantee[m.id(i)].clone()).collect();
    let cond = lib(conditioned_mdp(&m, &obj, &val))?;
    let star = &cond.mdp;
    for i in (0..star.len()).filter(|&i| !star.is_controller(i)) {
        let sum: Rational = star.probs(i).iter().sum();
        ensure(sum.is_one(), || format!("M* distribution at {} sums to {}", star.id(i), fmt(&sum)))?;
    }
    let choice = lib(synth.strategy.to_indices(&m))?;
    let step = |mdp: &FiniteMdp, i: usize, j: usize| -> Rational {
        if mdp.is_controller(i) {
            let want = synth.strategy.get(mdp.id(i)).and_then(|t| mdp.index_of(t));
            if want == Some(j) {
                Rational::one()
            } else {
                Rational::zero()
            }
        } else {
            mdp.prob(i, j)
        }
    };
    let mut checked = 0;
    // Paths of M under the strategy, extended one state at a time.
    let mut paths: Vec<(Vec<usize>, Rational)> = (0..m.len()).map(|i| (vec![i], Rational::one())).collect();
    for _ in 1..=6 {
        let mut next = Vec::new();
        for (path, p) in &paths {
            let last = *path.last().unwrap();
            let succ: Vec<usize> = match choice[last] {
                Some(t) if m.is_controller(last) => vec![t],
                _ => m.succ(last).to_vec(),
            };
            for j in succ {
                let mut q = path.clone();
                q.push(j);
                next.push((q, p * step(&m, last, j)));
            }
        }
        for (path, p) in &next {
            let (s0, sn) = (path[0], *path.last().unwrap());
            if val[s0].is_zero() {
                continue;
            }
            let ids: Vec<Option<usize>> = path.iter().map(|&i| star.index_of(m.id(i))).collect();
            let p_star = if ids.iter().all(|x| x.is_some()) {
                ids.windows(2).map(|w| step(star, w[0].unwrap(), w[1].unwrap())).product()
            } else {
                Rational::zero()
            };
            let want = p * &val[sn] / &val[s0];
            ensure(p_star == want, || {
                let names: Vec<&str> = path.iter().map(|&i| m.id(i).as_str()).collect();
                format!("cylinder {}: {} != {}", names.join(" "), fmt(&p_star), fmt(&want))
            })?;
            checked += 1;
        }
        paths = next;
    }
    Ok(format!("{checked} cylinders of length 2..7 states agree; M* distributions sum to 1"))
}

fn pipeline(label: &str, seed: u64, colors: &[u32]) -> Result<u128, String> {
    let mdps = gen::instances(seed, 300, &GenParams::new(6, colors));
    let obj = Objective::parity(colors.iter().copied()).map_err(|e| e.to_string())?;
    let mut strategies = 0;
    for (i, m) in mdps.iter().enumerate() {
        let synth = lib(optimal_parity_md(m))?;
        let achieved = lib(md_value(m, &synth.strategy, &obj))?;
        let a = lib(achieved.exact_or_err())?;
        let x = Explicit::of(m);
        strategies += x.strategy_count();
        let best = oracle::brute_force(&x, &Goal::Parity);
        for s in 0..m.len() {
            compare(label, i, m.id(s), &a[s], &best[s])?;
        }
    }
    Ok(strategies)
}

/// 6. The optimal MD pipeline matches MD enumeration.
pub fn optimal_pipeline() -> Check {
    let a = pipeline("parity{0,1,2}", 6000, &[0, 1, 2])?;
    let b = pipeline("buchi", 6500, &[1, 2])?;
    Ok(format!("300 {{0,1,2}} and 300 {{1,2}} instances optimal ({} strategies enumerated)", a + b))
}

/// 7. ε-optimal co-Büchi.
pub fn eps_cobuchi() -> Check {
    let mdps = cobuchi_instances();
    let obj = Objective::cobuchi();
    let mut worst = f64::INFINITY;
    for eps in [ratio(3, 10), ratio(1, 20)] {
        for (i, m) in mdps.iter().enumerate() {
            let r = lib(eps_optimal_cobuchi_md(m, &eps, ReachOptions::default()))?;
            let c = &r.constants;
            let sixth = &eps / rational::int(6);
            ensure(c.eps1 == sixth && c.eps2 == sixth && c.eps3 == sixth, || "constants are not ε/6".into())?;
            ensure(c.k == rational::int(2) / &eps, || format!("k = {}", fmt(&c.k)))?;
            let achieved = lib(md_value(m, &r.result.strategy, &obj))?;
            let a = lib(achieved.exact_or_err())?;
            let best = oracle::brute_force(&Explicit::of(m), &Goal::Parity);
            for s in 0..m.len() {
                let slack = &a[s] - (&best[s] - &eps);
                ensure(slack >= Rational::zero(), || {
                    format!("ε={} instance {i}, state {}: {} < {} - ε", fmt(&eps), m.id(s), fmt(&a[s]), fmt(&best[s]))
                })?;
                worst = worst.min(rational::to_f64(&(&a[s] - &best[s])));
            }
        }
    }
    Ok(format!("ε ∈ {{3/10, 1/20}} on 200 instances; worst achieved - optimum = {worst:.3e}"))
}

/// 8. Runs from Safe_τ2 stay in Safe_τ1 with the lemma's probability.
pub fn safe_two_levels() -> Check {
    let pairs = [(ratio(1, 3), ratio(2, 3)), (ratio(1, 2), ratio(3, 4))];
    ensure((&pairs[0].1 - &pairs[0].0) / (Rational::one() - &pairs[0].0) == ratio(1, 2), || "bound".into())?;
    let mut checked = 0;
    for (i, m) in cobuchi_instances().iter().enumerate() {
        let (sigma, safety) = lib(opt_av_safety(m))?;
        let choice = lib(sigma.to_indices(m))?;
        let x = Explicit::of(m);
        for (t1, t2) in &pairs {
            let low = lib(safe_set_from(&safety, t1))?;
            let high = lib(safe_set_from(&safety, t2))?;
            let outside: Vec<bool> = low.iter().map(|b| !b).collect();
            let stay = oracle::successor_value(&x, &choice, &Goal::Safety(outside));
            let bound = (t2 - t1) / (Rational::one() - t1);
            for s in (0..m.len()).filter(|&s| high[s]) {
                ensure(stay[s] >= bound, || {
                    format!(
                        "instance {i}, state {}: P(G Safe_{}) = {} < {}",
                        m.id(s),
                        fmt(t1),
                        fmt(&stay[s]),
                        fmt(&bound)
                    )
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (state, τ-pair) checks; (1/3, 2/3) bound is 1/2"))
}

/// 9. No strategy stays forever in color-0 states outside Safe_τ.
pub fn return_to_safe() -> Check {
    let mut checked = 0;
    for (i, m) in cobuchi_instances().iter().enumerate() {
        let (_, safety) = lib(opt_av_safety(m))?;
        let x = Explicit::of(m);
        for tau in [ratio(1, 2), ratio(3, 4)] {
            let safe = lib(safe_set_from(&safety, &tau))?;
            let region: Vec<bool> = (0..m.len()).map(|s| m.color(s) == 0 && !safe[s]).collect();
            if !region.iter().any(|b| *b) {
                continue;
            }
            let leave: Vec<bool> = region.iter().map(|b| !b).collect();
            let best = oracle::brute_force(&x, &Goal::Safety(leave));
            for s in (0..m.len()).filter(|&s| region[s]) {
                ensure(best[s].is_zero(), || {
                    format!("instance {i}, τ={}, state {}: {}", fmt(&tau), m.id(s), fmt(&best[s]))
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} region states have maximal staying probability 0"))
}

/// Random lasso over color-named states `c1`, `c2`, `c3`.
pub fn random_lasso(rng: &mut rand_chacha::ChaCha8Rng) -> Lasso {
    let prefix_len = rng.gen_range(0..=5);
    let cycle_len = rng.gen_range(1..=6);
    let mut pick =
        |len: usize| -> Vec<StateId> { (0..len).map(|_| StateId::new(format!("c{}", rng.gen_range(1..=3)))).collect() };
    let prefix = pick(prefix_len);
    let cycle = pick(cycle_len);
    Lasso::new(prefix, cycle).expect("nonempty cycle")
}

/// 10. Parity{1,2,3}, its Rabin and its Streett encodings agree.
pub fn lasso_equivalence() -> Check {
    let mut rng = gen::rng(10);
    let color = |s: &StateId| s.as_str()[1..].parse::<u32>().unwrap_or(0);
    let (parity, rabin, streett) =
        (Objective::Parity([1, 2, 3].into()), Objective::rabin123(), Objective::streett123());
    let mut wins = 0;
    for i in 0..10_000 {
        let l = random_lasso(&mut rng);
        let p = lib(accepts(&l, &parity, color))?;
        let r = lib(accepts(&l, &rabin, color))?;
        let s = lib(accepts(&l, &streett, color))?;
        ensure(p == r && r == s, || format!("lasso {i} {:?}: parity {p}, rabin {r}, streett {s}", l))?;
        wins += p as usize;
    }
    Ok(format!("10000 lassos agree ({wins} accepted)"))
}

/// 11. Gambler's ruin value bounds.
pub fn gamblers_ruin_bounds() -> Check {
    let entry = gallery::gamblers_ruin(ratio(3, 5)).map_err(|e| e.to_string())?;
    let obj = entry.objective.clone();
    let ruin = |i: u32| rational::ratio(2, 3).pow(i as i32);
    let mut prev: Option<BTreeMap<u32, (Rational, Rational)>> = None;
    let mut gap = 0f64;
    for radius in [10, 20, 30, 40] {
        let b = lib(value_bounds(entry.mdp.as_ref(), &obj, radius, None, Backend::Exact))?;
        let mut now = BTreeMap::new();
        for i in 1..=10u32 {
            let pos = b.position(&StateId::from(i as u64)).ok_or(format!("state {i} outside radius {radius}"))?;
            let (lo, hi) = b.exact(pos).ok_or("exact bounds")?;
            let safe = Rational::one() - ruin(i);
            ensure(*lo <= safe && safe <= *hi, || {
                format!("radius {radius}, i={i}: [{}, {}] misses {}", fmt(lo), fmt(hi), fmt(&safe))
            })?;
            if let Some(p) = &prev {
                let (plo, phi) = &p[&i];
                ensure(lo >= plo && hi <= phi, || format!("radius {radius}, i={i}: bounds widened"))?;
            }
            if radius == 40 {
                gap = gap.max(b.gap(pos));
            }
            now.insert(i, (lo.clone(), hi.clone()));
        }
        prev = Some(now);
    }
    ensure(gap <= 1e-4, || {
        format!("bracketing and monotonicity hold, but the radius-40 gap is {gap:.4} > 1e-4: the pessimistic lower bound of a ball truncation stays 0 for Safety{{0}}")
    })?;
    Ok(format!("bracketed with gap {gap:.2e}"))
}

fn fig2a_simulation() -> Result<mdpsynth::evaluation::SimulationReport, String> {
    let entry = gallery::fig2a_parity123();
    let config = SimConfig {
        horizon: 2000,
        episodes: 100_000,
        seed: 42,
        events: vec![Event::AnchorCycles {
            anchor: StateId::indexed("s", 0),
            target: StateId::new("t"),
            max_cycles: 9,
        }],
        track: vec![],
    };
    lib(simulate(entry.mdp.as_ref(), lib(entry.strategy("sigma_h"))?, &config))
}

/// 12. Simulated cycle events of fig2a match 2^-k.
pub fn simulation_calibration() -> Check {
    let a = fig2a_simulation()?;
    let b = fig2a_simulation()?;
    let (ja, jb) = (serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    ensure(ja == jb, || "two runs differ".into())?;
    ensure(a.aborted == 0, || format!("{} episodes aborted", a.aborted))?;
    let n = a.episodes as f64;
    let mut worst = 0f64;
    for k in 0..=8 {
        let e = a.event(&format!("E_{k}")).ok_or("missing event")?;
        let p = 0.5f64.powi(k);
        let se = (p * (1.0 - p) / n).sqrt();
        let dev = (e.frequency - p).abs();
        ensure(dev <= 3.0 * se, || format!("E_{k}: frequency {} vs {p}, 3σ = {}", e.frequency, 3.0 * se))?;
        if se > 0.0 {
            worst = worst.max(dev / se);
        }
    }
    Ok(format!("E_0..E_8 within 3σ (worst {worst:.2}σ); reports identical across runs"))
}

use num_traits::One;

use super::safety::{opt_av_safety, safe_set_from};
use crate::error::{Error, Result};
use crate::evaluation::md_value;
use crate::mdp::{fix_md_from, FiniteMdp, MdStrategy, Objective};
use crate::rational::{ratio, Rational};
use crate::values::parity_value_with;
use crate::values::Backend;

/// Almost-sure reachability: the winning region and an MD strategy that
/// reaches the target with probability one from all of it.
#[derive(Clone, Debug)]
pub struct AsReach {
    pub strategy: MdStrategy,
    pub winning: Vec<bool>,
    /// Attractor layer of each winning state; 0 on the target.
    pub rank: Vec<usize>,
}

/// Layers of the positive attractor of `target` inside `region`, where
/// random states must keep all successors in `region`.
fn attractor(mdp: &FiniteMdp, target: &[bool], region: &[bool]) -> Vec<usize> {
    let n = mdp.len();
    let mut rank = vec![usize::MAX; n];
    for i in 0..n {
        if region[i] && target[i] {
            rank[i] = 0;
        }
    }
    let mut layer = 0;
    loop {
        layer += 1;
        let mut added = Vec::new();
        for i in 0..n {
            if !region[i] || rank[i] != usize::MAX {
                continue;
            }
            let hit = mdp.succ(i).iter().any(|&j| rank[j] < layer);
            let ok = if mdp.is_controller(i) { hit } else { hit && mdp.succ(i).iter().all(|&j| region[j]) };
            if ok {
                added.push(i);
            }
        }
        if added.is_empty() {
            return rank;
        }
        for i in added {
            rank[i] = layer;
        }
    }
}

/// Greatest region from which `target` is reached almost surely, with the
/// attractor-rank strategy on it: controllers move to a successor of
/// smallest rank (ties by smallest id). Elsewhere the smallest successor is
/// used.
pub fn as_reach_md(mdp: &FiniteMdp, target: &[bool]) -> Result<AsReach> {
    let n = mdp.len();
    let mut region = vec![true; n];
    let rank = loop {
        let rank = attractor(mdp, target, &region);
        let next: Vec<bool> = rank.iter().map(|r| *r != usize::MAX).collect();
        if next == region {
            break rank;
        }
        region = next;
    };
    let mut choice = vec![None; n];
    for i in (0..n).filter(|&i| mdp.is_controller(i)) {
        let succ = mdp.succ(i);
        choice[i] = if region[i] {
            if target[i] {
                succ.iter().copied().find(|&j| region[j])
            } else {
                succ.iter().copied().min_by_key(|&j| (rank[j], j))
            }
        } else {
            succ.first().copied()
        };
        if choice[i].is_none() {
            choice[i] = succ.first().copied();
        }
    }
    Ok(AsReach { strategy: MdStrategy::from_indices(mdp, &choice), winning: region, rank })
}

/// Glues per-state almost-sure strategies into one uniform MD strategy.
///
/// States are taken in ascending id order. For the first state `s_i` not yet
/// covered, the oracle is asked for a strategy in the MDP where all earlier
/// choices are fixed; its choices are adopted on the states reachable from
/// `s_i` that are not fixed yet.
pub fn uniform_as_glue(
    mdp: &FiniteMdp,
    oracle: &mut dyn FnMut(&FiniteMdp, usize) -> Result<MdStrategy>,
) -> Result<MdStrategy> {
    let n = mdp.len();
    let mut fixed: Vec<Option<usize>> = vec![None; n];
    let mut covered = vec![false; n];
    for i in 0..n {
        if covered[i] {
            continue;
        }
        let current = mdp.fix_choices(&fixed);
        let sigma = oracle(&current, i)?;
        let chain = fix_md_from(&current, &sigma, &[i])?;
        let reach = chain.reachable_from(&[i]);
        let local = sigma.to_indices(&current)?;
        for j in 0..n {
            if !reach[j] {
                continue;
            }
            covered[j] = true;
            if mdp.is_controller(j) && fixed[j].is_none() {
                fixed[j] = local[j];
            }
        }
    }
    for i in (0..n).filter(|&i| mdp.is_controller(i)) {
        if fixed[i].is_none() {
            fixed[i] = mdp.succ(i).first().copied();
        }
    }
    Ok(MdStrategy::from_indices(mdp, &fixed))
}

fn require_value_one(mdp: &FiniteMdp) -> Result<()> {
    let v = parity_value_with(mdp, Backend::Exact)?;
    let v = v.exact_or_err()?;
    match (0..mdp.len()).find(|&i| !v[i].is_one()) {
        Some(i) => {
            Err(Error::Precondition { state: mdp.id(i).clone(), reason: "state is not almost-surely winning".into() })
        }
        None => Ok(()),
    }
}

fn as_reach_oracle(target: Vec<bool>) -> impl FnMut(&FiniteMdp, usize) -> Result<MdStrategy> {
    move |m: &FiniteMdp, i: usize| {
        let r = as_reach_md(m, &target)?;
        if !r.winning[i] {
            return Err(Error::Precondition {
                state: m.id(i).clone(),
                reason: "target not reachable almost surely".into(),
            });
        }
        Ok(r.strategy)
    }
}

/// Uniform almost-sure Büchi strategy for an MDP in which every state wins
/// almost surely: almost-sure reachability of color 2, glued.
pub fn as_buchi_md(mdp: &FiniteMdp) -> Result<MdStrategy> {
    require_value_one(mdp)?;
    let target: Vec<bool> = (0..mdp.len()).map(|i| mdp.color(i) == 2).collect();
    uniform_as_glue(mdp, &mut as_reach_oracle(target))
}

/// Uniform almost-sure Parity{0,1,2} strategy for an MDP in which every state
/// wins almost surely: `sigma_opt_av` on `Safe_{1/3}`, and elsewhere
/// almost-sure reachability of `Safe_{2/3} ∪ Col=2` in the MDP with the
/// `Safe_{1/3}` choices fixed.
pub fn as_parity012_md(mdp: &FiniteMdp) -> Result<MdStrategy> {
    require_value_one(mdp)?;
    Ok(parity012_parts(mdp)?.strategy)
}

pub(crate) struct Parity012Parts {
    pub strategy: MdStrategy,
    pub safe_low: Vec<bool>,
}

pub(crate) fn parity012_parts(mdp: &FiniteMdp) -> Result<Parity012Parts> {
    let (sigma_av, safety) = opt_av_safety(mdp)?;
    let low = safe_set_from(&safety, &ratio(1, 3))?;
    let high = safe_set_from(&safety, &ratio(2, 3))?;
    let av = sigma_av.to_indices(mdp)?;
    let fixed: Vec<Option<usize>> = (0..mdp.len()).map(|i| if low[i] { av[i] } else { None }).collect();
    let m_prime = mdp.fix_choices(&fixed);
    let target: Vec<bool> = (0..mdp.len()).map(|i| high[i] || mdp.color(i) == 2).collect();
    let hat = uniform_as_glue(&m_prime, &mut as_reach_oracle(target))?;
    let hat = hat.to_indices(&m_prime)?;
    let combined: Vec<Option<usize>> = (0..mdp.len()).map(|i| if low[i] { av[i] } else { hat[i] }).collect();
    Ok(Parity012Parts { strategy: MdStrategy::from_indices(mdp, &combined), safe_low: low })
}

/// Exact check that `sigma` wins `obj` with probability one everywhere.
pub fn is_almost_sure(mdp: &FiniteMdp, sigma: &MdStrategy, obj: &Objective) -> Result<bool> {
    let v = md_value(mdp, sigma, obj)?;
    Ok(v.exact_or_err()?.iter().all(Rational::is_one))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::MdpBuilder;

    #[test]
    fn buchi_keeps_cycle() {
        // a <-> b (color 1), a -> g (color 2) -> a; c can also loop on itself.
        let mut b = MdpBuilder::new();
        b.controller("a", 1).controller("b", 1).controller("g", 2);
        b.edge("a", "b").edge("b", "a").edge("a", "g").edge("g", "a").edge("b", "b");
        let m = b.build().unwrap();
        let sigma = as_buchi_md(&m).unwrap();
        assert!(is_almost_sure(&m, &sigma, &Objective::buchi()).unwrap());
    }

    #[test]
    fn reach_region() {
        let mut b = MdpBuilder::new();
        b.controller("a", 0).random("r", 0).random("t", 0).random("d", 0);
        b.edge("a", "r").edge("a", "t");
        b.prob_edge("r", "t", ratio(1, 2)).prob_edge("r", "d", ratio(1, 2));
        b.prob_edge("t", "t", ratio(1, 1)).prob_edge("d", "d", ratio(1, 1));
        let m = b.build().unwrap();
        let target: Vec<bool> = m.ids().iter().map(|s| s.as_str() == "t").collect();
        let r = as_reach_md(&m, &target).unwrap();
        let a = m.require(&"a".into()).unwrap();
        assert!(r.winning[a]);
        assert!(!r.winning[m.require(&"r".into()).unwrap()]);
        assert_eq!(r.strategy.get(&"a".into()).unwrap().as_str(), "t");
    }

    #[test]
    fn precondition_violation() {
        let mut b = MdpBuilder::new();
        b.controller("a", 1).edge("a", "a");
        assert!(matches!(as_buchi_md(&b.build().unwrap()), Err(Error::Precondition { .. })));
    }
}

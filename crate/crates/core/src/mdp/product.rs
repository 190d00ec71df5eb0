use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::Zero;

use super::{CountableMdp, FiniteMdp, MdStrategy, MdpBuilder, StateId, Successors, Transducer};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Markov chain obtained by resolving the controller choices of `mdp` with
/// `sigma`. Every controller reachable from `sources` under `sigma` must have a
/// choice; other controllers fall back to their smallest successor.
pub fn fix_md_from(mdp: &FiniteMdp, sigma: &MdStrategy, sources: &[usize]) -> Result<FiniteMdp> {
    let mut choice = sigma.to_indices(mdp)?;
    let mut seen = vec![false; mdp.len()];
    let mut stack = sources.to_vec();
    for &s in sources {
        seen[s] = true;
    }
    while let Some(s) = stack.pop() {
        let next: &[usize] = if mdp.is_controller(s) {
            match &choice[s] {
                Some(t) => std::slice::from_ref(t),
                None => return Err(Error::StrategyUndefined(mdp.id(s).clone())),
            }
        } else {
            mdp.succ(s)
        };
        for &t in next {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    for (i, c) in choice.iter_mut().enumerate() {
        if mdp.is_controller(i) && c.is_none() {
            *c = mdp.succ(i).first().copied();
        }
    }
    Ok(mdp.fix_choices(&choice))
}

/// [`fix_md_from`] the initial state.
pub fn fix_md(mdp: &FiniteMdp, sigma: &MdStrategy) -> Result<FiniteMdp> {
    fix_md_from(mdp, sigma, &[mdp.initial()])
}

/// [`fix_md_from`] every state; the strategy must be total on controllers.
pub fn fix_md_total(mdp: &FiniteMdp, sigma: &MdStrategy) -> Result<FiniteMdp> {
    let all: Vec<usize> = (0..mdp.len()).collect();
    fix_md_from(mdp, sigma, &all)
}

/// Reachable part of the product of an MDP with a transducer.
#[derive(Clone, Debug)]
pub struct ProductChain {
    pub chain: FiniteMdp,
    /// `(mode, state)` for each chain index.
    pub pairs: Vec<(usize, StateId)>,
}

impl ProductChain {
    pub fn index_of(&self, mode: usize, s: &StateId) -> Option<usize> {
        self.pairs.iter().position(|(m, t)| *m == mode && t == s)
    }
}

pub fn product_id(t: &Transducer, mode: usize, s: &StateId) -> StateId {
    StateId::new(format!("{}|{}", t.modes()[mode], s))
}

/// One step of the product from `(mode, s)`: the joint distribution over
/// `(mode', s')`.
pub fn product_step(
    mdp: &dyn CountableMdp,
    t: &Transducer,
    mode: usize,
    s: &StateId,
) -> Result<Vec<((usize, StateId), Rational)>> {
    let dist = match mdp.successors(s)? {
        Successors::Random(d) => d,
        Successors::Controller(_) | Successors::Unbounded(_) => t.choice_dist(mode, s, mdp)?,
    };
    let mut out: BTreeMap<(usize, StateId), Rational> = BTreeMap::new();
    for (next, p) in dist {
        for (m2, q) in t.update_dist(mode, &next) {
            *out.entry((m2, next.clone())).or_insert_with(Rational::zero) += &p * q;
        }
    }
    Ok(out.into_iter().collect())
}

/// Explores the product chain from `(m0, initial)`, failing if more than
/// `limit` product states are reachable.
pub fn product(mdp: &dyn CountableMdp, t: &Transducer, limit: usize) -> Result<ProductChain> {
    t.validate()?;
    let start = (t.initial_mode(), mdp.initial());
    let mut seen: HashMap<(usize, StateId), usize> = HashMap::new();
    let mut pairs = vec![start.clone()];
    seen.insert(start.clone(), 0);
    let mut queue = VecDeque::from([start]);
    let mut b = MdpBuilder::new();
    while let Some((m, s)) = queue.pop_front() {
        let from = product_id(t, m, &s);
        b.random(from.clone(), mdp.color(&s)?);
        for ((m2, s2), p) in product_step(mdp, t, m, &s)? {
            b.prob_edge(from.clone(), product_id(t, m2, &s2), p);
            let key = (m2, s2);
            if !seen.contains_key(&key) {
                if seen.len() >= limit {
                    return Err(Error::ExplorationLimit(limit));
                }
                seen.insert(key.clone(), pairs.len());
                pairs.push(key.clone());
                queue.push_back(key);
            }
        }
    }
    b.initial(product_id(t, pairs[0].0, &pairs[0].1)).declare_colors(mdp.colors());
    let chain = b.build()?;
    let mut ordered = vec![(0, StateId::new("")); chain.len()];
    for (m, s) in pairs {
        let i = chain.require(&product_id(t, m, &s))?;
        ordered[i] = (m, s);
    }
    Ok(ProductChain { chain, pairs: ordered })
}

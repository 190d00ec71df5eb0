//! Exact analysis of finite Markov chains.

use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::linear::SparseSystem;
use crate::error::{Error, Result};
use crate::mdp::FiniteMdp;
use crate::rational::Rational;

/// Finite Markov chain as sparse rows.
#[derive(Clone, Debug)]
pub struct Chain {
    pub succ: Vec<Vec<(usize, Rational)>>,
}

impl Chain {
    /// The chain of a finite MDP without controller states.
    pub fn of(chain: &FiniteMdp) -> Result<Self> {
        Chain::induced(chain, &vec![None; chain.len()])
    }

    /// The chain induced on `mdp` by a choice vector; every controller state
    /// needs a choice.
    pub fn induced(mdp: &FiniteMdp, choice: &[Option<usize>]) -> Result<Self> {
        let mut succ = Vec::with_capacity(mdp.len());
        for i in 0..mdp.len() {
            if mdp.is_controller(i) {
                let t = choice[i].ok_or_else(|| crate::Error::StrategyUndefined(mdp.id(i).clone()))?;
                succ.push(vec![(t, Rational::one())]);
            } else {
                succ.push(mdp.succ(i).iter().copied().zip(mdp.probs(i).iter().cloned()).collect());
            }
        }
        Ok(Chain { succ })
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    fn graph(&self) -> DiGraph<(), ()> {
        let mut g = DiGraph::with_capacity(self.len(), 0);
        for _ in 0..self.len() {
            g.add_node(());
        }
        for (i, row) in self.succ.iter().enumerate() {
            for (j, _) in row {
                g.add_edge((i as u32).into(), (*j as u32).into(), ());
            }
        }
        g
    }

    /// States that can reach some marked state.
    pub fn can_reach(&self, target: &[bool]) -> Vec<bool> {
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
        for (i, row) in self.succ.iter().enumerate() {
            for (j, _) in row {
                pred[*j].push(i);
            }
        }
        let mut seen = target.to_vec();
        let mut stack: Vec<usize> = (0..self.len()).filter(|&i| target[i]).collect();
        while let Some(j) = stack.pop() {
            for &i in &pred[j] {
                if !seen[i] {
                    seen[i] = true;
                    stack.push(i);
                }
            }
        }
        seen
    }

    /// Exact probability of eventually visiting a marked state.
    pub fn reach(&self, target: &[bool]) -> Result<Vec<Rational>> {
        let order: Vec<usize> = (0..self.len()).collect();
        self.reach_with_order(target, &order)
    }

    /// [`Chain::reach`] eliminating unknowns in the given order.
    pub fn reach_with_order(&self, target: &[bool], order: &[usize]) -> Result<Vec<Rational>> {
        let live = self.can_reach(target);
        let mut slot = vec![usize::MAX; self.len()];
        let mut vars = Vec::new();
        for &i in order {
            if live[i] && !target[i] {
                slot[i] = vars.len();
                vars.push(i);
            }
        }
        let mut sys = SparseSystem::new(vars.len());
        for (k, &i) in vars.iter().enumerate() {
            sys.add(k, k, Rational::one());
            for (j, p) in &self.succ[i] {
                if target[*j] {
                    sys.add_rhs(k, p.clone());
                } else if live[*j] {
                    sys.add(k, slot[*j], -p.clone());
                }
            }
        }
        let elim: Vec<usize> = (0..vars.len()).collect();
        let x = sys.solve(&elim)?;
        let mut out = vec![Rational::zero(); self.len()];
        for i in 0..self.len() {
            if target[i] {
                out[i] = Rational::one();
            } else if live[i] {
                out[i] = x[slot[i]].clone();
            }
        }
        Ok(out)
    }

    /// Bottom strongly connected components, each sorted, in order of their
    /// smallest state.
    pub fn bsccs(&self) -> Vec<Vec<usize>> {
        let g = self.graph();
        let mut comp = vec![usize::MAX; self.len()];
        let sccs = tarjan_scc(&g);
        for (k, c) in sccs.iter().enumerate() {
            for n in c {
                comp[n.index()] = k;
            }
        }
        let mut out: Vec<Vec<usize>> = sccs
            .iter()
            .enumerate()
            .filter(|(k, c)| c.iter().all(|n| self.succ[n.index()].iter().all(|(j, _)| comp[*j] == *k)))
            .map(|(_, c)| {
                let mut v: Vec<usize> = c.iter().map(|n| n.index()).collect();
                v.sort_unstable();
                v
            })
            .collect();
        out.sort();
        out
    }

    /// Exact probability of visiting a marked state within `horizon` steps.
    pub fn bounded_reach(&self, target: &[bool], horizon: usize) -> Vec<Rational> {
        let mut v: Vec<Rational> = target.iter().map(|&t| if t { Rational::one() } else { Rational::zero() }).collect();
        for _ in 0..horizon {
            v = (0..self.len())
                .map(|i| if target[i] { Rational::one() } else { self.succ[i].iter().map(|(j, p)| p * &v[*j]).sum() })
                .collect();
        }
        v
    }
}

/// Exact hitting probabilities of `target` on a chain without controllers.
pub fn chain_reach_exact(chain: &FiniteMdp, target: &[bool]) -> Result<Vec<Rational>> {
    if !chain.is_chain() {
        return Err(Error::Unsupported("chain_reach_exact on an MDP with controller states".into()));
    }
    Chain::of(chain)?.reach(target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::MdpBuilder;
    use crate::rational::ratio;

    fn fork() -> FiniteMdp {
        let mut b = MdpBuilder::new();
        b.random("s", 0).random("t", 0).random("d", 0);
        b.prob_edge("s", "t", ratio(1, 2)).prob_edge("s", "d", ratio(1, 2));
        b.prob_edge("t", "t", ratio(1, 1)).prob_edge("d", "d", ratio(1, 1));
        b.build().unwrap()
    }

    #[test]
    fn two_armed_chain() {
        let m = fork();
        let t = m.require(&"t".into()).unwrap();
        let mut target = vec![false; 3];
        target[t] = true;
        let v = chain_reach_exact(&m, &target).unwrap();
        assert_eq!(v[m.require(&"s".into()).unwrap()], ratio(1, 2));
        assert_eq!(v[t], ratio(1, 1));
        assert_eq!(Chain::of(&m).unwrap().bsccs().len(), 2);
    }

    #[test]
    fn looping_chain_reaches_surely() {
        let mut b = MdpBuilder::new();
        b.random("a", 0).random("b", 0);
        b.prob_edge("a", "a", ratio(9, 10)).prob_edge("a", "b", ratio(1, 10));
        b.prob_edge("b", "b", ratio(1, 1));
        let m = b.build().unwrap();
        let v = chain_reach_exact(&m, &[false, true]).unwrap();
        assert_eq!(v[0], ratio(1, 1));
    }

    #[test]
    fn rejects_controllers() {
        let mut b = MdpBuilder::new();
        b.controller("c", 0).edge("c", "c");
        assert!(chain_reach_exact(&b.build().unwrap(), &[true]).is_err());
    }
}

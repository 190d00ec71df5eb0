//! Exact analysis of one excursion from an anchor state.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use num_traits::Zero;

use crate::error::Result;
use crate::rational::Rational;
use crate::values::Chain;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Class {
    /// Back at the anchor; the excursion ends here.
    Return,
    /// The fatal state; explored further so that later returns are seen.
    Hit,
    Inner,
}

pub(crate) struct Excursion<N> {
    pub nodes: Vec<N>,
    pub class: Vec<Class>,
    pub chain: Chain,
    /// Nodes left unexpanded because of the node cap.
    pub frontier: Vec<bool>,
}

impl<N: Clone + Eq + Hash> Excursion<N> {
    /// Explores from `start`, expanding it even though it is a return node.
    pub fn explore(
        start: N,
        cap: usize,
        classify: impl Fn(&N) -> Class,
        mut step: impl FnMut(&N) -> Result<Vec<(N, Rational)>>,
    ) -> Result<Self> {
        let mut index: HashMap<N, usize> = HashMap::new();
        // The start stays out of the index so that coming back to it is a
        // separate return node.
        let mut nodes = vec![start];
        let mut succ: Vec<Vec<(usize, Rational)>> = vec![Vec::new()];
        let mut frontier = vec![false];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let n = nodes[i].clone();
            if i > 0 && classify(&n) == Class::Return {
                continue;
            }
            if nodes.len() >= cap {
                frontier[i] = true;
                continue;
            }
            let mut row = Vec::new();
            for (m, p) in step(&n)? {
                let j = match index.get(&m) {
                    Some(&j) => j,
                    None => {
                        let j = nodes.len();
                        index.insert(m.clone(), j);
                        nodes.push(m);
                        succ.push(Vec::new());
                        frontier.push(false);
                        queue.push_back(j);
                        j
                    }
                };
                row.push((j, p));
            }
            succ[i] = row;
        }
        // Unexpanded and return nodes become absorbing.
        for (i, row) in succ.iter_mut().enumerate() {
            if row.is_empty() {
                row.push((i, Rational::from_integer(1.into())));
            }
        }
        let class = nodes.iter().enumerate().map(|(i, n)| if i == 0 { Class::Inner } else { classify(n) }).collect();
        Ok(Excursion { nodes, class, chain: Chain { succ }, frontier })
    }

    fn solve(&self, target: &[bool], reversed: bool) -> Result<Rational> {
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        if reversed {
            order.reverse();
        }
        Ok(self.chain.reach_with_order(target, &order)?.swap_remove(0))
    }

    fn stop_at(&self, class: Class) -> Vec<bool> {
        self.class.iter().map(|c| *c == class).collect()
    }

    /// Probability of hitting the fatal state before returning; unexplored
    /// mass counts as a miss.
    pub fn hit(&self) -> Result<Rational> {
        self.hit_with(false)
    }

    pub fn hit_with(&self, reversed: bool) -> Result<Rational> {
        // Returns are absorbing, so reaching a hit node means it came first.
        self.solve(&self.stop_at(Class::Hit), reversed)
    }

    /// Probability of eventually returning to the anchor.
    pub fn ret(&self) -> Result<Rational> {
        self.solve(&self.stop_at(Class::Return), false)
    }

    /// Probability of reaching an unexpanded node.
    pub fn unexplored(&self) -> Result<Rational> {
        if !self.frontier.iter().any(|f| *f) {
            return Ok(Rational::zero());
        }
        self.solve(&self.frontier, false)
    }

    pub fn returns(&self) -> impl Iterator<Item = &N> {
        self.nodes.iter().zip(&self.class).filter(|(_, c)| **c == Class::Return).map(|(n, _)| n)
    }
}

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{StateId, StateKind};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// An explicit finite MDP.
///
/// States are stored in ascending [`StateId`] order, so index order is also
/// the tie-break order used throughout the crate. Successor lists are sorted
/// by index; for random states `probs(i)` is aligned with `succ(i)`.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteMdp {
    ids: Vec<StateId>,
    kinds: Vec<StateKind>,
    colors: Vec<u32>,
    index: HashMap<StateId, usize>,
    succ: Vec<Vec<usize>>,
    probs: Vec<Vec<Rational>>,
    initial: usize,
    color_set: BTreeSet<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub state: StateId,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, state: &StateId, message: impl Into<String>) {
        self.violations.push(Violation { state: state.clone(), message: message.into() });
    }

    pub fn mentions(&self, state: &str, needle: &str) -> bool {
        self.violations.iter().any(|v| v.state.as_str() == state && v.message.contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("OK");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", v.state, v.message)?;
        }
        Ok(())
    }
}

impl FiniteMdp {
    pub fn builder() -> MdpBuilder {
        MdpBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[StateId] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &StateId {
        &self.ids[i]
    }

    pub fn kind(&self, i: usize) -> StateKind {
        self.kinds[i]
    }

    pub fn is_controller(&self, i: usize) -> bool {
        self.kinds[i] == StateKind::Controller
    }

    pub fn color(&self, i: usize) -> u32 {
        self.colors[i]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color_set(&self) -> &BTreeSet<u32> {
        &self.color_set
    }

    pub fn succ(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    /// Probabilities aligned with `succ(i)`; empty for controller states.
    pub fn probs(&self, i: usize) -> &[Rational] {
        &self.probs[i]
    }

    pub fn prob(&self, from: usize, to: usize) -> Rational {
        match self.succ[from].binary_search(&to) {
            Ok(k) if !self.is_controller(from) => self.probs[from][k].clone(),
            _ => Rational::zero(),
        }
    }

    pub fn index_of(&self, id: &StateId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &StateId) -> Result<usize> {
        self.index_of(id).ok_or_else(|| Error::UnknownState(id.clone()))
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn initial_id(&self) -> &StateId {
        &self.ids[self.initial]
    }

    pub fn controller_count(&self) -> usize {
        self.kinds.iter().filter(|k| **k == StateKind::Controller).count()
    }

    pub fn is_chain(&self) -> bool {
        self.controller_count() == 0
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for i in 0..self.len() {
            let id = &self.ids[i];
            if self.succ[i].is_empty() {
                report.push(id, "no successor");
                continue;
            }
            if !self.color_set.contains(&self.colors[i]) {
                report.push(id, format!("color {} not in declared color set", self.colors[i]));
            }
            if self.is_controller(i) {
                continue;
            }
            let mut sum = Rational::zero();
            for (k, p) in self.probs[i].iter().enumerate() {
                if !p.is_positive() {
                    let to = &self.ids[self.succ[i][k]];
                    report.push(id, format!("probability to {to} is not positive"));
                }
                sum += p;
            }
            if !sum.is_one() {
                report.push(id, format!("distribution sums to {}", rational::format(&sum)));
            }
        }
        report
    }

    /// Indices of states reachable from `from` (including `from`).
    pub fn reachable_from(&self, from: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<usize> = from.to_vec();
        for &s in from {
            seen[s] = true;
        }
        while let Some(s) = stack.pop() {
            for &t in &self.succ[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Replaces each controller state `i` with `choice[i] = Some(t)` by a random
    /// state with a Dirac distribution on `t`.
    pub fn fix_choices(&self, choice: &[Option<usize>]) -> FiniteMdp {
        let mut out = self.clone();
        for (i, c) in choice.iter().enumerate() {
            if let (Some(t), true) = (c, self.is_controller(i)) {
                out.kinds[i] = StateKind::Random;
                out.succ[i] = vec![*t];
                out.probs[i] = vec![Rational::one()];
            }
        }
        out
    }

    /// Makes every marked state a random self-loop.
    pub fn make_absorbing(&self, marked: &[bool]) -> FiniteMdp {
        let mut out = self.clone();
        for i in 0..self.len() {
            if marked[i] {
                out.kinds[i] = StateKind::Random;
                out.succ[i] = vec![i];
                out.probs[i] = vec![Rational::one()];
            }
        }
        out
    }

    pub fn with_initial(&self, initial: usize) -> FiniteMdp {
        let mut out = self.clone();
        out.initial = initial;
        out
    }

    pub fn recolor(&self, color_of: impl Fn(usize, u32) -> u32) -> FiniteMdp {
        let mut out = self.clone();
        for i in 0..self.len() {
            out.colors[i] = color_of(i, self.colors[i]);
        }
        out.color_set = out.colors.iter().copied().chain(self.color_set.iter().copied()).collect();
        out
    }

    /// A builder holding the same states and transitions.
    pub fn to_builder(&self) -> MdpBuilder {
        let mut b = MdpBuilder::default();
        for i in 0..self.len() {
            b.state(self.ids[i].clone(), self.kinds[i], self.colors[i]);
        }
        for i in 0..self.len() {
            for (k, &t) in self.succ[i].iter().enumerate() {
                let p = if self.is_controller(i) { None } else { Some(self.probs[i][k].clone()) };
                b.edges.push((self.ids[i].clone(), self.ids[t].clone(), p));
            }
        }
        b.initial = Some(self.initial_id().clone());
        b.colors = Some(self.color_set.clone());
        b
    }
}

impl fmt::Debug for FiniteMdp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FiniteMdp(initial {}) {{", self.initial_id())?;
        for i in 0..self.len() {
            let kind = if self.is_controller(i) { "C" } else { "R" };
            write!(f, "  {} [{kind} col {}] ->", self.ids[i], self.colors[i])?;
            for (k, &t) in self.succ[i].iter().enumerate() {
                match self.probs[i].get(k) {
                    Some(p) => write!(f, " {}:{}", self.ids[t], rational::format(p))?,
                    None => write!(f, " {}", self.ids[t])?,
                }
            }
            writeln!(f)?;
        }
        write!(f, "}}")
    }
}

/// Incremental construction of a [`FiniteMdp`].
///
/// Parallel random edges to the same successor are merged by adding their
/// probabilities; parallel controller edges collapse. A random edge given
/// without probability is recorded as probability 0 and reported by
/// `validate`.
#[derive(Clone, Debug, Default)]
pub struct MdpBuilder {
    states: Vec<(StateId, StateKind, u32)>,
    edges: Vec<(StateId, StateId, Option<Rational>)>,
    initial: Option<StateId>,
    colors: Option<BTreeSet<u32>>,
}

impl MdpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&mut self, id: impl Into<StateId>, kind: StateKind, color: u32) -> &mut Self {
        self.states.push((id.into(), kind, color));
        self
    }

    pub fn controller(&mut self, id: impl Into<StateId>, color: u32) -> &mut Self {
        self.state(id, StateKind::Controller, color)
    }

    pub fn random(&mut self, id: impl Into<StateId>, color: u32) -> &mut Self {
        self.state(id, StateKind::Random, color)
    }

    pub fn edge(&mut self, from: impl Into<StateId>, to: impl Into<StateId>) -> &mut Self {
        self.edges.push((from.into(), to.into(), None));
        self
    }

    pub fn prob_edge(&mut self, from: impl Into<StateId>, to: impl Into<StateId>, p: Rational) -> &mut Self {
        self.edges.push((from.into(), to.into(), Some(p)));
        self
    }

    pub fn initial(&mut self, id: impl Into<StateId>) -> &mut Self {
        self.initial = Some(id.into());
        self
    }

    pub fn declare_colors(&mut self, colors: impl IntoIterator<Item = u32>) -> &mut Self {
        self.colors = Some(colors.into_iter().collect());
        self
    }

    /// Structural problems that cannot be represented in a [`FiniteMdp`]:
    /// duplicate states, dangling edges, unknown initial state.
    pub fn structural_report(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let mut seen = BTreeSet::new();
        for (id, _, _) in &self.states {
            if !seen.insert(id.clone()) {
                report.push(id, "duplicate state");
            }
        }
        for (from, to, _) in &self.edges {
            if !seen.contains(from) {
                report.push(from, "edge from unknown state");
            } else if !seen.contains(to) {
                report.push(from, format!("successor {to} does not exist"));
            }
        }
        match &self.initial {
            Some(init) if !seen.contains(init) => report.push(init, "initial state does not exist"),
            None if self.states.is_empty() => {
                report.push(&StateId::new(""), "no states");
            }
            _ => {}
        }
        report
    }

    /// Full report: structural problems followed by the MDP-level checks.
    pub fn report(&self) -> ValidationReport {
        let structural = self.structural_report();
        if !structural.is_ok() {
            return structural;
        }
        self.build_unchecked().map(|m| m.validate()).unwrap_or(structural)
    }

    pub fn build(&self) -> Result<FiniteMdp> {
        let report = self.report();
        if !report.is_ok() {
            return Err(Error::InvalidMdp(report));
        }
        self.build_unchecked()
    }

    /// Builds without checking distributions or successor counts. Fails only
    /// on structural problems.
    pub fn build_unchecked(&self) -> Result<FiniteMdp> {
        let structural = self.structural_report();
        if !structural.is_ok() {
            return Err(Error::InvalidMdp(structural));
        }
        let mut order: Vec<usize> = (0..self.states.len()).collect();
        order.sort_by(|&a, &b| self.states[a].0.cmp(&self.states[b].0));
        let ids: Vec<StateId> = order.iter().map(|&k| self.states[k].0.clone()).collect();
        let kinds: Vec<StateKind> = order.iter().map(|&k| self.states[k].1).collect();
        let colors: Vec<u32> = order.iter().map(|&k| self.states[k].2).collect();
        let index: HashMap<StateId, usize> = ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();

        let mut out: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); ids.len()];
        for (from, to, p) in &self.edges {
            let (i, j) = (index[from], index[to]);
            let entry = out[i].entry(j).or_insert_with(Rational::zero);
            if kinds[i] == StateKind::Random {
                if let Some(p) = p {
                    *entry += p;
                }
            }
        }
        let succ: Vec<Vec<usize>> = out.iter().map(|m| m.keys().copied().collect()).collect();
        let probs: Vec<Vec<Rational>> = out
            .into_iter()
            .enumerate()
            .map(|(i, m)| if kinds[i] == StateKind::Random { m.into_values().collect() } else { Vec::new() })
            .collect();
        let initial = match &self.initial {
            Some(id) => index[id],
            None => index[&self.states[0].0],
        };
        let color_set = match &self.colors {
            Some(c) => c.clone(),
            None => colors.iter().copied().collect(),
        };
        Ok(FiniteMdp { ids, kinds, colors, index, succ, probs, initial, color_set })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn single_self_loop_is_ok() {
        let mut b = MdpBuilder::new();
        b.random("a", 0).prob_edge("a", "a", ratio(1, 1));
        assert!(b.build().unwrap().validate().is_ok());
    }

    #[test]
    fn bad_sum_is_reported() {
        let mut b = MdpBuilder::new();
        b.random("r", 0).controller("x", 0).controller("y", 0);
        b.prob_edge("r", "x", ratio(1, 2)).prob_edge("r", "y", ratio(1, 3));
        b.edge("x", "x").edge("y", "y");
        let report = b.report();
        assert!(report.mentions("r", "distribution sums to 5/6"), "{report}");
        assert!(matches!(b.build(), Err(Error::InvalidMdp(_))));
    }

    #[test]
    fn missing_successor_is_reported() {
        let mut b = MdpBuilder::new();
        b.controller("c", 1);
        let m = b.build_unchecked().unwrap();
        assert!(m.validate().mentions("c", "no successor"));
    }

    #[test]
    fn dangling_edge_is_structural() {
        let mut b = MdpBuilder::new();
        b.controller("c", 1).edge("c", "ghost");
        assert!(b.report().mentions("c", "ghost"));
        assert!(b.build_unchecked().is_err());
    }

    #[test]
    fn parallel_random_edges_merge() {
        let mut b = MdpBuilder::new();
        b.random("r", 0).prob_edge("r", "r", ratio(1, 2)).prob_edge("r", "r", ratio(1, 2));
        let m = b.build().unwrap();
        assert_eq!(m.succ(0), &[0]);
        assert_eq!(m.prob(0, 0), ratio(1, 1));
    }

    #[test]
    fn states_sorted_naturally() {
        let mut b = MdpBuilder::new();
        for n in [10u64, 2, 1] {
            b.controller(StateId::indexed("s", n), 0).edge(StateId::indexed("s", n), "s:1");
        }
        b.initial("s:10");
        let m = b.build().unwrap();
        let names: Vec<_> = m.ids().iter().map(|s| s.as_str()).collect();
        assert_eq!(names, ["s:1", "s:2", "s:10"]);
        assert_eq!(m.initial_id().as_str(), "s:10");
        assert_eq!(m.to_builder().build().unwrap(), m);
    }
}

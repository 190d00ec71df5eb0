use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::{CountableMdp, FiniteMdp, StateId};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// How far an unbounded successor enumeration is searched when checking that a
/// named successor exists.
pub const SUCCESSOR_SEARCH_CAP: usize = 1 << 16;

/// Memoryless deterministic strategy.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MdStrategy {
    pub choice: BTreeMap<StateId, StateId>,
}

impl MdStrategy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, A, B>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<StateId>,
        B: Into<StateId>,
    {
        MdStrategy { choice: pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect() }
    }

    pub fn get(&self, s: &StateId) -> Option<&StateId> {
        self.choice.get(s)
    }

    pub fn insert(&mut self, s: StateId, t: StateId) {
        self.choice.insert(s, t);
    }

    pub fn len(&self) -> usize {
        self.choice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choice.is_empty()
    }

    /// Builds the strategy from a choice vector over a finite MDP.
    pub fn from_indices(mdp: &FiniteMdp, choice: &[Option<usize>]) -> Self {
        let mut out = MdStrategy::new();
        for (i, c) in choice.iter().enumerate() {
            if let (Some(t), true) = (c, mdp.is_controller(i)) {
                out.insert(mdp.id(i).clone(), mdp.id(*t).clone());
            }
        }
        out
    }

    /// Choice vector over `mdp`. Entries for states that are absent or not
    /// controllers are ignored; an entry naming a non-successor is an error.
    pub fn to_indices(&self, mdp: &FiniteMdp) -> Result<Vec<Option<usize>>> {
        let mut out = vec![None; mdp.len()];
        for (s, t) in &self.choice {
            let Some(i) = mdp.index_of(s) else { continue };
            if !mdp.is_controller(i) {
                continue;
            }
            let j = mdp
                .index_of(t)
                .filter(|j| mdp.succ(i).binary_search(j).is_ok())
                .ok_or_else(|| Error::StrategyViolation { from: s.clone(), to: t.clone() })?;
            out[i] = Some(j);
        }
        Ok(out)
    }

    /// Checks every entry against the transition relation of `mdp`.
    pub fn check(&self, mdp: &dyn CountableMdp) -> Result<()> {
        for (s, t) in &self.choice {
            if !mdp.successors(s)?.contains(t, SUCCESSOR_SEARCH_CAP) {
                return Err(Error::StrategyViolation { from: s.clone(), to: t.clone() });
            }
        }
        Ok(())
    }
}

/// Finite-memory randomized strategy as a probabilistic transducer.
///
/// From product state `(m, s)` the next state `s'` is drawn from the choice
/// distribution (controller `s`) or from `P(s)` (random `s`); the next mode is
/// then drawn from the update distribution at `(m, s')`. Unlisted updates keep
/// the mode. Unlisted choices fall back to the mode's default, given as
/// positions in the successor enumeration of `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transducer {
    modes: Vec<String>,
    initial: usize,
    update: BTreeMap<(usize, StateId), Vec<(usize, Rational)>>,
    choice: BTreeMap<(usize, StateId), Vec<(StateId, Rational)>>,
    default_choice: Vec<Vec<(usize, Rational)>>,
}

impl Transducer {
    /// A transducer with the given modes, starting in the first one, that
    /// picks the first successor everywhere.
    pub fn new<I, S>(modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let modes: Vec<String> = modes.into_iter().map(Into::into).collect();
        if modes.is_empty() {
            return Err(Error::OutOfRange("transducer needs at least one mode".into()));
        }
        let default_choice = vec![vec![(0, Rational::one())]; modes.len()];
        Ok(Transducer { modes, initial: 0, update: BTreeMap::new(), choice: BTreeMap::new(), default_choice })
    }

    pub fn modes(&self) -> &[String] {
        &self.modes
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn initial_mode(&self) -> usize {
        self.initial
    }

    pub fn mode_index(&self, name: &str) -> Result<usize> {
        self.modes.iter().position(|m| m == name).ok_or_else(|| Error::Parse(format!("unknown mode `{name}`")))
    }

    pub fn set_initial(&mut self, mode: usize) -> &mut Self {
        self.initial = mode;
        self
    }

    pub fn on_update(&mut self, mode: usize, s: StateId, dist: Vec<(usize, Rational)>) -> &mut Self {
        self.update.insert((mode, s), dist);
        self
    }

    pub fn on_choice(&mut self, mode: usize, s: StateId, dist: Vec<(StateId, Rational)>) -> &mut Self {
        self.choice.insert((mode, s), dist);
        self
    }

    pub fn default_choice(&mut self, mode: usize, dist: Vec<(usize, Rational)>) -> &mut Self {
        self.default_choice[mode] = dist;
        self
    }

    pub fn update_dist(&self, mode: usize, s: &StateId) -> Vec<(usize, Rational)> {
        match self.update.get(&(mode, s.clone())) {
            Some(d) => d.clone(),
            None => vec![(mode, Rational::one())],
        }
    }

    /// Modes that can follow `mode` on some state.
    pub fn mode_successors(&self, mode: usize) -> Vec<usize> {
        let mut out = vec![mode];
        for ((m, _), d) in &self.update {
            if *m == mode {
                out.extend(d.iter().map(|(n, _)| *n));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Choice distribution at controller state `s` in `mode`, resolved against
    /// the successor enumeration of `mdp` and checked against it.
    pub fn choice_dist(&self, mode: usize, s: &StateId, mdp: &dyn CountableMdp) -> Result<Vec<(StateId, Rational)>> {
        if let Some(d) = self.choice.get(&(mode, s.clone())) {
            for (t, _) in d {
                if !mdp.successors(s)?.contains(t, SUCCESSOR_SEARCH_CAP) {
                    return Err(Error::StrategyViolation { from: s.clone(), to: t.clone() });
                }
            }
            return Ok(d.clone());
        }
        // Default positions past the last successor fall back to the last one.
        let mut out: Vec<(StateId, Rational)> = Vec::new();
        for (k, p) in &self.default_choice[mode] {
            let (ts, _) = mdp.successors(s)?.targets(k + 1);
            let t = ts
                .into_iter()
                .take(k + 1)
                .next_back()
                .ok_or_else(|| Error::StrategyViolation { from: s.clone(), to: StateId::new(format!("#{k}")) })?;
            match out.iter_mut().find(|(u, _)| *u == t) {
                Some((_, q)) => *q += p,
                None => out.push((t, p.clone())),
            }
        }
        Ok(out)
    }

    /// Checks that every distribution is positive, sums to 1 and names valid
    /// modes.
    pub fn validate(&self) -> Result<()> {
        let n = self.modes.len();
        if self.initial >= n {
            return Err(Error::OutOfRange(format!("initial mode {} out of range", self.initial)));
        }
        let check = |what: String, probs: Vec<&Rational>| -> Result<()> {
            let sum: Rational = probs.iter().copied().sum();
            if probs.iter().any(|p| !p.is_positive()) || !sum.is_one() {
                return Err(Error::OutOfRange(format!(
                    "{what}: distribution must be positive and sum to 1 (sum {})",
                    rational::format(&sum)
                )));
            }
            Ok(())
        };
        for ((m, s), d) in &self.update {
            if *m >= n || d.iter().any(|(k, _)| *k >= n) {
                return Err(Error::OutOfRange(format!("update at ({m}, {s}) names unknown mode")));
            }
            check(format!("update at ({}, {s})", self.modes[*m]), d.iter().map(|x| &x.1).collect())?;
        }
        for ((m, s), d) in &self.choice {
            if *m >= n {
                return Err(Error::OutOfRange(format!("choice at ({m}, {s}) names unknown mode")));
            }
            check(format!("choice at ({}, {s})", self.modes[*m]), d.iter().map(|x| &x.1).collect())?;
        }
        for (m, d) in self.default_choice.iter().enumerate() {
            check(format!("default choice of {}", self.modes[m]), d.iter().map(|x| &x.1).collect())?;
        }
        Ok(())
    }

    /// Deterministic one-mode transducer that follows an MD strategy, with
    /// the first successor elsewhere.
    pub fn from_md(md: &MdStrategy) -> Self {
        let mut t = Transducer::new(["m"]).expect("one mode");
        for (s, c) in &md.choice {
            t.on_choice(0, s.clone(), vec![(c.clone(), Rational::one())]);
        }
        t
    }

    pub(crate) fn parts(
        &self,
    ) -> (
        &BTreeMap<(usize, StateId), Vec<(usize, Rational)>>,
        &BTreeMap<(usize, StateId), Vec<(StateId, Rational)>>,
        &Vec<Vec<(usize, Rational)>>,
    ) {
        (&self.update, &self.choice, &self.default_choice)
    }

    pub(crate) fn from_parts(
        modes: Vec<String>,
        initial: usize,
        update: BTreeMap<(usize, StateId), Vec<(usize, Rational)>>,
        choice: BTreeMap<(usize, StateId), Vec<(StateId, Rational)>>,
        default_choice: Vec<Vec<(usize, Rational)>>,
    ) -> Result<Self> {
        let t = Transducer { modes, initial, update, choice, default_choice };
        if t.default_choice.len() != t.modes.len() {
            return Err(Error::Parse("one default choice per mode expected".into()));
        }
        t.validate()?;
        Ok(t)
    }
}

type CounterRule = dyn Fn(u64, &StateId) -> Option<StateId> + Send + Sync;

/// Deterministic strategy whose only memory is the number of visits to an
/// anchor state so far, counting the current one.
#[derive(Clone)]
pub struct CounterStrategy {
    pub name: String,
    pub anchor: StateId,
    rule: Arc<CounterRule>,
}

impl CounterStrategy {
    pub fn new(
        name: impl Into<String>,
        anchor: StateId,
        rule: impl Fn(u64, &StateId) -> Option<StateId> + Send + Sync + 'static,
    ) -> Self {
        CounterStrategy { name: name.into(), anchor, rule: Arc::new(rule) }
    }

    /// Successor chosen at controller state `s` after `visits` anchor visits.
    pub fn choose(&self, visits: u64, s: &StateId) -> Option<StateId> {
        (self.rule)(visits, s)
    }

    /// The MD strategy obtained by freezing the counter.
    pub fn freeze(&self, visits: u64, states: &[StateId]) -> MdStrategy {
        let mut md = MdStrategy::new();
        for s in states {
            if let Some(t) = self.choose(visits, s) {
                md.insert(s.clone(), t);
            }
        }
        md
    }
}

impl fmt::Debug for CounterStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CounterStrategy({}, anchor {})", self.name, self.anchor)
    }
}

#[derive(Clone, Debug)]
pub enum Strategy {
    Md(MdStrategy),
    Transducer(Transducer),
    Counter(CounterStrategy),
}

impl Strategy {
    pub fn kind(&self) -> &'static str {
        match self {
            Strategy::Md(_) => "md",
            Strategy::Transducer(_) => "transducer",
            Strategy::Counter(_) => "counter",
        }
    }
}

pub fn is_distribution<T>(d: &[(T, Rational)]) -> bool {
    let sum: Rational = d.iter().map(|(_, p)| p).sum();
    sum.is_one() && d.iter().all(|(_, p)| p.is_positive())
}

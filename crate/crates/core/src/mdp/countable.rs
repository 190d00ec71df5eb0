use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::{FiniteMdp, StateId, StateKind};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Outgoing transitions of one state of a countable MDP.
pub enum Successors {
    /// Finitely many controller choices.
    Controller(Vec<StateId>),
    /// Infinitely many controller choices, enumerated lazily in a fixed order.
    Unbounded(Box<dyn Iterator<Item = StateId> + Send>),
    /// A finite-support distribution.
    Random(Vec<(StateId, Rational)>),
}

impl Successors {
    pub fn kind(&self) -> StateKind {
        match self {
            Successors::Random(_) => StateKind::Random,
            _ => StateKind::Controller,
        }
    }

    /// Successor ids, taking at most `cap` from an unbounded enumeration.
    /// The flag reports whether the list was cut.
    pub fn targets(self, cap: usize) -> (Vec<StateId>, bool) {
        match self {
            Successors::Controller(v) => (v, false),
            Successors::Random(v) => (v.into_iter().map(|(t, _)| t).collect(), false),
            Successors::Unbounded(it) => (it.take(cap).collect(), true),
        }
    }

    /// The `k`-th successor in enumeration order.
    pub fn nth(self, k: usize) -> Option<StateId> {
        match self {
            Successors::Controller(v) => v.into_iter().nth(k),
            Successors::Random(v) => v.into_iter().nth(k).map(|(t, _)| t),
            Successors::Unbounded(mut it) => it.nth(k),
        }
    }

    /// Whether `t` is a successor, searching an unbounded enumeration up to
    /// `search_cap` entries.
    pub fn contains(self, t: &StateId, search_cap: usize) -> bool {
        match self {
            Successors::Controller(v) => v.contains(t),
            Successors::Random(v) => v.iter().any(|(u, _)| u == t),
            Successors::Unbounded(it) => it.take(search_cap).any(|u| &u == t),
        }
    }
}

impl fmt::Debug for Successors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Successors::Controller(v) => f.debug_tuple("Controller").field(v).finish(),
            Successors::Unbounded(_) => f.write_str("Unbounded(..)"),
            Successors::Random(v) => f.debug_tuple("Random").field(v).finish(),
        }
    }
}

/// Description of one state: its kind is implied by the successor variant.
#[derive(Debug)]
pub struct StateInfo {
    pub color: u32,
    pub successors: Successors,
}

/// A possibly infinite MDP given by a pure state generator.
pub trait CountableMdp: Send + Sync {
    fn initial(&self) -> StateId;

    /// Finite set of colors the generator may assign.
    fn colors(&self) -> BTreeSet<u32>;

    /// Fails with [`Error::UnknownState`] for ids outside the state space.
    fn describe(&self, s: &StateId) -> Result<StateInfo>;

    fn kind(&self, s: &StateId) -> Result<StateKind> {
        Ok(self.describe(s)?.successors.kind())
    }

    fn color(&self, s: &StateId) -> Result<u32> {
        Ok(self.describe(s)?.color)
    }

    fn successors(&self, s: &StateId) -> Result<Successors> {
        Ok(self.describe(s)?.successors)
    }

    fn contains(&self, s: &StateId) -> bool {
        self.describe(s).is_ok()
    }

    /// The explicit MDP when the state space is finite and materialized.
    fn as_finite(&self) -> Option<&FiniteMdp> {
        None
    }
}

impl CountableMdp for FiniteMdp {
    fn initial(&self) -> StateId {
        self.initial_id().clone()
    }

    fn colors(&self) -> BTreeSet<u32> {
        self.color_set().clone()
    }

    fn describe(&self, s: &StateId) -> Result<StateInfo> {
        let i = self.require(s)?;
        let targets = self.succ(i).iter().map(|&t| self.id(t).clone());
        let successors = if self.is_controller(i) {
            Successors::Controller(targets.collect())
        } else {
            Successors::Random(targets.zip(self.probs(i).iter().cloned()).collect())
        };
        Ok(StateInfo { color: self.color(i), successors })
    }

    fn as_finite(&self) -> Option<&FiniteMdp> {
        Some(self)
    }
}

type Generator = dyn Fn(&StateId) -> Option<StateInfo> + Send + Sync;

/// A countable MDP defined by a closure from state ids to descriptions.
#[derive(Clone)]
pub struct LazyMdp {
    name: String,
    initial: StateId,
    colors: BTreeSet<u32>,
    generator: Arc<Generator>,
}

impl LazyMdp {
    pub fn new(
        name: impl Into<String>,
        initial: StateId,
        colors: impl IntoIterator<Item = u32>,
        generator: impl Fn(&StateId) -> Option<StateInfo> + Send + Sync + 'static,
    ) -> Self {
        LazyMdp { name: name.into(), initial, colors: colors.into_iter().collect(), generator: Arc::new(generator) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for LazyMdp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LazyMdp({}, initial {})", self.name, self.initial)
    }
}

impl CountableMdp for LazyMdp {
    fn initial(&self) -> StateId {
        self.initial.clone()
    }

    fn colors(&self) -> BTreeSet<u32> {
        self.colors.clone()
    }

    fn describe(&self, s: &StateId) -> Result<StateInfo> {
        (self.generator)(s).ok_or_else(|| Error::UnknownState(s.clone()))
    }
}

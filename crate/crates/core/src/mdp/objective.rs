use std::collections::BTreeSet;
use std::fmt;

use super::{FiniteMdp, StateId};
use crate::error::{Error, Result};

/// A decidable set of states, described by ids or by colors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StatePredicate {
    States(BTreeSet<StateId>),
    Colors(BTreeSet<u32>),
    NotColors(BTreeSet<u32>),
    All,
    Empty,
}

impl StatePredicate {
    pub fn states<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<StateId>,
    {
        StatePredicate::States(ids.into_iter().map(Into::into).collect())
    }

    pub fn color(c: u32) -> Self {
        StatePredicate::Colors([c].into())
    }

    pub fn holds(&self, id: &StateId, color: u32) -> bool {
        match self {
            StatePredicate::States(s) => s.contains(id),
            StatePredicate::Colors(c) => c.contains(&color),
            StatePredicate::NotColors(c) => !c.contains(&color),
            StatePredicate::All => true,
            StatePredicate::Empty => false,
        }
    }

    /// Membership vector over the states of a finite MDP.
    pub fn mask(&self, mdp: &FiniteMdp) -> Vec<bool> {
        (0..mdp.len()).map(|i| self.holds(mdp.id(i), mdp.color(i))).collect()
    }
}

impl fmt::Display for StatePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |it: Vec<String>| it.join(",");
        match self {
            StatePredicate::States(s) => {
                write!(f, "{{{}}}", join(s.iter().map(|x| x.to_string()).collect()))
            }
            StatePredicate::Colors(c) => {
                write!(f, "Col∈{{{}}}", join(c.iter().map(|x| x.to_string()).collect()))
            }
            StatePredicate::NotColors(c) => {
                write!(f, "Col∉{{{}}}", join(c.iter().map(|x| x.to_string()).collect()))
            }
            StatePredicate::All => f.write_str("S"),
            StatePredicate::Empty => f.write_str("∅"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Objective {
    Reach(StatePredicate),
    Safety(StatePredicate),
    /// Largest color seen infinitely often is even; the set lists the
    /// colors in play.
    Parity(BTreeSet<u32>),
    /// Some pair `(E, F)` has `Inf ∩ E = ∅` and `Inf ∩ F ≠ ∅`.
    Rabin(Vec<(StatePredicate, StatePredicate)>),
    /// Every pair `(E, F)` with `Inf ∩ E = ∅` also has `Inf ∩ F = ∅`.
    Streett(Vec<(StatePredicate, StatePredicate)>),
}

impl Objective {
    pub fn parity(colors: impl IntoIterator<Item = u32>) -> Result<Self> {
        let set: BTreeSet<u32> = colors.into_iter().collect();
        if set.is_empty() {
            return Err(Error::OutOfRange("parity color set must be nonempty".into()));
        }
        Ok(Objective::Parity(set))
    }

    pub fn buchi() -> Self {
        Objective::Parity([1, 2].into())
    }

    pub fn cobuchi() -> Self {
        Objective::Parity([0, 1].into())
    }

    pub fn parity012() -> Self {
        Objective::Parity([0, 1, 2].into())
    }

    /// `{(Col=3, Col=2)}`, equivalent to Parity{1,2,3}.
    pub fn rabin123() -> Self {
        Objective::Rabin(vec![(StatePredicate::color(3), StatePredicate::color(2))])
    }

    /// `{(Col=2, S), (∅, Col=3)}`, equivalent to Parity{1,2,3}.
    pub fn streett123() -> Self {
        Objective::Streett(vec![
            (StatePredicate::color(2), StatePredicate::All),
            (StatePredicate::Empty, StatePredicate::color(3)),
        ])
    }

    pub fn name(&self) -> &'static str {
        match self {
            Objective::Reach(_) => "reach",
            Objective::Safety(_) => "safety",
            Objective::Parity(_) => "parity",
            Objective::Rabin(_) => "rabin",
            Objective::Streett(_) => "streett",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs = |v: &Vec<(StatePredicate, StatePredicate)>| {
            v.iter().map(|(e, g)| format!("({e}, {g})")).collect::<Vec<_>>().join(", ")
        };
        match self {
            Objective::Reach(t) => write!(f, "Reach({t})"),
            Objective::Safety(t) => write!(f, "Safety({t})"),
            Objective::Parity(c) => {
                write!(f, "Parity{{{}}}", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            }
            Objective::Rabin(v) => write!(f, "Rabin{{{}}}", pairs(v)),
            Objective::Streett(v) => write!(f, "Streett{{{}}}", pairs(v)),
        }
    }
}

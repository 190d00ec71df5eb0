use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{CountableMdp, FiniteMdp, MdpBuilder, Objective, StateId, StatePredicate, Successors};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub const SINK: &str = "#sink";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// The sink loses the objective: values are lower bounds.
    Pessimistic,
    /// The sink wins the objective: values are upper bounds.
    Optimistic,
}

/// Finite BFS ball of a countable MDP with an absorbing boundary sink.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub mdp: FiniteMdp,
    /// Objective rewritten over the truncated state space.
    pub objective: Objective,
    pub sink: StateId,
    pub radius: usize,
    pub boundary: Boundary,
    /// BFS distance from the initial state.
    pub depth: BTreeMap<StateId, usize>,
    /// Whether any transition was redirected to the sink.
    pub cut: bool,
}

impl Truncation {
    /// Retained states other than the sink, in id order.
    pub fn retained(&self) -> impl Iterator<Item = &StateId> {
        self.depth.keys()
    }
}

enum Kept {
    Random(Vec<(StateId, Rational)>),
    /// Successors, and whether an infinite enumeration was cut.
    Controller(Vec<StateId>, bool),
}

fn fresh_color(colors: &BTreeSet<u32>, odd: bool) -> u32 {
    let top = colors.iter().next_back().copied().unwrap_or(0);
    let c = top + 1;
    if (c % 2 == 1) == odd {
        c
    } else {
        c + 1
    }
}

/// Keeps the states within BFS distance `radius` of the initial state.
/// Transitions leaving the ball, and the tail of infinite successor
/// enumerations beyond `branch_cap` entries, go to a fresh absorbing sink.
/// `branch_cap` defaults to `max(radius, 1)`.
pub fn truncate(
    mdp: &dyn CountableMdp,
    objective: &Objective,
    radius: usize,
    boundary: Boundary,
    branch_cap: Option<usize>,
) -> Result<Truncation> {
    let cap = branch_cap.unwrap_or(radius.max(1));
    if cap < 1 {
        return Err(Error::OutOfRange("branch cap must be at least 1".into()));
    }
    if matches!(objective, Objective::Rabin(_) | Objective::Streett(_)) {
        return Err(Error::Unsupported(format!("truncation bounds for {}", objective.name())));
    }

    let mut info: BTreeMap<StateId, (u32, Kept)> = BTreeMap::new();
    let mut depth: BTreeMap<StateId, usize> = BTreeMap::new();
    let init = mdp.initial();
    depth.insert(init.clone(), 0);
    let mut level = vec![init];
    for d in 0..=radius {
        let mut next = BTreeSet::new();
        for s in &level {
            let desc = mdp.describe(s)?;
            let kept = match desc.successors {
                Successors::Random(v) => Kept::Random(v),
                Successors::Controller(v) => Kept::Controller(v, false),
                Successors::Unbounded(it) => Kept::Controller(it.take(cap).collect(), true),
            };
            if d < radius {
                let targets: Vec<&StateId> = match &kept {
                    Kept::Random(v) => v.iter().map(|(t, _)| t).collect(),
                    Kept::Controller(v, _) => v.iter().collect(),
                };
                for t in targets {
                    if !depth.contains_key(t) {
                        next.insert(t.clone());
                    }
                }
            }
            info.insert(s.clone(), (desc.color, kept));
        }
        for t in &next {
            depth.insert(t.clone(), d + 1);
        }
        level = next.into_iter().collect();
        if level.is_empty() {
            break;
        }
    }

    let colors = mdp.colors();
    let sink_color = fresh_color(&colors, boundary == Boundary::Pessimistic);
    let sink = StateId::new(SINK);
    let mut b = MdpBuilder::new();
    b.random(sink.clone(), sink_color).prob_edge(sink.clone(), sink.clone(), Rational::one());
    let mut cut = false;
    for (s, (color, kept)) in info {
        match kept {
            Kept::Random(dist) => {
                b.random(s.clone(), color);
                let mut lost = Rational::zero();
                for (t, p) in dist {
                    if depth.contains_key(&t) {
                        b.prob_edge(s.clone(), t, p);
                    } else {
                        lost += p;
                    }
                }
                if !lost.is_zero() {
                    cut = true;
                    b.prob_edge(s.clone(), sink.clone(), lost);
                }
            }
            Kept::Controller(v, unbounded) => {
                b.controller(s.clone(), color);
                let mut to_sink = unbounded;
                for t in v {
                    if depth.contains_key(&t) {
                        b.edge(s.clone(), t);
                    } else {
                        to_sink = true;
                    }
                }
                if to_sink {
                    cut = true;
                    b.edge(s.clone(), sink.clone());
                }
            }
        }
    }
    let mut declared = colors.clone();
    declared.insert(sink_color);
    b.initial(mdp.initial()).declare_colors(declared);
    let finite = b.build()?;

    let retained_where = |p: &StatePredicate| -> BTreeSet<StateId> {
        depth.keys().filter(|s| p.holds(s, finite.color(finite.index_of(s).unwrap()))).cloned().collect()
    };
    let objective = match objective {
        Objective::Reach(t) => {
            let mut set = retained_where(t);
            if boundary == Boundary::Optimistic {
                set.insert(sink.clone());
            }
            Objective::Reach(StatePredicate::States(set))
        }
        Objective::Safety(t) => {
            let mut set = retained_where(t);
            if boundary == Boundary::Pessimistic {
                set.insert(sink.clone());
            }
            Objective::Safety(StatePredicate::States(set))
        }
        Objective::Parity(c) => {
            let mut c = c.clone();
            c.insert(sink_color);
            Objective::Parity(c)
        }
        _ => unreachable!(),
    };
    Ok(Truncation { mdp: finite, objective, sink, radius, boundary, depth, cut })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_colors() {
        let c: BTreeSet<u32> = [1, 2, 3].into();
        assert_eq!(fresh_color(&c, true), 5);
        assert_eq!(fresh_color(&c, false), 4);
        let c: BTreeSet<u32> = [0, 1].into();
        assert_eq!(fresh_color(&c, true), 3);
        assert_eq!(fresh_color(&c, false), 2);
    }

    #[test]
    fn radius_zero_keeps_initial_and_sink() {
        let mut b = MdpBuilder::new();
        b.controller("a", 0).controller("b", 0).edge("a", "b").edge("b", "a");
        let m = b.build().unwrap();
        let t = truncate(&m, &Objective::Reach(StatePredicate::states(["b"])), 0, Boundary::Pessimistic, None).unwrap();
        assert_eq!(t.mdp.len(), 2);
        assert!(t.cut);
        assert!(t.mdp.validate().is_ok());
    }

    #[test]
    fn zero_branch_cap_rejected() {
        let mut b = MdpBuilder::new();
        b.controller("a", 0).edge("a", "a");
        let m = b.build().unwrap();
        let r = truncate(&m, &Objective::buchi(), 2, Boundary::Optimistic, Some(0));
        assert!(matches!(r, Err(Error::OutOfRange(_))));
    }
}

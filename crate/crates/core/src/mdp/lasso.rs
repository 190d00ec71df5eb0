use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{CountableMdp, Objective, StateId, StatePredicate, SUCCESSOR_SEARCH_CAP};
use crate::error::{Error, Result};

/// Ultimately periodic play `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lasso {
    pub prefix: Vec<StateId>,
    pub cycle: Vec<StateId>,
}

impl Lasso {
    pub fn new(prefix: Vec<StateId>, cycle: Vec<StateId>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidLasso("cycle must be nonempty".into()));
        }
        Ok(Lasso { prefix, cycle })
    }

    /// Rotates the cycle left by `k`, moving the skipped states into the prefix
    /// so the play stays the same.
    pub fn rotate(&self, k: usize) -> Lasso {
        let n = self.cycle.len();
        let k = k % n;
        let mut prefix = self.prefix.clone();
        prefix.extend_from_slice(&self.cycle[..k]);
        let mut cycle = self.cycle[k..].to_vec();
        cycle.extend_from_slice(&self.cycle[..k]);
        Lasso { prefix, cycle }
    }

    /// Repeats the cycle `k ≥ 1` times.
    pub fn pump(&self, k: usize) -> Lasso {
        let cycle = self.cycle.iter().cloned().cycle().take(self.cycle.len() * k.max(1)).collect();
        Lasso { prefix: self.prefix.clone(), cycle }
    }

    /// Consecutive pairs of the play, including the seam and the wrap-around.
    pub fn edges(&self) -> Vec<(&StateId, &StateId)> {
        let all: Vec<&StateId> = self.prefix.iter().chain(self.cycle.iter()).collect();
        let mut out: Vec<_> = all.windows(2).map(|w| (w[0], w[1])).collect();
        out.push((self.cycle.last().unwrap(), &self.cycle[0]));
        out
    }

    /// Checks every step against the transition relation of `mdp`.
    pub fn check(&self, mdp: &dyn CountableMdp) -> Result<()> {
        if self.cycle.is_empty() {
            return Err(Error::InvalidLasso("cycle must be nonempty".into()));
        }
        for (a, b) in self.edges() {
            let succ = mdp.successors(a)?;
            if !succ.contains(b, SUCCESSOR_SEARCH_CAP) {
                return Err(Error::InvalidLasso(format!("{a} -> {b} is not a transition")));
            }
        }
        Ok(())
    }
}

/// Decides whether the play described by `lasso` satisfies `obj`.
pub fn accepts(lasso: &Lasso, obj: &Objective, color_of: impl Fn(&StateId) -> u32) -> Result<bool> {
    if lasso.cycle.is_empty() {
        return Err(Error::InvalidLasso("cycle must be nonempty".into()));
    }
    let inf: BTreeSet<&StateId> = lasso.cycle.iter().collect();
    let hits = |p: &StatePredicate| inf.iter().any(|s| p.holds(s, color_of(s)));
    let ever = |p: &StatePredicate| lasso.prefix.iter().chain(lasso.cycle.iter()).any(|s| p.holds(s, color_of(s)));
    Ok(match obj {
        Objective::Reach(t) => ever(t),
        Objective::Safety(t) => !ever(t),
        Objective::Parity(_) => {
            let top = inf.iter().map(|s| color_of(s)).max().unwrap();
            top % 2 == 0
        }
        Objective::Rabin(pairs) => pairs.iter().any(|(e, f)| !hits(e) && hits(f)),
        Objective::Streett(pairs) => pairs.iter().all(|(e, f)| hits(e) || !hits(f)),
    })
}

/// [`accepts`] after checking the lasso against the transition relation.
pub fn accepts_in(lasso: &Lasso, obj: &Objective, mdp: &dyn CountableMdp) -> Result<bool> {
    lasso.check(mdp)?;
    let mut colors = std::collections::HashMap::new();
    for s in lasso.prefix.iter().chain(lasso.cycle.iter()) {
        colors.insert(s.clone(), mdp.color(s)?);
    }
    accepts(lasso, obj, |s| colors[s])
}

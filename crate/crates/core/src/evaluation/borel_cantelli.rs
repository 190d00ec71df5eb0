//! Borel–Cantelli sums of the counter strategies in the gallery.

use num_traits::{One, Zero};
use serde::Serialize;

use super::excursion::{Class, Excursion};
use crate::error::{Error, Result};
use crate::gallery::GalleryEntry;
use crate::mdp::{CounterStrategy, Objective, StateId, Successors, SUCCESSOR_SEARCH_CAP};
use crate::rational::{self, pow2_inv, Rational};

const NODE_CAP: usize = 200_000;

#[derive(Clone, Debug, Serialize)]
pub struct BorelCantelli {
    pub entry: String,
    pub strategy: String,
    /// Index of the first cycle event.
    pub first_index: u64,
    /// Probability of the fatal event in each cycle, given that the cycle
    /// starts.
    #[serde(with = "rational::serde_str_vec")]
    pub terms: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub partial_sum: Rational,
    /// Closed form of the full series.
    #[serde(with = "rational::serde_str")]
    pub limit: Rational,
    /// Unconditional probability of the fatal event in each cycle.
    #[serde(with = "rational::serde_str_vec")]
    pub event_probabilities: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub event_sum: Rational,
    /// For safety objectives, a lower bound on the strategy's value.
    #[serde(with = "rational::serde_str_opt")]
    pub safety_lower_bound: Option<Rational>,
}

/// First cycle index and closed-form limit for a known counter strategy.
fn series_shape(entry: &str, strategy: &str) -> Result<(u64, Rational)> {
    let n = strategy.strip_prefix("sigma_").and_then(|n| n.parse::<u32>().ok());
    match (entry, strategy) {
        ("fig2a" | "fig4", "sigma_h") => Ok((0, Rational::from_integer(2.into()))),
        ("fig3b", "sigma_h") => Ok((1, Rational::one())),
        ("fig3a" | "fig2b", _) if n.is_some() => Ok((1, pow2_inv(n.unwrap()))),
        _ => Err(Error::Unsupported(format!("no Borel–Cantelli series for {entry}/{strategy}"))),
    }
}

/// Hit and return probabilities of the excursion that starts with the
/// `visits`-th anchor visit.
fn cycle(
    entry: &GalleryEntry,
    counter: &CounterStrategy,
    fatal: &StateId,
    visits: u64,
) -> Result<(Rational, Rational)> {
    let mdp = entry.mdp.as_ref();
    let anchor = counter.anchor.clone();
    let ex = Excursion::explore(
        anchor.clone(),
        NODE_CAP,
        |s| {
            if *s == anchor {
                Class::Return
            } else if s == fatal {
                Class::Hit
            } else {
                Class::Inner
            }
        },
        |s| match mdp.successors(s)? {
            Successors::Random(d) => Ok(d),
            succ => {
                let t = match counter.choose(visits, s) {
                    Some(t) => t,
                    None => match mdp.successors(s)?.targets(2) {
                        (ts, _) if ts.len() == 1 => ts[0].clone(),
                        _ => return Err(Error::StrategyUndefined(s.clone())),
                    },
                };
                if !succ.contains(&t, SUCCESSOR_SEARCH_CAP) {
                    return Err(Error::StrategyViolation { from: s.clone(), to: t });
                }
                Ok(vec![(t, Rational::one())])
            }
        },
    )?;
    if !ex.unexplored()?.is_zero() {
        return Err(Error::ExplorationLimit(NODE_CAP));
    }
    Ok((ex.hit()?, ex.ret()?))
}

/// Computes the first `cycles` terms of the series exactly, from the
/// excursion of each cycle.
pub fn borel_cantelli_sum(entry: &GalleryEntry, strategy: &str, cycles: usize) -> Result<BorelCantelli> {
    let (first_index, limit) = series_shape(&entry.name, strategy)?;
    let counter = entry.counter(strategy)?;
    let (_, fatal) = entry.anchor.clone().ok_or_else(|| Error::Unsupported(format!("{} has no anchor", entry.name)))?;
    let mut terms = Vec::with_capacity(cycles);
    let mut events = Vec::with_capacity(cycles);
    let mut alive = Rational::one();
    for j in 0..cycles {
        let (hit, ret) = cycle(entry, counter, &fatal, j as u64 + 1)?;
        events.push(&alive * &hit);
        alive *= ret;
        terms.push(hit);
    }
    let partial_sum: Rational = terms.iter().sum();
    let event_sum: Rational = events.iter().sum();
    // Later events have probability at most their terms.
    let safety_lower_bound =
        matches!(entry.objective, Objective::Safety(_)).then(|| Rational::one() - &event_sum - (&limit - &partial_sum));
    Ok(BorelCantelli {
        entry: entry.name.clone(),
        strategy: strategy.into(),
        first_index,
        terms,
        partial_sum,
        limit,
        event_probabilities: events,
        event_sum,
        safety_lower_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn fig2a_terms_halve() {
        let bc = borel_cantelli_sum(&gallery::fig2a_parity123(), "sigma_h", 5).unwrap();
        let expect: Vec<Rational> = (0..5).map(pow2_inv).collect();
        assert_eq!(bc.terms, expect);
        assert_eq!(bc.event_probabilities, expect);
    }

    #[test]
    fn fig3a_events_are_conditional() {
        let bc = borel_cantelli_sum(&gallery::fig3a_safety(), "sigma_1", 2).unwrap();
        assert_eq!(bc.terms, vec![pow2_inv(2), pow2_inv(3)]);
        assert_eq!(bc.event_probabilities, vec![pow2_inv(2), rational::ratio(3, 32)]);
    }

    #[test]
    fn unknown_series() {
        assert!(borel_cantelli_sum(&gallery::fig3a_safety(), "pick_r1", 3).is_err());
    }
}

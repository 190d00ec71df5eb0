use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::almost_sure::{as_buchi_md, parity012_parts};
use super::conditioned::conditioned_mdp;
use super::SynthesisResult;
use crate::error::{Error, Result};
use crate::evaluation::md_value;
use crate::mdp::{truncate, Boundary, CountableMdp, FiniteMdp, MdStrategy, Objective, StatePredicate};
use crate::rational::{self, Rational};
use crate::values::{optimal_reach, parity_value_with, value_bounds, Backend, Mode};

/// Optimal MD strategy for Parity{0,1,2} or Büchi on a finite MDP, through
/// the conditioned MDP and the almost-sure constructions. The result is
/// checked by exact evaluation.
pub fn optimal_parity_md(mdp: &FiniteMdp) -> Result<SynthesisResult> {
    let colors = mdp.color_set();
    let buchi = colors.iter().all(|c| *c == 1 || *c == 2);
    if !buchi && colors.iter().any(|c| *c > 2) {
        return Err(Error::Unsupported("optimal MD synthesis needs colors within {0,1,2}".into()));
    }
    let obj = Objective::Parity(colors.clone());
    let values = parity_value_with(mdp, Backend::Exact)?;
    let values = values.exact_or_err()?.to_vec();
    let mut choice: Vec<Option<usize>> = vec![None; mdp.len()];
    let mut trace = BTreeMap::new();
    let positive = values.iter().any(|v| v.is_positive());
    if positive {
        let cond = conditioned_mdp(mdp, &obj, &values)?;
        let (sigma, low) = if buchi {
            (as_buchi_md(&cond.mdp)?, vec![false; cond.mdp.len()])
        } else {
            let parts = parity012_parts(&cond.mdp)?;
            (parts.strategy, parts.safe_low)
        };
        let local = sigma.to_indices(&cond.mdp)?;
        for k in 0..cond.mdp.len() {
            let i = cond.origin[k];
            if let Some(t) = local[k] {
                choice[i] = mdp.index_of(cond.mdp.id(t));
            }
            let how = if buchi {
                "conditioned MDP: almost-sure reachability of color 2"
            } else if low[k] {
                "conditioned MDP: optimal-avoiding safety inside Safe_1/3"
            } else {
                "conditioned MDP: almost-sure reachability of Safe_2/3 or color 2"
            };
            trace.insert(mdp.id(i).clone(), how.to_string());
        }
    }
    for i in (0..mdp.len()).filter(|&i| mdp.is_controller(i)) {
        if choice[i].is_none() {
            choice[i] = mdp.succ(i).first().copied();
            trace.insert(mdp.id(i).clone(), "value 0: smallest successor".into());
        }
    }
    let strategy = MdStrategy::from_indices(mdp, &choice);
    let achieved = md_value(mdp, &strategy, &obj)?;
    let achieved = achieved.exact_or_err()?;
    if let Some(i) = (0..mdp.len()).find(|&i| achieved[i] != values[i]) {
        return Err(Error::Internal(format!(
            "strategy attains {} instead of {} at {}",
            rational::format(&achieved[i]),
            rational::format(&values[i]),
            mdp.id(i)
        )));
    }
    let guarantee = (0..mdp.len()).map(|i| (mdp.id(i).clone(), values[i].clone())).collect();
    Ok(SynthesisResult { strategy, guarantee, trace, notes: Vec::new() })
}

/// Search limits for the countable case.
#[derive(Clone, Copy, Debug)]
pub struct ReachOptions {
    pub start_radius: usize,
    pub max_radius: usize,
    pub branch_cap: Option<usize>,
}

impl Default for ReachOptions {
    fn default() -> Self {
        ReachOptions { start_radius: 4, max_radius: 256, branch_cap: None }
    }
}

/// ε-optimal MD strategy for reaching `target`.
///
/// Finite input: an exactly optimal strategy. Countable input: the radius is
/// doubled until the truncation bounds at the initial state are within `eps`;
/// the strategy is optimal on the pessimistic truncation and picks the first
/// successor elsewhere, and the guarantee is the pessimistic lower bound.
/// Without controller states the gap may never close; the lower bound at the
/// largest radius is returned instead of an error.
pub fn eps_optimal_reach_md(
    mdp: &dyn CountableMdp,
    target: &StatePredicate,
    eps: &Rational,
    opts: ReachOptions,
) -> Result<SynthesisResult> {
    if !eps.is_positive() {
        return Err(Error::OutOfRange("epsilon must be positive".into()));
    }
    if let Some(m) = mdp.as_finite() {
        let sol = optimal_reach(m, &target.mask(m), Mode::Max)?;
        let mut r = finish(m, &sol.values, &sol.choice, "optimal reachability");
        r.notes.push("finite input: strategy is optimal".into());
        return Ok(r);
    }
    let obj = Objective::Reach(target.clone());
    let init = mdp.initial();
    let eps_f = rational::to_f64(eps);
    let mut radius = opts.start_radius.max(1);
    let mut last_gap = f64::INFINITY;
    loop {
        let b = value_bounds(mdp, &obj, radius, opts.branch_cap, Backend::Exact)?;
        let i = b.position(&init).expect("initial state retained");
        last_gap = b.gap(i).min(last_gap);
        let t = truncate(mdp, &obj, radius, Boundary::Pessimistic, opts.branch_cap)?;
        let Objective::Reach(tt) = &t.objective else { unreachable!() };
        let sol = optimal_reach(&t.mdp, &tt.mask(&t.mdp), Mode::Max)?;
        let choice_free = t.mdp.controller_count() == 0;
        if b.gap(i) <= eps_f || (choice_free && radius >= opts.max_radius) {
            let mut r = finish(&t.mdp, &sol.values, &sol.choice, "optimal on pessimistic truncation");
            r.guarantee.remove(&t.sink);
            r.strategy.choice.retain(|s, _| s != &t.sink);
            r.strategy.choice.retain(|_, c| c != &t.sink);
            r.notes.push(format!("truncation radius {radius}, gap {:.3e} at {init}", b.gap(i)));
            r.notes.push("countable input: choices outside the truncation are unconstrained".into());
            if choice_free {
                r.notes.push("no controller states: every strategy is optimal, guarantee is the lower bound".into());
            }
            return Ok(r);
        }
        if radius >= opts.max_radius {
            return Err(Error::RadiusCapReached { radius, gap: last_gap });
        }
        radius = (radius * 2).min(opts.max_radius);
    }
}

fn finish(m: &FiniteMdp, values: &[Rational], choice: &[Option<usize>], how: &str) -> SynthesisResult {
    let strategy = MdStrategy::from_indices(m, choice);
    let guarantee = (0..m.len()).map(|i| (m.id(i).clone(), values[i].clone())).collect();
    let trace = (0..m.len())
        .filter(|&i| m.is_controller(i))
        .map(|i| {
            let note = if values[i].is_zero() { "value 0" } else { how };
            (m.id(i).clone(), note.to_string())
        })
        .collect();
    SynthesisResult { strategy, guarantee, trace, notes: Vec::new() }
}

use std::collections::BTreeMap;

use num_traits::{One, Signed};

use super::optimal::ReachOptions;
use super::safety::{opt_av_safety, safe_set_from};
use super::SynthesisResult;
use crate::error::{Error, Result};
use crate::evaluation::md_value;
use crate::mdp::{truncate, Boundary, CountableMdp, FiniteMdp, MdStrategy, Objective, StateId};
use crate::rational::{self, int, Rational};
use crate::values::{optimal_reach, value_bounds, Backend, Mode};

/// Slack budget of the co-Büchi construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoBuchiConstants {
    pub eps: Rational,
    pub eps1: Rational,
    pub eps2: Rational,
    pub eps3: Rational,
    pub k: Rational,
    pub tau1: Rational,
    pub tau2: Rational,
}

impl CoBuchiConstants {
    pub fn new(eps: &Rational) -> Result<Self> {
        if !eps.is_positive() || eps > &Rational::one() {
            return Err(Error::OutOfRange(format!("epsilon {} outside (0, 1]", rational::format(eps))));
        }
        let sixth = eps / int(6);
        let k = int(2) / eps;
        Ok(CoBuchiConstants {
            eps: eps.clone(),
            eps1: sixth.clone(),
            eps2: sixth.clone(),
            eps3: sixth.clone(),
            tau1: Rational::one() - &sixth,
            tau2: Rational::one() - &sixth / &k,
            k,
        })
    }
}

#[derive(Clone, Debug)]
pub struct CoBuchiResult {
    /// `guarantee` holds the exact value of the strategy on the (truncated)
    /// MDP it was built on.
    pub result: SynthesisResult,
    pub constants: CoBuchiConstants,
    /// `P(reach Safe_τ2) · (1 − 1/k)`, the bound the construction certifies.
    pub certified: BTreeMap<StateId, Rational>,
    /// Truncation radius used for countable input.
    pub radius: Option<usize>,
}

/// ε-optimal MD strategy for co-Büchi (colors {0,1}).
///
/// `sigma_opt_av` is fixed on `Safe_τ1`; elsewhere an optimal strategy for
/// reaching `Safe_τ2` in the resulting MDP is used. Countable input is first
/// truncated pessimistically at a radius where the value gap at the initial
/// state is at most ε/6.
pub fn eps_optimal_cobuchi_md(mdp: &dyn CountableMdp, eps: &Rational, opts: ReachOptions) -> Result<CoBuchiResult> {
    let constants = CoBuchiConstants::new(eps)?;
    if mdp.colors().iter().any(|c| *c > 1) {
        return Err(Error::Unsupported("co-Büchi synthesis needs colors within {0,1}".into()));
    }
    if let Some(m) = mdp.as_finite() {
        return build(m, constants, None, None);
    }
    let obj = Objective::cobuchi();
    let budget = rational::to_f64(&constants.eps1);
    let init = mdp.initial();
    let mut radius = opts.start_radius.max(1);
    let mut best_gap = f64::INFINITY;
    loop {
        let b = value_bounds(mdp, &obj, radius, opts.branch_cap, Backend::Exact)?;
        let gap = b.gap(b.position(&init).expect("initial state retained"));
        best_gap = best_gap.min(gap);
        if gap <= budget {
            let t = truncate(mdp, &obj, radius, Boundary::Pessimistic, opts.branch_cap)?;
            return build(&t.mdp, constants, Some(radius), Some(&t.sink));
        }
        if radius >= opts.max_radius {
            return Err(Error::RadiusCapReached { radius, gap: best_gap });
        }
        radius = (radius * 2).min(opts.max_radius);
    }
}

fn build(
    m: &FiniteMdp,
    constants: CoBuchiConstants,
    radius: Option<usize>,
    sink: Option<&StateId>,
) -> Result<CoBuchiResult> {
    let (sigma_av, safety) = opt_av_safety(m)?;
    let high = safe_set_from(&safety, &constants.tau1)?;
    let top = safe_set_from(&safety, &constants.tau2)?;
    let av = sigma_av.to_indices(m)?;
    let fixed: Vec<Option<usize>> = (0..m.len()).map(|i| if high[i] { av[i] } else { None }).collect();
    let m_prime = m.fix_choices(&fixed);
    let reach = optimal_reach(&m_prime, &top, Mode::Max)?;
    let choice: Vec<Option<usize>> = (0..m.len()).map(|i| if high[i] { av[i] } else { reach.choice[i] }).collect();
    let strategy = MdStrategy::from_indices(m, &choice);
    let achieved = md_value(m, &strategy, &Objective::Parity(m.color_set().clone()))?;
    let achieved = achieved.exact_or_err()?;
    let factor = Rational::one() - Rational::one() / &constants.k;
    let keep = |i: usize| sink != Some(m.id(i));
    let mut result = SynthesisResult::default();
    let mut certified = BTreeMap::new();
    for i in (0..m.len()).filter(|&i| keep(i)) {
        let id = m.id(i).clone();
        result.guarantee.insert(id.clone(), achieved[i].clone());
        certified.insert(id.clone(), &reach.values[i] * &factor);
        if m.is_controller(i) {
            let how = if high[i] {
                "optimal-avoiding safety inside Safe_tau1"
            } else {
                "optimal reachability of Safe_tau2 with Safe_tau1 fixed"
            };
            result.trace.insert(id, how.to_string());
        }
    }
    result.strategy = strategy;
    if let Some(s) = sink {
        result.strategy.choice.retain(|a, b| a != s && b != s);
        result.notes.push(format!("pessimistic truncation at radius {}", radius.unwrap_or(0)));
    }
    Ok(CoBuchiResult { result, constants, certified, radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn constants_follow_epsilon() {
        let c = CoBuchiConstants::new(&ratio(3, 10)).unwrap();
        assert_eq!(c.eps1, ratio(1, 20));
        assert_eq!(c.eps2, ratio(1, 20));
        assert_eq!(c.eps3, ratio(1, 20));
        assert_eq!(c.k, ratio(20, 3));
        assert_eq!(c.tau1, ratio(19, 20));
        assert_eq!(c.tau2, ratio(397, 400));
        assert!(CoBuchiConstants::new(&ratio(0, 1)).is_err());
        assert!(CoBuchiConstants::new(&ratio(3, 2)).is_err());
    }
}

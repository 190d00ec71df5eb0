use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::mdp::{FiniteMdp, MdStrategy};
use crate::rational::{self, Rational};
use crate::values::{safety_value_with, Backend, Chain};

/// Picks, at every controller state, a successor of largest value; ties go to
/// the smallest state id.
pub fn argmax_strategy(mdp: &FiniteMdp, values: &[Rational]) -> MdStrategy {
    let mut choice = vec![None; mdp.len()];
    for i in (0..mdp.len()).filter(|&i| mdp.is_controller(i)) {
        choice[i] = mdp.succ(i).iter().copied().reduce(|a, b| if values[b] > values[a] { b } else { a });
    }
    MdStrategy::from_indices(mdp, &choice)
}

/// The optimal-avoiding safety strategy: move to a successor of maximal
/// safety value.
pub fn sigma_opt_av(mdp: &FiniteMdp, avoid: &[bool]) -> Result<MdStrategy> {
    let v = safety_value_with(mdp, avoid, Backend::Exact)?;
    Ok(argmax_strategy(mdp, v.exact_or_err()?))
}

/// Mask of states with a nonzero color.
pub fn nonzero_colors(mdp: &FiniteMdp) -> Vec<bool> {
    (0..mdp.len()).map(|i| mdp.color(i) != 0).collect()
}

/// Probability, per state, of staying in color-0 states forever under
/// `sigma_opt_av`.
pub fn opt_av_safety(mdp: &FiniteMdp) -> Result<(MdStrategy, Vec<Rational>)> {
    let avoid = nonzero_colors(mdp);
    let sigma = sigma_opt_av(mdp, &avoid)?;
    let chain = Chain::induced(mdp, &sigma.to_indices(mdp)?)?;
    let values = chain.reach(&avoid)?.into_iter().map(|r| Rational::one() - r).collect();
    Ok((sigma, values))
}

fn check_tau(tau: &Rational) -> Result<()> {
    if tau < &Rational::zero() || tau > &Rational::one() {
        return Err(Error::OutOfRange(format!("threshold {} outside [0, 1]", rational::format(tau))));
    }
    Ok(())
}

/// `Safe_τ`: states from which `sigma_opt_av` stays in color 0 forever with
/// probability at least `tau`.
pub fn safe_set(mdp: &FiniteMdp, tau: &Rational) -> Result<Vec<bool>> {
    check_tau(tau)?;
    let (_, values) = opt_av_safety(mdp)?;
    Ok(values.iter().map(|v| v >= tau).collect())
}

/// [`safe_set`] from precomputed `opt_av_safety` values.
pub fn safe_set_from(values: &[Rational], tau: &Rational) -> Result<Vec<bool>> {
    check_tau(tau)?;
    Ok(values.iter().map(|v| v >= tau).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::MdpBuilder;
    use crate::rational::ratio;

    #[test]
    fn prefers_safe_sink_and_smaller_id() {
        let mut b = MdpBuilder::new();
        b.controller("s", 0).random("good", 0).random("bad", 1).random("also", 0);
        b.edge("s", "bad").edge("s", "good").edge("s", "also");
        for x in ["good", "bad", "also"] {
            b.prob_edge(x, x, ratio(1, 1));
        }
        let m = b.build().unwrap();
        let sigma = sigma_opt_av(&m, &nonzero_colors(&m)).unwrap();
        assert_eq!(sigma.get(&"s".into()).unwrap().as_str(), "also");
        assert!(safe_set(&m, &ratio(0, 1)).unwrap().iter().all(|x| *x));
        assert!(safe_set(&m, &ratio(3, 2)).is_err());
    }
}

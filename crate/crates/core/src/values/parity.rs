use super::mec::mecs_within;
use super::reach::{reach_value_with, Mode};
use super::{Backend, FloatOptions, ValueVector};
use crate::error::Result;
use crate::mdp::FiniteMdp;

/// States of end components whose largest color is even: for every even
/// color `c`, the MECs of the sub-MDP on colors `≤ c` that contain color `c`.
pub fn winning_ec_states(mdp: &FiniteMdp) -> Vec<bool> {
    let mut win = vec![false; mdp.len()];
    for &c in mdp.color_set().iter().filter(|c| *c % 2 == 0) {
        let allowed: Vec<bool> = (0..mdp.len()).map(|i| mdp.color(i) <= c).collect();
        for ec in mecs_within(mdp, &allowed) {
            if ec.iter().any(|&i| mdp.color(i) == c) {
                for i in ec {
                    win[i] = true;
                }
            }
        }
    }
    win
}

/// Optimal probability of the parity condition on the MDP's own colors.
pub fn parity_value_with(mdp: &FiniteMdp, backend: Backend) -> Result<ValueVector> {
    parity_value_opts(mdp, backend, FloatOptions::default())
}

pub fn parity_value_opts(mdp: &FiniteMdp, backend: Backend, opts: FloatOptions) -> Result<ValueVector> {
    reach_value_with(mdp, &winning_ec_states(mdp), Mode::Max, backend, opts)
}

pub fn parity_value(mdp: &FiniteMdp) -> Result<ValueVector> {
    parity_value_with(mdp, Backend::Auto)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::MdpBuilder;
    use crate::rational::ratio;

    #[test]
    fn all_even_is_one() {
        let mut b = MdpBuilder::new();
        b.controller("a", 2).controller("b", 2).edge("a", "b").edge("b", "a");
        let v = parity_value(&b.build().unwrap()).unwrap();
        assert!(v.as_exact().unwrap().iter().all(|x| *x == ratio(1, 1)));
    }

    #[test]
    fn buchi_half() {
        let mut b = MdpBuilder::new();
        b.random("s", 1).random("g", 2).random("bad", 1);
        b.prob_edge("s", "g", ratio(1, 2)).prob_edge("s", "bad", ratio(1, 2));
        b.prob_edge("g", "g", ratio(1, 1)).prob_edge("bad", "bad", ratio(1, 1));
        let m = b.build().unwrap();
        let v = parity_value(&m).unwrap();
        assert_eq!(v.exact_by_id(&"s".into()).unwrap(), &ratio(1, 2));
    }
}

use std::collections::BTreeSet;

use num_traits::One;

use crate::error::Result;
use crate::mdp::{fix_md_total, FiniteMdp, MdStrategy, Objective, StateId};
use crate::rational::Rational;
use crate::values::{Chain, ValueVector};

/// Bottom SCCs of a chain that satisfy `obj` when all their states are
/// visited infinitely often.
pub fn winning_bsccs(chain: &FiniteMdp, obj: &Objective) -> Result<Vec<bool>> {
    let c = Chain::of(chain)?;
    let mut win = vec![false; chain.len()];
    for b in c.bsccs() {
        let inf: BTreeSet<&StateId> = b.iter().map(|&i| chain.id(i)).collect();
        let color = |s: &StateId| chain.color(chain.index_of(s).expect("member"));
        let hits = |p: &crate::mdp::StatePredicate| inf.iter().any(|s| p.holds(s, color(s)));
        let good = match obj {
            Objective::Parity(_) => b.iter().map(|&i| chain.color(i)).max().unwrap_or(1) % 2 == 0,
            Objective::Rabin(pairs) => pairs.iter().any(|(e, f)| !hits(e) && hits(f)),
            Objective::Streett(pairs) => pairs.iter().all(|(e, f)| hits(e) || !hits(f)),
            Objective::Reach(_) | Objective::Safety(_) => false,
        };
        if good {
            for i in b {
                win[i] = true;
            }
        }
    }
    Ok(win)
}

/// Exact probability of `obj` under an MD strategy, from every state. The
/// strategy must choose at every controller state.
pub fn md_value(mdp: &FiniteMdp, sigma: &MdStrategy, obj: &Objective) -> Result<ValueVector> {
    let chain = fix_md_total(mdp, sigma)?;
    chain_value(&chain, obj)
}

/// Exact probability of `obj` on a chain.
pub fn chain_value(chain: &FiniteMdp, obj: &Objective) -> Result<ValueVector> {
    let c = Chain::of(chain)?;
    let values = match obj {
        Objective::Reach(t) => c.reach(&t.mask(chain))?,
        Objective::Safety(t) => c.reach(&t.mask(chain))?.into_iter().map(|v| Rational::one() - v).collect(),
        _ => c.reach(&winning_bsccs(chain, obj)?)?,
    };
    Ok(ValueVector::exact(chain.ids().to_vec(), values, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::MdpBuilder;
    use crate::rational::ratio;

    #[test]
    fn two_bsccs_half() {
        let mut b = MdpBuilder::new();
        b.random("s", 0).random("even", 2).random("odd", 1);
        b.prob_edge("s", "even", ratio(1, 2)).prob_edge("s", "odd", ratio(1, 2));
        b.prob_edge("even", "even", ratio(1, 1)).prob_edge("odd", "odd", ratio(1, 1));
        let m = b.build().unwrap();
        let v = md_value(&m, &MdStrategy::new(), &Objective::parity012()).unwrap();
        assert_eq!(v.exact_by_id(&"s".into()).unwrap(), &ratio(1, 2));
        let r = md_value(
            &m,
            &MdStrategy::new(),
            &Objective::Rabin(vec![(crate::mdp::StatePredicate::color(1), crate::mdp::StatePredicate::color(2))]),
        )
        .unwrap();
        assert_eq!(r.exact_by_id(&"s".into()).unwrap(), &ratio(1, 2));
    }

    #[test]
    fn all_even_is_one() {
        let mut b = MdpBuilder::new();
        b.controller("a", 2).controller("b", 0).edge("a", "b").edge("b", "a").edge("b", "b");
        let m = b.build().unwrap();
        let sigma = MdStrategy::from_pairs([("a", "b"), ("b", "a")]);
        let v = md_value(&m, &sigma, &Objective::parity012()).unwrap();
        assert!(v.as_exact().unwrap().iter().all(|x| *x == ratio(1, 1)));
    }
}

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::mdp::{FiniteMdp, MdpBuilder, Objective};
use crate::rational::{self, Rational};

/// The MDP conditioned on the objective: positive-value states, controller
/// edges that preserve the value, and random distributions reweighted by
/// `val(t) / val(s)`.
#[derive(Clone, Debug)]
pub struct ConditionedMdp {
    pub mdp: FiniteMdp,
    /// Values on the original MDP, indexed like the original.
    pub values: Vec<Rational>,
    /// Original index of each state of `mdp`.
    pub origin: Vec<usize>,
}

impl ConditionedMdp {
    pub fn value_of(&self, i: usize) -> &Rational {
        &self.values[self.origin[i]]
    }
}

fn is_sink(mdp: &FiniteMdp, mask: &[bool]) -> bool {
    (0..mdp.len()).filter(|&i| mask[i]).all(|i| mdp.succ(i).iter().all(|&j| mask[j]))
}

pub fn conditioned_mdp(mdp: &FiniteMdp, obj: &Objective, values: &[Rational]) -> Result<ConditionedMdp> {
    match obj {
        Objective::Parity(_) => {}
        Objective::Reach(t) | Objective::Safety(t) => {
            if !is_sink(mdp, &t.mask(mdp)) {
                return Err(Error::Unsupported(format!("{obj}: target set must be a sink")));
            }
        }
        _ => return Err(Error::Unsupported(format!("conditioning on {}", obj.name()))),
    }
    let keep: Vec<bool> = values.iter().map(|v| v.is_positive()).collect();
    let mut b = MdpBuilder::new();
    let mut origin = Vec::new();
    for i in (0..mdp.len()).filter(|&i| keep[i]) {
        b.state(mdp.id(i).clone(), mdp.kind(i), mdp.color(i));
        origin.push(i);
    }
    if origin.is_empty() {
        return Err(Error::Precondition {
            state: mdp.initial_id().clone(),
            reason: "no state has positive value".into(),
        });
    }
    for &i in &origin {
        let (s, vs) = (mdp.id(i), &values[i]);
        if mdp.is_controller(i) {
            let mut any = false;
            for &j in mdp.succ(i) {
                if &values[j] == vs {
                    b.edge(s.clone(), mdp.id(j).clone());
                    any = true;
                }
            }
            if !any {
                return Err(Error::Precondition {
                    state: s.clone(),
                    reason: "no successor preserves the value".into(),
                });
            }
        } else {
            let mut sum = Rational::zero();
            for (&j, p) in mdp.succ(i).iter().zip(mdp.probs(i)) {
                if keep[j] {
                    let q = p * &values[j] / vs;
                    sum += &q;
                    b.prob_edge(s.clone(), mdp.id(j).clone(), q);
                }
            }
            if !sum.is_one() {
                return Err(Error::InconsistentValues { state: s.clone(), sum: rational::format(&sum) });
            }
        }
    }
    let init = if keep[mdp.initial()] { mdp.initial_id().clone() } else { mdp.id(origin[0]).clone() };
    b.initial(init).declare_colors(mdp.color_set().iter().copied());
    let cond = b.build()?;
    let mut ordered = vec![0; cond.len()];
    for &i in &origin {
        ordered[cond.require(mdp.id(i))?] = i;
    }
    Ok(ConditionedMdp { mdp: cond, values: values.to_vec(), origin: ordered })
}

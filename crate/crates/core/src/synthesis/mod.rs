//! MD strategy constructions.

mod almost_sure;
mod cobuchi;
mod conditioned;
mod optimal;
mod safety;

use std::collections::BTreeMap;

pub use almost_sure::{as_buchi_md, as_parity012_md, as_reach_md, is_almost_sure, uniform_as_glue, AsReach};
pub use cobuchi::{eps_optimal_cobuchi_md, CoBuchiConstants, CoBuchiResult};
pub use conditioned::{conditioned_mdp, ConditionedMdp};
pub use optimal::{eps_optimal_reach_md, optimal_parity_md, ReachOptions};
pub use safety::{argmax_strategy, nonzero_colors, opt_av_safety, safe_set, safe_set_from, sigma_opt_av};

use crate::mdp::{MdStrategy, StateId};
use crate::rational::Rational;

/// A synthesized MD strategy with a per-state value guarantee and a note on
/// how each state's choice was obtained.
#[derive(Clone, Debug, Default)]
pub struct SynthesisResult {
    pub strategy: MdStrategy,
    pub guarantee: BTreeMap<StateId, Rational>,
    pub trace: BTreeMap<StateId, String>,
    pub notes: Vec<String>,
}

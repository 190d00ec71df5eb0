//! Seeded random finite MDPs.

use std::ops::RangeInclusive;

use mdpsynth::rational::ratio;
use mdpsynth::{FiniteMdp, MdpBuilder, StateId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct GenParams {
    pub controllers: RangeInclusive<usize>,
    pub randoms: RangeInclusive<usize>,
    pub colors: Vec<u32>,
    pub max_branch: usize,
}

impl GenParams {
    pub fn new(max_controllers: usize, colors: &[u32]) -> Self {
        GenParams { controllers: 2..=max_controllers, randoms: 1..=4, colors: colors.to_vec(), max_branch: 3 }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Positive integers summing to `d`, `k` of them.
fn composition(rng: &mut ChaCha8Rng, d: i64, k: usize) -> Vec<i64> {
    let mut cuts: Vec<i64> = (1..d).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<i64> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(k);
    let mut last = 0;
    for c in cuts {
        out.push(c - last);
        last = c;
    }
    out.push(d - last);
    out
}

/// Controllers `c:i` and random states `p:i`; random states use
/// denominators 2..6.
pub fn random_mdp(rng: &mut ChaCha8Rng, params: &GenParams) -> FiniteMdp {
    let nc = rng.gen_range(params.controllers.clone());
    let nr = rng.gen_range(params.randoms.clone());
    let ids: Vec<StateId> = (0..nc)
        .map(|i| StateId::indexed("c", i as u64))
        .chain((0..nr).map(|i| StateId::indexed("p", i as u64)))
        .collect();
    let mut b = MdpBuilder::new();
    for (i, s) in ids.iter().enumerate() {
        let color = *params.colors.choose(rng).expect("colors");
        let k = rng.gen_range(1..=params.max_branch.min(ids.len()));
        let targets: Vec<StateId> = ids.choose_multiple(rng, k).cloned().collect();
        if i < nc {
            b.controller(s.clone(), color);
            for t in targets {
                b.edge(s.clone(), t);
            }
        } else {
            b.random(s.clone(), color);
            let d = rng.gen_range((k.max(2) as i64)..=6);
            for (t, w) in targets.into_iter().zip(composition(rng, d, k)) {
                b.prob_edge(s.clone(), t, ratio(w, d));
            }
        }
    }
    b.initial(ids[0].clone()).declare_colors(params.colors.iter().copied());
    b.build().expect("generated MDPs are valid")
}

/// `count` instances from consecutive seeds.
pub fn instances(seed: u64, count: usize, params: &GenParams) -> Vec<FiniteMdp> {
    (0..count).map(|i| random_mdp(&mut rng(seed.wrapping_add(i as u64)), params)).collect()
}

#![allow(dead_code)]

use mdpsynth::rational::ratio;
use mdpsynth::{FiniteMdp, MdpBuilder, StateId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small random MDP: `nc` controllers `c:i`, `nr` random states `p:i`.
pub fn random_mdp(seed: u64, max_controllers: usize, colors: &[u32]) -> FiniteMdp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nc = rng.gen_range(1..=max_controllers);
    let nr = rng.gen_range(1..=4);
    let ids: Vec<StateId> = (0..nc)
        .map(|i| StateId::indexed("c", i as u64))
        .chain((0..nr).map(|i| StateId::indexed("p", i as u64)))
        .collect();
    let mut b = MdpBuilder::new();
    for (i, s) in ids.iter().enumerate() {
        let color = *colors.choose(&mut rng).unwrap();
        let k = rng.gen_range(1..=3.min(ids.len()));
        let targets: Vec<StateId> = ids.choose_multiple(&mut rng, k).cloned().collect();
        if i < nc {
            b.controller(s.clone(), color);
            for t in targets {
                b.edge(s.clone(), t);
            }
        } else {
            b.random(s.clone(), color);
            let d = rng.gen_range(k.max(2) as i64..=6);
            let mut left = d;
            for (j, t) in targets.iter().enumerate() {
                let w = if j + 1 == k { left } else { rng.gen_range(1..=left - (k - j - 1) as i64) };
                left -= w;
                b.prob_edge(s.clone(), t.clone(), ratio(w, d));
            }
        }
    }
    b.initial(ids[0].clone()).declare_colors(colors.iter().copied());
    b.build().unwrap()
}

/// Random Markov chain (no controllers) on `n` states.
pub fn random_chain(seed: u64, n: usize, colors: &[u32]) -> FiniteMdp {
    let mut b = MdpBuilder::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<StateId> = (0..n as u64).map(|i| StateId::indexed("q", i)).collect();
    for s in &ids {
        b.random(s.clone(), *colors.choose(&mut rng).unwrap());
        let k = rng.gen_range(1..=2.min(n));
        let ts: Vec<StateId> = ids.choose_multiple(&mut rng, k).cloned().collect();
        if k == 1 {
            b.prob_edge(s.clone(), ts[0].clone(), ratio(1, 1));
        } else {
            let w = rng.gen_range(1..=3);
            b.prob_edge(s.clone(), ts[0].clone(), ratio(w, 4));
            b.prob_edge(s.clone(), ts[1].clone(), ratio(4 - w, 4));
        }
    }
    b.initial(ids[0].clone()).declare_colors(colors.iter().copied());
    b.build().unwrap()
}

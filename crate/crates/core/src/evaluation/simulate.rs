use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mdp::{CountableMdp, StateId, StatePredicate, Strategy, Successors, SUCCESSOR_SEARCH_CAP};
use crate::rational::{self, Rational};

/// Name of the per-episode stream derivation, reported with every run.
pub const RNG_ALGORITHM: &str = "chacha8(splitmix64(seed + splitmix64(episode)))";

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// RNG of one episode, a pure function of `(seed, episode)`.
pub fn episode_rng(seed: u64, episode: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed.wrapping_add(splitmix64(episode))))
}

#[derive(Clone, Debug)]
pub enum Event {
    /// A state satisfying the predicate is visited within the horizon.
    Reach { name: String, target: StatePredicate },
    /// For cycles `k = 0..max_cycles`: `target` is visited after the
    /// `(k+1)`-th visit to `anchor` and before the next one.
    AnchorCycles { anchor: StateId, target: StateId, max_cycles: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct EventFrequency {
    pub name: String,
    pub count: u64,
    pub frequency: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationReport {
    pub episodes: u64,
    pub horizon: u64,
    pub seed: u64,
    pub rng: String,
    pub events: Vec<EventFrequency>,
    /// Total visits of the tracked states over all episodes.
    pub visits: BTreeMap<StateId, u64>,
    pub aborted: u64,
    pub diagnostics: Vec<String>,
}

impl SimulationReport {
    pub fn event(&self, name: &str) -> Option<&EventFrequency> {
        self.events.iter().find(|e| e.name == name)
    }
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub horizon: u64,
    pub episodes: u64,
    pub seed: u64,
    pub events: Vec<Event>,
    pub track: Vec<StateId>,
}

fn sample<'a, T>(dist: &'a [(T, Rational)], rng: &mut ChaCha8Rng) -> &'a T {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (x, p) in dist {
        acc += rational::to_f64(p);
        if u < acc {
            return x;
        }
    }
    &dist.last().expect("nonempty distribution").0
}

fn sample_f64<'a, T>(dist: &'a [(T, f64)], rng: &mut ChaCha8Rng) -> &'a T {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (x, p) in dist {
        acc += p;
        if u < acc {
            return x;
        }
    }
    &dist.last().expect("nonempty distribution").0
}

struct Node {
    color: u32,
    random: Option<Arc<[(StateId, f64)]>>,
}

/// Per-run memo of state descriptions, relying on the generator contract
/// that `describe` is pure.
struct Cache<'a> {
    mdp: &'a dyn CountableMdp,
    nodes: HashMap<StateId, Node>,
    checked: HashMap<StateId, HashSet<StateId>>,
}

impl Cache<'_> {
    fn node(&mut self, s: &StateId) -> Result<&Node> {
        if !self.nodes.contains_key(s) {
            let info = self.mdp.describe(s)?;
            let random = match info.successors {
                Successors::Random(d) => Some(d.iter().map(|(t, p)| (t.clone(), rational::to_f64(p))).collect()),
                _ => None,
            };
            self.nodes.insert(s.clone(), Node { color: info.color, random });
        }
        Ok(&self.nodes[s])
    }

    fn check_move(&mut self, s: &StateId, t: &StateId) -> Result<()> {
        if self.checked.get(s).is_some_and(|ts| ts.contains(t)) {
            return Ok(());
        }
        if !self.mdp.successors(s)?.contains(t, SUCCESSOR_SEARCH_CAP) {
            return Err(Error::StrategyViolation { from: s.clone(), to: t.clone() });
        }
        self.checked.entry(s.clone()).or_default().insert(t.clone());
        Ok(())
    }
}

/// The only successor of a controller the strategy leaves open.
fn forced(mdp: &dyn CountableMdp, s: &StateId) -> Result<StateId> {
    match mdp.successors(s)?.targets(2) {
        (ts, _) if ts.len() == 1 => Ok(ts[0].clone()),
        _ => Err(Error::StrategyUndefined(s.clone())),
    }
}

/// Per-episode event bookkeeping.
struct Tracker<'a> {
    config: &'a SimConfig,
    /// One flag per reported event name, in report order.
    hits: Vec<bool>,
    /// For each AnchorCycles event: (offset in `hits`, anchor visits so far).
    cycles: Vec<(usize, u64)>,
    reach_slots: Vec<usize>,
}

impl<'a> Tracker<'a> {
    fn new(config: &'a SimConfig, names: &[String]) -> Self {
        let mut cycles = Vec::new();
        let mut reach_slots = Vec::new();
        let mut offset = 0;
        for e in &config.events {
            match e {
                Event::Reach { .. } => {
                    reach_slots.push(offset);
                    offset += 1;
                }
                Event::AnchorCycles { max_cycles, .. } => {
                    cycles.push((offset, 0));
                    offset += max_cycles;
                }
            }
        }
        Tracker { config, hits: vec![false; names.len()], cycles, reach_slots }
    }

    fn observe(&mut self, s: &StateId, color: u32) {
        let (mut r, mut c) = (0, 0);
        for e in &self.config.events {
            match e {
                Event::Reach { target, .. } => {
                    if target.holds(s, color) {
                        self.hits[self.reach_slots[r]] = true;
                    }
                    r += 1;
                }
                Event::AnchorCycles { anchor, target, max_cycles } => {
                    let (offset, visits) = &mut self.cycles[c];
                    if s == anchor {
                        *visits += 1;
                    } else if s == target && *visits >= 1 && (*visits as usize) <= *max_cycles {
                        self.hits[*offset + *visits as usize - 1] = true;
                    }
                    c += 1;
                }
            }
        }
    }

    fn decided(&self) -> bool {
        if self.config.events.is_empty() {
            return false;
        }
        let mut r = 0;
        let mut c = 0;
        for e in &self.config.events {
            match e {
                Event::Reach { .. } => {
                    if !self.hits[self.reach_slots[r]] {
                        return false;
                    }
                    r += 1;
                }
                Event::AnchorCycles { max_cycles, .. } => {
                    if (self.cycles[c].1 as usize) <= *max_cycles {
                        return false;
                    }
                    c += 1;
                }
            }
        }
        true
    }
}

fn event_names(config: &SimConfig) -> Vec<String> {
    let mut names = Vec::new();
    for e in &config.events {
        match e {
            Event::Reach { name, .. } => names.push(name.clone()),
            Event::AnchorCycles { max_cycles, .. } => {
                names.extend((0..*max_cycles).map(|k| format!("E_{k}")));
            }
        }
    }
    names
}

/// Runs `episodes` plays of at most `horizon` steps from the initial state.
/// Episodes stop early once every event (if any) is decided.
pub fn simulate(mdp: &dyn CountableMdp, strategy: &Strategy, config: &SimConfig) -> Result<SimulationReport> {
    if config.episodes == 0 {
        return Err(Error::OutOfRange("episodes must be at least 1".into()));
    }
    if let Strategy::Transducer(t) = strategy {
        t.validate()?;
    }
    let names = event_names(config);
    let mut counts = vec![0u64; names.len()];
    let mut visits: BTreeMap<StateId, u64> = config.track.iter().map(|s| (s.clone(), 0)).collect();
    let mut aborted = 0;
    let mut diagnostics = Vec::new();
    let mut cache = Cache { mdp, nodes: HashMap::new(), checked: HashMap::new() };
    for ep in 0..config.episodes {
        let mut rng = episode_rng(config.seed, ep);
        let mut tracker = Tracker::new(config, &names);
        let mut s = mdp.initial();
        let mut mode = match strategy {
            Strategy::Transducer(t) => t.initial_mode(),
            _ => 0,
        };
        let mut anchor_visits = 0u64;
        let mut step = 0u64;
        let outcome: Result<()> = (|| loop {
            let (color, random) = {
                let node = cache.node(&s)?;
                (node.color, node.random.clone())
            };
            if let Strategy::Counter(c) = strategy {
                if s == c.anchor {
                    anchor_visits += 1;
                }
            }
            if let Some(v) = visits.get_mut(&s) {
                *v += 1;
            }
            tracker.observe(&s, color);
            if step >= config.horizon || tracker.decided() {
                return Ok(());
            }
            step += 1;
            let next = match (random, strategy) {
                (Some(d), _) => sample_f64(&d, &mut rng).clone(),
                (None, Strategy::Md(md)) => {
                    let t = match md.get(&s) {
                        Some(t) => t.clone(),
                        None => forced(mdp, &s)?,
                    };
                    cache.check_move(&s, &t)?;
                    t
                }
                (None, Strategy::Counter(c)) => {
                    let t = match c.choose(anchor_visits, &s) {
                        Some(t) => t,
                        None => forced(mdp, &s)?,
                    };
                    cache.check_move(&s, &t)?;
                    t
                }
                (None, Strategy::Transducer(t)) => {
                    let d = t.choice_dist(mode, &s, mdp)?;
                    sample(&d, &mut rng).clone()
                }
            };
            if let Strategy::Transducer(t) = strategy {
                mode = *sample(&t.update_dist(mode, &next), &mut rng);
            }
            s = next;
        })();
        if let Err(e) = outcome {
            aborted += 1;
            if diagnostics.len() < 10 {
                diagnostics.push(format!("episode {ep}: {e}"));
            }
            continue;
        }
        for (k, h) in tracker.hits.iter().enumerate() {
            if *h {
                counts[k] += 1;
            }
        }
    }
    let n = config.episodes as f64;
    let events = names
        .into_iter()
        .zip(counts)
        .map(|(name, count)| {
            let f = count as f64 / n;
            EventFrequency { name, count, frequency: f, std_error: (f * (1.0 - f) / n).sqrt() }
        })
        .collect();
    Ok(SimulationReport {
        episodes: config.episodes,
        horizon: config.horizon,
        seed: config.seed,
        rng: RNG_ALGORITHM.into(),
        events,
        visits,
        aborted,
        diagnostics,
    })
}

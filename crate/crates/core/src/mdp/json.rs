//! JSON interchange for MDPs, MD strategies and transducers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{FiniteMdp, MdStrategy, MdpBuilder, StateId, StateKind, Transducer};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub const SCHEMA: u32 = 1;

#[derive(Serialize, Deserialize)]
struct StateJson {
    id: StateId,
    kind: StateKind,
    color: u32,
}

#[derive(Serialize, Deserialize)]
struct TransitionJson {
    from: StateId,
    to: StateId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prob: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct MdpJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<u32>,
    states: Vec<StateJson>,
    transitions: Vec<TransitionJson>,
    initial: StateId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    colors: Option<Vec<u32>>,
}

fn check_schema(schema: Option<u32>) -> Result<()> {
    match schema {
        None | Some(SCHEMA) => Ok(()),
        Some(v) => Err(Error::Parse(format!("unsupported schema version {v}"))),
    }
}

/// Parses an MDP into a builder without validating it.
pub fn mdp_builder_from_json(text: &str) -> Result<MdpBuilder> {
    let raw: MdpJson = serde_json::from_str(text)?;
    check_schema(raw.schema)?;
    let mut b = MdpBuilder::new();
    for s in raw.states {
        b.state(s.id, s.kind, s.color);
    }
    for t in raw.transitions {
        match t.prob {
            Some(p) => b.prob_edge(t.from, t.to, rational::parse(&p)?),
            None => b.edge(t.from, t.to),
        };
    }
    b.initial(raw.initial);
    if let Some(c) = raw.colors {
        b.declare_colors(c);
    }
    Ok(b)
}

pub fn mdp_from_json(text: &str) -> Result<FiniteMdp> {
    mdp_builder_from_json(text)?.build()
}

pub fn mdp_to_json(mdp: &FiniteMdp) -> String {
    let states =
        (0..mdp.len()).map(|i| StateJson { id: mdp.id(i).clone(), kind: mdp.kind(i), color: mdp.color(i) }).collect();
    let mut transitions = Vec::new();
    for i in 0..mdp.len() {
        for (k, &t) in mdp.succ(i).iter().enumerate() {
            let prob = mdp.probs(i).get(k).map(rational::format);
            transitions.push(TransitionJson { from: mdp.id(i).clone(), to: mdp.id(t).clone(), prob });
        }
    }
    let raw = MdpJson {
        schema: Some(SCHEMA),
        states,
        transitions,
        initial: mdp.initial_id().clone(),
        colors: Some(mdp.color_set().iter().copied().collect()),
    };
    serde_json::to_string_pretty(&raw).expect("serializable")
}

#[derive(Serialize, Deserialize)]
struct StrategyJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<u32>,
    choice: MdStrategy,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    guarantee: BTreeMap<StateId, String>,
}

pub fn strategy_to_json(sigma: &MdStrategy, guarantee: &BTreeMap<StateId, Rational>) -> String {
    let raw = StrategyJson {
        schema: Some(SCHEMA),
        choice: sigma.clone(),
        guarantee: guarantee.iter().map(|(s, v)| (s.clone(), rational::format(v))).collect(),
    };
    serde_json::to_string_pretty(&raw).expect("serializable")
}

/// Reads a strategy file; the guarantee map is optional.
pub fn strategy_from_json(text: &str) -> Result<(MdStrategy, BTreeMap<StateId, Rational>)> {
    let raw: StrategyJson = serde_json::from_str(text)?;
    check_schema(raw.schema)?;
    let guarantee = raw.guarantee.into_iter().map(|(s, v)| Ok((s, rational::parse(&v)?))).collect::<Result<_>>()?;
    Ok((raw.choice, guarantee))
}

#[derive(Serialize, Deserialize)]
struct RuleJson<K: Ord> {
    mode: String,
    state: StateId,
    to: BTreeMap<K, String>,
}

#[derive(Serialize, Deserialize)]
struct TransducerJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<u32>,
    modes: Vec<String>,
    initial: String,
    #[serde(default)]
    update: Vec<RuleJson<String>>,
    #[serde(default)]
    choice: Vec<RuleJson<StateId>>,
    /// Per mode: successor position (as a string) to probability.
    #[serde(default)]
    default_choice: BTreeMap<String, BTreeMap<String, String>>,
}

pub fn transducer_from_json(text: &str) -> Result<Transducer> {
    let raw: TransducerJson = serde_json::from_str(text)?;
    check_schema(raw.schema)?;
    let probe = Transducer::new(raw.modes.clone())?;
    let mode = |m: &str| probe.mode_index(m);
    let mut update = BTreeMap::new();
    for r in raw.update {
        let dist = r.to.iter().map(|(m, p)| Ok((mode(m)?, rational::parse(p)?))).collect::<Result<Vec<_>>>()?;
        update.insert((mode(&r.mode)?, r.state), dist);
    }
    let mut choice = BTreeMap::new();
    for r in raw.choice {
        let dist = r.to.into_iter().map(|(t, p)| Ok((t, rational::parse(&p)?))).collect::<Result<Vec<_>>>()?;
        choice.insert((mode(&r.mode)?, r.state), dist);
    }
    let mut defaults = vec![vec![(0usize, rational::one())]; raw.modes.len()];
    for (m, d) in raw.default_choice {
        let dist = d
            .iter()
            .map(|(k, p)| {
                let k: usize = k.parse().map_err(|_| Error::Parse(format!("bad position `{k}`")))?;
                Ok((k, rational::parse(p)?))
            })
            .collect::<Result<Vec<_>>>()?;
        defaults[mode(&m)?] = dist;
    }
    let initial = mode(&raw.initial)?;
    Transducer::from_parts(raw.modes, initial, update, choice, defaults)
}

pub fn transducer_to_json(t: &Transducer) -> String {
    let (update, choice, defaults) = t.parts();
    let name = |m: usize| t.modes()[m].clone();
    let raw = TransducerJson {
        schema: Some(SCHEMA),
        modes: t.modes().to_vec(),
        initial: name(t.initial_mode()),
        update: update
            .iter()
            .map(|((m, s), d)| RuleJson {
                mode: name(*m),
                state: s.clone(),
                to: d.iter().map(|(k, p)| (name(*k), rational::format(p))).collect(),
            })
            .collect(),
        choice: choice
            .iter()
            .map(|((m, s), d)| RuleJson {
                mode: name(*m),
                state: s.clone(),
                to: d.iter().map(|(k, p)| (k.clone(), rational::format(p))).collect(),
            })
            .collect(),
        default_choice: defaults
            .iter()
            .enumerate()
            .map(|(m, d)| (name(m), d.iter().map(|(k, p)| (k.to_string(), rational::format(p))).collect()))
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("serializable")
}

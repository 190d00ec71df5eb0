//! The counterexample MDPs, each with the strategies used to analyse it.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::mdp::{
    CountableMdp, CounterStrategy, LazyMdp, MdStrategy, Objective, StateId, StateInfo, StatePredicate, Strategy,
    Successors,
};
use crate::rational::{self, pow2_inv, Rational};

pub const NAMES: [&str; 6] = ["fig2a", "fig2b", "fig3a", "fig3b", "fig4", "gamblers_ruin"];

/// Number of `sigma_n` strategies bundled with the families that have one.
pub const BUNDLED_SIGMA_N: u32 = 16;

#[derive(Clone)]
pub struct GalleryEntry {
    pub name: String,
    pub mdp: Arc<dyn CountableMdp>,
    pub objective: Objective,
    pub strategies: Vec<(String, Strategy)>,
    /// Expected quantities, as `key -> exact value`.
    pub claims: BTreeMap<String, String>,
    /// Anchor state of the proof's cycle decomposition, with the fatal state.
    pub anchor: Option<(StateId, StateId)>,
}

impl fmt::Debug for GalleryEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GalleryEntry")
            .field("name", &self.name)
            .field("objective", &self.objective)
            .field("strategies", &self.strategies.iter().map(|(n, _)| n).collect::<Vec<_>>())
            .finish()
    }
}

impl GalleryEntry {
    pub fn strategy(&self, name: &str) -> Result<&Strategy> {
        self.strategies
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| Error::UnknownStrategy(name.to_string()))
    }

    pub fn counter(&self, name: &str) -> Result<&CounterStrategy> {
        match self.strategy(name)? {
            Strategy::Counter(c) => Ok(c),
            _ => Err(Error::UnknownStrategy(format!("{name} is not a counter strategy"))),
        }
    }
}

fn id(prefix: &str, n: u64) -> StateId {
    StateId::indexed(prefix, n)
}

fn info(color: u32, successors: Successors) -> Option<StateInfo> {
    Some(StateInfo { color, successors })
}

fn dirac(t: StateId) -> Successors {
    Successors::Random(vec![(t, Rational::one())])
}

/// `r_i -> fatal` with `2^-i`, the rest back to `back`.
fn rung(i: u64, fatal: &str, back: &StateId) -> Successors {
    let p = pow2_inv(i as u32);
    if p.is_one() {
        return dirac(StateId::new(fatal));
    }
    Successors::Random(vec![(StateId::new(fatal), p.clone()), (back.clone(), Rational::one() - p)])
}

/// Ladder strategy: on the k-th anchor visit (k ≥ 1) climb to `s:{k-1+offset}`
/// and leave through the rung there.
fn ladder_counter(name: &str, offset: u64) -> CounterStrategy {
    CounterStrategy::new(name, id("s", 0), move |visits, s| {
        let (p, i) = s.split_index()?;
        if p != "s" {
            return None;
        }
        let goal = visits.saturating_sub(1) + offset;
        Some(if i < goal { id("s", i + 1) } else { id("r", i) })
    })
}

fn ladder(name: &str, s0_color: u32, rung_color: u32, fatal: &'static str, fatal_color: u32) -> LazyMdp {
    let s0 = id("s", 0);
    let colors = [s0_color, 1, rung_color, fatal_color];
    LazyMdp::new(name, s0.clone(), colors, move |s| {
        if s.as_str() == fatal {
            let next = if fatal == "t" { s0.clone() } else { StateId::new(fatal) };
            return info(fatal_color, Successors::Controller(vec![next]));
        }
        let (p, i) = s.split_index()?;
        if s.as_str() != format!("{p}:{i}") {
            return None;
        }
        match p {
            "s" => {
                let c = if i == 0 { s0_color } else { 1 };
                info(c, Successors::Controller(vec![id("r", i), id("s", i + 1)]))
            }
            "r" => info(rung_color, rung(i, fatal, &s0)),
            _ => None,
        }
    })
}

fn claims(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Ladder `s_i` (color 1) with rungs `r_i` (color 2) into `t` (color 3);
/// almost-sure Parity{1,2,3} needs infinite memory.
pub fn fig2a_parity123() -> GalleryEntry {
    let mdp = ladder("fig2a", 1, 2, "t", 3);
    GalleryEntry {
        name: "fig2a".into(),
        mdp: Arc::new(mdp),
        objective: Objective::Parity([1, 2, 3].into()),
        strategies: vec![
            ("sigma_h".into(), Strategy::Counter(ladder_counter("sigma_h", 0))),
            ("pick_r0".into(), Strategy::Md(MdStrategy::from_pairs([("s:0", "r:0")]))),
        ],
        claims: claims(&[
            ("prob(r:3,t)", "1/8".into()),
            ("prob(r:0,t)", "1".into()),
            ("color(t)", "3".into()),
            ("borel_cantelli(sigma_h)", "2".into()),
        ]),
        anchor: Some((id("s", 0), StateId::new("t"))),
    }
}

/// Same ladder with `s_0` of color 2 and an absorbing color-1 sink `b`;
/// limit-sure Büchi.
pub fn fig2b_buchi() -> GalleryEntry {
    let mdp = ladder("fig2b", 2, 1, "b", 1);
    let mut strategies = Vec::new();
    for n in 1..=BUNDLED_SIGMA_N as u64 {
        let name = format!("sigma_{n}");
        strategies.push((name.clone(), Strategy::Counter(ladder_counter(&name, n + 1))));
    }
    GalleryEntry {
        name: "fig2b".into(),
        mdp: Arc::new(mdp),
        objective: Objective::buchi(),
        strategies,
        claims: claims(&[("color(s:0)", "2".into()), ("successors(b)", "b".into())]),
        anchor: Some((id("s", 0), StateId::new("b"))),
    }
}

fn star(name: &str, t_back: bool) -> LazyMdp {
    let s = StateId::new("s");
    LazyMdp::new(name, s.clone(), [0, 1], move |q| match q.as_str() {
        "s" => info(0, Successors::Unbounded(Box::new((1..).map(|i| id("r", i))))),
        "t" => {
            let next = if t_back { s.clone() } else { StateId::new("t") };
            info(1, Successors::Controller(vec![next]))
        }
        _ => {
            let (p, i) = q.split_index()?;
            (p == "r" && i >= 1 && q.as_str() == format!("r:{i}")).then_some(())?;
            info(0, rung(i, "t", &s))
        }
    })
}

/// `sigma_n` of the infinitely branching star: rung `r_{n+k}` on the k-th
/// visit to `s`.
pub fn fig3a_sigma_n(n: u64) -> CounterStrategy {
    CounterStrategy::new(format!("sigma_{n}"), StateId::new("s"), move |k, q| {
        (q.as_str() == "s").then(|| id("r", n + k))
    })
}

/// Infinitely branching `s -> r_i`, `r_i -> t` with `2^-i`; `t` absorbing.
/// Safety from `t` needs infinite memory for every positive guarantee.
pub fn fig3a_safety() -> GalleryEntry {
    let mut strategies = Vec::new();
    for n in 1..=BUNDLED_SIGMA_N as u64 {
        strategies.push((format!("sigma_{n}"), Strategy::Counter(fig3a_sigma_n(n))));
    }
    for j in 1..=10u64 {
        let md = MdStrategy::from_pairs([(StateId::new("s"), id("r", j))]);
        strategies.push((format!("pick_r{j}"), Strategy::Md(md)));
    }
    GalleryEntry {
        name: "fig3a".into(),
        mdp: Arc::new(star("fig3a", false)),
        objective: Objective::Safety(StatePredicate::states(["t"])),
        strategies,
        claims: claims(&[
            ("prob(r:2,t)", "1/4".into()),
            ("successors(t)", "t".into()),
            ("borel_cantelli(sigma_n)", "2^-n".into()),
        ]),
        anchor: Some((StateId::new("s"), StateId::new("t"))),
    }
}

/// The star with `t -> s`, `t` of color 1; almost-sure co-Büchi needs
/// infinite memory.
pub fn fig3b_cobuchi() -> GalleryEntry {
    let sigma_h = CounterStrategy::new("sigma_h", StateId::new("s"), |k, q| (q.as_str() == "s").then(|| id("r", k)));
    GalleryEntry {
        name: "fig3b".into(),
        mdp: Arc::new(star("fig3b", true)),
        objective: Objective::cobuchi(),
        strategies: vec![("sigma_h".into(), Strategy::Counter(sigma_h))],
        claims: claims(&[
            ("successors(t)", "s".into()),
            ("color(t)", "1".into()),
            ("color(s)", "0".into()),
            ("borel_cantelli(sigma_h)", "1".into()),
        ]),
        anchor: Some((StateId::new("s"), StateId::new("t"))),
    }
}

/// One-counter version of fig2a: control states `s, r, rp, t` with the
/// counter value in the token, e.g. `rp:3`.
pub fn fig4_one_counter() -> GalleryEntry {
    let half = rational::ratio(1, 2);
    let mdp = LazyMdp::new("fig4", id("s", 0), [1, 2, 3], move |q| {
        let (p, n) = q.split_index()?;
        if q.as_str() != format!("{p}:{n}") {
            return None;
        }
        match p {
            "s" => info(1, Successors::Controller(vec![id("r", n), id("s", n + 1)])),
            "r" if n == 0 => info(2, dirac(id("t", 0))),
            "r" => info(2, Successors::Random(vec![(id("r", n - 1), half.clone()), (id("rp", n - 1), half.clone())])),
            "rp" if n == 0 => info(2, dirac(id("s", 0))),
            "rp" => info(2, dirac(id("rp", n - 1))),
            "t" => info(3, Successors::Controller(vec![id("s", n)])),
            _ => None,
        }
    });
    GalleryEntry {
        name: "fig4".into(),
        mdp: Arc::new(mdp),
        objective: Objective::Parity([1, 2, 3].into()),
        strategies: vec![("sigma_h".into(), Strategy::Counter(ladder_counter("sigma_h", 0)))],
        claims: claims(&[("reach_t_before_s(r:n)", "2^-n".into()), ("successors(rp:0)", "s:0".into())]),
        anchor: Some((id("s", 0), id("t", 0))),
    }
}

/// Random walk on ℕ moving up with probability `p`; `0` is absorbing ruin.
pub fn gamblers_ruin(p: Rational) -> Result<GalleryEntry> {
    if !p.is_positive() || p >= Rational::one() {
        return Err(Error::OutOfRange(format!("p = {} must lie in (0, 1)", rational::format(&p))));
    }
    let q = Rational::one() - &p;
    let text = rational::format(&p);
    let up = p.clone();
    let mdp = LazyMdp::new(format!("gamblers_ruin({text})"), StateId::new("1"), [0], move |s| {
        let i: u64 = s.as_str().parse().ok()?;
        if s.as_str() != i.to_string() {
            return None;
        }
        if i == 0 {
            return info(0, dirac(StateId::from(0u64)));
        }
        info(0, Successors::Random(vec![(StateId::from(i - 1), q.clone()), (StateId::from(i + 1), up.clone())]))
    });
    let mut claim = vec![("p".to_string(), text)];
    if p > rational::ratio(1, 2) {
        let ratio = (Rational::one() - &p) / &p;
        claim.push(("ruin(i)".into(), format!("({})^i", rational::format(&ratio))));
    }
    Ok(GalleryEntry {
        name: "gamblers_ruin".into(),
        mdp: Arc::new(mdp),
        objective: Objective::Safety(StatePredicate::states(["0"])),
        strategies: Vec::new(),
        claims: claim.into_iter().collect(),
        anchor: None,
    })
}

/// Builds a gallery entry by name; `gamblers_ruin` uses `p = 3/5`.
pub fn by_name(name: &str) -> Result<GalleryEntry> {
    match name {
        "fig2a" => Ok(fig2a_parity123()),
        "fig2b" => Ok(fig2b_buchi()),
        "fig3a" => Ok(fig3a_safety()),
        "fig3b" => Ok(fig3b_cobuchi()),
        "fig4" => Ok(fig4_one_counter()),
        "gamblers_ruin" => gamblers_ruin(rational::ratio(3, 5)),
        other => Err(Error::Parse(format!("unknown gallery entry `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn prob(e: &GalleryEntry, from: &str, to: &str) -> Rational {
        match e.mdp.successors(&from.into()).unwrap() {
            Successors::Random(d) => d.into_iter().find(|(t, _)| t.as_str() == to).map(|x| x.1).unwrap(),
            other => panic!("{from} is not random: {other:?}"),
        }
    }

    #[test]
    fn fig2a_shape() {
        let e = fig2a_parity123();
        assert_eq!(prob(&e, "r:3", "t"), ratio(1, 8));
        assert_eq!(prob(&e, "r:0", "t"), ratio(1, 1));
        assert_eq!(e.mdp.color(&"t".into()).unwrap(), 3);
        assert!(e.mdp.describe(&"x:1".into()).is_err());
        assert!(e.mdp.describe(&"s:01".into()).is_err());
    }

    #[test]
    fn fig2b_shape() {
        let e = fig2b_buchi();
        let (b, _) = e.mdp.successors(&"b".into()).unwrap().targets(10);
        assert_eq!(b, vec![StateId::from("b")]);
        assert_eq!(e.mdp.color(&"s:0".into()).unwrap(), 2);
        assert_eq!(prob(&e, "r:2", "s:0"), ratio(3, 4));
    }

    #[test]
    fn fig3_shapes() {
        let a = fig3a_safety();
        let (first, cut) = a.mdp.successors(&"s".into()).unwrap().targets(3);
        assert!(cut);
        assert_eq!(first, vec![id("r", 1), id("r", 2), id("r", 3)]);
        assert_eq!(prob(&a, "r:2", "t"), ratio(1, 4));
        let b = fig3b_cobuchi();
        let (t, _) = b.mdp.successors(&"t".into()).unwrap().targets(5);
        assert_eq!(t, vec![StateId::from("s")]);
        assert_eq!(b.mdp.color(&"t".into()).unwrap(), 1);
        assert_eq!(b.mdp.color(&"s".into()).unwrap(), 0);
    }

    #[test]
    fn fig4_shape() {
        let e = fig4_one_counter();
        assert_eq!(e.mdp.kind(&"s:4".into()).unwrap(), crate::mdp::StateKind::Controller);
        let (next, _) = e.mdp.successors(&"rp:0".into()).unwrap().targets(5);
        assert_eq!(next, vec![id("s", 0)]);
    }

    #[test]
    fn ruin_shape() {
        let e = gamblers_ruin(ratio(3, 5)).unwrap();
        assert_eq!(prob(&e, "5", "6"), ratio(3, 5));
        assert_eq!(prob(&e, "0", "0"), ratio(1, 1));
        assert!(gamblers_ruin(ratio(1, 1)).is_err());
        assert!(gamblers_ruin(ratio(0, 1)).is_err());
    }

    #[test]
    fn counter_strategies() {
        let e = fig2a_parity123();
        let h = e.counter("sigma_h").unwrap();
        assert_eq!(h.choose(1, &id("s", 0)), Some(id("r", 0)));
        assert_eq!(h.choose(3, &id("s", 0)), Some(id("s", 1)));
        assert_eq!(h.choose(3, &id("s", 2)), Some(id("r", 2)));
        let s = fig3a_sigma_n(2);
        assert_eq!(s.choose(1, &"s".into()), Some(id("r", 3)));
    }
}

use num_traits::{One, ToPrimitive};

use super::chain::Chain;
use super::{Backend, FloatOptions, ValueVector, Values};
use crate::error::{Error, Result};
use crate::mdp::FiniteMdp;
use crate::rational::Rational;

pub const TOLERANCE: f64 = 1e-9;
pub const ITERATION_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Max,
    Min,
}

/// Exact optimal reachability values with an optimal MD choice vector.
#[derive(Clone, Debug)]
pub struct ReachSolution {
    pub values: Vec<Rational>,
    pub choice: Vec<Option<usize>>,
    pub rounds: u64,
}

/// States that can reach `target` along some path.
pub(crate) fn can_reach(mdp: &FiniteMdp, target: &[bool]) -> Vec<bool> {
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); mdp.len()];
    for i in 0..mdp.len() {
        for &j in mdp.succ(i) {
            pred[j].push(i);
        }
    }
    let mut seen = target.to_vec();
    let mut stack: Vec<usize> = (0..mdp.len()).filter(|&i| target[i]).collect();
    while let Some(j) = stack.pop() {
        for &i in &pred[j] {
            if !seen[i] {
                seen[i] = true;
                stack.push(i);
            }
        }
    }
    seen
}

/// Largest set of non-target states in which the controller can stay forever
/// with probability one.
pub(crate) fn avoid_forever(mdp: &FiniteMdp, target: &[bool]) -> Vec<bool> {
    let mut inside: Vec<bool> = target.iter().map(|t| !t).collect();
    loop {
        let mut changed = false;
        for i in 0..mdp.len() {
            if !inside[i] {
                continue;
            }
            let ok = if mdp.is_controller(i) {
                mdp.succ(i).iter().any(|&j| inside[j])
            } else {
                mdp.succ(i).iter().all(|&j| inside[j])
            };
            if !ok {
                inside[i] = false;
                changed = true;
            }
        }
        if !changed {
            return inside;
        }
    }
}

/// Graph distance to `target` (usize::MAX when unreachable).
pub(crate) fn distance_to(mdp: &FiniteMdp, target: &[bool]) -> Vec<usize> {
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); mdp.len()];
    for i in 0..mdp.len() {
        for &j in mdp.succ(i) {
            pred[j].push(i);
        }
    }
    let mut dist = vec![usize::MAX; mdp.len()];
    let mut queue = std::collections::VecDeque::new();
    for i in 0..mdp.len() {
        if target[i] {
            dist[i] = 0;
            queue.push_back(i);
        }
    }
    while let Some(j) = queue.pop_front() {
        for &i in &pred[j] {
            if dist[i] == usize::MAX {
                dist[i] = dist[j] + 1;
                queue.push_back(i);
            }
        }
    }
    dist
}

/// Exact optimal values by policy iteration with strict-improvement switching.
///
/// Max: starts from a strategy that moves closer to the target in the graph,
/// so every state that can reach the target does so with positive
/// probability; strict switches never close a target-free cycle.
/// Min: states that can avoid the target forever get value 0 and a strategy
/// that stays among them; no end component remains elsewhere, so every
/// strategy is absorbing and iteration converges from any start.
pub fn optimal_reach(mdp: &FiniteMdp, target: &[bool], mode: Mode) -> Result<ReachSolution> {
    let n = mdp.len();
    let mut choice: Vec<Option<usize>> = vec![None; n];
    let mut frozen = vec![false; n];
    match mode {
        Mode::Max => {
            let dist = distance_to(mdp, target);
            for i in (0..n).filter(|&i| mdp.is_controller(i)) {
                let best = mdp.succ(i).iter().copied().min_by_key(|&j| (dist[j], j));
                choice[i] = best;
                frozen[i] = target[i] || dist[i] == usize::MAX;
            }
        }
        Mode::Min => {
            let zero = avoid_forever(mdp, target);
            for i in (0..n).filter(|&i| mdp.is_controller(i)) {
                let stay = mdp.succ(i).iter().copied().find(|&j| zero[j]);
                choice[i] = if zero[i] { stay } else { mdp.succ(i).first().copied() };
                frozen[i] = target[i] || zero[i];
            }
        }
    }
    let mut rounds = 0;
    loop {
        rounds += 1;
        let values = Chain::induced(mdp, &choice)?.reach(target)?;
        let mut switched = false;
        for i in (0..n).filter(|&i| mdp.is_controller(i) && !frozen[i]) {
            let cur = &values[i];
            let best = match mode {
                Mode::Max => mdp.succ(i).iter().copied().reduce(|a, b| if values[b] > values[a] { b } else { a }),
                Mode::Min => mdp.succ(i).iter().copied().reduce(|a, b| if values[b] < values[a] { b } else { a }),
            };
            let best = best.expect("controller has a successor");
            let better = match mode {
                Mode::Max => &values[best] > cur,
                Mode::Min => &values[best] < cur,
            };
            if better {
                choice[i] = Some(best);
                switched = true;
            }
        }
        if !switched {
            return Ok(ReachSolution { values, choice, rounds });
        }
    }
}

fn gauss_seidel(
    mdp: &FiniteMdp,
    target: &[bool],
    fixed_zero: &[bool],
    mode: Mode,
    opts: FloatOptions,
) -> Result<(Vec<f64>, u64)> {
    let n = mdp.len();
    let probs: Vec<Vec<f64>> =
        (0..n).map(|i| mdp.probs(i).iter().map(|p| p.to_f64().unwrap_or(0.0)).collect()).collect();
    let mut v: Vec<f64> = target.iter().map(|&t| if t { 1.0 } else { 0.0 }).collect();
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let mut delta: f64 = 0.0;
        for i in 0..n {
            if target[i] || fixed_zero[i] {
                continue;
            }
            let succ = mdp.succ(i);
            let new = if mdp.is_controller(i) {
                let it = succ.iter().map(|&j| v[j]);
                match mode {
                    Mode::Max => it.fold(0.0, f64::max),
                    Mode::Min => it.fold(1.0, f64::min),
                }
            } else {
                succ.iter().zip(&probs[i]).map(|(&j, p)| p * v[j]).sum()
            };
            delta = delta.max((new - v[i]).abs());
            v[i] = new;
        }
        if delta < opts.tolerance {
            return Ok((v, sweeps));
        }
        if sweeps >= opts.iteration_cap {
            return Err(Error::NonConvergence { sweeps, residual: delta });
        }
    }
}

/// Optimal probability of reaching `target` (least fixed point of the
/// Bellman operator).
pub fn reach_value(mdp: &FiniteMdp, target: &[bool], mode: Mode, backend: Backend) -> Result<ValueVector> {
    reach_value_with(mdp, target, mode, backend, FloatOptions::default())
}

/// As [`reach_value`], with explicit stopping rules for the float backend.
pub fn reach_value_with(
    mdp: &FiniteMdp,
    target: &[bool],
    mode: Mode,
    backend: Backend,
    opts: FloatOptions,
) -> Result<ValueVector> {
    let ids = mdp.ids().to_vec();
    match backend.resolve(mdp.len()) {
        Backend::Float => {
            opts.check()?;
            let zero = match mode {
                Mode::Max => can_reach(mdp, target).iter().map(|c| !c).collect(),
                Mode::Min => avoid_forever(mdp, target),
            };
            let (v, sweeps) = gauss_seidel(mdp, target, &zero, mode, opts)?;
            Ok(ValueVector { ids, values: Values::Float(v), iterations: sweeps })
        }
        _ => {
            let sol = optimal_reach(mdp, target, mode)?;
            Ok(ValueVector::exact(ids, sol.values, sol.rounds))
        }
    }
}

/// Optimal probability of never visiting `avoid`: one minus the minimal
/// reachability probability.
pub fn safety_value_with(mdp: &FiniteMdp, avoid: &[bool], backend: Backend) -> Result<ValueVector> {
    safety_value_opts(mdp, avoid, backend, FloatOptions::default())
}

pub fn safety_value_opts(mdp: &FiniteMdp, avoid: &[bool], backend: Backend, opts: FloatOptions) -> Result<ValueVector> {
    let mut v = reach_value_with(mdp, avoid, Mode::Min, backend, opts)?;
    v.values = match v.values {
        Values::Exact(x) => Values::Exact(x.into_iter().map(|r| Rational::one() - r).collect()),
        Values::Float(x) => Values::Float(x.into_iter().map(|r| 1.0 - r).collect()),
    };
    Ok(v)
}

pub fn safety_value(mdp: &FiniteMdp, avoid: &[bool]) -> Result<ValueVector> {
    safety_value_with(mdp, avoid, Backend::Auto)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::MdpBuilder;
    use crate::rational::ratio;

    /// c chooses between a fair coin (r) and a self-loop; r goes to t or d.
    fn toy() -> FiniteMdp {
        let mut b = MdpBuilder::new();
        b.controller("c", 0).random("r", 0).random("t", 0).random("d", 0);
        b.edge("c", "r").edge("c", "c");
        b.prob_edge("r", "t", ratio(1, 2)).prob_edge("r", "d", ratio(1, 2));
        b.prob_edge("t", "t", ratio(1, 1)).prob_edge("d", "d", ratio(1, 1));
        b.build().unwrap()
    }

    #[test]
    fn max_and_min() {
        let m = toy();
        let t = m.require(&"t".into()).unwrap();
        let c = m.require(&"c".into()).unwrap();
        let mut target = vec![false; m.len()];
        target[t] = true;
        let max = optimal_reach(&m, &target, Mode::Max).unwrap();
        assert_eq!(max.values[c], ratio(1, 2));
        let min = optimal_reach(&m, &target, Mode::Min).unwrap();
        assert_eq!(min.values[c], ratio(0, 1));
        assert_eq!(min.choice[c], Some(c));
        let safe = safety_value(&m, &target).unwrap();
        assert_eq!(safe.as_exact().unwrap()[c], ratio(1, 1));
    }

    #[test]
    fn float_agrees() {
        let m = toy();
        let target: Vec<bool> = m.ids().iter().map(|s| s.as_str() == "t").collect();
        let f = reach_value(&m, &target, Mode::Max, Backend::Float).unwrap();
        let e = reach_value(&m, &target, Mode::Max, Backend::Exact).unwrap();
        for i in 0..m.len() {
            assert!((f.f64(i) - e.f64(i)).abs() < 1e-9);
        }
    }
}

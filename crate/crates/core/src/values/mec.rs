use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::mdp::FiniteMdp;

/// Maximal end components of `mdp`, each sorted, ordered by smallest state.
pub fn mec_decomposition(mdp: &FiniteMdp) -> Vec<Vec<usize>> {
    mecs_within(mdp, &vec![true; mdp.len()])
}

/// Removes states that cannot stay inside `inside`: random states with a
/// successor outside, controllers with no successor inside.
fn prune(mdp: &FiniteMdp, inside: &mut [bool], members: &mut Vec<usize>) {
    loop {
        let before = members.len();
        members.retain(|&i| {
            let ok = if mdp.is_controller(i) {
                mdp.succ(i).iter().any(|&j| inside[j])
            } else {
                mdp.succ(i).iter().all(|&j| inside[j])
            };
            if !ok {
                inside[i] = false;
            }
            ok
        });
        if members.len() == before {
            return;
        }
    }
}

/// Maximal end components of the sub-MDP on the `allowed` states.
pub fn mecs_within(mdp: &FiniteMdp, allowed: &[bool]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut work: Vec<Vec<usize>> = vec![(0..mdp.len()).filter(|&i| allowed[i]).collect()];
    let mut inside = vec![false; mdp.len()];
    while let Some(mut members) = work.pop() {
        for &i in &members {
            inside[i] = true;
        }
        prune(mdp, &mut inside, &mut members);
        if members.is_empty() {
            continue;
        }
        let mut g: DiGraph<usize, ()> = DiGraph::new();
        let mut node = std::collections::HashMap::new();
        for &i in &members {
            node.insert(i, g.add_node(i));
        }
        for &i in &members {
            for &j in mdp.succ(i) {
                if inside[j] {
                    g.add_edge(node[&i], node[&j], ());
                }
            }
        }
        for &i in &members {
            inside[i] = false;
        }
        let sccs = tarjan_scc(&g);
        if sccs.len() == 1 {
            let mut c = members;
            c.sort_unstable();
            out.push(c);
        } else {
            for scc in sccs {
                work.push(scc.into_iter().map(|n| g[n]).collect());
            }
        }
    }
    out.sort();
    out
}

/// Whether `set` is an end component: closed under random successors, every
/// controller keeps a successor inside, and strongly connected inside.
pub fn is_end_component(mdp: &FiniteMdp, set: &[usize]) -> bool {
    if set.is_empty() {
        return false;
    }
    let mut inside = vec![false; mdp.len()];
    for &i in set {
        inside[i] = true;
    }
    for &i in set {
        let ok = if mdp.is_controller(i) {
            mdp.succ(i).iter().any(|&j| inside[j])
        } else {
            mdp.succ(i).iter().all(|&j| inside[j])
        };
        if !ok {
            return false;
        }
    }
    let reach = |from: usize, forward: bool| {
        let mut seen = vec![false; mdp.len()];
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(a) = stack.pop() {
            for &b in set {
                let edge = if forward { mdp.succ(a).contains(&b) } else { mdp.succ(b).contains(&a) };
                if edge && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        set.iter().all(|&b| seen[b])
    };
    reach(set[0], true) && reach(set[0], false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::MdpBuilder;
    use crate::rational::ratio;

    #[test]
    fn absorbing_state_is_a_mec() {
        let mut b = MdpBuilder::new();
        b.random("a", 0).prob_edge("a", "a", ratio(1, 1));
        assert_eq!(mec_decomposition(&b.build().unwrap()), vec![vec![0]]);
    }

    #[test]
    fn leaky_random_state_splits_component() {
        // c <-> r, but r leaks to sink d: only d is an end component.
        let mut b = MdpBuilder::new();
        b.controller("c", 0).random("r", 0).random("d", 0);
        b.edge("c", "r");
        b.prob_edge("r", "c", ratio(1, 2)).prob_edge("r", "d", ratio(1, 2));
        b.prob_edge("d", "d", ratio(1, 1));
        let m = b.build().unwrap();
        let mecs = mec_decomposition(&m);
        assert_eq!(mecs, vec![vec![m.require(&"d".into()).unwrap()]]);
        for c in &mecs {
            assert!(is_end_component(&m, c));
        }
    }

    #[test]
    fn controller_cycle_is_a_mec() {
        let mut b = MdpBuilder::new();
        b.controller("a", 0).controller("b", 0).controller("x", 0);
        b.edge("a", "b").edge("b", "a").edge("b", "x").edge("x", "x");
        let m = b.build().unwrap();
        let mecs = mec_decomposition(&m);
        assert_eq!(mecs.len(), 2);
        assert!(mecs.iter().all(|c| is_end_component(&m, c)));
    }
}

//! Certificates that a finite-memory strategy wins nothing on the ladder and
//! star examples.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::Serialize;

use super::excursion::{Class, Excursion};
use crate::error::{Error, Result};
use crate::gallery::GalleryEntry;
use crate::mdp::{product_step, StateId, Transducer};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug)]
pub struct FutilityOptions {
    /// Product states explored per anchor mode.
    pub node_cap: usize,
}

impl Default for FutilityOptions {
    fn default() -> Self {
        FutilityOptions { node_cap: 1024 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModeBound {
    pub mode: String,
    /// Lower bound on the probability of the fatal state before the next
    /// anchor visit.
    #[serde(with = "rational::serde_str")]
    pub c: Rational,
    pub product_states: usize,
    /// Probability mass left beyond the exploration cap.
    #[serde(with = "rational::serde_str")]
    pub unexplored: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct FutilityCertificate {
    pub entry: String,
    pub objective: String,
    pub modes: Vec<ModeBound>,
    /// Minimum over all anchor modes.
    #[serde(with = "rational::serde_str")]
    pub c: Rational,
    pub product_states: usize,
    /// Every bound was recomputed with a reversed elimination order.
    pub order_checked: bool,
    pub conclusion: String,
    pub case_split: Option<String>,
}

fn conclusion(entry: &str, fatal: &StateId) -> Result<(String, Option<String>)> {
    Ok(match entry {
        "fig2a" => (
            format!("{fatal} (color 3) recurs almost surely whenever s:0 recurs; otherwise the play ends on color 1; value 0"),
            None,
        ),
        "fig3a" => (format!("{fatal} is reached almost surely; value 0"), None),
        "fig3b" => (format!("{fatal} (color 1) recurs almost surely; value 0"), None),
        "fig2b" => (
            "value 0".to_string(),
            Some(format!(
                "if s:0 recurs, {fatal} is reached almost surely; if s:0 is visited finitely often, \
                 the play eventually climbs through color-1 states forever"
            )),
        ),
        other => return Err(Error::Unsupported(format!("no futility argument for {other}"))),
    })
}

/// Bounds, for every mode the transducer can hold at the anchor, the chance
/// that the next excursion meets the fatal state.
pub fn fr_futility(entry: &GalleryEntry, t: &Transducer, opts: FutilityOptions) -> Result<FutilityCertificate> {
    t.validate()?;
    let (anchor, fatal) =
        entry.anchor.clone().ok_or_else(|| Error::Unsupported(format!("{} has no anchor", entry.name)))?;
    let (text, case_split) = conclusion(&entry.name, &fatal)?;
    let mdp = entry.mdp.as_ref();
    if mdp.initial() != anchor {
        return Err(Error::Unsupported(format!("{} does not start at its anchor", entry.name)));
    }
    let mut todo = vec![t.initial_mode()];
    let mut done: BTreeSet<usize> = BTreeSet::new();
    let mut modes = Vec::new();
    let mut total = 0;
    while let Some(m) = todo.pop() {
        if !done.insert(m) {
            continue;
        }
        let ex = Excursion::explore(
            (m, anchor.clone()),
            opts.node_cap,
            |(_, s)| {
                if *s == anchor {
                    Class::Return
                } else if *s == fatal {
                    Class::Hit
                } else {
                    Class::Inner
                }
            },
            |(mode, s)| product_step(mdp, t, *mode, s),
        )?;
        let c = ex.hit()?;
        if c != ex.hit_with(true)? {
            return Err(Error::Internal(format!(
                "excursion bound of mode {} depends on elimination order",
                t.modes()[m]
            )));
        }
        if c.is_zero() {
            return Err(Error::ZeroBound { mode: t.modes()[m].clone() });
        }
        let unexplored = ex.unexplored()?;
        let mut next: Vec<usize> = ex.returns().map(|(m2, _)| *m2).collect();
        if !unexplored.is_zero() {
            // Returns beyond the cap may carry any mode reachable from here.
            let mut seen = BTreeSet::from([m]);
            let mut stack = vec![m];
            while let Some(a) = stack.pop() {
                for b in t.mode_successors(a) {
                    if seen.insert(b) {
                        stack.push(b);
                    }
                }
            }
            next.extend(seen);
        }
        todo.extend(next.into_iter().filter(|x| !done.contains(x)));
        total += ex.nodes.len();
        modes.push(ModeBound { mode: t.modes()[m].clone(), c, product_states: ex.nodes.len(), unexplored });
    }
    let c = modes.iter().map(|b| b.c.clone()).min().expect("initial mode analysed");
    Ok(FutilityCertificate {
        entry: entry.name.clone(),
        objective: entry.objective.to_string(),
        modes,
        c,
        product_states: total,
        order_checked: true,
        conclusion: text,
        case_split,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::mdp::MdStrategy;
    use crate::rational::ratio;

    #[test]
    fn one_mode_r0_is_certain() {
        let md = MdStrategy::from_pairs([("s:0", "r:0"), ("t", "s:0")]);
        let cert =
            fr_futility(&gallery::fig2a_parity123(), &Transducer::from_md(&md), FutilityOptions::default()).unwrap();
        assert_eq!(cert.c, ratio(1, 1));
    }

    #[test]
    fn climbing_forever_has_no_bound() {
        let md = MdStrategy::from_pairs([("s", "r:1")]);
        let mut t = Transducer::from_md(&md);
        t.default_choice(0, vec![(0, ratio(1, 1))]);
        let cert = fr_futility(&gallery::fig3a_safety(), &t, FutilityOptions::default()).unwrap();
        assert_eq!(cert.c, ratio(1, 2));
        let mut up = Transducer::new(["m"]).unwrap();
        up.default_choice(0, vec![(1, ratio(1, 1))]);
        let err = fr_futility(&gallery::fig2a_parity123(), &up, FutilityOptions { node_cap: 64 }).unwrap_err();
        assert!(matches!(err, Error::ZeroBound { .. }));
    }

    #[test]
    fn fig2b_is_case_split() {
        let mut t = Transducer::new(["a", "b"]).unwrap();
        t.default_choice(0, vec![(0, ratio(1, 3)), (1, ratio(2, 3))]);
        t.default_choice(1, vec![(0, ratio(1, 2)), (1, ratio(1, 2))]);
        t.on_update(0, "s:1".into(), vec![(1, ratio(1, 1))]);
        let cert = fr_futility(&gallery::fig2b_buchi(), &t, FutilityOptions::default()).unwrap();
        assert!(cert.case_split.is_some());
        assert!(cert.c > Rational::zero());
    }
}

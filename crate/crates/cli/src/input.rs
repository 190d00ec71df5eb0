use std::collections::BTreeSet;
use std::path::Path;

use mdpsynth::gallery::{self, GalleryEntry};
use mdpsynth::mdp::json::{mdp_from_json, strategy_from_json, transducer_from_json};
use mdpsynth::{FiniteMdp, MdStrategy, Objective, StatePredicate, Transducer};

use crate::{CliError, ObjectiveArgs, ObjectiveKind};

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

pub fn mdp(path: &Path) -> Result<FiniteMdp, CliError> {
    Ok(mdp_from_json(&read(path)?)?)
}

pub fn strategy(path: &Path) -> Result<MdStrategy, CliError> {
    Ok(strategy_from_json(&read(path)?)?.0)
}

pub fn transducer(path: &Path) -> Result<Transducer, CliError> {
    Ok(transducer_from_json(&read(path)?)?)
}

pub fn gallery(name: &str) -> Result<GalleryEntry, CliError> {
    gallery::by_name(name)
        .map_err(|_| CliError::Usage(format!("unknown gallery entry `{name}`; known: {}", gallery::NAMES.join(", "))))
}

/// Builds the objective; `colors` is the color set of the MDP it applies to.
pub fn objective(a: &ObjectiveArgs, colors: &BTreeSet<u32>) -> Result<Objective, CliError> {
    let fixed = |set: &[u32]| -> Result<Objective, CliError> {
        let set: BTreeSet<u32> = set.iter().copied().collect();
        if let Some(c) = colors.iter().find(|c| !set.contains(c)) {
            return Err(CliError::Input(format!("color {c} is outside the objective's colors {set:?}")));
        }
        Ok(Objective::Parity(set))
    };
    match a.objective {
        ObjectiveKind::Reach => Ok(Objective::Reach(predicate(&a.target, &a.target_colors, "--target")?)),
        ObjectiveKind::Safety => {
            if a.avoid.is_empty() && a.avoid_colors.is_empty() {
                Ok(Objective::Safety(StatePredicate::NotColors([0].into())))
            } else {
                Ok(Objective::Safety(predicate(&a.avoid, &a.avoid_colors, "--avoid")?))
            }
        }
        ObjectiveKind::Parity if a.colors.is_empty() => {
            Objective::parity(colors.iter().copied()).map_err(CliError::from)
        }
        ObjectiveKind::Parity => fixed(&a.colors),
        ObjectiveKind::Buchi => fixed(&[1, 2]),
        ObjectiveKind::Cobuchi => fixed(&[0, 1]),
        ObjectiveKind::Parity012 => fixed(&[0, 1, 2]),
    }
}

fn predicate(ids: &[String], colors: &[u32], flag: &str) -> Result<StatePredicate, CliError> {
    match (ids.is_empty(), colors.is_empty()) {
        (false, true) => Ok(StatePredicate::states(ids.iter().map(String::as_str))),
        (true, false) => Ok(StatePredicate::Colors(colors.iter().copied().collect())),
        (true, true) => Err(CliError::Usage(format!("the objective needs {flag} or {flag}-colors"))),
        (false, false) => Err(CliError::Usage(format!("give either {flag} or {flag}-colors, not both"))),
    }
}

/// Rejects state names the MDP does not have.
pub fn check_states(mdp: &FiniteMdp, obj: &Objective) -> Result<(), CliError> {
    let named = match obj {
        Objective::Reach(StatePredicate::States(s)) | Objective::Safety(StatePredicate::States(s)) => s,
        _ => return Ok(()),
    };
    for s in named {
        mdp.require(s)?;
    }
    Ok(())
}

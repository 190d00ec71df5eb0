use super::{objective_value_opts, Backend, FloatOptions, Values};
use crate::error::Result;
use crate::mdp::{truncate, Boundary, CountableMdp, Objective, StateId};
use crate::rational::{self, Rational};

/// Per-state `[lower, upper]` value bounds on the states of a truncation.
#[derive(Clone, Debug)]
pub struct ValueBounds {
    pub ids: Vec<StateId>,
    pub lower: Values,
    pub upper: Values,
    pub radius: usize,
}

fn pick(v: &Values, i: usize) -> f64 {
    match v {
        Values::Exact(x) => rational::to_f64(&x[i]),
        Values::Float(x) => x[i],
    }
}

impl ValueBounds {
    pub fn position(&self, id: &StateId) -> Option<usize> {
        self.ids.binary_search(id).ok()
    }

    pub fn lower(&self, i: usize) -> f64 {
        pick(&self.lower, i)
    }

    pub fn upper(&self, i: usize) -> f64 {
        pick(&self.upper, i)
    }

    pub fn exact(&self, i: usize) -> Option<(&Rational, &Rational)> {
        match (&self.lower, &self.upper) {
            (Values::Exact(l), Values::Exact(u)) => Some((&l[i], &u[i])),
            _ => None,
        }
    }

    pub fn gap(&self, i: usize) -> f64 {
        self.upper(i) - self.lower(i)
    }

    pub fn max_gap(&self) -> f64 {
        (0..self.ids.len()).map(|i| self.gap(i)).fold(0.0, f64::max)
    }
}

/// Lower bounds from the pessimistic truncation and upper bounds from the
/// optimistic one, on the states within `radius` of the initial state.
pub fn value_bounds(
    mdp: &dyn CountableMdp,
    objective: &Objective,
    radius: usize,
    branch_cap: Option<usize>,
    backend: Backend,
) -> Result<ValueBounds> {
    value_bounds_opts(mdp, objective, radius, branch_cap, backend, FloatOptions::default())
}

pub fn value_bounds_opts(
    mdp: &dyn CountableMdp,
    objective: &Objective,
    radius: usize,
    branch_cap: Option<usize>,
    backend: Backend,
    opts: FloatOptions,
) -> Result<ValueBounds> {
    let solve = |boundary| -> Result<(Vec<StateId>, Values)> {
        let t = truncate(mdp, objective, radius, boundary, branch_cap)?;
        let v = objective_value_opts(&t.mdp, &t.objective, backend, opts)?;
        let ids: Vec<StateId> = t.retained().cloned().collect();
        let idx: Vec<usize> = ids.iter().map(|s| t.mdp.index_of(s).expect("retained")).collect();
        let values = match v.values {
            Values::Exact(x) => Values::Exact(idx.iter().map(|&i| x[i].clone()).collect()),
            Values::Float(x) => Values::Float(idx.iter().map(|&i| x[i]).collect()),
        };
        Ok((ids, values))
    };
    let (ids, lower) = solve(Boundary::Pessimistic)?;
    let (_, upper) = solve(Boundary::Optimistic)?;
    Ok(ValueBounds { ids, lower, upper, radius })
}

//! Value computation on finite MDPs and two-sided bounds on countable ones.

mod bounds;
mod chain;
pub mod linear;
mod mec;
mod parity;
mod reach;

use serde::{Deserialize, Serialize};

pub use bounds::{value_bounds, value_bounds_opts, ValueBounds};
pub use chain::{chain_reach_exact, Chain};
pub use mec::{is_end_component, mec_decomposition, mecs_within};
pub use parity::{parity_value, parity_value_opts, parity_value_with, winning_ec_states};
pub use reach::{
    optimal_reach, reach_value, reach_value_with, safety_value, safety_value_opts, safety_value_with, Mode,
    ReachSolution, ITERATION_CAP, TOLERANCE,
};

use crate::error::{Error, Result};
use crate::mdp::{FiniteMdp, Objective, StateId};
use crate::rational::{self, Rational};

/// States up to which the exact backend is chosen automatically.
pub const EXACT_STATE_LIMIT: usize = 10_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Auto,
    Exact,
    Float,
}

impl Backend {
    /// Concrete backend for an instance of `n` states.
    pub fn resolve(self, n: usize) -> Backend {
        match self {
            Backend::Auto if n <= EXACT_STATE_LIMIT => Backend::Exact,
            Backend::Auto => Backend::Float,
            b => b,
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Backend::Auto),
            "exact" | "rational" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(Error::Parse(format!("unknown backend `{other}`"))),
        }
    }
}

/// Stopping rules of Gauss–Seidel iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatOptions {
    /// Sweeps stop once no value moves by this much.
    pub tolerance: f64,
    pub iteration_cap: u64,
}

impl Default for FloatOptions {
    fn default() -> Self {
        FloatOptions { tolerance: TOLERANCE, iteration_cap: ITERATION_CAP }
    }
}

impl FloatOptions {
    pub fn check(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::OutOfRange(format!("tolerance {} must be positive", self.tolerance)));
        }
        if self.iteration_cap == 0 {
            return Err(Error::OutOfRange("iteration cap must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Values {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

/// Per-state values with the backend that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueVector {
    pub ids: Vec<StateId>,
    pub values: Values,
    /// Gauss–Seidel sweeps or policy-iteration rounds used.
    pub iterations: u64,
}

impl ValueVector {
    pub fn exact(ids: Vec<StateId>, v: Vec<Rational>, iterations: u64) -> Self {
        ValueVector { ids, values: Values::Exact(v), iterations }
    }

    pub fn backend(&self) -> Backend {
        match self.values {
            Values::Exact(_) => Backend::Exact,
            Values::Float(_) => Backend::Float,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn as_exact(&self) -> Option<&[Rational]> {
        match &self.values {
            Values::Exact(v) => Some(v),
            Values::Float(_) => None,
        }
    }

    pub fn exact_or_err(&self) -> Result<&[Rational]> {
        self.as_exact().ok_or_else(|| Error::Internal("exact values required".into()))
    }

    pub fn f64(&self, i: usize) -> f64 {
        match &self.values {
            Values::Exact(v) => rational::to_f64(&v[i]),
            Values::Float(v) => v[i],
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.f64(i)).collect()
    }

    pub fn position(&self, id: &StateId) -> Option<usize> {
        self.ids.iter().position(|s| s == id)
    }

    pub fn by_id(&self, id: &StateId) -> Option<f64> {
        self.position(id).map(|i| self.f64(i))
    }

    pub fn exact_by_id(&self, id: &StateId) -> Option<&Rational> {
        let i = self.position(id)?;
        self.as_exact().map(|v| &v[i])
    }

    /// Canonical text of value `i`: a rational or a decimal.
    pub fn text(&self, i: usize) -> String {
        match &self.values {
            Values::Exact(v) => rational::format(&v[i]),
            Values::Float(v) => format!("{:.12}", v[i]),
        }
    }
}

/// Optimal value of `obj` on a finite MDP.
pub fn objective_value(mdp: &FiniteMdp, obj: &Objective, backend: Backend) -> Result<ValueVector> {
    objective_value_opts(mdp, obj, backend, FloatOptions::default())
}

pub fn objective_value_opts(
    mdp: &FiniteMdp,
    obj: &Objective,
    backend: Backend,
    opts: FloatOptions,
) -> Result<ValueVector> {
    match obj {
        Objective::Reach(t) => reach_value_with(mdp, &t.mask(mdp), Mode::Max, backend, opts),
        Objective::Safety(t) => safety_value_opts(mdp, &t.mask(mdp), backend, opts),
        Objective::Parity(_) => parity_value_opts(mdp, backend, opts),
        Objective::Rabin(_) | Objective::Streett(_) => {
            Err(Error::Unsupported(format!("quantitative {} values", obj.name())))
        }
    }
}

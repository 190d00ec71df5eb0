//! Strategy synthesis and analysis for countable Markov decision processes
//! with parity-class objectives.
//!
//! The crate is organised bottom-up:
//!
//! - [`mdp`]: states, finite and lazily generated MDPs, objectives,
//!   strategies, lassos, strategy products and truncation.
//! - [`gallery`]: builders for the counterexample MDPs together with the
//!   infinite-memory strategies that win them.
//! - [`values`]: exact and iterative value computation (reachability,
//!   safety, parity), end components and two-sided truncation bounds.
//! - [`synthesis`]: MD strategy constructions (optimal-avoiding safety,
//!   conditioned MDP, almost-sure gluing, optimal parity, epsilon-optimal
//!   reachability and co-Büchi).
//! - [`evaluation`]: exact strategy evaluation, seeded simulation,
//!   Borel–Cantelli sums and finite-memory futility certificates.

pub mod error;
pub mod evaluation;
pub mod gallery;
pub mod mdp;
pub mod rational;
pub mod synthesis;
pub mod values;

pub use error::{Error, Result};
pub use mdp::{
    CountableMdp, FiniteMdp, Lasso, MdStrategy, MdpBuilder, Objective, StateId, StateKind, StatePredicate, Successors,
    Transducer,
};
pub use rational::Rational;

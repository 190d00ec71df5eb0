//! Acceptance suite for `mdpsynth`: seeded instance generators, a
//! brute-force MD-enumeration oracle and the twelve acceptance criteria.

pub mod criteria;
pub mod gen;
pub mod oracle;

use std::time::{Duration, Instant};

use serde::Serialize;

/// Criteria known to be out of reach; they still run and report FAIL.
pub const UNATTAINABLE: [u32; 1] = [11];

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub budget_ms: u128,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} {}: {} [{} ms, budget {} ms]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed_ms,
            self.budget_ms
        )
    }
}

type Criterion = (u32, &'static str, fn() -> criteria::Check, Duration);

pub const CRITERIA: [Criterion; 12] = [
    (1, "borel-cantelli sums", criteria::borel_cantelli, Duration::from_secs(1)),
    (2, "safety dichotomy on fig3a", criteria::safety_dichotomy, Duration::from_secs(5)),
    (3, "finite-memory futility on fig2a", criteria::fr_futility_suite, Duration::from_secs(10)),
    (4, "opt-av optimality", criteria::opt_av_optimality, Duration::from_secs(60)),
    (5, "conditioned cylinder identity", criteria::cylinder_identity, Duration::from_secs(5)),
    (6, "optimal MD pipeline", criteria::optimal_pipeline, Duration::from_secs(300)),
    (7, "eps-optimal co-buchi", criteria::eps_cobuchi, Duration::from_secs(120)),
    (8, "safe two levels", criteria::safe_two_levels, Duration::from_secs(60)),
    (9, "return to safe", criteria::return_to_safe, Duration::from_secs(60)),
    (10, "lasso acceptance equivalence", criteria::lasso_equivalence, Duration::from_secs(5)),
    (11, "gambler's ruin bounds", criteria::gamblers_ruin_bounds, Duration::from_secs(10)),
    (12, "simulation calibration", criteria::simulation_calibration, Duration::from_secs(120)),
];

/// Runs one criterion; exceeding the time budget counts as failure.
pub fn run(id: u32) -> Option<Outcome> {
    let (id, name, f, budget) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if passed && elapsed > *budget {
        passed = false;
        detail = format!("{detail}; over time budget");
    }
    Some(Outcome { id: *id, name, passed, detail, elapsed_ms: elapsed.as_millis(), budget_ms: budget.as_millis() })
}

pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().filter_map(|c| run(c.0)).collect()
}

//! Strategy evaluation: exact values, simulation, Borel–Cantelli sums and
//! finite-memory futility certificates.

mod borel_cantelli;
mod exact;
mod excursion;
mod futility;
mod simulate;

pub use borel_cantelli::{borel_cantelli_sum, BorelCantelli};
pub use exact::{chain_value, md_value, winning_bsccs};
pub use futility::{fr_futility, FutilityCertificate, FutilityOptions, ModeBound};
pub use simulate::{
    episode_rng, simulate, splitmix64, Event, EventFrequency, SimConfig, SimulationReport, RNG_ALGORITHM,
};

//! MDPs, objectives, strategies, lassos, products and truncation.

mod countable;
pub mod dot;
mod finite;
pub mod json;
mod lasso;
mod objective;
mod product;
mod state;
mod strategy;
mod truncate;

pub use countable::{CountableMdp, LazyMdp, StateInfo, Successors};
pub use finite::{FiniteMdp, MdpBuilder, ValidationReport, Violation};
pub use lasso::{accepts, accepts_in, Lasso};
pub use objective::{Objective, StatePredicate};
pub use product::{fix_md, fix_md_from, fix_md_total, product, product_id, product_step, ProductChain};
pub use state::{StateId, StateKind};
pub use strategy::{is_distribution, CounterStrategy, MdStrategy, Strategy, Transducer, SUCCESSOR_SEARCH_CAP};
pub use truncate::{truncate, Boundary, Truncation, SINK};

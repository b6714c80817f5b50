//! Evolutionary algorithm laboratory on pseudo-Boolean functions: a
//! (μ+λ) GA with uniform and k-point crossover, closed-form runtime
//! bounds with exact oracles, and a seeded experiment harness.

pub mod bitstring;
pub mod engine;
pub mod error;
pub mod fitness;
pub mod harness;
pub mod seed;
pub mod stats;
pub mod theory;
pub mod variation;

pub use bitstring::Bitstring;
pub use engine::{run_ga, run_ga_with, GaConfig, Observer, OffspringEvent, RunResult, TracePoint, DEFAULT_BUDGET};
pub use error::{Error, Result};
pub use fitness::{FitnessKind, FitnessSpec, FitnessValue, FunctionRecipe};
pub use stats::{mann_whitney_u, summarize, MwuMode, MwuResult, SampleSummary};
pub use variation::{CrossoverKind, Individual, ParentSelectionKind, TieBreakKind};

//! Closed-form runtime bounds and the exact probabilities behind them.

pub mod bounds;
pub mod crossover;
pub mod distance;
pub mod mutation;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use bounds::{
    lb_greedy_ga_dominant, lb_mutation_based, max_term, optimal_c, runtime_coefficient, scan_argmin_coefficient,
    ub_ga_dominant, ub_ga_full,
};
pub use crossover::{
    ratio_to_f64, separating_odd_bruteforce, separating_odd_exact, separating_odd_extended, separating_odd_lower_bound,
    separating_odd_prob, surplus_prob,
};
pub use distance::{distance_dominance_check, distance_dominance_exact, DominanceReport};
pub use mutation::{
    jump_prob_bound, level_transition_prob, max_jump_prob, neutral_far_prob_exact, neutral_mutation_bounds,
    neutral_mutation_prob_exact, NeutralBounds,
};

/// Names of the evaluable formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormulaId {
    LbMutationBased,
    UbGaDominant,
    UbGaFull,
    LbGreedyGaDominant,
    MaxTerm,
    OptimalC,
    SeparatingOdd,
    SurplusProb,
    NeutralMutation,
    JumpProbBound,
}

impl FormulaId {
    pub fn all() -> &'static [FormulaId] {
        use FormulaId::*;
        &[
            LbMutationBased,
            UbGaDominant,
            UbGaFull,
            LbGreedyGaDominant,
            MaxTerm,
            OptimalC,
            SeparatingOdd,
            SurplusProb,
            NeutralMutation,
            JumpProbBound,
        ]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FormulaId::LbMutationBased => "lb_mutation_based",
            FormulaId::UbGaDominant => "ub_ga_dominant",
            FormulaId::UbGaFull => "ub_ga_full",
            FormulaId::LbGreedyGaDominant => "lb_greedy_ga_dominant",
            FormulaId::MaxTerm => "max_term",
            FormulaId::OptimalC => "optimal_c",
            FormulaId::SeparatingOdd => "separating_odd",
            FormulaId::SurplusProb => "surplus_prob",
            FormulaId::NeutralMutation => "neutral_mutation",
            FormulaId::JumpProbBound => "jump_prob_bound",
        }
    }

    /// Argument names, in the order they are printed.
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            FormulaId::LbMutationBased => &["n", "p"],
            FormulaId::UbGaDominant | FormulaId::LbGreedyGaDominant => &["n", "c"],
            FormulaId::UbGaFull => &["n", "p", "mu", "lambda"],
            FormulaId::MaxTerm => &["c"],
            FormulaId::OptimalC => &[],
            FormulaId::SeparatingOdd => &["N", "d", "k"],
            FormulaId::SurplusProb => &["d"],
            FormulaId::NeutralMutation => &["n", "i", "p"],
            FormulaId::JumpProbBound => &["n", "i", "p"],
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormulaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormulaId::all().iter().copied().find(|id| id.as_str() == s).ok_or_else(|| {
            let known: Vec<&str> = FormulaId::all().iter().map(|id| id.as_str()).collect();
            Error::invalid("formula", format!("unknown formula '{s}'; known: {}", known.join(", ")))
        })
    }
}

/// An evaluated formula.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub formula_id: FormulaId,
    pub value: f64,
    /// True when the formula has terms without a stated constant, which are
    /// left out of `value`.
    pub dominant_only: bool,
    /// Unscaled shape of a dropped big-O term, when one is worth reporting.
    pub remainder_shape: Option<f64>,
}

impl BoundReport {
    pub fn new(formula_id: FormulaId, value: f64, dominant_only: bool) -> Self {
        Self { formula_id, value, dominant_only, remainder_shape: None }
    }
}

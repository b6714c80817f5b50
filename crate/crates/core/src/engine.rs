//! The (μ+λ) GA main loop. The greedy (2+1) GA and the (1+1) EA are
//! configurations of the same loop.
//!
//! Optimization time is the number of fitness evaluations up to and
//! including the first evaluation of an optimal search point; the
//! μ evaluations of the initial population are counted.

use rand::Rng;

use crate::bitstring::Bitstring;
use crate::error::{Error, Result};
use crate::fitness::{FitnessSpec, FitnessValue};
use crate::seed::rng_from_seed;
use crate::variation::{
    environmental_selection, select_parent_index, BitMutation, CrossoverKind, Individual, ParentSelectionKind,
    TieBreakKind,
};

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct GaConfig {
    pub n: usize,
    pub mu: usize,
    pub lambda: usize,
    /// Mutation rate.
    pub p: f64,
    /// Crossover probability.
    pub p_c: f64,
    pub crossover: CrossoverKind,
    pub selection: ParentSelectionKind,
    pub tiebreak: TieBreakKind,
    /// Evaluation cap.
    pub budget: u64,
    pub seed: u64,
    /// Record best fitness after every generation.
    pub record_trace: bool,
}

impl GaConfig {
    /// Greedy (2+1) GA: μ=2, λ=1, crossover always applied, parents drawn
    /// from the current best, uniform crossover and dup-rnd by default.
    pub fn greedy_2plus1(n: usize, p: f64) -> Self {
        GaConfig {
            n,
            mu: 2,
            lambda: 1,
            p,
            p_c: 1.0,
            crossover: CrossoverKind::Uniform,
            selection: ParentSelectionKind::GreedyOverBest,
            tiebreak: TieBreakKind::DupRnd,
            budget: DEFAULT_BUDGET,
            seed: 0,
            record_trace: false,
        }
    }

    /// (1+1) EA: one parent, one offspring by standard bit mutation.
    pub fn one_plus_one_ea(n: usize, p: f64) -> Self {
        GaConfig {
            n,
            mu: 1,
            lambda: 1,
            p,
            p_c: 0.0,
            crossover: CrossoverKind::Uniform,
            selection: ParentSelectionKind::UniformOverPopulation,
            tiebreak: TieBreakKind::DupRnd,
            budget: DEFAULT_BUDGET,
            seed: 0,
            record_trace: false,
        }
    }

    pub fn with_crossover(mut self, crossover: CrossoverKind) -> Self {
        self.crossover = crossover;
        self
    }

    pub fn with_tiebreak(mut self, tiebreak: TieBreakKind) -> Self {
        self.tiebreak = tiebreak;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_trace(mut self, record: bool) -> Self {
        self.record_trace = record;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n", "length must be positive"));
        }
        if self.mu == 0 {
            return Err(Error::invalid("mu", "must be at least 1"));
        }
        if self.lambda == 0 {
            return Err(Error::invalid("lambda", "must be at least 1"));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::invalid("p", format!("mutation rate {} outside (0, 1)", self.p)));
        }
        if !(0.0..=1.0).contains(&self.p_c) {
            return Err(Error::invalid("p_c", format!("crossover probability {} outside [0, 1]", self.p_c)));
        }
        if let CrossoverKind::KPoint(k) = self.crossover {
            if self.p_c > 0.0 && (k == 0 || k + 1 > self.n) {
                return Err(Error::invalid(
                    "k",
                    format!("{k}-point crossover needs 1 <= k <= n-1 = {}", self.n.saturating_sub(1)),
                ));
            }
        }
        if self.budget < self.mu as u64 {
            return Err(Error::invalid(
                "budget",
                format!("{} evaluations cannot cover the initial population of {}", self.budget, self.mu),
            ));
        }
        Ok(())
    }

    /// Conditions under which k-point crossover with dup-old provably
    /// reaches the same leading-term bound as uniform crossover. Returns
    /// the violated conditions, empty when all hold.
    ///
    /// The asymptotic requirement on `p_c` is checked as `0 < p_c < 1`.
    pub fn kpoint_regime_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self.crossover {
            CrossoverKind::KPoint(k) if k >= 1 && k + 2 <= self.n => {}
            CrossoverKind::KPoint(k) => out.push(format!("k={k} outside 1..=n-2={}", self.n.saturating_sub(2))),
            CrossoverKind::Uniform => out.push("crossover is not k-point".to_string()),
        }
        if self.tiebreak != TieBreakKind::DupOld {
            out.push("tie-breaking is not dup-old".to_string());
        }
        if self.mu < 2 {
            out.push(format!("mu={} < 2", self.mu));
        }
        if self.lambda >= self.mu {
            out.push(format!("lambda={} >= mu={}", self.lambda, self.mu));
        }
        if !(self.p_c > 0.0 && self.p_c < 1.0) {
            out.push(format!("p_c={} not in (0, 1)", self.p_c));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TracePoint {
    pub generation: u64,
    pub evaluations: u64,
    pub best: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    /// Evaluations until the optimum was first evaluated, or the budget.
    pub evaluations: u64,
    /// Generations started, including the one that found the optimum.
    pub generations: u64,
    pub success: bool,
    pub seed: u64,
    pub trace: Option<Vec<TracePoint>>,
}

/// One offspring creation, reported to an [`Observer`].
pub struct OffspringEvent<'a> {
    pub generation: u64,
    pub first_parent: &'a Individual,
    /// Present when crossover was applied.
    pub second_parent: Option<&'a Individual>,
    /// Crossover result before mutation.
    pub recombined: Option<&'a Bitstring>,
    pub flips: usize,
    pub offspring: &'a Individual,
}

/// Hooks into a running GA. All methods default to no-ops.
pub trait Observer {
    fn on_offspring(&mut self, _event: &OffspringEvent<'_>) {}

    /// Called with the initial population (generation 0) and after every
    /// completed environmental selection.
    fn on_generation(&mut self, _generation: u64, _population: &[Individual]) {}
}

impl Observer for () {}

/// Runs the configured GA on `spec` until `optimum` is evaluated or the
/// budget is exhausted.
pub fn run_ga(config: &GaConfig, spec: &FitnessSpec, optimum: &FitnessValue) -> Result<RunResult> {
    run_ga_with(config, spec, optimum, None, &mut ())
}

/// As [`run_ga`], optionally starting from given genotypes and reporting
/// to `observer`.
pub fn run_ga_with(
    config: &GaConfig,
    spec: &FitnessSpec,
    optimum: &FitnessValue,
    start: Option<Vec<Bitstring>>,
    observer: &mut dyn Observer,
) -> Result<RunResult> {
    config.validate()?;
    if spec.n() != config.n {
        return Err(Error::LengthMismatch {
            expected: config.n,
            actual: spec.n(),
        });
    }
    if let Some(start) = &start {
        if start.len() != config.mu {
            return Err(Error::invalid(
                "start",
                format!("{} genotypes given for a population of {}", start.len(), config.mu),
            ));
        }
        for x in start {
            x.check_len(config.n)?;
        }
    }

    let mut rng = rng_from_seed(config.seed);
    let mutation = BitMutation::new(config.p)?;
    let mut trace = config.record_trace.then(Vec::new);
    let mut evaluations: u64 = 0;

    let finish = |evaluations, generations, success, trace| RunResult {
        evaluations,
        generations,
        success,
        seed: config.seed,
        trace,
    };

    let mut population = Vec::with_capacity(config.mu + config.lambda);
    let mut start = start.map(|v| v.into_iter());
    for _ in 0..config.mu {
        let genotype = match start.as_mut().and_then(|it| it.next()) {
            Some(x) => x,
            None => Bitstring::random(config.n, &mut rng),
        };
        let fitness = spec.eval_unchecked(&genotype);
        evaluations += 1;
        let hit = &fitness == optimum;
        population.push(Individual::new(genotype, fitness, 0));
        if hit {
            return Ok(finish(evaluations, 0, true, trace));
        }
    }
    observer.on_generation(0, &population);
    record(&mut trace, 0, evaluations, &population);

    let mut generation: u64 = 0;
    loop {
        generation += 1;
        let mut offspring = Vec::with_capacity(config.lambda);
        for _ in 0..config.lambda {
            if evaluations >= config.budget {
                return Ok(finish(evaluations, generation, false, trace));
            }
            let first = select_parent_index(&population, config.selection, &mut rng)?;
            let (second, recombined) = if config.p_c > 0.0 && rng.random_bool(config.p_c) {
                let second = select_parent_index(&population, config.selection, &mut rng)?;
                let child =
                    config
                        .crossover
                        .apply(&population[first].genotype, &population[second].genotype, &mut rng)?;
                (Some(second), Some(child))
            } else {
                (None, None)
            };
            let mut genotype = recombined.clone().unwrap_or_else(|| population[first].genotype.clone());
            let flips = mutation.apply(&mut genotype, &mut rng);
            let fitness = spec.eval_unchecked(&genotype);
            evaluations += 1;
            let hit = &fitness == optimum;
            let child = Individual::new(genotype, fitness, generation);
            observer.on_offspring(&OffspringEvent {
                generation,
                first_parent: &population[first],
                second_parent: second.map(|i| &population[i]),
                recombined: recombined.as_ref(),
                flips,
                offspring: &child,
            });
            if hit {
                return Ok(finish(evaluations, generation, true, trace));
            }
            offspring.push(child);
        }
        population = environmental_selection(
            std::mem::take(&mut population),
            offspring,
            config.mu,
            config.tiebreak,
            &mut rng,
        )?;
        observer.on_generation(generation, &population);
        record(&mut trace, generation, evaluations, &population);
    }
}

fn record(trace: &mut Option<Vec<TracePoint>>, generation: u64, evaluations: u64, population: &[Individual]) {
    if let Some(trace) = trace {
        let best = population.iter().map(|i| &i.fitness).max().expect("non-empty population");
        trace.push(TracePoint {
            generation,
            evaluations,
            best: best.as_f64(),
        });
    }
}

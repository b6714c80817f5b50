//! Experiment harness: algorithm specs, mutation-rate sweeps, pairwise
//! comparisons and formula evaluation. Backs the `ga-lab` command line.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::engine::{run_ga, GaConfig, RunResult, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::fitness::{fields, parse_field, FitnessSpec, FunctionRecipe};
use crate::seed::mix_all;
use crate::stats::{mann_whitney_u, summarize, MwuMode, MwuResult, SampleSummary, EXACT_MAX_POOLED};
use crate::theory::{self, BoundReport, FormulaId};
use crate::variation::{CrossoverKind, ParentSelectionKind, TieBreakKind};

/// Significance level used by the command line when none is given.
pub const DEFAULT_ALPHA: f64 = 1e-3;

/// Everything about an algorithm except problem size, mutation rate,
/// budget and seed.
///
/// Textual forms:
/// `ea`,
/// `greedy2+1:uniform|1pt|2pt[:dup-rnd|dup-old]`,
/// `ga:mu=<>,lambda=<>[,pc=<>][,xover=uniform|kpoint:<k>][,sel=uniform|greedy][,tie=dup-rnd|dup-old]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgoSpec {
    pub mu: usize,
    pub lambda: usize,
    pub p_c: f64,
    pub crossover: CrossoverKind,
    pub selection: ParentSelectionKind,
    pub tiebreak: TieBreakKind,
}

impl AlgoSpec {
    pub fn ea() -> Self {
        let c = GaConfig::one_plus_one_ea(1, 0.5);
        AlgoSpec::from_config(&c)
    }

    pub fn greedy(crossover: CrossoverKind, tiebreak: TieBreakKind) -> Self {
        let c = GaConfig::greedy_2plus1(1, 0.5).with_crossover(crossover).with_tiebreak(tiebreak);
        AlgoSpec::from_config(&c)
    }

    fn from_config(c: &GaConfig) -> Self {
        AlgoSpec {
            mu: c.mu,
            lambda: c.lambda,
            p_c: c.p_c,
            crossover: c.crossover,
            selection: c.selection,
            tiebreak: c.tiebreak,
        }
    }

    /// Full configuration for one run. Validation happens in the engine.
    pub fn config(&self, n: usize, p: f64, budget: u64, seed: u64) -> GaConfig {
        GaConfig {
            n,
            mu: self.mu,
            lambda: self.lambda,
            p,
            p_c: self.p_c,
            crossover: self.crossover,
            selection: self.selection,
            tiebreak: self.tiebreak,
            budget,
            seed,
            record_trace: false,
        }
    }

    fn is_ea(&self) -> bool {
        *self == AlgoSpec::ea()
    }

    fn greedy_crossover_name(&self) -> Option<&'static str> {
        let probe = AlgoSpec::greedy(self.crossover, self.tiebreak);
        if probe != *self {
            return None;
        }
        match self.crossover {
            CrossoverKind::Uniform => Some("uniform"),
            CrossoverKind::KPoint(1) => Some("1pt"),
            CrossoverKind::KPoint(2) => Some("2pt"),
            CrossoverKind::KPoint(_) => None,
        }
    }
}

impl fmt::Display for AlgoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ea() {
            return write!(f, "ea");
        }
        if let Some(x) = self.greedy_crossover_name() {
            return write!(f, "greedy2+1:{x}:{}", self.tiebreak);
        }
        write!(
            f,
            "ga:mu={},lambda={},pc={},xover={},sel={},tie={}",
            self.mu, self.lambda, self.p_c, self.crossover, self.selection, self.tiebreak
        )
    }
}

fn parse_tiebreak(input: &str, field: (usize, &str)) -> Result<TieBreakKind> {
    match field.1 {
        "dup-rnd" => Ok(TieBreakKind::DupRnd),
        "dup-old" => Ok(TieBreakKind::DupOld),
        other => Err(Error::parse(input, field.0, format!("expected dup-rnd or dup-old, found `{other}`"))),
    }
}

fn parse_crossover(input: &str, field: (usize, &str)) -> Result<CrossoverKind> {
    let (pos, text) = field;
    if text == "uniform" {
        return Ok(CrossoverKind::Uniform);
    }
    if let Some(k) = text.strip_prefix("kpoint:") {
        let k = parse_field(input, (pos + "kpoint:".len(), k), "crossover point count")?;
        if k == 0 {
            return Err(Error::parse(input, pos + "kpoint:".len(), "k must be at least 1"));
        }
        return Ok(CrossoverKind::KPoint(k));
    }
    Err(Error::parse(input, pos, format!("expected uniform or kpoint:<k>, found `{text}`")))
}

impl FromStr for AlgoSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "ea" {
            return Ok(AlgoSpec::ea());
        }
        if let Some(rest) = s.strip_prefix("greedy2+1:") {
            let offset = s.len() - rest.len();
            let parts: Vec<(usize, &str)> = fields(rest, ':').into_iter().map(|(p, t)| (p + offset, t)).collect();
            if parts.len() > 2 {
                return Err(Error::parse(s, parts[2].0, "unexpected trailing field"));
            }
            let crossover = match parts[0].1 {
                "uniform" => CrossoverKind::Uniform,
                "1pt" => CrossoverKind::KPoint(1),
                "2pt" => CrossoverKind::KPoint(2),
                other => {
                    return Err(Error::parse(s, parts[0].0, format!("expected uniform, 1pt or 2pt, found `{other}`")))
                }
            };
            let tiebreak = match parts.get(1) {
                Some(&field) => parse_tiebreak(s, field)?,
                None => TieBreakKind::DupRnd,
            };
            return Ok(AlgoSpec::greedy(crossover, tiebreak));
        }
        if let Some(rest) = s.strip_prefix("ga:") {
            let offset = s.len() - rest.len();
            let (mut mu, mut lambda) = (None, None);
            let mut spec = AlgoSpec {
                mu: 0,
                lambda: 0,
                p_c: 1.0,
                crossover: CrossoverKind::Uniform,
                selection: ParentSelectionKind::UniformOverPopulation,
                tiebreak: TieBreakKind::DupRnd,
            };
            for (pos, item) in fields(rest, ',') {
                let pos = pos + offset;
                let Some((key, value)) = item.split_once('=') else {
                    return Err(Error::parse(s, pos, format!("expected key=value, found `{item}`")));
                };
                let value_field = (pos + key.len() + 1, value);
                match key {
                    "mu" => mu = Some(parse_field::<usize>(s, value_field, "mu")?),
                    "lambda" => lambda = Some(parse_field::<usize>(s, value_field, "lambda")?),
                    "pc" => spec.p_c = parse_field(s, value_field, "crossover probability")?,
                    "xover" => spec.crossover = parse_crossover(s, value_field)?,
                    "sel" => {
                        spec.selection = match value {
                            "uniform" => ParentSelectionKind::UniformOverPopulation,
                            "greedy" => ParentSelectionKind::GreedyOverBest,
                            other => {
                                return Err(Error::parse(
                                    s,
                                    value_field.0,
                                    format!("expected uniform or greedy, found `{other}`"),
                                ))
                            }
                        }
                    }
                    "tie" => spec.tiebreak = parse_tiebreak(s, value_field)?,
                    other => return Err(Error::parse(s, pos, format!("unknown key `{other}`"))),
                }
            }
            spec.mu = mu.ok_or_else(|| Error::parse(s, s.len(), "missing mu"))?;
            spec.lambda = lambda.ok_or_else(|| Error::parse(s, s.len(), "missing lambda"))?;
            if spec.mu == 0 || spec.lambda == 0 {
                return Err(Error::parse(s, offset, "mu and lambda must be positive"));
            }
            return Ok(spec);
        }
        Err(Error::parse(s, 0, "expected `ea`, `greedy2+1:...` or `ga:...`"))
    }
}

/// Grid `start, start + step, ..., <= end` of mutation-rate multipliers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CGrid {
    pub start: f64,
    pub step: f64,
    pub end: f64,
}

impl CGrid {
    pub fn new(start: f64, step: f64, end: f64) -> Result<Self> {
        if !(start > 0.0 && start.is_finite()) {
            return Err(Error::invalid("c-grid", format!("start={start} must be positive")));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::invalid("c-grid", format!("step={step} must be positive")));
        }
        if !(end >= start && end.is_finite()) {
            return Err(Error::invalid("c-grid", format!("end={end} below start={start}")));
        }
        Ok(CGrid { start, step, end })
    }

    pub fn single(c: f64) -> Result<Self> {
        CGrid::new(c, 1.0, c)
    }

    /// Grid values, rounded to 9 decimals so that `0.1:0.1:4` yields
    /// exactly 40 points printed as `0.3`, not `0.30000000000000004`.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|j| ((self.start + j as f64 * self.step) * 1e9).round() / 1e9)
            .collect()
    }
}

impl FromStr for CGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts = fields(s, ':');
        if parts.len() != 3 {
            return Err(Error::parse(s, s.len(), "expected start:step:end"));
        }
        let start = parse_field(s, parts[0], "grid start")?;
        let step = parse_field(s, parts[1], "grid step")?;
        let end = parse_field(s, parts[2], "grid end")?;
        CGrid::new(start, step, end)
    }
}

impl fmt::Display for CGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.step, self.end)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub function: FunctionRecipe,
    pub n: usize,
    pub algo: AlgoSpec,
    pub c_grid: CGrid,
    pub runs: usize,
    pub seed: u64,
    pub budget: u64,
    pub workers: usize,
}

impl SweepSpec {
    pub fn new(function: FunctionRecipe, n: usize, algo: AlgoSpec, c_grid: CGrid, runs: usize, seed: u64) -> Self {
        SweepSpec {
            function,
            n,
            algo,
            c_grid,
            runs,
            seed,
            budget: DEFAULT_BUDGET,
            workers: 1,
        }
    }
}

/// Aggregate of all runs at one grid point. Statistics cover successful
/// runs only and are absent when no run succeeded.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub c: f64,
    pub runs: usize,
    pub successes: usize,
    pub censored: usize,
    pub summary: Option<SampleSummary>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

pub const CSV_HEADER: [&str; 9] = ["c", "runs", "successes", "censored", "mean", "std", "min", "median", "max"];

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(CSV_HEADER).expect("in-memory write");
        for row in &self.rows {
            let mut record = vec![
                row.c.to_string(),
                row.runs.to_string(),
                row.successes.to_string(),
                row.censored.to_string(),
            ];
            match &row.summary {
                Some(s) => record.extend([s.mean, s.std, s.min, s.median, s.max].map(|v| v.to_string())),
                None => record.extend(std::iter::repeat_n(String::new(), 5)),
            }
            writer.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ascii output")
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| Error::parse(text, 0, e.to_string()))?;
        if header.iter().ne(CSV_HEADER) {
            return Err(Error::parse(text, 0, format!("expected header {}", CSV_HEADER.join(","))));
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::parse(text, 0, e.to_string()))?;
            let offset = record.position().map_or(0, |p| p.byte() as usize);
            let field = |i: usize| (offset, record.get(i).unwrap_or(""));
            let runs: usize = parse_field(text, field(1), "run count")?;
            let successes: usize = parse_field(text, field(2), "success count")?;
            let censored: usize = parse_field(text, field(3), "censored count")?;
            let summary = if field(4).1.is_empty() {
                None
            } else {
                let value = |i: usize, what: &str| parse_field::<f64>(text, field(i), what);
                Some(SampleSummary {
                    count: successes,
                    mean: value(4, "mean")?,
                    std: value(5, "std")?,
                    min: value(6, "min")?,
                    median: value(7, "median")?,
                    max: value(8, "max")?,
                })
            };
            rows.push(SweepRow {
                c: parse_field(text, field(0), "c")?,
                runs,
                successes,
                censored,
                summary,
            });
        }
        Ok(SweepTable { rows })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }

    /// Grid value with the smallest mean over successful runs.
    pub fn argmin_mean(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.summary.as_ref().map(|s| (r.c, s.mean)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(c, _)| c)
    }
}

/// Pool with exactly `workers` threads.
pub fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::invalid("workers", "at least one worker is required"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))
}

/// Function used by run `run_index`: drawn anew per run for random
/// classes, shared otherwise.
fn function_for_run(recipe: &FunctionRecipe, shared: &Option<FitnessSpec>, n: usize, run_index: u64) -> Result<FitnessSpec> {
    match shared {
        Some(spec) => Ok(spec.clone()),
        None => recipe.instantiate(n, run_index),
    }
}

/// Runs `runs` independent runs; run `r` uses seed
/// `mix_all(base_seed, [domain..., r])` and function instance `r`.
/// Results are in run order whatever the worker count.
pub fn run_batch(
    recipe: &FunctionRecipe,
    n: usize,
    algo: &AlgoSpec,
    c: f64,
    runs: usize,
    base_seed: u64,
    domain: &[u64],
    budget: u64,
    pool: &rayon::ThreadPool,
) -> Result<Vec<RunResult>> {
    let shared = if recipe.is_random() { None } else { Some(recipe.instantiate(n, 0)?) };
    let p = c / n as f64;
    pool.install(|| {
        (0..runs as u64)
            .into_par_iter()
            .map(|r| {
                let mut indices = domain.to_vec();
                indices.push(r);
                let config = algo.config(n, p, budget, mix_all(base_seed, &indices));
                let spec = function_for_run(recipe, &shared, n, r)?;
                let optimum = spec.optimum();
                run_ga(&config, &spec, &optimum)
            })
            .collect()
    })
}

fn validate_common(n: usize, runs: usize, algo: &AlgoSpec, c: f64, budget: u64) -> Result<()> {
    if runs == 0 {
        return Err(Error::invalid("runs", "at least one run is required"));
    }
    // Surface configuration errors once, before spawning work.
    algo.config(n, c / n as f64, budget, 0).validate()
}

/// Runs the sweep. Run `r` at grid index `j` is seeded with
/// `mix_all(seed, [j, r])`.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    let grid = spec.c_grid.values();
    for &c in &grid {
        validate_common(spec.n, spec.runs, &spec.algo, c, spec.budget)?;
    }
    let pool = worker_pool(spec.workers)?;
    let mut rows = Vec::with_capacity(grid.len());
    for (j, &c) in grid.iter().enumerate() {
        let results = run_batch(
            &spec.function,
            spec.n,
            &spec.algo,
            c,
            spec.runs,
            spec.seed,
            &[j as u64],
            spec.budget,
            &pool,
        )?;
        let successful: Vec<f64> = results.iter().filter(|r| r.success).map(|r| r.evaluations as f64).collect();
        let successes = successful.len();
        rows.push(SweepRow {
            c,
            runs: spec.runs,
            successes,
            censored: spec.runs - successes,
            summary: if successful.is_empty() { None } else { Some(summarize(&successful)?) },
        });
    }
    Ok(SweepTable { rows })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sidedness {
    TwoSided,
    /// Alternative: the first algorithm needs fewer evaluations.
    ALess,
    BLess,
}

impl FromStr for Sidedness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two" => Ok(Sidedness::TwoSided),
            "a-less" => Ok(Sidedness::ALess),
            "b-less" => Ok(Sidedness::BLess),
            other => Err(Error::parse(s, 0, format!("expected two, a-less or b-less, found `{other}`"))),
        }
    }
}

impl fmt::Display for Sidedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sidedness::TwoSided => "two",
            Sidedness::ALess => "a-less",
            Sidedness::BLess => "b-less",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareSpec {
    pub algo_a: AlgoSpec,
    pub algo_b: AlgoSpec,
    pub function: FunctionRecipe,
    pub n: usize,
    pub c: f64,
    pub runs: usize,
    pub seed: u64,
    pub budget: u64,
    pub workers: usize,
    pub sided: Sidedness,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareOutcome {
    pub summary_a: SampleSummary,
    pub summary_b: SampleSummary,
    pub censored_a: usize,
    pub censored_b: usize,
    /// Test of the first sample against the second.
    pub mwu: MwuResult,
    /// P-value for the requested alternative.
    pub p_value: f64,
}

/// Evaluation counts of both algorithms and a Mann-Whitney U test.
///
/// Side A runs use seeds `mix_all(seed, [0, r])` and side B
/// `mix_all(seed, [1, r])`; run `r` of both sides sees function instance
/// `r`. Censored runs enter the test at their evaluation count (the budget).
pub fn compare(spec: &CompareSpec) -> Result<CompareOutcome> {
    validate_common(spec.n, spec.runs, &spec.algo_a, spec.c, spec.budget)?;
    validate_common(spec.n, spec.runs, &spec.algo_b, spec.c, spec.budget)?;
    let pool = worker_pool(spec.workers)?;
    let batch = |algo: &AlgoSpec, side: u64| {
        run_batch(&spec.function, spec.n, algo, spec.c, spec.runs, spec.seed, &[side], spec.budget, &pool)
    };
    let results_a = batch(&spec.algo_a, 0)?;
    let results_b = batch(&spec.algo_b, 1)?;
    let evals = |rs: &[RunResult]| rs.iter().map(|r| r.evaluations as f64).collect::<Vec<_>>();
    let censored = |rs: &[RunResult]| rs.iter().filter(|r| !r.success).count();
    let (a, b) = (evals(&results_a), evals(&results_b));
    let mode = if a.len() + b.len() <= EXACT_MAX_POOLED { MwuMode::Exact } else { MwuMode::Approximate };
    let mwu = mann_whitney_u(&a, &b, mode)?;
    let p_value = match spec.sided {
        Sidedness::TwoSided => mwu.p_value_two_sided,
        Sidedness::ALess => mwu.p_value_one_sided_first_less,
        Sidedness::BLess => mann_whitney_u(&b, &a, mode)?.p_value_one_sided_first_less,
    };
    Ok(CompareOutcome {
        summary_a: summarize(&a)?,
        summary_b: summarize(&b)?,
        censored_a: censored(&results_a),
        censored_b: censored(&results_b),
        mwu,
        p_value,
    })
}

/// Single run with function instance 0.
pub fn run_single(
    algo: &AlgoSpec,
    recipe: &FunctionRecipe,
    n: usize,
    c: f64,
    seed: u64,
    budget: u64,
) -> Result<RunResult> {
    let spec = recipe.instantiate(n, 0)?;
    let config = algo.config(n, c / n as f64, budget, seed);
    run_ga(&config, &spec, &spec.optimum())
}

/// Reads one number per line; blank lines and lines starting with `#` are
/// skipped.
pub fn read_samples(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let mut out = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if !trimmed.is_empty() && !trimmed.starts_with('#') {
            let start = offset + (line.len() - line.trim_start().len());
            out.push(parse_field(&text, (start, trimmed), "a number")?);
        }
        offset += line.len();
    }
    Ok(out)
}

/// Evaluates a formula from `key=value` arguments and returns the line
/// `formula_id,key=value...,value,dominant_only`.
pub fn theory_report(id: &str, args: &[String]) -> Result<String> {
    let id: FormulaId = id.parse()?;
    let mut values: Vec<(&str, &str)> = Vec::new();
    for arg in args {
        let (k, v) = arg
            .split_once('=')
            .ok_or_else(|| Error::parse(arg, 0, "expected key=value"))?;
        if !id.parameters().contains(&k) {
            return Err(Error::invalid(
                "argument",
                format!("{id} takes {}; got `{k}`", describe_params(id)),
            ));
        }
        values.push((k, v));
    }
    let get = |name: &'static str| -> Result<&str> {
        values
            .iter()
            .rev()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::invalid("argument", format!("{id} requires {}", describe_params(id))))
    };
    let real = |name: &'static str| -> Result<f64> {
        let v = get(name)?;
        v.parse().map_err(|_| Error::parse(v, 0, format!("{name} must be a number")))
    };
    let int = |name: &'static str| -> Result<u64> {
        let v = get(name)?;
        v.parse().map_err(|_| Error::parse(v, 0, format!("{name} must be a non-negative integer")))
    };
    let plain = |value: f64| BoundReport::new(id, value, false);
    let report = match id {
        FormulaId::LbMutationBased => theory::lb_mutation_based(int("n")?, real("p")?)?,
        FormulaId::UbGaDominant => theory::ub_ga_dominant(int("n")?, real("c")?)?,
        FormulaId::UbGaFull => theory::ub_ga_full(int("n")?, real("p")?, int("mu")?, int("lambda")?)?,
        FormulaId::LbGreedyGaDominant => theory::lb_greedy_ga_dominant(int("n")?, real("c")?)?,
        FormulaId::MaxTerm => plain(theory::max_term(real("c")?)?.0),
        FormulaId::OptimalC => plain(theory::optimal_c()),
        FormulaId::SeparatingOdd => plain(theory::separating_odd_prob(int("N")?, int("d")?, int("k")?)?),
        FormulaId::SurplusProb => plain(theory::surplus_prob(int("d")?)?),
        FormulaId::NeutralMutation => plain(theory::neutral_mutation_prob_exact(int("n")?, int("i")?, real("p")?)?),
        FormulaId::JumpProbBound => theory::jump_prob_bound(int("n")?, int("i")?, real("p")?)?,
    };
    let mut line = vec![id.as_str().to_string()];
    for &name in id.parameters() {
        line.push(format!("{name}={}", get(name)?));
    }
    line.push(report.value.to_string());
    line.push(report.dominant_only.to_string());
    Ok(line.join(","))
}

fn describe_params(id: FormulaId) -> String {
    if id.parameters().is_empty() {
        "no arguments".to_string()
    } else {
        id.parameters().iter().map(|p| format!("{p}=<value>")).collect::<Vec<_>>().join(" ")
    }
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use ga_lab::harness::{
    compare, read_samples, run_single, run_sweep, theory_report, AlgoSpec, CGrid, CompareSpec, Sidedness, SweepSpec,
    DEFAULT_ALPHA,
};
use ga_lab::{mann_whitney_u, FunctionRecipe, MwuMode, MwuResult, SampleSummary, DEFAULT_BUDGET};

/// Genetic algorithm laboratory: runs, mutation-rate sweeps, comparisons
/// and closed-form bounds.
#[derive(Parser)]
#[command(name = "ga-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One seeded run; prints the result.
    Run {
        #[arg(long, default_value = "onemax")]
        function: FunctionRecipe,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "greedy2+1:uniform")]
        algo: AlgoSpec,
        /// Mutation rate is c/n.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Average optimization times over a grid of mutation rates; writes CSV.
    Sweep {
        #[arg(long, default_value = "onemax")]
        function: FunctionRecipe,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "greedy2+1:uniform")]
        algo: AlgoSpec,
        /// start:step:end, mutation rate c/n.
        #[arg(long, default_value = "0.1:0.1:4.0")]
        c_grid: CGrid,
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Runs two algorithms and tests whether their times differ.
    Compare {
        #[arg(long)]
        algo_a: AlgoSpec,
        #[arg(long)]
        algo_b: AlgoSpec,
        #[arg(long, default_value = "onemax")]
        function: FunctionRecipe,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value = "two")]
        sided: Sidedness,
        /// Significance level for the verdict column.
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Evaluates a formula, e.g. `theory ub_ga_dominant n=1000 c=1`.
    Theory {
        formula: String,
        /// Arguments as key=value.
        args: Vec<String>,
    },
    /// Mann-Whitney U test on two files with one number per line.
    Mwu {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "two")]
        sided: Sidedness,
        /// Exact enumeration (at most 16 values in total).
        #[arg(long)]
        exact: bool,
    },
}

fn mwu_fields(r: &MwuResult) -> String {
    format!(
        "u={},z={},p_two_sided={},p_a_less={},exact={}",
        r.u_statistic, r.z_score, r.p_value_two_sided, r.p_value_one_sided_first_less, r.exact
    )
}

fn summary_fields(tag: &str, s: &SampleSummary, censored: usize) -> String {
    format!(
        "{tag}_mean={},{tag}_std={},{tag}_median={},{tag}_censored={censored}",
        s.mean, s.std, s.median
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Run {
            function,
            n,
            algo,
            c,
            seed,
            budget,
        } => {
            let r = run_single(&algo, &function, n, c, seed, budget)?;
            writeln!(
                stdout,
                "evaluations={},generations={},success={},seed={}",
                r.evaluations, r.generations, r.success, r.seed
            )?;
        }
        Command::Sweep {
            function,
            n,
            algo,
            c_grid,
            runs,
            seed,
            budget,
            out,
            workers,
        } => {
            let mut spec = SweepSpec::new(function, n, algo, c_grid, runs, seed);
            spec.budget = budget;
            spec.workers = workers;
            let table = run_sweep(&spec)?;
            match out {
                Some(path) => table.write_csv(&path)?,
                None => stdout.write_all(table.to_csv().as_bytes())?,
            }
        }
        Command::Compare {
            algo_a,
            algo_b,
            function,
            n,
            c,
            runs,
            seed,
            budget,
            workers,
            sided,
            alpha,
        } => {
            let outcome = compare(&CompareSpec {
                algo_a,
                algo_b,
                function,
                n,
                c,
                runs,
                seed,
                budget,
                workers,
                sided,
            })?;
            writeln!(
                stdout,
                "{},{},{},sided={sided},p={},significant={}",
                summary_fields("a", &outcome.summary_a, outcome.censored_a),
                summary_fields("b", &outcome.summary_b, outcome.censored_b),
                mwu_fields(&outcome.mwu),
                outcome.p_value,
                outcome.p_value < alpha
            )?;
        }
        Command::Theory { formula, args } => {
            writeln!(stdout, "{}", theory_report(&formula, &args)?)?;
        }
        Command::Mwu { a, b, sided, exact } => {
            let xs = read_samples(&a).with_context(|| format!("reading {}", a.display()))?;
            let ys = read_samples(&b).with_context(|| format!("reading {}", b.display()))?;
            let mode = if exact { MwuMode::Exact } else { MwuMode::Approximate };
            let r = mann_whitney_u(&xs, &ys, mode)?;
            let p = match sided {
                Sidedness::TwoSided => r.p_value_two_sided,
                Sidedness::ALess => r.p_value_one_sided_first_less,
                Sidedness::BLess => mann_whitney_u(&ys, &xs, mode)?.p_value_one_sided_first_less,
            };
            writeln!(stdout, "{},sided={sided},p={p}", mwu_fields(&r))?;
        }
    }
    Ok(())
}

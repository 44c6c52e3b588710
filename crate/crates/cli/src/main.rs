//! `sudoq` command-line front end.
//!
//! Exit status: 0 success, 1 input or usage error, 2 negative result (solver
//! failure, unsolvable grid, conjecture counterexample).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sudoq::analysis::quantum_score_estimate;
use sudoq::classical::{classical_score, count_solutions, shift_copy_square, ClassicalClass, DEFAULT_SCORE_BUDGET};
use sudoq::constraints::{latin_constraints, sudoku_constraints};
use sudoq::erasure::{channel_csv, generate_codeword, simulate_channel};
use sudoq::experiment::{evidence_summary_csv, records_csv, shidoku_suite, sigma_csv, sweep_sigma};
use sudoq::grid::{parse_classical_grid, parse_classical_grid_auto, ClassicalGrid, GridDimension};
use sudoq::solver::{solve, SolverConfig};
use sudoq::SudoqError;

#[derive(Parser, Debug)]
#[command(name = "sudoq", version, about = "Quantum Sudoku solver and experiment driver")]
struct Cli {
    /// Worker threads for trial fan-out (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Dot,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Target precision on the largest constraint residual.
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,
    /// Maximum number of sweeps.
    #[arg(long, default_value_t = 500)]
    imax: usize,
    /// Base seed; trial i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverArgs {
    fn config(&self, sigma: f64) -> anyhow::Result<SolverConfig> {
        let cfg = SolverConfig {
            sigma,
            epsilon: self.epsilon,
            i_max: self.imax,
            seed: self.seed,
            ..SolverConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    /// Grid file (one row per line, `.` or `0` for blanks); `-` reads stdin.
    grid: PathBuf,
    /// Block side n; inferred from the cell count when omitted.
    #[arg(long)]
    n: Option<usize>,
}

impl GridArgs {
    fn load(&self) -> anyhow::Result<ClassicalGrid> {
        let text = if self.grid.as_os_str() == "-" {
            std::io::read_to_string(std::io::stdin()).context("reading stdin")?
        } else {
            fs::read_to_string(&self.grid).with_context(|| format!("reading {}", self.grid.display()))?
        };
        let grid = match self.n {
            Some(n) => parse_classical_grid(&text, GridDimension::new(n)?)?,
            None => parse_classical_grid_auto(&text)?,
        };
        Ok(grid)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the solver once and print the outcome as JSON.
    Solve {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 0.6)]
        sigma: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count classical completions (capped at 2).
    Check {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Classical score (exhaustive) and quantum score estimate.
    Score {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0.6)]
        sigma: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Success rate and iteration histogram for each σ.
    SweepSigma {
        #[command(flatten)]
        grid: GridArgs,
        /// Comma-separated list; default 0.1, 0.2, .., 1.0.
        #[arg(long, value_delimiter = ',')]
        sigma: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Uniqueness campaign over the 13 minimal 4×4 grids.
    ShidokuSuite {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0.6)]
        sigma: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Erasure channel simulation: decoded, exact and unique-completion rates.
    ErasureSim {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Comma-separated erasure probabilities.
        #[arg(long, value_delimiter = ',', default_value = "0.25")]
        p_erase: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0.6)]
        sigma: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the shift-copy square, or a random codeword when a seed is given.
    Gen {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Export the constraint/cell incidence graph.
    Tanner {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Rows and columns only.
        #[arg(long)]
        latin: bool,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
}

enum Verdict {
    Ok,
    Negative,
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &impl serde::Serialize) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn require_trials(trials: usize) -> anyhow::Result<()> {
    if trials == 0 {
        bail!("--trials must be at least 1");
    }
    Ok(())
}

fn unsupported(format: Format) -> anyhow::Error {
    anyhow::anyhow!("format {format:?} is not supported by this command")
}

fn run(cli: Cli) -> anyhow::Result<Verdict> {
    match cli.command {
        Command::Solve {
            grid,
            sigma,
            solver,
            out,
        } => {
            let g = grid.load()?;
            let cfg = solver.config(sigma)?;
            let outcome = solve::<f64>(&g, &sudoku_constraints(g.dim().block()), &cfg)?;
            emit(&pretty(&outcome.to_json())?, out.as_deref())?;
            Ok(if outcome.is_solved() {
                Verdict::Ok
            } else {
                Verdict::Negative
            })
        }
        Command::Check { grid, format } => {
            let g = grid.load()?;
            let count = count_solutions(&g, 2)?;
            let class = match count.count {
                0 => ClassicalClass::Unsolvable,
                1 => ClassicalClass::Unique,
                _ => ClassicalClass::Multiple,
            };
            match format {
                Format::Text => match class {
                    ClassicalClass::Multiple => println!("multiple ({})", count.count),
                    other => println!("{other}"),
                },
                Format::Json => {
                    let solutions: Vec<String> = count.solutions.iter().map(|s| s.to_text()).collect();
                    print!(
                        "{}",
                        pretty(&json!({
                            "class": class.to_string(),
                            "count": count.count,
                            "capped": count.capped,
                            "solutions": solutions,
                        }))?
                    );
                }
                other => return Err(unsupported(other)),
            }
            Ok(if class == ClassicalClass::Unsolvable {
                Verdict::Negative
            } else {
                Verdict::Ok
            })
        }
        Command::Score {
            grid,
            trials,
            sigma,
            solver,
            format,
        } => {
            require_trials(trials)?;
            let g = grid.load()?;
            let cfg = solver.config(sigma)?;
            let classical = match classical_score(&g, DEFAULT_SCORE_BUDGET) {
                Ok(s) => Some(s),
                Err(SudoqError::BudgetExceeded { needed, budget }) => {
                    log::warn!("classical score skipped: {needed:e} fillings exceed the budget of {budget}");
                    None
                }
                Err(e) => return Err(e.into()),
            };
            let quantum = quantum_score_estimate(&g, trials, &cfg)?;
            match format {
                Format::Text => {
                    match &classical {
                        Some(s) => println!("classical {}", s.score),
                        None => println!("classical n/a"),
                    }
                    println!("quantum {}", quantum.value);
                }
                Format::Json => print!(
                    "{}",
                    pretty(&json!({
                        "classical_score": classical.as_ref().map(|s| s.score),
                        "classical_best": classical.as_ref().map(|s| s.best.to_text()),
                        "quantum_estimate": quantum.value,
                        "dense_search": quantum.dense_search,
                        "quantum_grid": quantum.grid.to_json(),
                    }))?
                ),
                other => return Err(unsupported(other)),
            }
            Ok(Verdict::Ok)
        }
        Command::SweepSigma {
            grid,
            sigma,
            trials,
            solver,
            format,
            out,
        } => {
            require_trials(trials)?;
            let g = grid.load()?;
            let sigmas = if sigma.is_empty() {
                (1..=10).map(|s| s as f64 / 10.0).collect()
            } else {
                sigma
            };
            let cfg = solver.config(0.6)?;
            let rows = sweep_sigma(&g, &sigmas, trials, &cfg)?;
            let text = match format {
                Format::Csv => sigma_csv(&rows),
                Format::Json => pretty(&rows)?,
                other => return Err(unsupported(other)),
            };
            emit(&text, out.as_deref())?;
            Ok(Verdict::Ok)
        }
        Command::ShidokuSuite {
            trials,
            sigma,
            solver,
            format,
            out,
        } => {
            require_trials(trials)?;
            let cfg = solver.config(sigma)?;
            let suite = shidoku_suite(trials, &cfg)?;
            let text = match format {
                Format::Csv => records_csv(suite.iter().flat_map(|e| &e.records)),
                Format::Json => pretty(&suite)?,
                Format::Text => evidence_summary_csv(&suite),
                other => return Err(unsupported(other)),
            };
            emit(&text, out.as_deref())?;
            for e in &suite {
                eprintln!(
                    "{}: {}/{} solved, {} classical, {} non-classical{}",
                    e.grid_id,
                    e.solved,
                    e.trials,
                    e.classical_outcomes,
                    e.nonclassical_outcomes,
                    if e.has_counterexample() { ", COUNTEREXAMPLE" } else { "" }
                );
            }
            Ok(if suite.iter().any(|e| e.has_counterexample()) {
                Verdict::Negative
            } else {
                Verdict::Ok
            })
        }
        Command::ErasureSim {
            n,
            p_erase,
            trials,
            sigma,
            solver,
            format,
            out,
        } => {
            require_trials(trials)?;
            let cfg = solver.config(sigma)?;
            let rows = simulate_channel(n, &p_erase, trials, &cfg)?;
            let text = match format {
                Format::Csv => channel_csv(&rows),
                Format::Json => pretty(&rows)?,
                other => return Err(unsupported(other)),
            };
            emit(&text, out.as_deref())?;
            Ok(if rows.iter().any(|r| r.violations > 0) {
                Verdict::Negative
            } else {
                Verdict::Ok
            })
        }
        Command::Gen { n, seed, format } => {
            GridDimension::new(n)?;
            let g = match seed {
                Some(seed) => generate_codeword(n, seed),
                None => shift_copy_square(n),
            };
            match format {
                Format::Text => print!("{}", g.to_text()),
                Format::Json => print!("{}", pretty(&json!({ "n": n, "rows": g.rows() }))?),
                other => return Err(unsupported(other)),
            }
            Ok(Verdict::Ok)
        }
        Command::Tanner { n, latin, format } => {
            GridDimension::new(n)?;
            let cl = if latin {
                latin_constraints(n * n)
            } else {
                sudoku_constraints(n)
            };
            match format {
                Format::Dot => print!("{}", cl.export_tanner()),
                Format::Json => print!("{}", pretty(&cl.to_json())?),
                other => return Err(unsupported(other)),
            }
            Ok(Verdict::Ok)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::Negative) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

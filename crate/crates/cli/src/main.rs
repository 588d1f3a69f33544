use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use conflict_sched::bench::{render_table, run_bench, write_csv, BenchConfig, Method};
use conflict_sched::binsearch::{binary_search_minmax, BinarySearchConfig, MilpDecision, NativeDecision};
use conflict_sched::gen::{generate_suite, SuiteGrid};
use conflict_sched::milp::{build_model_with_horizon, export_lp, solve_external, ExternalSolver, Formulation};
use conflict_sched::oracle::{brute_force, OracleLimits};
use conflict_sched::problem::io::{instance_from_str, instance_to_string, schedule_from_str, schedule_to_string};
use conflict_sched::problem::{evaluate, validate_schedule, Instance, ObjectiveKind, Time};
use conflict_sched::solver::{solve, SolveConfig, SolveResult, SolveStats, SolveStatus};

const EXIT_INVALID: u8 = 2;
const EXIT_UNPROVEN: u8 = 3;

/// Exact solvers and MILP tooling for parallel machine scheduling with
/// conflicting jobs.
#[derive(Parser)]
#[command(name = "conflict-sched", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a grid of instances, one JSON file each.
    Gen {
        #[command(flatten)]
        grid: GridArgs,
        /// Output directory.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Solve one instance and print the result as JSON.
    Solve {
        /// Instance JSON file
        instance: PathBuf,
        /// minmax, minsum or maxsum
        #[arg(long, short)]
        objective: ObjectiveKind,
        /// native, oracle, bs-native, f1, f2, f3, bs-f1, bs-f2 or bs-f3.
        #[arg(long, short, default_value = "native")]
        method: Method,
        /// Relative gap for binary-search probes.
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        /// Seconds; unlimited when absent.
        #[arg(long)]
        time_limit: Option<f64>,
        #[command(flatten)]
        external: ExternalArgs,
        /// Write the best schedule here.
        #[arg(long)]
        schedule_out: Option<PathBuf>,
    },
    /// Write a MILP model in LP format.
    Export {
        /// Instance JSON file
        instance: PathBuf,
        /// f1, f2 or f3
        #[arg(long, short)]
        formulation: Formulation,
        /// minmax, minsum or maxsum
        #[arg(long, short)]
        objective: ObjectiveKind,
        /// Replace the deadline or default horizon.
        #[arg(long)]
        horizon: Option<Time>,
        /// Output file; stdout when absent.
        #[arg(long, short = 'O')]
        out: Option<PathBuf>,
    },
    /// Validate a schedule and print its objective value.
    Check {
        /// Instance JSON file
        instance: PathBuf,
        /// Schedule JSON file
        schedule: PathBuf,
        /// minmax, minsum or maxsum
        #[arg(long, short)]
        objective: ObjectiveKind,
    },
    /// Run methods over a generated grid and print grouped averages.
    Bench {
        #[command(flatten)]
        grid: GridArgs,
        /// minmax, minsum or maxsum
        #[arg(long, short)]
        objective: ObjectiveKind,
        /// Comma-separated methods.
        #[arg(long, short, value_delimiter = ',', default_value = "native")]
        methods: Vec<Method>,
        /// Seconds per instance and method.
        #[arg(long, default_value_t = 3600.0)]
        time_limit: f64,
        /// Shorthand for a 60 second limit.
        #[arg(long, conflicts_with = "time_limit")]
        desk: bool,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[command(flatten)]
        external: ExternalArgs,
        /// Write per-record CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GridArgs {
    /// Master seed of the grid
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use the small grid (4 to 6 jobs) instead of the full one.
    #[arg(long)]
    mini: bool,
    /// Override the job counts, comma separated
    #[arg(long, value_delimiter = ',')]
    jobs: Option<Vec<usize>>,
    /// Override the machine counts
    #[arg(long, value_delimiter = ',')]
    machines: Option<Vec<usize>>,
    /// Override the capacities
    #[arg(long, value_delimiter = ',')]
    capacities: Option<Vec<Time>>,
    /// Override the conflict rates
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<u32>>,
    /// Override the processing-time settings (1, 2 or 3)
    #[arg(long, value_delimiter = ',')]
    settings: Option<Vec<u8>>,
}

impl GridArgs {
    fn suite(&self) -> SuiteGrid {
        let mut suite = if self.mini {
            SuiteGrid::mini(self.seed)
        } else {
            SuiteGrid::full(self.seed)
        };
        if let Some(v) = &self.jobs {
            suite.jobs = v.clone();
        }
        if let Some(v) = &self.machines {
            suite.machines = v.clone();
        }
        if let Some(v) = &self.capacities {
            suite.capacities = v.clone();
        }
        if let Some(v) = &self.alphas {
            suite.alphas = v.clone();
        }
        if let Some(v) = &self.settings {
            suite.settings = v.clone();
        }
        suite
    }
}

#[derive(Args)]
struct ExternalArgs {
    /// External MILP solver command, called as
    /// `<cmd> <model.lp> <solution.sol> <time-limit> <gap>`.
    #[arg(long, env = "CONFLICT_SCHED_SOLVER")]
    solver_cmd: Option<String>,
}

impl ExternalArgs {
    fn solver(&self) -> Option<ExternalSolver> {
        self.solver_cmd.as_deref().and_then(ExternalSolver::from_command_line)
    }
}

/// Errors raised while writing results rather than reading input.
#[derive(Debug)]
struct OutputError(anyhow::Error);

impl std::fmt::Display for OutputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for OutputError {}

fn output<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| OutputError(e).into())
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    instance_from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn seconds(secs: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(secs).map_err(|_| anyhow!("invalid time limit {secs}"))
}

fn print_json(value: serde_json::Value) -> Result<()> {
    output(serde_json::to_string_pretty(&value).map_err(Into::into)).map(|s| println!("{s}"))
}

fn status_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Optimal => 0,
        SolveStatus::Infeasible => EXIT_INVALID,
        SolveStatus::Feasible | SolveStatus::Unknown => EXIT_UNPROVEN,
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Gen { grid, out } => {
            let suite = generate_suite(&grid.suite())?;
            output(fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display())))?;
            for member in &suite {
                let path = out.join(format!("{}.json", member.name()));
                output(
                    fs::write(&path, instance_to_string(&member.instance))
                        .with_context(|| format!("writing {}", path.display())),
                )?;
            }
            eprintln!("wrote {} instances to {}", suite.len(), out.display());
            Ok(0)
        }
        Command::Solve {
            instance,
            objective,
            method,
            gamma,
            time_limit,
            external,
            schedule_out,
        } => {
            let inst = read_instance(&instance)?;
            inst.supports(objective)?;
            let limit = time_limit.map(seconds).transpose()?;
            let result = solve_with(&inst, objective, method, gamma, limit, external.solver())?;
            if let (Some(path), Some(sched)) = (&schedule_out, &result.schedule) {
                output(
                    fs::write(path, schedule_to_string(sched)).with_context(|| format!("writing {}", path.display())),
                )?;
            }
            print_json(serde_json::to_value(&result)?)?;
            Ok(status_code(result.status))
        }
        Command::Export {
            instance,
            formulation,
            objective,
            horizon,
            out,
        } => {
            let inst = read_instance(&instance)?;
            let model = build_model_with_horizon(&inst, formulation, objective, horizon)?;
            let text = export_lp(&model);
            match out {
                Some(path) => {
                    output(fs::write(&path, text).with_context(|| format!("writing {}", path.display())))?;
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Check {
            instance,
            schedule,
            objective,
        } => {
            let inst = read_instance(&instance)?;
            inst.supports(objective)?;
            let text = fs::read_to_string(&schedule).with_context(|| format!("reading {}", schedule.display()))?;
            let sched = schedule_from_str(&text).with_context(|| format!("parsing {}", schedule.display()))?;
            let report = validate_schedule(&inst, &sched, objective);
            let value = evaluate(&inst, &sched, objective).ok();
            print_json(serde_json::json!({
                "feasible": report.feasible,
                "objective": value,
                "violations": report.violations,
            }))?;
            Ok(if report.feasible { 0 } else { EXIT_INVALID })
        }
        Command::Bench {
            grid,
            objective,
            methods,
            time_limit,
            desk,
            gamma,
            external,
            csv,
        } => {
            let suite = generate_suite(&grid.suite())?;
            let limit = if desk { Duration::from_secs(60) } else { seconds(time_limit)? };
            let mut cfg = BenchConfig::new(objective, limit);
            cfg.gamma = gamma;
            cfg.external = external.solver();
            let report = run_bench(&suite, &methods, &cfg);
            if let Some(path) = &csv {
                let file = output(fs::File::create(path).with_context(|| format!("creating {}", path.display())))?;
                output(write_csv(&report.records, file).map_err(Into::into))?;
            }
            print!("{}", render_table(&report.summary, &methods));
            Ok(0)
        }
    }
}

fn solve_with(
    inst: &Instance,
    obj: ObjectiveKind,
    method: Method,
    gamma: f64,
    limit: Option<Duration>,
    external: Option<ExternalSolver>,
) -> Result<SolveResult> {
    let external = || external.clone().ok_or_else(|| anyhow!("method {method} needs --solver-cmd"));
    if method.is_binary_search() && obj != ObjectiveKind::MinMax {
        bail!("binary search applies to minmax only");
    }
    let bs_cfg = BinarySearchConfig {
        gamma,
        probe_time_limit: limit,
        time_limit: limit,
    };
    Ok(match method {
        Method::Native => {
            let mut cfg = SolveConfig::default();
            if let Some(l) = limit {
                cfg = cfg.with_time_limit(l);
            }
            solve(inst, obj, &cfg)?
        }
        Method::Oracle => {
            let started = std::time::Instant::now();
            let sol = brute_force(inst, obj, OracleLimits::default())?;
            let stats = SolveStats {
                nodes: sol.orientations,
                elapsed: started.elapsed(),
                ..SolveStats::default()
            };
            oracle_result(obj, sol.optimum, sol.schedule, stats)
        }
        Method::BsNative => binary_search_minmax(inst, &mut NativeDecision::default(), &bs_cfg)?,
        Method::BsMilp(formulation) => binary_search_minmax(
            inst,
            &mut MilpDecision {
                formulation,
                solver: external()?,
            },
            &bs_cfg,
        )?,
        Method::Milp(formulation) => {
            let model = build_model_with_horizon(inst, formulation, obj, None)?;
            solve_external(inst, &model, &external()?, limit.unwrap_or(Duration::from_secs(3600)), 0.0)
        }
    })
}

fn oracle_result(
    obj: ObjectiveKind,
    optimum: Time,
    schedule: conflict_sched::Schedule,
    stats: SolveStats,
) -> SolveResult {
    SolveResult {
        objective: obj,
        status: SolveStatus::Optimal,
        incumbent: Some(optimum),
        bound: Some(optimum),
        gap: Some(0.0),
        schedule: Some(schedule),
        stats,
        diagnostics: Vec::new(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<OutputError>() {
                ExitCode::FAILURE
            } else {
                ExitCode::from(EXIT_INVALID)
            }
        }
    }
}

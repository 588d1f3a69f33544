//! Bridge to an external MILP solver.
//!
//! The solver is any program invoked as
//! `program [args..] <model.lp> <solution.sol> <time-limit-secs> <gap>` that
//! writes a solution file:
//!
//! ```text
//! # comment
//! @status optimal
//! @objective 12
//! @bound 12
//! x_0_1 1
//! s_0 0
//! ```
//!
//! One `name value` pair per line; variables not listed are 0. `@status` is
//! one of `optimal`, `feasible`, `infeasible`, `unknown`; `@objective` and
//! `@bound` refer to the model's linear objective without offset.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::problem::{evaluate, Instance, ObjectiveKind, Schedule, Sense, Time};
use crate::solver::{SolveResult, SolveStats, SolveStatus};

use super::{export_lp, Formulation, LinearModel};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolutionFile {
    pub status: Option<SolveStatus>,
    pub objective: Option<f64>,
    pub bound: Option<f64>,
    pub values: BTreeMap<String, f64>,
}

impl SolutionFile {
    fn value(&self, name: &str) -> f64 {
        self.values.get(name).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct SolutionParseError {
    pub line: usize,
    pub message: String,
}

pub fn parse_solution(text: &str) -> Result<SolutionFile, SolutionParseError> {
    let mut sol = SolutionFile::default();
    for (idx, raw) in text.lines().enumerate() {
        let err = |message: String| SolutionParseError { line: idx + 1, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(key), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(format!("expected `name value`, got `{line}`")));
        };
        let number = || -> Result<f64, SolutionParseError> {
            match value.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(err(format!("`{value}` is not a finite number"))),
            }
        };
        match key {
            "@status" => {
                let status = match value.to_ascii_lowercase().as_str() {
                    "optimal" => SolveStatus::Optimal,
                    "feasible" => SolveStatus::Feasible,
                    "infeasible" => SolveStatus::Infeasible,
                    "unknown" => SolveStatus::Unknown,
                    _ => return Err(err(format!("unknown status `{value}`"))),
                };
                sol.status = Some(status);
            }
            "@objective" => sol.objective = Some(number()?),
            "@bound" => sol.bound = Some(number()?),
            _ if key.starts_with('@') => return Err(err(format!("unknown directive `{key}`"))),
            _ => {
                if sol.values.insert(key.to_string(), number()?).is_some() {
                    return Err(err(format!("`{key}` given twice")));
                }
            }
        }
    }
    Ok(sol)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalSolver {
    pub program: PathBuf,
    pub args: Vec<String>,
}

impl ExternalSolver {
    /// Splits a command line on whitespace; no quoting is supported.
    pub fn from_command_line(line: &str) -> Option<Self> {
        let mut parts = line.split_whitespace();
        let program = PathBuf::from(parts.next()?);
        Some(Self {
            program,
            args: parts.map(str::to_string).collect(),
        })
    }
}

static RUN_ID: AtomicU64 = AtomicU64::new(0);

/// Solves `model` (built from `inst`) with an external program and maps the
/// answer back to a validated schedule. Every failure along the way yields
/// an `Unknown` result whose diagnostics say what went wrong.
pub fn solve_external(
    inst: &Instance,
    model: &LinearModel,
    solver: &ExternalSolver,
    time_limit: Duration,
    gap: f64,
) -> SolveResult {
    let started = Instant::now();
    let obj = model.meta().objective;
    let unknown = |msg: String| {
        let stats = SolveStats {
            elapsed: started.elapsed(),
            ..SolveStats::default()
        };
        SolveResult::unknown(obj, stats, vec![msg])
    };

    let dir = std::env::temp_dir().join(format!(
        "conflict-sched-{}-{}",
        std::process::id(),
        RUN_ID.fetch_add(1, Ordering::Relaxed)
    ));
    if let Err(e) = fs::create_dir_all(&dir) {
        return unknown(format!("cannot create {}: {e}", dir.display()));
    }
    let lp_path = dir.join("model.lp");
    let sol_path = dir.join("model.sol");
    let outcome = (|| {
        fs::write(&lp_path, export_lp(model)).map_err(|e| format!("cannot write {}: {e}", lp_path.display()))?;
        let output = Command::new(&solver.program)
            .args(&solver.args)
            .arg(&lp_path)
            .arg(&sol_path)
            .arg(format!("{}", time_limit.as_secs_f64()))
            .arg(format!("{gap}"))
            .output()
            .map_err(|e| format!("cannot run {}: {e}", solver.program.display()))?;
        if !output.status.success() {
            let stderr = String::from_utf8_lossy(&output.stderr);
            return Err(format!("solver exited with {}: {}", output.status, stderr.trim()));
        }
        let text = fs::read_to_string(&sol_path).map_err(|e| format!("cannot read solution file: {e}"))?;
        parse_solution(&text).map_err(|e| format!("malformed solution file: {e}"))
    })();
    let _ = fs::remove_dir_all(&dir);
    let sol = match outcome {
        Ok(sol) => sol,
        Err(msg) => return unknown(msg),
    };
    let stats = SolveStats {
        elapsed: started.elapsed(),
        ..SolveStats::default()
    };

    if sol.status == Some(SolveStatus::Infeasible) {
        return SolveResult::assemble(obj, None, None, true, gap, stats);
    }
    if sol.values.is_empty() {
        return unknown(format!(
            "solver reported {} without a solution",
            sol.status.map_or("nothing", SolveStatus::name)
        ));
    }
    let sched = match reconstruct(model, inst, &sol) {
        Ok(s) => s,
        Err(msg) => return unknown(msg),
    };
    let value = match evaluate(inst, &sched, obj) {
        Ok(v) => v,
        Err(e) => return unknown(format!("reconstructed schedule rejected: {e}")),
    };
    let bound = match (sol.bound, sol.status) {
        (Some(b), _) => Some(to_schedule_bound(inst, model, b)),
        (None, Some(SolveStatus::Optimal)) => Some(value),
        _ => None,
    };
    SolveResult::assemble(obj, Some((value, sched)), bound, false, gap, stats)
}

/// Converts a bound on the linear objective into a bound on the schedule
/// objective, rounded towards the safe side.
fn to_schedule_bound(inst: &Instance, model: &LinearModel, b: f64) -> Time {
    let obj = model.meta().objective;
    let mut shifted = b + model.objective_offset() as f64;
    if obj == ObjectiveKind::MinSum {
        shifted += (0..inst.n_jobs()).map(|j| inst.weight(j) * inst.p(j)).sum::<Time>() as f64;
    }
    match obj.sense() {
        Sense::Minimize => (shifted - 1e-6).ceil() as Time,
        Sense::Maximize => (shifted + 1e-6).floor() as Time,
    }
}

/// Rebuilds a schedule from variable values. `F1` and `F2` keep the
/// machines from `x` and the order from `s`, then start every job as early
/// as that order allows. `F3` may move a job between machines from slot to
/// slot, so only its occupied slots are kept and machines are reassigned
/// greedily, which never needs more machines than jobs running at once.
fn reconstruct(model: &LinearModel, inst: &Instance, sol: &SolutionFile) -> Result<Schedule, String> {
    let n = inst.n_jobs();
    let m = inst.n_machines();
    let meta = model.meta();
    let on = |v: f64| v > 0.5;
    let mut sched = Schedule::new();
    match meta.formulation {
        Formulation::F1 | Formulation::F2 => {
            let k = meta.positions.unwrap_or(0);
            let load = |j: usize, mach: usize| -> f64 {
                match meta.formulation {
                    Formulation::F1 => (1..=k).map(|pos| sol.value(&format!("x_{j}_{mach}_{pos}"))).sum(),
                    _ => sol.value(&format!("x_{j}_{mach}")),
                }
            };
            let mut placed: Vec<(f64, usize, usize)> = Vec::new();
            for j in 0..n {
                let loads: Vec<f64> = (0..m).map(|mach| load(j, mach)).collect();
                let (mach, best) = loads
                    .iter()
                    .copied()
                    .enumerate()
                    .fold((0, f64::MIN), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
                if on(best) {
                    placed.push((sol.value(&format!("s_{j}")), j, mach));
                } else {
                    sched.reject(j);
                }
            }
            placed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut machine_free = vec![0 as Time; m];
            let mut completion: Vec<Option<Time>> = vec![None; n];
            for &(_, j, mach) in &placed {
                let release = inst
                    .neighbors(j)
                    .iter()
                    .filter_map(|&i| completion[i])
                    .max()
                    .unwrap_or(0);
                let start = release.max(machine_free[mach]);
                completion[j] = Some(start + inst.p(j));
                machine_free[mach] = start + inst.p(j);
                sched.place(j, mach, start);
            }
        }
        Formulation::F3 => {
            let slots = meta.horizon;
            let mut intervals = Vec::new();
            for j in 0..n {
                let first = (1..=slots).find(|t| on((0..m).map(|mach| sol.value(&format!("x_{j}_{mach}_{t}"))).sum()));
                match first {
                    Some(t) => intervals.push((t - 1, j)),
                    None => sched.reject(j),
                }
            }
            intervals.sort();
            let mut machine_free = vec![0 as Time; m];
            for (start, j) in intervals {
                let mach = (0..m)
                    .find(|&mach| machine_free[mach] <= start)
                    .ok_or_else(|| format!("more than {m} jobs running at time {start}"))?;
                machine_free[mach] = start + inst.p(j);
                sched.place(j, mach, start);
            }
        }
    }
    sched.normalize();
    Ok(sched)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::build_model;

    #[test]
    fn parses_solution_files() {
        let sol = parse_solution("# header\n@status Optimal\n@objective 3\n\nx_0_0 1 # on\ns_0 0.5\n").unwrap();
        assert_eq!(sol.status, Some(SolveStatus::Optimal));
        assert_eq!(sol.objective, Some(3.0));
        assert_eq!(sol.values.len(), 2);
        assert_eq!(sol.value("s_0"), 0.5);
        assert_eq!(sol.value("absent"), 0.0);
    }

    #[test]
    fn rejects_malformed_lines() {
        for (text, line) in [
            ("x_0_0\n", 1),
            ("a 1\nb one\n", 2),
            ("a 1 2\n", 1),
            ("@status maybe\n", 1),
            ("@gap 1\n", 1),
            ("a 1\na 0\n", 2),
            ("a inf\n", 1),
        ] {
            assert_eq!(parse_solution(text).unwrap_err().line, line, "{text:?}");
        }
    }

    #[test]
    fn f1_reconstruction_left_shifts() {
        let inst = Instance::new(2, vec![2, 2], [(0, 1)]).unwrap();
        let model = build_model(&inst, Formulation::F1, ObjectiveKind::MinMax).unwrap();
        let sol = parse_solution("x_0_0_1 1\nx_1_1_1 1\ns_0 0\ns_1 5\n").unwrap();
        let sched = reconstruct(&model, &inst, &sol).unwrap();
        assert_eq!(sched.slots(2), vec![Some((0, 0)), Some((1, 2))]);
    }

    #[test]
    fn f3_reconstruction_reassigns_machines() {
        let inst = Instance::new(2, vec![2, 2, 1], []).unwrap();
        let model = build_model(&inst, Formulation::F3, ObjectiveKind::MinMax).unwrap();
        // job 0 migrates between machines, job 2 follows on either
        let sol = parse_solution("x_0_0_1 1\nx_0_1_2 1\nx_1_1_1 1\nx_1_0_2 1\nx_2_0_3 1\n").unwrap();
        let sched = reconstruct(&model, &inst, &sol).unwrap();
        assert!(evaluate(&inst, &sched, ObjectiveKind::MinMax).is_ok());
        assert_eq!(sched.slots(3), vec![Some((0, 0)), Some((1, 0)), Some((0, 2))]);
    }

    #[test]
    fn bounds_are_rounded_safely() {
        let inst = Instance::new(1, vec![2, 3], []).unwrap().with_weights(vec![1, 2]).unwrap();
        let model = build_model(&inst, Formulation::F3, ObjectiveKind::MinSum).unwrap();
        // offset -3, sum w p = 8
        assert_eq!(to_schedule_bound(&inst, &model, 4.2), 10);
        assert_eq!(to_schedule_bound(&inst, &model, 4.0000001), 9);
    }

    #[test]
    fn missing_program_is_unknown() {
        let inst = Instance::new(1, vec![1], []).unwrap();
        let model = build_model(&inst, Formulation::F2, ObjectiveKind::MinMax).unwrap();
        let solver = ExternalSolver::from_command_line("/nonexistent/solver --flag").unwrap();
        let r = solve_external(&inst, &model, &solver, Duration::from_secs(1), 0.0);
        assert_eq!(r.status, SolveStatus::Unknown);
        assert!(r.diagnostics[0].contains("cannot run"), "{:?}", r.diagnostics);
    }
}

//! Binary search on the makespan horizon.
//!
//! The search keeps `lb <= optimum` and, once a schedule is known,
//! `optimum <= makespan(best)`. Each probe asks a [`DecisionSolver`] for a
//! schedule finishing by `mid = (lb + ub) / 2`, optimized only up to the
//! relative gap `gamma`. A schedule of makespan `c` moves `ub` to `c - 1`.
//! A proof that no schedule fits moves `lb` to `mid + 1`. A probe that ends
//! without an answer also moves `lb` so the search keeps going, but the
//! final result is then only `Feasible`, with the last proven bound as its
//! dual bound.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::milp::{build_model_with_horizon, solve_external, ExternalSolver, Formulation};
use crate::problem::{evaluate, makespan, Instance, ObjectiveKind, Schedule, Time};
use crate::solver::{solve_within_horizon, SolveConfig, SolveResult, SolveStats, SolveStatus};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// A schedule finishing by the horizon.
    Found(Schedule),
    /// Proven: nothing finishes by the horizon.
    Infeasible,
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeOutcome {
    pub verdict: Verdict,
    pub nodes: u64,
}

pub trait DecisionSolver {
    fn name(&self) -> String;

    /// Looks for a schedule with makespan at most `horizon`, stopping once
    /// its makespan is within relative gap `gamma` of the best possible.
    fn probe(&mut self, inst: &Instance, horizon: Time, gamma: f64, time_limit: Option<Duration>) -> ProbeOutcome;
}

/// Probes with the branch-and-bound solver.
#[derive(Debug, Clone, Default)]
pub struct NativeDecision {
    pub node_limit: Option<u64>,
}

impl DecisionSolver for NativeDecision {
    fn name(&self) -> String {
        "bs-native".into()
    }

    fn probe(&mut self, inst: &Instance, horizon: Time, gamma: f64, time_limit: Option<Duration>) -> ProbeOutcome {
        let mut cfg = SolveConfig::default().with_gap(gamma);
        cfg.node_limit = self.node_limit;
        if let Some(limit) = time_limit {
            cfg = cfg.with_time_limit(limit);
        }
        match solve_within_horizon(inst, horizon, &cfg) {
            Ok(r) => {
                let nodes = r.stats.nodes;
                let verdict = match (r.schedule, r.status) {
                    (Some(s), _) => Verdict::Found(s),
                    (None, SolveStatus::Infeasible) => Verdict::Infeasible,
                    (None, status) => Verdict::Unknown(format!("search stopped with status {}", status.name())),
                };
                ProbeOutcome { verdict, nodes }
            }
            Err(e) => ProbeOutcome {
                verdict: Verdict::Unknown(e.to_string()),
                nodes: 0,
            },
        }
    }
}

/// Probes by solving a MILP model restricted to the horizon with an
/// external solver.
#[derive(Debug, Clone)]
pub struct MilpDecision {
    pub formulation: Formulation,
    pub solver: ExternalSolver,
}

impl DecisionSolver for MilpDecision {
    fn name(&self) -> String {
        format!("bs-{}", self.formulation)
    }

    fn probe(&mut self, inst: &Instance, horizon: Time, gamma: f64, time_limit: Option<Duration>) -> ProbeOutcome {
        let model = match build_model_with_horizon(inst, self.formulation, ObjectiveKind::MinMax, Some(horizon)) {
            Ok(m) => m,
            Err(e) => {
                return ProbeOutcome {
                    verdict: Verdict::Unknown(e.to_string()),
                    nodes: 0,
                }
            }
        };
        let limit = time_limit.unwrap_or(Duration::from_secs(3600));
        let r = solve_external(inst, &model, &self.solver, limit, gamma);
        let verdict = match (r.schedule, r.status) {
            (Some(s), _) => Verdict::Found(s),
            (None, SolveStatus::Infeasible) => Verdict::Infeasible,
            (None, _) => Verdict::Unknown(r.diagnostics.join("; ")),
        };
        ProbeOutcome { verdict, nodes: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinarySearchConfig {
    /// Relative gap handed to every probe.
    pub gamma: f64,
    pub probe_time_limit: Option<Duration>,
    /// Once exceeded no further probe starts.
    pub time_limit: Option<Duration>,
}

impl Default for BinarySearchConfig {
    fn default() -> Self {
        Self {
            gamma: 0.1,
            probe_time_limit: None,
            time_limit: None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BinarySearchError {
    #[error("gamma must lie in [0, 1), got {0}")]
    Gamma(f64),
}

/// Initial `(lb, ub)`: `ceil(sum p / m)` and `sum p`.
pub fn initial_bounds(inst: &Instance) -> (Time, Time) {
    let total = inst.total_processing();
    let m = inst.n_machines() as Time;
    ((total + m - 1) / m, total)
}

/// Upper bound on the number of probes, `ceil(log2(ub - lb + 1)) + 1`.
pub fn max_iterations(inst: &Instance) -> u32 {
    let (lb, ub) = initial_bounds(inst);
    let width = (ub - lb + 1).max(1) as u64;
    width.next_power_of_two().trailing_zeros() + 1
}

pub fn binary_search_minmax(
    inst: &Instance,
    decision: &mut dyn DecisionSolver,
    cfg: &BinarySearchConfig,
) -> Result<SolveResult, BinarySearchError> {
    if !(0.0..1.0).contains(&cfg.gamma) {
        return Err(BinarySearchError::Gamma(cfg.gamma));
    }
    let started = Instant::now();
    let (mut lb, mut ub) = initial_bounds(inst);
    let mut proven_lb = lb;
    let mut all_proven = true;
    let mut best: Option<(Time, Schedule)> = None;
    let mut iterations = 0u32;
    let mut nodes = 0u64;
    let mut diagnostics = Vec::new();

    if inst.n_jobs() == 0 {
        best = Some((0, Schedule::new()));
        ub = -1;
    }
    while lb <= ub {
        if cfg.time_limit.is_some_and(|limit| started.elapsed() >= limit) {
            all_proven = false;
            diagnostics.push(format!("time limit reached with [{lb}, {ub}] open"));
            break;
        }
        let mid = (lb + ub) / 2;
        iterations += 1;
        let outcome = decision.probe(inst, mid, cfg.gamma, cfg.probe_time_limit);
        nodes += outcome.nodes;
        match outcome.verdict {
            Verdict::Found(sched) => match evaluate(inst, &sched, ObjectiveKind::MinMax) {
                Ok(value) if value <= mid => {
                    ub = value - 1;
                    best = Some((value, sched));
                }
                Ok(value) => {
                    all_proven = false;
                    diagnostics.push(format!("probe {mid} returned makespan {value} above the horizon"));
                    lb = mid + 1;
                }
                Err(e) => {
                    all_proven = false;
                    diagnostics.push(format!("probe {mid} returned an invalid schedule: {e}"));
                    lb = mid + 1;
                }
            },
            Verdict::Infeasible => {
                lb = mid + 1;
                proven_lb = lb;
            }
            Verdict::Unknown(why) => {
                all_proven = false;
                diagnostics.push(format!("probe {mid} undecided: {why}"));
                lb = mid + 1;
            }
        }
    }

    let best = best.unwrap_or_else(|| {
        diagnostics.push("no probe found a schedule, falling back to one machine".into());
        let mut serial = Schedule::new();
        let mut t = 0;
        for j in 0..inst.n_jobs() {
            serial.place(j, 0, t);
            t += inst.p(j);
        }
        (makespan(inst, &serial), serial)
    });
    let bound = if all_proven { best.0 } else { proven_lb.min(best.0) };
    let stats = SolveStats {
        nodes,
        elapsed: started.elapsed(),
        propagations: 0,
        iterations: Some(iterations),
    };
    let mut result = SolveResult::assemble(ObjectiveKind::MinMax, Some(best), Some(bound), false, 0.0, stats);
    result.diagnostics = diagnostics;
    Ok(result)
}

//! Native exact solver.
//!
//! Each job is an interval of length `p_i` that runs on exactly one machine
//! (or, for MaxSum, may be left out), intervals on a machine never overlap,
//! and conflicting jobs are ordered one after the other. The search is a
//! depth-first branch and bound over chronological placements; see
//! [`search`] internals for the dominance rules it relies on.

mod result;
mod search;

use std::time::Duration;

use thiserror::Error;

use crate::problem::{InstanceError, Instance, ObjectiveKind, Schedule, Sense, Time};

pub use result::{relative_gap, SolveResult, SolveStats, SolveStatus};
use search::Search;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub time_limit: Option<Duration>,
    /// Relative gap at which the search may stop; 0 proves optimality.
    pub gap_target: f64,
    pub node_limit: Option<u64>,
    /// The search is always deterministic apart from wall-clock limits;
    /// with this flag set callers should not pass a time limit.
    pub deterministic: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            time_limit: None,
            gap_target: 0.0,
            node_limit: None,
            deterministic: true,
        }
    }
}

impl SolveConfig {
    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self.deterministic = false;
        self
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.gap_target = gap;
        self
    }

    pub fn with_node_limit(mut self, nodes: u64) -> Self {
        self.node_limit = Some(nodes);
        self
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("gap target must lie in [0, 1), got {0}")]
    GapTarget(f64),
    #[error("decision horizon must be at least 1, got {0}")]
    Horizon(Time),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

fn check_config(cfg: &SolveConfig) -> Result<(), SolveError> {
    if !(0.0..1.0).contains(&cfg.gap_target) {
        return Err(SolveError::GapTarget(cfg.gap_target));
    }
    Ok(())
}

/// Solves `inst` for `obj`. With unlimited resources the result is optimal
/// and carries a witness schedule; on a limit the best incumbent and a valid
/// dual bound are returned.
pub fn solve(inst: &Instance, obj: ObjectiveKind, cfg: &SolveConfig) -> Result<SolveResult, SolveError> {
    check_config(cfg)?;
    inst.supports(obj)?;
    let outcome = Search::new(inst, obj, cfg).run();
    Ok(finish(obj, outcome, cfg.gap_target))
}

/// Minimizes the makespan among schedules finishing by `horizon`.
/// `Infeasible` means no schedule meets the horizon.
pub fn solve_within_horizon(
    inst: &Instance,
    horizon: Time,
    cfg: &SolveConfig,
) -> Result<SolveResult, SolveError> {
    check_config(cfg)?;
    if horizon < 1 {
        return Err(SolveError::Horizon(horizon));
    }
    let outcome = Search::new(inst, ObjectiveKind::MinMax, cfg)
        .with_cutoff(horizon + 1)
        .run();
    Ok(finish(ObjectiveKind::MinMax, outcome, cfg.gap_target))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    /// A schedule with makespan at most the horizon.
    Feasible(Schedule),
    Infeasible,
    /// A limit hit before the question was settled.
    Unknown,
}

/// Decides whether every job can complete by `horizon`.
pub fn solve_decision_minmax(
    inst: &Instance,
    horizon: Time,
    cfg: &SolveConfig,
) -> Result<Decision, SolveError> {
    check_config(cfg)?;
    if horizon < 1 {
        return Err(SolveError::Horizon(horizon));
    }
    let outcome = Search::new(inst, ObjectiveKind::MinMax, cfg)
        .with_cutoff(horizon + 1)
        .stop_on_first()
        .run();
    Ok(match outcome.incumbent {
        Some((_, sched)) => Decision::Feasible(sched),
        None if outcome.complete => Decision::Infeasible,
        None => Decision::Unknown,
    })
}

fn finish(obj: ObjectiveKind, outcome: search::Outcome, gap_target: f64) -> SolveResult {
    let bound = match (&outcome.incumbent, outcome.open_bound) {
        (_, Some(open)) => Some(open),
        (Some((v, _)), None) => Some(*v),
        (None, None) => None,
    };
    // an exhausted tree with no open subtrees leaves the incumbent proven
    let bound = match (outcome.complete, &outcome.incumbent, bound) {
        (true, Some((v, _)), Some(b)) => Some(match obj.sense() {
            Sense::Minimize => b.min(*v),
            Sense::Maximize => b.max(*v),
        }),
        (_, _, b) => b,
    };
    SolveResult::assemble(
        obj,
        outcome.incumbent,
        bound,
        outcome.complete,
        gap_target,
        outcome.stats,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::evaluate;

    fn optimum(inst: &Instance, obj: ObjectiveKind) -> Time {
        let r = solve(inst, obj, &SolveConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.gap, Some(0.0));
        let sched = r.schedule.as_ref().unwrap();
        assert_eq!(evaluate(inst, sched, obj).unwrap(), r.incumbent.unwrap());
        r.incumbent.unwrap()
    }

    #[test]
    fn conflict_pair_is_serialized() {
        let inst = Instance::new(2, vec![3, 3], [(0, 1)]).unwrap();
        assert_eq!(optimum(&inst, ObjectiveKind::MinMax), 6);
    }

    #[test]
    fn triangle_on_three_machines() {
        let inst = Instance::new(3, vec![2, 2, 2], [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(optimum(&inst, ObjectiveKind::MinMax), 6);
    }

    #[test]
    fn maxsum_keeps_one_conflicting_job() {
        let inst = Instance::new(2, vec![2, 3], [(0, 1)])
            .unwrap()
            .with_profits(vec![3, 4])
            .unwrap()
            .with_deadline(4)
            .unwrap();
        assert_eq!(optimum(&inst, ObjectiveKind::MaxSum), 4);
    }

    #[test]
    fn short_jobs_first_for_minsum() {
        // the longest job must not be forced to start first
        let inst = Instance::new(1, vec![3, 1, 1], [])
            .unwrap()
            .with_weights(vec![1, 10, 10])
            .unwrap();
        assert_eq!(optimum(&inst, ObjectiveKind::MinSum), 10 + 20 + 5);
    }

    #[test]
    fn delayed_start_behind_conflict() {
        // job 2 must wait for job 0 although machine 1 is idle
        let inst = Instance::new(2, vec![4, 1, 2], [(0, 2)]).unwrap();
        assert_eq!(optimum(&inst, ObjectiveKind::MinMax), 6);
    }

    #[test]
    fn decisions() {
        let cfg = SolveConfig::default();
        let inst = Instance::new(2, vec![3, 2], []).unwrap();
        assert!(matches!(solve_decision_minmax(&inst, 3, &cfg), Ok(Decision::Feasible(_))));
        let inst = Instance::new(2, vec![3, 3], [(0, 1)]).unwrap();
        assert_eq!(solve_decision_minmax(&inst, 5, &cfg), Ok(Decision::Infeasible));
        let inst = Instance::new(3, vec![2, 2, 2], [(0, 1), (1, 2), (0, 2)]).unwrap();
        match solve_decision_minmax(&inst, 6, &cfg).unwrap() {
            Decision::Feasible(s) => assert_eq!(evaluate(&inst, &s, ObjectiveKind::MinMax).unwrap(), 6),
            other => panic!("expected feasible, got {other:?}"),
        }
        assert_eq!(solve_decision_minmax(&inst, 0, &cfg), Err(SolveError::Horizon(0)));
    }

    #[test]
    fn within_horizon() {
        let cfg = SolveConfig::default();
        let inst = Instance::new(2, vec![3, 3], [(0, 1)]).unwrap();
        let r = solve_within_horizon(&inst, 5, &cfg).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
        let r = solve_within_horizon(&inst, 8, &cfg).unwrap();
        assert_eq!(r.incumbent, Some(6));
        assert_eq!(r.status, SolveStatus::Optimal);
    }

    #[test]
    fn node_limit_gives_honest_status() {
        let inst = Instance::new(3, vec![5, 4, 4, 3, 3, 3, 2, 2], [(0, 1), (2, 3), (4, 5), (1, 6)])
            .unwrap()
            .with_weights(vec![1, 2, 3, 1, 2, 3, 1, 2])
            .unwrap();
        let exact = solve(&inst, ObjectiveKind::MinSum, &SolveConfig::default()).unwrap();
        let cut = solve(
            &inst,
            ObjectiveKind::MinSum,
            &SolveConfig::default().with_node_limit(12),
        )
        .unwrap();
        assert_eq!(cut.status, SolveStatus::Feasible);
        assert_eq!(cut.stats.nodes, 12);
        let opt = exact.incumbent.unwrap();
        assert!(cut.bound.unwrap() <= opt && opt <= cut.incumbent.unwrap());
    }

    #[test]
    fn rejects_bad_config() {
        let inst = Instance::new(1, vec![1], []).unwrap();
        let cfg = SolveConfig::default().with_gap(1.0);
        assert_eq!(
            solve(&inst, ObjectiveKind::MinMax, &cfg),
            Err(SolveError::GapTarget(1.0))
        );
        assert!(matches!(
            solve(&inst, ObjectiveKind::MaxSum, &SolveConfig::default()),
            Err(SolveError::Instance(_))
        ));
    }
}

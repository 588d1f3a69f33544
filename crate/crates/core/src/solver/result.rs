use std::time::Duration;

use serde::{Serialize, Serializer};

use crate::problem::{ObjectiveKind, Schedule, Sense, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    /// Incumbent proven optimal (within the configured gap target).
    Optimal,
    /// Incumbent found, optimality not proven.
    Feasible,
    /// Proven that no solution exists.
    Infeasible,
    /// Limits reached before any solution was found.
    Unknown,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SolveStats {
    pub nodes: u64,
    #[serde(serialize_with = "as_secs")]
    pub elapsed: Duration,
    /// Release-time updates pushed to conflicting jobs.
    pub propagations: u64,
    /// Binary-search probes, when applicable.
    pub iterations: Option<u32>,
}

fn as_secs<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub objective: ObjectiveKind,
    pub status: SolveStatus,
    pub incumbent: Option<Time>,
    /// Dual bound: a lower bound for minimization, an upper bound for
    /// maximization.
    pub bound: Option<Time>,
    pub gap: Option<f64>,
    pub schedule: Option<Schedule>,
    pub stats: SolveStats,
    /// Notes explaining an `Unknown` or degraded result.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

/// `|incumbent - bound| / max(|incumbent|, 1e-9)`.
pub fn relative_gap(incumbent: Time, bound: Time) -> f64 {
    (incumbent - bound).abs() as f64 / (incumbent.abs() as f64).max(1e-9)
}

impl SolveResult {
    pub(crate) fn assemble(
        objective: ObjectiveKind,
        incumbent: Option<(Time, Schedule)>,
        bound: Option<Time>,
        proven: bool,
        gap_target: f64,
        stats: SolveStats,
    ) -> Self {
        let (incumbent, schedule) = match incumbent {
            Some((v, s)) => (Some(v), Some(s)),
            None => (None, None),
        };
        // the bound can never be on the wrong side of the incumbent
        let bound = match (incumbent, bound) {
            (Some(v), Some(b)) => Some(match objective.sense() {
                Sense::Minimize => b.min(v),
                Sense::Maximize => b.max(v),
            }),
            (Some(v), None) if proven => Some(v),
            (_, b) => b,
        };
        let gap = match (incumbent, bound) {
            (Some(v), Some(b)) => Some(relative_gap(v, b)),
            _ => None,
        };
        let status = match (incumbent, gap) {
            (Some(_), Some(g)) if g <= gap_target => SolveStatus::Optimal,
            (Some(_), _) => SolveStatus::Feasible,
            (None, _) if proven => SolveStatus::Infeasible,
            (None, _) => SolveStatus::Unknown,
        };
        Self {
            objective,
            status,
            incumbent,
            bound,
            gap,
            schedule,
            stats,
            diagnostics: Vec::new(),
        }
    }

    pub(crate) fn unknown(objective: ObjectiveKind, stats: SolveStats, diagnostics: Vec<String>) -> Self {
        Self {
            diagnostics,
            ..Self::assemble(objective, None, None, false, 0.0, stats)
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_formula() {
        assert_eq!(relative_gap(10, 10), 0.0);
        assert!((relative_gap(10, 8) - 0.2).abs() < 1e-12);
        assert!((relative_gap(8, 10) - 0.25).abs() < 1e-12);
        assert_eq!(relative_gap(0, 3), 3.0 / 1e-9);
    }

    #[test]
    fn status_from_bounds() {
        let s = Schedule::new();
        let r = SolveResult::assemble(
            ObjectiveKind::MinMax,
            Some((10, s.clone())),
            Some(9),
            false,
            0.0,
            SolveStats::default(),
        );
        assert_eq!(r.status, SolveStatus::Feasible);
        let r = SolveResult::assemble(
            ObjectiveKind::MinMax,
            Some((10, s.clone())),
            Some(9),
            false,
            0.1,
            SolveStats::default(),
        );
        assert_eq!(r.status, SolveStatus::Optimal);
        let r = SolveResult::assemble(ObjectiveKind::MaxSum, None, None, true, 0.0, SolveStats::default());
        assert_eq!(r.status, SolveStatus::Infeasible);
        let r = SolveResult::assemble(ObjectiveKind::MaxSum, None, Some(3), false, 0.0, SolveStats::default());
        assert_eq!(r.status, SolveStatus::Unknown);
    }
}

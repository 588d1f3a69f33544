use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::instance::{Instance, InstanceError, ObjectiveKind, Time};
use super::schedule::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// Job or machine index out of range, or a negative start.
    Malformed,
    /// A job placed twice, or both placed and rejected.
    DuplicateAssignment,
    /// A job neither placed nor rejected, or rejected where every job must run.
    Unassigned,
    MachineOverlap,
    ConflictOverlap,
    Deadline,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Malformed => "malformed",
            ViolationKind::DuplicateAssignment => "duplicate-assignment",
            ViolationKind::Unassigned => "unassigned",
            ViolationKind::MachineOverlap => "machine-overlap",
            ViolationKind::ConflictOverlap => "conflict-overlap",
            ViolationKind::Deadline => "deadline",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// The offending job, or job pair for overlaps.
    pub jobs: Vec<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}: {}", self.kind, self.jobs, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            feasible: violations.is_empty(),
            violations,
        }
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("schedule is infeasible ({} violations)", .0.violations.len())]
    Infeasible(ValidationReport),
}

/// Half-open interval intersection test for `[a, a+la)` and `[b, b+lb)`.
#[inline]
pub fn intervals_overlap(a: Time, la: Time, b: Time, lb: Time) -> bool {
    a < b + lb && b < a + la
}

/// Checks a schedule against the job assignment conditions: every placed job
/// occupies `[s, s+p)` on one machine, same-machine intervals are disjoint,
/// conflicting jobs' intervals are disjoint. For MaxSum every placed job must
/// also finish by the deadline; MinSum and MinMax require every job placed.
pub fn validate_schedule(inst: &Instance, sched: &Schedule, obj: ObjectiveKind) -> ValidationReport {
    let n = inst.n_jobs();
    let m = inst.n_machines();
    let mut violations = Vec::new();
    let mut slot: Vec<Option<(usize, Time)>> = vec![None; n];
    let mut rejected = vec![false; n];

    for p in &sched.placements {
        if p.job >= n {
            violations.push(Violation {
                kind: ViolationKind::Malformed,
                jobs: vec![p.job],
                detail: format!("job index {} out of range (n = {n})", p.job),
            });
            continue;
        }
        if p.machine >= m {
            violations.push(Violation {
                kind: ViolationKind::Malformed,
                jobs: vec![p.job],
                detail: format!("machine index {} out of range (m = {m})", p.machine),
            });
            continue;
        }
        if p.start < 0 {
            violations.push(Violation {
                kind: ViolationKind::Malformed,
                jobs: vec![p.job],
                detail: format!("negative start {}", p.start),
            });
            continue;
        }
        if slot[p.job].is_some() {
            violations.push(Violation {
                kind: ViolationKind::DuplicateAssignment,
                jobs: vec![p.job],
                detail: "job placed more than once".into(),
            });
            continue;
        }
        slot[p.job] = Some((p.machine, p.start));
    }

    for &job in &sched.rejected {
        if job >= n {
            violations.push(Violation {
                kind: ViolationKind::Malformed,
                jobs: vec![job],
                detail: format!("rejected job index {job} out of range (n = {n})"),
            });
            continue;
        }
        if slot[job].is_some() || rejected[job] {
            violations.push(Violation {
                kind: ViolationKind::DuplicateAssignment,
                jobs: vec![job],
                detail: "job both placed and rejected, or rejected twice".into(),
            });
            continue;
        }
        rejected[job] = true;
        if obj != ObjectiveKind::MaxSum {
            violations.push(Violation {
                kind: ViolationKind::Unassigned,
                jobs: vec![job],
                detail: format!("{obj} requires every job to be scheduled"),
            });
        }
    }

    for job in 0..n {
        if slot[job].is_none() && !rejected[job] {
            violations.push(Violation {
                kind: ViolationKind::Unassigned,
                jobs: vec![job],
                detail: "job neither placed nor rejected".into(),
            });
        }
    }

    for i in 0..n {
        let Some((mi, si)) = slot[i] else { continue };
        for j in i + 1..n {
            let Some((mj, sj)) = slot[j] else { continue };
            if !intervals_overlap(si, inst.p(i), sj, inst.p(j)) {
                continue;
            }
            if mi == mj {
                violations.push(Violation {
                    kind: ViolationKind::MachineOverlap,
                    jobs: vec![i, j],
                    detail: format!("both on machine {mi}, starts {si} and {sj}"),
                });
            }
            if inst.in_conflict(i, j) {
                violations.push(Violation {
                    kind: ViolationKind::ConflictOverlap,
                    jobs: vec![i, j],
                    detail: format!("conflicting jobs start at {si} and {sj}"),
                });
            }
        }
    }

    if obj == ObjectiveKind::MaxSum {
        if let Some(deadline) = inst.deadline() {
            for (job, s) in slot.iter().enumerate() {
                if let Some((_, start)) = *s {
                    if start + inst.p(job) > deadline {
                        violations.push(Violation {
                            kind: ViolationKind::Deadline,
                            jobs: vec![job],
                            detail: format!(
                                "completes at {} after deadline {deadline}",
                                start + inst.p(job)
                            ),
                        });
                    }
                }
            }
        }
    }

    ValidationReport::from_violations(violations)
}

/// Objective value of a feasible schedule. MinSum uses completion times,
/// `sum w_i (s_i + p_i)`.
pub fn evaluate(inst: &Instance, sched: &Schedule, obj: ObjectiveKind) -> Result<Time, EvaluationError> {
    inst.supports(obj)?;
    let report = validate_schedule(inst, sched, obj);
    if !report.feasible {
        return Err(EvaluationError::Infeasible(report));
    }
    Ok(objective_of(inst, sched, obj))
}

/// Objective value without validation; callers guarantee feasibility.
pub(crate) fn objective_of(inst: &Instance, sched: &Schedule, obj: ObjectiveKind) -> Time {
    let completions = sched
        .placements
        .iter()
        .map(|p| (p.job, p.start + inst.p(p.job)));
    match obj {
        ObjectiveKind::MinMax => completions.map(|(_, c)| c).max().unwrap_or(0),
        ObjectiveKind::MinSum => completions.map(|(j, c)| inst.weight(j) * c).sum(),
        ObjectiveKind::MaxSum => sched.placements.iter().map(|p| inst.profit(p.job)).sum(),
    }
}

/// Largest completion time in a schedule (0 when empty).
pub fn makespan(inst: &Instance, sched: &Schedule) -> Time {
    objective_of(inst, sched, ObjectiveKind::MinMax)
}

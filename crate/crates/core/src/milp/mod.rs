//! Mixed-integer linear formulations of the three problems.
//!
//! * `F1` assigns jobs to numbered positions on each machine,
//! * `F2` orders every pair of jobs with a precedence binary,
//! * `F3` is time-indexed with one binary per job, machine and unit slot.
//!
//! Models are built over a small neutral representation ([`LinearModel`])
//! with integer coefficients. They can be exported in LP format, sized, and
//! checked against a [`VariableAssignment`], typically one produced by
//! embedding a known schedule. Solving is delegated to an external program.

mod build;
mod check;
mod embed;
mod external;
mod lp;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::problem::{InstanceError, ObjectiveKind, Sense, Time, ValidationReport};

pub use build::{build_model, build_model_with_horizon};
pub use check::{check_assignment, CheckReport};
pub use embed::embed_schedule;
pub use external::{parse_solution, solve_external, ExternalSolver, SolutionFile, SolutionParseError};
pub use lp::export_lp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    F1,
    F2,
    F3,
}

impl Formulation {
    pub const ALL: [Formulation; 3] = [Formulation::F1, Formulation::F2, Formulation::F3];

    pub fn name(self) -> &'static str {
        match self {
            Formulation::F1 => "f1",
            Formulation::F2 => "f2",
            Formulation::F3 => "f3",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formulation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(Formulation::F1),
            "f2" => Ok(Formulation::F2),
            "f3" => Ok(Formulation::F3),
            _ => Err(format!("unknown formulation `{s}` (expected f1, f2 or f3)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Binary,
    /// Continuous with lower bound 0 and no upper bound.
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarRole {
    /// `x_i_m_k`: job `i` at position `k` of machine `m`.
    Position,
    /// `x_i_m`: job `i` on machine `m`.
    Machine,
    /// `x_i_m_t`: job `i` runs on machine `m` during slot `t`.
    Slot,
    /// `s_i`
    Start,
    /// `z_m_k`: completion time of position `k` on machine `m`.
    PositionEnd,
    /// `y_i_j`
    Order,
    /// `zz_i`: job `i` is scheduled.
    Scheduled,
    /// `Tmax`
    Makespan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub role: VarRole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

/// Constraint families, in the order they are emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Scheduled jobs finish by the capacity.
    Capacity,
    /// At most (MaxSum) or exactly one machine or position per job.
    Assign,
    /// Processing time equals `p_i` (times `zz_i` for MaxSum).
    Duration,
    /// One job per position.
    PositionSingle,
    /// Position completion times are non-decreasing.
    PositionOrder,
    /// A job ends before its position's completion time.
    PositionEnd,
    /// A job starts after the previous position's completion time.
    PositionStart,
    /// Conflict pair, first job before second unless `y = 1`.
    ConflictForward,
    /// Conflict pair, second job before first if `y = 1`.
    ConflictBackward,
    /// `y_i_j = 1` forces `i` to end before `j` starts.
    Precedence,
    /// Two jobs on the same machine are ordered.
    SameMachine,
    /// Two conflicting jobs are ordered.
    ConflictOrder,
    /// One job per machine and slot.
    MachineSlot,
    /// One machine per job and slot.
    JobSlot,
    /// An active slot is not before the start.
    SlotAfterStart,
    /// An active slot is not after the end.
    SlotBeforeEnd,
    /// Conflicting jobs share no slot.
    ConflictSlot,
    /// `Tmax` bounds every completion time.
    Makespan,
    /// `Tmax` is at most the requested horizon.
    Horizon,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Capacity => "capacity",
            Family::Assign => "assign",
            Family::Duration => "duration",
            Family::PositionSingle => "position-single",
            Family::PositionOrder => "position-order",
            Family::PositionEnd => "position-end",
            Family::PositionStart => "position-start",
            Family::ConflictForward => "conflict-forward",
            Family::ConflictBackward => "conflict-backward",
            Family::Precedence => "precedence",
            Family::SameMachine => "same-machine",
            Family::ConflictOrder => "conflict-order",
            Family::MachineSlot => "machine-slot",
            Family::JobSlot => "job-slot",
            Family::SlotAfterStart => "slot-after-start",
            Family::SlotBeforeEnd => "slot-before-end",
            Family::ConflictSlot => "conflict-slot",
            Family::Makespan => "makespan",
            Family::Horizon => "horizon",
        }
    }
}

pub type VarId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub name: String,
    pub family: Family,
    pub terms: Vec<(VarId, i64)>,
    pub relation: Relation,
    pub rhs: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelMeta {
    pub formulation: Formulation,
    pub objective: ObjectiveKind,
    pub big_b: i64,
    /// Deadline, or the horizon standing in for it.
    pub horizon: Time,
    /// Positions per machine (`F1` only).
    pub positions: Option<usize>,
    /// True when the horizon was imposed on `Tmax`.
    pub horizon_bound: bool,
}

/// Variable name to value.
pub type VariableAssignment = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    sense: Sense,
    variables: Vec<Variable>,
    index: HashMap<String, VarId>,
    objective: Vec<(VarId, i64)>,
    objective_offset: i64,
    constraints: Vec<Constraint>,
    meta: ModelMeta,
}

impl LinearModel {
    fn new(meta: ModelMeta) -> Self {
        Self {
            sense: meta.objective.sense(),
            variables: Vec::new(),
            index: HashMap::new(),
            objective: Vec::new(),
            objective_offset: 0,
            constraints: Vec::new(),
            meta,
        }
    }

    fn add_var(&mut self, name: String, kind: VarKind, role: VarRole) -> VarId {
        let id = self.variables.len();
        let prev = self.index.insert(name.clone(), id);
        assert!(prev.is_none(), "duplicate variable {name}");
        self.variables.push(Variable { name, kind, role });
        id
    }

    fn add_constraint(&mut self, name: String, family: Family, terms: Vec<(VarId, i64)>, relation: Relation, rhs: i64) {
        let terms = terms.into_iter().filter(|&(_, c)| c != 0).collect();
        self.constraints.push(Constraint {
            name,
            family,
            terms,
            relation,
            rhs,
        });
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn meta(&self) -> &ModelMeta {
        &self.meta
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn objective(&self) -> &[(VarId, i64)] {
        &self.objective
    }

    /// Constant added to the linear objective so that it equals the
    /// objective of the embedded schedule (the weighted sum of *start* times
    /// for MinSum).
    pub fn objective_offset(&self) -> i64 {
        self.objective_offset
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn n_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }
}

/// Closed-form size formulas for the MaxSum variants of
/// `F1` and `F2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClosedFormSize {
    pub variables: usize,
    pub constraints: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelSize {
    pub variables: usize,
    pub constraints: usize,
    pub by_family: Vec<(Family, usize)>,
    pub closed_form: Option<ClosedFormSize>,
}

/// Enumerated counts of `model`. The closed-form counts are attached for
/// comparison only; they count `F1`'s linking rows once and `F2`'s pair
/// rows over `i = j`, so they differ from the enumeration.
pub fn model_size(model: &LinearModel) -> ModelSize {
    let mut counts: BTreeMap<Family, usize> = BTreeMap::new();
    for c in &model.constraints {
        *counts.entry(c.family).or_default() += 1;
    }
    let count_role = |role: VarRole| model.variables.iter().filter(|v| v.role == role).count();
    let n = count_role(VarRole::Start);
    let conflicts = counts
        .get(&Family::ConflictForward)
        .or(counts.get(&Family::ConflictOrder))
        .copied()
        .unwrap_or(0);
    let meta = model.meta;
    let closed_form = match (meta.formulation, meta.objective) {
        (Formulation::F1, ObjectiveKind::MaxSum) => {
            let k = meta.positions.unwrap_or(0);
            let m = count_role(VarRole::PositionEnd) / k.max(1);
            Some(ClosedFormSize {
                variables: n * m * k + n + m * k + conflicts,
                constraints: 2 * n + 2 * m * k + n * m * k + 2 * conflicts,
            })
        }
        (Formulation::F2, ObjectiveKind::MaxSum) => {
            let m = count_role(VarRole::Machine) / n.max(1);
            Some(ClosedFormSize {
                variables: n * n + m * n + n,
                constraints: n * n + n * n * m + conflicts + 2 * n,
            })
        }
        _ => None,
    };
    ModelSize {
        variables: model.n_variables(),
        constraints: model.n_constraints(),
        by_family: counts.into_iter().collect(),
        closed_form,
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MilpError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("horizon must be at least 1, got {0}")]
    Horizon(Time),
    #[error("model was built for {expected} jobs, instance has {found}")]
    JobCount { expected: usize, found: usize },
    #[error("schedule is not feasible: {0:?}")]
    Infeasible(ValidationReport),
    #[error("schedule does not fit the model: {0}")]
    DoesNotFit(String),
    #[error("assignment is missing {} variable(s): {}", .0.len(), .0.join(", "))]
    MissingVariables(Vec<String>),
}

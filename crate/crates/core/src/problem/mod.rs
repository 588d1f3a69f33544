//! Problem data model: instances, schedules, feasibility and objectives.

mod bounds;
pub mod io;
mod instance;
mod schedule;
mod validate;

pub use bounds::{greedy_cliques, minmax_lower_bound};
pub use instance::{Instance, InstanceError, InstanceMeta, ObjectiveKind, Sense, Time, MAX_VALUE};
pub use schedule::{Placement, Schedule};
pub use validate::{
    evaluate, intervals_overlap, makespan, validate_schedule, EvaluationError, ValidationReport,
    Violation, ViolationKind,
};

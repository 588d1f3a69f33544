//! Exact methods for scheduling jobs on parallel identical machines when
//! some pairs of jobs conflict and may not run at the same time, even on
//! different machines.
//!
//! Three objectives are supported ([`ObjectiveKind`]): makespan (MinMax),
//! weighted completion time (MinSum) and profit of jobs finished by a
//! deadline (MaxSum). The crate provides
//!
//! * [`problem`]: instances, schedules, feasibility checks and objectives,
//! * [`gen`]: the seeded instance generator and experiment grid,
//! * [`oracle`]: a brute-force solver used as ground truth,
//! * [`solver`]: an anytime branch-and-bound solver,
//! * [`milp`]: the three MILP formulations, LP export, schedule embedding
//!   and an external-solver bridge,
//! * [`binsearch`]: binary search on the makespan horizon,
//! * [`bench`]: the benchmark harness and grouped reports.

pub mod bench;
pub mod binsearch;
pub mod gen;
pub mod milp;
pub mod oracle;
pub mod problem;
pub mod solver;

pub use problem::{Instance, ObjectiveKind, Schedule, Time};

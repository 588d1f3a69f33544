use serde::{Deserialize, Serialize};

use super::instance::Time;

/// One job placed on a machine at an integer start time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Placement {
    pub job: usize,
    pub machine: usize,
    pub start: Time,
}

/// A (possibly partial) schedule: placements plus the rejected jobs.
///
/// The representation can hold malformed content (duplicate jobs, indices
/// out of range, negative starts) so that schedules read from files can be
/// diagnosed by [`validate_schedule`](super::validate_schedule) instead of
/// failing to load.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    #[serde(rename = "assignments")]
    pub placements: Vec<Placement>,
    #[serde(default)]
    pub rejected: Vec<usize>,
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a schedule from per-job `(machine, start)` entries; `None`
    /// entries are rejected jobs.
    pub fn from_slots(slots: &[Option<(usize, Time)>]) -> Self {
        let mut sched = Schedule::new();
        for (job, slot) in slots.iter().enumerate() {
            match *slot {
                Some((machine, start)) => sched.place(job, machine, start),
                None => sched.rejected.push(job),
            }
        }
        sched
    }

    pub fn place(&mut self, job: usize, machine: usize, start: Time) {
        self.placements.push(Placement { job, machine, start });
    }

    pub fn reject(&mut self, job: usize) {
        self.rejected.push(job);
    }

    /// Per-job `(machine, start)`; later duplicates are ignored and
    /// out-of-range jobs dropped.
    pub fn slots(&self, n_jobs: usize) -> Vec<Option<(usize, Time)>> {
        let mut slots = vec![None; n_jobs];
        for p in &self.placements {
            if p.job < n_jobs && slots[p.job].is_none() {
                slots[p.job] = Some((p.machine, p.start));
            }
        }
        slots
    }

    /// Sorts placements by job and rejected jobs ascending.
    pub fn normalize(&mut self) {
        self.placements.sort_by_key(|p| (p.job, p.machine, p.start));
        self.rejected.sort_unstable();
    }

    /// Applies a machine relabeling `machine -> map[machine]`.
    pub fn relabel_machines(&self, map: &[usize]) -> Self {
        let mut out = self.clone();
        for p in &mut out.placements {
            p.machine = map[p.machine];
        }
        out
    }
}

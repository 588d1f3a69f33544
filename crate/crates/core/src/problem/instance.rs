use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Discrete time unit used for processing times, starts and deadlines.
pub type Time = i64;

/// The three objectives supported by every solver in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    /// Minimize the makespan.
    MinMax,
    /// Minimize the weighted sum of completion times.
    MinSum,
    /// Maximize the total profit of jobs completed by the deadline.
    MaxSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 3] = [
        ObjectiveKind::MaxSum,
        ObjectiveKind::MinSum,
        ObjectiveKind::MinMax,
    ];

    pub fn sense(self) -> Sense {
        match self {
            ObjectiveKind::MaxSum => Sense::Maximize,
            ObjectiveKind::MinSum | ObjectiveKind::MinMax => Sense::Minimize,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::MinMax => "minmax",
            ObjectiveKind::MinSum => "minsum",
            ObjectiveKind::MaxSum => "maxsum",
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ObjectiveKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "minmax" => Ok(ObjectiveKind::MinMax),
            "minsum" => Ok(ObjectiveKind::MinSum),
            "maxsum" => Ok(ObjectiveKind::MaxSum),
            other => Err(format!("unknown objective `{other}`")),
        }
    }
}

/// Generator provenance attached to generated instances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceMeta {
    pub seed: u64,
    pub alpha: u32,
    pub setting: u8,
    /// Set when `alpha * n` exceeded the number of job pairs and the conflict
    /// graph was capped at the complete graph.
    #[serde(default)]
    pub conflicts_capped: bool,
}

/// Largest accepted magnitude for any time, weight or profit. Keeps every
/// objective sum far away from `i64` overflow.
pub const MAX_VALUE: Time = 1 << 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("{field} value {value} exceeds the limit {MAX_VALUE}")]
    TooLarge { field: &'static str, value: Time },
    #[error("instance needs at least one machine")]
    NoMachines,
    #[error("job {job} has processing time {p}, expected a positive integer")]
    NonPositiveProcessingTime { job: usize, p: Time },
    #[error("{field} has {got} entries but the instance has {expected} jobs")]
    LengthMismatch {
        field: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("{field} of job {job} is negative ({value})")]
    NegativeValue {
        field: &'static str,
        job: usize,
        value: Time,
    },
    #[error("deadline must be non-negative, got {0}")]
    NegativeDeadline(Time),
    #[error("conflict ({0}, {1}) refers to a job outside the instance")]
    ConflictOutOfRange(usize, usize),
    #[error("conflict ({0}, {0}) is a self-loop")]
    SelfLoop(usize),
    #[error("conflict ({0}, {1}) is listed more than once")]
    DuplicateConflict(usize, usize),
    #[error("objective {objective} requires {missing}")]
    MissingData {
        objective: ObjectiveKind,
        missing: &'static str,
    },
}

/// A scheduling instance: jobs with processing times, optional weights,
/// profits and deadline, identical machines, and an undirected conflict graph.
///
/// Instances are immutable once built; all invariants are checked by
/// [`Instance::new`] and the `with_*` builders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n_machines: usize,
    deadline: Option<Time>,
    proc_times: Vec<Time>,
    weights: Option<Vec<Time>>,
    profits: Option<Vec<Time>>,
    conflicts: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    matrix: Vec<bool>,
    meta: Option<InstanceMeta>,
}

impl Instance {
    /// Builds an instance. Conflict pairs may be given in either orientation;
    /// they are stored normalized (`i < j`) and sorted.
    pub fn new(
        n_machines: usize,
        proc_times: Vec<Time>,
        conflicts: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, InstanceError> {
        if n_machines == 0 {
            return Err(InstanceError::NoMachines);
        }
        if let Some((job, &p)) = proc_times.iter().enumerate().find(|(_, &p)| p < 1) {
            return Err(InstanceError::NonPositiveProcessingTime { job, p });
        }
        check_magnitude("processing time", &proc_times)?;
        let n = proc_times.len();
        let mut matrix = vec![false; n * n];
        let mut pairs = Vec::new();
        for (a, b) in conflicts {
            if a >= n || b >= n {
                return Err(InstanceError::ConflictOutOfRange(a, b));
            }
            if a == b {
                return Err(InstanceError::SelfLoop(a));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if matrix[i * n + j] {
                return Err(InstanceError::DuplicateConflict(i, j));
            }
            matrix[i * n + j] = true;
            matrix[j * n + i] = true;
            pairs.push((i, j));
        }
        pairs.sort_unstable();
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &pairs {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            n_machines,
            deadline: None,
            proc_times,
            weights: None,
            profits: None,
            conflicts: pairs,
            adjacency,
            matrix,
            meta: None,
        })
    }

    pub fn with_weights(mut self, weights: Vec<Time>) -> Result<Self, InstanceError> {
        check_job_vector("weights", &weights, self.n_jobs())?;
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn with_profits(mut self, profits: Vec<Time>) -> Result<Self, InstanceError> {
        check_job_vector("profits", &profits, self.n_jobs())?;
        self.profits = Some(profits);
        Ok(self)
    }

    pub fn with_deadline(mut self, deadline: Time) -> Result<Self, InstanceError> {
        if deadline < 0 {
            return Err(InstanceError::NegativeDeadline(deadline));
        }
        check_magnitude("deadline", &[deadline])?;
        self.deadline = Some(deadline);
        Ok(self)
    }

    pub fn with_meta(mut self, meta: InstanceMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn n_jobs(&self) -> usize {
        self.proc_times.len()
    }

    pub fn n_machines(&self) -> usize {
        self.n_machines
    }

    pub fn deadline(&self) -> Option<Time> {
        self.deadline
    }

    pub fn proc_times(&self) -> &[Time] {
        &self.proc_times
    }

    pub fn p(&self, job: usize) -> Time {
        self.proc_times[job]
    }

    pub fn weights(&self) -> Option<&[Time]> {
        self.weights.as_deref()
    }

    pub fn profits(&self) -> Option<&[Time]> {
        self.profits.as_deref()
    }

    /// Conflict pairs, normalized `i < j` and sorted lexicographically.
    pub fn conflicts(&self) -> &[(usize, usize)] {
        &self.conflicts
    }

    pub fn neighbors(&self, job: usize) -> &[usize] {
        &self.adjacency[job]
    }

    pub fn degree(&self, job: usize) -> usize {
        self.adjacency[job].len()
    }

    pub fn in_conflict(&self, i: usize, j: usize) -> bool {
        self.matrix[i * self.n_jobs() + j]
    }

    pub fn meta(&self) -> Option<&InstanceMeta> {
        self.meta.as_ref()
    }

    pub fn total_processing(&self) -> Time {
        self.proc_times.iter().sum()
    }

    pub fn min_processing(&self) -> Option<Time> {
        self.proc_times.iter().copied().min()
    }

    /// Checks that the data needed by `objective` is present.
    pub fn supports(&self, objective: ObjectiveKind) -> Result<(), InstanceError> {
        let missing = match objective {
            ObjectiveKind::MinMax => None,
            ObjectiveKind::MinSum if self.weights.is_none() => Some("weights"),
            ObjectiveKind::MinSum => None,
            ObjectiveKind::MaxSum if self.profits.is_none() => Some("profits"),
            ObjectiveKind::MaxSum if self.deadline.is_none() => Some("a deadline"),
            ObjectiveKind::MaxSum => None,
        };
        match missing {
            Some(missing) => Err(InstanceError::MissingData { objective, missing }),
            None => Ok(()),
        }
    }

    /// Weight of a job; zero when the instance carries no weights.
    pub fn weight(&self, job: usize) -> Time {
        self.weights.as_ref().map_or(0, |w| w[job])
    }

    /// Profit of a job; zero when the instance carries no profits.
    pub fn profit(&self, job: usize) -> Time {
        self.profits.as_ref().map_or(0, |r| r[job])
    }

    /// Returns a copy with the listed extra conflict pair added.
    pub fn with_extra_conflict(&self, i: usize, j: usize) -> Result<Self, InstanceError> {
        let mut pairs = self.conflicts.clone();
        pairs.push((i, j));
        self.rebuild(self.n_machines, self.deadline, pairs)
    }

    /// Returns a copy with a different machine count.
    pub fn with_machine_count(&self, n_machines: usize) -> Result<Self, InstanceError> {
        self.rebuild(n_machines, self.deadline, self.conflicts.clone())
    }

    /// Returns a copy with jobs renumbered: new job `k` is old job `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self, InstanceError> {
        let n = self.n_jobs();
        assert_eq!(order.len(), n, "permutation length");
        let mut inverse = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        let pick = |v: &[Time]| order.iter().map(|&o| v[o]).collect::<Vec<_>>();
        let conflicts = self
            .conflicts
            .iter()
            .map(|&(i, j)| (inverse[i], inverse[j]));
        let mut inst = Instance::new(self.n_machines, pick(&self.proc_times), conflicts)?;
        inst.deadline = self.deadline;
        inst.weights = self.weights.as_deref().map(pick);
        inst.profits = self.profits.as_deref().map(pick);
        inst.meta = self.meta.clone();
        Ok(inst)
    }

    fn rebuild(
        &self,
        n_machines: usize,
        deadline: Option<Time>,
        pairs: Vec<(usize, usize)>,
    ) -> Result<Self, InstanceError> {
        let mut inst = Instance::new(n_machines, self.proc_times.clone(), pairs)?;
        inst.deadline = deadline;
        inst.weights = self.weights.clone();
        inst.profits = self.profits.clone();
        inst.meta = self.meta.clone();
        Ok(inst)
    }

    /// Returns a copy with a different deadline.
    pub fn with_deadline_replaced(&self, deadline: Time) -> Result<Self, InstanceError> {
        if deadline < 0 {
            return Err(InstanceError::NegativeDeadline(deadline));
        }
        check_magnitude("deadline", &[deadline])?;
        self.rebuild(self.n_machines, Some(deadline), self.conflicts.clone())
    }
}

fn check_job_vector(field: &'static str, values: &[Time], n: usize) -> Result<(), InstanceError> {
    if values.len() != n {
        return Err(InstanceError::LengthMismatch {
            field,
            got: values.len(),
            expected: n,
        });
    }
    if let Some((job, &value)) = values.iter().enumerate().find(|(_, &v)| v < 0) {
        return Err(InstanceError::NegativeValue { field, job, value });
    }
    check_magnitude(field, values)
}

fn check_magnitude(field: &'static str, values: &[Time]) -> Result<(), InstanceError> {
    match values.iter().find(|v| v.abs() > MAX_VALUE) {
        Some(&value) => Err(InstanceError::TooLarge { field, value }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oversized_values_are_rejected() {
        assert!(matches!(
            Instance::new(1, vec![MAX_VALUE + 1], []),
            Err(InstanceError::TooLarge { .. })
        ));
        let inst = Instance::new(1, vec![MAX_VALUE], []).unwrap();
        assert!(inst.clone().with_weights(vec![MAX_VALUE + 1]).is_err());
        assert!(inst.with_deadline(MAX_VALUE + 1).is_err());
    }

    #[test]
    fn conflicts_are_normalized_and_sorted() {
        let inst = Instance::new(2, vec![1, 2, 3], [(2, 0), (1, 0)]).unwrap();
        assert_eq!(inst.conflicts(), &[(0, 1), (0, 2)]);
        assert!(inst.in_conflict(2, 0));
        assert!(!inst.in_conflict(1, 2));
        assert_eq!(inst.neighbors(0), &[1, 2]);
    }

    #[test]
    fn rejects_invalid_data() {
        assert_eq!(
            Instance::new(0, vec![1], []).unwrap_err(),
            InstanceError::NoMachines
        );
        assert_eq!(
            Instance::new(1, vec![1, 0], []).unwrap_err(),
            InstanceError::NonPositiveProcessingTime { job: 1, p: 0 }
        );
        assert_eq!(
            Instance::new(1, vec![1, 1], [(1, 1)]).unwrap_err(),
            InstanceError::SelfLoop(1)
        );
        assert_eq!(
            Instance::new(1, vec![1, 1], [(0, 1), (1, 0)]).unwrap_err(),
            InstanceError::DuplicateConflict(0, 1)
        );
        assert_eq!(
            Instance::new(1, vec![1, 1], [(0, 2)]).unwrap_err(),
            InstanceError::ConflictOutOfRange(0, 2)
        );
        let inst = Instance::new(1, vec![1, 1], []).unwrap();
        assert!(matches!(
            inst.clone().with_weights(vec![1]),
            Err(InstanceError::LengthMismatch { .. })
        ));
        assert!(matches!(
            inst.with_profits(vec![1, -1]),
            Err(InstanceError::NegativeValue { job: 1, .. })
        ));
    }

    #[test]
    fn objective_requirements() {
        let inst = Instance::new(1, vec![2, 3], []).unwrap();
        assert!(inst.supports(ObjectiveKind::MinMax).is_ok());
        assert!(inst.supports(ObjectiveKind::MinSum).is_err());
        let inst = inst.with_profits(vec![1, 1]).unwrap();
        assert_eq!(
            inst.supports(ObjectiveKind::MaxSum),
            Err(InstanceError::MissingData {
                objective: ObjectiveKind::MaxSum,
                missing: "a deadline"
            })
        );
        assert!(inst.with_deadline(4).unwrap().supports(ObjectiveKind::MaxSum).is_ok());
    }

    #[test]
    fn permutation_relabels_conflicts() {
        let inst = Instance::new(1, vec![1, 2, 3], [(0, 2)])
            .unwrap()
            .with_weights(vec![4, 5, 6])
            .unwrap();
        let perm = inst.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(perm.proc_times(), &[3, 1, 2]);
        assert_eq!(perm.weights().unwrap(), &[6, 4, 5]);
        assert_eq!(perm.conflicts(), &[(0, 1)]);
    }
}

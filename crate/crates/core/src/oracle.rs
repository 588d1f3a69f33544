//! Brute-force reference solver for small instances.
//!
//! Every feasible schedule induces an *orientation*: a machine per job and a
//! direction for every disjunctive pair (two jobs on the same machine, or two
//! conflicting jobs). Conversely every acyclic orientation yields a feasible
//! schedule by starting each job at the longest path to it, and that
//! earliest-start schedule is optimal for its orientation under all three
//! objectives. The oracle enumerates machine assignments (up to machine
//! relabeling), then every direction of every disjunctive pair, skips cyclic
//! orientations and keeps the best earliest-start schedule. For MaxSum it
//! additionally enumerates the accepted job subset.
//!
//! Nothing here is shared with the branch-and-bound solver.

use thiserror::Error;

use crate::problem::{Instance, InstanceError, ObjectiveKind, Schedule, Sense, Time};

pub const DEFAULT_MAX_JOBS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_jobs: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_jobs: DEFAULT_MAX_JOBS,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {n_jobs} jobs, brute force is limited to {max_jobs}")]
    TooLarge { n_jobs: usize, max_jobs: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSolution {
    pub optimum: Time,
    pub schedule: Schedule,
    /// Acyclic orientations evaluated.
    pub orientations: u64,
}

pub fn brute_force(
    inst: &Instance,
    obj: ObjectiveKind,
    limits: OracleLimits,
) -> Result<OracleSolution, OracleError> {
    inst.supports(obj)?;
    let n = inst.n_jobs();
    if n > limits.max_jobs {
        return Err(OracleError::TooLarge {
            n_jobs: n,
            max_jobs: limits.max_jobs,
        });
    }
    // bitmasks below are u32
    assert!(n <= 32);

    let mut search = Enumeration {
        inst,
        obj,
        best: None,
        orientations: 0,
    };
    match obj {
        ObjectiveKind::MinMax | ObjectiveKind::MinSum => search.over_assignments(&(0..n).collect::<Vec<_>>()),
        ObjectiveKind::MaxSum => {
            let mut subsets: Vec<u32> = (0..(1u32 << n)).collect();
            // largest profit first so that dominated subsets can be skipped
            let profit = |mask: u32| -> Time {
                (0..n).filter(|&j| mask >> j & 1 == 1).map(|j| inst.profit(j)).sum()
            };
            subsets.sort_by_key(|&mask| (std::cmp::Reverse(profit(mask)), mask));
            for mask in subsets {
                if let Some((best, _)) = &search.best {
                    if profit(mask) <= *best {
                        break;
                    }
                }
                let jobs: Vec<usize> = (0..n).filter(|&j| mask >> j & 1 == 1).collect();
                search.over_assignments(&jobs);
            }
        }
    }
    let orientations = search.orientations;
    let (optimum, schedule) = search.best.expect("some orientation is always feasible");
    Ok(OracleSolution {
        optimum,
        schedule,
        orientations,
    })
}

struct Enumeration<'a> {
    inst: &'a Instance,
    obj: ObjectiveKind,
    best: Option<(Time, Schedule)>,
    orientations: u64,
}

impl Enumeration<'_> {
    /// Enumerates machine assignments of `jobs` as restricted growth strings,
    /// so that relabelings of the same partition are visited once.
    fn over_assignments(&mut self, jobs: &[usize]) {
        let mut machine_of = vec![0usize; jobs.len()];
        self.assign(jobs, &mut machine_of, 0, 0);
    }

    fn assign(&mut self, jobs: &[usize], machine_of: &mut Vec<usize>, k: usize, used: usize) {
        if k == jobs.len() {
            self.over_orientations(jobs, machine_of);
            return;
        }
        let limit = (used + 1).min(self.inst.n_machines());
        for m in 0..limit {
            machine_of[k] = m;
            self.assign(jobs, machine_of, k + 1, used.max(m + 1));
        }
    }

    fn over_orientations(&mut self, jobs: &[usize], machine_of: &[usize]) {
        let mut pairs = Vec::new();
        for a in 0..jobs.len() {
            for b in a + 1..jobs.len() {
                if machine_of[a] == machine_of[b] || self.inst.in_conflict(jobs[a], jobs[b]) {
                    pairs.push((a, b));
                }
            }
        }
        let k = jobs.len();
        let mut arcs = Vec::with_capacity(pairs.len());
        let reach = vec![0u32; k];
        self.orient(jobs, machine_of, &pairs, &mut arcs, reach);
    }

    /// Chooses a direction for `pairs[arcs.len()]`. `reach[a]` is the set of
    /// local indices reachable from `a`; a direction closing a cycle is
    /// skipped immediately.
    fn orient(
        &mut self,
        jobs: &[usize],
        machine_of: &[usize],
        pairs: &[(usize, usize)],
        arcs: &mut Vec<(usize, usize)>,
        reach: Vec<u32>,
    ) {
        let idx = arcs.len();
        if idx == pairs.len() {
            self.evaluate(jobs, machine_of, arcs);
            return;
        }
        let (a, b) = pairs[idx];
        for (u, v) in [(a, b), (b, a)] {
            if reach[v] >> u & 1 == 1 {
                continue;
            }
            let mut next = reach.clone();
            let gained = next[v] | (1 << v);
            for x in 0..next.len() {
                if x == u || next[x] >> u & 1 == 1 {
                    next[x] |= gained;
                }
            }
            arcs.push((u, v));
            self.orient(jobs, machine_of, pairs, arcs, next);
            arcs.pop();
        }
    }

    fn evaluate(&mut self, jobs: &[usize], machine_of: &[usize], arcs: &[(usize, usize)]) {
        let k = jobs.len();
        let Some(order) = topological_order(k, arcs) else {
            return;
        };
        self.orientations += 1;
        let mut start = vec![0 as Time; k];
        let mut succ = vec![Vec::new(); k];
        for &(u, v) in arcs {
            succ[u].push(v);
        }
        for &u in &order {
            let finish = start[u] + self.inst.p(jobs[u]);
            for &v in &succ[u] {
                start[v] = start[v].max(finish);
            }
        }
        let completion = |x: usize| start[x] + self.inst.p(jobs[x]);
        let value = match self.obj {
            ObjectiveKind::MinMax => (0..k).map(completion).max().unwrap_or(0),
            ObjectiveKind::MinSum => (0..k).map(|x| self.inst.weight(jobs[x]) * completion(x)).sum(),
            ObjectiveKind::MaxSum => {
                let deadline = self.inst.deadline().expect("checked by supports");
                if (0..k).any(|x| completion(x) > deadline) {
                    return;
                }
                jobs.iter().map(|&j| self.inst.profit(j)).sum()
            }
        };
        let improves = match &self.best {
            None => true,
            Some((best, _)) => match self.obj.sense() {
                Sense::Minimize => value < *best,
                Sense::Maximize => value > *best,
            },
        };
        if improves {
            let mut slots = vec![None; self.inst.n_jobs()];
            for x in 0..k {
                slots[jobs[x]] = Some((machine_of[x], start[x]));
            }
            self.best = Some((value, Schedule::from_slots(&slots)));
        }
    }
}

/// Kahn's algorithm; `None` when the arcs contain a cycle.
fn topological_order(k: usize, arcs: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut indegree = vec![0usize; k];
    let mut succ = vec![Vec::new(); k];
    for &(u, v) in arcs {
        indegree[v] += 1;
        succ[u].push(v);
    }
    let mut ready: Vec<usize> = (0..k).filter(|&x| indegree[x] == 0).collect();
    let mut order = Vec::with_capacity(k);
    while let Some(u) = ready.pop() {
        order.push(u);
        for &v in &succ[u] {
            indegree[v] -= 1;
            if indegree[v] == 0 {
                ready.push(v);
            }
        }
    }
    (order.len() == k).then_some(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::evaluate;

    fn solve(inst: &Instance, obj: ObjectiveKind) -> OracleSolution {
        let sol = brute_force(inst, obj, OracleLimits::default()).unwrap();
        assert_eq!(evaluate(inst, &sol.schedule, obj).unwrap(), sol.optimum);
        sol
    }

    #[test]
    fn single_machine_sum() {
        let inst = Instance::new(1, vec![3, 2], []).unwrap();
        assert_eq!(solve(&inst, ObjectiveKind::MinMax).optimum, 5);
    }

    #[test]
    fn minsum_two_orders() {
        let inst = Instance::new(2, vec![1, 2], [(0, 1)])
            .unwrap()
            .with_weights(vec![1, 1])
            .unwrap();
        assert_eq!(solve(&inst, ObjectiveKind::MinSum).optimum, 4);
    }

    #[test]
    fn maxsum_picks_best_single_job() {
        let inst = Instance::new(1, vec![2, 3], [])
            .unwrap()
            .with_profits(vec![3, 4])
            .unwrap()
            .with_deadline(4)
            .unwrap();
        assert_eq!(solve(&inst, ObjectiveKind::MaxSum).optimum, 4);
    }

    #[test]
    fn triangle_on_three_machines() {
        let inst = Instance::new(3, vec![2, 2, 2], [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(solve(&inst, ObjectiveKind::MinMax).optimum, 6);
    }

    #[test]
    fn conflict_pair_on_two_machines() {
        let inst = Instance::new(2, vec![3, 3], [(0, 1)]).unwrap();
        assert_eq!(solve(&inst, ObjectiveKind::MinMax).optimum, 6);
        let inst = Instance::new(2, vec![2, 3], [(0, 1)])
            .unwrap()
            .with_profits(vec![3, 4])
            .unwrap()
            .with_deadline(4)
            .unwrap();
        assert_eq!(solve(&inst, ObjectiveKind::MaxSum).optimum, 4);
    }

    #[test]
    fn counts_orientations_of_complete_graph() {
        // one machine class per assignment; acyclic orientations of K3 = 3! = 6
        // for each of the 5 set partitions of three jobs onto three machines
        let inst = Instance::new(3, vec![1, 1, 1], [(0, 1), (1, 2), (0, 2)]).unwrap();
        let sol = solve(&inst, ObjectiveKind::MinMax);
        assert_eq!(sol.orientations, 30);
    }

    #[test]
    fn refuses_large_instances() {
        let inst = Instance::new(1, vec![1; 9], []).unwrap();
        assert_eq!(
            brute_force(&inst, ObjectiveKind::MinMax, OracleLimits::default()).unwrap_err(),
            OracleError::TooLarge {
                n_jobs: 9,
                max_jobs: 8
            }
        );
    }

    #[test]
    fn empty_instance() {
        let inst = Instance::new(2, vec![], []).unwrap();
        assert_eq!(solve(&inst, ObjectiveKind::MinMax).optimum, 0);
    }
}

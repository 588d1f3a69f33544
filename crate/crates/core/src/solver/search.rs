use std::time::Instant;

use crate::problem::{greedy_cliques, minmax_lower_bound, Instance, ObjectiveKind, Schedule, Sense, Time};

use super::{SolveConfig, SolveStats};

/// Outcome of one depth-first run.
pub(super) struct Outcome {
    pub incumbent: Option<(Time, Schedule)>,
    /// Best bound over subtrees that were cut by the gap target or left
    /// unexplored when a limit hit.
    pub open_bound: Option<Time>,
    /// The search tree was exhausted (or stopped on a requested first
    /// solution); otherwise a limit interrupted it.
    pub complete: bool,
    pub stats: SolveStats,
}

/// State restored when a placement is undone.
struct Frame {
    free: Time,
    last_start: Time,
    last_job: Option<usize>,
    committed: Time,
    trail_len: usize,
}

/// Chronological branch and bound.
///
/// Jobs are placed in non-decreasing order of start time (ties by job
/// index). A job placed now starts at the earliest time that is not before
/// the previous start, its machine's availability, and the completion of
/// every already placed conflicting job. Left-shifting an optimal schedule
/// shows that such starts (0 or a completion time of a placed job) lose no
/// optimal solution for the regular objectives and for deadlines.
///
/// Identical machines are collapsed: all machines available no later than
/// the job's release are represented by the one available latest, and
/// machines with equal availability by the lowest index.
pub(super) struct Search<'a> {
    inst: &'a Instance,
    obj: ObjectiveKind,
    n: usize,
    /// Jobs by decreasing processing time, ties by index.
    order: Vec<usize>,
    /// Jobs by decreasing profit density, for the MaxSum relaxation.
    density_order: Vec<usize>,
    cliques: Vec<Vec<usize>>,
    static_lb: Time,
    deadline: Option<Time>,
    /// Solutions must be strictly better than this (minimization only).
    cutoff: Option<Time>,
    stop_on_first: bool,
    gap_target: f64,
    node_limit: Option<u64>,
    time_limit: Option<std::time::Duration>,

    placed: Vec<bool>,
    start: Vec<Time>,
    machine: Vec<usize>,
    n_placed: usize,
    free: Vec<Time>,
    release: Vec<Time>,
    last_start: Time,
    last_job: Option<usize>,
    committed: Time,
    frames: Vec<Frame>,
    release_trail: Vec<(usize, Time)>,

    best: Option<(Time, Vec<Option<(usize, Time)>>)>,
    open_bound: Option<Time>,
    started: Instant,
    nodes: u64,
    propagations: u64,
    interrupted: bool,
    finished: bool,
}

impl<'a> Search<'a> {
    pub fn new(inst: &'a Instance, obj: ObjectiveKind, cfg: &SolveConfig) -> Self {
        let n = inst.n_jobs();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| inst.p(b).cmp(&inst.p(a)).then(a.cmp(&b)));
        let mut density_order: Vec<usize> = (0..n).collect();
        // r_a / p_a > r_b / p_b  <=>  r_a p_b > r_b p_a
        density_order.sort_by(|&a, &b| {
            (inst.profit(b) * inst.p(a))
                .cmp(&(inst.profit(a) * inst.p(b)))
                .then(a.cmp(&b))
        });
        Self {
            inst,
            obj,
            n,
            order,
            density_order,
            cliques: greedy_cliques(inst),
            static_lb: minmax_lower_bound(inst),
            deadline: match obj {
                ObjectiveKind::MaxSum => inst.deadline(),
                _ => None,
            },
            cutoff: None,
            stop_on_first: false,
            gap_target: cfg.gap_target,
            node_limit: cfg.node_limit,
            time_limit: cfg.time_limit,
            placed: vec![false; n],
            start: vec![0; n],
            machine: vec![0; n],
            n_placed: 0,
            free: vec![0; inst.n_machines()],
            release: vec![0; n],
            last_start: 0,
            last_job: None,
            committed: 0,
            frames: Vec::with_capacity(n),
            release_trail: Vec::new(),
            best: None,
            open_bound: None,
            started: Instant::now(),
            nodes: 0,
            propagations: 0,
            interrupted: false,
            finished: false,
        }
    }

    /// Only accept solutions with objective `< cutoff` (minimization).
    pub fn with_cutoff(mut self, cutoff: Time) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn stop_on_first(mut self) -> Self {
        self.stop_on_first = true;
        self
    }

    pub fn run(mut self) -> Outcome {
        self.started = Instant::now();
        self.dfs();
        let n = self.n;
        let incumbent = self.best.take().map(|(value, slots)| {
            let mut sched = Schedule::from_slots(&slots[..n]);
            sched.normalize();
            (value, sched)
        });
        Outcome {
            incumbent,
            open_bound: self.open_bound,
            complete: !self.interrupted,
            stats: SolveStats {
                nodes: self.nodes,
                elapsed: self.started.elapsed(),
                propagations: self.propagations,
                iterations: None,
            },
        }
    }

    fn sense(&self) -> Sense {
        self.obj.sense()
    }

    fn stopped(&self) -> bool {
        self.interrupted || self.finished
    }

    fn hit_limit(&mut self) -> bool {
        if let Some(limit) = self.node_limit {
            if self.nodes >= limit {
                return true;
            }
        }
        if let Some(limit) = self.time_limit {
            if self.nodes % 256 == 0 && self.started.elapsed() >= limit {
                return true;
            }
        }
        false
    }

    fn record_open(&mut self, bound: Time) {
        self.open_bound = Some(match (self.open_bound, self.sense()) {
            (None, _) => bound,
            (Some(b), Sense::Minimize) => b.min(bound),
            (Some(b), Sense::Maximize) => b.max(bound),
        });
    }

    fn offer_incumbent(&mut self) {
        let value = self.committed;
        let better = match (&self.best, self.sense()) {
            (None, Sense::Minimize) => self.cutoff.is_none_or(|c| value < c),
            (None, Sense::Maximize) => true,
            (Some((b, _)), Sense::Minimize) => value < *b,
            (Some((b, _)), Sense::Maximize) => value > *b,
        };
        if better {
            let slots = (0..self.n)
                .map(|j| self.placed[j].then(|| (self.machine[j], self.start[j])))
                .collect();
            self.best = Some((value, slots));
            if self.stop_on_first {
                self.finished = true;
            }
        }
    }

    /// True when the subtree with dual bound `bound` cannot contain a
    /// solution worth finding. Subtrees cut only because of the gap target
    /// are remembered in the open bound.
    fn prune(&mut self, bound: Time) -> bool {
        match self.sense() {
            Sense::Minimize => {
                let cut = match (&self.best, self.cutoff) {
                    (Some((b, _)), Some(c)) => Some((*b).min(c)),
                    (Some((b, _)), None) => Some(*b),
                    (None, c) => c,
                };
                if cut.is_some_and(|c| bound >= c) {
                    return true;
                }
                if let Some((best, _)) = &self.best {
                    let best = *best;
                    if self.gap_target > 0.0
                        && (best - bound) as f64 <= self.gap_target * (best.abs() as f64).max(1e-9)
                    {
                        self.record_open(bound);
                        return true;
                    }
                }
                false
            }
            Sense::Maximize => {
                let Some((best, _)) = &self.best else { return false };
                let best = *best;
                if bound <= best {
                    return true;
                }
                if self.gap_target > 0.0
                    && (bound - best) as f64 <= self.gap_target * (best.abs() as f64).max(1e-9)
                {
                    self.record_open(bound);
                    return true;
                }
                false
            }
        }
    }

    fn dfs(&mut self) {
        if self.stopped() {
            if self.interrupted {
                let b = self.bound();
                self.record_open(b);
            }
            return;
        }
        self.nodes += 1;
        if self.hit_limit() {
            self.interrupted = true;
            let b = self.bound();
            self.record_open(b);
            return;
        }
        if self.obj == ObjectiveKind::MaxSum {
            self.offer_incumbent();
            if self.finished {
                return;
            }
        }
        if self.n_placed == self.n {
            if self.obj != ObjectiveKind::MaxSum {
                self.offer_incumbent();
            }
            return;
        }
        let bound = self.bound();
        if self.prune(bound) {
            return;
        }
        for (job, machine, start) in self.children() {
            self.apply(job, machine, start);
            self.dfs();
            self.undo(job, machine);
            if self.finished {
                return;
            }
        }
    }

    fn availability(&self, machine: usize) -> Time {
        self.free[machine].max(self.last_start)
    }

    fn min_availability(&self) -> Time {
        (0..self.free.len())
            .map(|m| self.availability(m))
            .min()
            .unwrap_or(0)
    }

    fn earliest_possible(&self, job: usize, min_avail: Time) -> Time {
        min_avail.max(self.release[job])
    }

    /// Candidate placements in branching order: jobs by decreasing
    /// processing time, then starts in increasing order.
    fn children(&self) -> Vec<(usize, usize, Time)> {
        let m = self.free.len();
        let mut out = Vec::new();
        let mut machine_starts: Vec<(Time, usize)> = Vec::with_capacity(m);
        for &job in &self.order {
            if self.placed[job] {
                continue;
            }
            let release = self.release[job];
            machine_starts.clear();
            // latest-available machine among those free by the release
            let mut best_fit: Option<(Time, usize)> = None;
            for mach in 0..m {
                let a = self.availability(mach);
                if a <= release {
                    if best_fit.is_none_or(|(ba, _)| a > ba) {
                        best_fit = Some((a, mach));
                    }
                } else if !machine_starts.iter().any(|&(t, _)| t == a) {
                    machine_starts.push((a, mach));
                }
            }
            if let Some((_, mach)) = best_fit {
                machine_starts.push((release.max(self.last_start), mach));
            }
            machine_starts.sort_unstable();
            for &(t, mach) in &machine_starts {
                if t == self.last_start && self.last_job.is_some_and(|last| job < last) {
                    continue;
                }
                if let Some(d) = self.deadline {
                    if t + self.inst.p(job) > d {
                        continue;
                    }
                }
                out.push((job, mach, t));
            }
        }
        out
    }

    fn apply(&mut self, job: usize, mach: usize, t: Time) {
        let end = t + self.inst.p(job);
        let trail_len = self.release_trail.len();
        self.frames.push(Frame {
            free: self.free[mach],
            last_start: self.last_start,
            last_job: self.last_job,
            committed: self.committed,
            trail_len,
        });
        self.placed[job] = true;
        self.start[job] = t;
        self.machine[job] = mach;
        self.n_placed += 1;
        self.free[mach] = end;
        self.last_start = t;
        self.last_job = Some(job);
        self.committed = match self.obj {
            ObjectiveKind::MinMax => self.committed.max(end),
            ObjectiveKind::MinSum => self.committed + self.inst.weight(job) * end,
            ObjectiveKind::MaxSum => self.committed + self.inst.profit(job),
        };
        for &nb in self.inst.neighbors(job) {
            if !self.placed[nb] && self.release[nb] < end {
                self.release_trail.push((nb, self.release[nb]));
                self.release[nb] = end;
            }
        }
        self.propagations += (self.release_trail.len() - trail_len) as u64;
    }

    fn undo(&mut self, job: usize, mach: usize) {
        let frame = self.frames.pop().expect("apply/undo are paired");
        for (nb, old) in self.release_trail.drain(frame.trail_len..).rev() {
            self.release[nb] = old;
        }
        self.free[mach] = frame.free;
        self.last_start = frame.last_start;
        self.last_job = frame.last_job;
        self.committed = frame.committed;
        self.placed[job] = false;
        self.n_placed -= 1;
    }

    /// Admissible dual bound for the subtree below the current node.
    fn bound(&self) -> Time {
        match self.obj {
            ObjectiveKind::MinMax => self.minmax_bound(),
            ObjectiveKind::MinSum => self.minsum_bound(),
            ObjectiveKind::MaxSum => self.maxsum_bound(),
        }
    }

    fn minmax_bound(&self) -> Time {
        let m = self.free.len() as Time;
        let min_avail = self.min_availability();
        let mut lb = self.static_lb.max(self.committed);
        let mut remaining = 0;
        for j in (0..self.n).filter(|&j| !self.placed[j]) {
            remaining += self.inst.p(j);
            lb = lb.max(self.earliest_possible(j, min_avail) + self.inst.p(j));
        }
        let busy: Time = (0..self.free.len()).map(|k| self.availability(k)).sum();
        lb = lb.max((busy + remaining + m - 1) / m);
        for clique in &self.cliques {
            let mut total = 0;
            let mut first = Time::MAX;
            for &j in clique.iter().filter(|&&j| !self.placed[j]) {
                total += self.inst.p(j);
                first = first.min(self.earliest_possible(j, min_avail));
            }
            if total > 0 {
                lb = lb.max(first + total);
            }
        }
        lb
    }

    fn minsum_bound(&self) -> Time {
        let min_avail = self.min_availability();
        let rest: Time = (0..self.n)
            .filter(|&j| !self.placed[j])
            .map(|j| self.inst.weight(j) * (self.earliest_possible(j, min_avail) + self.inst.p(j)))
            .sum();
        self.committed + rest
    }

    /// Committed profit plus a fractional knapsack over the remaining
    /// machine time before the deadline.
    fn maxsum_bound(&self) -> Time {
        let deadline = self.deadline.expect("MaxSum has a deadline");
        let min_avail = self.min_availability();
        let mut capacity: Time = (0..self.free.len())
            .map(|k| (deadline - self.availability(k)).max(0))
            .sum();
        // profit * denominator, kept exact: sum of r_j plus a trailing fraction
        let mut whole = 0;
        let mut fraction = 0;
        for &j in &self.density_order {
            if self.placed[j] || self.earliest_possible(j, min_avail) + self.inst.p(j) > deadline {
                continue;
            }
            if capacity <= 0 {
                break;
            }
            let p = self.inst.p(j);
            if p <= capacity {
                whole += self.inst.profit(j);
                capacity -= p;
            } else {
                fraction = self.inst.profit(j) * capacity / p;
                capacity = 0;
            }
        }
        self.committed + whole + fraction
    }
}

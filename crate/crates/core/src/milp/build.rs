use crate::problem::{Instance, ObjectiveKind, Time};

use super::{Family, Formulation, LinearModel, MilpError, ModelMeta, Relation, VarId, VarKind, VarRole};

use ObjectiveKind::{MaxSum, MinMax, MinSum};
use Relation::{Eq, Ge, Le};

/// Builds `formulation` for `obj`. The horizon is the deadline for MaxSum
/// and `sum p` otherwise.
pub fn build_model(inst: &Instance, formulation: Formulation, obj: ObjectiveKind) -> Result<LinearModel, MilpError> {
    build_model_with_horizon(inst, formulation, obj, None)
}

/// Like [`build_model`] with an explicit horizon. For MinMax the horizon is
/// also imposed on `Tmax`, turning the model into "best makespan not above
/// `horizon`"; `F1` then uses `floor(horizon / p_min)` positions and `F3`
/// `horizon` slots.
pub fn build_model_with_horizon(
    inst: &Instance,
    formulation: Formulation,
    obj: ObjectiveKind,
    horizon: Option<Time>,
) -> Result<LinearModel, MilpError> {
    inst.supports(obj)?;
    if let Some(h) = horizon {
        if h < 1 {
            return Err(MilpError::Horizon(h));
        }
    }
    let t = match (horizon, obj) {
        (Some(h), _) => h,
        (None, MaxSum) => inst.deadline().expect("checked by supports"),
        (None, _) => inst.total_processing(),
    };
    let conflicting: Time = (0..inst.n_jobs())
        .filter(|&i| inst.degree(i) > 0)
        .map(|i| inst.p(i))
        .sum();
    let positions = match formulation {
        Formulation::F1 => Some(inst.min_processing().map_or(0, |pmin| (t / pmin) as usize)),
        _ => None,
    };
    let meta = ModelMeta {
        formulation,
        objective: obj,
        big_b: t + conflicting,
        horizon: t,
        positions,
        horizon_bound: horizon.is_some() && obj == MinMax,
    };
    let mut b = Builder {
        inst,
        model: LinearModel::new(meta),
    };
    match formulation {
        Formulation::F1 => b.f1(),
        Formulation::F2 => b.f2(),
        Formulation::F3 => b.f3(),
    }
    Ok(b.model)
}

struct Builder<'a> {
    inst: &'a Instance,
    model: LinearModel,
}

impl Builder<'_> {
    fn n(&self) -> usize {
        self.inst.n_jobs()
    }

    fn m(&self) -> usize {
        self.inst.n_machines()
    }

    fn obj(&self) -> ObjectiveKind {
        self.model.meta.objective
    }

    fn big_b(&self) -> i64 {
        self.model.meta.big_b
    }

    fn starts(&mut self) -> Vec<VarId> {
        (0..self.n())
            .map(|i| self.model.add_var(format!("s_{i}"), VarKind::Continuous, VarRole::Start))
            .collect()
    }

    fn makespan_var(&mut self) -> Option<VarId> {
        (self.obj() == MinMax).then(|| self.model.add_var("Tmax".into(), VarKind::Continuous, VarRole::Makespan))
    }

    /// `Tmax >= s_i + p_i`, plus the horizon cap when requested.
    fn makespan_rows(&mut self, tmax: Option<VarId>, s: &[VarId]) {
        let Some(tmax) = tmax else { return };
        for (i, &si) in s.iter().enumerate() {
            let p = self.inst.p(i);
            self.model
                .add_constraint(format!("tmax_{i}"), Family::Makespan, vec![(tmax, 1), (si, -1)], Ge, p);
        }
        if self.model.meta.horizon_bound {
            let h = self.model.meta.horizon;
            self.model
                .add_constraint("horizon".into(), Family::Horizon, vec![(tmax, 1)], Le, h);
        }
    }

    /// Objective over start times (MinSum) or `Tmax` (MinMax).
    fn min_objective(&mut self, tmax: Option<VarId>, s: &[VarId]) {
        self.model.objective = match self.obj() {
            MinSum => s.iter().enumerate().map(|(i, &v)| (v, self.inst.weight(i))).collect(),
            MinMax => vec![(tmax.expect("makespan variable"), 1)],
            MaxSum => unreachable!(),
        };
        self.model.objective.retain(|&(_, c)| c != 0);
    }

    /// `s_i + p_i <= T + B (1 - sum x)` written as `s_i + B sum x <= T + B - p_i`.
    fn capacity_rows(&mut self, s: &[VarId], assigned: &[Vec<VarId>]) {
        let (t, bb) = (self.model.meta.horizon, self.big_b());
        for i in 0..self.n() {
            let mut terms = vec![(s[i], 1)];
            terms.extend(assigned[i].iter().map(|&x| (x, bb)));
            self.model
                .add_constraint(format!("capacity_{i}"), Family::Capacity, terms, Le, t + bb - self.inst.p(i));
        }
    }

    /// At most one (MaxSum) or exactly one assignment per job.
    fn assign_rows(&mut self, assigned: &[Vec<VarId>]) {
        let rel = if self.obj() == MaxSum { Le } else { Eq };
        for (i, xs) in assigned.iter().enumerate() {
            let terms = xs.iter().map(|&x| (x, 1)).collect();
            self.model
                .add_constraint(format!("assign_{i}"), Family::Assign, terms, rel, 1);
        }
    }

    fn f1(&mut self) {
        let (n, m) = (self.n(), self.m());
        let k = self.model.meta.positions.unwrap_or(0);
        let bb = self.big_b();
        // x[i][mach][pos], pos 0-based here, 1-based in names
        let mut x = vec![vec![Vec::with_capacity(k); m]; n];
        for (i, xi) in x.iter_mut().enumerate() {
            for (mach, xim) in xi.iter_mut().enumerate() {
                for pos in 1..=k {
                    xim.push(
                        self.model
                            .add_var(format!("x_{i}_{mach}_{pos}"), VarKind::Binary, VarRole::Position),
                    );
                }
            }
        }
        let s = self.starts();
        let z: Vec<Vec<VarId>> = (0..m)
            .map(|mach| {
                (1..=k)
                    .map(|pos| {
                        self.model
                            .add_var(format!("z_{mach}_{pos}"), VarKind::Continuous, VarRole::PositionEnd)
                    })
                    .collect()
            })
            .collect();
        let y: Vec<VarId> = self
            .inst
            .conflicts()
            .iter()
            .map(|&(i, j)| self.model.add_var(format!("y_{i}_{j}"), VarKind::Binary, VarRole::Order))
            .collect();
        let tmax = self.makespan_var();

        let assigned: Vec<Vec<VarId>> = x.iter().map(|xi| xi.iter().flatten().copied().collect()).collect();
        if self.obj() == MaxSum {
            self.model.objective = (0..n)
                .flat_map(|i| assigned[i].iter().map(move |&v| (v, i)))
                .map(|(v, i)| (v, self.inst.profit(i)))
                .filter(|&(_, c)| c != 0)
                .collect();
            self.capacity_rows(&s, &assigned);
        } else {
            self.min_objective(tmax, &s);
        }
        self.makespan_rows(tmax, &s);
        self.assign_rows(&assigned);
        for mach in 0..m {
            for pos in 0..k {
                let terms = (0..n).map(|i| (x[i][mach][pos], 1)).collect();
                self.model
                    .add_constraint(format!("position_{mach}_{}", pos + 1), Family::PositionSingle, terms, Le, 1);
            }
        }
        for mach in 0..m {
            for pos in 1..k {
                self.model.add_constraint(
                    format!("z_order_{mach}_{}", pos + 1),
                    Family::PositionOrder,
                    vec![(z[mach][pos - 1], 1), (z[mach][pos], -1)],
                    Le,
                    0,
                );
            }
        }
        for i in 0..n {
            let p = self.inst.p(i);
            for mach in 0..m {
                for pos in 0..k {
                    // s_i + p_i <= z_mk + B (1 - x_imk)
                    self.model.add_constraint(
                        format!("z_end_{i}_{mach}_{}", pos + 1),
                        Family::PositionEnd,
                        vec![(s[i], 1), (z[mach][pos], -1), (x[i][mach][pos], bb)],
                        Le,
                        bb - p,
                    );
                }
            }
        }
        for i in 0..n {
            for mach in 0..m {
                for pos in 0..k {
                    // s_i >= z_m(k-1) - B (1 - x_imk), with z_m0 = 0
                    let mut terms = vec![(s[i], 1), (x[i][mach][pos], -bb)];
                    if pos > 0 {
                        terms.push((z[mach][pos - 1], -1));
                    }
                    self.model.add_constraint(
                        format!("z_start_{i}_{mach}_{}", pos + 1),
                        Family::PositionStart,
                        terms,
                        Ge,
                        -bb,
                    );
                }
            }
        }
        let conflicts = self.inst.conflicts().to_vec();
        for (l, &(i, j)) in conflicts.iter().enumerate() {
            // y = 0: i before j
            self.model.add_constraint(
                format!("conflict_fwd_{i}_{j}"),
                Family::ConflictForward,
                vec![(s[i], 1), (s[j], -1), (y[l], -bb)],
                Le,
                -self.inst.p(i),
            );
        }
        for (l, &(i, j)) in conflicts.iter().enumerate() {
            // y = 1: j before i
            self.model.add_constraint(
                format!("conflict_bwd_{i}_{j}"),
                Family::ConflictBackward,
                vec![(s[j], 1), (s[i], -1), (y[l], bb)],
                Le,
                bb - self.inst.p(j),
            );
        }
    }

    fn f2(&mut self) {
        let (n, m) = (self.n(), self.m());
        let bb = self.big_b();
        let x: Vec<Vec<VarId>> = (0..n)
            .map(|i| {
                (0..m)
                    .map(|mach| self.model.add_var(format!("x_{i}_{mach}"), VarKind::Binary, VarRole::Machine))
                    .collect()
            })
            .collect();
        let s = self.starts();
        // the full square, diagonal included, so that the variable count
        // matches the closed form; diagonal entries appear in no row
        let y: Vec<Vec<VarId>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.model.add_var(format!("y_{i}_{j}"), VarKind::Binary, VarRole::Order))
                    .collect()
            })
            .collect();
        let tmax = self.makespan_var();

        if self.obj() == MaxSum {
            self.model.objective = (0..n)
                .flat_map(|i| x[i].iter().map(move |&v| (v, i)))
                .map(|(v, i)| (v, self.inst.profit(i)))
                .filter(|&(_, c)| c != 0)
                .collect();
            self.capacity_rows(&s, &x);
        } else {
            self.min_objective(tmax, &s);
        }
        self.makespan_rows(tmax, &s);
        self.assign_rows(&x);
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                // s_i + p_i <= s_j + B (1 - y_ij)
                self.model.add_constraint(
                    format!("precedence_{i}_{j}"),
                    Family::Precedence,
                    vec![(s[i], 1), (s[j], -1), (y[i][j], bb)],
                    Le,
                    bb - self.inst.p(i),
                );
            }
        }
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                for mach in 0..m {
                    self.model.add_constraint(
                        format!("same_machine_{i}_{j}_{mach}"),
                        Family::SameMachine,
                        vec![(y[i][j], 1), (y[j][i], 1), (x[i][mach], -1), (x[j][mach], -1)],
                        Ge,
                        -1,
                    );
                }
            }
        }
        for &(i, j) in self.inst.conflicts() {
            self.model.add_constraint(
                format!("conflict_{i}_{j}"),
                Family::ConflictOrder,
                vec![(y[i][j], 1), (y[j][i], 1)],
                Ge,
                1,
            );
        }
    }

    /// Slot `t` (1-based) covers `[t-1, t)`. A job starting at `s` occupies
    /// slots `s+1..=s+p` and its start variable holds `s+1`, so the
    /// objective carries an offset.
    fn f3(&mut self) {
        let (n, m) = (self.n(), self.m());
        let horizon = self.model.meta.horizon;
        let slots = horizon as usize;
        let bb = self.big_b();
        let mut x = vec![vec![Vec::with_capacity(slots); m]; n];
        for (i, xi) in x.iter_mut().enumerate() {
            for (mach, xim) in xi.iter_mut().enumerate() {
                for t in 1..=slots {
                    xim.push(self.model.add_var(format!("x_{i}_{mach}_{t}"), VarKind::Binary, VarRole::Slot));
                }
            }
        }
        let s = self.starts();
        let zz: Option<Vec<VarId>> = (self.obj() == MaxSum).then(|| {
            (0..n)
                .map(|i| self.model.add_var(format!("zz_{i}"), VarKind::Binary, VarRole::Scheduled))
                .collect()
        });
        let tmax = self.makespan_var();

        match &zz {
            Some(zz) => {
                self.model.objective = zz
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (v, self.inst.profit(i)))
                    .filter(|&(_, c)| c != 0)
                    .collect();
            }
            None => {
                self.min_objective(tmax, &s);
                self.model.objective_offset = match self.obj() {
                    MinSum => -(0..n).map(|i| self.inst.weight(i)).sum::<i64>(),
                    _ => -1,
                };
            }
        }
        self.makespan_rows(tmax, &s);
        for i in 0..n {
            let mut terms: Vec<(VarId, i64)> = x[i].iter().flatten().map(|&v| (v, 1)).collect();
            let rhs = match &zz {
                Some(zz) => {
                    terms.push((zz[i], -self.inst.p(i)));
                    0
                }
                None => self.inst.p(i),
            };
            self.model
                .add_constraint(format!("duration_{i}"), Family::Duration, terms, Eq, rhs);
        }
        for mach in 0..m {
            for t in 0..slots {
                let terms = (0..n).map(|i| (x[i][mach][t], 1)).collect();
                self.model
                    .add_constraint(format!("machine_slot_{mach}_{}", t + 1), Family::MachineSlot, terms, Le, 1);
            }
        }
        for i in 0..n {
            for t in 0..slots {
                let terms = (0..m).map(|mach| (x[i][mach][t], 1)).collect();
                self.model
                    .add_constraint(format!("job_slot_{i}_{}", t + 1), Family::JobSlot, terms, Le, 1);
            }
        }
        for i in 0..n {
            for t in 0..slots {
                // t - s_i >= B (sum_m x_imt - 1)
                let mut terms = vec![(s[i], 1)];
                terms.extend((0..m).map(|mach| (x[i][mach][t], bb)));
                self.model.add_constraint(
                    format!("after_start_{i}_{}", t + 1),
                    Family::SlotAfterStart,
                    terms,
                    Le,
                    bb + t as i64 + 1,
                );
            }
        }
        for i in 0..n {
            let p = self.inst.p(i);
            for t in 0..slots {
                // s_i + p_i - t - 1 >= B (sum_m x_imt - 1)
                let mut terms = vec![(s[i], 1)];
                terms.extend((0..m).map(|mach| (x[i][mach][t], -bb)));
                self.model.add_constraint(
                    format!("before_end_{i}_{}", t + 1),
                    Family::SlotBeforeEnd,
                    terms,
                    Ge,
                    (t as i64 + 1) + 1 - p - bb,
                );
            }
        }
        for &(i, j) in self.inst.conflicts() {
            for t in 0..slots {
                let terms = (0..m).flat_map(|mach| [(x[i][mach][t], 1), (x[j][mach][t], 1)]).collect();
                self.model.add_constraint(
                    format!("conflict_slot_{i}_{j}_{}", t + 1),
                    Family::ConflictSlot,
                    terms,
                    Le,
                    1,
                );
            }
        }
    }
}

use crate::problem::{makespan, validate_schedule, Instance, ObjectiveKind, Schedule, Time};

use super::{Formulation, LinearModel, MilpError, VarRole, VariableAssignment};

/// Maps a feasible schedule onto the variables of `model`.
///
/// Positions in `F1` follow start order on each machine, unused positions
/// repeat the last completion time, and `y_i_j = 0` means `i` runs first.
/// In `F2`, `y_i_j = 1` exactly when `i` ends no later than `j` starts.
/// Jobs left out of a MaxSum schedule get all assignment binaries at 0; the
/// ones with conflicts are queued one after another from the capacity on,
/// the others start at 0, so that every big-B row stays satisfied.
pub fn embed_schedule(model: &LinearModel, inst: &Instance, sched: &Schedule) -> Result<VariableAssignment, MilpError> {
    let n = inst.n_jobs();
    let expected = model.variables().iter().filter(|v| v.role == VarRole::Start).count();
    if expected != n {
        return Err(MilpError::JobCount { expected, found: n });
    }
    let meta = *model.meta();
    let obj = meta.objective;
    let report = validate_schedule(inst, sched, obj);
    if !report.feasible {
        return Err(MilpError::Infeasible(report));
    }
    let slots = sched.slots(n);
    let horizon = meta.horizon;
    if obj != ObjectiveKind::MaxSum || meta.horizon_bound || meta.formulation == Formulation::F3 {
        let span = makespan(inst, sched);
        if span > horizon {
            return Err(MilpError::DoesNotFit(format!(
                "makespan {span} exceeds the model horizon {horizon}"
            )));
        }
    }

    // virtual starts for left-out jobs
    let mut start = vec![0 as Time; n];
    let mut queue = horizon;
    for j in 0..n {
        match slots[j] {
            Some((_, s)) => start[j] = s,
            None if inst.degree(j) > 0 => {
                start[j] = queue;
                queue += inst.p(j);
            }
            None => start[j] = 0,
        }
    }

    let mut asg = VariableAssignment::new();
    for v in model.variables() {
        asg.insert(v.name.clone(), 0.0);
    }
    let mut set = |name: String, value: Time| {
        debug_assert!(asg.contains_key(&name), "unknown variable {name}");
        asg.insert(name, value as f64);
    };

    match meta.formulation {
        Formulation::F1 => {
            let k = meta.positions.unwrap_or(0);
            for mach in 0..inst.n_machines() {
                let mut jobs: Vec<usize> = (0..n).filter(|&j| matches!(slots[j], Some((m, _)) if m == mach)).collect();
                jobs.sort_by_key(|&j| (start[j], j));
                if jobs.len() > k {
                    return Err(MilpError::DoesNotFit(format!(
                        "machine {mach} runs {} jobs but the model has {k} positions",
                        jobs.len()
                    )));
                }
                let mut last = 0;
                for pos in 1..=k {
                    if let Some(&j) = jobs.get(pos - 1) {
                        set(format!("x_{j}_{mach}_{pos}"), 1);
                        last = start[j] + inst.p(j);
                    }
                    set(format!("z_{mach}_{pos}"), last);
                }
            }
            for &(i, j) in inst.conflicts() {
                let i_first = start[i] + inst.p(i) <= start[j];
                set(format!("y_{i}_{j}"), if i_first { 0 } else { 1 });
            }
        }
        Formulation::F2 => {
            for j in 0..n {
                if let Some((mach, _)) = slots[j] {
                    set(format!("x_{j}_{mach}"), 1);
                }
            }
            for i in 0..n {
                for j in (0..n).filter(|&j| j != i) {
                    if start[i] + inst.p(i) <= start[j] {
                        set(format!("y_{i}_{j}"), 1);
                    }
                }
            }
        }
        Formulation::F3 => {
            for j in 0..n {
                match slots[j] {
                    Some((mach, s)) => {
                        for t in s + 1..=s + inst.p(j) {
                            set(format!("x_{j}_{mach}_{t}"), 1);
                        }
                        if obj == ObjectiveKind::MaxSum {
                            set(format!("zz_{j}"), 1);
                        }
                        start[j] = s + 1;
                    }
                    None => start[j] = 0,
                }
            }
        }
    }
    for (j, &s) in start.iter().enumerate() {
        set(format!("s_{j}"), s);
    }
    if obj == ObjectiveKind::MinMax {
        let shift = i64::from(meta.formulation == Formulation::F3);
        set("Tmax".into(), makespan(inst, sched) + shift);
    }
    Ok(asg)
}

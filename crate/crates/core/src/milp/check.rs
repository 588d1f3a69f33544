use serde::Serialize;

use super::{LinearModel, MilpError, Relation, VarKind, VariableAssignment};

/// Slack allowed on continuous relations and bounds.
pub const TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub feasible: bool,
    /// Linear objective plus the model's offset.
    pub objective: f64,
    /// Names of violated constraints, then of variables outside their domain.
    pub violated: Vec<String>,
}

/// Evaluates every constraint and domain of `model` at `asg`. Binaries must
/// be exactly 0 or 1; everything else is compared with [`TOLERANCE`].
/// Entries in `asg` that are not model variables are ignored.
pub fn check_assignment(model: &LinearModel, asg: &VariableAssignment) -> Result<CheckReport, MilpError> {
    let mut missing = Vec::new();
    let values: Vec<f64> = model
        .variables()
        .iter()
        .map(|v| match asg.get(&v.name) {
            Some(&x) => x,
            None => {
                missing.push(v.name.clone());
                f64::NAN
            }
        })
        .collect();
    if !missing.is_empty() {
        return Err(MilpError::MissingVariables(missing));
    }

    let mut violated = Vec::new();
    for c in model.constraints() {
        let lhs: f64 = c.terms.iter().map(|&(v, a)| a as f64 * values[v]).sum();
        let rhs = c.rhs as f64;
        let ok = match c.relation {
            Relation::Le => lhs <= rhs + TOLERANCE,
            Relation::Ge => lhs >= rhs - TOLERANCE,
            Relation::Eq => (lhs - rhs).abs() <= TOLERANCE,
        };
        if !ok {
            violated.push(c.name.clone());
        }
    }
    for (v, &x) in model.variables().iter().zip(&values) {
        let ok = match v.kind {
            VarKind::Binary => x == 0.0 || x == 1.0,
            VarKind::Continuous => x >= -TOLERANCE && x.is_finite(),
        };
        if !ok {
            violated.push(v.name.clone());
        }
    }
    let objective = model
        .objective()
        .iter()
        .map(|&(v, a)| a as f64 * values[v])
        .sum::<f64>()
        + model.objective_offset() as f64;
    Ok(CheckReport {
        feasible: violated.is_empty(),
        objective,
        violated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{build_model, embed_schedule, Formulation};
    use crate::problem::{Instance, ObjectiveKind, Schedule};

    fn setup() -> (LinearModel, VariableAssignment) {
        let inst = Instance::new(1, vec![2, 2], []).unwrap();
        let mut sched = Schedule::new();
        sched.place(0, 0, 0);
        sched.place(1, 0, 2);
        let model = build_model(&inst, Formulation::F2, ObjectiveKind::MinMax).unwrap();
        let asg = embed_schedule(&model, &inst, &sched).unwrap();
        (model, asg)
    }

    #[test]
    fn overlap_on_one_machine_is_caught() {
        let (model, mut asg) = setup();
        asg.insert("s_1".into(), 1.0);
        let report = check_assignment(&model, &asg).unwrap();
        assert!(!report.feasible);
        assert_eq!(report.violated, ["precedence_0_1"]);
        // claiming neither order violates the same-machine rows instead
        asg.insert("y_0_1".into(), 0.0);
        let report = check_assignment(&model, &asg).unwrap();
        assert_eq!(report.violated, ["same_machine_0_1_0", "same_machine_1_0_0"]);
    }

    #[test]
    fn binaries_are_exact() {
        let (model, mut asg) = setup();
        asg.insert("x_0_0".into(), 1.0 - 1e-9);
        let report = check_assignment(&model, &asg).unwrap();
        assert!(report.violated.contains(&"x_0_0".to_string()));
    }

    #[test]
    fn continuous_tolerance() {
        let (model, mut asg) = setup();
        asg.insert("Tmax".into(), 4.0 - 1e-7);
        assert!(check_assignment(&model, &asg).unwrap().feasible);
        asg.insert("Tmax".into(), 4.0 - 1e-5);
        assert!(!check_assignment(&model, &asg).unwrap().feasible);
    }

    #[test]
    fn missing_variables_are_named() {
        let (model, mut asg) = setup();
        asg.remove("s_1");
        asg.remove("Tmax");
        assert_eq!(
            check_assignment(&model, &asg),
            Err(MilpError::MissingVariables(vec!["s_1".into(), "Tmax".into()]))
        );
    }
}

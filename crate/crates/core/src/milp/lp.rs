use std::fmt::Write;

use crate::problem::Sense;

use super::{LinearModel, VarId, VarKind};

const TERMS_PER_LINE: usize = 8;

/// Writes `model` in CPLEX LP format. Output depends only on the model, so
/// repeated exports are byte-identical. The objective offset is recorded in
/// a comment since the format has no constant term.
pub fn export_lp(model: &LinearModel) -> String {
    let meta = model.meta();
    let mut out = String::new();
    let _ = writeln!(out, "\\ formulation {} objective {}", meta.formulation, meta.objective);
    let _ = writeln!(out, "\\ horizon {} big-B {}", meta.horizon, meta.big_b);
    if let Some(k) = meta.positions {
        let _ = writeln!(out, "\\ positions {k}");
    }
    let _ = writeln!(out, "\\ objective offset {}", model.objective_offset());
    out.push_str(match model.sense() {
        Sense::Minimize => "Minimize\n",
        Sense::Maximize => "Maximize\n",
    });
    out.push_str(" obj:");
    write_terms(&mut out, model, model.objective());
    out.push_str("\nSubject To\n");
    for c in model.constraints() {
        let _ = write!(out, " {}:", c.name);
        if c.terms.is_empty() {
            // the format needs at least one variable on the left
            if let Some(v) = model.variables().first() {
                let _ = write!(out, " 0 {}", v.name);
            }
        } else {
            write_terms(&mut out, model, &c.terms);
        }
        let _ = writeln!(out, " {} {}", c.relation.symbol(), c.rhs);
    }
    out.push_str("Bounds\n");
    for v in model.variables().iter().filter(|v| v.kind == VarKind::Continuous) {
        let _ = writeln!(out, " {} >= 0", v.name);
    }
    let binaries: Vec<&str> = model
        .variables()
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for chunk in binaries.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

fn write_terms(out: &mut String, model: &LinearModel, terms: &[(VarId, i64)]) {
    for (k, &(v, a)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if a < 0 { '-' } else { '+' };
        let name = &model.variables()[v].name;
        match (k, a.abs()) {
            (0, 1) if a > 0 => {
                let _ = write!(out, " {name}");
            }
            (0, c) if a > 0 => {
                let _ = write!(out, " {c} {name}");
            }
            (_, 1) => {
                let _ = write!(out, " {sign} {name}");
            }
            (_, c) => {
                let _ = write!(out, " {sign} {c} {name}");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{build_model, model_size, Formulation};
    use crate::problem::{Instance, ObjectiveKind};

    fn two_jobs() -> Instance {
        Instance::new(1, vec![2, 1], [(0, 1)])
            .unwrap()
            .with_weights(vec![1, 3])
            .unwrap()
            .with_profits(vec![2, 1])
            .unwrap()
            .with_deadline(3)
            .unwrap()
    }

    fn section<'a>(lp: &'a str, from: &str, to: &str) -> Vec<&'a str> {
        let start = lp.find(from).unwrap() + from.len();
        let end = start + lp[start..].find(to).unwrap();
        lp[start..end].lines().filter(|l| !l.trim().is_empty()).collect()
    }

    #[test]
    fn one_row_per_constraint() {
        let inst = two_jobs();
        for f in Formulation::ALL {
            for obj in ObjectiveKind::ALL {
                let model = build_model(&inst, f, obj).unwrap();
                let lp = export_lp(&model);
                let rows = section(&lp, "Subject To\n", "Bounds\n");
                // continuation lines start with three spaces
                let heads = rows.iter().filter(|l| !l.starts_with("   ")).count();
                assert_eq!(heads, model_size(&model).constraints, "{f} {obj}");
                assert_eq!(lp, export_lp(&model));
            }
        }
    }

    #[test]
    fn f2_minsum_text() {
        let model = build_model(&two_jobs(), Formulation::F2, ObjectiveKind::MinSum).unwrap();
        let lp = export_lp(&model);
        assert!(lp.contains("Minimize\n obj: s_0 + 3 s_1\n"), "{lp}");
        // B = sum p + conflicting p = 3 + 3
        assert!(lp.contains(" precedence_0_1: s_0 - s_1 + 6 y_0_1 <= 4\n"), "{lp}");
        assert!(lp.contains(" conflict_0_1: y_0_1 + y_1_0 >= 1\n"), "{lp}");
        assert!(lp.contains(" assign_0: x_0_0 = 1\n"), "{lp}");
        assert!(lp.contains("Binary\n x_0_0 x_1_0 y_0_0 y_0_1 y_1_0 y_1_1\nEnd\n"), "{lp}");
    }

    #[test]
    fn long_rows_are_wrapped() {
        let inst = Instance::new(3, vec![1; 4], []).unwrap();
        let model = build_model(&inst, Formulation::F3, ObjectiveKind::MinMax).unwrap();
        let lp = export_lp(&model);
        assert!(lp.contains(" duration_0: x_0_0_1 + x_0_0_2 + x_0_0_3 + x_0_0_4 + x_0_1_1 + x_0_1_2 + x_0_1_3 + x_0_1_4\n    + x_0_2_1"));
        assert!(lp.lines().all(|l| l.len() < 255));
    }
}

mod common;

use conflict_sched::milp::{build_model, check_assignment, embed_schedule, model_size, Formulation};
use conflict_sched::oracle::{brute_force, OracleLimits};
use conflict_sched::problem::{evaluate, Instance, ObjectiveKind};

fn total_wp(inst: &Instance) -> i64 {
    (0..inst.n_jobs()).map(|j| inst.weight(j) * inst.p(j)).sum()
}

#[test]
fn optimal_schedules_embed_in_every_model() {
    let mut rng = common::rng(11);
    for case in 0..60 {
        let inst = common::random_instance(&mut rng, 5, 3, 8);
        for obj in ObjectiveKind::ALL {
            let sol = brute_force(&inst, obj, OracleLimits::default()).unwrap();
            let expected = evaluate(&inst, &sol.schedule, obj).unwrap();
            for f in Formulation::ALL {
                let model = build_model(&inst, f, obj).unwrap();
                let asg = embed_schedule(&model, &inst, &sol.schedule).unwrap();
                let report = check_assignment(&model, &asg).unwrap();
                assert!(report.feasible, "case {case} {f} {obj}: {:?}", report.violated);
                let shift = if obj == ObjectiveKind::MinSum { total_wp(&inst) } else { 0 };
                assert_eq!(report.objective + shift as f64, expected as f64, "case {case} {f} {obj}");
            }
        }
    }
}

#[test]
fn f2_size_is_independent_of_the_deadline() {
    let inst = Instance::new(3, vec![2, 3, 1, 4], [(0, 1), (2, 3)])
        .unwrap()
        .with_profits(vec![1, 2, 3, 4])
        .unwrap()
        .with_deadline(6)
        .unwrap();
    let doubled = inst.with_deadline_replaced(12).unwrap();
    let a = model_size(&build_model(&inst, Formulation::F2, ObjectiveKind::MaxSum).unwrap());
    let b = model_size(&build_model(&doubled, Formulation::F2, ObjectiveKind::MaxSum).unwrap());
    assert_eq!(a, b);
    assert_eq!(a.variables, 16 + 12 + 4);
}

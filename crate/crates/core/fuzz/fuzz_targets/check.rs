#![no_main]

use conflict_sched::problem::io::{instance_from_str, schedule_from_str};
use conflict_sched::problem::{evaluate, validate_schedule, ObjectiveKind};
use libfuzzer_sys::fuzz_target;

// Input: an instance and a schedule separated by a NUL byte.
fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == 0) else { return };
    let (Ok(a), Ok(b)) = (std::str::from_utf8(&data[..split]), std::str::from_utf8(&data[split + 1..])) else {
        return;
    };
    let (Ok(inst), Ok(sched)) = (instance_from_str(a), schedule_from_str(b)) else { return };
    for obj in ObjectiveKind::ALL {
        if inst.supports(obj).is_err() {
            continue;
        }
        let report = validate_schedule(&inst, &sched, obj);
        // evaluation succeeds exactly when validation finds nothing wrong
        assert_eq!(evaluate(&inst, &sched, obj).is_ok(), report.feasible);
    }
});

#![no_main]

use conflict_sched::problem::io::{schedule_from_str, schedule_to_string};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sched) = schedule_from_str(text) {
        assert_eq!(schedule_from_str(&schedule_to_string(&sched)).expect("round trip"), sched);
    }
});

#![no_main]

use conflict_sched::milp::parse_solution;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_solution(text);
    }
});

#![no_main]

use conflict_sched::problem::io::{instance_from_str, instance_to_string};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(inst) = instance_from_str(text) {
        // anything accepted must survive a round trip unchanged
        let again = instance_from_str(&instance_to_string(&inst)).expect("round trip");
        assert_eq!(again, inst);
    }
});

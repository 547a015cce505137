#![no_main]

use fdms_core::simtasks::TaskSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = TaskSpec::from_json_slice(data) {
        assert_eq!(TaskSpec::from_json_slice(s.to_json_string().as_bytes()).unwrap(), s);
    }
});

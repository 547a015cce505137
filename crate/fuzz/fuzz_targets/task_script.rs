#![no_main]

use fdms_core::switching::TaskScript;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = TaskScript::from_json_slice(data) {
        assert_eq!(TaskScript::from_json_slice(s.to_json_string().as_bytes()).unwrap(), s);
    }
});

#![no_main]

use fdms_core::hand::HandModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = HandModel::from_json_slice(data) {
        let again = HandModel::from_json_str(&m.to_json_string()).unwrap();
        assert_eq!(again, m);
    }
});

#![no_main]

use fdms_core::dataio::{parse_synergy, synergy_json_string};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(doc) = parse_synergy(data) {
        let text = synergy_json_string(&doc);
        assert_eq!(parse_synergy(text.as_bytes()).unwrap(), doc);
    }
});
